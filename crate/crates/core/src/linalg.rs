//! Exact Gaussian elimination over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{ExactInt, ExactRational};

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref(m: &mut Vec<Vec<ExactRational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for (x, p) in r.iter_mut().zip(&pivot_row).skip(col) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

fn to_rational(rows: &[Vec<ExactInt>]) -> Vec<Vec<ExactRational>> {
    rows.iter()
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect()
}

pub fn rank(rows: &[Vec<ExactInt>], ncols: usize) -> usize {
    rref(&mut to_rational(rows), ncols).len()
}

/// Basis of `{ v in Z^ncols : M v = 0 }` as primitive vectors, one per free
/// column of the reduced echelon form.
pub fn integer_kernel(rows: &[Vec<ExactInt>], ncols: usize) -> Vec<Vec<ExactInt>> {
    let mut m = to_rational(rows);
    let pivots = rref(&mut m, ncols);
    let free = (0..ncols).filter(|c| !pivots.contains(c));
    free.map(|f| {
        let mut v = vec![BigRational::zero(); ncols];
        v[f] = BigRational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -m[r][f].clone();
        }
        primitive(&v)
    })
    .collect()
}

/// Clears denominators, divides out the content, and makes the first
/// nonzero entry positive.
pub fn primitive(v: &[ExactRational]) -> Vec<ExactInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|q| (q * &lcm).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if content.is_zero() {
        return ints;
    }
    let flip = ints
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative());
    for x in ints.iter_mut() {
        *x /= &content;
        if flip {
            *x = -&*x;
        }
    }
    ints
}

pub fn mat_vec(rows: &[Vec<ExactInt>], v: &[ExactInt]) -> Vec<ExactInt> {
    rows.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn primitive_normalization() {
        let q = |p: i64, d: i64| BigRational::new(p.into(), d.into());
        assert_eq!(primitive(&[q(-1, 2), q(1, 3), q(0, 1)]), v(&[3, -2, 0]));
        assert_eq!(primitive(&[q(0, 1), q(4, 1), q(-6, 1)]), v(&[0, 2, -3]));
        assert_eq!(primitive(&[q(0, 1), q(0, 1)]), v(&[0, 0]));
    }

    #[test]
    fn full_rank_has_empty_kernel() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 5], &[7, -1, 2]]);
        assert_eq!(rank(&a, 3), 3);
        assert!(integer_kernel(&a, 3).is_empty());
    }

    #[test]
    fn simple_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = integer_kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for b in &k {
            assert!(mat_vec(&a, b).iter().all(Zero::is_zero));
        }
        assert_eq!(k[0], v(&[2, -1, 0]));
        assert_eq!(k[1], v(&[3, 0, -1]));
    }

    #[test]
    fn empty_matrix_kernel_is_everything() {
        assert_eq!(integer_kernel(&[], 2), vec![v(&[1, 0]), v(&[0, 1])]);
    }

    proptest! {
        #[test]
        fn kernel_vectors_annihilate_and_count_matches_rank(
            rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 6), 1..6)
        ) {
            let a: Vec<Vec<BigInt>> = rows.iter().map(|r| v(r)).collect();
            let k = integer_kernel(&a, 6);
            prop_assert_eq!(k.len() + rank(&a, 6), 6);
            for b in &k {
                prop_assert!(mat_vec(&a, b).iter().all(Zero::is_zero));
                let content = b.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
                prop_assert!(content.is_one());
            }
        }
    }
}
