//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, int};
use crate::ExactRational;

/// Coefficients in ascending degree, trailing zeros trimmed. The zero
/// polynomial has no coefficients and degree `None`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<ExactRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<ExactRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_ints(&[1])
    }

    /// `c x^d`
    pub fn monomial(c: ExactRational, d: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); d + 1];
        coeffs[d] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> ExactRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Lossy coefficients for numeric root finding.
    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                let s = format_rational(&mag);
                if s.contains('/') && i > 0 {
                    write!(f, "({s})")?;
                } else {
                    f.write_str(&s)?;
                }
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_degree() {
        let p = Polynomial::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Polynomial::from_ints(&[0, 0]).degree(), None);
        assert!(Polynomial::from_ints(&[0]).is_zero());
    }

    #[test]
    fn product_of_square_sum_factors() {
        let a = Polynomial::from_ints(&[1, -3, -1, -1]);
        let b = Polynomial::from_ints(&[1, 1, 1, -1]);
        assert_eq!(&a * &b, Polynomial::from_ints(&[1, -2, -3, -6, 1, 0, 1]));
    }

    #[test]
    fn arithmetic() {
        let a = Polynomial::from_ints(&[1, 1]);
        let b = Polynomial::from_ints(&[-1, 1]);
        assert_eq!(&a * &b, Polynomial::from_ints(&[-1, 0, 1]));
        assert_eq!(&a + &b, Polynomial::from_ints(&[0, 2]));
        assert_eq!(&a - &a, Polynomial::zero());
        assert_eq!(-&a, Polynomial::from_ints(&[-1, -1]));
        assert_eq!(a.eval(&int(3)), int(4));
        assert_eq!(
            Polynomial::monomial(int(5), 2),
            Polynomial::from_ints(&[0, 0, 5])
        );
        assert_eq!(&a * &Polynomial::zero(), Polynomial::zero());
    }

    #[test]
    fn display() {
        assert_eq!(
            Polynomial::from_ints(&[1, -3, -1, -1]).to_string(),
            "1 - 3x - x^2 - x^3"
        );
        assert_eq!(
            Polynomial::from_ints(&[0, 1, 0, -2]).to_string(),
            "x - 2x^3"
        );
        assert_eq!(Polynomial::zero().to_string(), "0");
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(
            Polynomial::new(vec![half.clone(), -half]).to_string(),
            "1/2 - (1/2)x"
        );
    }
}
