//! Closed-form partial sums of squared terms.
//!
//! [`lemma1_partial_sum`] evaluates `sum_{j=0}^{k} x^j X_j` for any sequence
//! satisfying a constant-coefficient recurrence, using only boundary terms.
//! [`theorem2_weighted_square_sum`] is the same sum specialized to squared
//! Tribonacci terms with its polynomial factors written out, and
//! [`special_sum`] evaluates the fourteen fixed closed forms enumerated by
//! [`SumVariant`]. [`direct_sum_oracle`] adds the terms up one by one and is
//! the reference for all of them.

use std::fmt;
use std::io;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, int, pow_i, rational_string};
use crate::sequence::{SequenceSpec, TermCache};
use crate::{ExactInt, ExactRational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SumError {
    #[error("x = {0} is a root of the closed-form denominator")]
    DenominatorZero(String),
    #[error("{variant} is only valid for the Tribonacci seed 0,1,1 (got {seed})")]
    VariantSpecMismatch { variant: SumVariant, seed: String },
    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(String),
    #[error("unknown sum variant {0:?}")]
    UnknownVariant(String),
}

/// One term `coeff * X_{j - shift}` of a recurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tap {
    pub shift: u32,
    pub coeff: ExactRational,
}

/// `X_j = sum_m f_m X_{j - c_m}` together with the seed values
/// `X_{-c}, ..., X_{-1}` (`c` the largest shift).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRecurrence {
    taps: Vec<Tap>,
    seeds: Vec<ExactRational>,
}

impl LinearRecurrence {
    pub fn new(taps: Vec<Tap>, seeds: Vec<ExactRational>) -> Result<Self, SumError> {
        if taps.is_empty() {
            return Err(SumError::InvalidRecurrence("no taps".into()));
        }
        let mut shifts: Vec<u32> = taps.iter().map(|t| t.shift).collect();
        shifts.sort_unstable();
        if shifts[0] == 0 {
            return Err(SumError::InvalidRecurrence("shift 0".into()));
        }
        if shifts.windows(2).any(|w| w[0] == w[1]) {
            return Err(SumError::InvalidRecurrence("repeated shift".into()));
        }
        if taps.iter().any(|t| t.coeff.is_zero()) {
            return Err(SumError::InvalidRecurrence("zero coefficient".into()));
        }
        let order = *shifts.last().unwrap() as usize;
        if seeds.len() != order {
            return Err(SumError::InvalidRecurrence(format!(
                "expected {order} seed values, got {}",
                seeds.len()
            )));
        }
        Ok(Self { taps, seeds })
    }

    /// Integer taps `(shift, coeff)` with integer seeds `X_{-c}..X_{-1}`.
    pub fn from_ints(taps: &[(u32, i64)], seeds: &[ExactInt]) -> Result<Self, SumError> {
        Self::new(
            taps.iter()
                .map(|&(shift, c)| Tap {
                    shift,
                    coeff: int(c),
                })
                .collect(),
            seeds
                .iter()
                .cloned()
                .map(BigRational::from_integer)
                .collect(),
        )
    }

    /// The sequence itself, as an order-3 recurrence.
    pub fn tribonacci(spec: &SequenceSpec) -> Self {
        let seeds = TermCache::new(spec.clone())
            .range(-3, -1)
            .expect("nonempty");
        Self::from_ints(&[(1, 1), (2, 1), (3, 1)], &seeds).expect("valid taps")
    }

    /// Squared terms, as the order-6 recurrence
    /// `X_j = 2 X_{j-1} + 3 X_{j-2} + 6 X_{j-3} - X_{j-4} - X_{j-6}`.
    pub fn squares(spec: &SequenceSpec) -> Self {
        let seeds: Vec<ExactInt> = TermCache::new(spec.clone())
            .range(-6, -1)
            .expect("nonempty")
            .into_iter()
            .map(|t| &t * &t)
            .collect();
        Self::from_ints(&[(1, 2), (2, 3), (3, 6), (4, -1), (6, -1)], &seeds).expect("valid taps")
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn order(&self) -> usize {
        self.seeds.len()
    }

    /// `X_{-j}` for `1 <= j <= order`.
    pub fn seed(&self, j: usize) -> &ExactRational {
        &self.seeds[self.seeds.len() - j]
    }

    /// `[X_lo, ..., X_hi]`, running the recurrence forward from the seeds and,
    /// for indices below `-order`, backward through the largest-shift tap.
    pub fn values(&self, lo: i64, hi: i64) -> Vec<ExactRational> {
        let order = self.order() as i64;
        let start = lo.min(-order);
        let end = hi.max(-1);
        let mut vals: Vec<ExactRational> = vec![BigRational::zero(); (end - start + 1) as usize];
        let idx = |n: i64| (n - start) as usize;
        for (i, s) in self.seeds.iter().enumerate() {
            vals[idx(-order + i as i64)] = s.clone();
        }
        for n in 0..=end {
            let mut acc = BigRational::zero();
            for t in &self.taps {
                acc += &t.coeff * &vals[idx(n - t.shift as i64)];
            }
            vals[idx(n)] = acc;
        }
        let last = self.taps.iter().max_by_key(|t| t.shift).unwrap();
        for n in (start..-order).rev() {
            let j = n + last.shift as i64;
            let mut rest = vals[idx(j)].clone();
            for t in self.taps.iter().filter(|t| t.shift != last.shift) {
                rest -= &t.coeff * &vals[idx(j - t.shift as i64)];
            }
            vals[idx(n)] = rest / &last.coeff;
        }
        vals[idx(lo)..=idx(hi)].to_vec()
    }
}

/// `sum_{j=0}^{k} x^j X_j` from boundary values only:
///
/// ```text
/// sum_m x^{c_m} f_m ( sum_{j=1}^{c_m} x^{-j} X_{-j}  -  sum_{j=k-c_m+1}^{k} x^j X_j )
/// ------------------------------------------------------------------------------
///                           1 - sum_m x^{c_m} f_m
/// ```
///
/// `x = 0` returns `X_0` directly since the formula has negative powers of `x`.
pub fn lemma1_partial_sum(
    rec: &LinearRecurrence,
    x: &ExactRational,
    k: u64,
) -> Result<ExactRational, SumError> {
    let k = k as i64;
    if x.is_zero() {
        return Ok(rec.values(0, 0).remove(0));
    }
    let mut denom = BigRational::one();
    for t in rec.taps() {
        denom -= pow_i(x, t.shift as i64) * &t.coeff;
    }
    if denom.is_zero() {
        return Err(SumError::DenominatorZero(format_rational(x)));
    }
    let order = rec.order() as i64;
    let tail = rec.values(k - order + 1, k);
    let tail_at = |j: i64| &tail[(j - (k - order + 1)) as usize];

    let mut numer = BigRational::zero();
    for t in rec.taps() {
        let c = t.shift as i64;
        let mut inner = BigRational::zero();
        for j in 1..=c {
            inner += pow_i(x, -j) * rec.seed(j as usize);
        }
        for j in (k - c + 1)..=k {
            inner -= pow_i(x, j) * tail_at(j);
        }
        numer += pow_i(x, c) * &t.coeff * inner;
    }
    Ok(numer / denom)
}

fn poly_at(coeffs: &[i64], x: &ExactRational) -> ExactRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, &c| acc * x + int(c))
}

/// Numerator polynomials multiplying `T(-i)^2 - x^{k+1} T(k-i+1)^2`, for
/// `i = 1..=6`, in the weighted square sum. Ascending coefficients.
pub(crate) const SQUARE_SUM_FACTORS: [&[i64]; 6] = [
    &[2, 3, 6, -1, 0, -1],
    &[3, 6, -1, 0, -1],
    &[6, -1, 0, -1],
    &[-1, 0, -1],
    &[0, -1],
    &[-1],
];

/// `(1 - 3x - x^2 - x^3)(1 + x + x^2 - x^3)`, as its two ascending factors.
pub(crate) const SQUARE_SUM_DENOMINATOR: [&[i64]; 2] = [&[1, -3, -1, -1], &[1, 1, 1, -1]];

/// `sum_{j=0}^{k} x^j T(j)^2` for a generalized sequence, via the closed form
/// with denominator `(1 - 3x - x^2 - x^3)(1 + x + x^2 - x^3)`.
pub fn theorem2_weighted_square_sum(
    spec: &SequenceSpec,
    x: &ExactRational,
    k: u64,
) -> Result<ExactRational, SumError> {
    let mut cache = TermCache::new(spec.clone());
    if x.is_zero() {
        let t0 = cache.term(0);
        return Ok(BigRational::from_integer(t0 * t0));
    }
    let denom = SQUARE_SUM_DENOMINATOR
        .iter()
        .map(|f| poly_at(f, x))
        .fold(BigRational::one(), |a, b| a * b);
    if denom.is_zero() {
        return Err(SumError::DenominatorZero(format_rational(x)));
    }
    let k = k as i64;
    let x_k1 = pow_i(x, k + 1);
    let mut numer = BigRational::zero();
    for (i, factor) in SQUARE_SUM_FACTORS.iter().enumerate() {
        let i = i as i64 + 1;
        let head = square(cache.term(-i));
        let tail = square(cache.term(k - i + 1));
        numer += poly_at(factor, x) * (BigRational::from_integer(head) - &x_k1 * tail);
    }
    Ok(numer / denom)
}

fn square(t: &ExactInt) -> ExactInt {
    t * t
}

/// The fixed closed forms for partial sums of squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum SumVariant {
    /// `sum_{j=0}^k T(j)^2`, any seed.
    GEN_ALL,
    /// `sum_{j=0}^k (-1)^j T(j)^2`, any seed.
    GEN_ALT,
    TRIB_ALL,
    TRIB_ALT,
    /// `sum_{j=0}^k T(2j)^2`
    EVEN,
    /// `sum_{j=1}^k T(2j-1)^2`
    ODD,
    /// `sum_{j=0}^k (-1)^j T(2j)^2`
    ALT_EVEN,
    /// `sum_{j=1}^k (-1)^{j-1} T(2j-1)^2`
    ALT_ODD,
    /// `sum_{j=0}^k T(4j)^2`
    QUAD_0,
    /// `sum_{j=1}^k T(4j-2)^2`
    QUAD_2,
    /// `sum_{j=1}^k T(4j-3)^2`
    QUAD_3,
    /// `sum_{j=0}^k T(4j-1)^2`
    QUAD_1,
    /// `sum_{j=0}^k j T(j)^2`, any seed.
    J_WEIGHT,
    /// `sum_{j=0}^k j^2 T(j)^2`, any seed.
    J2_WEIGHT,
}

impl SumVariant {
    pub const ALL: [SumVariant; 14] = [
        Self::GEN_ALL,
        Self::GEN_ALT,
        Self::TRIB_ALL,
        Self::TRIB_ALT,
        Self::EVEN,
        Self::ODD,
        Self::ALT_EVEN,
        Self::ALT_ODD,
        Self::QUAD_0,
        Self::QUAD_2,
        Self::QUAD_3,
        Self::QUAD_1,
        Self::J_WEIGHT,
        Self::J2_WEIGHT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::GEN_ALL => "GEN_ALL",
            Self::GEN_ALT => "GEN_ALT",
            Self::TRIB_ALL => "TRIB_ALL",
            Self::TRIB_ALT => "TRIB_ALT",
            Self::EVEN => "EVEN",
            Self::ODD => "ODD",
            Self::ALT_EVEN => "ALT_EVEN",
            Self::ALT_ODD => "ALT_ODD",
            Self::QUAD_0 => "QUAD_0",
            Self::QUAD_2 => "QUAD_2",
            Self::QUAD_3 => "QUAD_3",
            Self::QUAD_1 => "QUAD_1",
            Self::J_WEIGHT => "J_WEIGHT",
            Self::J2_WEIGHT => "J2_WEIGHT",
        }
    }

    /// First summation index of the printed sum.
    pub fn lower_bound(self) -> u64 {
        match self {
            Self::ODD | Self::ALT_ODD | Self::QUAD_2 | Self::QUAD_3 => 1,
            _ => 0,
        }
    }

    /// Variants whose closed forms bake in constants of the `0,1,1` seed.
    pub fn tribonacci_only(self) -> bool {
        !matches!(
            self,
            Self::GEN_ALL | Self::GEN_ALT | Self::J_WEIGHT | Self::J2_WEIGHT
        )
    }

    /// `(index, weight)` for the `j`-th summand.
    fn summand(self, j: i64) -> (i64, i64) {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        match self {
            Self::GEN_ALL | Self::TRIB_ALL => (j, 1),
            Self::GEN_ALT | Self::TRIB_ALT => (j, sign),
            Self::EVEN => (2 * j, 1),
            Self::ODD => (2 * j - 1, 1),
            Self::ALT_EVEN => (2 * j, sign),
            Self::ALT_ODD => (2 * j - 1, -sign),
            Self::QUAD_0 => (4 * j, 1),
            Self::QUAD_2 => (4 * j - 2, 1),
            Self::QUAD_3 => (4 * j - 3, 1),
            Self::QUAD_1 => (4 * j - 1, 1),
            Self::J_WEIGHT => (j, j),
            Self::J2_WEIGHT => (j, j * j),
        }
    }
}

impl fmt::Display for SumVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SumVariant {
    type Err = SumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SumError::UnknownVariant(s.to_string()))
    }
}

/// Evaluates the closed form for `variant` at `k`. Sums with no terms
/// (`k` below the lower bound) are zero.
pub fn special_sum(
    spec: &SequenceSpec,
    variant: SumVariant,
    k: u64,
) -> Result<ExactRational, SumError> {
    use SumVariant::*;

    if variant.tribonacci_only() && !spec.is_tribonacci() {
        return Err(SumError::VariantSpecMismatch {
            variant,
            seed: spec.to_string(),
        });
    }
    if k < variant.lower_bound() {
        return Ok(BigRational::zero());
    }
    let mut cache = TermCache::new(spec.clone());
    let mut s = |n: i64| -> ExactInt { square(cache.term(n)) };
    let k = k as i64;
    let alt = if k % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let b = |v: i64| BigInt::from(v);

    let (scaled, divisor): (ExactInt, i64) = match variant {
        GEN_ALL => (
            b(9) * (s(k) - s(-1)) + b(7) * (s(k - 1) - s(-2)) + b(4) * (s(k - 2) - s(-3))
                - b(2) * (s(k - 3) - s(-4))
                - (s(k - 4) - s(-5))
                - (s(k - 5) - s(-6)),
            8,
        ),
        GEN_ALT => (
            b(7) * (s(-1) + &alt * s(k)) - b(5) * (s(-2) + &alt * s(k - 1))
                + b(8) * (s(-3) + &alt * s(k - 2))
                - b(2) * (s(-4) + &alt * s(k - 3))
                + (s(-5) + &alt * s(k - 4))
                - (s(-6) + &alt * s(k - 5)),
            8,
        ),
        TRIB_ALL => (
            b(9) * s(k) + b(7) * s(k - 1) + b(4) * s(k - 2) - b(2) * s(k - 3) - s(k - 4) - s(k - 5)
                + 2,
            8,
        ),
        TRIB_ALT => (
            &alt * (b(7) * s(k) - b(5) * s(k - 1) + b(8) * s(k - 2) - b(2) * s(k - 3) + s(k - 4)
                - s(k - 5))
                - 2,
            8,
        ),
        EVEN => (
            b(8) * s(2 * k) + s(2 * k - 1) + b(6) * s(2 * k - 2)
                - b(2) * s(2 * k - 3)
                - s(2 * k - 5),
            8,
        ),
        ODD => (
            s(2 * k) + b(6) * s(2 * k - 1) - b(2) * s(2 * k - 2) - s(2 * k - 4) + 2,
            8,
        ),
        ALT_EVEN => (
            &alt * (b(7) * s(2 * k) + b(3) * s(2 * k - 1) - b(6) * s(2 * k - 2) - s(2 * k - 4)
                + s(2 * k - 5))
                + 2,
            8,
        ),
        ALT_ODD => (
            &alt * (s(2 * k) - b(9) * s(2 * k - 1) - b(6) * s(2 * k - 2)
                + s(2 * k - 4)
                + s(2 * k - 5))
                + 2,
            8,
        ),
        QUAD_0 => (
            b(15) * s(4 * k) + b(4) * s(4 * k - 1) - b(2) * s(4 * k - 3) - s(4 * k - 4) + 2,
            16,
        ),
        QUAD_2 => (
            s(4 * k) - b(2) * s(4 * k - 1) + b(12) * s(4 * k - 2) - b(2) * s(4 * k - 3)
                + s(4 * k - 4)
                - b(2) * s(4 * k - 5)
                - 2,
            16,
        ),
        QUAD_3 => (
            b(2) * s(4 * k) - b(3) * s(4 * k - 1) - b(8) * s(4 * k - 2) + s(4 * k - 5) + 4,
            16,
        ),
        QUAD_1 => (
            b(15) * s(4 * k - 1) + b(4) * s(4 * k - 2) - b(2) * s(4 * k - 4) - s(4 * k - 5),
            16,
        ),
        J_WEIGHT => (
            b(9 * k - 2) * s(k) + b(7 * (k - 1)) * s(k - 1) + b(4 * (k - 2)) * s(k - 2)
                - b(2 * k) * s(k - 3)
                - b(k) * s(k - 4)
                - b(k - 1) * s(k - 5)
                + b(11) * s(-1)
                + b(14) * s(-2)
                + b(12) * s(-3)
                - b(2) * s(-4)
                - s(-5)
                - b(2) * s(-6),
            8,
        ),
        J2_WEIGHT => (
            b(9 * k * k - 4 * k + 6) * s(k)
                + b(7 * k * k - 14 * k + 7) * s(k - 1)
                + b(4 * k * k - 16 * k + 10) * s(k - 2)
                - b(2 * k * k + 6) * s(k - 3)
                - b(k * k + 2) * s(k - 4)
                - b(k * k - 2 * k + 3) * s(k - 5)
                - b(19) * s(-1)
                - b(28) * s(-2)
                - b(30) * s(-3)
                + b(8) * s(-4)
                + b(3) * s(-5)
                + b(6) * s(-6),
            8,
        ),
    };
    Ok(BigRational::new(scaled, b(divisor)))
}

/// What the oracle adds up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleSum {
    Variant(SumVariant),
    /// `sum_{j=0}^k x^j T(j)^2`
    PowerWeighted(ExactRational),
}

/// Literal summation. Terms come from plain iteration of the three-term
/// recurrence, run backward as `T(n) = T(n+3) - T(n+2) - T(n+1)`, so nothing
/// here shares code with the closed forms or [`TermCache`].
pub fn direct_sum_oracle(spec: &SequenceSpec, what: &OracleSum, k: u64) -> ExactRational {
    let k = k as i64;
    match what {
        OracleSum::PowerWeighted(x) => {
            let terms = brute_terms(spec, 0, k);
            let mut acc = BigRational::zero();
            let mut xp = BigRational::one();
            for t in &terms {
                acc += &xp * BigRational::from_integer(t * t);
                xp *= x;
            }
            acc
        }
        OracleSum::Variant(v) => {
            let lb = v.lower_bound() as i64;
            if k < lb {
                return BigRational::zero();
            }
            let summands: Vec<(i64, i64)> = (lb..=k).map(|j| v.summand(j)).collect();
            let lo = summands.iter().map(|s| s.0).min().unwrap();
            let hi = summands.iter().map(|s| s.0).max().unwrap();
            let terms = brute_terms(spec, lo, hi);
            let acc: BigInt = summands
                .iter()
                .map(|&(n, w)| {
                    let t = &terms[(n - lo) as usize];
                    BigInt::from(w) * t * t
                })
                .sum();
            BigRational::from_integer(acc)
        }
    }
}

fn brute_terms(spec: &SequenceSpec, lo: i64, hi: i64) -> Vec<ExactInt> {
    let [t0, t1, t2] = spec.initial_values();
    let start = lo.min(0);
    let end = hi.max(2);
    let mut fwd = vec![t0.clone(), t1.clone(), t2.clone()];
    for n in 3..=end as usize {
        let v = &fwd[n - 1] + &fwd[n - 2] + &fwd[n - 3];
        fwd.push(v);
    }
    // back[i] = T(-1 - i)
    let mut back: Vec<ExactInt> = Vec::new();
    let get = |fwd: &Vec<ExactInt>, back: &Vec<ExactInt>, n: i64| -> ExactInt {
        if n >= 0 {
            fwd[n as usize].clone()
        } else {
            back[(-1 - n) as usize].clone()
        }
    };
    for n in (start..0).rev() {
        let v = get(&fwd, &back, n + 3) - get(&fwd, &back, n + 2) - get(&fwd, &back, n + 1);
        back.push(v);
    }
    (lo..=hi).map(|n| get(&fwd, &back, n)).collect()
}

/// Closed form against oracle for one variant and `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumReport {
    pub variant: String,
    pub k: u64,
    #[serde(with = "rational_string")]
    pub closed: ExactRational,
    #[serde(with = "rational_string")]
    pub oracle: ExactRational,
    pub equal: bool,
}

impl SumReport {
    fn new(variant: String, k: u64, closed: ExactRational, oracle: ExactRational) -> Self {
        let equal = closed == oracle;
        Self {
            variant,
            k,
            closed,
            oracle,
            equal,
        }
    }
}

pub fn compare(spec: &SequenceSpec, variant: SumVariant, k: u64) -> Result<SumReport, SumError> {
    let closed = special_sum(spec, variant, k)?;
    let oracle = direct_sum_oracle(spec, &OracleSum::Variant(variant), k);
    Ok(SumReport::new(variant.to_string(), k, closed, oracle))
}

/// [`compare`] for the `x`-weighted sum. The variant label is `x=<x>`.
pub fn compare_weighted(
    spec: &SequenceSpec,
    x: &ExactRational,
    k: u64,
) -> Result<SumReport, SumError> {
    let closed = theorem2_weighted_square_sum(spec, x, k)?;
    let oracle = direct_sum_oracle(spec, &OracleSum::PowerWeighted(x.clone()), k);
    Ok(SumReport::new(
        format!("x={}", format_rational(x)),
        k,
        closed,
        oracle,
    ))
}

/// Writes reports as CSV with header `variant,k,closed,oracle,equal`.
pub fn write_csv<W: io::Write>(reports: &[SumReport], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
