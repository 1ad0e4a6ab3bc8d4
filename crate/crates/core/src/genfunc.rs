//! Rational generating functions and their power-series expansions.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::Polynomial;
use crate::rational::rational_vec_string;
use crate::sequence::{SequenceSpec, TermCache};
use crate::sums::{LinearRecurrence, SQUARE_SUM_DENOMINATOR, SQUARE_SUM_FACTORS};
use crate::ExactRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenFuncError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("denominator has zero constant term; no power series at 0")]
    NonUnitConstantTerm,
}

/// `num(x) / den(x)`, not necessarily in lowest terms.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawRationalFunction", into = "RawRationalFunction")]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

#[derive(Serialize, Deserialize)]
struct RawRationalFunction {
    #[serde(with = "rational_vec_string")]
    num: Vec<ExactRational>,
    #[serde(with = "rational_vec_string")]
    den: Vec<ExactRational>,
}

impl TryFrom<RawRationalFunction> for RationalFunction {
    type Error = GenFuncError;

    fn try_from(raw: RawRationalFunction) -> Result<Self, Self::Error> {
        Self::new(Polynomial::new(raw.num), Polynomial::new(raw.den))
    }
}

impl From<RationalFunction> for RawRationalFunction {
    fn from(rf: RationalFunction) -> Self {
        Self {
            num: rf.num.coeffs().to_vec(),
            den: rf.den.coeffs().to_vec(),
        }
    }
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, GenFuncError> {
        if den.is_zero() {
            return Err(GenFuncError::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    /// Equality as functions: `a/b == c/d` iff `a d == c b`.
    pub fn equivalent(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rational functions always serialize")
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.equivalent(other)
    }
}

impl std::fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// Generating function `sum_j X_j x^j` of a recurrence sequence:
///
/// ```text
/// sum_m f_m sum_{j=1}^{c_m} x^{c_m - j} X_{-j}
/// --------------------------------------------
///           1 - sum_m f_m x^{c_m}
/// ```
pub fn lemma2_generating_function(rec: &LinearRecurrence) -> RationalFunction {
    let mut num = Polynomial::zero();
    let mut den = Polynomial::one();
    for tap in rec.taps() {
        let c = tap.shift as usize;
        den = &den - &Polynomial::monomial(tap.coeff.clone(), c);
        for j in 1..=c {
            let term = Polynomial::monomial(&tap.coeff * rec.seed(j), c - j);
            num = &num + &term;
        }
    }
    RationalFunction::new(num, den).expect("constant term of denominator is 1")
}

/// Generating function of `T(j)^2` for any seed, written in terms of the
/// squares `T(-1)^2, ..., T(-6)^2`.
pub fn theorem3_squares_genfunc(spec: &SequenceSpec) -> RationalFunction {
    let mut cache = TermCache::new(spec.clone());
    let mut num = Polynomial::zero();
    for (i, factor) in SQUARE_SUM_FACTORS.iter().enumerate() {
        let t = cache.term(-(i as i64) - 1);
        let sq = BigRational::from_integer(t * t);
        num = &num + &Polynomial::from_ints(factor).scale(&sq);
    }
    RationalFunction::new(num, square_sum_denominator()).expect("nonzero denominator")
}

/// `(1 - 3x - x^2 - x^3)(1 + x + x^2 - x^3)`
pub fn square_sum_denominator() -> Polynomial {
    let [a, b] = SQUARE_SUM_DENOMINATOR;
    &Polynomial::from_ints(a) * &Polynomial::from_ints(b)
}

/// `x(1 - x - x^2 - x^3) / ((1 - 3x - x^2 - x^3)(1 + x + x^2 - x^3))`, the
/// generating function of the squared Tribonacci numbers.
pub fn tribonacci_squares_genfunc() -> RationalFunction {
    RationalFunction::new(
        Polynomial::from_ints(&[0, 1, -1, -1, -1]),
        square_sum_denominator(),
    )
    .expect("nonzero denominator")
}

/// First `count` Taylor coefficients at 0, by long division.
pub fn series_coefficients(
    rf: &RationalFunction,
    count: usize,
) -> Result<Vec<ExactRational>, GenFuncError> {
    let d0 = rf.den.coeff(0);
    if d0.is_zero() {
        return Err(GenFuncError::NonUnitConstantTerm);
    }
    // Scale so the denominator has constant term 1.
    let inv = d0.recip();
    let den: Vec<ExactRational> = rf.den.coeffs().iter().map(|c| c * &inv).collect();
    let mut out: Vec<ExactRational> = Vec::with_capacity(count);
    for n in 0..count {
        let mut a = rf.num.coeff(n) * &inv;
        for (i, d) in den.iter().enumerate().skip(1).take(n) {
            if !d.is_zero() {
                a -= d * &out[n - i];
            }
        }
        out.push(a);
    }
    Ok(out)
}

/// Smallest modulus among the denominator's complex roots, which bounds the
/// disk where the series converges (exactly, when the fraction is reduced).
/// Constant denominators give `f64::INFINITY`.
pub fn convergence_radius_estimate(rf: &RationalFunction) -> f64 {
    let roots = polynomial_roots(&rf.den.to_f64());
    roots.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
}

/// Complex roots by Durand-Kerner iteration. `coeffs` ascending.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| {
        monic
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, &c| acc * z + c)
    };

    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..1000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            let step = eval(zi) / denom;
            roots[i] = zi - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}
