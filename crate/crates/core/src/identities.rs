//! Identity templates and exact residual checks.
//!
//! Every identity is stored with all terms on one side:
//!
//! ```text
//! sum_i c_i * T(r - o_i)^p  +  sum_j d_j * T(r - a_j) * T(r - b_j)  =  0
//! ```
//!
//! so that a single residual routine covers the square identities, the
//! cross-product identities and the cube identity.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::int_string;
use crate::sequence::{SequenceSpec, TermCache, TermWindow};
use crate::ExactInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("empty verification range {lo}..{hi}")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("identity {0} has no terms")]
    NoTerms(String),
    #[error("identity {id} repeats offset {offset}")]
    DuplicateOffset { id: String, offset: i64 },
    #[error("identity {0} has power 0")]
    ZeroPower(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub offset: i64,
    #[serde(with = "int_string")]
    pub coeff: ExactInt,
}

/// `coeff * T(r - a) * T(r - b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossTerm {
    pub a: i64,
    pub b: i64,
    #[serde(with = "int_string")]
    pub coeff: ExactInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityTemplate {
    pub id: String,
    pub power: u32,
    pub terms: Vec<PowerTerm>,
    #[serde(default)]
    pub cross_terms: Vec<CrossTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl IdentityTemplate {
    /// A pure-power template whose coefficients sit on consecutive offsets
    /// `start, start + 1, ...`. Zero coefficients are kept.
    pub fn dense(id: &str, power: u32, start: i64, coeffs: &[i64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| PowerTerm {
                offset: start + i as i64,
                coeff: BigInt::from(c),
            })
            .collect();
        Self {
            id: id.to_string(),
            power,
            terms,
            cross_terms: Vec::new(),
            provenance: None,
        }
    }

    pub fn with_cross(mut self, cross: &[(i64, i64, i64)]) -> Self {
        self.cross_terms = cross
            .iter()
            .map(|&(a, b, c)| CrossTerm {
                a,
                b,
                coeff: BigInt::from(c),
            })
            .collect();
        self
    }

    pub fn validate(&self) -> Result<(), IdentityError> {
        if self.power == 0 {
            return Err(IdentityError::ZeroPower(self.id.clone()));
        }
        if self.terms.is_empty() && self.cross_terms.is_empty() {
            return Err(IdentityError::NoTerms(self.id.clone()));
        }
        let mut seen = HashSet::new();
        for t in &self.terms {
            if !seen.insert(t.offset) {
                return Err(IdentityError::DuplicateOffset {
                    id: self.id.clone(),
                    offset: t.offset,
                });
            }
        }
        Ok(())
    }

    /// Smallest and largest offset referenced by any term.
    pub fn offset_span(&self) -> (i64, i64) {
        let offsets = self
            .terms
            .iter()
            .map(|t| t.offset)
            .chain(self.cross_terms.iter().flat_map(|c| [c.a, c.b]));
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        for o in offsets {
            lo = lo.min(o);
            hi = hi.max(o);
        }
        (lo, hi)
    }

    /// Power-term coefficients laid out over `min_offset..=max_offset`, with
    /// zeros for absent offsets. Cross terms are ignored.
    pub fn dense_coefficients(&self) -> (i64, Vec<ExactInt>) {
        let lo = self.terms.iter().map(|t| t.offset).min().unwrap_or(0);
        let hi = self.terms.iter().map(|t| t.offset).max().unwrap_or(-1);
        let mut out = vec![BigInt::zero(); (hi - lo + 1).max(0) as usize];
        for t in &self.terms {
            out[(t.offset - lo) as usize] += &t.coeff;
        }
        (lo, out)
    }

    /// The same identity with every offset moved by `by`.
    pub fn shifted(&self, by: i64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.offset += by;
        }
        for c in &mut out.cross_terms {
            c.a += by;
            c.b += by;
        }
        out
    }

    /// Residual at `r` using terms from a prefilled window.
    pub fn residual_in(&self, window: &TermWindow, r: i64) -> ExactInt {
        let mut acc = BigInt::zero();
        for t in &self.terms {
            if !t.coeff.is_zero() {
                acc += &t.coeff * Pow::pow(window.at(r - t.offset), self.power);
            }
        }
        for c in &self.cross_terms {
            acc += &c.coeff * window.at(r - c.a) * window.at(r - c.b);
        }
        acc
    }
}

/// The catalog: square identities `S1`-`S5`, cross-product identities
/// `P1`-`P4` and the cube identity `C1`.
pub fn builtin_identities() -> Vec<IdentityTemplate> {
    vec![
        IdentityTemplate::dense("S1", 2, 0, &[1, -2, -3, -6, 1, 0, 1]),
        IdentityTemplate::dense("S2", 2, -2, &[1, -4, 1, 0, 14, -4, -2, -8, 1, 0, 1]),
        IdentityTemplate::dense("S3", 2, -3, &[1, -3, 0, -4, 2, -10, -4, 0, 1, 1]),
        IdentityTemplate::dense("S4", 2, -1, &[1, -4, 0, 2, 16, 4, 0, -2, -1]),
        IdentityTemplate::dense("S5", 2, -2, &[1, -2, -2, -8, -2, -6, 2, 0, 1]),
        // 4 T(r-1) T(r) = 4 T(r-1)^2 - T(r-4)^2 + T(r)^2
        sparse("P1", &[(0, 1), (1, 4), (4, -1)]).with_cross(&[(0, 1, -4)]),
        // 4 T(r-1) T(r-4) = 4 T(r-1)^2 + T(r-4)^2 - T(r)^2
        sparse("P2", &[(0, -1), (1, 4), (4, 1)]).with_cross(&[(1, 4, -4)]),
        // 2 T(r) T(r-4) = 4 T(r-1)^2 - T(r-4)^2 - T(r)^2
        sparse("P3", &[(0, -1), (1, 4), (4, -1)]).with_cross(&[(0, 4, -2)]),
        // 8 T(r-1) T(r-3) = 4 T(r)^2 + 2 T(r-3)^2 - T(r+1)^2 + 4 T(r-4)^2 - T(r-7)^2
        sparse("P4", &[(-1, -1), (0, 4), (3, 2), (4, 4), (7, -1)]).with_cross(&[(1, 3, -8)]),
        IdentityTemplate::dense("C1", 3, 0, &[1, -4, -9, -34, 24, -2, 40, -14, -1, -2, 1]),
    ]
}

fn sparse(id: &str, terms: &[(i64, i64)]) -> IdentityTemplate {
    IdentityTemplate {
        id: id.to_string(),
        power: 2,
        terms: terms
            .iter()
            .map(|&(offset, c)| PowerTerm {
                offset,
                coeff: BigInt::from(c),
            })
            .collect(),
        cross_terms: Vec::new(),
        provenance: None,
    }
}

pub fn find_builtin(id: &str) -> Option<IdentityTemplate> {
    builtin_identities().into_iter().find(|t| t.id == id)
}

pub fn catalog_to_json(catalog: &[IdentityTemplate]) -> String {
    serde_json::to_string_pretty(catalog).expect("templates always serialize")
}

pub fn catalog_from_json(text: &str) -> Result<Vec<IdentityTemplate>, serde_json::Error> {
    serde_json::from_str(text)
}

/// Exact residual of `template` at index `r`.
pub fn residual(template: &IdentityTemplate, spec: &SequenceSpec, r: i64) -> ExactInt {
    let (lo, hi) = template.offset_span();
    let window = TermCache::new(spec.clone())
        .snapshot(r - hi, r - lo)
        .expect("offset span is nonempty");
    template.residual_in(&window, r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualFailure {
    pub r: i64,
    #[serde(with = "int_string")]
    pub residual: ExactInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: String,
    pub seed: String,
    pub r_lo: i64,
    pub r_hi: i64,
    pub failures: Vec<ResidualFailure>,
    pub pass: bool,
}

/// Residuals for every `r` in `[r_lo, r_hi]`.
pub fn verify_range(
    template: &IdentityTemplate,
    spec: &SequenceSpec,
    r_lo: i64,
    r_hi: i64,
) -> Result<IdentityReport, IdentityError> {
    if r_lo > r_hi {
        return Err(IdentityError::EmptyRange { lo: r_lo, hi: r_hi });
    }
    template.validate()?;
    let (o_lo, o_hi) = template.offset_span();
    let window = TermCache::new(spec.clone())
        .snapshot(r_lo - o_hi, r_hi - o_lo)
        .expect("range checked above");
    Ok(verify_in_window(
        template,
        &window,
        &spec.to_string(),
        r_lo,
        r_hi,
    ))
}

/// As [`verify_range`], reusing an existing window that covers every index
/// the template touches.
pub fn verify_in_window(
    template: &IdentityTemplate,
    window: &TermWindow,
    seed: &str,
    r_lo: i64,
    r_hi: i64,
) -> IdentityReport {
    let failures: Vec<ResidualFailure> = (r_lo..=r_hi)
        .filter_map(|r| {
            let residual = template.residual_in(window, r);
            (!residual.is_zero()).then_some(ResidualFailure { r, residual })
        })
        .collect();
    IdentityReport {
        id: template.id.clone(),
        seed: seed.to_string(),
        r_lo,
        r_hi,
        pass: failures.is_empty(),
        failures,
    }
}
