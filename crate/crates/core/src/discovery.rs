//! Rediscovering identities from sampled terms.
//!
//! For a window of offsets `o_1..o_w` and a power `p`, every row of a
//! [`SampleMatrix`] is `(T(r - o_1)^p, ..., T(r - o_w)^p)` for one seed and
//! one index `r`. An identity over that window is exactly an integer vector
//! in the right kernel of the matrix taken over all seeds and all `r`. A
//! finite sample gives a candidate; the candidate is then checked as an
//! [`IdentityTemplate`] on fresh random seeds before it is returned.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::identities::{verify_range, IdentityTemplate, PowerTerm};
use crate::linalg;
use crate::sequence::{SequenceSpec, TermCache};
use crate::ExactInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiscoveryError {
    #[error("{rows} sample rows for a window of {window}; need at least {needed}")]
    InsufficientRows {
        rows: usize,
        window: usize,
        needed: usize,
    },
    #[error("offset window is empty or repeats an offset")]
    InvalidWindow,
    #[error("power must be at least 1")]
    ZeroPower,
    #[error("kernel has dimension {}; no unique identity", .0.dim())]
    AmbiguousKernel(KernelBasis),
    #[error("candidate {candidate:?} fails for seed {seed} at r = {r}")]
    ConfirmationFailed {
        candidate: Vec<ExactInt>,
        seed: String,
        r: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleMatrix {
    offsets: Vec<i64>,
    power: u32,
    rows: Vec<Vec<ExactInt>>,
}

impl SampleMatrix {
    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn rows(&self) -> &[Vec<ExactInt>] {
        &self.rows
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.offsets.len())
    }

    /// Whether `v` (one entry per offset) annihilates every row.
    pub fn annihilates(&self, v: &[ExactInt]) -> bool {
        v.len() == self.offsets.len() && linalg::mat_vec(&self.rows, v).iter().all(Zero::is_zero)
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.rows, self.offsets.len())
    }
}

/// Primitive integer basis of a sample matrix's right kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    vectors: Vec<Vec<ExactInt>>,
}

impl KernelBasis {
    pub fn vectors(&self) -> &[Vec<ExactInt>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl fmt::Display for KernelBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vectors {
            writeln!(f, "{}", format_vector(v))?;
        }
        Ok(())
    }
}

pub fn format_vector(v: &[ExactInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// One row per `(spec, r)` pair, specs outermost.
pub fn build_sample_matrix(
    specs: &[SequenceSpec],
    offsets: &[i64],
    power: u32,
    r_values: &[i64],
) -> Result<SampleMatrix, DiscoveryError> {
    check_window(offsets)?;
    if power == 0 {
        return Err(DiscoveryError::ZeroPower);
    }
    let rows = specs.len() * r_values.len();
    let needed = offsets.len() + 4;
    if rows < needed {
        return Err(DiscoveryError::InsufficientRows {
            rows,
            window: offsets.len(),
            needed,
        });
    }
    let mut out = Vec::with_capacity(rows);
    for spec in specs {
        let mut cache = TermCache::new(spec.clone());
        for &r in r_values {
            out.push(
                offsets
                    .iter()
                    .map(|&o| Pow::pow(cache.term(r - o), power))
                    .collect(),
            );
        }
    }
    Ok(SampleMatrix {
        offsets: offsets.to_vec(),
        power,
        rows: out,
    })
}

fn check_window(offsets: &[i64]) -> Result<(), DiscoveryError> {
    let distinct: HashSet<i64> = offsets.iter().copied().collect();
    if offsets.is_empty() || distinct.len() != offsets.len() {
        return Err(DiscoveryError::InvalidWindow);
    }
    Ok(())
}

pub fn integer_kernel(m: &SampleMatrix) -> KernelBasis {
    KernelBasis {
        vectors: linalg::integer_kernel(&m.rows, m.offsets.len()),
    }
}

/// Sampling and confirmation settings for [`discover_with`].
#[derive(Clone, Debug)]
pub struct DiscoveryConfig {
    /// Seeds sampled into the matrix.
    pub specs: Vec<SequenceSpec>,
    /// Indices sampled per seed; `None` means `10..=10 + window + 8`.
    pub r_values: Option<Vec<i64>>,
    /// Seeds the candidate must hold for before it is returned.
    pub confirm_specs: Vec<SequenceSpec>,
    pub confirm_range: (i64, i64),
}

impl DiscoveryConfig {
    /// Three fixed seeds plus two random ones for sampling, and five more
    /// random seeds for confirmation, all drawn from `rng_seed`.
    pub fn seeded(rng_seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut specs = vec![
            SequenceSpec::tribonacci(),
            SequenceSpec::new(1, 0, 0),
            SequenceSpec::new(0, 1, 0),
        ];
        specs.extend(random_specs(&mut rng, 2));
        Self {
            specs,
            r_values: None,
            confirm_specs: random_specs(&mut rng, 5),
            confirm_range: (-30, 120),
        }
    }
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self::seeded(0x5eed)
    }
}

/// `n` seeds with entries uniform in `[-999, 999]`.
pub fn random_specs<R: Rng>(rng: &mut R, n: usize) -> Vec<SequenceSpec> {
    (0..n)
        .map(|_| {
            SequenceSpec::new(
                rng.gen_range(-999i64..=999),
                rng.gen_range(-999i64..=999),
                rng.gen_range(-999i64..=999),
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Discovery {
    Found(IdentityTemplate),
    NotFound,
}

/// [`discover_with`] under the default configuration.
pub fn discover_identity(power: u32, offsets: &[i64]) -> Result<Discovery, DiscoveryError> {
    discover_with(power, offsets, &DiscoveryConfig::default())
}

/// Finds the unique identity `sum_i c_i T(r - o_i)^power = 0` over the given
/// offsets, if there is one.
pub fn discover_with(
    power: u32,
    offsets: &[i64],
    config: &DiscoveryConfig,
) -> Result<Discovery, DiscoveryError> {
    check_window(offsets)?;
    let w = offsets.len() as i64;
    let r_values = config
        .r_values
        .clone()
        .unwrap_or_else(|| (10..=10 + w + 8).collect());
    let m = build_sample_matrix(&config.specs, offsets, power, &r_values)?;
    let basis = integer_kernel(&m);
    match basis.dim() {
        0 => Ok(Discovery::NotFound),
        1 => {
            let v = basis.vectors[0].clone();
            let template = template_from_vector(power, offsets, &v);
            let (lo, hi) = config.confirm_range;
            for spec in &config.confirm_specs {
                let report = verify_range(&template, spec, lo, hi).expect("valid template");
                if let Some(fail) = report.failures.first() {
                    return Err(DiscoveryError::ConfirmationFailed {
                        candidate: v,
                        seed: spec.to_string(),
                        r: fail.r,
                    });
                }
            }
            Ok(Discovery::Found(template))
        }
        _ => Err(DiscoveryError::AmbiguousKernel(basis)),
    }
}

/// A template with one term per offset (zeros kept), tagged as discovered.
pub fn template_from_vector(power: u32, offsets: &[i64], v: &[ExactInt]) -> IdentityTemplate {
    let (lo, hi) = (offsets.iter().min().unwrap(), offsets.iter().max().unwrap());
    IdentityTemplate {
        id: format!("D{power}[{lo}..{hi}]"),
        power,
        terms: offsets
            .iter()
            .zip(v)
            .map(|(&offset, c)| PowerTerm {
                offset,
                coeff: c.clone(),
            })
            .collect(),
        cross_terms: Vec::new(),
        provenance: Some("discovered".to_string()),
    }
}

pub fn window(lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi).collect()
}

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::builtin_identities;

    fn base_specs() -> Vec<SequenceSpec> {
        vec![
            SequenceSpec::tribonacci(),
            SequenceSpec::new(1, 0, 0),
            SequenceSpec::new(0, 1, 0),
        ]
    }

    fn found(d: Discovery) -> Vec<ExactInt> {
        match d {
            Discovery::Found(t) => t.dense_coefficients().1,
            Discovery::NotFound => panic!("expected an identity"),
        }
    }

    #[test]
    fn sample_matrix_shape_and_entries() {
        let r: Vec<i64> = (10..=20).collect();
        let m = build_sample_matrix(&base_specs(), &window(0, 6), 2, &r).unwrap();
        assert_eq!(m.shape(), (33, 7));
        assert_eq!(m.rows()[0][4], BigInt::from(169));
    }

    #[test]
    fn power_one_rows_satisfy_the_recurrence() {
        let r: Vec<i64> = (0..12).collect();
        let m = build_sample_matrix(&[SequenceSpec::tribonacci()], &window(0, 3), 1, &r).unwrap();
        assert!(m.annihilates(&to_big(&[1, -1, -1, -1])));
        let k = integer_kernel(&m);
        assert_eq!(k.vectors(), &[to_big(&[1, -1, -1, -1])]);
    }

    #[test]
    fn too_few_rows() {
        let err = build_sample_matrix(&base_specs()[..1], &window(0, 6), 2, &[1, 2, 3]);
        assert_eq!(
            err,
            Err(DiscoveryError::InsufficientRows {
                rows: 3,
                window: 7,
                needed: 11
            })
        );
        assert_eq!(
            build_sample_matrix(&base_specs(), &[0, 1, 1], 2, &[1, 2, 3]),
            Err(DiscoveryError::InvalidWindow)
        );
    }

    #[test]
    fn squares_kernel_is_one_dimensional() {
        let r: Vec<i64> = (10..=25).collect();
        let m = build_sample_matrix(&base_specs(), &window(0, 6), 2, &r).unwrap();
        assert_eq!(m.rank(), 6);
        assert_eq!(integer_kernel(&m).dim(), 1);
    }

    #[test]
    fn discovers_square_and_cube_identities() {
        let s1 = found(discover_identity(2, &window(0, 6)).unwrap());
        assert_eq!(s1, to_big(&[1, -2, -3, -6, 1, 0, 1]));
        let c1 = found(discover_identity(3, &window(0, 10)).unwrap());
        assert_eq!(c1, to_big(&[1, -4, -9, -34, 24, -2, 40, -14, -1, -2, 1]));
        let t = found(discover_identity(1, &window(0, 3)).unwrap());
        assert_eq!(t, to_big(&[1, -1, -1, -1]));
    }

    #[test]
    fn discovered_template_is_tagged() {
        let Discovery::Found(t) = discover_identity(2, &window(0, 6)).unwrap() else {
            panic!()
        };
        assert_eq!(t.provenance.as_deref(), Some("discovered"));
        assert_eq!(t.id, "D2[0..6]");
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["provenance"], "discovered");
    }

    #[test]
    fn short_windows_find_nothing() {
        for len in 1..=6 {
            assert_eq!(
                discover_identity(2, &window(0, len - 1)).unwrap(),
                Discovery::NotFound
            );
        }
        assert_eq!(
            discover_identity(3, &window(0, 9)).unwrap(),
            Discovery::NotFound
        );
        assert_eq!(
            discover_identity(1, &window(0, 2)).unwrap(),
            Discovery::NotFound
        );
    }

    #[test]
    fn five_window_for_power_one_is_ambiguous() {
        match discover_identity(1, &window(0, 4)) {
            Err(DiscoveryError::AmbiguousKernel(basis)) => {
                assert_eq!(basis.dim(), 2);
                let r: Vec<i64> = (0..20).collect();
                let m = build_sample_matrix(&base_specs(), &window(0, 4), 1, &r).unwrap();
                for v in [to_big(&[1, -1, -1, -1, 0]), to_big(&[0, 1, -1, -1, -1])] {
                    assert!(m.annihilates(&v));
                }
                for v in basis.vectors() {
                    assert!(m.annihilates(v));
                }
            }
            other => panic!("expected AmbiguousKernel, got {other:?}"),
        }
    }

    #[test]
    fn printed_square_identities_lie_in_their_window_kernels() {
        let r: Vec<i64> = (10..=30).collect();
        for t in builtin_identities()
            .into_iter()
            .filter(|t| t.id.starts_with('S'))
        {
            let (lo, coeffs) = t.dense_coefficients();
            let offs = window(lo, lo + coeffs.len() as i64 - 1);
            let m = build_sample_matrix(&base_specs(), &offs, 2, &r).unwrap();
            assert!(m.annihilates(&coeffs), "{}", t.id);
        }
    }

    #[test]
    fn kernel_stable_under_more_rows() {
        let offs = window(0, 6);
        let few: Vec<i64> = (10..=20).collect();
        let many: Vec<i64> = (-15..=40).collect();
        let mut specs = base_specs();
        let a = integer_kernel(&build_sample_matrix(&specs, &offs, 2, &few).unwrap());
        specs.extend(random_specs(&mut ChaCha8Rng::seed_from_u64(9), 4));
        let b = integer_kernel(&build_sample_matrix(&specs, &offs, 2, &many).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn confirmation_rejects_sample_artifacts() {
        // A single degenerate seed has a larger kernel than the true one.
        let config = DiscoveryConfig {
            specs: vec![SequenceSpec::new(0, 0, 0)],
            r_values: Some((0..20).collect()),
            confirm_specs: vec![SequenceSpec::tribonacci()],
            confirm_range: (0, 10),
        };
        assert!(matches!(
            discover_with(2, &[0], &config),
            Err(DiscoveryError::ConfirmationFailed { .. })
        ));
    }
}
