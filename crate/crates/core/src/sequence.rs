//! Generalized Tribonacci terms over all integer indices.
//!
//! Three independent routes compute `T(n)`:
//!
//! - [`TermCache`] iterates `T(r) = T(r-1) + T(r-2) + T(r-3)` forward and
//!   `T(n) = 2 T(n+3) - T(n+4)` backward, memoizing a contiguous window.
//! - [`term_alt`] iterates the four-term form `T(r) = 2 T(r-1) - T(r-4)`.
//! - [`term_fast`] raises the companion matrix (or its integer inverse) to
//!   the `|n|`-th power by repeated squaring.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ExactInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("empty index range {lo}..{hi}")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("invalid seed {0:?}: expected three comma-separated integers")]
    InvalidSeed(String),
}

/// The three initial values `T(0), T(1), T(2)` of one sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    t0: ExactInt,
    t1: ExactInt,
    t2: ExactInt,
}

impl SequenceSpec {
    pub fn new(t0: impl Into<ExactInt>, t1: impl Into<ExactInt>, t2: impl Into<ExactInt>) -> Self {
        Self {
            t0: t0.into(),
            t1: t1.into(),
            t2: t2.into(),
        }
    }

    /// The Tribonacci numbers, seeded `0, 1, 1`.
    pub fn tribonacci() -> Self {
        Self::new(0, 1, 1)
    }

    pub fn is_tribonacci(&self) -> bool {
        *self == Self::tribonacci()
    }

    pub fn initial_values(&self) -> [&ExactInt; 3] {
        [&self.t0, &self.t1, &self.t2]
    }

    /// Componentwise sum of seeds; the sequence of the sum is the sum of the
    /// sequences.
    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            &self.t0 + &other.t0,
            &self.t1 + &other.t1,
            &self.t2 + &other.t2,
        )
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.t0, self.t1, self.t2)
    }
}

impl FromStr for SequenceSpec {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(SequenceError::InvalidSeed(s.to_string()));
        }
        let mut vals = parts
            .iter()
            .map(|p| BigInt::from_str(p).map_err(|_| SequenceError::InvalidSeed(s.to_string())));
        let t0 = vals.next().unwrap()?;
        let t1 = vals.next().unwrap()?;
        let t2 = vals.next().unwrap()?;
        Ok(Self { t0, t1, t2 })
    }
}

/// Memoized terms of one sequence over a contiguous index window `[lo, hi]`.
///
/// The window always covers `0..=3` and grows by at least its own length
/// whenever an index outside it is requested.
#[derive(Clone, Debug)]
pub struct TermCache {
    spec: SequenceSpec,
    lo: i64,
    values: VecDeque<ExactInt>,
}

impl TermCache {
    pub fn new(spec: SequenceSpec) -> Self {
        let [t0, t1, t2] = spec.initial_values();
        let t3 = t0 + t1 + t2;
        let values = VecDeque::from(vec![t0.clone(), t1.clone(), t2.clone(), t3]);
        Self {
            spec,
            lo: 0,
            values,
        }
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    /// `T(n)`, extending the window as needed.
    pub fn term(&mut self, n: i64) -> &ExactInt {
        self.ensure(n, n);
        &self.values[(n - self.lo) as usize]
    }

    /// Extends the window to cover `[lo, hi]`.
    pub fn ensure(&mut self, lo: i64, hi: i64) {
        if hi > self.hi() {
            let target = hi.max(self.hi() + self.values.len() as i64);
            self.extend_forward(target);
        }
        if lo < self.lo {
            let target = lo.min(self.lo - self.values.len() as i64);
            self.extend_backward(target);
        }
    }

    fn extend_forward(&mut self, target: i64) {
        self.values.reserve((target - self.hi()) as usize);
        for _ in self.hi()..target {
            let len = self.values.len();
            let next = &self.values[len - 1] + &self.values[len - 2] + &self.values[len - 3];
            self.values.push_back(next);
        }
    }

    fn extend_backward(&mut self, target: i64) {
        while self.lo > target {
            // T(n) = 2 T(n+3) - T(n+4), with the window starting at n+1.
            let prev = (&self.values[2] << 1) - &self.values[3];
            self.values.push_front(prev);
            self.lo -= 1;
        }
    }

    /// `[T(lo), ..., T(hi)]`.
    pub fn range(&mut self, lo: i64, hi: i64) -> Result<Vec<ExactInt>, SequenceError> {
        if lo > hi {
            return Err(SequenceError::EmptyRange { lo, hi });
        }
        self.ensure(lo, hi);
        let start = (lo - self.lo) as usize;
        let end = (hi - self.lo) as usize;
        Ok(self.values.range(start..=end).cloned().collect())
    }

    /// Fills `[lo, hi]` and returns an immutable copy of that window, which is
    /// `Sync` and can be shared across threads.
    pub fn snapshot(&mut self, lo: i64, hi: i64) -> Result<TermWindow, SequenceError> {
        Ok(TermWindow {
            lo,
            values: self.range(lo, hi)?,
        })
    }
}

/// A frozen slice of one sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermWindow {
    lo: i64,
    values: Vec<ExactInt>,
}

impl TermWindow {
    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> Option<&ExactInt> {
        if n < self.lo {
            return None;
        }
        self.values.get((n - self.lo) as usize)
    }

    /// Panics if `n` lies outside the window.
    pub fn at(&self, n: i64) -> &ExactInt {
        self.get(n)
            .unwrap_or_else(|| panic!("index {n} outside window {}..={}", self.lo, self.hi()))
    }
}

/// `T(n)` via a fresh [`TermCache`].
pub fn term(spec: &SequenceSpec, n: i64) -> ExactInt {
    TermCache::new(spec.clone()).term(n).clone()
}

/// `[T(lo), ..., T(hi)]`; rejects `lo > hi`.
pub fn range_terms(spec: &SequenceSpec, lo: i64, hi: i64) -> Result<Vec<ExactInt>, SequenceError> {
    TermCache::new(spec.clone()).range(lo, hi)
}

/// `T(n)` via `T(r) = 2 T(r-1) - T(r-4)`, seeded from `T(0)..T(3)`.
pub fn term_alt(spec: &SequenceSpec, n: i64) -> ExactInt {
    let [t0, t1, t2] = spec.initial_values();
    // window[i] = T(base + i)
    let mut window = [t0.clone(), t1.clone(), t2.clone(), t0 + t1 + t2];
    let mut base = 0i64;
    while n > base + 3 {
        let next = (&window[3] << 1) - &window[0];
        window.rotate_left(1);
        window[3] = next;
        base += 1;
    }
    while n < base {
        let prev = (&window[2] << 1) - &window[3];
        window.rotate_right(1);
        window[0] = prev;
        base -= 1;
    }
    window[(n - base) as usize].clone()
}

/// `T(n)` in `O(log |n|)` big-integer matrix products.
pub fn term_fast(spec: &SequenceSpec, n: i64) -> ExactInt {
    let [t0, t1, t2] = spec.initial_values();
    let state = [t2.clone(), t1.clone(), t0.clone()];
    let step = if n >= 0 {
        CompanionMatrix::forward()
    } else {
        CompanionMatrix::inverse()
    };
    // M^k (T(2), T(1), T(0)) = (T(k+2), T(k+1), T(k)) for any integer k.
    let [_, _, tn] = step.pow(n.unsigned_abs()).apply(&state);
    tn
}

/// A 3x3 integer matrix acting on states `(T(r), T(r-1), T(r-2))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompanionMatrix([[ExactInt; 3]; 3]);

impl CompanionMatrix {
    fn from_i64(rows: [[i64; 3]; 3]) -> Self {
        Self(rows.map(|row| row.map(BigInt::from)))
    }

    pub fn identity() -> Self {
        Self::from_i64([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    /// Advances the state by one index.
    pub fn forward() -> Self {
        Self::from_i64([[1, 1, 1], [1, 0, 0], [0, 1, 0]])
    }

    /// Steps the state back by one index. Integral because the forward
    /// matrix has determinant 1.
    pub fn inverse() -> Self {
        Self::from_i64([[0, 1, 0], [0, 0, 1], [1, -1, -1]])
    }

    pub fn entries(&self) -> &[[ExactInt; 3]; 3] {
        &self.0
    }

    pub fn determinant(&self) -> ExactInt {
        let m = &self.0;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::from_i64([[0; 3]; 3]);
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = BigInt::zero();
                for k in 0..3 {
                    acc += &self.0[i][k] * &rhs.0[k][j];
                }
                out.0[i][j] = acc;
            }
        }
        out
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut result = Self::identity();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn apply(&self, v: &[ExactInt; 3]) -> [ExactInt; 3] {
        std::array::from_fn(|i| (0..3).map(|k| &self.0[i][k] * &v[k]).sum())
    }

    pub fn is_identity(&self) -> bool {
        (0..3).all(|i| {
            (0..3).all(|j| {
                if i == j {
                    self.0[i][j].is_one()
                } else {
                    self.0[i][j].is_zero()
                }
            })
        })
    }
}
