//! Domain types shared by every other module: observed samples, datasets,
//! extended-real intervals and the quantile-level pair used by CQR.
//!
//! Extended reals are plain `f64` values where `f64::INFINITY` and
//! `f64::NEG_INFINITY` are first-class; no sentinel magnitudes are used
//! anywhere.

use thiserror::Error;

/// Errors from constructing or combining the core domain types.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("covariate vector contains NaN")]
    NanCovariate,
    #[error("treatment indicator must be 0 or 1, got {0}")]
    NonBinaryTreatment(u8),
    #[error("outcome must be finite, got {0}")]
    NonFiniteOutcome(f64),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("sample {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("atom list is empty")]
    EmptyAtoms,
    #[error("atom mass must be nonnegative and finite, got {0}")]
    InvalidMass(f64),
    #[error("atom value must not be NaN")]
    NanAtomValue,
    #[error("total atom mass must be positive")]
    ZeroTotalMass,
    #[error("quantile level must lie in (0, 1], got {0}")]
    InvalidQuantileLevel(f64),
    #[error("need at least 2 samples to split, got {0}")]
    TooFewToSplit(usize),
    #[error("train fraction must lie in (0, 1), got {0}")]
    InvalidTrainFraction(f64),
    #[error("quantile pair must satisfy 0 < lo < hi < 1, got ({lo}, {hi})")]
    InvalidQuantilePair { lo: f64, hi: f64 },
    #[error("miscoverage level must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
}

/// One row of an observational or randomized study: covariates, a binary
/// treatment indicator and the observed outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedSample {
    pub x: Vec<f64>,
    pub t: u8,
    pub y_obs: f64,
}

impl ObservedSample {
    pub fn new(x: Vec<f64>, t: u8, y_obs: f64) -> Result<Self, CoreError> {
        if x.iter().any(|v| v.is_nan()) {
            return Err(CoreError::NanCovariate);
        }
        if t > 1 {
            return Err(CoreError::NonBinaryTreatment(t));
        }
        if !y_obs.is_finite() {
            return Err(CoreError::NonFiniteOutcome(y_obs));
        }
        Ok(Self { x, t, y_obs })
    }
}

/// An ordered collection of [`ObservedSample`]s sharing one covariate
/// dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<ObservedSample>,
    d: usize,
}

impl Dataset {
    pub fn new(samples: Vec<ObservedSample>) -> Result<Self, CoreError> {
        let first = samples.first().ok_or(CoreError::EmptyDataset)?;
        let d = first.x.len();
        for (index, s) in samples.iter().enumerate() {
            if s.x.len() != d {
                return Err(CoreError::DimensionMismatch {
                    index,
                    got: s.x.len(),
                    expected: d,
                });
            }
        }
        Ok(Self { samples, d })
    }

    pub fn samples(&self) -> &[ObservedSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Covariate dimension shared by all rows.
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Rows whose treatment indicator equals `arm`, in original order.
    pub fn arm(&self, arm: u8) -> Vec<&ObservedSample> {
        self.samples.iter().filter(|s| s.t == arm).collect()
    }
}

/// A closed extended-real interval; the universal output of every interval
/// procedure in this crate. `lo` may be `-inf` and `hi` may be `+inf`;
/// `(-inf, +inf)` is the degenerate "no information" interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, CoreError> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(CoreError::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// The entire extended real line.
    pub fn unbounded() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Closed-interval membership: `lo <= y <= hi`.
    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Width `hi - lo`; `+inf` when either endpoint is infinite.
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// `[-hi, -lo]`.
    pub fn negate(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// Translate both endpoints by a finite scalar.
    pub fn shift_by(&self, s: f64) -> Result<Interval, CoreError> {
        if !s.is_finite() {
            return Err(CoreError::NonFiniteOutcome(s));
        }
        Ok(Interval {
            lo: self.lo + s,
            hi: self.hi + s,
        })
    }

    /// Minkowski difference `[a, b] - [c, d] = [a - d, b - c]`: the set of
    /// all differences of a point in `self` and a point in `other`.
    /// Infinities propagate (`-inf - finite = -inf`, etc.).
    pub fn minkowski_diff(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo - other.hi,
            hi: self.hi - other.lo,
        }
    }
}

/// The pair of conditional-quantile levels fit by CQR. Defaults to the
/// symmetric pair `(alpha/2, 1 - alpha/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantilePair {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
}

impl QuantilePair {
    pub fn new(alpha_lo: f64, alpha_hi: f64) -> Result<Self, CoreError> {
        let ok = alpha_lo.is_finite()
            && alpha_hi.is_finite()
            && 0.0 < alpha_lo
            && alpha_lo < alpha_hi
            && alpha_hi < 1.0;
        if !ok {
            return Err(CoreError::InvalidQuantilePair {
                lo: alpha_lo,
                hi: alpha_hi,
            });
        }
        Ok(Self { alpha_lo, alpha_hi })
    }

    /// `(alpha/2, 1 - alpha/2)` for miscoverage level `alpha`.
    pub fn symmetric(alpha: f64) -> Result<Self, CoreError> {
        if !(alpha.is_finite() && 0.0 < alpha && alpha < 1.0) {
            return Err(CoreError::InvalidAlpha(alpha));
        }
        Self::new(alpha / 2.0, 1.0 - alpha / 2.0)
    }
}
