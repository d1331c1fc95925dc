//! The two conformal calibration engines: weighted split-CQR for real
//! outcomes under covariate shift, and unweighted conformal inference for
//! interval-valued outcomes.

use std::sync::Arc;

use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::learners::{LearnerError, QuantileLearner};
use crate::quantile::{weighted_quantile, WeightedAtom};
use crate::split::SplitIndices;
use crate::types::{CoreError, Interval, QuantilePair};

#[derive(Debug, Error)]
pub enum ConformalError {
    #[error("miscoverage level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("calibration fold is empty")]
    EmptyCalibration,
    #[error("split indices exceed the data range")]
    SplitOutOfRange,
    #[error("weight at calibration point {index} must be finite and nonnegative, got {weight}")]
    BadCalibrationWeight { index: usize, weight: f64 },
    #[error("weight at test point {index} is NaN or negative")]
    BadTestWeight { index: usize },
    #[error("non-finite quantile prediction at row {0}")]
    NonFinitePrediction(usize),
    #[error("score inputs must be finite: y={y}, q_lo={q_lo}, q_hi={q_hi}")]
    NonFiniteScoreInput { y: f64, q_lo: f64, q_hi: f64 },
    #[error("calibration interval {0} has a non-finite endpoint")]
    NonFiniteCalibrationInterval(usize),
    #[error("x and y lengths differ: {xs} vs {ys}")]
    LengthMismatch { xs: usize, ys: usize },
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// A nonnegative covariate-shift weight `x -> w(x)`. Weights are defined up
/// to a positive rescaling; `+inf` is legal at test points only.
#[derive(Clone)]
pub struct WeightFunction {
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl WeightFunction {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    /// The same weight multiplied by `c`; conformal output is invariant to
    /// this for any `c > 0`.
    pub fn scaled(&self, c: f64) -> WeightFunction {
        let inner = Arc::clone(&self.f);
        Self::new(move |x| c * inner(x))
    }
}

impl std::fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("WeightFunction")
    }
}

/// Output of weighted split-CQR at one test point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalResult {
    pub interval: Interval,
    /// Conformity correction added to the fitted quantile band; `+inf`
    /// forces the unbounded interval.
    pub eta: f64,
    /// Normalized mass placed on the point mass at `+inf`.
    pub p_inf: f64,
}

/// CQR non-conformity score `max{q_lo - y, y - q_hi}`: negative inside the
/// band, positive outside.
pub fn cqr_score(y: f64, q_lo: f64, q_hi: f64) -> Result<f64, ConformalError> {
    if !(y.is_finite() && q_lo.is_finite() && q_hi.is_finite()) {
        return Err(ConformalError::NonFiniteScoreInput { y, q_lo, q_hi });
    }
    Ok((q_lo - y).max(y - q_hi))
}

fn check_split(split: &SplitIndices, n: usize) -> Result<(), ConformalError> {
    if split.calib.is_empty() {
        return Err(ConformalError::EmptyCalibration);
    }
    if split.train.iter().chain(&split.calib).any(|&i| i >= n) {
        return Err(ConformalError::SplitOutOfRange);
    }
    Ok(())
}

fn gather<'a, T: Clone>(items: &'a [T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

/// Weighted split-CQR: fit the two conditional quantiles on the training
/// fold, score the calibration fold, and for each test point take the
/// `(1 - alpha)` quantile of the weighted score distribution augmented
/// with a point mass at `+inf` carrying the test point's own weight.
///
/// Calibration weights must be finite; a test-point weight of `+inf`
/// yields the unbounded interval, as does any level the finite weighted
/// mass cannot reach.
#[allow(clippy::too_many_arguments)]
pub fn weighted_split_cqr(
    xs: &[Vec<f64>],
    ys: &[f64],
    learners: (&dyn QuantileLearner, &dyn QuantileLearner),
    weight_fn: &WeightFunction,
    alpha: f64,
    quantiles: QuantilePair,
    split: &SplitIndices,
    test_points: &[Vec<f64>],
    rng: &mut ChaCha20Rng,
) -> Result<Vec<ConformalResult>, ConformalError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ConformalError::InvalidLevel(alpha));
    }
    if xs.len() != ys.len() {
        return Err(ConformalError::LengthMismatch {
            xs: xs.len(),
            ys: ys.len(),
        });
    }
    check_split(split, xs.len())?;

    let train_x = gather(xs, &split.train);
    let train_y = gather(ys, &split.train);
    let model_lo = learners.0.fit(quantiles.alpha_lo, &train_x, &train_y, rng)?;
    let model_hi = learners.1.fit(quantiles.alpha_hi, &train_x, &train_y, rng)?;

    let mut scored: Vec<WeightedAtom> = Vec::with_capacity(split.calib.len() + 1);
    let mut total_weight = 0.0;
    for &i in &split.calib {
        let q_lo = model_lo.predict(&xs[i]);
        let q_hi = model_hi.predict(&xs[i]);
        if !(q_lo.is_finite() && q_hi.is_finite()) {
            return Err(ConformalError::NonFinitePrediction(i));
        }
        let score = cqr_score(ys[i], q_lo, q_hi)?;
        let weight = weight_fn.eval(&xs[i]);
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(ConformalError::BadCalibrationWeight { index: i, weight });
        }
        total_weight += weight;
        scored.push(WeightedAtom {
            value: score,
            mass: weight,
        });
    }

    let mut results = Vec::with_capacity(test_points.len());
    for (j, x) in test_points.iter().enumerate() {
        let w_test = weight_fn.eval(x);
        if w_test.is_nan() || w_test < 0.0 {
            return Err(ConformalError::BadTestWeight { index: j });
        }
        if w_test == f64::INFINITY {
            results.push(ConformalResult {
                interval: Interval::unbounded(),
                eta: f64::INFINITY,
                p_inf: 1.0,
            });
            continue;
        }
        let mut atoms = scored.clone();
        atoms.push(WeightedAtom {
            value: f64::INFINITY,
            mass: w_test,
        });
        let eta = weighted_quantile(&atoms, 1.0 - alpha)?;
        let q_lo = model_lo.predict(x);
        let q_hi = model_hi.predict(x);
        // Finite quantiles plus eta = +inf propagate to the unbounded
        // interval through extended-real arithmetic.
        let interval = Interval::new(q_lo - eta, q_hi + eta)?;
        results.push(ConformalResult {
            interval,
            eta,
            p_inf: w_test / (total_weight + w_test),
        });
    }
    Ok(results)
}

/// Unweighted conformal inference for interval outcomes: fit conditional
/// centers for the left and right endpoints (medians by default), score the
/// calibration fold by the larger one-sided exceedance, and expand both
/// fitted endpoints by the `(1 - gamma)(1 + 1/n_ca)` empirical quantile of
/// the scores. If that level exceeds one, every output is `(-inf, inf)`.
#[allow(clippy::too_many_arguments)]
pub fn interval_conformal(
    xs: &[Vec<f64>],
    intervals: &[Interval],
    learners: (&dyn QuantileLearner, &dyn QuantileLearner),
    gamma: f64,
    split: &SplitIndices,
    test_points: &[Vec<f64>],
    rng: &mut ChaCha20Rng,
) -> Result<Vec<Interval>, ConformalError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(ConformalError::InvalidLevel(gamma));
    }
    if xs.len() != intervals.len() {
        return Err(ConformalError::LengthMismatch {
            xs: xs.len(),
            ys: intervals.len(),
        });
    }
    check_split(split, xs.len())?;
    if let Some(i) = intervals.iter().position(|c| !c.is_finite()) {
        return Err(ConformalError::NonFiniteCalibrationInterval(i));
    }

    let train_x = gather(xs, &split.train);
    let train_lo: Vec<f64> = split.train.iter().map(|&i| intervals[i].lo()).collect();
    let train_hi: Vec<f64> = split.train.iter().map(|&i| intervals[i].hi()).collect();
    let model_lo = learners.0.fit(0.5, &train_x, &train_lo, rng)?;
    let model_hi = learners.1.fit(0.5, &train_x, &train_hi, rng)?;

    let n_ca = split.calib.len();
    let level = (1.0 - gamma) * (1.0 + 1.0 / n_ca as f64);
    let eta = if level > 1.0 {
        f64::INFINITY
    } else {
        let atoms: Vec<WeightedAtom> = split
            .calib
            .iter()
            .map(|&i| {
                let m_lo = model_lo.predict(&xs[i]);
                let m_hi = model_hi.predict(&xs[i]);
                if !(m_lo.is_finite() && m_hi.is_finite()) {
                    return Err(ConformalError::NonFinitePrediction(i));
                }
                Ok(WeightedAtom {
                    value: (m_lo - intervals[i].lo()).max(intervals[i].hi() - m_hi),
                    mass: 1.0,
                })
            })
            .collect::<Result<_, _>>()?;
        weighted_quantile(&atoms, level)?
    };

    test_points
        .iter()
        .map(|x| {
            let lo = model_lo.predict(x) - eta;
            let hi = model_hi.predict(x) + eta;
            // A strongly negative eta can invert tiny bands; collapse to the
            // midpoint to keep the output a valid interval.
            if lo > hi {
                let mid = (lo + hi) / 2.0;
                Ok(Interval::new(mid, mid)?)
            } else {
                Ok(Interval::new(lo, hi)?)
            }
        })
        .collect()
}
