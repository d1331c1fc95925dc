//! Causal layer: likelihood-ratio weight families per inferential target,
//! counterfactual interval construction per treatment arm, and the naive
//! and nested (exact / inexact) procedures for individual treatment effect
//! intervals.

use std::sync::Arc;

use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::conformal::{weighted_split_cqr, ConformalError, WeightFunction};
use crate::learners::{LearnerError, PropensityLearner, PropensityModel, QuantileLearner};
use crate::split::split;
use crate::types::{CoreError, Dataset, Interval, QuantilePair};

#[derive(Debug, Error)]
pub enum CausalError {
    #[error("no samples with treatment arm {arm} in {context}")]
    EmptyArm { arm: u8, context: &'static str },
    #[error("miscoverage level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("gamma is required for the nested-exact method")]
    MissingGamma,
    #[error("endpoint quantiles must satisfy 0 < lo <= hi < 1, got ({lo}, {hi})")]
    InvalidEndpointQuantiles { lo: f64, hi: f64 },
    #[error("fraction {name} must lie in (0, 1), got {value}")]
    InvalidFraction { name: &'static str, value: f64 },
    #[error("method kind {0:?} is not a nested method")]
    NotNested(IteKind),
    #[error(
        "surrogate interval {index} has a non-finite endpoint; \
         the exact method requires finite surrogates"
    )]
    InfiniteSurrogate { index: usize },
    #[error("test point {index} has dimension {got}, expected {expected}")]
    TestDimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Which covariate-shift correction to apply, i.e. which population the
/// test points are drawn from. `General` carries the density ratio
/// `dQ/dP` of that population against the study population.
#[derive(Clone)]
pub enum WeightTarget {
    Ate,
    Att,
    Atc,
    General(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for WeightTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightTarget::Ate => f.write_str("Ate"),
            WeightTarget::Att => f.write_str("Att"),
            WeightTarget::Atc => f.write_str("Atc"),
            WeightTarget::General(_) => f.write_str("General(..)"),
        }
    }
}

/// ITE procedure selection and its levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IteKind {
    Naive,
    NestedExact,
    NestedInexact,
}

/// Configuration of an ITE interval run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IteMethod {
    pub kind: IteKind,
    pub alpha: f64,
    /// Second-stage level; required by (and only by) the exact nested
    /// method, for a total miscoverage of at most `alpha + gamma`.
    pub gamma: Option<f64>,
    /// Quantile levels fit to the surrogate left/right endpoints by the
    /// inexact nested method.
    pub endpoint_quantiles: (f64, f64),
    /// Fraction of the data assigned to the counterfactual-training fold
    /// of the nested procedure.
    pub z1_frac: f64,
    /// Train fraction of every internal conformal split.
    pub train_frac: f64,
}

impl IteMethod {
    pub fn new(kind: IteKind, alpha: f64) -> Self {
        Self {
            kind,
            alpha,
            gamma: None,
            endpoint_quantiles: (0.40, 0.60),
            z1_frac: 0.5,
            train_frac: 0.75,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    fn validate(&self) -> Result<(), CausalError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CausalError::InvalidLevel(self.alpha));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g < 1.0) {
                return Err(CausalError::InvalidLevel(g));
            }
        }
        let (lo, hi) = self.endpoint_quantiles;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(CausalError::InvalidEndpointQuantiles { lo, hi });
        }
        for (name, value) in [("z1_frac", self.z1_frac), ("train_frac", self.train_frac)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(CausalError::InvalidFraction { name, value });
            }
        }
        Ok(())
    }
}

/// A covariate vector paired with its induced ITE surrogate interval.
#[derive(Debug, Clone)]
pub struct SurrogatePair {
    pub x: Vec<f64>,
    pub c: Interval,
}

/// The likelihood-ratio weight pair `(w1, w0)` for the requested target:
///
/// | target  | w1                | w0                |
/// |---------|-------------------|-------------------|
/// | ATE     | 1 / e(x)          | 1 / (1 - e(x))    |
/// | ATT     | 1                 | e(x) / (1 - e(x)) |
/// | ATC     | (1 - e(x)) / e(x) | 1                 |
/// | General | r(x) / e(x)       | r(x) / (1 - e(x)) |
///
/// With a clipped propensity model every value is finite.
pub fn weight_pair(
    target: &WeightTarget,
    propensity: Arc<dyn PropensityModel>,
) -> (WeightFunction, WeightFunction) {
    let e1 = Arc::clone(&propensity);
    let e0 = propensity;
    match target {
        WeightTarget::Ate => (
            WeightFunction::new(move |x| 1.0 / e1.predict(x)),
            WeightFunction::new(move |x| 1.0 / (1.0 - e0.predict(x))),
        ),
        WeightTarget::Att => (
            WeightFunction::constant(1.0),
            WeightFunction::new(move |x| {
                let e = e0.predict(x);
                e / (1.0 - e)
            }),
        ),
        WeightTarget::Atc => (
            WeightFunction::new(move |x| {
                let e = e1.predict(x);
                (1.0 - e) / e
            }),
            WeightFunction::constant(1.0),
        ),
        WeightTarget::General(ratio) => {
            let r1 = Arc::clone(ratio);
            let r0 = Arc::clone(ratio);
            (
                WeightFunction::new(move |x| r1(x) / e1.predict(x)),
                WeightFunction::new(move |x| r0(x) / (1.0 - e0.predict(x))),
            )
        }
    }
}

fn check_test_points(test_points: &[Vec<f64>], dim: usize) -> Result<(), CausalError> {
    for (index, x) in test_points.iter().enumerate() {
        if x.len() != dim {
            return Err(CausalError::TestDimensionMismatch {
                index,
                got: x.len(),
                expected: dim,
            });
        }
    }
    Ok(())
}

fn arm_rows(data: &Dataset, arm: u8) -> Result<(Vec<Vec<f64>>, Vec<f64>), CausalError> {
    let rows = data.arm(arm);
    if rows.is_empty() {
        return Err(CausalError::EmptyArm {
            arm,
            context: "the data",
        });
    }
    let xs = rows.iter().map(|s| s.x.clone()).collect();
    let ys = rows.iter().map(|s| s.y_obs).collect();
    Ok((xs, ys))
}

/// One run of weighted split-CQR on an arm's rows with a given weight.
#[allow(clippy::too_many_arguments)]
fn arm_cqr(
    xs: &[Vec<f64>],
    ys: &[f64],
    weight: &WeightFunction,
    alpha: f64,
    train_frac: f64,
    learners: (&dyn QuantileLearner, &dyn QuantileLearner),
    rng: &mut ChaCha20Rng,
    test_points: &[Vec<f64>],
) -> Result<Vec<Interval>, CausalError> {
    let sp = split(xs.len(), train_frac, rng)?;
    let quantiles = QuantilePair::symmetric(alpha)?;
    let results = weighted_split_cqr(
        xs,
        ys,
        learners,
        weight,
        alpha,
        quantiles,
        &sp,
        test_points,
        rng,
    )?;
    Ok(results.into_iter().map(|r| r.interval).collect())
}

/// Prediction intervals for the potential outcome `Y(arm)` at each test
/// point: filter the data to the requested arm, split, and run weighted
/// split-CQR with the arm's weight for the chosen target.
#[allow(clippy::too_many_arguments)]
pub fn counterfactual_interval(
    data: &Dataset,
    arm: u8,
    target: &WeightTarget,
    alpha: f64,
    train_frac: f64,
    learners: (&dyn QuantileLearner, &dyn QuantileLearner),
    propensity: Arc<dyn PropensityModel>,
    rng: &mut ChaCha20Rng,
    test_points: &[Vec<f64>],
) -> Result<Vec<Interval>, CausalError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CausalError::InvalidLevel(alpha));
    }
    check_test_points(test_points, data.dim())?;
    let (xs, ys) = arm_rows(data, arm)?;
    let (w1, w0) = weight_pair(target, propensity);
    let weight = if arm == 1 { w1 } else { w0 };
    arm_cqr(
        &xs,
        &ys,
        &weight,
        alpha,
        train_frac,
        learners,
        rng,
        test_points,
    )
}

/// Naive ITE intervals: a pair of counterfactual intervals at level
/// `1 - alpha/2` each, contrasted as `C1(x) - C0(x)` by Minkowski
/// difference.
#[allow(clippy::too_many_arguments)]
pub fn naive_ite(
    data: &Dataset,
    alpha: f64,
    target: &WeightTarget,
    train_frac: f64,
    learners: (&dyn QuantileLearner, &dyn QuantileLearner),
    propensity: Arc<dyn PropensityModel>,
    rng: &mut ChaCha20Rng,
    test_points: &[Vec<f64>],
) -> Result<Vec<Interval>, CausalError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CausalError::InvalidLevel(alpha));
    }
    let half = alpha / 2.0;
    let c1 = counterfactual_interval(
        data,
        1,
        target,
        half,
        train_frac,
        learners,
        Arc::clone(&propensity),
        rng,
        test_points,
    )?;
    let c0 = counterfactual_interval(
        data, 0, target, half, train_frac, learners, propensity, rng, test_points,
    )?;
    Ok(c1
        .iter()
        .zip(&c0)
        .map(|(a, b)| a.minkowski_diff(b))
        .collect())
}

/// The ITE surrogate induced by one observed unit and the counterfactual
/// interval of its opposite arm:
/// `y_obs - C0(x)` for a treated unit, `C1(x) - y_obs` for a control unit.
pub fn surrogate_interval(t: u8, y_obs: f64, c_opposite: &Interval) -> Interval {
    let point = Interval::new(y_obs, y_obs).expect("finite observed outcome");
    if t == 1 {
        point.minkowski_diff(c_opposite)
    } else {
        c_opposite.minkowski_diff(&point)
    }
}

/// Nested ITE intervals. Splits the data into a counterfactual fold and a
/// surrogate fold, fits the propensity on the first, builds opposite-arm
/// counterfactual intervals at level `alpha` with the cross-arm weights
/// `e/(1-e)` and `(1-e)/e`, turns the second fold into surrogate pairs,
/// and then either conformalizes the surrogates at level `gamma` (exact;
/// total miscoverage at most `alpha + gamma`) or fits the configured
/// endpoint quantiles directly (inexact).
pub fn nested_ite(
    data: &Dataset,
    method: &IteMethod,
    learners: (&dyn QuantileLearner, &dyn QuantileLearner),
    propensity_learner: &dyn PropensityLearner,
    rng: &mut ChaCha20Rng,
    test_points: &[Vec<f64>],
) -> Result<Vec<Interval>, CausalError> {
    method.validate()?;
    if method.kind == IteKind::Naive {
        return Err(CausalError::NotNested(method.kind));
    }
    if method.kind == IteKind::NestedExact && method.gamma.is_none() {
        return Err(CausalError::MissingGamma);
    }
    check_test_points(test_points, data.dim())?;

    // Step I: split into the counterfactual fold z1 and surrogate fold z2,
    // and estimate the propensity on z1.
    let sp = split(data.len(), method.z1_frac, rng)?;
    let samples = data.samples();
    let z1: Vec<_> = sp.train.iter().map(|&i| &samples[i]).collect();
    let z2: Vec<_> = sp.calib.iter().map(|&i| &samples[i]).collect();
    for (context, rows) in [("fold 1", &z1), ("fold 2", &z2)] {
        for arm in [0u8, 1u8] {
            if !rows.iter().any(|s| s.t == arm) {
                return Err(CausalError::EmptyArm { arm, context });
            }
        }
    }
    let z1_xs: Vec<Vec<f64>> = z1.iter().map(|s| s.x.clone()).collect();
    let z1_ts: Vec<u8> = z1.iter().map(|s| s.t).collect();
    let propensity: Arc<dyn PropensityModel> =
        propensity_learner.fit(&z1_xs, &z1_ts, rng)?.into();

    // Step II: counterfactual intervals of the opposite arm, evaluated at
    // the surrogate fold's own covariates. C0 at treated points targets
    // the treated population (weight e/(1-e)); C1 at control points
    // targets the control population (weight (1-e)/e).
    let split_arm = |arm: u8| -> (Vec<Vec<f64>>, Vec<f64>) {
        let rows: Vec<_> = z1.iter().filter(|s| s.t == arm).collect();
        (
            rows.iter().map(|s| s.x.clone()).collect(),
            rows.iter().map(|s| s.y_obs).collect(),
        )
    };
    let (control_xs, control_ys) = split_arm(0);
    let (treated_xs, treated_ys) = split_arm(1);

    let e_for_w0 = Arc::clone(&propensity);
    let w0 = WeightFunction::new(move |x| {
        let e = e_for_w0.predict(x);
        e / (1.0 - e)
    });
    let e_for_w1 = Arc::clone(&propensity);
    let w1 = WeightFunction::new(move |x| {
        let e = e_for_w1.predict(x);
        (1.0 - e) / e
    });

    let z2_treated: Vec<usize> = (0..z2.len()).filter(|&i| z2[i].t == 1).collect();
    let z2_control: Vec<usize> = (0..z2.len()).filter(|&i| z2[i].t == 0).collect();
    let treated_points: Vec<Vec<f64>> = z2_treated.iter().map(|&i| z2[i].x.clone()).collect();
    let control_points: Vec<Vec<f64>> = z2_control.iter().map(|&i| z2[i].x.clone()).collect();

    let c0_at_treated = arm_cqr(
        &control_xs,
        &control_ys,
        &w0,
        method.alpha,
        method.train_frac,
        learners,
        rng,
        &treated_points,
    )?;
    let c1_at_control = arm_cqr(
        &treated_xs,
        &treated_ys,
        &w1,
        method.alpha,
        method.train_frac,
        learners,
        rng,
        &control_points,
    )?;

    let mut surrogates: Vec<Option<SurrogatePair>> = vec![None; z2.len()];
    for (&i, c0) in z2_treated.iter().zip(&c0_at_treated) {
        surrogates[i] = Some(SurrogatePair {
            x: z2[i].x.clone(),
            c: surrogate_interval(1, z2[i].y_obs, c0),
        });
    }
    for (&i, c1) in z2_control.iter().zip(&c1_at_control) {
        surrogates[i] = Some(SurrogatePair {
            x: z2[i].x.clone(),
            c: surrogate_interval(0, z2[i].y_obs, c1),
        });
    }
    let surrogates: Vec<SurrogatePair> = surrogates.into_iter().flatten().collect();

    // Step III: generalize the surrogates to arbitrary covariate points.
    match method.kind {
        IteKind::NestedExact => {
            if let Some(index) = surrogates.iter().position(|p| !p.c.is_finite()) {
                return Err(CausalError::InfiniteSurrogate { index });
            }
            let xs: Vec<Vec<f64>> = surrogates.iter().map(|p| p.x.clone()).collect();
            let cs: Vec<Interval> = surrogates.iter().map(|p| p.c).collect();
            let inner = split(xs.len(), method.train_frac, rng)?;
            let gamma = method.gamma.expect("checked above");
            Ok(crate::conformal::interval_conformal(
                &xs,
                &cs,
                learners,
                gamma,
                &inner,
                test_points,
                rng,
            )?)
        }
        IteKind::NestedInexact => {
            let xs: Vec<Vec<f64>> = surrogates.iter().map(|p| p.x.clone()).collect();
            let lo_targets: Vec<f64> = surrogates.iter().map(|p| p.c.lo()).collect();
            let hi_targets: Vec<f64> = surrogates.iter().map(|p| p.c.hi()).collect();
            let (beta_lo, beta_hi) = method.endpoint_quantiles;
            let model_lo = learners.0.fit(beta_lo, &xs, &lo_targets, rng)?;
            let model_hi = learners.1.fit(beta_hi, &xs, &hi_targets, rng)?;
            test_points
                .iter()
                .map(|x| {
                    let lo = model_lo.predict(x);
                    let hi = model_hi.predict(x);
                    // Crossing estimates signal learner noise; collapse to
                    // the midpoint to keep lo <= hi.
                    let iv = if lo > hi {
                        let mid = (lo + hi) / 2.0;
                        Interval::new(mid, mid)?
                    } else {
                        Interval::new(lo, hi)?
                    };
                    Ok(iv)
                })
                .collect()
        }
        IteKind::Naive => unreachable!("rejected above"),
    }
}
