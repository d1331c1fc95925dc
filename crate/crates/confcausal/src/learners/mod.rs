//! Built-in conditional-quantile and propensity learners based on gradient
//! boosted regression trees, plus the abstract fit/predict interfaces that
//! every pipeline in this crate accepts, so callers can swap in their own
//! models.
//!
//! Quantile boosting fits each tree to the pinball-loss gradient and then
//! replaces leaf values with the in-leaf quantile of the current residuals,
//! the standard check-loss refinement. Propensity boosting uses logistic
//! loss with Newton leaf updates and clips raw probabilities so every
//! likelihood-ratio weight downstream stays finite.

mod tree;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use tree::{grow_tree, GrownTree, RegressionTree};

/// Default clipping range for propensity predictions.
pub const PROPENSITY_CLIP: (f64, f64) = (0.01, 0.99);

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("training data is empty")]
    EmptyData,
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("row {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("prediction input has dimension {got}, model expects {expected}")]
    PredictDimensionMismatch { got: usize, expected: usize },
    #[error("non-finite value in training data at row {0}")]
    NonFiniteData(usize),
    #[error("treatment indicator at row {index} must be 0 or 1, got {got}")]
    NonBinaryTreatment { index: usize, got: u8 },
    #[error("invalid hyperparameter {name}: {value}")]
    InvalidHyperparameter { name: &'static str, value: f64 },
    #[error("x and y lengths differ: {xs} vs {ys}")]
    LengthMismatch { xs: usize, ys: usize },
}

/// Hyperparameters of the boosted quantile learner. `n_trees = 0` is legal
/// and yields the unconditional `beta`-quantile of the training outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileLearnerSpec {
    pub beta: f64,
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
    pub subsample: f64,
}

impl QuantileLearnerSpec {
    /// Default hyperparameters at a given target quantile.
    pub fn with_beta(beta: f64) -> Self {
        Self {
            beta,
            n_trees: 200,
            max_depth: 3,
            learning_rate: 0.1,
            min_leaf: 10,
            subsample: 1.0,
        }
    }

    fn validate(&self) -> Result<(), LearnerError> {
        let bad = |name, value| Err(LearnerError::InvalidHyperparameter { name, value });
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta", self.beta);
        }
        if self.max_depth == 0 {
            return bad("max_depth", 0.0);
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate", self.learning_rate);
        }
        if self.min_leaf == 0 {
            return bad("min_leaf", 0.0);
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad("subsample", self.subsample);
        }
        Ok(())
    }
}

/// Hyperparameters of the boosted propensity learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropensityLearnerSpec {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
    pub subsample: f64,
    pub clip_lo: f64,
    pub clip_hi: f64,
}

impl Default for PropensityLearnerSpec {
    fn default() -> Self {
        Self {
            n_trees: 200,
            max_depth: 3,
            learning_rate: 0.1,
            min_leaf: 10,
            subsample: 1.0,
            clip_lo: PROPENSITY_CLIP.0,
            clip_hi: PROPENSITY_CLIP.1,
        }
    }
}

impl PropensityLearnerSpec {
    fn validate(&self) -> Result<(), LearnerError> {
        let bad = |name, value| Err(LearnerError::InvalidHyperparameter { name, value });
        if self.max_depth == 0 {
            return bad("max_depth", 0.0);
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate", self.learning_rate);
        }
        if self.min_leaf == 0 {
            return bad("min_leaf", 0.0);
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad("subsample", self.subsample);
        }
        if !(0.0 < self.clip_lo && self.clip_lo < self.clip_hi && self.clip_hi < 1.0) {
            return bad("clip_lo", self.clip_lo);
        }
        Ok(())
    }
}

/// A fitted conditional model producing one real prediction per covariate
/// vector. `predict` requires `x.len() == input_dim()`; use
/// [`predict_quantile`] for the checked variant.
pub trait QuantileModel: Send + Sync {
    fn input_dim(&self) -> usize;
    fn predict(&self, x: &[f64]) -> f64;
}

/// Anything that can fit a conditional `beta`-quantile model from rows of
/// `(x, y)` pairs.
pub trait QuantileLearner: Send + Sync {
    fn fit(
        &self,
        beta: f64,
        xs: &[Vec<f64>],
        ys: &[f64],
        rng: &mut ChaCha20Rng,
    ) -> Result<Box<dyn QuantileModel>, LearnerError>;
}

/// A fitted propensity model; predictions always lie inside its clipping
/// range, so likelihood-ratio weights built from it are finite.
pub trait PropensityModel: Send + Sync {
    fn input_dim(&self) -> usize;
    fn predict(&self, x: &[f64]) -> f64;
}

/// Anything that can fit a propensity model from rows of `(x, t)` pairs.
pub trait PropensityLearner: Send + Sync {
    fn fit(
        &self,
        xs: &[Vec<f64>],
        ts: &[u8],
        rng: &mut ChaCha20Rng,
    ) -> Result<Box<dyn PropensityModel>, LearnerError>;
}

/// Gradient-boosted conditional quantile ensemble.
#[derive(Debug, Clone)]
pub struct FittedQuantileModel {
    trees: Vec<RegressionTree>,
    init: f64,
    dim: usize,
    /// Training pinball loss before any tree and after each stage.
    pub train_losses: Vec<f64>,
}

impl QuantileModel for FittedQuantileModel {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn predict(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.init + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }
}

/// Gradient-boosted propensity ensemble with clipped probability output.
#[derive(Debug, Clone)]
pub struct FittedPropensityModel {
    trees: Vec<RegressionTree>,
    init: f64,
    dim: usize,
    clip_lo: f64,
    clip_hi: f64,
}

impl PropensityModel for FittedPropensityModel {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn predict(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let raw = self.init + self.trees.iter().map(|t| t.predict(x)).sum::<f64>();
        sigmoid(raw).clamp(self.clip_lo, self.clip_hi)
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn pinball_loss(ys: &[f64], preds: &[f64], beta: f64) -> f64 {
    let total: f64 = ys
        .iter()
        .zip(preds)
        .map(|(&y, &f)| {
            let u = y - f;
            if u >= 0.0 {
                beta * u
            } else {
                (beta - 1.0) * u
            }
        })
        .sum();
    total / ys.len() as f64
}

/// `inf{z : empirical CDF >= beta}` of a slice, i.e. the
/// `ceil(beta * m)`-th smallest value.
fn empirical_quantile(values: &[f64], beta: f64) -> f64 {
    debug_assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let idx = ((beta * m as f64).ceil() as usize).clamp(1, m) - 1;
    sorted[idx]
}

fn validate_design(xs: &[Vec<f64>]) -> Result<usize, LearnerError> {
    let first = xs.first().ok_or(LearnerError::EmptyData)?;
    let dim = first.len();
    for (index, row) in xs.iter().enumerate() {
        if row.len() != dim {
            return Err(LearnerError::DimensionMismatch {
                index,
                got: row.len(),
                expected: dim,
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(LearnerError::NonFiniteData(index));
        }
    }
    Ok(dim)
}

fn sample_rows(n: usize, subsample: f64, rng: &mut ChaCha20Rng) -> Vec<usize> {
    if subsample >= 1.0 {
        return (0..n).collect();
    }
    let k = ((subsample * n as f64).floor() as usize).max(1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Fit a conditional `beta`-quantile model by pinball-loss gradient
/// boosting. The model is initialized at the unconditional `beta`-quantile
/// of `ys`, so training loss never exceeds the loss at initialization.
pub fn fit_quantile(
    xs: &[Vec<f64>],
    ys: &[f64],
    spec: &QuantileLearnerSpec,
    rng: &mut ChaCha20Rng,
) -> Result<FittedQuantileModel, LearnerError> {
    spec.validate()?;
    let dim = validate_design(xs)?;
    if xs.len() != ys.len() {
        return Err(LearnerError::LengthMismatch {
            xs: xs.len(),
            ys: ys.len(),
        });
    }
    if let Some(index) = ys.iter().position(|v| !v.is_finite()) {
        return Err(LearnerError::NonFiniteData(index));
    }
    let n = xs.len();
    if n < 2 * spec.min_leaf {
        return Err(LearnerError::TooFewRows {
            needed: 2 * spec.min_leaf,
            got: n,
        });
    }

    let beta = spec.beta;
    let init = empirical_quantile(ys, beta);
    let mut preds = vec![init; n];
    let mut trees = Vec::with_capacity(spec.n_trees);
    let mut train_losses = Vec::with_capacity(spec.n_trees + 1);
    train_losses.push(pinball_loss(ys, &preds, beta));

    let mut gradients = vec![0.0; n];
    for _ in 0..spec.n_trees {
        let rows = sample_rows(n, spec.subsample, rng);
        for &r in &rows {
            gradients[r] = if ys[r] > preds[r] { beta } else { beta - 1.0 };
        }
        let GrownTree { mut tree, leaves } =
            grow_tree(xs, &gradients, &rows, spec.max_depth, spec.min_leaf);
        for (node, leaf_rows) in &leaves {
            let residuals: Vec<f64> = leaf_rows.iter().map(|&r| ys[r] - preds[r]).collect();
            let step = empirical_quantile(&residuals, beta);
            tree.set_leaf_value(*node, spec.learning_rate * step);
        }
        for (i, p) in preds.iter_mut().enumerate() {
            *p += tree.predict(&xs[i]);
        }
        train_losses.push(pinball_loss(ys, &preds, beta));
        trees.push(tree);
    }

    Ok(FittedQuantileModel {
        trees,
        init,
        dim,
        train_losses,
    })
}

/// Fit a propensity model by logistic-loss boosting with Newton leaf steps.
/// Raw probabilities are clipped to the spec's range.
pub fn fit_propensity(
    xs: &[Vec<f64>],
    ts: &[u8],
    spec: &PropensityLearnerSpec,
    rng: &mut ChaCha20Rng,
) -> Result<FittedPropensityModel, LearnerError> {
    spec.validate()?;
    let dim = validate_design(xs)?;
    if xs.len() != ts.len() {
        return Err(LearnerError::LengthMismatch {
            xs: xs.len(),
            ys: ts.len(),
        });
    }
    for (index, &t) in ts.iter().enumerate() {
        if t > 1 {
            return Err(LearnerError::NonBinaryTreatment { index, got: t });
        }
    }
    let n = xs.len();

    let mean = ts.iter().map(|&t| t as f64).sum::<f64>() / n as f64;
    let p0 = mean.clamp(1e-6, 1.0 - 1e-6);
    let init = (p0 / (1.0 - p0)).ln();
    let mut raw = vec![init; n];
    let mut trees = Vec::with_capacity(spec.n_trees);

    let mut gradients = vec![0.0; n];
    for _ in 0..spec.n_trees {
        let rows = sample_rows(n, spec.subsample, rng);
        for &r in &rows {
            gradients[r] = ts[r] as f64 - sigmoid(raw[r]);
        }
        let GrownTree { mut tree, leaves } =
            grow_tree(xs, &gradients, &rows, spec.max_depth, spec.min_leaf);
        for (node, leaf_rows) in &leaves {
            let mut num = 0.0;
            let mut denom = 0.0;
            for &r in leaf_rows {
                let p = sigmoid(raw[r]);
                num += ts[r] as f64 - p;
                denom += p * (1.0 - p);
            }
            let step = (num / denom.max(1e-12)).clamp(-10.0, 10.0);
            tree.set_leaf_value(*node, spec.learning_rate * step);
        }
        for (i, r) in raw.iter_mut().enumerate() {
            *r += tree.predict(&xs[i]);
        }
        trees.push(tree);
    }

    Ok(FittedPropensityModel {
        trees,
        init,
        dim,
        clip_lo: spec.clip_lo,
        clip_hi: spec.clip_hi,
    })
}

/// Dimension-checked prediction from a fitted quantile model.
pub fn predict_quantile(model: &dyn QuantileModel, x: &[f64]) -> Result<f64, LearnerError> {
    if x.len() != model.input_dim() {
        return Err(LearnerError::PredictDimensionMismatch {
            got: x.len(),
            expected: model.input_dim(),
        });
    }
    Ok(model.predict(x))
}

/// Dimension-checked prediction from a fitted propensity model.
pub fn predict_propensity(model: &dyn PropensityModel, x: &[f64]) -> Result<f64, LearnerError> {
    if x.len() != model.input_dim() {
        return Err(LearnerError::PredictDimensionMismatch {
            got: x.len(),
            expected: model.input_dim(),
        });
    }
    Ok(model.predict(x))
}

/// Boosted quantile learner behind the abstract interface; the target
/// quantile is supplied at fit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostedQuantileLearner {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
    pub subsample: f64,
}

impl Default for BoostedQuantileLearner {
    fn default() -> Self {
        let s = QuantileLearnerSpec::with_beta(0.5);
        Self {
            n_trees: s.n_trees,
            max_depth: s.max_depth,
            learning_rate: s.learning_rate,
            min_leaf: s.min_leaf,
            subsample: s.subsample,
        }
    }
}

impl BoostedQuantileLearner {
    pub fn spec(&self, beta: f64) -> QuantileLearnerSpec {
        QuantileLearnerSpec {
            beta,
            n_trees: self.n_trees,
            max_depth: self.max_depth,
            learning_rate: self.learning_rate,
            min_leaf: self.min_leaf,
            subsample: self.subsample,
        }
    }
}

impl QuantileLearner for BoostedQuantileLearner {
    fn fit(
        &self,
        beta: f64,
        xs: &[Vec<f64>],
        ys: &[f64],
        rng: &mut ChaCha20Rng,
    ) -> Result<Box<dyn QuantileModel>, LearnerError> {
        Ok(Box::new(fit_quantile(xs, ys, &self.spec(beta), rng)?))
    }
}

/// Boosted propensity learner behind the abstract interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostedPropensityLearner {
    pub spec: PropensityLearnerSpec,
}

impl Default for BoostedPropensityLearner {
    fn default() -> Self {
        Self {
            spec: PropensityLearnerSpec::default(),
        }
    }
}

impl PropensityLearner for BoostedPropensityLearner {
    fn fit(
        &self,
        xs: &[Vec<f64>],
        ts: &[u8],
        rng: &mut ChaCha20Rng,
    ) -> Result<Box<dyn PropensityModel>, LearnerError> {
        Ok(Box::new(fit_propensity(xs, ts, &self.spec, rng)?))
    }
}

/// A learner that ignores the data and always predicts a fixed constant;
/// useful as a deliberately miscalibrated quantile model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantQuantileLearner {
    pub value: f64,
}

#[derive(Debug, Clone, Copy)]
struct ConstantModel {
    value: f64,
    dim: usize,
}

impl QuantileModel for ConstantModel {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn predict(&self, _x: &[f64]) -> f64 {
        self.value
    }
}

impl QuantileLearner for ConstantQuantileLearner {
    fn fit(
        &self,
        _beta: f64,
        xs: &[Vec<f64>],
        _ys: &[f64],
        _rng: &mut ChaCha20Rng,
    ) -> Result<Box<dyn QuantileModel>, LearnerError> {
        let dim = validate_design(xs)?;
        Ok(Box::new(ConstantModel {
            value: self.value,
            dim,
        }))
    }
}

/// A propensity model that returns a fixed probability everywhere,
/// clamped into the default clipping range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantPropensity {
    value: f64,
    dim: usize,
}

impl ConstantPropensity {
    pub fn new(value: f64, dim: usize) -> Self {
        Self {
            value: value.clamp(PROPENSITY_CLIP.0, PROPENSITY_CLIP.1),
            dim,
        }
    }
}

impl PropensityModel for ConstantPropensity {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn predict(&self, _x: &[f64]) -> f64 {
        self.value
    }
}

impl PropensityLearner for ConstantPropensity {
    fn fit(
        &self,
        xs: &[Vec<f64>],
        _ts: &[u8],
        _rng: &mut ChaCha20Rng,
    ) -> Result<Box<dyn PropensityModel>, LearnerError> {
        let dim = validate_design(xs)?;
        Ok(Box::new(ConstantPropensity::new(self.value, dim)))
    }
}
