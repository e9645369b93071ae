//! Simulated worlds: action pools, the hidden parameter, reward models and
//! the feature-feedback oracle.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{FeatureSet, SparseVector};
use crate::policy::Choice;

/// The actions a learner may pick from.
///
/// Without replacement, each played action is removed from `available`.
#[derive(Debug, Clone)]
pub struct ActionPool {
    actions: Vec<SparseVector>,
    replacement: bool,
    available: Vec<usize>,
    norm_bound: f64,
}

impl ActionPool {
    pub fn new(actions: Vec<SparseVector>, replacement: bool) -> Result<Self> {
        let Some(first) = actions.first() else {
            return Err(Error::invalid("action pool must not be empty"));
        };
        let dim = first.dim();
        if let Some(bad) = actions.iter().position(|a| a.dim() != dim) {
            return Err(Error::invalid(format!(
                "action {bad} has dimension {}, expected {dim}",
                actions[bad].dim()
            )));
        }
        let norm_bound = actions.iter().map(SparseVector::norm).fold(0.0, f64::max);
        Ok(Self {
            available: (0..actions.len()).collect(),
            actions,
            replacement,
            norm_bound,
        })
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.actions[0].dim()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[SparseVector] {
        &self.actions
    }

    pub fn action(&self, index: usize) -> &SparseVector {
        &self.actions[index]
    }

    /// Currently selectable indices, ascending.
    pub fn available(&self) -> &[usize] {
        &self.available
    }

    pub fn is_available(&self, index: usize) -> bool {
        self.available.binary_search(&index).is_ok()
    }

    pub fn replacement(&self) -> bool {
        self.replacement
    }

    /// Largest action norm `L`.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Uniformly random available index.
    pub fn random_index<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        if self.available.is_empty() {
            return Err(Error::EmptyPool);
        }
        Ok(self.available[rng.random_range(0..self.available.len())])
    }

    fn take(&mut self, index: usize) {
        if let Ok(pos) = self.available.binary_search(&index) {
            self.available.remove(pos);
        }
    }
}

/// The hidden parameter `θ*` and its support.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    theta_star: SparseVector,
    support: FeatureSet,
}

impl GroundTruth {
    pub fn new(theta_star: SparseVector) -> Self {
        let support = theta_star.support();
        Self { theta_star, support }
    }

    pub fn theta_star(&self) -> &SparseVector {
        &self.theta_star
    }

    pub fn support(&self) -> &FeatureSet {
        &self.support
    }

    /// Sparsity `k`.
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    /// `⟨x, θ*⟩`.
    pub fn value(&self, x: &SparseVector) -> f64 {
        x.dot(&self.theta_star)
    }
}

/// Reveals relevant (and possibly some irrelevant) features of played actions.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackOracle {
    relevant: FeatureSet,
    noise_features: FeatureSet,
    reveal_prob: f64,
}

impl FeedbackOracle {
    pub fn new(relevant: FeatureSet, noise_features: FeatureSet, reveal_prob: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&reveal_prob) {
            return Err(Error::invalid(format!(
                "reveal probability must lie in [0, 1], got {reveal_prob}"
            )));
        }
        if !relevant.is_disjoint(&noise_features) {
            return Err(Error::invalid("noise features overlap the relevant set"));
        }
        Ok(Self {
            relevant,
            noise_features,
            reveal_prob,
        })
    }

    /// Noise-free oracle over the support of `θ*`.
    pub fn exact(truth: &GroundTruth, reveal_prob: f64) -> Result<Self> {
        Self::new(truth.support().clone(), FeatureSet::new(), reveal_prob)
    }

    pub fn relevant(&self) -> &FeatureSet {
        &self.relevant
    }

    pub fn noise_features(&self) -> &FeatureSet {
        &self.noise_features
    }

    pub fn reveal_prob(&self) -> f64 {
        self.reveal_prob
    }

    fn may_reveal(&self, feature: usize) -> bool {
        self.relevant.contains(feature) || self.noise_features.contains(feature)
    }
}

/// Source of uniform `[0, 1)` draws for feedback marking.
pub trait FeedbackCoins {
    fn coin(&mut self, feature: usize) -> f64;
}

impl<R: Rng + ?Sized> FeedbackCoins for R {
    fn coin(&mut self, _feature: usize) -> f64 {
        self.random()
    }
}

/// How a reward is drawn from the expected value `⟨x, θ*⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "SCREAMING_SNAKE_CASE", deny_unknown_fields)]
pub enum RewardModel {
    /// `⟨x, θ*⟩ + N(0, R²)`.
    LinearGaussian { noise_scale: f64 },
    /// `1` with probability `σ(⟨x, θ*⟩)`, else `0`.
    LogisticBinary,
}

impl RewardModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RewardModel::LinearGaussian { noise_scale } if !(noise_scale >= 0.0 && noise_scale.is_finite()) => {
                Err(Error::invalid(format!("noise scale must be non-negative, got {noise_scale}")))
            }
            _ => Ok(()),
        }
    }

    /// Noise scale used for confidence sets. Bernoulli noise is 1/2-sub-Gaussian.
    pub fn noise_scale(&self) -> f64 {
        match *self {
            RewardModel::LinearGaussian { noise_scale } => noise_scale,
            RewardModel::LogisticBinary => 0.5,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, mean: f64, rng: &mut R) -> f64 {
        match *self {
            RewardModel::LinearGaussian { noise_scale } => {
                if noise_scale == 0.0 {
                    mean
                } else {
                    let z: f64 = StandardNormal.sample(rng);
                    mean + noise_scale * z
                }
            }
            RewardModel::LogisticBinary => {
                if rng.random::<f64>() < sigmoid(mean) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// What the world returns after one play.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub revealed: FeatureSet,
    /// `optimal_value − ⟨x_t, θ*⟩`, never negative.
    pub instantaneous_regret: f64,
    /// `max ⟨x, θ*⟩` over the actions available at this step.
    pub optimal_value: f64,
}

/// Draws a reward for action `x`.
pub fn draw_reward<R: Rng + ?Sized>(
    model: &RewardModel,
    truth: &GroundTruth,
    x: &SparseVector,
    rng: &mut R,
) -> f64 {
    model.sample(truth.value(x), rng)
}

/// Each feature of `x` that the oracle may reveal is marked independently
/// with the oracle's reveal probability.
pub fn draw_feedback<C: FeedbackCoins + ?Sized>(
    oracle: &FeedbackOracle,
    x: &SparseVector,
    coins: &mut C,
) -> FeatureSet {
    let p = oracle.reveal_prob;
    x.indices()
        .iter()
        .copied()
        .filter(|&j| oracle.may_reveal(j) && coins.coin(j) < p)
        .collect()
}

/// A complete world for one run of one algorithm.
#[derive(Debug, Clone)]
pub struct Environment {
    pool: ActionPool,
    truth: GroundTruth,
    model: RewardModel,
    oracle: FeedbackOracle,
    means: Vec<f64>,
    fixed_optimum: Option<f64>,
}

impl Environment {
    pub fn new(
        pool: ActionPool,
        truth: GroundTruth,
        model: RewardModel,
        oracle: FeedbackOracle,
    ) -> Result<Self> {
        model.validate()?;
        if truth.theta_star().dim() != pool.dim() {
            return Err(Error::invalid(format!(
                "θ* has dimension {}, actions have {}",
                truth.theta_star().dim(),
                pool.dim()
            )));
        }
        let means: Vec<f64> = pool.actions().iter().map(|x| truth.value(x)).collect();
        let fixed_optimum = pool
            .replacement()
            .then(|| means.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        Ok(Self {
            pool,
            truth,
            model,
            oracle,
            means,
            fixed_optimum,
        })
    }

    pub fn pool(&self) -> &ActionPool {
        &self.pool
    }

    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    pub fn model(&self) -> &RewardModel {
        &self.model
    }

    pub fn oracle(&self) -> &FeedbackOracle {
        &self.oracle
    }

    /// Expected reward `⟨x_i, θ*⟩` of every action in the pool.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Best expected reward among the currently available actions.
    pub fn optimal_value(&self) -> f64 {
        self.fixed_optimum.unwrap_or_else(|| {
            self.pool
                .available()
                .iter()
                .map(|&i| self.means[i])
                .fold(f64::NEG_INFINITY, f64::max)
        })
    }

    /// Plays `choice`: draws the reward from `reward_rng`, the feedback from
    /// `coins`, and removes the action if sampling without replacement.
    pub fn step<R, C>(&mut self, choice: &Choice, reward_rng: &mut R, coins: &mut C) -> Result<StepOutcome>
    where
        R: Rng + ?Sized,
        C: FeedbackCoins + ?Sized,
    {
        let index = choice.action_index;
        if !self.pool.is_available(index) {
            return Err(Error::InvalidAction { index });
        }
        let optimal_value = self.optimal_value();
        let expected = self.means[index];
        let x = self.pool.action(index);
        let reward = self.model.sample(expected, reward_rng);
        let revealed = draw_feedback(&self.oracle, x, coins);
        if !self.pool.replacement() {
            self.pool.take(index);
        }
        Ok(StepOutcome {
            reward,
            revealed,
            instantaneous_regret: (optimal_value - expected).max(0.0),
            optimal_value,
        })
    }
}

/// `count` nonnegative actions with `nnz` nonzeros each at uniformly random
/// positions, values `|N(0, 1)|`, scaled to unit norm.
pub fn generate_actions<R: Rng + ?Sized>(
    count: usize,
    dim: usize,
    nnz: usize,
    rng: &mut R,
) -> Result<Vec<SparseVector>> {
    if count == 0 || dim == 0 || nnz == 0 || nnz > dim {
        return Err(Error::invalid(format!(
            "need count ≥ 1 and 1 ≤ action_nnz ≤ dim, got count={count}, action_nnz={nnz}, dim={dim}"
        )));
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let positions = index::sample(rng, dim, nnz);
        let entries: Vec<(usize, f64)> = positions
            .iter()
            .map(|i| (i, f64::abs(StandardNormal.sample(rng))))
            .collect();
        let mut x = SparseVector::new(dim, entries)?;
        let norm = x.norm();
        // an all-zero draw has probability zero; redraw rather than divide by it
        if norm > 0.0 {
            x.scale(1.0 / norm);
            out.push(x);
        }
    }
    Ok(out)
}

/// A `k`-sparse `θ*` with standard normal entries at uniformly random
/// positions, scaled to norm `theta_bound`.
pub fn generate_theta<R: Rng + ?Sized>(
    dim: usize,
    sparsity: usize,
    theta_bound: f64,
    rng: &mut R,
) -> Result<GroundTruth> {
    if sparsity == 0 || sparsity > dim {
        return Err(Error::invalid(format!(
            "need 1 ≤ sparsity_k ≤ dim, got sparsity_k={sparsity}, dim={dim}"
        )));
    }
    if theta_bound.is_nan() || theta_bound <= 0.0 {
        return Err(Error::invalid(format!("theta bound must be positive, got {theta_bound}")));
    }
    loop {
        let positions = index::sample(rng, dim, sparsity);
        let entries: Vec<(usize, f64)> = positions
            .iter()
            .map(|i| (i, StandardNormal.sample(rng)))
            .collect();
        let mut theta = SparseVector::new(dim, entries)?;
        let norm = theta.norm();
        if theta.nnz() == sparsity && norm > 0.0 {
            theta.scale(theta_bound / norm);
            return Ok(GroundTruth::new(theta));
        }
    }
}

/// Synthetic sparse world: unit-norm nonnegative actions and a unit-norm
/// `k`-sparse `θ*`.
pub fn synth_generate<R: Rng + ?Sized>(
    n_actions: usize,
    dim: usize,
    sparsity_k: usize,
    action_nnz: usize,
    rng: &mut R,
) -> Result<(ActionPool, GroundTruth)> {
    if sparsity_k > dim || action_nnz > dim {
        return Err(Error::invalid("sparsity_k and action_nnz must not exceed dim"));
    }
    let actions = generate_actions(n_actions, dim, action_nnz, rng)?;
    let truth = generate_theta(dim, sparsity_k, 1.0, rng)?;
    Ok((ActionPool::new(actions, true)?, truth))
}

/// `count` features drawn uniformly from outside `support`.
pub fn sample_noise_features<R: Rng + ?Sized>(
    dim: usize,
    support: &FeatureSet,
    count: usize,
    rng: &mut R,
) -> Result<FeatureSet> {
    let outside: Vec<usize> = (0..dim).filter(|&j| !support.contains(j)).collect();
    if count > outside.len() {
        return Err(Error::invalid(format!(
            "cannot pick {count} noise features from {} irrelevant ones",
            outside.len()
        )));
    }
    Ok(index::sample(rng, outside.len(), count)
        .iter()
        .map(|i| outside[i])
        .collect())
}
