//! Action-selection policies.
//!
//! All policies share one shape: [`Policy::choose`] picks an index from the
//! pool, the caller plays it, and [`Policy::observe`] folds the reward and
//! the revealed features back in.
//!
//! | kind | features the regression sees | exploration |
//! |------|------------------------------|-------------|
//! | OFUL | all `d` (or a fixed subset) | none |
//! | FF-OFUL | discovered so far | `ε_t = min(1, 1/√t)` |
//! | FF-EPOCH-OFUL | discovered so far | `ε = min(1, c/√2^⌊log₂ t⌋)` |
//! | ETC | frozen after `T₀` random plays | uniform for `t ≤ T₀` |
//! | RANDOM | none | always |
//!
//! The feedback-driven kinds start with a bootstrap phase of uniform random
//! play that lasts until the first non-empty feedback set arrives.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::environment::{ActionPool, Environment};
use crate::error::{Error, Result};
use crate::linalg::{DesignState, FeatureSet, History, SparseVector};
use crate::rng::RandomSource;

/// Constants of the confidence ellipsoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceParams {
    /// Sub-Gaussian noise parameter `R`.
    pub noise_scale: f64,
    /// Bound `S` on `‖θ*‖`.
    pub theta_bound: f64,
    /// Ridge parameter `λ`.
    pub ridge: f64,
    /// Failure probability `δ`.
    pub delta: f64,
}

impl ConfidenceParams {
    pub fn new(noise_scale: f64, theta_bound: f64, ridge: f64, delta: f64) -> Result<Self> {
        let p = Self {
            noise_scale,
            theta_bound,
            ridge,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.noise_scale) || !positive(self.theta_bound) || !positive(self.ridge) {
            return Err(Error::invalid(format!(
                "noise scale, theta bound and ridge must be positive: {self:?}"
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        Ok(())
    }
}

/// `√β = R·√(2 ln(1/δ) + ln det V − m ln λ) + √λ·S`.
///
/// `δ = 1` is accepted here (the log term vanishes) even though
/// [`ConfidenceParams::validate`] rejects it for running policies.
pub fn confidence_radius(design: &DesignState, params: &ConfidenceParams) -> f64 {
    let m = design.dim() as f64;
    let info = (design.logdet() - m * params.ridge.ln()).max(0.0);
    let log_term = (2.0 * (1.0 / params.delta).ln() + info).max(0.0);
    params.noise_scale * log_term.sqrt() + params.ridge.sqrt() * params.theta_bound
}

/// Whether a restricted parameter vector lies in the confidence ellipsoid
/// `{θ : ‖θ̂ − θ‖_V ≤ √β}`.
pub fn in_confidence_set(design: &DesignState, params: &ConfidenceParams, theta: &DVector<f64>) -> bool {
    design.estimate_distance(theta) <= confidence_radius(design, params)
}

/// Optimistic value of `x`: the maximum of `⟨x_r, θ⟩` over the ellipsoid,
/// which is `⟨θ̂, x_r⟩ + radius·‖x_r‖_{V⁻¹}`.
pub fn ucb_score(design: &DesignState, radius: f64, x: &SparseVector) -> f64 {
    design.predict(x) + radius * design.inv_norm(x)
}

/// The available action with the largest UCB score; ties go to the lowest
/// index.
pub fn select_ucb(pool: &ActionPool, design: &DesignState, params: &ConfidenceParams) -> Result<Choice> {
    let radius = confidence_radius(design, params);
    let mut buf = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for &i in pool.available() {
        design.restrict_into(pool.action(i), &mut buf);
        let score = design.predict_restricted(&buf) + radius * design.inv_norm_restricted(&buf);
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((i, score));
        }
    }
    best.map(|(action_index, _)| Choice {
        action_index,
        explored: false,
    })
    .ok_or(Error::EmptyPool)
}

/// Exploration rate of FF-OFUL at post-bootstrap step `t ≥ 1`.
pub fn ff_epsilon(t: u64) -> f64 {
    (1.0 / (t.max(1) as f64).sqrt()).min(1.0)
}

/// `⌊log₂ t⌋` for `t ≥ 1`.
pub fn epoch_index(t: u64) -> u32 {
    63 - t.max(1).leading_zeros()
}

/// `c = √(2 ln(2/δ₁))`, the epoch variant's exploration constant.
pub fn epoch_constant(delta1: f64) -> f64 {
    (2.0 * (2.0 / delta1).ln()).sqrt()
}

/// Exploration rate of the epoch variant: `min(1, c/√2^s)` with
/// `s = ⌊log₂ t⌋`, constant on each block `[2^s, 2^{s+1})`.
pub fn ff_epoch_schedule(t: u64, delta1: f64) -> f64 {
    let block = (1u64 << epoch_index(t)) as f64;
    (epoch_constant(delta1) / block.sqrt()).min(1.0)
}

/// Number of epochs `M = ⌈log₂(T/2)⌉`, at least 1.
pub fn epoch_count(horizon: u64) -> u32 {
    let half = (horizon as f64 / 2.0).max(2.0);
    (half.log2().ceil() as u32).max(1)
}

/// Default cap on bootstrap length: `10·⌈1/p⌉·d` (with `⌈1/p⌉ := 1` when
/// `p = 0`, so an impossible reveal times out instead of spinning).
pub fn default_bootstrap_cap(reveal_prob: f64, dim: usize) -> usize {
    let inv = if reveal_prob > 0.0 {
        (1.0 / reveal_prob).ceil() as usize
    } else {
        1
    };
    10usize.saturating_mul(inv).saturating_mul(dim.max(1))
}

/// Plays uniformly random actions until some feature is revealed.
///
/// Returns the first non-empty feedback set and every `(action, reward)`
/// pair played on the way.
pub fn bootstrap<R: Rng + ?Sized>(
    env: &mut Environment,
    rng: &mut R,
    step_cap: usize,
) -> Result<(FeatureSet, History)> {
    let mut history = History::new();
    while history.len() < step_cap {
        let choice = Choice {
            action_index: env.pool().random_index(rng)?,
            explored: true,
        };
        let x = env.pool().action(choice.action_index).clone();
        let mut coins = RandomSource::seed_from_u64(rng.random());
        let outcome = env.step(&choice, rng, &mut coins)?;
        history.push(x, outcome.reward);
        if !outcome.revealed.is_empty() {
            return Ok((outcome.revealed, history));
        }
    }
    Err(Error::BootstrapTimeout { steps: history.len() })
}

/// An action pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Choice {
    /// Index into the pool's action list.
    pub action_index: usize,
    /// `true` for a uniformly random pick.
    pub explored: bool,
}

/// Which algorithm a [`Policy`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "OFUL")]
    Oful,
    #[serde(rename = "FF-OFUL")]
    FfOful,
    #[serde(rename = "FF-EPOCH-OFUL")]
    FfEpochOful,
    #[serde(rename = "ETC")]
    Etc,
    #[serde(rename = "RANDOM")]
    Random,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Oful => "OFUL",
            PolicyKind::FfOful => "FF-OFUL",
            PolicyKind::FfEpochOful => "FF-EPOCH-OFUL",
            PolicyKind::Etc => "ETC",
            PolicyKind::Random => "RANDOM",
        }
    }

    fn feedback_driven(self) -> bool {
        matches!(self, PolicyKind::FfOful | PolicyKind::FfEpochOful)
    }
}

/// Mutable state of one algorithm in one run.
#[derive(Debug, Clone)]
pub struct Policy {
    kind: PolicyKind,
    params: ConfidenceParams,
    discovered: FeatureSet,
    design: DesignState,
    history: History,
    step_count: u64,
    /// Post-bootstrap step counter driving the ε schedules.
    explore_clock: u64,
    bootstrap_cap: usize,
    etc_budget: Option<u64>,
    epoch_delta1: Option<f64>,
    frozen: bool,
}

impl Policy {
    fn base(kind: PolicyKind, params: ConfidenceParams, features: FeatureSet) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            kind,
            design: DesignState::new(features, params.ridge)?,
            params,
            discovered: FeatureSet::new(),
            history: History::new(),
            step_count: 0,
            explore_clock: 0,
            bootstrap_cap: usize::MAX,
            etc_budget: None,
            epoch_delta1: None,
            frozen: false,
        })
    }

    /// OFUL over all `dim` features.
    pub fn oful(params: ConfidenceParams, dim: usize) -> Result<Self> {
        Self::base(PolicyKind::Oful, params, FeatureSet::full(dim))
    }

    /// OFUL over a fixed feature subset.
    pub fn oful_on(params: ConfidenceParams, features: FeatureSet) -> Result<Self> {
        Self::base(PolicyKind::Oful, params, features)
    }

    /// FF-OFUL; `bootstrap_cap` bounds the initial random phase.
    pub fn ff_oful(params: ConfidenceParams, bootstrap_cap: usize) -> Result<Self> {
        let mut p = Self::base(PolicyKind::FfOful, params, FeatureSet::new())?;
        p.bootstrap_cap = bootstrap_cap;
        Ok(p)
    }

    /// Epoch FF-OFUL with the default split `δ₁ = δ/(3M)`, `M = ⌈log₂(T/2)⌉`.
    pub fn ff_epoch(params: ConfidenceParams, horizon: u64, bootstrap_cap: usize) -> Result<Self> {
        let delta1 = params.delta / (3.0 * f64::from(epoch_count(horizon)));
        Self::ff_epoch_with_delta1(params, delta1, bootstrap_cap)
    }

    pub fn ff_epoch_with_delta1(params: ConfidenceParams, delta1: f64, bootstrap_cap: usize) -> Result<Self> {
        if !(delta1 > 0.0 && delta1 < 1.0) {
            return Err(Error::invalid(format!("delta1 must lie in (0, 1), got {delta1}")));
        }
        let mut p = Self::base(PolicyKind::FfEpochOful, params, FeatureSet::new())?;
        p.bootstrap_cap = bootstrap_cap;
        p.epoch_delta1 = Some(delta1);
        Ok(p)
    }

    /// Explore-then-commit: `budget` uniform plays, then OFUL on the features
    /// discovered so far (plus `seed_features`).
    pub fn etc(params: ConfidenceParams, budget: u64, seed_features: FeatureSet) -> Result<Self> {
        let mut p = Self::base(PolicyKind::Etc, params, FeatureSet::new())?;
        p.discovered = seed_features;
        p.etc_budget = Some(budget);
        Ok(p)
    }

    /// Uniformly random play.
    pub fn random(params: ConfidenceParams) -> Result<Self> {
        Self::base(PolicyKind::Random, params, FeatureSet::new())
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn params(&self) -> &ConfidenceParams {
        &self.params
    }

    /// Features revealed so far (`R_t`).
    pub fn discovered(&self) -> &FeatureSet {
        &self.discovered
    }

    pub fn design(&self) -> &DesignState {
        &self.design
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    /// Number of observed steps.
    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// Whether a feedback-driven policy is still waiting for its first
    /// revealed feature.
    pub fn bootstrapping(&self) -> bool {
        self.kind.feedback_driven() && self.discovered.is_empty()
    }

    /// Current exploration probability for the next pick.
    pub fn epsilon(&self) -> f64 {
        let t = self.explore_clock + 1;
        match self.kind {
            PolicyKind::FfOful => ff_epsilon(t),
            PolicyKind::FfEpochOful => ff_epoch_schedule(t, self.epoch_delta1.unwrap_or(0.5)),
            PolicyKind::Random => 1.0,
            PolicyKind::Oful => 0.0,
            PolicyKind::Etc => {
                if self.step_count < self.etc_budget.unwrap_or(0) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Picks the next action from `pool`.
    pub fn choose<R: Rng + ?Sized>(&mut self, pool: &ActionPool, rng: &mut R) -> Result<Choice> {
        if pool.available().is_empty() {
            return Err(Error::EmptyPool);
        }
        match self.kind {
            PolicyKind::Random => random_choice(pool, rng),
            PolicyKind::Oful => select_ucb(pool, &self.design, &self.params),
            PolicyKind::FfOful | PolicyKind::FfEpochOful => {
                if self.discovered.is_empty() {
                    if self.history.len() >= self.bootstrap_cap {
                        return Err(Error::BootstrapTimeout {
                            steps: self.history.len(),
                        });
                    }
                    return random_choice(pool, rng);
                }
                self.ff_step(pool, rng)
            }
            PolicyKind::Etc => {
                if self.step_count < self.etc_budget.unwrap_or(0) {
                    return random_choice(pool, rng);
                }
                if !self.frozen {
                    self.design = DesignState::recompute(&self.history, self.discovered.clone(), self.params.ridge)?;
                    self.frozen = true;
                }
                select_ucb(pool, &self.design, &self.params)
            }
        }
    }

    /// One post-bootstrap step of the feedback-driven policies: explore with
    /// probability ε, otherwise play the UCB arm on the discovered features.
    pub fn ff_step<R: Rng + ?Sized>(&mut self, pool: &ActionPool, rng: &mut R) -> Result<Choice> {
        let eps = self.epsilon();
        self.explore_clock += 1;
        if rng.random::<f64>() < eps {
            random_choice(pool, rng)
        } else {
            select_ucb(pool, &self.design, &self.params)
        }
    }

    /// Records the outcome of playing `action`.
    pub fn observe(&mut self, action: &SparseVector, reward: f64, revealed: &FeatureSet) -> Result<()> {
        self.history.push(action.clone(), reward);
        self.step_count += 1;
        self.apply_feedback(revealed)
    }

    /// Folds the latest history entry and the revealed features into the
    /// design: a rank-one update when nothing new was revealed, a full
    /// recompute over the whole history when the feature set grows.
    pub fn apply_feedback(&mut self, revealed: &FeatureSet) -> Result<()> {
        let Some((x, y)) = self.history.last() else {
            return Ok(());
        };
        match self.kind {
            PolicyKind::Random => {
                self.discovered.extend_from(revealed);
            }
            PolicyKind::Oful => {
                self.discovered.extend_from(revealed);
                self.design.rank_one_update(x, *y);
            }
            PolicyKind::FfOful | PolicyKind::FfEpochOful => {
                if self.discovered.extend_from(revealed) {
                    self.design = DesignState::recompute(&self.history, self.discovered.clone(), self.params.ridge)?;
                } else {
                    self.design.rank_one_update(x, *y);
                }
            }
            PolicyKind::Etc => {
                if self.frozen {
                    self.design.rank_one_update(x, *y);
                } else {
                    self.discovered.extend_from(revealed);
                }
            }
        }
        Ok(())
    }
}

fn random_choice<R: Rng + ?Sized>(pool: &ActionPool, rng: &mut R) -> Result<Choice> {
    Ok(Choice {
        action_index: pool.random_index(rng)?,
        explored: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{FeedbackOracle, GroundTruth, RewardModel};
    use crate::rng::{stream_rng, Stream};

    fn params(ridge: f64) -> ConfidenceParams {
        ConfidenceParams::new(0.1, 1.0, ridge, 0.1).unwrap()
    }

    fn unit(dim: usize, i: usize) -> SparseVector {
        SparseVector::new(dim, [(i, 1.0)]).unwrap()
    }

    #[test]
    fn radius_with_unit_delta_is_ridge_term() {
        let s = DesignState::new(FeatureSet::full(3), 2.0).unwrap();
        let p = ConfidenceParams {
            noise_scale: 1.0,
            theta_bound: 1.5,
            ridge: 2.0,
            delta: 1.0,
        };
        assert_eq!(confidence_radius(&s, &p), 2f64.sqrt() * 1.5);
    }

    #[test]
    fn radius_closed_form() {
        let s = DesignState::new(FeatureSet::full(4), 4.0).unwrap();
        let p = ConfidenceParams::new(1.0, 0.5, 4.0, (-2f64).exp()).unwrap();
        assert!((confidence_radius(&s, &p) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn radius_grows_with_data() {
        let mut s = DesignState::new(FeatureSet::full(2), 1.0).unwrap();
        let p = params(1.0);
        let mut last = confidence_radius(&s, &p);
        for i in 0..20 {
            s.rank_one_update(&unit(2, i % 2), 1.0);
            let r = confidence_radius(&s, &p);
            assert!(r >= last);
            last = r;
        }
    }

    #[test]
    fn ucb_unit_case_and_zero_radius() {
        let s = DesignState::new(FeatureSet::full(2), 1.0).unwrap();
        assert_eq!(ucb_score(&s, 1.0, &unit(2, 0)), 1.0);
        let mut s = s;
        s.rank_one_update(&unit(2, 0), 3.0);
        let x = SparseVector::from_dense(&[0.5, 0.5]).unwrap();
        assert_eq!(ucb_score(&s, 0.0, &x), s.predict(&x));
    }

    #[test]
    fn select_ucb_breaks_ties_low() {
        let x = SparseVector::from_dense(&[0.3, 0.4]).unwrap();
        let pool = ActionPool::new(vec![x.clone(), x], true).unwrap();
        let s = DesignState::new(FeatureSet::full(2), 1.0).unwrap();
        assert_eq!(select_ucb(&pool, &s, &params(1.0)).unwrap().action_index, 0);
    }

    #[test]
    fn fresh_select_picks_largest_restricted_norm() {
        let pool = ActionPool::new(
            vec![
                SparseVector::from_dense(&[0.1, 0.0, 5.0]).unwrap(),
                SparseVector::from_dense(&[0.6, 0.8, 0.0]).unwrap(),
                SparseVector::from_dense(&[0.5, 0.0, 0.0]).unwrap(),
            ],
            true,
        )
        .unwrap();
        let s = DesignState::new([0, 1].into_iter().collect(), 1.0).unwrap();
        assert_eq!(select_ucb(&pool, &s, &params(1.0)).unwrap().action_index, 1);
    }

    #[test]
    fn schedules() {
        assert_eq!(ff_epsilon(1), 1.0);
        assert!((ff_epsilon(100) - 0.1).abs() < 1e-15);
        let d1 = 2.0 / std::f64::consts::E;
        assert_eq!(ff_epoch_schedule(1, d1), 1.0);
        assert!((ff_epoch_schedule(8, d1) - 0.5).abs() < 1e-12);
        assert_eq!(ff_epoch_schedule(8, d1), ff_epoch_schedule(15, d1));
        assert!(ff_epoch_schedule(16, d1) < ff_epoch_schedule(15, d1));
        assert_eq!(epoch_index(1), 0);
        assert_eq!(epoch_index(1023), 9);
        assert_eq!(epoch_index(1024), 10);
        assert_eq!(epoch_count(4096), 11);
        assert_eq!(epoch_count(4), 1);
    }

    #[test]
    fn default_cap() {
        assert_eq!(default_bootstrap_cap(0.1, 40), 4000);
        assert_eq!(default_bootstrap_cap(0.3, 2), 80);
        assert_eq!(default_bootstrap_cap(0.0, 5), 50);
    }

    fn line_world(p: f64) -> Environment {
        let actions = (0..4).map(|i| unit(4, i)).collect();
        let pool = ActionPool::new(actions, true).unwrap();
        let truth = GroundTruth::new(SparseVector::from_dense(&[0.0, 1.0, 0.0, 0.0]).unwrap());
        let oracle = FeedbackOracle::exact(&truth, p).unwrap();
        Environment::new(pool, truth, RewardModel::LinearGaussian { noise_scale: 0.0 }, oracle).unwrap()
    }

    #[test]
    fn bootstrap_certain_reveal() {
        let mut env = line_world(1.0);
        let truth = env.truth().clone();
        // every action contains the relevant feature
        let pool = ActionPool::new(vec![SparseVector::from_dense(&[0.5, 0.5, 0.0, 0.0]).unwrap()], true).unwrap();
        env = Environment::new(pool, truth.clone(), *env.model(), FeedbackOracle::exact(&truth, 1.0).unwrap()).unwrap();
        let mut rng = stream_rng(0, Stream::Policy(0));
        let (found, hist) = bootstrap(&mut env, &mut rng, 10).unwrap();
        assert_eq!(hist.len(), 1);
        assert_eq!(found.as_slice(), &[1]);
    }

    #[test]
    fn bootstrap_impossible_reveal_times_out() {
        let mut env = line_world(0.0);
        let mut rng = stream_rng(0, Stream::Policy(0));
        let cap = default_bootstrap_cap(0.0, 4);
        assert!(matches!(
            bootstrap(&mut env, &mut rng, cap),
            Err(Error::BootstrapTimeout { steps }) if steps == cap
        ));
    }

    #[test]
    fn policy_timeout_in_harness_loop() {
        let mut p = Policy::ff_oful(params(1.0), 3).unwrap();
        let env = line_world(0.0);
        let mut rng = stream_rng(0, Stream::Policy(0));
        for _ in 0..3 {
            let c = p.choose(env.pool(), &mut rng).unwrap();
            assert!(c.explored);
            p.observe(env.pool().action(c.action_index), 0.0, &FeatureSet::new()).unwrap();
        }
        assert!(matches!(p.choose(env.pool(), &mut rng), Err(Error::BootstrapTimeout { .. })));
    }

    #[test]
    fn feedback_paths() {
        let mut p = Policy::ff_oful(params(1.0), 100).unwrap();
        let x = SparseVector::from_dense(&[1.0, 2.0, 0.0]).unwrap();
        // empty feedback on an empty design: rank-one no-op
        p.observe(&x, 1.0, &FeatureSet::new()).unwrap();
        assert_eq!(p.design().dim(), 0);
        // a new feature triggers a recompute over the whole history
        p.observe(&x, 3.0, &[1].into_iter().collect()).unwrap();
        assert_eq!(p.design().dim(), 1);
        assert_eq!(p.design().gram()[(0, 0)], 1.0 + 4.0 + 4.0);
        assert_eq!(p.design().moment()[0], 2.0 + 6.0);
        // a repeat of known features takes the rank-one path
        p.observe(&x, 0.0, &[1].into_iter().collect()).unwrap();
        let full = DesignState::recompute(p.history(), p.discovered().clone(), 1.0).unwrap();
        assert_eq!(p.design().dim(), 1);
        assert!((p.design().gram_inv() - full.gram_inv()).amax() < 1e-12);
        assert!((p.design().estimate() - full.estimate()).amax() < 1e-12);
    }

    #[test]
    fn etc_zero_budget_is_restricted_oful() {
        let seed: FeatureSet = [1].into_iter().collect();
        let mut etc = Policy::etc(params(1.0), 0, seed.clone()).unwrap();
        let mut oful = Policy::oful_on(params(1.0), seed).unwrap();
        let env = line_world(0.5);
        let mut rng = stream_rng(0, Stream::Policy(0));
        for step in 0..20 {
            let a = etc.choose(env.pool(), &mut rng).unwrap();
            let b = oful.choose(env.pool(), &mut rng).unwrap();
            assert_eq!(a, b, "step {step}");
            let x = env.pool().action(a.action_index).clone();
            let y = env.means()[a.action_index];
            etc.observe(&x, y, &FeatureSet::new()).unwrap();
            oful.observe(&x, y, &FeatureSet::new()).unwrap();
        }
    }

    #[test]
    fn ff_first_step_after_bootstrap_always_explores() {
        let mut p = Policy::ff_oful(params(1.0), 100).unwrap();
        p.observe(&unit(4, 1), 1.0, &[1].into_iter().collect()).unwrap();
        assert!(!p.bootstrapping());
        assert_eq!(p.epsilon(), 1.0);
        let env = line_world(0.5);
        let mut rng = stream_rng(9, Stream::Policy(0));
        assert!(p.choose(env.pool(), &mut rng).unwrap().explored);
        assert!((p.epsilon() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn empty_pool_errors() {
        let mut env = Environment::new(
            ActionPool::new(vec![unit(2, 0)], false).unwrap(),
            GroundTruth::new(unit(2, 0)),
            RewardModel::LogisticBinary,
            FeedbackOracle::new(FeatureSet::new(), FeatureSet::new(), 0.0).unwrap(),
        )
        .unwrap();
        let mut rng = stream_rng(0, Stream::Policy(0));
        let c = Choice {
            action_index: 0,
            explored: false,
        };
        env.step(&c, &mut rng.clone(), &mut rng).unwrap();
        let mut p = Policy::oful(params(1.0), 2).unwrap();
        assert!(matches!(p.choose(env.pool(), &mut rng), Err(Error::EmptyPool)));
        let s = DesignState::new(FeatureSet::full(2), 1.0).unwrap();
        assert!(matches!(select_ucb(env.pool(), &s, &params(1.0)), Err(Error::EmptyPool)));
    }
}
