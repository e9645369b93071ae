use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Scenario, ThetaSource};
use super::output::BoundRow;
use super::summary::{aggregate, RegretRecord, SummaryRow};
use crate::dataset::{self, Annotations};
use crate::environment::{
    generate_actions, generate_theta, sample_noise_features, ActionPool, Environment, FeedbackOracle, GroundTruth,
};
use crate::error::{Error, Result};
use crate::linalg::{FeatureSet, SparseVector};
use crate::policy::{default_bootstrap_cap, ConfidenceParams, Policy, PolicyKind};
use crate::rng::{step_rng, stream_rng, KeyedCoins, Stream};
use crate::theory::{ff_bound, oful_bound, BoundInputs};

/// Records at every step up to this horizon, sparser beyond it.
pub const DENSE_RECORD_HORIZON: u64 = 1 << 13;
/// Record spacing for long horizons.
pub const SPARSE_RECORD_STRIDE: u64 = 1 << 5;

/// One column of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmSpec {
    Plain(PolicyKind),
    /// Explore-then-commit with this budget.
    Etc(u64),
    /// OFUL on a random subset of this size of `supp(θ*)`.
    Subset(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Algorithm {
    pub tag: String,
    pub spec: AlgorithmSpec,
}

impl Algorithm {
    fn new(spec: AlgorithmSpec) -> Self {
        let tag = match &spec {
            AlgorithmSpec::Plain(k) => k.name().to_string(),
            AlgorithmSpec::Etc(t0) => format!("ETC(T0={t0})"),
            AlgorithmSpec::Subset(j) => format!("OFUL-SUBSET(j={j})"),
        };
        Self { tag, spec }
    }

    /// Index of this algorithm's exploration stream, derived from its tag so
    /// that filtering the algorithm list leaves the others' draws unchanged.
    fn stream(&self) -> Stream {
        // 32-bit FNV-1a
        let mut h: u32 = 0x811c_9dc5;
        for b in self.tag.bytes() {
            h ^= u32::from(b);
            h = h.wrapping_mul(0x0100_0193);
        }
        Stream::Policy(h)
    }
}

/// The algorithm columns a config expands to, in output order.
pub fn algorithms(config: &ExperimentConfig) -> Vec<Algorithm> {
    let mut out = Vec::new();
    if config.scenario == Scenario::SubsetSweep {
        out.extend(config.subset_sizes.iter().map(|&j| Algorithm::new(AlgorithmSpec::Subset(j))));
    }
    for &kind in &config.algorithms {
        if kind == PolicyKind::Etc {
            out.extend(config.etc_budgets.iter().map(|&t0| Algorithm::new(AlgorithmSpec::Etc(t0))));
        } else {
            out.push(Algorithm::new(AlgorithmSpec::Plain(kind)));
        }
    }
    out
}

/// The environment shared by every algorithm of one trial.
#[derive(Debug, Clone)]
pub struct World {
    pub pool: ActionPool,
    pub truth: GroundTruth,
    pub oracle: FeedbackOracle,
}

#[derive(Debug, Clone)]
struct LoadedDataset {
    actions: Vec<SparseVector>,
    ground_truth: Option<SparseVector>,
    annotations: Option<Annotations>,
    labels: Option<Vec<String>>,
}

/// A validated config with its dataset (if any) loaded once.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    data: Option<LoadedDataset>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let data = match (&config.scenario, &config.dataset) {
            (Scenario::Dataset, Some(ds)) => {
                let actions = dataset::read_sparse_matrix_file(&ds.matrix)?;
                let dim = actions.first().map(SparseVector::dim).ok_or_else(|| {
                    Error::config("dataset.matrix", "matrix has no rows")
                })?;
                let ground_truth = ds
                    .ground_truth
                    .as_deref()
                    .map(|p| dataset::read_ground_truth_file(p, dim))
                    .transpose()?;
                let annotations = ds
                    .annotations
                    .as_deref()
                    .map(|p| dataset::read_annotations_file(p, dim))
                    .transpose()?;
                let labels = ds.labels.as_deref().map(dataset::read_labels_file).transpose()?;
                if let Some(l) = &labels {
                    if l.len() != actions.len() {
                        return Err(Error::config(
                            "dataset.labels",
                            format!("{} labels for {} matrix rows", l.len(), actions.len()),
                        ));
                    }
                }
                if let (Some(cat), Some(a)) = (&ds.category, &annotations) {
                    if a.get(cat).is_none() {
                        return Err(Error::config("dataset.category", format!("no annotations for `{cat}`")));
                    }
                }
                if !config.replacement && config.horizon > actions.len() as u64 {
                    return Err(Error::config(
                        "horizon",
                        format!("without replacement the horizon may not exceed {} rows", actions.len()),
                    ));
                }
                Some(LoadedDataset {
                    actions,
                    ground_truth,
                    annotations,
                    labels,
                })
            }
            _ => None,
        };
        Ok(Self { config, data })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn seed(&self, trial: u64) -> u64 {
        self.config.base_seed.wrapping_add(trial)
    }

    /// Builds the world of one trial from its seed.
    pub fn world(&self, trial: u64) -> Result<World> {
        let seed = self.seed(trial);
        let cfg = &self.config;
        let mut theta_rng = stream_rng(seed, Stream::Theta);
        let (pool, truth, relevant) = match &self.data {
            None => {
                let mut pool_rng = stream_rng(seed, Stream::Pool);
                let d = cfg.dims;
                let actions = generate_actions(d.n_actions, d.d, d.action_nnz, &mut pool_rng)?;
                let truth = generate_theta(d.d, d.k, cfg.theta_bound, &mut theta_rng)?;
                let relevant = truth.support().clone();
                (ActionPool::new(actions, cfg.replacement)?, truth, relevant)
            }
            Some(data) => {
                let ds = cfg.dataset.as_ref().expect("dataset config present when data is loaded");
                let (theta, row) = match ds.theta {
                    ThetaSource::GroundTruth => (
                        data.ground_truth.clone().expect("validated: ground truth present"),
                        None,
                    ),
                    ThetaSource::RandomAction => {
                        let row = theta_rng.random_range(0..data.actions.len());
                        let mut theta = data.actions[row].clone();
                        let norm = theta.norm();
                        if norm == 0.0 {
                            return Err(Error::invalid(format!("matrix row {row} drawn as θ* is all zero")));
                        }
                        theta.scale(cfg.theta_bound / norm);
                        (theta, Some(row))
                    }
                };
                let truth = GroundTruth::new(theta);
                let category = ds
                    .category
                    .clone()
                    .or_else(|| row.and_then(|r| data.labels.as_ref().map(|l| l[r].clone())));
                let relevant = match (category, &data.annotations) {
                    (Some(cat), Some(a)) => a.get(&cat).cloned().ok_or_else(|| {
                        Error::config("dataset.annotations", format!("no annotations for `{cat}`"))
                    })?,
                    _ => truth.support().clone(),
                };
                (ActionPool::new(data.actions.clone(), cfg.replacement)?, truth, relevant)
            }
        };
        let dim = pool.dim();
        let noise = sample_noise_features(dim, &relevant, cfg.oracle.noise_features, &mut theta_rng)?;
        let oracle = FeedbackOracle::new(relevant, noise, cfg.oracle.p)?;
        Ok(World { pool, truth, oracle })
    }

    fn bootstrap_cap(&self, dim: usize) -> usize {
        self.config
            .bootstrap_cap
            .unwrap_or_else(|| default_bootstrap_cap(self.config.oracle.p, dim))
    }

    fn policy(&self, alg: &Algorithm, world: &World, seed: u64) -> Result<Policy> {
        let cfg = &self.config;
        let dim = world.pool.dim();
        let kind = match alg.spec {
            AlgorithmSpec::Plain(k) => k,
            AlgorithmSpec::Etc(_) => PolicyKind::Etc,
            AlgorithmSpec::Subset(_) => PolicyKind::Oful,
        };
        let params = ConfidenceParams::new(
            cfg.reward.noise_scale(),
            cfg.theta_bound,
            cfg.ridge.for_kind(kind),
            cfg.delta,
        )?;
        match alg.spec {
            AlgorithmSpec::Plain(PolicyKind::Oful) => Policy::oful(params, dim),
            AlgorithmSpec::Plain(PolicyKind::FfOful) => Policy::ff_oful(params, self.bootstrap_cap(dim)),
            AlgorithmSpec::Plain(PolicyKind::FfEpochOful) => {
                Policy::ff_epoch(params, cfg.horizon, self.bootstrap_cap(dim))
            }
            AlgorithmSpec::Plain(PolicyKind::Random) => Policy::random(params),
            AlgorithmSpec::Plain(PolicyKind::Etc) => Policy::etc(
                params,
                cfg.etc_budgets.first().copied().unwrap_or(0),
                FeatureSet::new(),
            ),
            AlgorithmSpec::Etc(t0) => Policy::etc(params, t0, FeatureSet::new()),
            AlgorithmSpec::Subset(j) => {
                let support = world.truth.support().as_slice();
                if j > support.len() {
                    return Err(Error::invalid(format!(
                        "subset size {j} exceeds the support size {}",
                        support.len()
                    )));
                }
                let mut rng = step_rng(seed, Stream::Subset, j as u64);
                let subset: FeatureSet = index::sample(&mut rng, support.len(), j)
                    .iter()
                    .map(|i| support[i])
                    .collect();
                Policy::oful_on(params, subset)
            }
        }
    }

    fn keep(&self, t: u64) -> bool {
        let horizon = self.config.horizon;
        horizon <= DENSE_RECORD_HORIZON || t.is_multiple_of(SPARSE_RECORD_STRIDE) || t == horizon
    }

    /// Runs one algorithm for `T` steps on its own copy of `world`.
    pub fn run_algorithm(&self, trial: u64, world: &World, alg: &Algorithm) -> Result<Vec<RegretRecord>> {
        self.simulate(trial, world, alg).map(|(records, _)| records)
    }

    /// As [`run_algorithm`](Self::run_algorithm), also returning the final
    /// policy state.
    pub fn simulate(&self, trial: u64, world: &World, alg: &Algorithm) -> Result<(Vec<RegretRecord>, Policy)> {
        let seed = self.seed(trial);
        let mut env = Environment::new(
            world.pool.clone(),
            world.truth.clone(),
            self.config.reward,
            world.oracle.clone(),
        )?;
        let mut policy = self.policy(alg, world, seed)?;
        let mut rng = stream_rng(seed, alg.stream());
        let mut records = Vec::new();
        let mut cumulative = 0.0;
        for t in 1..=self.config.horizon {
            let choice = policy.choose(env.pool(), &mut rng)?;
            let mut noise = step_rng(seed, Stream::RewardNoise, t);
            let mut coins = KeyedCoins::new(seed, t);
            let outcome = env.step(&choice, &mut noise, &mut coins)?;
            policy.observe(env.pool().action(choice.action_index), outcome.reward, &outcome.revealed)?;
            cumulative += outcome.instantaneous_regret;
            if self.keep(t) {
                records.push(RegretRecord {
                    trial,
                    algorithm: alg.tag.clone(),
                    t,
                    action_index: choice.action_index,
                    explored: choice.explored,
                    instant_regret: outcome.instantaneous_regret,
                    cumulative_regret: cumulative,
                    discovered_count: policy.discovered().len(),
                });
            }
        }
        Ok((records, policy))
    }

    /// Every algorithm of one trial, against the same world.
    pub fn run_trial(&self, trial: u64) -> Result<Vec<RegretRecord>> {
        let world = self.world(trial)?;
        let mut out = Vec::new();
        for alg in algorithms(&self.config) {
            out.extend(self.run_algorithm(trial, &world, &alg)?);
        }
        Ok(out)
    }

    /// All trials on `workers` threads; the result does not depend on
    /// `workers`.
    pub fn run(&self, workers: usize) -> Result<Vec<RegretRecord>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
        let per_trial: Vec<Vec<RegretRecord>> = pool.install(|| {
            (0..self.config.trials as u64)
                .into_par_iter()
                .map(|i| self.run_trial(i))
                .collect::<Result<_>>()
        })?;
        Ok(per_trial.into_iter().flatten().collect())
    }
}

/// One trial of `config`.
pub fn run_trial(config: &ExperimentConfig, trial: u64) -> Result<Vec<RegretRecord>> {
    Experiment::new(config.clone())?.run_trial(trial)
}

/// Mean regret curves of OFUL restricted to random `j`-subsets of the
/// support, one curve per configured `j`, plus any configured reference
/// algorithms.
pub fn subset_sweep(config: &ExperimentConfig, workers: usize) -> Result<Vec<SummaryRow>> {
    if config.scenario != Scenario::SubsetSweep {
        return Err(Error::config("scenario", "subset_sweep needs SUBSET_SWEEP"));
    }
    if let Some(&j) = config.subset_sizes.iter().find(|&&j| j > config.dims.k) {
        return Err(Error::invalid(format!("subset size {j} exceeds k = {}", config.dims.k)));
    }
    aggregate(&Experiment::new(config.clone())?.run(workers)?)
}

/// OFUL and FF-OFUL bounds at the dyadic steps `4, 8, …` up to the horizon
/// (and at the horizon itself), with the synthetic dimensions of `config`.
pub fn bound_curve(config: &ExperimentConfig) -> Result<Vec<BoundRow>> {
    bounds_for(config, config.dims.d, config.dims.k, config.action_bound)
}

fn bounds_for(config: &ExperimentConfig, dim: usize, sparsity: usize, action_bound: f64) -> Result<Vec<BoundRow>> {
    let mut steps: Vec<u64> = (2..64).map(|e| 1u64 << e).take_while(|&t| t <= config.horizon).collect();
    if config.horizon >= 4 && steps.last() != Some(&config.horizon) {
        steps.push(config.horizon);
    }
    steps
        .into_iter()
        .map(|t| {
            let base = BoundInputs {
                horizon: t,
                ambient_dim: dim,
                sparsity,
                noise_scale: config.reward.noise_scale(),
                theta_bound: config.theta_bound,
                action_bound,
                ridge: config.ridge.oful,
                delta: config.delta,
                reveal_prob: config.oracle.p,
            };
            let ff = BoundInputs {
                ridge: config.ridge.ff_oful,
                ..base
            };
            Ok(BoundRow {
                t,
                oful_bound: oful_bound(&base),
                ff_bound: ff_bound(&ff)?.total(),
            })
        })
        .collect()
}

impl Experiment {
    /// [`bound_curve`] with the dimension, relevant-set size and action norm
    /// of trial 0's world, which is what a dataset run needs.
    pub fn bound_curve(&self) -> Result<Vec<BoundRow>> {
        let world = self.world(0)?;
        let l = world.pool.norm_bound().max(self.config.action_bound);
        bounds_for(&self.config, world.pool.dim(), world.oracle.relevant().len().max(1), l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(scenario: Scenario) -> ExperimentConfig {
        let mut c = match scenario {
            Scenario::EtcSweep => ExperimentConfig::etc_sweep(),
            Scenario::SubsetSweep => ExperimentConfig::subset_sweep(),
            _ => ExperimentConfig::synth_sparse(),
        };
        c.horizon = 64;
        c.trials = 2;
        c.dims.n_actions = 50;
        c.etc_budgets = vec![8, 16];
        c
    }

    #[test]
    fn expands_algorithm_tags() {
        let tags: Vec<String> = algorithms(&tiny(Scenario::EtcSweep)).into_iter().map(|a| a.tag).collect();
        assert_eq!(tags, ["FF-OFUL", "ETC(T0=8)", "ETC(T0=16)"]);
        let tags: Vec<String> = algorithms(&tiny(Scenario::SubsetSweep)).into_iter().map(|a| a.tag).collect();
        assert_eq!(tags[0], "OFUL-SUBSET(j=2)");
        assert_eq!(tags.last().unwrap(), "OFUL");
    }

    #[test]
    fn single_random_step() {
        let mut c = tiny(Scenario::SynthSparse);
        c.algorithms = vec![PolicyKind::Random];
        c.horizon = 1;
        c.trials = 1;
        let recs = run_trial(&c, 0).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].t, 1);
        assert_eq!(recs[0].cumulative_regret, recs[0].instant_regret);
    }

    #[test]
    fn record_cadence() {
        let mut c = tiny(Scenario::SynthSparse);
        c.algorithms = vec![PolicyKind::Random];
        c.horizon = DENSE_RECORD_HORIZON + 40;
        let e = Experiment::new(c).unwrap();
        assert!(!e.keep(1));
        assert!(e.keep(32));
        assert!(!e.keep(DENSE_RECORD_HORIZON + 1));
        assert!(e.keep(DENSE_RECORD_HORIZON + 32));
        assert!(e.keep(DENSE_RECORD_HORIZON + 40));
    }

    #[test]
    fn subset_sweep_rejects_large_j() {
        let mut c = tiny(Scenario::SubsetSweep);
        c.subset_sizes = vec![11];
        assert!(subset_sweep(&c, 1).is_err());
        assert!(subset_sweep(&tiny(Scenario::SynthSparse), 1).is_err());
    }

    #[test]
    fn bound_curve_is_dyadic() {
        let c = ExperimentConfig::synth_sparse();
        let rows = bound_curve(&c).unwrap();
        assert_eq!(rows.first().unwrap().t, 4);
        assert_eq!(rows.last().unwrap().t, 4096);
        assert!(rows.iter().all(|r| r.ff_bound.is_finite() && r.oful_bound >= 0.0));
    }
}
