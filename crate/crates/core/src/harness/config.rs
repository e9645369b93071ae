use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environment::RewardModel;
use crate::error::{Error, Result};
use crate::policy::PolicyKind;

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scenario {
    /// Synthetic world with a `k`-sparse `θ*`.
    SynthSparse,
    /// Synthetic world with `k = d`.
    SynthDense,
    /// FF-OFUL against explore-then-commit over a grid of budgets.
    EtcSweep,
    /// OFUL restricted to random subsets of the true support.
    SubsetSweep,
    /// Actions read from a sparse matrix file.
    Dataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    /// Ambient dimension.
    pub d: usize,
    /// Sparsity of `θ*`.
    pub k: usize,
    /// Number of synthetic actions.
    pub n_actions: usize,
    /// Nonzeros per synthetic action.
    pub action_nnz: usize,
}

impl Default for Dims {
    fn default() -> Self {
        Self {
            d: 40,
            k: 5,
            n_actions: 1000,
            action_nnz: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleParams {
    /// Per-feature reveal probability.
    pub p: f64,
    /// Number of irrelevant features the oracle may also reveal (`k′`).
    #[serde(default)]
    pub noise_features: usize,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            p: 0.1,
            noise_features: 0,
        }
    }
}

/// Ridge parameter per algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RidgeParams {
    #[serde(rename = "OFUL")]
    pub oful: f64,
    #[serde(rename = "FF-OFUL")]
    pub ff_oful: f64,
    #[serde(rename = "FF-EPOCH-OFUL")]
    pub ff_epoch: f64,
    #[serde(rename = "ETC")]
    pub etc: f64,
}

impl Default for RidgeParams {
    fn default() -> Self {
        Self {
            oful: 1.0 / 32.0,
            ff_oful: 1.0,
            ff_epoch: 1.0,
            etc: 1.0,
        }
    }
}

impl RidgeParams {
    pub fn for_kind(&self, kind: PolicyKind) -> f64 {
        match kind {
            PolicyKind::Oful => self.oful,
            PolicyKind::FfOful => self.ff_oful,
            PolicyKind::FfEpochOful => self.ff_epoch,
            PolicyKind::Etc => self.etc,
            PolicyKind::Random => 1.0,
        }
    }
}

/// Where `θ*` comes from in the dataset scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSource {
    /// Read from the ground-truth file.
    #[default]
    GroundTruth,
    /// A uniformly random row of the matrix, drawn per trial.
    RandomAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub matrix: PathBuf,
    #[serde(default)]
    pub annotations: Option<PathBuf>,
    #[serde(default)]
    pub labels: Option<PathBuf>,
    #[serde(default)]
    pub ground_truth: Option<PathBuf>,
    #[serde(default)]
    pub theta: ThetaSource,
    /// Category whose annotated features the oracle reveals.
    #[serde(default)]
    pub category: Option<String>,
}

impl DatasetConfig {
    /// Resolves relative paths against `base`.
    pub fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.matrix);
        self.annotations.as_mut().map(fix);
        self.labels.as_mut().map(fix);
        self.ground_truth.as_mut().map(fix);
    }
}

fn default_algorithms() -> Vec<PolicyKind> {
    vec![PolicyKind::Oful, PolicyKind::FfOful]
}
fn default_trials() -> usize {
    100
}
fn default_reward() -> RewardModel {
    RewardModel::LinearGaussian { noise_scale: 0.1 }
}
fn default_delta() -> f64 {
    0.1
}
fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}

/// Everything needed to reproduce an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<PolicyKind>,
    pub horizon: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub dims: Dims,
    #[serde(default)]
    pub oracle: OracleParams,
    #[serde(default = "default_reward")]
    pub reward: RewardModel,
    #[serde(default)]
    pub ridge: RidgeParams,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "one")]
    pub theta_bound: f64,
    #[serde(default = "one")]
    pub action_bound: f64,
    #[serde(default = "yes")]
    pub replacement: bool,
    /// Explore-then-commit budgets `T₀`.
    #[serde(default)]
    pub etc_budgets: Vec<u64>,
    /// Subset sizes `j` for the subset sweep.
    #[serde(default)]
    pub subset_sizes: Vec<usize>,
    #[serde(default)]
    pub dataset: Option<DatasetConfig>,
    /// Overrides the default bootstrap cap of `10·⌈1/p⌉·d` plays.
    #[serde(default)]
    pub bootstrap_cap: Option<usize>,
}

impl ExperimentConfig {
    fn base(scenario: Scenario, horizon: u64) -> Self {
        Self {
            scenario,
            algorithms: default_algorithms(),
            horizon,
            trials: default_trials(),
            base_seed: 0,
            dims: Dims::default(),
            oracle: OracleParams::default(),
            reward: default_reward(),
            ridge: RidgeParams::default(),
            delta: default_delta(),
            theta_bound: 1.0,
            action_bound: 1.0,
            replacement: true,
            etc_budgets: Vec::new(),
            subset_sizes: Vec::new(),
            dataset: None,
            bootstrap_cap: None,
        }
    }

    /// `d = 40`, `k = 5`, 1000 actions, `p = 0.1`, `T = 2¹²`.
    pub fn synth_sparse() -> Self {
        Self::base(Scenario::SynthSparse, 1 << 12)
    }

    /// As [`synth_sparse`](Self::synth_sparse) with `k = d = 40`.
    pub fn synth_dense() -> Self {
        let mut c = Self::base(Scenario::SynthDense, 1 << 12);
        c.dims.k = c.dims.d;
        c
    }

    /// FF-OFUL against ETC with `T₀ ∈ {64, 256, 1024, 4096}` at `T = 2¹³`.
    pub fn etc_sweep() -> Self {
        let mut c = Self::base(Scenario::EtcSweep, 1 << 13);
        c.algorithms = vec![PolicyKind::FfOful, PolicyKind::Etc];
        c.etc_budgets = vec![64, 256, 1024, 4096];
        c
    }

    /// OFUL on random `j`-subsets of a 10-sparse support, `j ∈ {2,4,…,10}`,
    /// `T = 2⁸`, 100 subsets.
    pub fn subset_sweep() -> Self {
        let mut c = Self::base(Scenario::SubsetSweep, 1 << 8);
        c.dims.k = 10;
        c.algorithms = vec![PolicyKind::Oful];
        c.subset_sizes = vec![2, 4, 6, 8, 10];
        c
    }

    /// Parses a JSON document; unknown keys are errors.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })
    }

    /// Loads a config file, resolving dataset paths relative to it.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_json_str(&text)?;
        if let (Some(ds), Some(dir)) = (cfg.dataset.as_mut(), path.parent()) {
            ds.resolve(dir);
        }
        Ok(cfg)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every field; errors carry the offending field path.
    pub fn validate(&self) -> Result<()> {
        let fail = |path: &str, msg: String| Err(Error::config(path, msg));
        if self.trials == 0 {
            return fail("trials", "must be at least 1".into());
        }
        if self.horizon == 0 {
            return fail("horizon", "must be at least 1".into());
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail("delta", format!("must lie in (0, 1), got {}", self.delta));
        }
        if !positive(self.theta_bound) {
            return fail("theta_bound", format!("must be positive, got {}", self.theta_bound));
        }
        if !positive(self.action_bound) {
            return fail("action_bound", format!("must be positive, got {}", self.action_bound));
        }
        for (name, v) in [
            ("ridge.OFUL", self.ridge.oful),
            ("ridge.FF-OFUL", self.ridge.ff_oful),
            ("ridge.FF-EPOCH-OFUL", self.ridge.ff_epoch),
            ("ridge.ETC", self.ridge.etc),
        ] {
            if !positive(v) {
                return fail(name, format!("must be positive, got {v}"));
            }
        }
        if let RewardModel::LinearGaussian { noise_scale } = self.reward {
            if !positive(noise_scale) {
                return fail("reward.noise_scale", format!("must be positive, got {noise_scale}"));
            }
        }
        if !(0.0..=1.0).contains(&self.oracle.p) {
            return fail("oracle.p", format!("must lie in [0, 1], got {}", self.oracle.p));
        }

        let Dims { d, k, n_actions, action_nnz } = self.dims;
        if self.scenario != Scenario::Dataset {
            if d == 0 {
                return fail("dims.d", "must be at least 1".into());
            }
            if k == 0 || k > d {
                return fail("dims.k", format!("must lie in [1, d={d}], got {k}"));
            }
            if action_nnz == 0 || action_nnz > d {
                return fail("dims.action_nnz", format!("must lie in [1, d={d}], got {action_nnz}"));
            }
            if n_actions == 0 {
                return fail("dims.n_actions", "must be at least 1".into());
            }
            if self.oracle.noise_features > d - k {
                return fail(
                    "oracle.noise_features",
                    format!("at most d - k = {} irrelevant features exist", d - k),
                );
            }
            if !self.replacement && self.horizon > n_actions as u64 {
                return fail(
                    "horizon",
                    format!("without replacement the horizon may not exceed n_actions = {n_actions}"),
                );
            }
        }

        match self.scenario {
            Scenario::SynthDense if k != d => {
                return fail("dims.k", format!("SYNTH_DENSE needs k = d = {d}, got {k}"));
            }
            Scenario::EtcSweep if !self.algorithms.contains(&PolicyKind::Etc) => {
                return fail("algorithms", "ETC_SWEEP needs ETC in the algorithm list".into());
            }
            Scenario::SubsetSweep => {
                if self.subset_sizes.is_empty() {
                    return fail("subset_sizes", "SUBSET_SWEEP needs at least one size".into());
                }
                if let Some(i) = self.subset_sizes.iter().position(|&j| j > k) {
                    return fail(
                        &format!("subset_sizes[{i}]"),
                        format!("subset size {} exceeds k = {k}", self.subset_sizes[i]),
                    );
                }
            }
            Scenario::Dataset if self.dataset.is_none() => {
                return fail("dataset", "DATASET needs a dataset section".into());
            }
            _ => {}
        }
        if self.algorithms.is_empty() && self.scenario != Scenario::SubsetSweep {
            return fail("algorithms", "must name at least one algorithm".into());
        }
        if self.algorithms.contains(&PolicyKind::Etc) && self.etc_budgets.is_empty() {
            return fail("etc_budgets", "ETC needs at least one budget".into());
        }
        if let Some(ds) = &self.dataset {
            if ds.theta == ThetaSource::GroundTruth && ds.ground_truth.is_none() {
                return fail("dataset.ground_truth", "required when theta = ground_truth".into());
            }
            if ds.category.is_some() && ds.annotations.is_none() {
                return fail("dataset.annotations", "required when a category is named".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for c in [
            ExperimentConfig::synth_sparse(),
            ExperimentConfig::synth_dense(),
            ExperimentConfig::etc_sweep(),
            ExperimentConfig::subset_sweep(),
        ] {
            c.validate().unwrap();
            let back = ExperimentConfig::from_json_str(&c.to_json_string()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn minimal_document_uses_defaults() {
        let c = ExperimentConfig::from_json_str(r#"{"scenario": "SYNTH_SPARSE", "horizon": 4096}"#).unwrap();
        assert_eq!(c, ExperimentConfig::synth_sparse());
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let err = ExperimentConfig::from_json_str(r#"{"scenario": "SYNTH_SPARSE", "horizon": 5, "dims": {"d": 4, "q": 1}}"#)
            .unwrap_err();
        match err {
            Error::Config { path, message } => {
                assert_eq!(path, "dims.q");
                assert!(message.contains("unknown field"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_reports_field() {
        let mut c = ExperimentConfig::subset_sweep();
        c.subset_sizes.push(11);
        assert!(matches!(c.validate(), Err(Error::Config { path, .. }) if path == "subset_sizes[5]"));

        let mut c = ExperimentConfig::synth_sparse();
        c.replacement = false;
        assert!(matches!(c.validate(), Err(Error::Config { path, .. }) if path == "horizon"));

        let mut c = ExperimentConfig::synth_sparse();
        c.trials = 0;
        assert!(matches!(c.validate(), Err(Error::Config { path, .. }) if path == "trials"));

        let mut c = ExperimentConfig::synth_dense();
        c.dims.k = 5;
        assert!(matches!(c.validate(), Err(Error::Config { path, .. }) if path == "dims.k"));
    }

    #[test]
    fn reward_models_parse() {
        let c = ExperimentConfig::from_json_str(
            r#"{"scenario": "SYNTH_SPARSE", "horizon": 8, "reward": {"model": "LOGISTIC_BINARY"},
                "ridge": {"OFUL": 256}}"#,
        )
        .unwrap();
        assert_eq!(c.reward, RewardModel::LogisticBinary);
        assert_eq!(c.ridge.oful, 256.0);
        assert_eq!(c.ridge.ff_oful, 1.0);
    }
}
