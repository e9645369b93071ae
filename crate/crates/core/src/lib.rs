//! Linear bandits with feature feedback.
//!
//! A learner picks sparse actions `x` and observes `⟨x, θ*⟩` plus noise.
//! With feature feedback it also sees, every round, some of the relevant
//! coordinates present in the played action, and can restrict its
//! confidence ellipsoid to the features discovered so far.
//!
//! * [`linalg`]: sparse vectors and the incrementally maintained ridge design.
//! * [`policy`]: OFUL, FF-OFUL (two exploration schedules), explore-then-commit
//!   and uniform play.
//! * [`environment`]: action pools, reward models, the feedback oracle and
//!   synthetic generators.
//! * [`theory`]: closed-form regret bounds.
//! * [`harness`]: seeded, paired, parallel experiments with CSV output.
//!
//! ```
//! use ffbandit::harness::{aggregate, Experiment, ExperimentConfig};
//!
//! let mut config = ExperimentConfig::synth_sparse();
//! config.horizon = 128;
//! config.trials = 2;
//! let records = Experiment::new(config)?.run(1)?;
//! let summary = aggregate(&records)?;
//! assert_eq!(summary.len(), 2 * 128);
//! # Ok::<(), ffbandit::Error>(())
//! ```

pub mod dataset;
pub mod environment;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod policy;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
pub use linalg::{DesignState, FeatureSet, History, SparseVector};
pub use policy::{Choice, ConfidenceParams, Policy, PolicyKind};

macro_rules! book_chapters {
    ($($name:ident => $file:literal),* $(,)?) => {
        $(
            #[cfg(doctest)]
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            mod $name {}
        )*
    };
}

book_chapters! {
    book_introduction => "introduction.md",
    book_design_state => "design-state.md",
    book_confidence => "confidence.md",
    book_feature_feedback => "feature-feedback.md",
    book_environments => "environments.md",
    book_bounds => "bounds.md",
    book_experiments => "experiments.md",
}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}
