//! Closed-form regret bounds and the probability estimates behind them.
//!
//! Everything here is a pure function of its inputs. Logarithms are
//! natural unless the name says `log2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Problem constants the bounds are evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Horizon `T` (or the current step `t`).
    pub horizon: u64,
    /// Ambient dimension `d`.
    pub ambient_dim: usize,
    /// Number of relevant features `k`.
    pub sparsity: usize,
    /// Noise parameter `R`.
    pub noise_scale: f64,
    /// `S ≥ ‖θ*‖`.
    pub theta_bound: f64,
    /// `L ≥ ‖x‖`.
    pub action_bound: f64,
    /// Ridge parameter `λ`.
    pub ridge: f64,
    pub delta: f64,
    /// Per-feature reveal probability `p`.
    pub reveal_prob: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.horizon == 0 || self.ambient_dim == 0 || self.sparsity == 0 {
            return Err(Error::invalid("horizon, ambient_dim and sparsity must be positive"));
        }
        if !positive(self.theta_bound) || !positive(self.action_bound) || !positive(self.ridge) {
            return Err(Error::invalid("theta_bound, action_bound and ridge must be positive"));
        }
        if self.noise_scale.is_nan() || self.noise_scale < 0.0 {
            return Err(Error::invalid("noise_scale must be non-negative"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) || !(self.reveal_prob > 0.0 && self.reveal_prob < 1.0) {
            return Err(Error::invalid("delta and reveal_prob must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Largest possible single-step regret, `2SL`.
pub fn worst_case_regret(theta_bound: f64, action_bound: f64) -> f64 {
    2.0 * theta_bound * action_bound
}

/// High-probability regret bound of OFUL after `t` steps in `d` dimensions:
///
/// `4·√(t·d·ln(λ + tL/d))·(√λ·S + R·√(2 ln(1/δ) + d·ln(1 + tL/(λd))))`.
///
/// A negative `ln(λ + tL/d)` (tiny `λ` and `t`) is clamped to zero.
pub fn oful_bound(inputs: &BoundInputs) -> f64 {
    let t = inputs.horizon as f64;
    let d = inputs.ambient_dim as f64;
    oful_shape(t, d, t, inputs.ridge, inputs.action_bound, inputs.theta_bound, inputs.noise_scale, inputs.delta)
}

// 4√(t·d·ln(λ + n·L/d))·(√λ·S + R√(2 ln(1/δ) + d ln(1 + tL/(λd))))
#[allow(clippy::too_many_arguments)]
fn oful_shape(t: f64, d: f64, n: f64, ridge: f64, l: f64, s: f64, r: f64, delta: f64) -> f64 {
    let growth = (ridge + n * l / d).ln().max(0.0);
    let width = 2.0 * (1.0 / delta).ln() + d * (1.0 + t * l / (ridge * d)).ln();
    4.0 * (t * d * growth).sqrt() * (ridge.sqrt() * s + r * width.max(0.0).sqrt())
}

/// The three addends of the feature-feedback regret bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FfBound {
    /// Random play before every relevant feature has been revealed.
    pub exploration: f64,
    /// Random play that continues after discovery.
    pub residual_exploration: f64,
    /// OFUL restricted to the `k` discovered features.
    pub restricted_oful: f64,
}

impl FfBound {
    pub fn total(&self) -> f64 {
        self.exploration + self.residual_exploration + self.restricted_oful
    }
}

/// Regret bound of FF-OFUL after `T ≥ 4` steps, with `M = log₂(T/2)`:
///
/// ```text
/// 8SL/ln(6M/δ) · (ln(3k/δ) / ln(1/(1−p)))²
///   + M · 3SL·√(T·ln(6M/δ))
///   + 4M·√(T/2 · k · ln(λ + nL/k)) · (√λ·S + R·√(2 ln(3M/δ) + k·ln(1 + TL/(2λk))))
/// ```
///
/// where `n = T/2`, the length of the last epoch.
pub fn ff_bound(inputs: &BoundInputs) -> Result<FfBound> {
    inputs.validate()?;
    if inputs.horizon < 4 {
        return Err(Error::invalid(format!(
            "the feature-feedback bound needs T ≥ 4, got {}",
            inputs.horizon
        )));
    }
    let t = inputs.horizon as f64;
    let k = inputs.sparsity as f64;
    let (s, l, r) = (inputs.theta_bound, inputs.action_bound, inputs.noise_scale);
    let (delta, ridge, p) = (inputs.delta, inputs.ridge, inputs.reveal_prob);
    let m = (t / 2.0).log2();

    let discovery = (3.0 * k / delta).ln() / (1.0 / (1.0 - p)).ln();
    let exploration = 8.0 * s * l / (6.0 * m / delta).ln() * discovery * discovery;
    let residual_exploration = m * 3.0 * s * l * (t * (6.0 * m / delta).ln()).sqrt();

    let half = t / 2.0;
    let growth = (ridge + half * l / k).ln().max(0.0);
    let width = 2.0 * (3.0 * m / delta).ln() + k * (1.0 + t * l / (2.0 * ridge * k)).ln();
    let restricted_oful = 4.0 * m * (half * k * growth).sqrt() * (ridge.sqrt() * s + r * width.max(0.0).sqrt());

    Ok(FfBound {
        exploration,
        residual_exploration,
        restricted_oful,
    })
}

/// Union bound on the chance that some of `k` relevant features is still
/// unrevealed after `n_random` plays that each reveal it with probability
/// at least `p`: `min(1, k(1−p)^n)`.
pub fn prob_undiscovered(k: usize, p: f64, n_random: u64) -> f64 {
    let exponent = i32::try_from(n_random).unwrap_or(i32::MAX);
    (k as f64 * (1.0 - p).powi(exponent)).min(1.0)
}

/// First epoch index after which every relevant feature has been seen with
/// probability at least `1 − δ₂`:
///
/// `⌈log₂( (1/ln(2/δ₁)) · (ln(k/δ₂)/ln(1/(1−p)))² )⌉`, clamped at 0.
pub fn s_observed(k: usize, p: f64, delta1: f64, delta2: f64) -> u32 {
    let ratio = (k as f64 / delta2).ln() / (1.0 / (1.0 - p)).ln();
    let arg = ratio * ratio / (2.0 / delta1).ln();
    let s = arg.log2().ceil();
    if s.is_nan() || s <= 0.0 {
        0
    } else {
        s as u32
    }
}

/// Range that the number of random pulls in an epoch of length `T_s`
/// falls in with probability at least `1 − δ₁`, when each step explores
/// with probability `c/√T_s`, `c = √(2 ln(2/δ₁))`:
/// `(√(T_s/2 · ln(2/δ₁)), 3·√(T_s/2 · ln(2/δ₁)))`.
pub fn random_pull_bounds(epoch_len: u64, delta1: f64) -> (f64, f64) {
    let lower = (epoch_len as f64 / 2.0 * (2.0 / delta1).ln()).sqrt();
    (lower, 3.0 * lower)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs() -> BoundInputs {
        BoundInputs {
            horizon: 4096,
            ambient_dim: 40,
            sparsity: 5,
            noise_scale: 0.1,
            theta_bound: 1.0,
            action_bound: 1.0,
            ridge: 1.0,
            delta: 0.1,
            reveal_prob: 0.1,
        }
    }

    #[test]
    fn oful_bound_single_step() {
        let b = BoundInputs {
            horizon: 1,
            ambient_dim: 1,
            noise_scale: 0.0,
            delta: 0.5,
            ..inputs()
        };
        let expected = 4.0 * 2f64.ln().sqrt();
        assert!((oful_bound(&b) - expected).abs() < 1e-12);
        assert!((oful_bound(&b) - 3.3302).abs() < 1e-4);
    }

    #[test]
    fn oful_bound_noise_free_form() {
        for t in [1u64, 10, 1000] {
            let b = BoundInputs {
                horizon: t,
                noise_scale: 0.0,
                ridge: 2.0,
                theta_bound: 0.7,
                ..inputs()
            };
            let (tf, d) = (t as f64, 40.0);
            let expected = 4.0 * (tf * d * (2.0 + tf / d).ln()).sqrt() * 2f64.sqrt() * 0.7;
            assert!((oful_bound(&b) - expected).abs() < 1e-9 * expected);
        }
    }

    #[test]
    fn bounds_increase_with_horizon() {
        let mut last_oful = 0.0;
        let mut last_ff = 0.0;
        // the exploration addend shrinks with ln M, so the sum only grows
        // once the other two terms dominate
        for e in 5..20 {
            let b = BoundInputs {
                horizon: 1 << e,
                ..inputs()
            };
            let o = oful_bound(&b);
            let f = ff_bound(&b).unwrap().total();
            assert!(o >= last_oful && f >= last_ff);
            last_oful = o;
            last_ff = f;
        }
    }

    #[test]
    fn ff_bound_needs_four_steps() {
        let b = BoundInputs { horizon: 3, ..inputs() };
        assert!(ff_bound(&b).is_err());
        assert!(ff_bound(&BoundInputs { horizon: 4, ..inputs() }).is_ok());
    }

    #[test]
    fn ff_addends_are_nonnegative() {
        for &(k, p, ridge) in &[(1, 0.01, 0.01), (5, 0.5, 1.0), (40, 0.99, 100.0)] {
            let b = BoundInputs {
                sparsity: k,
                reveal_prob: p,
                ridge,
                ..inputs()
            };
            let f = ff_bound(&b).unwrap();
            assert!(f.exploration >= 0.0 && f.residual_exploration >= 0.0 && f.restricted_oful >= 0.0);
        }
    }

    #[test]
    fn ff_exploration_term_vanishes_as_p_approaches_one() {
        let at = |p: f64| {
            ff_bound(&BoundInputs {
                sparsity: 1,
                reveal_prob: p,
                ..inputs()
            })
            .unwrap()
            .exploration
        };
        let m = 11.0f64;
        let expected = 8.0 / (6.0 * m / 0.1).ln() * ((3.0f64 / 0.1).ln() / (1.0 / (1.0 - 0.9f64)).ln()).powi(2);
        assert!((at(0.9) - expected).abs() < 1e-9);
        assert!(at(1.0 - 1e-12) < 0.02);
        assert!(at(0.999) < at(0.9));
    }

    #[test]
    fn ff_beats_oful_when_sparse() {
        let b = BoundInputs {
            ambient_dim: 10_000,
            ..inputs()
        };
        assert!(ff_bound(&b).unwrap().total() < oful_bound(&b));
    }

    #[test]
    fn undiscovered_probability() {
        assert_eq!(prob_undiscovered(5, 0.1, 0), 1.0);
        assert_eq!(prob_undiscovered(1, 0.5, 1), 0.5);
        let v = prob_undiscovered(5, 0.1, 44);
        assert!((v - 5.0 * 0.9f64.powi(44)).abs() < 1e-15);
        assert!((v - 0.0484).abs() < 1e-4);
    }

    #[test]
    fn s_observed_values() {
        assert_eq!(s_observed(5, 0.1, 0.1, 0.1), 9);
        assert_eq!(s_observed(5, 1.0 - 1e-12, 0.1, 0.1), 0);
        let mut last = u32::MAX;
        for p in [0.01, 0.05, 0.1, 0.3, 0.6, 0.9] {
            let s = s_observed(5, p, 0.1, 0.1);
            assert!(s <= last);
            last = s;
        }
        let mut last = 0;
        for k in [1, 2, 5, 20, 100] {
            let s = s_observed(k, 0.1, 0.1, 0.1);
            assert!(s >= last);
            last = s;
        }
    }

    #[test]
    fn random_pulls_closed_form() {
        let (lo, hi) = random_pull_bounds(8, 2.0 / std::f64::consts::E);
        assert!((lo - 2.0).abs() < 1e-12);
        assert!((hi - 6.0).abs() < 1e-12);
        let (lo, hi) = random_pull_bounds(1000, 0.05);
        assert_eq!(hi, 3.0 * lo);
    }
}
