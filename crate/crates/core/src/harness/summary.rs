use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One logged step of one algorithm in one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRecord {
    pub trial: u64,
    pub algorithm: String,
    /// 1-based step.
    pub t: u64,
    pub action_index: usize,
    pub explored: bool,
    pub instant_regret: f64,
    pub cumulative_regret: f64,
    /// `|R_t|` after this step.
    pub discovered_count: usize,
}

/// Cross-trial statistics of the cumulative regret at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub t: u64,
    pub mean_cum_regret: f64,
    pub stderr: f64,
    pub ci95_halfwidth: f64,
}

const Z95: f64 = 1.96;

/// Mean, standard error and normal 95% half-width of the cumulative regret
/// per `(algorithm, t)`. Algorithms keep their order of first appearance,
/// steps are ascending. With a single trial the spread is reported as zero.
pub fn aggregate(records: &[RegretRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<(&str, u64), Vec<f64>> = HashMap::new();
    for r in records {
        if !order.contains(&r.algorithm.as_str()) {
            order.push(&r.algorithm);
        }
        groups.entry((&r.algorithm, r.t)).or_default().push(r.cumulative_regret);
    }
    let mut keys: Vec<(usize, u64, &str)> = groups
        .keys()
        .map(|&(a, t)| (order.iter().position(|o| *o == a).unwrap_or(0), t, a))
        .collect();
    keys.sort_unstable();

    Ok(keys
        .into_iter()
        .map(|(_, t, alg)| {
            let (mean, stderr) = mean_stderr(&groups[&(alg, t)]);
            SummaryRow {
                algorithm: alg.to_string(),
                t,
                mean_cum_regret: mean,
                stderr,
                ci95_halfwidth: Z95 * stderr,
            }
        })
        .collect())
}

/// Sample mean and standard error (`s/√n`, `s` with `n−1` denominator).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// The last row of every algorithm.
pub fn final_rows(summary: &[SummaryRow]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    for row in summary {
        match out.iter_mut().find(|r| r.algorithm == row.algorithm) {
            Some(r) if row.t > r.t => *r = row.clone(),
            Some(_) => {}
            None => out.push(row.clone()),
        }
    }
    out
}

/// The row for `algorithm` at step `t`, if logged.
pub fn lookup<'a>(summary: &'a [SummaryRow], algorithm: &str, t: u64) -> Option<&'a SummaryRow> {
    summary.iter().find(|r| r.algorithm == algorithm && r.t == t)
}
