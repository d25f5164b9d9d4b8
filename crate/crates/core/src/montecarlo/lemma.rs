//! Frequency of the event `cone(A_1..A_m) ⊇ cone(E_1..E_m)`, where `E` is
//! the Gram-Schmidt basis of `m` uniform rows.

use serde::{Deserialize, Serialize};

use super::output::{fmt_f64, Tabular};
use super::run_indexed;
use super::sampling::{sample_uniform_rows, trial_rng};
use super::stats::{wilson_interval, Z99};
use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt_basis, Lu, PIVOT_TOL};

/// Coefficients down to this count as nonnegative.
pub const MU_TOL: f64 = 1e-9;
const MAX_REDRAWS: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaIvResult {
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub hits: u64,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Binomial standard error of `frequency`.
    pub sigma: f64,
    /// `2^{-(2 + m(m-1))/2}`.
    pub lower_bound: f64,
    pub redraws: u64,
}

impl Tabular for LemmaIvResult {
    fn config(&self) -> serde_json::Value {
        serde_json::json!({ "m": self.m, "trials": self.trials, "seed": self.seed })
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["m", "trials", "hits", "frequency", "ci_low", "ci_high", "sigma", "lower_bound", "redraws"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.m.to_string(),
            self.trials.to_string(),
            self.hits.to_string(),
            fmt_f64(self.frequency),
            fmt_f64(self.ci_low),
            fmt_f64(self.ci_high),
            fmt_f64(self.sigma),
            fmt_f64(self.lower_bound),
            self.redraws.to_string(),
        ]]
    }
}

/// Whether every basis vector is a nonnegative combination of the rows,
/// or `None` for a (numerically) singular draw.
fn event_holds(rows: &[Vec<f64>]) -> Option<bool> {
    let m = rows.len();
    let basis = gram_schmidt_basis(rows).ok()?;
    // E_j = sum_i mu_i A_i, i.e. A^T mu = E_j
    let mut at = vec![0.0; m * m];
    for (i, r) in rows.iter().enumerate() {
        for (k, v) in r.iter().enumerate() {
            at[k * m + i] = *v;
        }
    }
    let lu = Lu::factor(m, &at);
    if lu.min_pivot() < PIVOT_TOL {
        return None;
    }
    Some(basis.iter().all(|e| lu.solve(e).iter().all(|&mu| mu >= -MU_TOL)))
}

pub fn lemma_iv_experiment(m: usize, trials: u64, seed: u64, workers: usize) -> Result<LemmaIvResult> {
    if !(2..=6).contains(&m) {
        return Err(Error::InvalidInput(format!("m must be in 2..=6, got {m}")));
    }
    if trials < 1 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let outcomes = run_indexed(workers, trials, |i| {
        let mut rng = trial_rng(seed, i);
        for redraw in 0..MAX_REDRAWS {
            let a = sample_uniform_rows(m, m, &mut rng);
            if let Some(hit) = event_holds(&a.to_rows()) {
                return Ok((hit, redraw as u64));
            }
        }
        Err(Error::SingularSubset { subset: (0..m).collect() })
    })?;
    let (mut hits, mut redraws) = (0u64, 0u64);
    for o in outcomes {
        let (hit, r) = o?;
        hits += hit as u64;
        redraws += r;
    }
    let frequency = hits as f64 / trials as f64;
    let (ci_low, ci_high) = wilson_interval(hits, trials, Z99);
    Ok(LemmaIvResult {
        m,
        trials,
        seed,
        hits,
        frequency,
        ci_low,
        ci_high,
        sigma: (frequency * (1.0 - frequency) / trials as f64).sqrt(),
        lower_bound: 2f64.powf(-((2 + m * (m - 1)) as f64) / 2.0),
        redraws,
    })
}
