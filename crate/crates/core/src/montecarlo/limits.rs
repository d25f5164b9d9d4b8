//! Behaviour of `C(A)` as rows are added (`n` grows) and as the dimension
//! grows with `n` tied to `m`.

use serde::{Deserialize, Serialize};

use super::output::{fmt_f64, Tabular};
use super::stats::{mean_stderr, median};
use super::{sample_conditions, RunConfig};
use crate::condition::FeasibilityClass;
use crate::error::{Error, Result};
use crate::special::binomial;

/// Largest `binom(n, m)` allowed per trial in the dimension sweep.
pub const SUBSET_BUDGET: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitNRow {
    pub n: usize,
    pub mean_log: f64,
    pub mean_log_stderr: f64,
    pub mean_sqrt: f64,
    pub mean_sqrt_stderr: f64,
    pub median: f64,
    pub feasible_fraction: f64,
    pub ill_posed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitNTable {
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<LimitNRow>,
}

impl Tabular for LimitNTable {
    fn config(&self) -> serde_json::Value {
        let n_list: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        serde_json::json!({ "m": self.m, "n_list": n_list, "trials": self.trials, "seed": self.seed })
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["n", "mean_log", "mean_log_stderr", "mean_sqrt", "mean_sqrt_stderr", "median", "feasible_fraction", "ill_posed"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    fmt_f64(r.mean_log),
                    fmt_f64(r.mean_log_stderr),
                    fmt_f64(r.mean_sqrt),
                    fmt_f64(r.mean_sqrt_stderr),
                    fmt_f64(r.median),
                    fmt_f64(r.feasible_fraction),
                    r.ill_posed.to_string(),
                ]
            })
            .collect()
    }
}

/// For each `n`, statistics of `C(A)` over `trials` systems. The same seed is
/// used for every `n`, so trial `i` at a larger `n` extends the rows drawn at
/// a smaller one.
pub fn limit_experiment_n(m: usize, n_list: &[usize], trials: u64, seed: u64, workers: usize) -> Result<LimitNTable> {
    if m < 3 {
        return Err(Error::InvalidInput(format!("m must be at least 3, got {m}")));
    }
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("n_list must be nonempty and strictly ascending".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let cfg = RunConfig::new(m, n, trials, seed).with_workers(workers);
        let s = sample_conditions(&cfg)?;
        let finite: Vec<f64> = s.finite().collect();
        let logs: Vec<f64> = finite.iter().map(|c| c.ln()).collect();
        let roots: Vec<f64> = finite.iter().map(|c| c.sqrt()).collect();
        let (mean_log, mean_log_stderr) = mean_stderr(&logs);
        let (mean_sqrt, mean_sqrt_stderr) = mean_stderr(&roots);
        let feasible = s.classes.iter().filter(|&&c| c == FeasibilityClass::StrictlyFeasible).count();
        rows.push(LimitNRow {
            n,
            mean_log,
            mean_log_stderr,
            mean_sqrt,
            mean_sqrt_stderr,
            median: median(&s.values),
            feasible_fraction: feasible as f64 / s.classes.len() as f64,
            ill_posed: s.ill_posed,
        });
    }
    Ok(LimitNTable { m, trials, seed, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NRule {
    /// `n = m`
    #[serde(rename = "n=m")]
    Equal,
    /// `n = 5m`
    #[serde(rename = "n=5m")]
    FiveM,
}

impl NRule {
    pub fn rows_for(self, m: usize) -> usize {
        match self {
            NRule::Equal => m,
            NRule::FiveM => 5 * m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitMRow {
    pub m: usize,
    pub n: usize,
    pub mean_log: f64,
    pub mean_log_stderr: f64,
    pub mean_log_per_m: f64,
    pub mean_log_per_m_stderr: f64,
    pub ill_posed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitMTable {
    pub n_rule: NRule,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<LimitMRow>,
}

impl Tabular for LimitMTable {
    fn config(&self) -> serde_json::Value {
        let m_list: Vec<usize> = self.rows.iter().map(|r| r.m).collect();
        serde_json::json!({ "m_list": m_list, "n_rule": self.n_rule, "trials": self.trials, "seed": self.seed })
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["m", "n", "mean_log", "mean_log_stderr", "mean_log_per_m", "mean_log_per_m_stderr", "ill_posed"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.m.to_string(),
                    r.n.to_string(),
                    fmt_f64(r.mean_log),
                    fmt_f64(r.mean_log_stderr),
                    fmt_f64(r.mean_log_per_m),
                    fmt_f64(r.mean_log_per_m_stderr),
                    r.ill_posed.to_string(),
                ]
            })
            .collect()
    }
}

/// `E[log C]` and `E[log C]/m` for each `m`, with `n` set by `n_rule`.
pub fn limit_experiment_m(m_list: &[usize], n_rule: NRule, trials: u64, seed: u64, workers: usize) -> Result<LimitMTable> {
    if m_list.is_empty() {
        return Err(Error::InvalidInput("m_list is empty".into()));
    }
    if let Some(&m) = m_list.iter().find(|&&m| m < 3) {
        return Err(Error::InvalidInput(format!("m must be at least 3, got {m}")));
    }
    for &m in m_list {
        let n = n_rule.rows_for(m);
        let b = binomial(n as u64, m as u64);
        if b > SUBSET_BUDGET {
            return Err(Error::BudgetExceeded(format!("binom({n}, {m}) = {b} exceeds {SUBSET_BUDGET}")));
        }
    }
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let n = n_rule.rows_for(m);
        let s = sample_conditions(&RunConfig::new(m, n, trials, seed).with_workers(workers))?;
        let logs: Vec<f64> = s.finite().map(f64::ln).collect();
        let (mean_log, mean_log_stderr) = mean_stderr(&logs);
        rows.push(LimitMRow {
            m,
            n,
            mean_log,
            mean_log_stderr,
            mean_log_per_m: mean_log / m as f64,
            mean_log_per_m_stderr: mean_log_stderr / m as f64,
            ill_posed: s.ill_posed,
        });
    }
    Ok(LimitMTable { n_rule, trials, seed, rows })
}
