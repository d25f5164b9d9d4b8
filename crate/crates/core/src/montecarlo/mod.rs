//! Seeded experiments under the uniform row model.
//!
//! Trial `i` draws its randomness from [`sampling::trial_rng`]`(seed, i)`, so
//! results never depend on how trials are spread across workers. Per-trial
//! outcomes are collected in index order and reduced sequentially.

pub mod bench;
pub mod concentration;
pub mod lemma;
pub mod limits;
pub mod moments;
pub mod output;
pub mod sampling;
pub mod stats;
pub mod tail;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::{classify_and_condition, FeasibilityClass};
use crate::error::{Error, Result};

pub use bench::{perceptron_benchmark, PerceptronBenchmark};
pub use concentration::{concentration_table, ConcentrationRow, ConcentrationTable};
pub use lemma::{lemma_iv_experiment, LemmaIvResult};
pub use limits::{limit_experiment_m, limit_experiment_n, LimitMTable, LimitNTable, NRule};
pub use moments::{moment_experiment, MomentEstimate, MomentOf, MomentTable};
pub use sampling::sample_uniform_rows;
pub use tail::{decay_slope, tail_experiment, TailCurve};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_c0de;
/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CONIC_WORKERS";
/// Largest tolerated fraction of aborted trials.
pub const MAX_ABORT_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub m: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    pub gamma_list: Vec<f64>,
    /// Execution detail only; left out of serialized output so tables are
    /// byte-identical across worker counts.
    #[serde(skip, default = "default_workers")]
    pub workers: usize,
}

/// Worker count from `CONIC_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
}

impl RunConfig {
    pub fn new(m: usize, n: usize, trials: u64, seed: u64) -> Self {
        RunConfig { m, n, trials, seed, t_grid: Vec::new(), gamma_list: Vec::new(), workers: default_workers() }
    }

    pub fn with_t_grid(mut self, t_grid: Vec<f64>) -> Self {
        self.t_grid = t_grid;
        self
    }

    pub fn with_gammas(mut self, gamma_list: Vec<f64>) -> Self {
        self.gamma_list = gamma_list;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidInput(format!("m must be at least 2, got {}", self.m)));
        }
        if self.n < 1 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.workers < 1 {
            return Err(Error::InvalidInput("workers must be at least 1".into()));
        }
        if self.t_grid.iter().any(|t| !(*t >= 1.0) || !t.is_finite()) {
            return Err(Error::InvalidInput("t_grid entries must be finite and at least 1".into()));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("t_grid must be strictly ascending".into()));
        }
        if self.gamma_list.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(Error::InvalidInput("gamma_list entries must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// Runs `f(0..trials)` on `workers` threads, returning results in index order.
pub fn run_indexed<T, F>(workers: usize, trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    if workers <= 1 {
        return Ok((0..trials).map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..trials).into_par_iter().map(&f).collect()))
}

/// The condition numbers of `trials` sampled systems.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSamples {
    /// `C(A)` per trial in index order; ill-posed trials are `inf`, aborted
    /// trials are left out.
    pub values: Vec<f64>,
    pub classes: Vec<FeasibilityClass>,
    pub ill_posed: u64,
    pub aborted: u64,
}

impl ConditionSamples {
    pub fn finite(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied().filter(|v| v.is_finite())
    }
}

/// Samples `cfg.trials` systems of `n` rows in `R^m` and conditions each.
/// Fails when more than [`MAX_ABORT_FRACTION`] of the trials abort.
pub fn sample_conditions(cfg: &RunConfig) -> Result<ConditionSamples> {
    cfg.validate()?;
    let (m, n, seed) = (cfg.m, cfg.n, cfg.seed);
    let outcomes = run_indexed(cfg.workers, cfg.trials, |i| {
        let mut rng = sampling::trial_rng(seed, i);
        let a = sample_uniform_rows(m, n, &mut rng);
        classify_and_condition(&a).map(|r| (r.class, r.cond.as_f64()))
    })?;
    let mut out = ConditionSamples { values: Vec::new(), classes: Vec::new(), ill_posed: 0, aborted: 0 };
    let mut first_error = None;
    for o in outcomes {
        match o {
            Ok((class, c)) => {
                if class == FeasibilityClass::IllPosedNumerical {
                    out.ill_posed += 1;
                }
                out.values.push(c);
                out.classes.push(class);
            }
            Err(e) => {
                out.aborted += 1;
                first_error.get_or_insert(e);
            }
        }
    }
    if out.aborted as f64 > MAX_ABORT_FRACTION * cfg.trials as f64 {
        return Err(first_error.expect("aborted trials carry an error"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = RunConfig::new(3, 6, 10, 1).with_t_grid(vec![1.0, 2.0]).with_workers(1);
        assert!(ok.validate().is_ok());
        assert!(ok.clone().with_t_grid(vec![2.0, 2.0]).validate().is_err());
        assert!(ok.clone().with_t_grid(vec![0.5]).validate().is_err());
        assert!(ok.clone().with_gammas(vec![-1.0]).validate().is_err());
        assert!(ok.clone().with_workers(0).validate().is_err());
        assert!(RunConfig::new(1, 6, 10, 1).validate().is_err());
    }

    #[test]
    fn indexed_order_is_kept() {
        let v = run_indexed(3, 1000, |i| i * i).unwrap();
        assert!(v.iter().enumerate().all(|(i, &x)| x == (i * i) as u64));
    }

    #[test]
    fn workers_do_not_change_samples() {
        let cfg = RunConfig::new(3, 6, 300, 9);
        let a = sample_conditions(&cfg.clone().with_workers(1)).unwrap();
        let b = sample_conditions(&cfg.with_workers(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.values.iter().all(|&c| c >= 1.0));
    }
}
