//! Perceptron iteration counts against `ceil(C(A)^2)` on strictly feasible
//! systems drawn by rejection.

use serde::{Deserialize, Serialize};

use super::output::{fmt_f64, Tabular};
use super::run_indexed;
use super::sampling::{sample_uniform_rows, trial_rng};
use crate::condition::{classify_and_condition, FeasibilityClass};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::matrix::UnitRowMatrix;
use crate::perceptron::{cond_bound, default_cap, perceptron_solve, SelectionRule, Termination};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub trial: u64,
    /// Systems drawn until one was strictly feasible.
    pub draws: u64,
    pub cond: f64,
    pub bound: u64,
    pub iterations_first: u64,
    pub iterations_max: u64,
    /// Both runs solved and both solutions satisfy every row strictly.
    pub solutions_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronBenchmark {
    pub m: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub total_draws: u64,
    pub acceptance_rate: f64,
    pub violations_first: u64,
    pub violations_max: u64,
    pub bad_solutions: u64,
    pub rows: Vec<BenchRow>,
}

impl Tabular for PerceptronBenchmark {
    fn config(&self) -> serde_json::Value {
        serde_json::json!({ "m": self.m, "n": self.n, "trials": self.trials, "seed": self.seed })
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["trial", "draws", "cond", "bound", "iterations_first", "iterations_max", "solutions_ok"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.trial.to_string(),
                    r.draws.to_string(),
                    fmt_f64(r.cond),
                    r.bound.to_string(),
                    r.iterations_first.to_string(),
                    r.iterations_max.to_string(),
                    r.solutions_ok.to_string(),
                ]
            })
            .collect()
    }
}

fn strictly_solves(a: &UnitRowMatrix, x: &[f64]) -> bool {
    a.rows().all(|r| dot(r, x) < 0.0)
}

fn bench_trial(m: usize, n: usize, seed: u64, i: u64, max_draws: u64) -> Result<BenchRow> {
    let mut rng = trial_rng(seed, i);
    let mut draws = 0u64;
    let (a, cond) = loop {
        if draws >= max_draws {
            return Err(Error::BudgetExceeded(format!("trial {i} drew {draws} systems without a strictly feasible one")));
        }
        draws += 1;
        let a = sample_uniform_rows(m, n, &mut rng);
        let r = classify_and_condition(&a)?;
        if r.class == FeasibilityClass::StrictlyFeasible {
            break (a, r.cond.as_f64());
        }
    };
    let cap = default_cap(Some(cond));
    let first = perceptron_solve(&a, cap, SelectionRule::FirstViolated);
    let max = perceptron_solve(&a, cap, SelectionRule::MaxViolation);
    let ok = |t: &crate::perceptron::PerceptronTrace| {
        t.terminated == Termination::Solved && t.solution.as_deref().is_some_and(|x| strictly_solves(&a, x))
    };
    Ok(BenchRow {
        trial: i,
        draws,
        cond,
        bound: cond_bound(cond),
        iterations_first: first.iterations,
        iterations_max: max.iterations,
        solutions_ok: ok(&first) && ok(&max),
    })
}

/// Runs both selection rules on `trials` strictly feasible systems. The
/// total number of systems drawn may not exceed `100 * trials`.
pub fn perceptron_benchmark(m: usize, n: usize, trials: u64, seed: u64, workers: usize) -> Result<PerceptronBenchmark> {
    if m < 2 || n < 1 || trials < 1 {
        return Err(Error::InvalidInput(format!("need m >= 2, n >= 1, trials >= 1; got m={m} n={n} trials={trials}")));
    }
    let budget = 100 * trials;
    let rows = run_indexed(workers, trials, |i| bench_trial(m, n, seed, i, budget))?
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let total_draws: u64 = rows.iter().map(|r| r.draws).sum();
    if total_draws > budget {
        return Err(Error::BudgetExceeded(format!("{total_draws} draws for {trials} feasible systems")));
    }
    Ok(PerceptronBenchmark {
        m,
        n,
        trials,
        seed,
        total_draws,
        acceptance_rate: trials as f64 / total_draws as f64,
        violations_first: rows.iter().filter(|r| r.iterations_first > r.bound).count() as u64,
        violations_max: rows.iter().filter(|r| r.iterations_max > r.bound).count() as u64,
        bad_solutions: rows.iter().filter(|r| !r.solutions_ok).count() as u64,
        rows,
    })
}
