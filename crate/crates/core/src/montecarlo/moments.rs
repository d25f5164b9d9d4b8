//! Sample moments of `log C(A)` and `C(A)` with the matching bounds.

use serde::{Deserialize, Serialize};

use super::output::{fmt_f64, fmt_opt, Tabular};
use super::stats::{mean_stderr, sample_variance};
use super::{sample_conditions, RunConfig};
use crate::bounds::{moment_bound_cori, moment_bound_estimates, moment_bound_polycor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentOf {
    #[serde(rename = "logC")]
    LogC,
    C,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub gamma: f64,
    pub mean: f64,
    pub stderr: f64,
    pub variance: f64,
    /// `log C` only.
    pub bound_estimates: Option<f64>,
    /// `log C` with `gamma >= 1` only.
    pub bound_polycor: Option<f64>,
    /// `C` only.
    pub bound_cori: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub config: RunConfig,
    pub of: MomentOf,
    /// Trials left out of the means for being ill-posed.
    pub excluded_ill_posed: u64,
    pub rows: Vec<MomentEstimate>,
}

impl Tabular for MomentTable {
    fn config(&self) -> serde_json::Value {
        serde_json::json!({ "run": self.config, "of": self.of })
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["gamma", "mean", "stderr", "variance", "bound_estimates", "bound_polycor", "bound_cori"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    fmt_f64(r.gamma),
                    fmt_f64(r.mean),
                    fmt_f64(r.stderr),
                    fmt_f64(r.variance),
                    fmt_opt(r.bound_estimates),
                    fmt_opt(r.bound_polycor),
                    fmt_opt(r.bound_cori),
                ]
            })
            .collect()
    }
}

/// Means of `(log C)^gamma` or `C^gamma` for each gamma in the config.
/// `C^gamma` with `gamma >= 1` has no finite mean and is refused.
pub fn moment_experiment(cfg: &RunConfig, of: MomentOf) -> Result<MomentTable> {
    if cfg.gamma_list.is_empty() {
        return Err(Error::InvalidInput("gamma_list is empty".into()));
    }
    if of == MomentOf::C {
        if let Some(&g) = cfg.gamma_list.iter().find(|&&g| g >= 1.0) {
            return Err(Error::MomentDivergent { gamma: g });
        }
    }
    let samples = sample_conditions(cfg)?;
    let finite: Vec<f64> = samples.finite().collect();
    let rows = cfg
        .gamma_list
        .iter()
        .map(|&g| {
            let xs: Vec<f64> = match of {
                MomentOf::LogC => finite.iter().map(|c| c.ln().powf(g)).collect(),
                MomentOf::C => finite.iter().map(|c| c.powf(g)).collect(),
            };
            let (mean, stderr) = mean_stderr(&xs);
            let (bound_estimates, bound_polycor, bound_cori) = match of {
                MomentOf::LogC => (
                    moment_bound_estimates(cfg.m, cfg.n, g).ok(),
                    moment_bound_polycor(cfg.m, cfg.n, g).ok(),
                    None,
                ),
                MomentOf::C => (None, None, moment_bound_cori(cfg.m, cfg.n, g).ok()),
            };
            MomentEstimate { gamma: g, mean, stderr, variance: sample_variance(&xs), bound_estimates, bound_polycor, bound_cori }
        })
        .collect();
    Ok(MomentTable { config: cfg.clone(), of, excluded_ill_posed: samples.ill_posed, rows })
}
