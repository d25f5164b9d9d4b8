//! Survival curves of `C(A)` and the log-scale decay slope.

use serde::{Deserialize, Serialize};

use super::output::{fmt_f64, fmt_opt, Tabular};
use super::stats::{weighted_slope, wilson_interval, Z99};
use super::{sample_conditions, ConditionSamples, RunConfig};
use crate::bounds::upper_tail_bound;
use crate::error::{Error, Result};

/// Exceedances needed at a grid point before it enters the slope fit.
pub const MIN_EXCEEDANCES: u64 = 50;
/// Grid points needed for a slope fit.
pub const MIN_SLOPE_POINTS: usize = 4;

/// Empirical `P[C >= t]` on a grid of thresholds (in units of `C`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub config: RunConfig,
    pub t_grid: Vec<f64>,
    pub trials: u64,
    pub exceedances: Vec<u64>,
    pub survival: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    /// Clamped upper bound per threshold; absent when `m < 3` or `n < m`.
    pub upper_envelope: Option<Vec<f64>>,
    pub t_times_p: Vec<f64>,
    pub ill_posed: u64,
    pub aborted: u64,
}

impl TailCurve {
    /// Builds the curve from per-trial condition numbers (`inf` counts as
    /// exceeding every threshold).
    pub fn from_samples(config: &RunConfig, samples: &ConditionSamples) -> Result<Self> {
        let mut sorted = samples.values.clone();
        sorted.sort_by(f64::total_cmp);
        let total = sorted.len() as u64;
        let exceedances: Vec<u64> = config
            .t_grid
            .iter()
            .map(|&t| total - sorted.partition_point(|&c| c < t) as u64)
            .collect();
        let mut curve = Self::from_counts(config, &exceedances, total)?;
        curve.ill_posed = samples.ill_posed;
        curve.aborted = samples.aborted;
        Ok(curve)
    }

    /// Builds the curve from exceedance counts out of `trials`.
    pub fn from_counts(config: &RunConfig, exceedances: &[u64], trials: u64) -> Result<Self> {
        let survival: Vec<f64> = exceedances.iter().map(|&k| k as f64 / trials.max(1) as f64).collect();
        let mut curve = Self::from_survival(config, survival, trials)?;
        curve.exceedances = exceedances.to_vec();
        Ok(curve)
    }

    /// A curve with a prescribed survival column, as if observed over
    /// `trials` trials.
    pub fn from_survival(config: &RunConfig, survival: Vec<f64>, trials: u64) -> Result<Self> {
        let t_grid = config.t_grid.clone();
        if survival.len() != t_grid.len() {
            return Err(Error::InvalidInput("survival and t_grid lengths differ".into()));
        }
        let exceedances: Vec<u64> = survival.iter().map(|p| (p * trials as f64).round() as u64).collect();
        let (ci_low, ci_high) = exceedances.iter().map(|&k| wilson_interval(k, trials, Z99)).unzip();
        let upper_envelope = if config.m >= 3 && config.n >= config.m {
            Some(
                t_grid
                    .iter()
                    .map(|&t| upper_tail_bound(config.m, config.n, t).map(|b| b.value()))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        let t_times_p = t_grid.iter().zip(&survival).map(|(t, p)| t * p).collect();
        Ok(TailCurve {
            config: config.clone(),
            t_grid,
            trials,
            exceedances,
            survival,
            ci_low,
            ci_high,
            upper_envelope,
            t_times_p,
            ill_posed: 0,
            aborted: 0,
        })
    }

    /// `(t, P)` pairs for plotting.
    pub fn gnuplot(&self) -> String {
        let mut s = String::from("# t survival\n");
        for (t, p) in self.t_grid.iter().zip(&self.survival) {
            s.push_str(&format!("{} {}\n", fmt_f64(*t), fmt_f64(*p)));
        }
        s
    }
}

impl Tabular for TailCurve {
    fn config(&self) -> serde_json::Value {
        serde_json::to_value(&self.config).expect("config serializes")
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["t", "exceedances", "survival", "ci_low", "ci_high", "upper_envelope", "t_times_p"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        (0..self.t_grid.len())
            .map(|i| {
                vec![
                    fmt_f64(self.t_grid[i]),
                    self.exceedances[i].to_string(),
                    fmt_f64(self.survival[i]),
                    fmt_f64(self.ci_low[i]),
                    fmt_f64(self.ci_high[i]),
                    fmt_opt(self.upper_envelope.as_ref().map(|e| e[i])),
                    fmt_f64(self.t_times_p[i]),
                ]
            })
            .collect()
    }
}

pub fn tail_experiment(cfg: &RunConfig) -> Result<TailCurve> {
    if cfg.t_grid.is_empty() {
        return Err(Error::InvalidInput("t_grid is empty".into()));
    }
    let samples = sample_conditions(cfg)?;
    TailCurve::from_samples(cfg, &samples)
}

/// Slope of `ln P[log C >= s]` against `s` over grid points with
/// `s = ln t` in `[s_min, s_max]`, weighted by the delta-method inverse
/// variance `N p / (1 - p)`. Returns `(slope, stderr)`.
pub fn decay_slope(curve: &TailCurve, s_min: f64, s_max: f64) -> Result<(f64, f64)> {
    let n = curve.trials as f64;
    let (mut x, mut y, mut w) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..curve.t_grid.len() {
        let s = curve.t_grid[i].ln();
        let p = curve.survival[i];
        if s < s_min || s > s_max || curve.exceedances[i] < MIN_EXCEEDANCES || p >= 1.0 {
            continue;
        }
        x.push(s);
        y.push(p.ln());
        w.push(n * p / (1.0 - p));
    }
    if x.len() < MIN_SLOPE_POINTS {
        return Err(Error::InsufficientTailData(format!(
            "{} grid points in [{s_min}, {s_max}] have at least {MIN_EXCEEDANCES} exceedances, need {MIN_SLOPE_POINTS}",
            x.len()
        )));
    }
    Ok(weighted_slope(&x, &y, &w))
}

/// Thresholds `e^s` for `points` values of `s` evenly spaced on `[s_min, s_max]`.
pub fn log_grid(s_min: f64, s_max: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|k| (s_min + (s_max - s_min) * k as f64 / (points - 1) as f64).exp())
        .collect()
}
