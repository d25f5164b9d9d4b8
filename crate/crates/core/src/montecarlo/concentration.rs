//! Mass of the cap `cap(e_1, arccos e^{-m^gamma})`, exact and sampled.

use serde::{Deserialize, Serialize};

use super::output::{fmt_f64, fmt_opt, Tabular};
use super::sampling::{trial_rng, unit_vector};
use super::stats::{wilson_interval, Z99};
use crate::error::{Error, Result};
use crate::sphere::concentration_ratio;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub samples: u64,
    pub hits: u64,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// The exact ratio lies inside the interval.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub m: usize,
    pub gamma: f64,
    pub ratio: f64,
    pub empirical: Option<Empirical>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationTable {
    pub gamma_list: Vec<f64>,
    pub m_list: Vec<usize>,
    pub samples: Option<u64>,
    pub seed: u64,
    pub rows: Vec<ConcentrationRow>,
}

impl Tabular for ConcentrationTable {
    fn config(&self) -> serde_json::Value {
        serde_json::json!({
            "gamma_list": self.gamma_list,
            "m_list": self.m_list,
            "samples": self.samples,
            "seed": self.seed,
        })
    }

    fn header(&self) -> Vec<&'static str> {
        vec!["m", "gamma", "ratio", "empirical", "ci_low", "ci_high"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.m.to_string(),
                    fmt_f64(r.gamma),
                    fmt_f64(r.ratio),
                    fmt_opt(r.empirical.map(|e| e.frequency)),
                    fmt_opt(r.empirical.map(|e| e.ci_low)),
                    fmt_opt(r.empirical.map(|e| e.ci_high)),
                ]
            })
            .collect()
    }
}

/// Rows ordered by gamma, then m. With `samples`, each row also gets the
/// fraction of that many uniform points falling inside the cap.
pub fn concentration_table(gamma_list: &[f64], m_list: &[usize], samples: Option<u64>, seed: u64) -> Result<ConcentrationTable> {
    if gamma_list.is_empty() || m_list.is_empty() {
        return Err(Error::InvalidInput("gamma_list and m_list must be nonempty".into()));
    }
    let mut rows = Vec::new();
    for (gi, &gamma) in gamma_list.iter().enumerate() {
        for &m in m_list {
            let ratio = concentration_ratio(m, gamma)?;
            let empirical = samples.map(|s| {
                let h = (-(m as f64).powf(gamma)).exp();
                let mut rng = trial_rng(seed, ((gi as u64) << 32) ^ m as u64);
                let hits = (0..s).filter(|_| unit_vector(&mut rng, m)[0] >= h).count() as u64;
                let (ci_low, ci_high) = wilson_interval(hits, s, Z99);
                Empirical {
                    samples: s,
                    hits,
                    frequency: hits as f64 / s as f64,
                    ci_low,
                    ci_high,
                    consistent: ci_low <= ratio && ratio <= ci_high,
                }
            });
            rows.push(ConcentrationRow { m, gamma, ratio, empirical });
        }
    }
    Ok(ConcentrationTable { gamma_list: gamma_list.to_vec(), m_list: m_list.to_vec(), samples, seed, rows })
}
