//! Relaxation (perceptron) solver for `A x < 0`, starting at the origin and
//! stepping `x <- x - a` along a violated row. On a strictly feasible system
//! with unit rows it stops within `C(A)^2` updates.

use serde::{Deserialize, Serialize};

use crate::linalg::dot;
use crate::matrix::UnitRowMatrix;

pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionRule {
    /// First violated row in index order.
    #[default]
    FirstViolated,
    /// Row with the largest `a . x`; ties go to the lowest index.
    MaxViolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Solved,
    IterationCapReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronTrace {
    pub iterations: u64,
    pub terminated: Termination,
    pub solution: Option<Vec<f64>>,
    /// `ceil(C(A)^2)` when a condition number was supplied.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<u64>,
}

/// Cap used when only the condition number is known.
pub fn default_cap(cond: Option<f64>) -> u64 {
    match cond {
        Some(c) if c.is_finite() => {
            let b = (c * c).ceil();
            if b >= (u64::MAX / 20) as f64 {
                u64::MAX / 2
            } else {
                DEFAULT_CAP.max(10 * b as u64)
            }
        }
        _ => DEFAULT_CAP,
    }
}

/// `ceil(C^2)`, ignoring a few ulps of rounding in `C^2`.
pub fn cond_bound(cond: f64) -> u64 {
    let b = (cond * cond * (1.0 - 8.0 * f64::EPSILON)).ceil();
    if b >= u64::MAX as f64 {
        u64::MAX
    } else {
        b as u64
    }
}

pub fn perceptron_solve(a: &UnitRowMatrix, cap: u64, rule: SelectionRule) -> PerceptronTrace {
    let mut x = vec![0.0; a.m()];
    let mut iterations = 0u64;
    loop {
        let pick = match rule {
            SelectionRule::FirstViolated => a.rows().position(|r| dot(r, &x) >= 0.0),
            SelectionRule::MaxViolation => {
                let mut best: Option<(usize, f64)> = None;
                for (i, r) in a.rows().enumerate() {
                    let v = dot(r, &x);
                    if v >= 0.0 && best.is_none_or(|(_, b)| v > b) {
                        best = Some((i, v));
                    }
                }
                best.map(|(i, _)| i)
            }
        };
        let Some(i) = pick else {
            return PerceptronTrace {
                iterations,
                terminated: Termination::Solved,
                solution: Some(x),
                bound: None,
            };
        };
        if iterations >= cap {
            return PerceptronTrace {
                iterations,
                terminated: Termination::IterationCapReached,
                solution: None,
                bound: None,
            };
        }
        for (xj, aj) in x.iter_mut().zip(a.row(i)) {
            *xj -= aj;
        }
        iterations += 1;
    }
}
