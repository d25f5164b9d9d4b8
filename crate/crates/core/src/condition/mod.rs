//! Feasibility classification and the condition number `C(A) = 1/|cos theta(A)|`.
//!
//! Two phases. The feasible side is settled by the minimum-norm point of the
//! rows: a positive distance `d` gives `C(A) = 1/d` with the convex weights
//! as certificate. Otherwise the largest empty cap is the best candidate cap
//! through m rows (see [`facets`]).

pub mod facets;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::Result;
use crate::linalg::{dot, subset_solve, SubsetSolve};
use crate::matrix::UnitRowMatrix;
use crate::minnorm::min_norm_point_flat;
use crate::oracle::theta_oracle_grid;
use crate::sphere::{Angle, Cap, CONTAINMENT_TOL};

use facets::{Candidates, SearchStats, Walk};

/// Min-norm distance separating strict feasibility from the rest.
pub const EPS_FEAS: f64 = 1e-9;
/// `|cos theta|` below this is reported as numerically ill-posed.
pub const EPS_ILL_POSED: f64 = 1e-9;
/// Rows within this of the witness boundary form the blocking set.
pub const BOUNDARY_TOL: f64 = 1e-8;
const TIE_TOL: f64 = 1e-12;
/// Grid budget used by [`verify_report`].
pub const VERIFY_GRID_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeasibilityClass {
    StrictlyFeasible,
    Infeasible,
    IllPosedNumerical,
}

impl fmt::Display for FeasibilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FeasibilityClass::StrictlyFeasible => "StrictlyFeasible",
            FeasibilityClass::Infeasible => "Infeasible",
            FeasibilityClass::IllPosedNumerical => "IllPosedNumerical",
        };
        f.write_str(s)
    }
}

/// A condition number; serialized as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Condition {
    Finite(f64),
    Infinite,
}

impl Condition {
    pub fn finite(self) -> Option<f64> {
        match self {
            Condition::Finite(c) => Some(c),
            Condition::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Condition::Infinite)
    }

    /// `f64::INFINITY` for the infinite case.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Condition::Finite(c) => s.serialize_f64(*c),
            Condition::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Condition;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Condition, E> {
                Ok(Condition::Finite(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Condition, E> {
                Ok(Condition::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Condition, E> {
                Ok(Condition::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Condition, E> {
                if v == "inf" {
                    Ok(Condition::Infinite)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Which Phase-I search ran, plus counters. Not serialized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub phase_i: Option<PhaseIPath>,
    pub subsets_examined: usize,
    pub singular_subsets: usize,
    pub wolfe_cycles: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseIPath {
    Walk,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub class: FeasibilityClass,
    pub theta: Angle,
    pub cond: Condition,
    /// The largest empty cap: center maximizes the minimum row angle, radius
    /// is `theta`.
    pub witness: Cap,
    pub blocking_set: Option<Vec<usize>>,
    pub certificate: Option<Vec<f64>>,
    #[serde(skip)]
    pub diagnostics: Diagnostics,
}

/// How Phase I finds its candidates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PhaseIStrategy {
    /// Vertex walk, falling back to the full scan on degenerate input.
    #[default]
    Auto,
    /// Every m-subset in lexicographic order.
    Exhaustive,
}

pub fn classify_and_condition(a: &UnitRowMatrix) -> Result<ConditionReport> {
    classify_with(a, PhaseIStrategy::Auto)
}

pub fn classify_with(a: &UnitRowMatrix, strategy: PhaseIStrategy) -> Result<ConditionReport> {
    let mn = min_norm_point_flat(a.m(), a.as_flat())?;
    let mut diagnostics = Diagnostics { wolfe_cycles: mn.major_cycles, ..Default::default() };
    if mn.distance > EPS_FEAS {
        let q = mn.direction.expect("distance above the direction threshold");
        let center: Vec<f64> = q.iter().map(|x| -x).collect();
        let theta = Angle::new(PI - mn.distance.min(1.0).acos())?;
        return Ok(ConditionReport {
            class: FeasibilityClass::StrictlyFeasible,
            theta,
            cond: Condition::Finite(1.0 / mn.distance),
            witness: Cap { center, radius: theta },
            blocking_set: None,
            certificate: Some(mn.weights),
            diagnostics,
        });
    }

    let mut stats = SearchStats::default();
    let candidates = match strategy {
        PhaseIStrategy::Exhaustive => {
            diagnostics.phase_i = Some(PhaseIPath::Exhaustive);
            facets::exhaustive(a, &mut stats)?
        }
        PhaseIStrategy::Auto => match facets::walk(a, &mut stats)? {
            Walk::Done(c) => {
                diagnostics.phase_i = Some(PhaseIPath::Walk);
                c
            }
            Walk::Degenerate => {
                diagnostics.phase_i = Some(PhaseIPath::Exhaustive);
                facets::exhaustive(a, &mut stats)?
            }
        },
    };
    diagnostics.subsets_examined = stats.subsets_examined;
    diagnostics.singular_subsets = stats.singular_subsets;

    let caps = match candidates {
        Candidates::WeakDirection(x) => return Ok(ill_posed(x, diagnostics)),
        Candidates::Caps(c) => c,
    };
    let Some(best) = best_candidate(&caps) else {
        // a bounded polar polytope always has a vertex; reaching this means
        // every candidate was rejected numerically
        let (_, x) = crate::oracle::theta_oracle_grid_point(a, 10_000)?;
        return Ok(ill_posed(x, diagnostics));
    };
    let cos_theta = 1.0 / best.norm_u;
    if cos_theta < EPS_ILL_POSED {
        return Ok(ill_posed(best.center.clone(), diagnostics));
    }
    let theta = best.candidate_radius.expect("accepted candidates have a radius");
    let blocking = a
        .rows()
        .enumerate()
        .filter(|(_, r)| (dot(r, &best.center) - cos_theta).abs() <= BOUNDARY_TOL)
        .map(|(i, _)| i)
        .collect();
    Ok(ConditionReport {
        class: FeasibilityClass::Infeasible,
        theta,
        cond: Condition::Finite(best.norm_u),
        witness: Cap { center: best.center.clone(), radius: theta },
        blocking_set: Some(blocking),
        certificate: None,
        diagnostics,
    })
}

/// Largest radius; near-ties keep the lexicographically smallest subset.
/// `caps` must be in lexicographic subset order.
fn best_candidate(caps: &[SubsetSolve]) -> Option<&SubsetSolve> {
    let mut best: Option<&SubsetSolve> = None;
    for c in caps {
        let r = c.candidate_radius.map_or(f64::NEG_INFINITY, Angle::value);
        match best {
            Some(b) if r <= b.candidate_radius.map_or(f64::NEG_INFINITY, Angle::value) + TIE_TOL => {}
            _ => best = Some(c),
        }
    }
    best
}

fn ill_posed(x: Vec<f64>, diagnostics: Diagnostics) -> ConditionReport {
    ConditionReport {
        class: FeasibilityClass::IllPosedNumerical,
        theta: Angle::RIGHT,
        cond: Condition::Infinite,
        witness: Cap { center: x, radius: Angle::RIGHT },
        blocking_set: None,
        certificate: None,
        diagnostics,
    }
}

fn for_each_subset(set: &[usize], k: usize, limit: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if set.len() < k {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut count = 0;
    loop {
        let pick: Vec<usize> = idx.iter().map(|&i| set[i]).collect();
        if !f(&pick) {
            return;
        }
        count += 1;
        if count >= limit {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < set.len() - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Independent consistency checks of a report against its matrix.
pub fn verify_report(a: &UnitRowMatrix, r: &ConditionReport) -> bool {
    verify_report_with_budget(a, r, VERIFY_GRID_BUDGET)
}

pub fn verify_report_with_budget(a: &UnitRowMatrix, r: &ConditionReport, budget: usize) -> bool {
    let m = a.m();
    let theta = r.theta.value();
    if r.witness.center.len() != m || (crate::linalg::norm(&r.witness.center) - 1.0).abs() > 1e-9 {
        return false;
    }
    if (r.witness.radius.value() - theta).abs() > 1e-12 {
        return false;
    }
    // (a) empty interior
    let c = r.witness.radius.cos();
    if a.rows().any(|row| dot(row, &r.witness.center) > c + CONTAINMENT_TOL) {
        return false;
    }
    match (r.class, r.cond) {
        (FeasibilityClass::IllPosedNumerical, Condition::Infinite) => {}
        (FeasibilityClass::IllPosedNumerical, _) | (_, Condition::Infinite) => return false,
        (_, Condition::Finite(k)) => {
            if !(k >= 1.0 - 1e-12) || (k * theta.cos().abs() - 1.0).abs() > 1e-9 {
                return false;
            }
        }
    }
    match r.class {
        FeasibilityClass::StrictlyFeasible => {
            if theta <= FRAC_PI_2 {
                return false;
            }
            // (c) every row makes angle >= theta with the center
            let worst = a
                .rows()
                .map(|row| -dot(row, &r.witness.center))
                .fold(f64::INFINITY, f64::min);
            if worst < (PI - theta).cos() - 1e-8 {
                return false;
            }
        }
        FeasibilityClass::Infeasible => {
            if theta >= FRAC_PI_2 {
                return false;
            }
            // (b) every nonsingular m-subset of the blocking set pins the center
            let Some(blocking) = &r.blocking_set else {
                return false;
            };
            if blocking.len() < m || blocking.iter().any(|&i| i >= a.n()) {
                return false;
            }
            if blocking
                .iter()
                .any(|&i| (dot(a.row(i), &r.witness.center) - c).abs() > BOUNDARY_TOL)
            {
                return false;
            }
            let mut ok = true;
            let mut solved = 0;
            for_each_subset(blocking, m, 10_000, |s| {
                if let Ok(sol) = subset_solve(a, s) {
                    solved += 1;
                    let dist = sol
                        .center
                        .iter()
                        .zip(&r.witness.center)
                        .map(|(p, q)| (p - q).abs())
                        .fold(0.0, f64::max);
                    if dist > 1e-7 {
                        ok = false;
                        return false;
                    }
                }
                true
            });
            if !ok || solved == 0 {
                return false;
            }
        }
        FeasibilityClass::IllPosedNumerical => {}
    }
    // (d) brute-force lower estimate never exceeds the reported angle
    match theta_oracle_grid(a, budget) {
        Ok(t) => t.value() <= theta + 1e-3,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(degs: &[f64]) -> UnitRowMatrix {
        let rows: Vec<Vec<f64>> =
            degs.iter().map(|d| vec![d.to_radians().cos(), d.to_radians().sin()]).collect();
        UnitRowMatrix::normalize_rows(2, &rows).unwrap()
    }

    fn identity(m: usize) -> UnitRowMatrix {
        let rows: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut v = vec![0.0; m];
                v[i] = 1.0;
                v
            })
            .collect();
        UnitRowMatrix::normalize_rows(m, &rows).unwrap()
    }

    #[test]
    fn identity_is_strictly_feasible() {
        for m in 2..7 {
            let r = classify_and_condition(&identity(m)).unwrap();
            assert_eq!(r.class, FeasibilityClass::StrictlyFeasible);
            assert!((r.cond.finite().unwrap() - (m as f64).sqrt()).abs() < 1e-12);
            for w in r.certificate.as_ref().unwrap() {
                assert!((w - 1.0 / m as f64).abs() < 1e-12);
            }
            assert!(verify_report_with_budget(&identity(m), &r, 2000));
        }
    }

    #[test]
    fn triangle_is_infeasible() {
        let a = circle(&[0.0, 120.0, 240.0]);
        let r = classify_and_condition(&a).unwrap();
        assert_eq!(r.class, FeasibilityClass::Infeasible);
        assert!((r.theta.value() - PI / 3.0).abs() < 1e-12);
        assert!((r.cond.finite().unwrap() - 2.0).abs() < 1e-12);
        assert!(r.blocking_set.as_ref().unwrap().len() >= 2);
        assert!(verify_report(&a, &r));
        // near-ties resolve to the lexicographically first pair
        assert_eq!(r.blocking_set.as_ref().unwrap(), &vec![0, 1]);
        let ex = classify_with(&a, PhaseIStrategy::Exhaustive).unwrap();
        assert_eq!(ex.witness, r.witness);
    }

    #[test]
    fn boundary_case_is_ill_posed() {
        let a = UnitRowMatrix::normalize_rows(2, &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]])
            .unwrap();
        for s in [PhaseIStrategy::Auto, PhaseIStrategy::Exhaustive] {
            let r = classify_with(&a, s).unwrap();
            assert_eq!(r.class, FeasibilityClass::IllPosedNumerical);
            assert!(r.cond.is_infinite());
            assert!(verify_report_with_budget(&a, &r, 2000));
        }
    }

    #[test]
    fn single_row() {
        let a = UnitRowMatrix::normalize_rows(3, &[vec![0.0, 0.6, 0.8]]).unwrap();
        let r = classify_and_condition(&a).unwrap();
        assert_eq!(r.class, FeasibilityClass::StrictlyFeasible);
        assert!((r.cond.finite().unwrap() - 1.0).abs() < 1e-15);
        assert!((r.theta.value() - PI).abs() < 1e-7);
    }

    #[test]
    fn few_rows_through_origin_hull_is_unsupported() {
        let a = UnitRowMatrix::normalize_rows(3, &[vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(classify_and_condition(&a), Err(crate::Error::Unsupported(_))));
    }

    #[test]
    fn tampered_reports_fail_verification() {
        let a = circle(&[0.0, 120.0, 240.0]);
        let r = classify_and_condition(&a).unwrap();
        let mut inflated = r.clone();
        inflated.witness.radius = Angle::new(r.theta.value() + 0.05).unwrap();
        inflated.theta = inflated.witness.radius;
        inflated.cond = Condition::Finite(1.0 / inflated.theta.cos());
        assert!(!verify_report_with_budget(&a, &inflated, 2000));
        let mut moved = r.clone();
        let t = 0.3f64;
        let (c, s) = (t.cos(), t.sin());
        let p = &r.witness.center;
        moved.witness.center = vec![c * p[0] - s * p[1], s * p[0] + c * p[1]];
        assert!(!verify_report_with_budget(&a, &moved, 2000));
        let mut lying = r.clone();
        lying.cond = Condition::Finite(3.0);
        assert!(!verify_report_with_budget(&a, &lying, 2000));
    }

    #[test]
    fn json_layout() {
        let r = classify_and_condition(&identity(2)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["blocking_set", "certificate", "class", "cond", "theta", "witness"]);
        assert_eq!(v["class"], "StrictlyFeasible");
        let a = UnitRowMatrix::normalize_rows(2, &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]])
            .unwrap();
        let r = classify_and_condition(&a).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains(r#""cond":"inf""#));
        let back: ConditionReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.cond, Condition::Infinite);
    }
}
