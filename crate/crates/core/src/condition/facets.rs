//! Enumeration of the extremal-cap candidates for an infeasible system.
//!
//! A cap through the rows of an m-subset `S` with center `u_S/|u_S|` and
//! `cos rho = 1/|u_S|` is empty exactly when `a_i . u_S <= 1` for every row,
//! i.e. when `u_S` is a vertex of the polar polytope `{u : A u <= 1}`. The
//! walk below visits those vertices along polytope edges; the exhaustive scan
//! tests every m-subset. On inputs in general position both return the same
//! candidate set.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::linalg::{dot, gram_schmidt_basis, norm, subset_solve, SubsetSolve};
use crate::matrix::UnitRowMatrix;
use crate::sphere::CONTAINMENT_TOL;

const RATIO_TIE: f64 = 1e-9;
const ON_FACET: f64 = 1e-9;
const RAY_TOL: f64 = 1e-9;
const MAX_VERTICES: usize = 5_000_000;

/// What the candidate search found.
#[derive(Debug, Clone)]
pub enum Candidates {
    /// Accepted candidate solves, in lexicographic subset order.
    Caps(Vec<SubsetSolve>),
    /// A unit `x != 0` with `A x <= 0` up to tolerance: the system is
    /// feasible but not strictly (given the min-norm distance is ~0).
    WeakDirection(Vec<f64>),
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    pub subsets_examined: usize,
    pub singular_subsets: usize,
}

/// Candidate acceptance: real radius below `pi/2` and no row strictly
/// inside the cap.
pub(crate) fn accepts(a: &UnitRowMatrix, s: &SubsetSolve) -> bool {
    let Some(r) = s.candidate_radius else {
        return false;
    };
    if !(s.norm_u > 1.0) {
        return false;
    }
    let c = r.cos();
    a.rows().all(|row| dot(row, &s.center) <= c + CONTAINMENT_TOL)
}

/// Rank deficiency check: a unit vector orthogonal to every row, if any.
pub(crate) fn null_direction(a: &UnitRowMatrix) -> Option<Vec<f64>> {
    let m = a.m();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in a.rows() {
        let mut cand = basis.clone();
        cand.push(row.to_vec());
        if let Ok(b) = gram_schmidt_basis(&cand) {
            basis = b;
            if basis.len() == m {
                return None;
            }
        }
    }
    complement_direction(m, &basis)
}

/// Unit vector orthogonal to an orthonormal set of fewer than `m` vectors.
fn complement_direction(m: usize, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    (0..m)
        .map(|k| {
            let mut e = vec![0.0; m];
            e[k] = 1.0;
            for b in basis {
                let c = dot(&e, b);
                e.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            e
        })
        .max_by(|p, q| norm(p).total_cmp(&norm(q)))
        .filter(|e| norm(e) > 1e-6)
        .map(|e| {
            let n = norm(&e);
            e.into_iter().map(|x| x / n).collect()
        })
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn all_one_side(a: &UnitRowMatrix, v: &[f64]) -> Option<Vec<f64>> {
    let (lo, hi) = a
        .rows()
        .map(|r| dot(r, v))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), d| (l.min(d), h.max(d)));
    if hi <= RAY_TOL {
        Some(v.to_vec())
    } else if lo >= -RAY_TOL {
        Some(v.iter().map(|x| -x).collect())
    } else {
        None
    }
}

/// Exhaustive search: extreme rays of `{x : A x <= 0}` through every
/// (m-1)-subset, then every m-subset in lexicographic order.
pub fn exhaustive(a: &UnitRowMatrix, stats: &mut SearchStats) -> Result<Candidates> {
    let (m, n) = (a.m(), a.n());
    if n < m {
        return Err(Error::Unsupported(format!(
            "infeasible-side enumeration needs n >= m (n = {n}, m = {m})"
        )));
    }
    if let Some(v) = null_direction(a) {
        return Ok(Candidates::WeakDirection(v));
    }
    let mut ridge: Vec<usize> = (0..m - 1).collect();
    loop {
        let rows: Vec<Vec<f64>> = ridge.iter().map(|&i| a.row(i).to_vec()).collect();
        if let Ok(basis) = gram_schmidt_basis(&rows) {
            if let Some(v) = complement_direction(m, &basis) {
                if let Some(x) = all_one_side(a, &v) {
                    return Ok(Candidates::WeakDirection(x));
                }
            }
        }
        if m == 1 || !next_combination(&mut ridge, n) {
            break;
        }
    }
    let mut accepted = Vec::new();
    let mut subset: Vec<usize> = (0..m).collect();
    loop {
        stats.subsets_examined += 1;
        match subset_solve(a, &subset) {
            Ok(s) => {
                if accepts(a, &s) {
                    accepted.push(s);
                }
            }
            Err(Error::SingularSubset { .. }) => stats.singular_subsets += 1,
            Err(e) => return Err(e),
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    Ok(Candidates::Caps(accepted))
}

/// Outcome of the edge walk; `Degenerate` asks the caller to fall back to
/// the exhaustive scan.
#[derive(Debug)]
pub enum Walk {
    Done(Candidates),
    Degenerate,
}

/// Pick the smallest positive ratio `(1 - a_i . u) / (a_i . v)`; `Err(())`
/// on a numerical tie.
fn ratio_test(
    a: &UnitRowMatrix,
    u: &[f64],
    v: &[f64],
    skip: &[usize],
) -> std::result::Result<Option<usize>, ()> {
    let vn = norm(v);
    let mut best: Option<(usize, f64)> = None;
    let mut second = f64::INFINITY;
    for (i, row) in a.rows().enumerate() {
        if skip.contains(&i) {
            continue;
        }
        let rate = dot(row, v);
        if rate <= 1e-12 * vn {
            continue;
        }
        let slack = (1.0 - dot(row, u)).max(0.0);
        let s = slack / rate;
        match best {
            Some((_, b)) if s >= b => second = second.min(s),
            _ => {
                if let Some((_, b)) = best {
                    second = second.min(b);
                }
                best = Some((i, s));
            }
        }
    }
    match best {
        None => Ok(None),
        Some((i, b)) => {
            if second - b <= RATIO_TIE * (1.0 + b.abs()) {
                Err(())
            } else {
                Ok(Some(i))
            }
        }
    }
}

enum Start {
    Vertex(Vec<usize>),
    Ray(Vec<f64>),
    Degenerate,
}

/// Reach a vertex from the interior point `u = 0` by moving along a fixed
/// direction projected off the tight rows, one ratio test per dimension.
fn first_vertex(a: &UnitRowMatrix) -> Start {
    let m = a.m();
    // a fixed generic objective direction
    let c: Vec<f64> = (0..m).map(|k| ((k + 2) as f64).sqrt().fract() - 0.5).collect();
    let mut u = vec![0.0; m];
    let mut tight: Vec<usize> = Vec::with_capacity(m);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for _ in 0..m {
        let mut d = c.clone();
        for b in &basis {
            let p = dot(&d, b);
            d.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        if norm(&d) < 1e-8 {
            match complement_direction(m, &basis) {
                Some(e) => d = e,
                None => return Start::Degenerate,
            }
        }
        match ratio_test(a, &u, &d, &tight) {
            Err(()) => return Start::Degenerate,
            Ok(None) => {
                let n = norm(&d);
                return Start::Ray(d.into_iter().map(|x| x / n).collect());
            }
            Ok(Some(i)) => {
                let row = a.row(i);
                let s = (1.0 - dot(row, &u)).max(0.0) / dot(row, &d);
                u.iter_mut().zip(&d).for_each(|(x, y)| *x += s * y);
                tight.push(i);
                let rows: Vec<Vec<f64>> = tight.iter().map(|&t| a.row(t).to_vec()).collect();
                match gram_schmidt_basis(&rows) {
                    Ok(b) => basis = b,
                    Err(_) => return Start::Degenerate,
                }
            }
        }
    }
    tight.sort_unstable();
    Start::Vertex(tight)
}

/// Vertex walk over `{u : A u <= 1}`. Requires full row rank.
pub fn walk(a: &UnitRowMatrix, stats: &mut SearchStats) -> Result<Walk> {
    let m = a.m();
    if a.n() < m {
        return Err(Error::Unsupported(format!(
            "infeasible-side enumeration needs n >= m (n = {}, m = {m})",
            a.n()
        )));
    }
    if let Some(v) = null_direction(a) {
        return Ok(Walk::Done(Candidates::WeakDirection(v)));
    }
    let start = match first_vertex(a) {
        Start::Degenerate => return Ok(Walk::Degenerate),
        Start::Ray(ray) => return Ok(Walk::Done(Candidates::WeakDirection(ray))),
        Start::Vertex(s) => s,
    };
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue: VecDeque<SubsetSolve> = VecDeque::new();
    match subset_solve(a, &start) {
        Ok(s) => queue.push_back(s),
        Err(Error::SingularSubset { .. }) => return Ok(Walk::Degenerate),
        Err(e) => return Err(e),
    }
    seen.insert(start);
    let mut vertices = Vec::new();
    while let Some(s) = queue.pop_front() {
        stats.subsets_examined += 1;
        let on_facet = a.rows().filter(|r| (dot(r, &s.u) - 1.0).abs() <= ON_FACET * s.norm_u).count();
        let outside = a.rows().any(|r| dot(r, &s.u) > 1.0 + ON_FACET * s.norm_u);
        if on_facet != m || outside {
            return Ok(Walk::Degenerate);
        }
        for (j, col) in s.inverse_columns.iter().enumerate() {
            let v: Vec<f64> = col.iter().map(|x| -x).collect();
            let next = match ratio_test(a, &s.u, &v, &s.subset) {
                Err(()) => return Ok(Walk::Degenerate),
                Ok(None) => {
                    let n = norm(&v);
                    return Ok(Walk::Done(Candidates::WeakDirection(
                        v.into_iter().map(|x| x / n).collect(),
                    )));
                }
                Ok(Some(k)) => k,
            };
            let mut nb: Vec<usize> = s.subset.clone();
            nb[j] = next;
            nb.sort_unstable();
            if seen.contains(&nb) {
                continue;
            }
            if seen.len() >= MAX_VERTICES {
                return Err(Error::BudgetExceeded(format!(
                    "more than {MAX_VERTICES} hull facets"
                )));
            }
            match subset_solve(a, &nb) {
                Ok(ns) => queue.push_back(ns),
                Err(Error::SingularSubset { .. }) => return Ok(Walk::Degenerate),
                Err(e) => return Err(e),
            }
            seen.insert(nb);
        }
        vertices.push(s);
    }
    vertices.sort_by(|p, q| p.subset.cmp(&q.subset));
    let accepted: Vec<SubsetSolve> = vertices.into_iter().filter(|s| accepts(a, s)).collect();
    Ok(Walk::Done(Candidates::Caps(accepted)))
}
