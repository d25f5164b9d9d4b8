//! Minimum-norm point of a convex hull (Wolfe's algorithm).
//!
//! For unit rows, `max_{|p|=1} min_i p . a_i = min_{lambda in simplex} |sum lambda_i a_i|`
//! whenever the left side is positive, so the distance returned here is the
//! cosine of the smallest enclosing cap's complement.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Lu};

pub const MAX_MAJOR_CYCLES: usize = 10_000;
const GAP_TOL: f64 = 1e-12;
const ZERO_NORM: f64 = 1e-14;
const WEIGHT_TOL: f64 = 1e-14;
const DIRECTION_TOL: f64 = 1e-9;
const CERT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct MinNormPoint {
    pub distance: f64,
    /// Convex weights, one per input point.
    pub weights: Vec<f64>,
    /// `point / distance` when the distance exceeds `1e-9`.
    pub direction: Option<Vec<f64>>,
    pub point: Vec<f64>,
    pub major_cycles: usize,
}

pub fn min_norm_point(points: &[Vec<f64>]) -> Result<MinNormPoint> {
    let m = points.first().map(Vec::len).unwrap_or(0);
    if m == 0 {
        return Err(Error::InvalidInput("min-norm point of an empty set".into()));
    }
    if points.iter().any(|p| p.len() != m) {
        return Err(Error::InvalidInput("points of mixed dimension".into()));
    }
    let flat: Vec<f64> = points.iter().flatten().copied().collect();
    min_norm_point_flat(m, &flat)
}

fn combine(m: usize, flat: &[f64], active: &[usize], w: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; m];
    for (&i, &wi) in active.iter().zip(w) {
        for (xj, pj) in x.iter_mut().zip(&flat[i * m..(i + 1) * m]) {
            *xj += wi * pj;
        }
    }
    x
}

/// Minimizer of `|sum alpha_i p_i|` over the affine hull (`sum alpha = 1`),
/// from the bordered system `[G e; e^T 0]`. `None` when the active points
/// are affinely dependent to working precision.
fn affine_minimizer(m: usize, flat: &[f64], active: &[usize]) -> Option<Vec<f64>> {
    let k = active.len();
    let dim = k + 1;
    let mut sys = vec![0.0; dim * dim];
    for (r, &i) in active.iter().enumerate() {
        let pi = &flat[i * m..(i + 1) * m];
        for (c, &j) in active.iter().enumerate() {
            sys[r * dim + c] = dot(pi, &flat[j * m..(j + 1) * m]);
        }
        sys[r * dim + k] = 1.0;
        sys[k * dim + r] = 1.0;
    }
    let lu = Lu::factor(dim, &sys);
    if lu.min_pivot() < 1e-13 {
        return None;
    }
    let mut rhs = vec![0.0; dim];
    rhs[k] = 1.0;
    let sol = lu.solve(&rhs);
    Some(sol[..k].to_vec())
}

pub fn min_norm_point_flat(m: usize, flat: &[f64]) -> Result<MinNormPoint> {
    let n = flat.len() / m;
    if n == 0 {
        return Err(Error::InvalidInput("min-norm point of an empty set".into()));
    }
    let pt = |i: usize| &flat[i * m..(i + 1) * m];

    let start = (0..n)
        .min_by(|&a, &b| norm(pt(a)).total_cmp(&norm(pt(b))))
        .expect("n >= 1");
    let mut active = vec![start];
    let mut w = vec![1.0];
    let mut x = pt(start).to_vec();
    let mut cycles = 0;

    loop {
        let xn = norm(&x);
        if xn <= ZERO_NORM {
            break;
        }
        // major cycle: most violated point along -x
        let (j, best) = (0..n)
            .map(|i| (i, dot(&x, pt(i))))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("n >= 1");
        if xn - best / xn <= GAP_TOL || active.contains(&j) {
            break;
        }
        cycles += 1;
        if cycles > MAX_MAJOR_CYCLES {
            return Err(Error::NoConvergence { iterations: MAX_MAJOR_CYCLES });
        }
        active.push(j);
        w.push(0.0);

        // minor cycles
        loop {
            let Some(alpha) = affine_minimizer(m, flat, &active) else {
                // drop the newcomer; the current point is optimal to precision
                active.pop();
                w.pop();
                x = combine(m, flat, &active, &w);
                return finish(m, flat, n, &active, &w, x, cycles);
            };
            if alpha.iter().all(|&a| a > WEIGHT_TOL) {
                w = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (&wi, &ai) in w.iter().zip(&alpha) {
                if ai <= WEIGHT_TOL && wi - ai > 0.0 {
                    theta = theta.min(wi / (wi - ai));
                }
            }
            let theta = theta.clamp(0.0, 1.0);
            for (wi, ai) in w.iter_mut().zip(&alpha) {
                *wi = (1.0 - theta) * *wi + theta * ai;
            }
            // drop at least the blocking point
            let min_pos = w
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(p, _)| p)
                .expect("nonempty");
            let mut keep_active = Vec::with_capacity(active.len());
            let mut keep_w = Vec::with_capacity(active.len());
            for (p, (&i, &wi)) in active.iter().zip(&w).enumerate() {
                if p != min_pos && wi > WEIGHT_TOL {
                    keep_active.push(i);
                    keep_w.push(wi);
                }
            }
            let total: f64 = keep_w.iter().sum();
            keep_w.iter_mut().for_each(|v| *v /= total);
            active = keep_active;
            w = keep_w;
        }
        x = combine(m, flat, &active, &w);
    }
    finish(m, flat, n, &active, &w, x, cycles)
}

fn finish(
    m: usize,
    flat: &[f64],
    n: usize,
    active: &[usize],
    w: &[f64],
    x: Vec<f64>,
    cycles: usize,
) -> Result<MinNormPoint> {
    let distance = norm(&x);
    let mut weights = vec![0.0; n];
    for (&i, &wi) in active.iter().zip(w) {
        weights[i] += wi;
    }
    let direction: Option<Vec<f64>> = (distance > DIRECTION_TOL).then(|| x.iter().map(|v| v / distance).collect());
    if let Some(q) = &direction {
        let worst = (0..n)
            .map(|i| dot(q, &flat[i * m..(i + 1) * m]))
            .fold(f64::INFINITY, f64::min);
        if worst < distance - CERT_TOL {
            return Err(Error::NoConvergence { iterations: cycles });
        }
    }
    Ok(MinNormPoint { distance, weights, direction, point: x, major_cycles: cycles })
}
