#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use conic_condition::montecarlo::sampling::{sample_uniform_rows, trial_rng, unit_vector};
use conic_condition::UnitRowMatrix;
use rand::Rng;

/// `ln of the integral of sin^m over [0, rho]`, by adaptive Simpson on the
/// integrand scaled by its maximum on the interval.
pub fn ln_quad_sin_power(m: u32, rho: f64) -> f64 {
    let peak = rho.min(FRAC_PI_2);
    let ln_peak = if m == 0 { 0.0 } else { m as f64 * peak.sin().ln() };
    let f = |x: f64| {
        if m == 0 {
            1.0
        } else {
            let s = x.sin();
            if s <= 0.0 { 0.0 } else { (m as f64 * s.ln() - ln_peak).exp() }
        }
    };
    // split at pi/2 so each piece is monotone
    let mut total = 0.0;
    let mut pieces = vec![(0.0, rho.min(FRAC_PI_2))];
    if rho > FRAC_PI_2 {
        pieces.push((FRAC_PI_2, rho));
    }
    for (a, b) in pieces {
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson(&f, a, b, fa, fm, fb, whole, 1e-15 * (b - a).max(1e-300), 60);
    }
    total.ln() + ln_peak
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `n` uniform rows for trial `i` of a test stream.
pub fn random_matrix(m: usize, n: usize, seed: u64, i: u64) -> UnitRowMatrix {
    sample_uniform_rows(m, n, &mut trial_rng(seed, i))
}

/// A Haar-ish random orthogonal matrix (row-major) from Gram-Schmidt on
/// Gaussian columns.
pub fn random_orthogonal(m: usize, seed: u64) -> Vec<f64> {
    let mut rng = trial_rng(seed, 0xfeed);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < m {
        let mut v = unit_vector(&mut rng, m);
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            basis.push(v.iter().map(|x| x / n).collect());
        }
    }
    basis.concat()
}

/// A random permutation of `0..n`.
pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = trial_rng(seed, 0xbeef);
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

pub fn polar_rows(degrees: &[f64]) -> UnitRowMatrix {
    let rows: Vec<Vec<f64>> = degrees.iter().map(|d| vec![d.to_radians().cos(), d.to_radians().sin()]).collect();
    UnitRowMatrix::normalize_rows(2, &rows).unwrap()
}
