//! Brute-force estimates of `theta(A) = max_x min_i angle(a_i, x)` used to
//! cross-check the exact algorithm.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::matrix::UnitRowMatrix;
use crate::montecarlo::sampling::unit_vector;
use crate::sphere::Angle;

const POLISH_STEPS: usize = 200;
const POLISH_START_STEP: f64 = 0.1;
const POLISH_STARTS: usize = 4;
const GRID_SEED: u64 = 0x5eed_0f_7e7a;

/// Exact `theta(A)` for `m = 2`: half of the widest circular gap between
/// consecutive row directions.
pub fn theta_oracle_2d(a: &UnitRowMatrix) -> Result<Angle> {
    if a.m() != 2 {
        return Err(Error::InvalidInput(format!("2-D oracle needs m = 2, got {}", a.m())));
    }
    let mut angles: Vec<(f64, usize)> = a
        .rows()
        .enumerate()
        .map(|(i, r)| (r[1].atan2(r[0]).rem_euclid(TAU), i))
        .collect();
    angles.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut widest = 0.0f64;
    for k in 0..angles.len() {
        let here = angles[k].0;
        let next = if k + 1 < angles.len() { angles[k + 1].0 } else { angles[0].0 + TAU };
        widest = widest.max(next - here);
    }
    Angle::new((0.5 * widest).min(PI))
}

fn max_dot(a: &UnitRowMatrix, x: &[f64]) -> f64 {
    a.rows().map(|r| dot(r, x)).fold(f64::NEG_INFINITY, f64::max)
}

fn grid_points(m: usize, budget: usize) -> Vec<Vec<f64>> {
    match m {
        2 => (0..budget)
            .map(|i| {
                let t = TAU * i as f64 / budget as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..budget)
                .map(|i| {
                    let z = 1.0 - (2 * i + 1) as f64 / budget as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(GRID_SEED);
            (0..budget).map(|_| unit_vector(&mut rng, m)).collect()
        }
    }
}

fn step_on_sphere(x: &[f64], d: &[f64], h: f64) -> Vec<f64> {
    let y: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + h * b).collect();
    let n = norm(&y);
    y.into_iter().map(|v| v / n).collect()
}

fn tangent(x: &[f64], v: &[f64]) -> Vec<f64> {
    let c = dot(x, v);
    v.iter().zip(x).map(|(vi, xi)| vi - c * xi).collect()
}

fn unit_or_none(v: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm(&v);
    (n > 1e-14).then(|| v.into_iter().map(|x| x / n).collect())
}

/// Local ascent on `min_i angle(a_i, x)`: candidate tangent directions away
/// from the nearly-active rows, their pairwise bisectors and a coordinate
/// frame, with step halving on failure.
fn polish(a: &UnitRowMatrix, mut x: Vec<f64>) -> (Vec<f64>, f64) {
    let m = a.m();
    let mut g = max_dot(a, &x);
    let mut h = POLISH_START_STEP;
    for _ in 0..POLISH_STEPS {
        let active: Vec<Vec<f64>> = a
            .rows()
            .filter(|r| dot(r, &x) >= g - 2.0 * h)
            .filter_map(|r| unit_or_none(tangent(&x, r).iter().map(|v| -v).collect()))
            .collect();
        let mut dirs: Vec<Vec<f64>> = active.clone();
        for i in 0..active.len() {
            for j in i + 1..active.len() {
                let s: Vec<f64> = active[i].iter().zip(&active[j]).map(|(p, q)| p + q).collect();
                dirs.extend(unit_or_none(s));
            }
        }
        if let Some(all) = unit_or_none(
            (0..m).map(|k| active.iter().map(|d| d[k]).sum()).collect(),
        ) {
            dirs.push(all);
        }
        for k in 0..m {
            let mut e = vec![0.0; m];
            e[k] = 1.0;
            if let Some(t) = unit_or_none(tangent(&x, &e)) {
                dirs.push(t.iter().map(|v| -v).collect());
                dirs.push(t);
            }
        }
        let best = dirs
            .iter()
            .map(|d| {
                let y = step_on_sphere(&x, d, h);
                let gy = max_dot(a, &y);
                (y, gy)
            })
            .min_by(|p, q| p.1.total_cmp(&q.1));
        match best {
            Some((y, gy)) if gy < g => {
                x = y;
                g = gy;
            }
            _ => h *= 0.5,
        }
    }
    (x, g)
}

/// A lower estimate of `theta(A)` from `budget` sphere points followed by
/// local polishing. Always `<= theta(A)`.
pub fn theta_oracle_grid(a: &UnitRowMatrix, budget: usize) -> Result<Angle> {
    theta_oracle_grid_point(a, budget).map(|(t, _)| t)
}

/// As [`theta_oracle_grid`], also returning the maximizing direction.
pub fn theta_oracle_grid_point(a: &UnitRowMatrix, budget: usize) -> Result<(Angle, Vec<f64>)> {
    if budget < 1000 {
        return Err(Error::InvalidInput(format!("grid budget {budget} < 1000")));
    }
    let mut scored: Vec<(f64, Vec<f64>)> = grid_points(a.m(), budget)
        .into_iter()
        .map(|x| (max_dot(a, &x), x))
        .collect();
    scored.sort_by(|p, q| p.0.total_cmp(&q.0));
    scored.truncate(POLISH_STARTS);
    let (x, g) = scored
        .into_iter()
        .map(|(_, x)| polish(a, x))
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("budget >= 1000");
    Ok((Angle::from_cos(g), x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(degs: &[f64]) -> UnitRowMatrix {
        let rows = degs
            .iter()
            .map(|d| vec![d.to_radians().cos(), d.to_radians().sin()])
            .collect::<Vec<_>>();
        UnitRowMatrix::normalize_rows(2, &rows).unwrap()
    }

    #[test]
    fn gap_oracle_examples() {
        let t = theta_oracle_2d(&circle(&[0.0, 120.0, 240.0])).unwrap();
        assert!((t.value() - PI / 3.0).abs() < 1e-12);
        assert!((theta_oracle_2d(&circle(&[37.0])).unwrap().value() - PI).abs() < 1e-12);
        let t = theta_oracle_2d(&circle(&[0.0, 180.0])).unwrap();
        assert!((t.value() - PI / 2.0).abs() < 1e-12);
        assert!(theta_oracle_2d(&UnitRowMatrix::normalize_rows(3, &[vec![1.0, 0.0, 0.0]]).unwrap())
            .is_err());
    }

    #[test]
    fn grid_matches_gap_in_2d() {
        let a = circle(&[10.0, 95.0, 200.0, 290.0]);
        let exact = theta_oracle_2d(&a).unwrap().value();
        let approx = theta_oracle_grid(&a, 1000).unwrap().value();
        assert!(approx <= exact + 1e-12);
        assert!(exact - approx < 1e-3);
    }

    #[test]
    fn grid_on_coordinate_frame() {
        let a = UnitRowMatrix::normalize_rows(
            3,
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        )
        .unwrap();
        let want = PI - (1.0 / 3f64.sqrt()).acos();
        let got = theta_oracle_grid(&a, 100_000).unwrap().value();
        assert!((got - want).abs() < 1e-3);
        let one = UnitRowMatrix::normalize_rows(3, &[vec![0.0, 0.6, 0.8]]).unwrap();
        assert!((theta_oracle_grid(&one, 1000).unwrap().value() - PI).abs() < 1e-3);
        assert!(theta_oracle_grid(&one, 10).is_err());
    }
}
