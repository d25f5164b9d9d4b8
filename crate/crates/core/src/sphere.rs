//! Spherical caps and the sine-power integrals behind their measure.
//!
//! `I_m(rho) = int_0^rho sin^m x dx` is evaluated with the two-term recurrence
//! run only in the direction where every term is positive, plus a power
//! series in `sin(rho)` for thin caps. All ratios that can underflow are
//! formed in log-space.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// Absolute slack on dot products for strict cap membership.
pub const CONTAINMENT_TOL: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-9;

/// An angle in `[0, pi]`, in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const RIGHT: Angle = Angle(FRAC_PI_2);
    pub const STRAIGHT: Angle = Angle(PI);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&value) {
            return Err(Error::InvalidInput(format!("angle {value} outside [0, pi]")));
        }
        Ok(Angle(value))
    }

    /// `arccos` of a cosine clamped to `[-1, 1]`.
    pub fn from_cos(c: f64) -> Self {
        Angle(c.clamp(-1.0, 1.0).acos())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }
}

/// The closed cap `{x : x . center >= cos radius}` on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: Vec<f64>,
    pub radius: Angle,
}

impl Cap {
    pub fn new(center: Vec<f64>, radius: Angle) -> Result<Self> {
        let n = norm(&center);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("cap center has norm {n}")));
        }
        Ok(Cap { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }
}

fn check_unit(v: &[f64]) -> Result<()> {
    let n = norm(v);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidInput(format!("vector norm {n} is not 1")));
    }
    Ok(())
}

pub fn angle_between(u: &[f64], v: &[f64]) -> Result<Angle> {
    if u.len() != v.len() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    check_unit(u)?;
    check_unit(v)?;
    Ok(Angle::from_cos(dot(u, v)))
}

pub fn cap_contains(cap: &Cap, x: &[f64], strict: bool) -> bool {
    let d = dot(&cap.center, x);
    let c = cap.radius.cos();
    if cap.radius.value() >= PI {
        return !strict || d > -1.0 + CONTAINMENT_TOL;
    }
    if strict {
        d > c + CONTAINMENT_TOL
    } else {
        d >= c - CONTAINMENT_TOL
    }
}

/// `I_m(pi/2)`, the Wallis integral.
pub(crate) fn half_integral(m: usize) -> f64 {
    let mut v = if m % 2 == 0 { FRAC_PI_2 } else { 1.0 };
    let mut k = if m % 2 == 0 { 2 } else { 3 };
    while k <= m {
        v *= (k - 1) as f64 / k as f64;
        k += 2;
    }
    v
}

/// `int_0^delta cos^m y dy` for `delta` in `[0, pi/2]`. Every term of the
/// recurrence is nonnegative there, so it is run upwards.
pub(crate) fn cos_power_integral(m: usize, delta: f64) -> f64 {
    let (s, c) = delta.sin_cos();
    let c = c.max(0.0);
    let mut lo = delta; // J_{k-2}
    let mut hi = s; // J_{k-1}
    if m == 0 {
        return lo;
    }
    if m == 1 {
        return hi;
    }
    for k in 2..=m {
        let next = c.powi(k as i32 - 1) * s / k as f64 + (k - 1) as f64 / k as f64 * lo;
        lo = hi;
        hi = next;
    }
    hi
}

/// `ln I_m(rho)` for `rho` in `[0, pi/2)` from the series
/// `I_m = sum_k binom(2k,k) 4^-k s^(m+2k+1) / (m+2k+1)`, `s = sin rho`.
fn ln_series(m: usize, rho: f64) -> f64 {
    let s = rho.sin();
    if s <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let s2 = s * s;
    let mut coeff = 1.0;
    let mut pow = 1.0;
    let mut sum = 0.0;
    let mut k = 0usize;
    loop {
        let term = coeff * pow / (m + 2 * k + 1) as f64;
        sum += term;
        if term < 1e-18 * sum || k > 50_000_000 {
            break;
        }
        k += 1;
        coeff *= (2 * k - 1) as f64 / (2 * k) as f64;
        pow *= s2;
    }
    (m + 1) as f64 * s.ln() + sum.ln()
}

/// Ratio `I_m(pi/2 - delta) / I_m(pi)` for `delta` in `[0, pi/2]`, i.e. the
/// normalized integral of a sub-hemisphere profile.
fn sub_half_ratio(m: usize, delta: f64) -> f64 {
    let h = half_integral(m);
    let j = cos_power_integral(m, delta);
    if j <= 0.5 * h {
        0.5 - j / (2.0 * h)
    } else {
        (ln_series(m, FRAC_PI_2 - delta) - (2.0 * h).ln()).exp()
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=PI).contains(&rho) {
        return Err(Error::InvalidInput(format!("radius {rho} outside [0, pi]")));
    }
    Ok(())
}

/// Natural log of `I_m(rho)`; `-inf` at `rho = 0` for `m >= 0`.
pub fn ln_sin_power_integral(m: i64, rho: f64) -> Result<f64> {
    if m < 0 {
        return Err(Error::InvalidInput(format!("negative order {m}")));
    }
    check_rho(rho)?;
    let m = m as usize;
    if rho <= FRAC_PI_2 {
        let h = half_integral(m);
        let j = cos_power_integral(m, FRAC_PI_2 - rho);
        if j <= 0.5 * h {
            Ok((h - j).ln())
        } else {
            Ok(ln_series(m, rho))
        }
    } else {
        Ok(sin_power_integral(m as i64, rho)?.ln())
    }
}

pub fn sin_power_integral(m: i64, rho: f64) -> Result<f64> {
    if m < 0 {
        return Err(Error::InvalidInput(format!("negative order {m}")));
    }
    check_rho(rho)?;
    match m {
        0 => return Ok(rho),
        1 => return Ok(2.0 * (0.5 * rho).sin().powi(2)),
        _ => {}
    }
    if rho <= FRAC_PI_2 {
        ln_sin_power_integral(m, rho).map(f64::exp)
    } else {
        let mu = m as usize;
        let h = half_integral(mu);
        let j = cos_power_integral(mu, rho - FRAC_PI_2);
        Ok(h + j)
    }
}

/// Normalized measure of `cap(p, rho)` on `S^{m-1}`.
pub fn cap_measure(m: usize, rho: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("cap measure needs m >= 2, got {m}")));
    }
    check_rho(rho)?;
    let k = m - 2;
    if rho <= FRAC_PI_2 {
        Ok(sub_half_ratio(k, FRAC_PI_2 - rho))
    } else {
        Ok(1.0 - sub_half_ratio(k, rho - FRAC_PI_2))
    }
}

/// Cap measure of `cap(p, arccos(x))` for `x` in `(0, 1]`, using
/// `pi/2 - arccos(x) = arcsin(x)` to keep thin equatorial bands exact.
pub(crate) fn cap_measure_cos(m: usize, x: f64) -> f64 {
    sub_half_ratio(m - 2, x.clamp(0.0, 1.0).asin())
}

/// `phi(t) = 1 - I_{m-2}(arccos e^{-t}) / I_{m-2}(pi)`.
pub fn phi(m: usize, t: f64) -> Result<f64> {
    if m < 3 {
        return Err(Error::InvalidInput(format!("phi needs m >= 3, got {m}")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("phi needs t >= 0, got {t}")));
    }
    Ok(1.0 - cap_measure_cos(m, (-t).exp()))
}

/// `f(m, n) = phi^{-1}((1/2)^{1/sqrt n})` by bisection on `[0, 64]`.
pub fn cutoff_f(m: usize, n: usize) -> Result<f64> {
    if m < 3 || n < m {
        return Err(Error::InvalidInput(format!("cutoff needs 3 <= m <= n, got m={m} n={n}")));
    }
    let target = 0.5f64.powf(1.0 / (n as f64).sqrt());
    let (mut lo, mut hi) = (0.0f64, 64.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if phi(m, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `I_{m-2}(arccos e^{-m^gamma}) / I_{m-2}(pi)`: the mass of a cap whose
/// boundary sits `arcsin(e^{-m^gamma})` above the equator.
pub fn concentration_ratio(m: usize, gamma: f64) -> Result<f64> {
    if m < 3 || !(gamma > 0.0) {
        return Err(Error::InvalidInput(format!(
            "concentration ratio needs m >= 3 and gamma > 0, got m={m} gamma={gamma}"
        )));
    }
    Ok(cap_measure_cos(m, (-(m as f64).powf(gamma)).exp()))
}
