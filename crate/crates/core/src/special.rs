//! Log-gamma and log-binomial.

use std::f64::consts::PI;

// Stirling series coefficients B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `ln Gamma(x)` for `x > 0`: the Stirling series at `x + k >= 15`, shifted
/// back with `ln Gamma(x) = ln Gamma(x + k) - ln(x (x+1) ... (x+k-1))`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs x > 0, got {x}");
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let mut shift = 0.0;
    let mut z = x;
    let mut prod = 1.0;
    while z < 15.0 {
        prod *= z;
        z += 1.0;
        if prod > 1e280 {
            shift += prod.ln();
            prod = 1.0;
        }
    }
    shift += prod.ln();
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in STIRLING {
        series += c * p;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// `ln binom(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 60 {
        // exact in u128
        let mut b: u128 = 1;
        for i in 0..k as u128 {
            b = b * (n as u128 - i) / (i + 1);
        }
        return (b as f64).ln();
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `binom(n, k)` as a float, exact for `n <= 60`.
pub fn binomial(n: u64, k: u64) -> f64 {
    ln_binomial(n, k).exp().round()
}
