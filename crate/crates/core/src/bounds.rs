//! Closed-form tail and moment bounds for `C(A)` and `log C(A)` under the
//! uniform row model, evaluated in log-space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma, ln_binomial, ln_gamma};
use crate::sphere::{cap_measure_cos, cutoff_f};

/// A bound in log-space. Probability bounds above 1 are reported as 1 with
/// `clamped` set; `raw_log_value` keeps the unclamped figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub log_value: f64,
    pub clamped: bool,
    pub raw_log_value: f64,
}

impl BoundValue {
    fn probability(raw: f64) -> Self {
        if raw > 0.0 {
            BoundValue { log_value: 0.0, clamped: true, raw_log_value: raw }
        } else {
            BoundValue { log_value: raw, clamped: false, raw_log_value: raw }
        }
    }

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

fn check_mn(m: usize, n: usize, min_m: usize) -> Result<()> {
    if m < min_m || n < m {
        return Err(Error::InvalidInput(format!(
            "need {min_m} <= m <= n, got m = {m}, n = {n}"
        )));
    }
    Ok(())
}

/// `ln(binom(n, m) * 2 * m^{5/2})`, the prefactor shared by several bounds.
pub fn ln_prefactor(m: usize, n: usize) -> f64 {
    ln_binomial(n as u64, m as u64) + std::f64::consts::LN_2 + 2.5 * (m as f64).ln()
}

/// `ln P[C(A) >= t]` upper bound for the cap-measure form evaluated at
/// `cos rho = 1/t` (i.e. `x = 1/t`).
fn ln_upper(m: usize, n: usize, inv_t: f64, ln_t: f64) -> f64 {
    // 1 - I_{m-2}(arccos x)/I_{m-2}(pi), formed without cancellation
    let outside = 1.0 - cap_measure_cos(m, inv_t);
    ln_prefactor(m, n) + (n - m) as f64 * outside.ln() - ln_t
}

/// `binom(n,m) 2 m^{5/2} (1 - I_{m-2}(arccos(1/t))/I_{m-2}(pi))^{n-m} / t`.
pub fn upper_tail_bound(m: usize, n: usize, t: f64) -> Result<BoundValue> {
    check_mn(m, n, 3)?;
    if !(t >= 1.0) {
        return Err(Error::InvalidInput(format!("tail bound needs t >= 1, got {t}")));
    }
    Ok(BoundValue::probability(ln_upper(m, n, 1.0 / t, t.ln())))
}

/// The bound on `P[log C(A) >= t]`: [`upper_tail_bound`] at `e^t`.
pub fn log_tail_bound(m: usize, n: usize, t: f64) -> Result<BoundValue> {
    check_mn(m, n, 3)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("log-tail bound needs t >= 0, got {t}")));
    }
    Ok(BoundValue::probability(ln_upper(m, n, (-t).exp(), t)))
}

/// `c (I_{m-2}(arccos(1/t))/I_{m-2}(pi))^{n-m} / t` with a caller-chosen
/// constant `c` standing in for the unquantified `c(m)`.
pub fn lower_tail_envelope(m: usize, n: usize, t: f64, c: f64) -> Result<BoundValue> {
    check_mn(m, n, 2)?;
    if !(t >= std::f64::consts::SQRT_2) {
        return Err(Error::InvalidInput(format!("lower envelope needs t >= sqrt 2, got {t}")));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!("constant c must be positive, got {c}")));
    }
    let inside = cap_measure_cos(m, 1.0 / t);
    let raw = c.ln() + (n - m) as f64 * inside.ln() - t.ln();
    Ok(BoundValue::probability(raw))
}

/// `f(m,n)^gamma + binom(n,m) 2 m^{5/2} 2^{-(n-m)/sqrt n} Gamma(gamma+1)`.
pub fn moment_bound_estimates(m: usize, n: usize, gamma_: f64) -> Result<f64> {
    check_mn(m, n, 3)?;
    if !(gamma_ > 0.0) {
        return Err(Error::InvalidInput(format!("gamma must be positive, got {gamma_}")));
    }
    let f = cutoff_f(m, n)?;
    let tail = ln_prefactor(m, n) - (n - m) as f64 / (n as f64).sqrt() * std::f64::consts::LN_2
        + ln_gamma(gamma_ + 1.0);
    Ok(f.powf(gamma_) + tail.exp())
}

fn polycor_base(m: usize, n: usize) -> f64 {
    m as f64 * (n as f64).ln() + 2.5 * (m as f64).ln() + std::f64::consts::LN_2
}

/// `(m ln n + 5/2 ln m + ln 2)^gamma + Gamma(gamma+1) 2^{gamma-1}`.
pub fn moment_bound_polycor(m: usize, n: usize, gamma_: f64) -> Result<f64> {
    check_mn(m, n, 3)?;
    if !(gamma_ >= 1.0) {
        return Err(Error::InvalidInput(format!("gamma must be >= 1, got {gamma_}")));
    }
    Ok(polycor_base(m, n).powf(gamma_) + gamma(gamma_ + 1.0) * 2f64.powf(gamma_ - 1.0))
}

/// `E[log C(A)] <= m ln n + 5/2 ln m + ln 2 + 1`.
pub fn mean_bound(m: usize, n: usize) -> Result<f64> {
    moment_bound_polycor(m, n, 1.0)
}

/// `VAR(log C(A)) <= (m ln n + 5/2 ln m + ln 2)^2 + 4`.
pub fn variance_bound(m: usize, n: usize) -> Result<f64> {
    moment_bound_polycor(m, n, 2.0)
}

/// `E[C(A)^gamma] <= 1 + binom(n,m) 2 m^{5/2} gamma/(1-gamma)` for
/// `gamma in (0, 1)`; the moment is infinite for `gamma >= 1`.
pub fn moment_bound_cori(m: usize, n: usize, gamma_: f64) -> Result<f64> {
    check_mn(m, n, 3)?;
    if gamma_ >= 1.0 {
        return Err(Error::MomentDivergent { gamma: gamma_ });
    }
    if !(gamma_ > 0.0) {
        return Err(Error::InvalidInput(format!("gamma must be in (0, 1), got {gamma_}")));
    }
    Ok(1.0 + (ln_prefactor(m, n) + (gamma_ / (1.0 - gamma_)).ln()).exp())
}

/// Mean bound from a tail of the form `P[X^gamma > t] <= e^{p - t^{1/gamma}}`
/// for `t >= t0`: `max(p^gamma, t0) + Gamma(gamma+1) 2^{gamma-1}`.
pub fn generic_tail_to_mean(p: f64, t0: f64, gamma_: f64) -> Result<f64> {
    if !(gamma_ >= 1.0) {
        return Err(Error::InvalidInput(format!("gamma must be >= 1, got {gamma_}")));
    }
    Ok(p.powf(gamma_).max(t0) + gamma(gamma_ + 1.0) * 2f64.powf(gamma_ - 1.0))
}

/// `E[log C(A)] <= 5/2 ln n + 2` when `n < m`.
pub fn small_n_bound(n: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::InvalidInput(format!("n must be >= 1, got {n}")));
    }
    Ok(2.5 * n.ln() + 2.0)
}
