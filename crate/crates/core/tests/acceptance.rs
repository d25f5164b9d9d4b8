//! End-to-end acceptance checks, one test per criterion. Each writes a
//! single `criterion N: PASS|FAIL ...` line to stderr, bypassing capture.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::{ln_quad_sin_power, random_matrix};
use conic_condition::bounds::{mean_bound, moment_bound_estimates, variance_bound};
use conic_condition::condition::FeasibilityClass;
use conic_condition::montecarlo::output::to_csv;
use conic_condition::montecarlo::stats::hill_estimate;
use conic_condition::montecarlo::tail::log_grid;
use conic_condition::montecarlo::{
    concentration_table, decay_slope, lemma_iv_experiment, limit_experiment_n, moment_experiment,
    perceptron_benchmark, sample_conditions, tail_experiment, ConditionSamples, MomentOf, RunConfig, TailCurve,
};
use conic_condition::oracle::{theta_oracle_2d, theta_oracle_grid};
use conic_condition::sphere::{cutoff_f, ln_sin_power_integral, phi, sin_power_integral};
use conic_condition::classify_and_condition;

fn report(n: u32, pass: bool, detail: String) {
    let line = format!("criterion {n}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {n} failed: {detail}");
}

const SEED: u64 = 20_240_601;

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let (mut worst, mut mismatches, mut ill, mut cases) = (0.0f64, 0, 0, 0);
    for m in [2usize, 3] {
        for i in 0..500u64 {
            let n = m + (i as usize % 9);
            let a = random_matrix(m, n, SEED + m as u64, i);
            let r = classify_and_condition(&a).unwrap();
            if r.class == FeasibilityClass::IllPosedNumerical {
                ill += 1;
                continue;
            }
            let oracle = if m == 2 { theta_oracle_2d(&a).unwrap() } else { theta_oracle_grid(&a, 100_000).unwrap() };
            let gap = (r.theta.value() - oracle.value()).abs();
            worst = worst.max(gap);
            let oracle_class = if oracle.value() > FRAC_PI_2 { FeasibilityClass::StrictlyFeasible } else { FeasibilityClass::Infeasible };
            mismatches += (oracle_class != r.class) as u32;
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-3 && mismatches == 0 && elapsed < Duration::from_secs(120);
    report(
        1,
        pass,
        format!("{cases} instances, max |theta - oracle| = {worst:.3e}, class mismatches {mismatches}, ill-posed {ill}, {:.1}s", elapsed.as_secs_f64()),
    );
}

struct BigRun {
    cfg: RunConfig,
    samples: ConditionSamples,
    elapsed: Duration,
}

// m = 3, n = 6, 10^6 trials, single-threaded; shared by criteria 2 and 4.
fn big_run() -> &'static BigRun {
    static RUN: OnceLock<BigRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let cfg = RunConfig::new(3, 6, 1_000_000, SEED).with_workers(1);
        let start = Instant::now();
        let samples = sample_conditions(&cfg).unwrap();
        BigRun { cfg, samples, elapsed: start.elapsed() }
    })
}

#[test]
fn criterion_02_exact_tail_decay() {
    let run = big_run();
    let cfg = run.cfg.clone().with_t_grid(log_grid(1.0, 5.0, 17));
    let curve = TailCurve::from_samples(&cfg, &run.samples).unwrap();
    let (slope, se) = decay_slope(&curve, 1.0, 5.0).unwrap();
    let pass = (-1.15..=-0.85).contains(&slope) && run.elapsed < Duration::from_secs(600);
    report(
        2,
        pass,
        format!("slope {slope:.4} +- {se:.4} over ln C in [1, 5], 10^6 trials in {:.1}s", run.elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_03_upper_envelope() {
    let grid = vec![1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0];
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [4usize, 8] {
        let cfg = RunConfig::new(3, n, 100_000, SEED + n as u64).with_t_grid(grid.clone());
        let c = tail_experiment(&cfg).unwrap();
        let env = c.upper_envelope.as_ref().unwrap();
        let mut below = 0;
        for i in 0..grid.len() {
            let ok = c.survival[i] <= env[i] && (env[i] >= 1.0 || c.ci_high[i] <= env[i]);
            pass &= ok;
            below += ok as usize;
        }
        let tightest = (0..grid.len()).map(|i| c.ci_high[i] / env[i]).fold(0.0, f64::max);
        detail.push(format!("n={n}: {below}/{} thresholds ok, max ci_high/bound {tightest:.3}", grid.len()));
    }
    report(3, pass, detail.join("; "));
}

#[test]
fn criterion_04_lower_envelope_shape() {
    let run = big_run();
    let cfg = run.cfg.clone().with_t_grid(vec![5.0, 10.0, 20.0, 40.0]);
    let curve = TailCurve::from_samples(&cfg, &run.samples).unwrap();
    let tp = &curve.t_times_p;
    let mut sorted = tp.clone();
    sorted.sort_by(f64::total_cmp);
    let med = 0.5 * (sorted[1] + sorted[2]);
    let within = tp.iter().all(|&x| x <= 2.0 * med && x >= 0.5 * med);
    let k = run.samples.values.len() / 100;
    let hill = hill_estimate(&run.samples.values, k).unwrap();
    let pass = within && (0.8..=1.2).contains(&hill);
    report(
        4,
        pass,
        format!("t*P at t=5,10,20,40: {:.3?} (median {med:.3}); Hill index on top 1% = {hill:.4}", tp),
    );
}

#[test]
fn criterion_05_moments() {
    let cfg = RunConfig::new(3, 6, 100_000, SEED + 5).with_gammas(vec![1.0, 2.0]);
    let t = moment_experiment(&cfg, MomentOf::LogC).unwrap();
    let (r1, r2) = (&t.rows[0], &t.rows[1]);
    let mb = mean_bound(3, 6).unwrap();
    let vb = variance_bound(3, 6).unwrap();
    let (e1, e2) = (moment_bound_estimates(3, 6, 1.0).unwrap(), moment_bound_estimates(3, 6, 2.0).unwrap());
    let pass = r1.mean <= 10.81 && r1.mean <= mb && r1.variance <= vb && r1.mean <= e1 && r2.mean <= e2;
    report(
        5,
        pass,
        format!(
            "E[log C] = {:.4} (<= 10.81, formula {mb:.4}); Var = {:.4} (<= {vb:.2}); E[(log C)^2] = {:.4} (<= {e2:.2}); E[log C] <= {e1:.2}",
            r1.mean, r1.variance, r2.mean
        ),
    );
}

#[test]
fn criterion_06_limits_in_n() {
    let t = limit_experiment_n(3, &[8, 32, 128], 2000, SEED + 6, 1).unwrap();
    let logs: Vec<f64> = t.rows.iter().map(|r| r.mean_log).collect();
    let last = &t.rows[2];
    let pass = logs.windows(2).all(|w| w[1] < w[0])
        && logs[2] < 0.2
        && (1.0..=1.15).contains(&last.mean_sqrt)
        && last.feasible_fraction < 0.01;
    report(
        6,
        pass,
        format!(
            "E[log C] over n=8,32,128: {logs:.4?}; E[sqrt C] at 128 = {:.4}; feasible fraction at 128 = {}",
            last.mean_sqrt, last.feasible_fraction
        ),
    );
}

#[test]
fn criterion_07_lemma_iv() {
    let mut pass = true;
    let mut detail = Vec::new();
    for m in [2usize, 3] {
        let r = lemma_iv_experiment(m, 100_000, SEED + 7, 1).unwrap();
        let ok = r.frequency >= r.lower_bound - 3.0 * r.sigma;
        pass &= ok;
        detail.push(format!("m={m}: {:.4} vs floor {}", r.frequency, r.lower_bound));
    }
    report(7, pass, detail.join("; "));
}

#[test]
fn criterion_08_concentration() {
    let gammas = [0.25, 0.5, 1.0];
    let ms = [3usize, 10, 20, 50, 100, 200, 400];
    let t = concentration_table(&gammas, &ms, None, 0).unwrap();
    let at = |m: usize, g: f64| t.rows.iter().find(|r| r.m == m && r.gamma == g).unwrap().ratio;
    // independent check of the two anchor entries by quadrature
    let quad = |m: usize, g: f64| {
        let h = (-(m as f64).powf(g)).exp();
        (ln_quad_sin_power(m as u32 - 2, h.acos()) - ln_quad_sin_power(m as u32 - 2, PI)).exp()
    };
    let oracle_ok = (at(400, 1.0) - quad(400, 1.0)).abs() < 1e-10 && (at(400, 0.25) - quad(400, 0.25)).abs() < 1e-10;
    let near = (at(400, 1.0) - 0.5).abs() < 1e-6;
    let far = (at(400, 0.25) - 0.5).abs() > 0.05;
    let mut broken = Vec::new();
    for &g in &gammas {
        let col: Vec<f64> = ms.iter().map(|&m| at(m, g)).collect();
        for (w, mm) in col.windows(2).zip(ms.windows(2)) {
            if w[1] < w[0] {
                broken.push(format!("gamma={g}: m={}->{} drops {:.5}->{:.5}", mm[0], mm[1], w[0], w[1]));
            }
        }
    }
    let pass = oracle_ok && near && far && broken.is_empty();
    report(
        8,
        pass,
        format!(
            "|r(400,1)-1/2| = {:.1e}; |r(400,0.25)-1/2| = {:.4}; quadrature agreement {oracle_ok}; monotone in m: {}",
            (at(400, 1.0) - 0.5).abs(),
            (at(400, 0.25) - 0.5).abs(),
            if broken.is_empty() { "yes".to_owned() } else { format!("no ({})", broken.join(", ")) }
        ),
    );
}

#[test]
fn criterion_09_perceptron() {
    let b = perceptron_benchmark(3, 5, 10_000, SEED + 9, 1).unwrap();
    let pass = b.violations_first == 0 && b.violations_max == 0 && b.bad_solutions == 0;
    let worst = b.rows.iter().map(|r| r.iterations_first.max(r.iterations_max) as f64 / r.bound as f64).fold(0.0, f64::max);
    report(
        9,
        pass,
        format!(
            "{} instances: bound violations {} / {}, bad solutions {}, max iterations/bound {worst:.3}, acceptance rate {:.4}",
            b.trials, b.violations_first, b.violations_max, b.bad_solutions, b.acceptance_rate
        ),
    );
}

#[test]
fn criterion_10_numerics() {
    let mut worst = 0.0f64;
    for m in 0..=200u32 {
        for k in 1..=100 {
            let rho = PI * k as f64 / 100.0;
            let err = (ln_sin_power_integral(m as i64, rho).unwrap() - ln_quad_sin_power(m, rho)).abs();
            worst = worst.max(err);
        }
    }
    let wallis_ok = (1..=500).all(|m: i64| sin_power_integral(m, PI).unwrap() >= 2.0 / (m as f64).sqrt());
    let mut trip = 0.0f64;
    for m in 3..=12usize {
        for n in [m, m + 1, 2 * m, 5 * m, 100, 10_000] {
            let target = 0.5f64.powf(1.0 / (n as f64).sqrt());
            trip = trip.max((phi(m, cutoff_f(m, n).unwrap()).unwrap() - target).abs());
        }
    }
    // |ln a - ln b| bounds the relative error to first order
    let pass = worst < 1e-10 && wallis_ok && trip <= 1e-9;
    report(
        10,
        pass,
        format!("max relative error of I_m vs quadrature {worst:.2e} (m<=200, 100 rho); I_m(pi) >= 2/sqrt(m): {wallis_ok}; phi/cutoff round trip {trip:.1e}"),
    );
}

#[test]
fn criterion_11_determinism() {
    let base = RunConfig::new(3, 6, 20_000, SEED + 11).with_t_grid(vec![1.0, 2.0, 5.0, 10.0, 40.0]).with_gammas(vec![0.5, 1.0, 2.0]);
    let mut outputs: Vec<Vec<String>> = Vec::new();
    for w in [1usize, 2, 4] {
        let cfg = base.clone().with_workers(w);
        outputs.push(vec![
            to_csv(&tail_experiment(&cfg).unwrap()),
            to_csv(&moment_experiment(&cfg, MomentOf::LogC).unwrap()),
            to_csv(&limit_experiment_n(3, &[4, 16], 2000, SEED, w).unwrap()),
            to_csv(&lemma_iv_experiment(3, 20_000, SEED, w).unwrap()),
            to_csv(&perceptron_benchmark(3, 5, 2000, SEED, w).unwrap()),
        ]);
    }
    let pass = outputs.windows(2).all(|p| p[0] == p[1]);
    report(11, pass, format!("5 experiment CSVs identical across 1, 2 and 4 workers: {pass}"));
}
