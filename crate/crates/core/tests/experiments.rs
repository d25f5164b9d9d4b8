use conic_condition::montecarlo::output::to_csv;
use conic_condition::montecarlo::{
    concentration_table, lemma_iv_experiment, limit_experiment_m, limit_experiment_n, moment_experiment,
    perceptron_benchmark, tail_experiment, MomentOf, NRule, RunConfig,
};
use conic_condition::Error;

#[test]
fn tail_curve_self_consistency() {
    let cfg = RunConfig::new(3, 4, 20_000, 5).with_t_grid(vec![1.0, 1.5, 2.0, 5.0, 10.0, 40.0]);
    let c = tail_experiment(&cfg).unwrap();
    assert_eq!(c.survival[0], 1.0);
    assert!(c.survival.windows(2).all(|w| w[1] <= w[0]));
    for i in 0..c.t_grid.len() {
        assert!(c.ci_low[i] <= c.survival[i] && c.survival[i] <= c.ci_high[i]);
        assert_eq!(c.t_times_p[i], c.t_grid[i] * c.survival[i]);
        assert!(c.survival[i] <= c.upper_envelope.as_ref().unwrap()[i]);
    }
}

#[test]
fn limits_in_dimension() {
    let eq = limit_experiment_m(&[3, 4, 5, 6, 7], NRule::Equal, 300, 9, 1).unwrap();
    for r in &eq.rows {
        assert!(r.mean_log_per_m <= 2f64.ln() + 3.0 * r.mean_log_per_m_stderr, "m={}: {}", r.m, r.mean_log_per_m);
    }
    let five = limit_experiment_m(&[3, 4], NRule::FiveM, 300, 9, 1).unwrap();
    for (a, b) in eq.rows.iter().zip(&five.rows) {
        assert!(b.mean_log < a.mean_log, "m={}", a.m);
    }
    assert!(matches!(limit_experiment_m(&[2], NRule::Equal, 10, 9, 1), Err(Error::InvalidInput(_))));
}

#[test]
fn feasible_fraction_vanishes() {
    let t = limit_experiment_n(3, &[3, 6, 12, 24], 1000, 2, 1).unwrap();
    assert_eq!(t.rows[0].feasible_fraction, 1.0);
    assert!(t.rows.windows(2).all(|w| w[1].feasible_fraction <= w[0].feasible_fraction));
    assert!(t.rows[3].feasible_fraction < 0.01);
}

#[test]
fn lemma_event_rates() {
    for (m, floor) in [(2usize, 0.25), (3, 0.0625)] {
        let r = lemma_iv_experiment(m, 20_000, 3, 1).unwrap();
        assert_eq!(r.lower_bound, floor);
        assert!(r.frequency >= floor - 3.0 * r.sigma, "m={m}: {}", r.frequency);
    }
}

#[test]
fn concentration_consistency() {
    let t = concentration_table(&[0.5], &[10], Some(100_000), 21).unwrap();
    assert!(t.rows[0].empirical.unwrap().consistent);
    let t = concentration_table(&[1.0], &[400], None, 0).unwrap();
    assert!((t.rows[0].ratio - 0.5).abs() < 1e-6);
}

// Wendel: P[n uniform half-spaces in R^m share a point] = 2^{1-n} sum_{k<m} binom(n-1, k);
// for m = 3, n = 5 that is 11/16.
#[test]
fn rejection_rate_matches_wendel() {
    let b = perceptron_benchmark(3, 5, 10_000, 8, 1).unwrap();
    let p: f64 = 11.0 / 16.0;
    let expected_draws = b.trials as f64 / p;
    let sd = (b.trials as f64 * (1.0 - p)).sqrt() / p;
    assert!((b.total_draws as f64 - expected_draws).abs() < 4.0 * sd, "{} draws", b.total_draws);
    assert_eq!(b.violations_first + b.violations_max + b.bad_solutions, 0);
}

#[test]
fn moment_refusals_and_zero_power() {
    let cfg = RunConfig::new(3, 6, 200, 4).with_gammas(vec![0.0]);
    assert_eq!(moment_experiment(&cfg, MomentOf::C).unwrap().rows[0].mean, 1.0);
    let bad = cfg.with_gammas(vec![1.0]);
    assert!(matches!(moment_experiment(&bad, MomentOf::C), Err(Error::MomentDivergent { .. })));
}

#[test]
fn csv_embeds_config() {
    let cfg = RunConfig::new(3, 6, 100, 77).with_t_grid(vec![1.0, 3.0]);
    let csv = to_csv(&tail_experiment(&cfg).unwrap());
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# config: {") && first.contains("\"seed\":77") && first.contains("\"t_grid\":[1.0,3.0]"));
    assert_eq!(csv.lines().nth(1).unwrap(), "t,exceedances,survival,ci_low,ci_high,upper_envelope,t_times_p");
}
