//! The `conic` command line.
//!
//! Exit codes: 0 success, 1 bad input or usage, 2 numerical failure,
//! 3 not enough tail data for a statistic.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{
    log_tail_bound, lower_tail_envelope, moment_bound_cori, moment_bound_estimates, moment_bound_polycor,
    small_n_bound, upper_tail_bound,
};
use crate::condition::{classify_with, verify_report, ConditionReport, PhaseIStrategy};
use crate::error::{Error, Result};
use crate::matrix::load_matrix;
use crate::montecarlo::output::{to_csv, to_json, Tabular};
use crate::montecarlo::tail::log_grid;
use crate::montecarlo::{
    concentration_table, decay_slope, default_workers, lemma_iv_experiment, limit_experiment_m, limit_experiment_n,
    moment_experiment, perceptron_benchmark, sample_conditions, MomentOf, NRule, RunConfig, TailCurve, DEFAULT_SEED,
};
use crate::perceptron::{cond_bound, default_cap, perceptron_solve, SelectionRule};

#[derive(Debug, Parser)]
#[command(name = "conic", version, about = "Conic condition numbers, bounds and experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (standard output when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (default: $CONIC_WORKERS or all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

impl RunArgs {
    fn workers(&self) -> usize {
        self.workers.unwrap_or_else(default_workers)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Auto,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    FirstViolated,
    MaxViolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Tail,
    Logtail,
    Lower,
    Est,
    Polycor,
    Cori,
    Smalln,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Of {
    #[value(name = "logc")]
    LogC,
    #[value(name = "c")]
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rows {
    #[value(name = "m")]
    Equal,
    #[value(name = "5m")]
    FiveM,
}

#[derive(Debug, Subcommand)]
pub enum BoundsCommand {
    /// Evaluate one bound.
    Eval {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Constant of the lower envelope.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Condition report for a matrix file.
    Cond {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: Strategy,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check a saved report against its matrix.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the perceptron on a matrix file.
    Perceptron {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "first-violated")]
        rule: Rule,
        #[arg(long)]
        cap: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Closed-form bounds.
    Bounds {
        #[command(subcommand)]
        cmd: BoundsCommand,
    },
    /// Empirical survival curve of C(A).
    Tails {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        t_grid: Vec<f64>,
        /// Directory for a gnuplot data file named after m and n.
        #[arg(long)]
        gnuplot_dir: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Decay slope of ln P[log C >= s] over s in [s-min, s-max].
    Slope {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        s_min: f64,
        #[arg(long, default_value_t = 5.0)]
        s_max: f64,
        #[arg(long, default_value_t = 17)]
        points: usize,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sample moments of log C or C.
    Moments {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "logc")]
        of: Of,
        #[arg(long, value_delimiter = ',', required = true)]
        gamma: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Statistics of C as n grows.
    LimitsN {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// E[log C]/m as m grows.
    LimitsM {
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<usize>,
        #[arg(long, value_enum, default_value = "m")]
        n_rule: Rows,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Frequency of the cone-containment event.
    LemmaIv {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cap masses near the equator.
    Concentration {
        #[arg(long, value_delimiter = ',', required = true)]
        gamma_list: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<usize>,
        /// Add a sampled column with this many points per entry.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Perceptron iterations against ceil(C^2) on random feasible systems.
    PerceptronBench {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Serialize)]
struct BoundOutput {
    which: &'static str,
    m: Option<usize>,
    n: usize,
    t: Option<f64>,
    gamma: Option<f64>,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    clamped: Option<bool>,
}

#[derive(Serialize)]
struct SlopeOutput<'a> {
    config: &'a RunConfig,
    s_min: f64,
    s_max: f64,
    slope: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct VerifyOutput {
    valid: bool,
}

fn emit(out: &OutputArgs, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &out.output {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &OutputArgs, v: &T, stdout: &mut dyn Write) -> Result<()> {
    if out.format == Some(Format::Csv) {
        return Err(Error::InvalidInput("this subcommand writes JSON only".into()));
    }
    emit(out, &to_json(v)?, stdout)
}

fn emit_table<T: Tabular>(out: &OutputArgs, t: &T, stdout: &mut dyn Write) -> Result<()> {
    let text = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(t),
        Format::Json => to_json(t)?,
    };
    emit(out, &text, stdout)
}

fn load(path: &Path, stderr: &mut dyn Write) -> Result<crate::matrix::UnitRowMatrix> {
    let loaded = load_matrix(path)?;
    for w in &loaded.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(loaded.matrix)
}

fn need_m(m: Option<usize>) -> Result<usize> {
    m.ok_or_else(|| Error::InvalidInput("--m is required".into()))
}

fn need(x: Option<f64>, flag: &str) -> Result<f64> {
    x.ok_or_else(|| Error::InvalidInput(format!("--{flag} is required")))
}

fn eval_bound(which: Which, m: Option<usize>, n: usize, t: Option<f64>, gamma: Option<f64>, c: f64) -> Result<BoundOutput> {
    let mut o = BoundOutput { which: "", m, n, t, gamma, value: 0.0, log_value: None, clamped: None };
    let from_log = |o: &mut BoundOutput, b: crate::bounds::BoundValue| {
        o.value = b.value();
        o.log_value = Some(b.log_value);
        o.clamped = Some(b.clamped);
    };
    match which {
        Which::Tail => {
            o.which = "tail";
            from_log(&mut o, upper_tail_bound(need_m(m)?, n, need(t, "t")?)?);
        }
        Which::Logtail => {
            o.which = "logtail";
            from_log(&mut o, log_tail_bound(need_m(m)?, n, need(t, "t")?)?);
        }
        Which::Lower => {
            o.which = "lower";
            from_log(&mut o, lower_tail_envelope(need_m(m)?, n, need(t, "t")?, c)?);
        }
        Which::Est => {
            o.which = "est";
            o.value = moment_bound_estimates(need_m(m)?, n, need(gamma, "gamma")?)?;
        }
        Which::Polycor => {
            o.which = "polycor";
            o.value = moment_bound_polycor(need_m(m)?, n, need(gamma, "gamma")?)?;
        }
        Which::Cori => {
            o.which = "cori";
            o.value = moment_bound_cori(need_m(m)?, n, need(gamma, "gamma")?)?;
        }
        Which::Smalln => {
            o.which = "smalln";
            o.value = small_n_bound(n as f64)?;
        }
    }
    Ok(o)
}

fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Cond { input, strategy, out } => {
            let a = load(&input, stderr)?;
            let s = match strategy {
                Strategy::Auto => PhaseIStrategy::Auto,
                Strategy::Exhaustive => PhaseIStrategy::Exhaustive,
            };
            emit_json(&out, &classify_with(&a, s)?, stdout)?;
        }
        Command::Verify { input, report, out } => {
            let a = load(&input, stderr)?;
            let r: ConditionReport = serde_json::from_str(&std::fs::read_to_string(&report)?)?;
            let valid = verify_report(&a, &r);
            emit_json(&out, &VerifyOutput { valid }, stdout)?;
            if !valid {
                return Ok(2);
            }
        }
        Command::Perceptron { input, rule, cap, out } => {
            let a = load(&input, stderr)?;
            let report = classify_with(&a, PhaseIStrategy::Auto)?;
            let cond = report.cond.finite();
            let rule = match rule {
                Rule::FirstViolated => SelectionRule::FirstViolated,
                Rule::MaxViolation => SelectionRule::MaxViolation,
            };
            let mut trace = perceptron_solve(&a, cap.unwrap_or_else(|| default_cap(cond)), rule);
            if report.class == crate::FeasibilityClass::StrictlyFeasible {
                trace.bound = cond.map(cond_bound);
            }
            emit_json(&out, &trace, stdout)?;
        }
        Command::Bounds { cmd: BoundsCommand::Eval { which, m, n, t, gamma, c } } => {
            let o = eval_bound(which, m, n, t, gamma, c)?;
            writeln!(stdout, "{}", serde_json::to_string_pretty(&o)?)?;
        }
        Command::Tails { m, n, t_grid, gnuplot_dir, run, out } => {
            let cfg = RunConfig::new(m, n, run.trials, run.seed).with_t_grid(t_grid).with_workers(run.workers());
            let curve = crate::montecarlo::tail_experiment(&cfg)?;
            if let Some(dir) = gnuplot_dir {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join(format!("tail_m{m}_n{n}.dat")), curve.gnuplot())?;
            }
            emit_table(&out, &curve, stdout)?;
        }
        Command::Slope { m, n, s_min, s_max, points, run, out } => {
            let grid = log_grid(s_min.max(0.0), s_max, points);
            let cfg = RunConfig::new(m, n, run.trials, run.seed).with_t_grid(grid).with_workers(run.workers());
            let samples = sample_conditions(&cfg)?;
            let curve = TailCurve::from_samples(&cfg, &samples)?;
            let (slope, stderr_) = decay_slope(&curve, s_min, s_max)?;
            emit_json(&out, &SlopeOutput { config: &cfg, s_min, s_max, slope, stderr: stderr_ }, stdout)?;
        }
        Command::Moments { m, n, of, gamma, run, out } => {
            let cfg = RunConfig::new(m, n, run.trials, run.seed).with_gammas(gamma).with_workers(run.workers());
            let of = match of {
                Of::LogC => MomentOf::LogC,
                Of::C => MomentOf::C,
            };
            emit_table(&out, &moment_experiment(&cfg, of)?, stdout)?;
        }
        Command::LimitsN { m, n_list, run, out } => {
            emit_table(&out, &limit_experiment_n(m, &n_list, run.trials, run.seed, run.workers())?, stdout)?;
        }
        Command::LimitsM { m_list, n_rule, run, out } => {
            let rule = match n_rule {
                Rows::Equal => NRule::Equal,
                Rows::FiveM => NRule::FiveM,
            };
            emit_table(&out, &limit_experiment_m(&m_list, rule, run.trials, run.seed, run.workers())?, stdout)?;
        }
        Command::LemmaIv { m, run, out } => {
            emit_table(&out, &lemma_iv_experiment(m, run.trials, run.seed, run.workers())?, stdout)?;
        }
        Command::Concentration { gamma_list, m_list, samples, seed, out } => {
            emit_table(&out, &concentration_table(&gamma_list, &m_list, samples, seed)?, stdout)?;
        }
        Command::PerceptronBench { m, n, run, out } => {
            emit_table(&out, &perceptron_benchmark(m, n, run.trials, run.seed, run.workers())?, stdout)?;
        }
    }
    Ok(0)
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
