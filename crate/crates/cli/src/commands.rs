//! Subcommand definitions and their implementations.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cvpm_core::certify::{certification_grid, convergence_points, run_certification, Tolerances};
use cvpm_core::mle::{crb_check, demo_configs, CrbReport, ExperimentConfig};
use cvpm_core::optimize::{optimize_homodyne, optimize_probe, threshold_delta};
use cvpm_core::{fi_homodyne, make_probe, qfi_gaussian, ChannelModel, ProbeSpec};
use rayon::prelude::*;

use crate::config::Config;
use crate::error::CliError;
use crate::format::{fmt_g, Table};
use crate::sweep::{gnuplot_script, run_sweep, Figure, SweepSettings};

#[derive(Parser, Debug)]
#[command(
    name = "cvpm",
    version,
    about = "Phase-estimation precision limits under linear Hamiltonian disturbance"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Quantum Fisher information at one point, optionally with homodyne FI.
    Qfi(QfiArgs),
    /// Homodyne Fisher information at one point.
    Fi(FiArgs),
    /// Best squeezing fraction and angle at fixed probe energy.
    OptimizeProbe(OptimizeArgs),
    /// Noise threshold for squeezed-vacuum optimality over a log-spaced n0 grid.
    Threshold(ThresholdArgs),
    /// Figure sweep written to CSV.
    Sweep(SweepArgs),
    /// Cross-check the phase-space engine against the Fock-space oracle.
    OracleCheck(OracleArgs),
    /// Monte-Carlo maximum-likelihood estimation against the Cramér–Rao bound.
    Mle(MleArgs),
}

#[derive(Args, Debug, Clone, Copy)]
#[group(required = true, multiple = false)]
pub struct ChannelArgs {
    /// Fixed disturbance strength (unitary channel).
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Noise standard deviation (random channel).
    #[arg(long)]
    pub delta: Option<f64>,
}

impl ChannelArgs {
    fn model(&self) -> Result<ChannelModel, CliError> {
        Ok(match (self.eta, self.delta) {
            (Some(eta), None) => ChannelModel::unitary(eta)?,
            (None, Some(delta)) => ChannelModel::random(delta)?,
            _ => {
                return Err(CliError::Usage(
                    "exactly one of --eta, --delta is required".into(),
                ))
            }
        })
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct ProbeArgs {
    /// Mean photon number of the probe.
    #[arg(long)]
    pub n0: f64,
    /// Fraction of the photons spent on squeezing.
    #[arg(long)]
    pub beta: f64,
    /// Squeezing angle.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    /// Working point of the phase.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
}

impl ProbeArgs {
    fn spec(&self) -> Result<ProbeSpec, CliError> {
        Ok(ProbeSpec::new(self.n0, self.beta, self.theta)?)
    }
}

#[derive(Args, Debug)]
pub struct QfiArgs {
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Also report the homodyne FI at this angle.
    #[arg(long, conflicts_with = "optimize_omega", allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Also report the homodyne FI at the best angle.
    #[arg(long)]
    pub optimize_omega: bool,
}

#[derive(Args, Debug)]
pub struct FiArgs {
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Homodyne angle; the best angle is used when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub n0: f64,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    /// Smallest n0 of the grid [default: 0.001].
    #[arg(long)]
    pub n0_min: Option<f64>,
    /// Largest n0 of the grid [default: 100].
    #[arg(long)]
    pub n0_max: Option<f64>,
    /// Number of grid points [default: 61].
    #[arg(long)]
    pub points: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key = value file with defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// One of 1, 2a, 2b, 3, 4a, 4b, 5, 6.
    #[arg(long)]
    pub figure: Option<Figure>,
    /// CSV destination [default: fig<figure>.csv].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Resolution of the swept axis [default: per figure].
    #[arg(long)]
    pub points: Option<usize>,
    /// Working point of the phase [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Also write a gnuplot script plotting the CSV.
    #[arg(long)]
    pub gnuplot: Option<PathBuf>,
    /// key = value file with defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Print one line per grid point.
    #[arg(long)]
    pub verbose: bool,
    /// Multiply every tolerance by this factor.
    #[arg(long, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    /// Check only the first N grid points and convergence points.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MleArgs {
    /// Seed of the sample generator.
    #[arg(long)]
    pub seed: u64,
    /// Samples per experiment.
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
    /// Repetitions of the experiment.
    #[arg(long, default_value_t = 1000)]
    pub r: usize,
    /// Run the built-in demonstration configurations instead of a single one.
    #[arg(long, conflicts_with_all = ["n0", "beta", "theta", "eta", "delta", "phi_true", "omega"])]
    pub demo: bool,
    #[arg(long, default_value_t = 1.0)]
    pub n0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    /// Fixed disturbance strength [default: 0 when --delta is absent].
    #[arg(long, conflicts_with = "delta", allow_negative_numbers = true)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// True value of the phase.
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub phi_true: f64,
    /// Homodyne angle; the best angle at the true phase when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
}

/// Runs `cli`, writing reports to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Qfi(a) => cmd_qfi(&a, out),
        Command::Fi(a) => cmd_fi(&a, out),
        Command::OptimizeProbe(a) => cmd_optimize(&a, out),
        Command::Threshold(a) => cmd_threshold(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::OracleCheck(a) => cmd_oracle_check(&a, out),
        Command::Mle(a) => cmd_mle(&a, out),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn emit(out: &mut dyn Write, line: &str) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn report(pairs: &[(&str, f64)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={}", fmt_g(*v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_qfi(a: &QfiArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let model = a.channel.model()?;
    let probe = make_probe(&a.probe.spec()?)?;
    let phi = a.probe.phi;
    let qfi = qfi_gaussian(&probe, &model, phi)?.value;
    let homodyne = match (a.omega, a.optimize_omega) {
        (Some(w), _) => Some((w, fi_homodyne(&probe, &model, phi, w)?.value)),
        (None, true) => Some(optimize_homodyne(&probe, &model, phi)?),
        (None, false) => None,
    };
    let line = match homodyne {
        None => report(&[("qfi", qfi)]),
        Some((w, fi)) => {
            let mut pairs = vec![("qfi", qfi), ("fi", fi)];
            if qfi > 0.0 {
                pairs.push(("ratio", fi / qfi));
            }
            pairs.push(("omega", w));
            report(&pairs)
        }
    };
    emit(out, &line)
}

fn cmd_fi(a: &FiArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let model = a.channel.model()?;
    let probe = make_probe(&a.probe.spec()?)?;
    let phi = a.probe.phi;
    let (w, fi) = match a.omega {
        Some(w) => (w, fi_homodyne(&probe, &model, phi, w)?.value),
        None => optimize_homodyne(&probe, &model, phi)?,
    };
    emit(out, &report(&[("fi", fi), ("omega", w)]))
}

fn cmd_optimize(a: &OptimizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let opt = optimize_probe(a.n0, &a.channel.model()?, a.phi)?;
    emit(
        out,
        &report(&[
            ("beta_opt", opt.beta_opt),
            ("theta_opt", opt.theta_opt),
            ("qfi", opt.qfi),
            ("n_out", opt.n_out),
        ]),
    )
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

pub const THRESHOLD_KEYS: [&str; 4] = ["n0-min", "n0-max", "points", "out"];

/// `points` log-spaced photon numbers from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let ratio = hi / lo;
    (0..points)
        .map(|i| match i {
            0 => lo,
            i if i == points - 1 => hi,
            i => lo * ratio.powf(i as f64 / (points - 1) as f64),
        })
        .collect()
}

fn cmd_threshold(a: &ThresholdArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = Config::load_optional(a.config.as_deref())?;
    cfg.check_keys(&THRESHOLD_KEYS)?;
    let lo = cfg.resolve(a.n0_min, "n0-min", 1e-3)?;
    let hi = cfg.resolve(a.n0_max, "n0-max", 100.0)?;
    let points = cfg.resolve(a.points, "points", 61)?;
    let dest: Option<PathBuf> = cfg.resolve_optional(a.out.clone(), "out")?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(CliError::Usage(format!(
            "need 0 < n0-min < n0-max, got {lo} and {hi}"
        )));
    }
    if points < 2 {
        return Err(CliError::Usage(format!(
            "points must be >= 2, got {points}"
        )));
    }
    let n0s = log_grid(lo, hi, points);
    let deltas = n0s
        .par_iter()
        .map(|&n0| threshold_delta(n0))
        .collect::<Result<Vec<_>, _>>()?;
    let table = Table {
        columns: &["n0", "delta_t"],
        rows: n0s.iter().zip(&deltas).map(|(&n, &d)| vec![n, d]).collect(),
    };
    let csv = table.to_csv(&[
        ("n0-min", fmt_g(lo)),
        ("n0-max", fmt_g(hi)),
        ("points", points.to_string()),
    ])?;
    match dest {
        Some(path) => {
            write_file(&path, &csv)?;
            emit(out, &path.display().to_string())
        }
        None => out
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

pub const SWEEP_KEYS: [&str; 5] = ["figure", "out", "points", "phi", "gnuplot"];

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = Config::load_optional(a.config.as_deref())?;
    cfg.check_keys(&SWEEP_KEYS)?;
    let figure: Figure = cfg
        .resolve_optional(a.figure, "figure")?
        .ok_or_else(|| CliError::Usage("--figure is required (flag or config)".into()))?;
    let mut settings = SweepSettings::new(figure);
    settings.points = cfg.resolve(a.points, "points", settings.points)?;
    settings.phi = cfg.resolve(a.phi, "phi", settings.phi)?;
    let path: PathBuf = cfg
        .resolve_optional(a.out.clone(), "out")?
        .unwrap_or_else(|| PathBuf::from(format!("fig{}.csv", figure.id())));
    let gnuplot: Option<PathBuf> = cfg.resolve_optional(a.gnuplot.clone(), "gnuplot")?;
    settings.validate()?;

    let table = run_sweep(&settings)?;
    write_file(&path, &table.to_csv(&settings.echo())?)?;
    emit(out, &path.display().to_string())?;
    if let Some(script) = gnuplot {
        write_file(
            &script,
            &gnuplot_script(figure, &path.display().to_string()),
        )?;
        emit(out, &script.display().to_string())?;
    }
    Ok(())
}

fn cmd_oracle_check(a: &OracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(a.tolerance_scale > 0.0 && a.tolerance_scale.is_finite()) {
        return Err(CliError::Usage(format!(
            "tolerance scale must be positive, got {}",
            a.tolerance_scale
        )));
    }
    let tol = Tolerances::default().scaled(a.tolerance_scale);
    let mut grid = certification_grid();
    let mut convergence = convergence_points();
    if let Some(n) = a.limit {
        grid.truncate(n);
        convergence.truncate(n);
    }
    let summary = run_certification(&grid, &convergence, &tol)
        .map_err(|e| CliError::Certification(e.to_string()))?;
    if a.verbose {
        for r in &summary.points {
            emit(
                out,
                &format!(
                    "{} cutoff={} moments={:.3e} qfi_rel={:.3e} fi_rel={:.3e} {}",
                    r.point,
                    r.cutoff,
                    r.moment_error,
                    r.qfi_rel_error(),
                    r.fi_rel_error(),
                    if r.passed() { "ok" } else { "FAIL" }
                ),
            )?;
        }
    }
    let worst = |f: &dyn Fn(&cvpm_core::certify::PointReport) -> f64| {
        summary.points.iter().map(f).fold(0.0, f64::max)
    };
    emit(
        out,
        &format!(
            "points={} convergence_checks={} max_moment_error={:.3e} max_qfi_rel_error={:.3e} max_fi_rel_error={:.3e}",
            summary.points.len(),
            summary.convergence.len(),
            worst(&|r| r.moment_error),
            worst(&|r| r.qfi_rel_error()),
            worst(&|r| r.fi_rel_error()),
        ),
    )?;
    match summary.first_failure() {
        None => emit(out, "certification passed"),
        Some((point, checks)) => Err(CliError::Certification(format!(
            "{point}: {}",
            checks.join(", ")
        ))),
    }
}

fn crb_line(c: &ExperimentConfig, r: &CrbReport) -> String {
    let mut line = report(&[
        ("mse", r.mse),
        ("crb", r.crb),
        ("ratio", r.ratio),
        ("qcrb", r.qcrb),
    ]);
    line.push_str(&format!(" flagged={}", r.flagged));
    let model = match c.model {
        ChannelModel::UnitaryDisturbance { eta } => format!("eta={}", fmt_g(eta)),
        ChannelModel::RandomDisturbance { delta } => format!("delta={}", fmt_g(delta)),
    };
    format!(
        "n0={} beta={} theta={} {model} phi_true={} omega={} m={} r={} {line}",
        fmt_g(c.probe.n0),
        fmt_g(c.probe.beta),
        fmt_g(c.probe.theta),
        fmt_g(c.true_phase),
        fmt_g(c.omega),
        c.samples,
        c.repetitions,
    )
}

fn cmd_mle(a: &MleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let configs = if a.demo {
        demo_configs(a.seed)?
            .into_iter()
            .map(|c| ExperimentConfig {
                samples: a.m,
                repetitions: a.r,
                ..c
            })
            .collect()
    } else {
        let probe = ProbeSpec::new(a.n0, a.beta, a.theta.rem_euclid(2.0 * PI))?;
        let model = match a.delta {
            Some(delta) => ChannelModel::random(delta)?,
            None => ChannelModel::unitary(a.eta.unwrap_or(0.0))?,
        };
        let omega = match a.omega {
            Some(w) => w,
            None => optimize_homodyne(&make_probe(&probe)?, &model, a.phi_true)?.0,
        };
        vec![ExperimentConfig {
            probe,
            model,
            true_phase: a.phi_true,
            omega,
            samples: a.m,
            repetitions: a.r,
            seed: a.seed,
        }]
    };
    for c in &configs {
        let r = crb_check(c)?;
        emit(out, &crb_line(c, &r))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("cvpm").chain(args.iter().copied()))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let mut buf = Vec::new();
        run(cli, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn qfi_examples() {
        assert_eq!(
            run_args(&[
                "qfi", "--n0", "1", "--beta", "1", "--theta", "0", "--phi", "0", "--eta", "0"
            ])
            .unwrap(),
            "qfi=16\n"
        );
        assert_eq!(
            run_args(&["qfi", "--n0", "1", "--beta", "0", "--phi", "0", "--delta", "0.5"]).unwrap(),
            "qfi=2\n"
        );
        assert_eq!(
            run_args(&["qfi", "--n0", "0", "--beta", "0", "--phi", "0", "--eta", "0"]).unwrap(),
            "qfi=0\n"
        );
    }

    #[test]
    fn qfi_with_homodyne() {
        let s = run_args(&[
            "qfi",
            "--n0",
            "1",
            "--beta",
            "0",
            "--delta",
            "0.5",
            "--optimize-omega",
        ])
        .unwrap();
        assert!(s.starts_with("qfi=2 fi=2 ratio=1 "), "{s}");
    }

    #[test]
    fn channel_flags_are_exclusive() {
        let e = run_args(&[
            "qfi", "--n0", "1", "--beta", "1", "--eta", "0", "--delta", "1",
        ])
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run_args(&["qfi", "--n0", "1", "--beta", "1"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        let e = run_args(&["qfi", "--n0", "1", "--beta", "2", "--eta", "0"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run_args(&["optimize-probe", "--n0", "1", "--delta", "-1"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn optimize_probe_report() {
        let s = run_args(&["optimize-probe", "--n0", "1", "--eta", "0.5"]).unwrap();
        assert!(s.starts_with("beta_opt=1 theta_opt=0 "), "{s}");
    }

    #[test]
    fn log_grid_ends() {
        let g = log_grid(1e-3, 100.0, 6);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[5], 100.0);
        assert!((g[1] - 1e-2).abs() < 1e-15);
    }
}
