//! Figure-reproducing parameter sweeps.
//!
//! Every figure has a default grid; `points` overrides the resolution of the
//! swept axis (both axes for the phase diagrams 3 and 6). Rows are computed in
//! parallel and emitted sorted on the series column, then the swept column.

use std::fmt;
use std::str::FromStr;

use cvpm_core::optimize::{optimize_homodyne, optimize_probe, threshold_delta};
use cvpm_core::{make_probe, qfi_gaussian, ChannelModel, ProbeSpec};
use rayon::prelude::*;

use crate::error::CliError;
use crate::format::{fmt_g, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    F1,
    F2a,
    F2b,
    F3,
    F4a,
    F4b,
    F5,
    F6,
}

impl Figure {
    pub const ALL: [Figure; 8] = [
        Figure::F1,
        Figure::F2a,
        Figure::F2b,
        Figure::F3,
        Figure::F4a,
        Figure::F4b,
        Figure::F5,
        Figure::F6,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::F1 => "1",
            Figure::F2a => "2a",
            Figure::F2b => "2b",
            Figure::F3 => "3",
            Figure::F4a => "4a",
            Figure::F4b => "4b",
            Figure::F5 => "5",
            Figure::F6 => "6",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Figure::F1 => &["eta", "n_out", "qfi"],
            Figure::F2a => &["eta", "n0", "qfi", "fi", "ratio", "omega_opt"],
            Figure::F2b => &["n0", "eta", "qfi", "fi", "ratio", "omega_opt"],
            Figure::F3 => &["n0", "delta", "beta_opt", "theta_opt", "qfi", "threshold"],
            Figure::F4a => &["n0", "delta", "n_out", "qfi", "beta_opt"],
            Figure::F4b => &["delta", "n0", "n_out", "qfi", "beta_opt"],
            Figure::F5 => &["n0", "delta", "qfi", "fi", "ratio", "omega_opt"],
            Figure::F6 => &[
                "n0",
                "delta",
                "beta_opt",
                "theta_opt",
                "qfi",
                "fi",
                "ratio",
                "omega_opt",
                "threshold",
            ],
        }
    }

    pub fn default_points(self) -> usize {
        match self {
            Figure::F1 => 101,
            Figure::F2a | Figure::F2b => 2001,
            Figure::F3 | Figure::F6 => 200,
            Figure::F4a | Figure::F4b => 201,
            Figure::F5 => 301,
        }
    }

    /// Fixed values of the curve parameter (first column). Empty for the
    /// phase diagrams.
    pub fn series(self) -> &'static [f64] {
        match self {
            Figure::F1 => &[0.0, 0.5, 1.0, 1.5],
            Figure::F2a => &[0.0, 0.25, 0.5, 0.75, 1.0],
            Figure::F2b => &[0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            Figure::F3 | Figure::F6 => &[],
            Figure::F4a => &[1.0, 21.0, 41.0, 61.0, 81.0, 101.0],
            Figure::F4b => &[0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0],
            Figure::F5 => &[1e-9, 2.0, 4.0, 6.0, 8.0, 10.0],
        }
    }

    /// Inclusive range of the swept variable (second column).
    fn sweep_range(self) -> (f64, f64) {
        match self {
            Figure::F1 | Figure::F2a => (0.0, 10.0),
            Figure::F2b => (0.0, 5.0),
            Figure::F3 | Figure::F6 => (0.0, 2.0),
            Figure::F4a => (0.0, 2.0),
            Figure::F4b => (0.0, 200.0),
            Figure::F5 => (0.0, 3.0),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| {
                format!("unknown figure {s:?}; expected one of 1, 2a, 2b, 3, 4a, 4b, 5, 6")
            })
    }
}

/// Upper end of the photon-number axis of the phase diagrams.
pub const PHASE_DIAGRAM_N0_MAX: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSettings {
    pub figure: Figure,
    pub points: usize,
    pub phi: f64,
}

impl SweepSettings {
    pub fn new(figure: Figure) -> Self {
        Self {
            figure,
            points: figure.default_points(),
            phi: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.points < 2 {
            return Err(CliError::Usage(format!(
                "points must be >= 2, got {}",
                self.points
            )));
        }
        if !self.phi.is_finite() {
            return Err(CliError::Usage(format!(
                "phi must be finite, got {}",
                self.phi
            )));
        }
        Ok(())
    }

    /// Settings in the order they are echoed into the CSV header.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        vec![
            ("figure", self.figure.id().to_string()),
            ("points", self.points.to_string()),
            ("phi", fmt_g(self.phi)),
        ]
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// `hi·k/n` for `k = 1..=n`; the phase diagrams skip the degenerate origin.
fn open_grid(hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| hi * k as f64 / n as f64).collect()
}

type RowResult = Result<Option<Vec<f64>>, CliError>;

/// QFI, optimized homodyne FI, their ratio and the homodyne angle. `None`
/// when the QFI vanishes and the ratio is undefined.
fn homodyne_row(
    spec: ProbeSpec,
    model: ChannelModel,
    phi: f64,
) -> Result<Option<[f64; 4]>, CliError> {
    let probe = make_probe(&spec)?;
    let qfi = qfi_gaussian(&probe, &model, phi)?.value;
    if qfi <= 0.0 {
        return Ok(None);
    }
    let (omega, fi) = optimize_homodyne(&probe, &model, phi)?;
    Ok(Some([qfi, fi, fi / qfi, omega]))
}

fn thresholds(n0s: &[f64]) -> Result<Vec<f64>, CliError> {
    n0s.par_iter()
        .map(|&n0| threshold_delta(n0).map_err(CliError::from))
        .collect()
}

/// Runs the sweep for `settings.figure` on the current rayon pool.
pub fn run_sweep(settings: &SweepSettings) -> Result<Table, CliError> {
    settings.validate()?;
    let fig = settings.figure;
    let phi = settings.phi;
    let (lo, hi) = fig.sweep_range();
    let xs = linspace(lo, hi, settings.points);

    let tasks: Vec<(f64, f64)> = match fig {
        Figure::F3 | Figure::F6 => {
            let n0s = open_grid(PHASE_DIAGRAM_N0_MAX, settings.points);
            let deltas = open_grid(hi, settings.points);
            n0s.iter()
                .flat_map(|&n| deltas.iter().map(move |&d| (n, d)))
                .collect()
        }
        _ => fig
            .series()
            .iter()
            .flat_map(|&s| xs.iter().map(move |&x| (s, x)))
            .collect(),
    };

    let threshold_of: Vec<(f64, f64)> = match fig {
        Figure::F3 | Figure::F6 => {
            let n0s = open_grid(PHASE_DIAGRAM_N0_MAX, settings.points);
            let t = thresholds(&n0s)?;
            n0s.into_iter().zip(t).collect()
        }
        _ => Vec::new(),
    };
    let lookup_threshold = |n0: f64| {
        threshold_of
            .iter()
            .find(|(n, _)| *n == n0)
            .map(|&(_, t)| t)
            .expect("threshold computed for every n0")
    };

    let row = |&(s, x): &(f64, f64)| -> RowResult {
        match fig {
            Figure::F1 => {
                let opt = optimize_probe(x, &ChannelModel::unitary(s)?, phi)?;
                Ok(Some(vec![s, opt.n_out, opt.qfi]))
            }
            Figure::F2a => {
                let spec = ProbeSpec::squeezed_vacuum(x, 0.0)?;
                Ok(homodyne_row(spec, ChannelModel::unitary(s)?, phi)?
                    .map(|[q, f, r, w]| vec![s, x, q, f, r, w]))
            }
            Figure::F2b => {
                let spec = ProbeSpec::squeezed_vacuum(s, 0.0)?;
                Ok(homodyne_row(spec, ChannelModel::unitary(x)?, phi)?
                    .map(|[q, f, r, w]| vec![s, x, q, f, r, w]))
            }
            Figure::F3 => {
                let opt = optimize_probe(s, &ChannelModel::random(x)?, phi)?;
                Ok(Some(vec![
                    s,
                    x,
                    opt.beta_opt,
                    opt.theta_opt,
                    opt.qfi,
                    lookup_threshold(s),
                ]))
            }
            Figure::F4a | Figure::F4b => {
                let (n0, delta) = if fig == Figure::F4a { (s, x) } else { (x, s) };
                let opt = optimize_probe(n0, &ChannelModel::random(delta)?, phi)?;
                Ok(Some(vec![s, x, opt.n_out, opt.qfi, opt.beta_opt]))
            }
            Figure::F5 => {
                let spec = ProbeSpec::squeezed_vacuum(s, 0.0)?;
                Ok(homodyne_row(spec, ChannelModel::random(x)?, phi)?
                    .map(|[q, f, r, w]| vec![s, x, q, f, r, w]))
            }
            Figure::F6 => {
                let model = ChannelModel::random(x)?;
                let opt = optimize_probe(s, &model, phi)?;
                let spec = ProbeSpec::new(s, opt.beta_opt, opt.theta_opt)?;
                let probe = make_probe(&spec)?;
                let (omega, fi) = optimize_homodyne(&probe, &model, phi)?;
                Ok(Some(vec![
                    s,
                    x,
                    opt.beta_opt,
                    opt.theta_opt,
                    opt.qfi,
                    fi,
                    fi / opt.qfi,
                    omega,
                    lookup_threshold(s),
                ]))
            }
        }
    };

    let rows: Vec<Option<Vec<f64>>> = tasks.par_iter().map(row).collect::<Result<_, _>>()?;
    let mut table = Table {
        columns: fig.columns(),
        rows: rows.into_iter().flatten().collect(),
    };
    table.sort_by_keys(2);
    Ok(table)
}

/// Gnuplot script that plots `csv_path` as written by [`run_sweep`].
pub fn gnuplot_script(fig: Figure, csv_path: &str) -> String {
    let cols = fig.columns();
    let col = |name: &str| cols.iter().position(|c| *c == name).expect("column") + 1;
    let mut s = String::new();
    s.push_str(&format!("# figure {} from {csv_path}\n", fig.id()));
    s.push_str("set datafile separator \",\"\n");
    s.push_str("set datafile commentschars \"#\"\n");
    // the first non-comment line names the columns
    s.push_str("set key autotitle columnheader\n");
    let (x, y) = match fig {
        Figure::F1 => ("n_out", "qfi"),
        Figure::F2a => ("n0", "ratio"),
        Figure::F2b => ("eta", "ratio"),
        Figure::F3 => ("n0", "delta"),
        Figure::F4a => ("delta", "qfi"),
        Figure::F4b => ("n_out", "qfi"),
        Figure::F5 => ("delta", "ratio"),
        Figure::F6 => ("n0", "delta"),
    };
    s.push_str(&format!("set xlabel \"{x}\"\nset ylabel \"{y}\"\n"));
    match fig {
        Figure::F3 | Figure::F6 => {
            let z = if fig == Figure::F3 {
                "beta_opt"
            } else {
                "ratio"
            };
            s.push_str(&format!("set cblabel \"{z}\"\n"));
            s.push_str(&format!(
                "plot \"{csv_path}\" using {}:{}:{} with points pt 5 ps 0.5 palette notitle, \\\n",
                col(x),
                col(y),
                col(z)
            ));
            s.push_str(&format!(
                "     \"{csv_path}\" using {}:{} with lines lc rgb \"black\" lw 2 title \"threshold\"\n",
                col("n0"),
                col("threshold")
            ));
        }
        _ => {
            let series = cols[0];
            let values: Vec<String> = fig.series().iter().map(|&v| fmt_g(v)).collect();
            s.push_str(&format!(
                "plot for [v in \"{}\"] \"{csv_path}\" using {}:(${} == v + 0 ? ${} : NaN) with lines title \"{series}=\".v\n",
                values.join(" "),
                col(x),
                1,
                col(y)
            ));
        }
    }
    s.push_str("pause mouse close\n");
    s
}
