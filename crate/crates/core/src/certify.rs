//! Cross-checks of the phase-space engine against the Fock-space oracle.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    central_difference, cutoff_for_state, oracle_evolve_random, oracle_evolve_random_exact,
    oracle_evolve_unitary, oracle_homodyne_pdf, pdf_fisher, sld_qfi, FockState, XGrid,
    DEFAULT_QUAD_ORDER,
};
use crate::gaussian::make_probe;
use crate::metrology::{fi_homodyne, qfi_gaussian};
use crate::optimize::optimize_homodyne;
use crate::{ChannelModel, Mat2, ProbeSpec, Vec2};

pub const DEFAULT_STEP: f64 = 1e-4;
/// Cutoff growth factor and retry budget after a cutoff-adequacy failure.
const CUTOFF_GROWTH: f64 = 1.5;
const CUTOFF_RETRIES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub moments_unitary: f64,
    pub moments_random: f64,
    pub qfi_rel: f64,
    pub fi_rel: f64,
    pub quad_doubling: f64,
    pub step_halving_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            moments_unitary: 1e-6,
            moments_random: 1e-5,
            qfi_rel: 1e-4,
            fi_rel: 1e-3,
            quad_doubling: 1e-7,
            step_halving_rel: 1e-5,
        }
    }
}

impl Tolerances {
    /// Every tolerance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            moments_unitary: self.moments_unitary * factor,
            moments_random: self.moments_random * factor,
            qfi_rel: self.qfi_rel * factor,
            fi_rel: self.fi_rel * factor,
            quad_doubling: self.quad_doubling * factor,
            step_halving_rel: self.step_halving_rel * factor,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificationPoint {
    pub spec: ProbeSpec,
    pub model: ChannelModel,
    pub phi: f64,
}

impl fmt::Display for CertificationPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, value) = match self.model {
            ChannelModel::UnitaryDisturbance { eta } => ("eta", eta),
            ChannelModel::RandomDisturbance { delta } => ("delta", delta),
        };
        write!(
            f,
            "n0={} beta={} theta={:.6} phi={} {name}={value}",
            self.spec.n0, self.spec.beta, self.spec.theta, self.phi
        )
    }
}

/// Oracle and analytic values at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointReport {
    pub point: CertificationPoint,
    pub cutoff: usize,
    pub moment_error: f64,
    pub qfi_oracle: f64,
    pub qfi_analytic: f64,
    pub omega: f64,
    pub fi_oracle: f64,
    pub fi_analytic: f64,
    /// Names of the checks that failed.
    pub failures: Vec<&'static str>,
}

impl PointReport {
    pub fn qfi_rel_error(&self) -> f64 {
        rel_error(self.qfi_oracle, self.qfi_analytic)
    }

    pub fn fi_rel_error(&self) -> f64 {
        rel_error(self.fi_oracle, self.fi_analytic)
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Result of a convergence check at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub point: CertificationPoint,
    pub quad_doubling_change: Option<f64>,
    pub step_halving_change: f64,
    pub failures: Vec<&'static str>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationSummary {
    pub points: Vec<PointReport>,
    pub convergence: Vec<ConvergenceReport>,
}

impl CertificationSummary {
    pub fn passed(&self) -> bool {
        self.points.iter().all(PointReport::passed)
            && self.convergence.iter().all(|c| c.failures.is_empty())
    }

    /// First failing point in grid order, with the failed checks.
    pub fn first_failure(&self) -> Option<(CertificationPoint, Vec<&'static str>)> {
        self.points
            .iter()
            .find(|r| !r.passed())
            .map(|r| (r.point, r.failures.clone()))
            .or_else(|| {
                self.convergence
                    .iter()
                    .find(|c| !c.failures.is_empty())
                    .map(|c| (c.point, c.failures.clone()))
            })
    }
}

fn rel_error(a: f64, b: f64) -> f64 {
    let scale = b.abs().max(1e-12);
    (a - b).abs() / scale
}

/// `n0 ∈ {0.25, 1, 2}`, `β ∈ {0, 0.5, 1}`, `θ ∈ {0, π}`, `φ ∈ {0, 0.1}` and
/// either `η ∈ {0, 0.5, 1}` or `Δ ∈ {0, 0.5, 1}`.
pub fn certification_grid() -> Vec<CertificationPoint> {
    let mut grid = Vec::new();
    for &n0 in &[0.25, 1.0, 2.0] {
        for &beta in &[0.0, 0.5, 1.0] {
            for &theta in &[0.0, PI] {
                for &phi in &[0.0, 0.1] {
                    let spec = ProbeSpec { n0, beta, theta };
                    for &eta in &[0.0, 0.5, 1.0] {
                        let model = ChannelModel::UnitaryDisturbance { eta };
                        grid.push(CertificationPoint { spec, model, phi });
                    }
                    for &delta in &[0.0, 0.5, 1.0] {
                        let model = ChannelModel::RandomDisturbance { delta };
                        grid.push(CertificationPoint { spec, model, phi });
                    }
                }
            }
        }
    }
    grid
}

/// Oracle output state by quadrature over the couplings (random channel) or
/// direct propagation (unitary channel).
pub fn oracle_state(
    point: &CertificationPoint,
    phi: f64,
    cutoff: usize,
    quad_order: usize,
) -> Result<FockState> {
    match point.model {
        ChannelModel::UnitaryDisturbance { eta } => {
            oracle_evolve_unitary(&point.spec, phi, eta, cutoff)
        }
        ChannelModel::RandomDisturbance { delta } => {
            oracle_evolve_random(&point.spec, phi, delta, cutoff, quad_order)
        }
    }
}

/// State used for differentiation: the random channel uses the exact
/// coupling average, which stays accurate for strongly squeezed probes.
fn family_state(point: &CertificationPoint, phi: f64, cutoff: usize) -> Result<FockState> {
    match point.model {
        ChannelModel::UnitaryDisturbance { eta } => {
            oracle_evolve_unitary(&point.spec, phi, eta, cutoff)
        }
        ChannelModel::RandomDisturbance { delta } => {
            oracle_evolve_random_exact(&point.spec, phi, delta, cutoff)
        }
    }
}

/// Runs `build` with the rule cutoff, growing it after cutoff-adequacy
/// failures.
fn with_cutoff<R>(
    point: &CertificationPoint,
    build: impl Fn(usize) -> Result<R>,
) -> Result<(usize, R)> {
    let probe = make_probe(&point.spec)?;
    let mut cutoff = cutoff_for_state(&point.model.apply(&probe, point.phi)?);
    let mut last = String::new();
    for _ in 0..CUTOFF_RETRIES {
        match build(cutoff) {
            Ok(r) => return Ok((cutoff, r)),
            Err(Error::Cutoff(msg)) => {
                last = msg;
                cutoff = (cutoff as f64 * CUTOFF_GROWTH).ceil() as usize;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Cutoff(last))
}

/// Family states at `φ - δ`, `φ`, `φ + δ` on a common cutoff.
fn family_triple(point: &CertificationPoint, step: f64) -> Result<(usize, [FockState; 3])> {
    with_cutoff(point, |n| {
        Ok([
            family_state(point, point.phi - step, n)?,
            family_state(point, point.phi, n)?,
            family_state(point, point.phi + step, n)?,
        ])
    })
}

fn moment_error(state: &FockState, mean: &Vec2, cov: &Mat2) -> f64 {
    let (m, c) = state.moments();
    m.max_abs_diff(mean).max(c.max_abs_diff(cov))
}

/// Compares moments, QFI and optimal-homodyne FI at one point.
pub fn certify_point(
    point: &CertificationPoint,
    tol: &Tolerances,
    grid: &XGrid,
) -> Result<PointReport> {
    let step = DEFAULT_STEP;
    let (cutoff, [minus, centre, plus]) = family_triple(point, step)?;
    let probe = make_probe(&point.spec)?;
    let out = point.model.apply(&probe, point.phi)?;

    let mut moment_error = moment_error(&centre, &out.mean, &out.cov);
    let moment_tol = match point.model {
        ChannelModel::UnitaryDisturbance { .. } => tol.moments_unitary,
        ChannelModel::RandomDisturbance { .. } => {
            let (_, quad) = with_cutoff(point, |n| {
                oracle_state(point, point.phi, n, DEFAULT_QUAD_ORDER)
            })?;
            moment_error = moment_error.max(self::moment_error(&quad, &out.mean, &out.cov));
            tol.moments_random
        }
    };

    let qfi_oracle = sld_qfi(&centre, &central_difference(&plus, &minus, step)?)?;
    let qfi_analytic = qfi_gaussian(&probe, &point.model, point.phi)?.value;

    let (omega, _) = optimize_homodyne(&probe, &point.model, point.phi)?;
    let fi_analytic = fi_homodyne(&probe, &point.model, point.phi, omega)?.value;
    let pdf = |s: &FockState| oracle_homodyne_pdf(s, omega, grid);
    let fi_oracle = pdf_fisher(&pdf(&minus)?, &pdf(&centre)?, &pdf(&plus)?, step, grid);

    let mut report = PointReport {
        point: *point,
        cutoff,
        moment_error,
        qfi_oracle,
        qfi_analytic,
        omega,
        fi_oracle,
        fi_analytic,
        failures: Vec::new(),
    };
    if !(moment_error <= moment_tol) {
        report.failures.push("moments");
    }
    if !(report.qfi_rel_error() <= tol.qfi_rel) {
        report.failures.push("qfi");
    }
    if !(report.fi_rel_error() <= tol.fi_rel) {
        report.failures.push("homodyne-fi");
    }
    Ok(report)
}

/// Quadrature-order doubling (random channel only) and step halving.
pub fn convergence_check(
    point: &CertificationPoint,
    tol: &Tolerances,
) -> Result<ConvergenceReport> {
    let mut failures = Vec::new();
    let quad_doubling_change = match point.model {
        ChannelModel::RandomDisturbance { delta } if delta > 0.0 => {
            let (_, (coarse, fine)) = with_cutoff(point, |n| {
                Ok((
                    oracle_state(point, point.phi, n, DEFAULT_QUAD_ORDER)?,
                    oracle_state(point, point.phi, n, 2 * DEFAULT_QUAD_ORDER)?,
                ))
            })?;
            let (m, c) = fine.moments();
            let change = moment_error(&coarse, &m, &c);
            if !(change < tol.quad_doubling) {
                failures.push("quadrature-doubling");
            }
            Some(change)
        }
        _ => None,
    };

    let half = DEFAULT_STEP / 2.0;
    let (_, (coarse, fine)) = with_cutoff(point, |n| {
        let centre = family_state(point, point.phi, n)?;
        let d = central_difference(
            &family_state(point, point.phi + DEFAULT_STEP, n)?,
            &family_state(point, point.phi - DEFAULT_STEP, n)?,
            DEFAULT_STEP,
        )?;
        let dh = central_difference(
            &family_state(point, point.phi + half, n)?,
            &family_state(point, point.phi - half, n)?,
            half,
        )?;
        Ok((sld_qfi(&centre, &d)?, sld_qfi(&centre, &dh)?))
    })?;
    let step_halving_change = rel_error(fine, coarse);
    if !(step_halving_change < tol.step_halving_rel) {
        failures.push("step-halving");
    }
    Ok(ConvergenceReport {
        point: *point,
        quad_doubling_change,
        step_halving_change,
        failures,
    })
}

/// Points used for the convergence checks: the most demanding random-channel
/// corners of the grid and one unitary point.
pub fn convergence_points() -> Vec<CertificationPoint> {
    let p = |n0, beta, theta, phi, model| CertificationPoint {
        spec: ProbeSpec { n0, beta, theta },
        model,
        phi,
    };
    vec![
        p(
            2.0,
            1.0,
            0.0,
            0.1,
            ChannelModel::RandomDisturbance { delta: 1.0 },
        ),
        p(
            1.0,
            0.5,
            PI,
            0.1,
            ChannelModel::RandomDisturbance { delta: 0.5 },
        ),
        p(
            0.25,
            0.0,
            0.0,
            0.0,
            ChannelModel::RandomDisturbance { delta: 1.0 },
        ),
        p(
            2.0,
            0.5,
            PI,
            0.1,
            ChannelModel::UnitaryDisturbance { eta: 1.0 },
        ),
    ]
}

/// Runs every point (in parallel) and the convergence checks.
pub fn run_certification(
    points: &[CertificationPoint],
    convergence: &[CertificationPoint],
    tol: &Tolerances,
) -> Result<CertificationSummary> {
    let grid = XGrid::default();
    let points = points
        .par_iter()
        .map(|p| certify_point(p, tol, &grid))
        .collect::<Result<Vec<_>>>()?;
    let convergence = convergence
        .par_iter()
        .map(|p| convergence_check(p, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(CertificationSummary {
        points,
        convergence,
    })
}
