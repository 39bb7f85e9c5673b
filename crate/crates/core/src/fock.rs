//! Brute-force truncated Fock-space engine.
//!
//! Everything here is computed from matrix elements of `a` and `a†` without
//! using any phase-space formula, so it serves as an independent oracle for
//! the Gaussian engine.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::gaussian::{mean_photon_number, GaussianState, ProbeSpec};
use crate::linalg::{Mat2, Vec2};
use crate::quadrature::GaussHermite;

pub type C64 = Complex<f64>;

/// Levels checked by the cutoff-adequacy test.
pub const TAIL_LEVELS: usize = 5;
/// Maximum population allowed in the top [`TAIL_LEVELS`] levels.
pub const TAIL_TOLERANCE: f64 = 1e-8;
/// Largest trace defect accepted for a channel-averaged state.
pub const TRACE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_QUAD_ORDER: usize = 40;
pub const MIN_QUAD_ORDER: usize = 20;
/// Extra levels used while preparing the probe, dropped afterwards.
const PREP_PADDING: usize = 40;
/// Target for the geometric photon-number tail beyond the cutoff.
pub const TAIL_TARGET: f64 = 1e-12;
/// Quadrature nodes whose product weight falls below this are skipped.
const NODE_WEIGHT_FLOOR: f64 = 1e-16;
/// Pairs with `λi + λj` below this are dropped from the SLD sum.
const SLD_FLOOR: f64 = 1e-12;
const NEGATIVE_EIGENVALUE: f64 = -1e-8;

/// Density matrix on the truncated number basis `|0⟩ … |N_c - 1⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    rho: DMatrix<C64>,
}

/// Cutoff rule `max(40, ⌈12 n + 25⌉)` for a state with mean photon number `n`.
pub fn cutoff_for(n_out: f64) -> usize {
    let rule = (12.0 * n_out.max(0.0) + 25.0).ceil() as usize;
    rule.max(40)
}

/// Cutoff for a Gaussian channel output.
///
/// Squeezed and noisy states have geometric photon-number tails with ratio
/// `(s-1)/(s+1)`, `s` the largest covariance eigenvalue, which are far heavier
/// than the mean photon number suggests. The plain rule is extended until that
/// tail falls below [`TAIL_TARGET`], on top of the levels occupied by the
/// displacement.
pub fn cutoff_for_state(out: &GaussianState<f64>) -> usize {
    let base = cutoff_for(mean_photon_number(out));
    let c = &out.cov;
    let half_gap = (0.25 * (c.get(0, 0) - c.get(1, 1)).powi(2) + c.get(0, 1).powi(2)).sqrt();
    let s = 0.5 * c.trace() + half_gap;
    let q = (s - 1.0) / (s + 1.0);
    if !(q > 0.0) {
        return base;
    }
    let tail = (TAIL_TARGET.ln() / q.ln()).ceil() as usize;
    let shift = (3.0 * out.mean.norm_sqr() + 25.0).ceil() as usize;
    base.max(tail + shift)
}

fn annihilation(dim: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// `exp(A) v` for a real antisymmetric banded `A` given as a matrix-vector
/// product, by Taylor series over sub-steps of norm at most one half.
fn expm_antisymmetric_apply<F>(apply: F, norm_bound: f64, v: Vec<f64>) -> Vec<f64>
where
    F: Fn(&[f64], &mut [f64]),
{
    let steps = (2.0 * norm_bound).ceil().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    let mut out = v;
    let mut term = vec![0.0; out.len()];
    let mut next = vec![0.0; out.len()];
    for _ in 0..steps {
        term.copy_from_slice(&out);
        for k in 1..60 {
            apply(&term, &mut next);
            let scale = h / k as f64;
            let mut size = 0.0_f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * scale;
                size = size.max(t.abs());
            }
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
            if size < 1e-18 {
                break;
            }
        }
    }
    out
}

/// Real-symmetric propagator `exp(-iH)` stored as its eigendecomposition.
struct Propagator {
    vectors: DMatrix<f64>,
    phases: DVector<C64>,
}

impl Propagator {
    /// `H = φ a†a + η (a + a†)`.
    fn new(dim: usize, phi: f64, eta: f64) -> Self {
        let a = annihilation(dim);
        let mut h = (&a + a.transpose()) * eta;
        for n in 0..dim {
            h[(n, n)] += phi * n as f64;
        }
        let eig = SymmetricEigen::new(h);
        let phases = eig.eigenvalues.map(|l| C64::new(0.0, -l).exp());
        Self {
            vectors: eig.eigenvectors,
            phases,
        }
    }

    fn apply(&self, psi: &DVector<C64>) -> DVector<C64> {
        let v = &self.vectors;
        let re = v.tr_mul(&psi.map(|z| z.re));
        let im = v.tr_mul(&psi.map(|z| z.im));
        let w = DVector::from_fn(re.len(), |k, _| C64::new(re[k], im[k]) * self.phases[k]);
        let re = v * w.map(|z| z.re);
        let im = v * w.map(|z| z.im);
        DVector::from_fn(re.len(), |k, _| C64::new(re[k], im[k]))
    }
}

/// Fock amplitudes of `D(α) S(ξ)|0⟩` in `dim` levels.
pub fn fock_probe(spec: &ProbeSpec<f64>, dim: usize) -> Result<DVector<C64>> {
    spec.validate()?;
    if dim < 2 {
        return Err(Error::InvalidArgument("cutoff must be at least 2".into()));
    }
    let work = dim + PREP_PADDING.max(dim / 2);
    let root = |n: usize| (n as f64).sqrt();
    let mut psi = vec![0.0; work];
    psi[0] = 1.0;

    // S(ζ) = e^{-iθN/2} exp(r(a² - a†²)/2) e^{iθN/2} with ζ = r e^{-iθ}; the
    // outer rotations act on the result only, since the vacuum is invariant
    let r = spec.squeezing();
    if r > 0.0 {
        let apply = |v: &[f64], out: &mut [f64]| {
            for n in 0..work {
                let down = if n + 2 < work {
                    root((n + 1) * (n + 2)) * v[n + 2]
                } else {
                    0.0
                };
                let up = if n >= 2 {
                    root(n * (n - 1)) * v[n - 2]
                } else {
                    0.0
                };
                out[n] = 0.5 * r * (down - up);
            }
        };
        psi = expm_antisymmetric_apply(apply, r * work as f64, psi);
    }
    let phase = |n: usize| C64::from_polar(1.0, -0.5 * spec.theta * n as f64);
    let squeezed: Vec<C64> = psi.iter().enumerate().map(|(n, &x)| phase(n) * x).collect();

    // D(α) = exp(α(a† - a)) is real, so it acts on both parts separately
    let alpha = spec.displacement();
    let displace = |v: Vec<f64>| {
        if alpha == 0.0 {
            return v;
        }
        let apply = |v: &[f64], out: &mut [f64]| {
            for n in 0..work {
                let up = if n >= 1 { root(n) * v[n - 1] } else { 0.0 };
                let down = if n + 1 < work {
                    root(n + 1) * v[n + 1]
                } else {
                    0.0
                };
                out[n] = alpha * (up - down);
            }
        };
        expm_antisymmetric_apply(apply, 2.0 * alpha * root(work), v)
    };
    let re = displace(squeezed.iter().map(|z| z.re).collect());
    let im = displace(squeezed.iter().map(|z| z.im).collect());
    Ok(DVector::from_fn(dim, |n, _| C64::new(re[n], im[n])))
}

fn hermitize(m: DMatrix<C64>) -> DMatrix<C64> {
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

impl FockState {
    pub fn from_pure(psi: &DVector<C64>) -> Self {
        Self {
            rho: psi * psi.adjoint(),
        }
    }

    pub fn from_density(rho: DMatrix<C64>) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return Err(Error::InvalidDensity(
                "density matrix must be square".into(),
            ));
        }
        let skew = (&rho - rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if skew > 1e-10 {
            return Err(Error::InvalidDensity(format!(
                "density matrix not Hermitian (defect {skew:e})"
            )));
        }
        Ok(Self { rho })
    }

    pub fn cutoff(&self) -> usize {
        self.rho.nrows()
    }

    pub fn density(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Population in the highest [`TAIL_LEVELS`] levels.
    pub fn tail_population(&self) -> f64 {
        let n = self.cutoff();
        (n.saturating_sub(TAIL_LEVELS)..n)
            .map(|k| self.rho[(k, k)].re)
            .sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.cutoff())
            .map(|n| n as f64 * self.rho[(n, n)].re)
            .sum()
    }

    fn expect_a(&self) -> C64 {
        (1..self.cutoff())
            .map(|n| self.rho[(n, n - 1)] * (n as f64).sqrt())
            .sum()
    }

    fn expect_a2(&self) -> C64 {
        (2..self.cutoff())
            .map(|n| self.rho[(n, n - 2)] * ((n * (n - 1)) as f64).sqrt())
            .sum()
    }

    /// Quadrature means and symmetrised covariance matrix.
    ///
    /// Second moments use `aa† = a†a + 1` analytically so the truncation edge
    /// does not leak into them.
    pub fn moments(&self) -> (Vec2<f64>, Mat2<f64>) {
        let a = self.expect_a();
        let a2 = self.expect_a2();
        let n = self.mean_photon_number();
        let (q, p) = (2.0 * a.re, 2.0 * a.im);
        let qq = 2.0 * a2.re + 2.0 * n + 1.0 - q * q;
        let pp = -2.0 * a2.re + 2.0 * n + 1.0 - p * p;
        let qp = 2.0 * a2.im - q * p;
        (Vec2::new(q, p), Mat2::new(qq, qp, qp, pp))
    }

    /// Cutoff-adequacy and trace checks.
    pub fn check(&self, trace_tol: f64) -> Result<()> {
        let tail = self.tail_population();
        if !(tail < TAIL_TOLERANCE) {
            return Err(Error::Cutoff(format!(
                "top {TAIL_LEVELS} levels hold population {tail:e} at cutoff {}; increase the cutoff",
                self.cutoff()
            )));
        }
        let defect = (self.trace() - 1.0).abs();
        if !(defect <= trace_tol) {
            return Err(Error::Oracle(format!(
                "trace defect {defect:e} exceeds {trace_tol:e}"
            )));
        }
        Ok(())
    }
}

/// Probe sent through `exp{-i(φ a†a + η(a + a†))}`.
pub fn oracle_evolve_unitary(
    spec: &ProbeSpec<f64>,
    phi: f64,
    eta: f64,
    cutoff: usize,
) -> Result<FockState> {
    if !phi.is_finite() || !eta.is_finite() {
        return Err(Error::InvalidArgument(
            "phase and coupling must be finite".into(),
        ));
    }
    let psi = fock_probe(spec, cutoff)?;
    let out = Propagator::new(cutoff, phi, eta).apply(&psi);
    let state = FockState::from_pure(&out);
    state.check(1e-8)?;
    Ok(state)
}

/// Probe averaged over `exp{-i(φ a†a + η₁Q + η₂P)}` with independent
/// `ηᵢ ~ N(0, Δ²)`, by tensor-product Gauss–Hermite quadrature.
pub fn oracle_evolve_random(
    spec: &ProbeSpec<f64>,
    phi: f64,
    delta: f64,
    cutoff: usize,
    quad_order: usize,
) -> Result<FockState> {
    if quad_order < MIN_QUAD_ORDER {
        return Err(Error::InvalidArgument(format!(
            "quadrature order must be >= {MIN_QUAD_ORDER}, got {quad_order}"
        )));
    }
    if !(delta >= 0.0) || !delta.is_finite() || !phi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "invalid phase {phi} or spread {delta}"
        )));
    }
    if delta == 0.0 {
        return oracle_evolve_unitary(spec, phi, 0.0, cutoff);
    }
    let psi0 = fock_probe(spec, cutoff)?;
    let gh = GaussHermite::new(quad_order)?;
    let nodes: Vec<(f64, f64)> = gh.normal(delta).collect();
    // nodes are antisymmetric, so |x_i| is indexed by min(i, order-1-i)
    let fold = |i: usize| i.min(quad_order - 1 - i);

    let mut cache: HashMap<(usize, usize), Propagator> = HashMap::new();
    let mut rho = DMatrix::<C64>::zeros(cutoff, cutoff);
    for (i, &(e1, w1)) in nodes.iter().enumerate() {
        for (j, &(e2, w2)) in nodes.iter().enumerate() {
            let w = w1 * w2;
            if w < NODE_WEIGHT_FLOOR {
                continue;
            }
            // η₁Q + η₂P = e^{iχN} |η| Q e^{-iχN} with χ = atan2(η₂, η₁)
            let (fi, fj) = (fold(i), fold(j));
            let key = (fi.min(fj), fi.max(fj));
            let radius = e1.hypot(e2);
            let prop = cache
                .entry(key)
                .or_insert_with(|| Propagator::new(cutoff, phi, radius));
            let chi = e2.atan2(e1);
            let mut psi = psi0.clone();
            for (n, z) in psi.iter_mut().enumerate() {
                *z *= C64::from_polar(1.0, -chi * n as f64);
            }
            let mut psi = prop.apply(&psi);
            for (n, z) in psi.iter_mut().enumerate() {
                *z *= C64::from_polar(1.0, chi * n as f64);
            }
            rho.gerc(C64::new(w, 0.0), &psi, &psi, C64::new(1.0, 0.0));
        }
    }
    let rho = hermitize(rho);
    let state = FockState { rho };
    state.check(TRACE_TOLERANCE)?;
    Ok(state)
}

/// `Oᵀ ρ O` (or `O ρ Oᵀ`) for real `O`, done on real and imaginary parts.
fn real_congruence(o: &DMatrix<f64>, rho: &DMatrix<C64>, transpose_left: bool) -> DMatrix<C64> {
    let part = |m: DMatrix<f64>| {
        if transpose_left {
            o.tr_mul(&m) * o
        } else {
            o * m * o.transpose()
        }
    };
    let re = part(rho.map(|z| z.re));
    let im = part(rho.map(|z| z.im));
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
        C64::new(re[(i, j)], im[(i, j)])
    })
}

/// Exact Gaussian average `E[e^{-isX} ρ e^{isX}]`, `s ~ N(0, v)`, along
/// `X = cos χ Q + sin χ P = e^{iχN} Q e^{-iχN}`. In the eigenbasis of `Q` the
/// average damps `ρᵢⱼ` by `exp(-v(qᵢ-qⱼ)²/2)`.
fn dephase_along(
    rho: &DMatrix<C64>,
    q: &SymmetricEigen<f64, nalgebra::Dyn>,
    chi: f64,
    variance: f64,
) -> DMatrix<C64> {
    let mut r = rho.clone();
    rotate_number(&mut r, chi);
    let mut t = real_congruence(&q.eigenvectors, &r, true);
    let xs = &q.eigenvalues;
    for i in 0..t.nrows() {
        for j in 0..t.ncols() {
            let d = xs[i] - xs[j];
            t[(i, j)] *= (-0.5 * variance * d * d).exp();
        }
    }
    let mut r = real_congruence(&q.eigenvectors, &t, false);
    rotate_number(&mut r, -chi);
    r
}

fn rotate_number(psi_or_rho: &mut DMatrix<C64>, phi: f64) {
    // ρ → e^{-iφN} ρ e^{iφN}
    for m in 0..psi_or_rho.nrows() {
        for n in 0..psi_or_rho.ncols() {
            psi_or_rho[(m, n)] *= C64::from_polar(1.0, -phi * (m as f64 - n as f64));
        }
    }
}

/// Random-coupling channel without quadrature.
///
/// `exp{-i(φN + η·X)}` factorises as `e^{-iφN} e^{-i c·X}` up to a phase with
/// `c = M(φ)η` linear in `η`. The columns of `M` are read off from the
/// brute-force propagator acting on the vacuum, after which the average over
/// `c ~ N(0, Δ² M Mᵀ)` is done exactly along the two principal quadratures.
/// Unlike node-based quadrature this stays accurate when the noise is wider
/// than the squeezed features of the probe.
pub fn oracle_evolve_random_exact(
    spec: &ProbeSpec<f64>,
    phi: f64,
    delta: f64,
    cutoff: usize,
) -> Result<FockState> {
    if !(delta >= 0.0) || !delta.is_finite() || !phi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "invalid phase {phi} or spread {delta}"
        )));
    }
    if delta == 0.0 {
        return oracle_evolve_unitary(spec, phi, 0.0, cutoff);
    }
    let m = coupling_map(phi)?;
    // C = Δ² M Mᵀ and its principal axes
    let c = (m * m.transpose()).scale(delta * delta);
    let (c00, c01, c11) = (c.get(0, 0), c.get(0, 1), c.get(1, 1));
    let half_gap = (0.25 * (c00 - c11).powi(2) + c01 * c01).sqrt();
    let mid = 0.5 * (c00 + c11);
    let angle = 0.5 * (2.0 * c01).atan2(c00 - c11);
    let axes = [
        (mid + half_gap, angle),
        ((mid - half_gap).max(0.0), angle + 0.5 * PI),
    ];

    let psi = fock_probe(spec, cutoff)?;
    let mut rho = &psi * psi.adjoint();
    let a = annihilation(cutoff);
    let q = SymmetricEigen::new(&a + a.transpose());
    for (variance, chi) in axes {
        if variance > 0.0 {
            rho = dephase_along(&rho, &q, chi, variance);
        }
    }
    rotate_number(&mut rho, phi);
    let state = FockState {
        rho: hermitize(rho),
    };
    state.check(TRACE_TOLERANCE)?;
    Ok(state)
}

/// Matrix `M(φ)` with `e^{iφN} exp{-i(φN + η·X)} |0⟩ = e^{-i(Mη)·X}|0⟩`.
fn coupling_map(phi: f64) -> Result<Mat2<f64>> {
    const DIM: usize = 40;
    let vac = ProbeSpec::new(0.0, 0.0, 0.0)?;
    let psi0 = fock_probe(&vac, DIM)?;
    let prop = Propagator::new(DIM, phi, 1.0);
    let mut cols = [[0.0; 2]; 2];
    // η = (1, 0) couples to Q; η = (0, 1) couples to P = e^{iπN/2} Q e^{-iπN/2}
    for (k, chi) in [0.0, 0.5 * PI].into_iter().enumerate() {
        let mut psi = psi0.clone();
        for (n, z) in psi.iter_mut().enumerate() {
            *z *= C64::from_polar(1.0, -chi * n as f64);
        }
        let mut psi = prop.apply(&psi);
        for (n, z) in psi.iter_mut().enumerate() {
            // e^{iχN} then undo the free rotation e^{-iφN}
            *z *= C64::from_polar(1.0, (chi + phi) * n as f64);
        }
        let (mean, _) = FockState::from_pure(&psi).moments();
        // e^{-i(c₁Q + c₂P)}|0⟩ has ⟨Q⟩ = 2c₂, ⟨P⟩ = -2c₁
        cols[k] = [-0.5 * mean.0[1], 0.5 * mean.0[0]];
    }
    Ok(Mat2::new(cols[0][0], cols[1][0], cols[0][1], cols[1][1]))
}

/// QFI from the symmetric logarithmic derivative, `Σ 2|ρ'ᵢⱼ|²/(λᵢ+λⱼ)` in the
/// eigenbasis of `ρ`.
pub fn sld_qfi(rho: &FockState, drho: &DMatrix<C64>) -> Result<f64> {
    if drho.shape() != rho.rho.shape() {
        return Err(Error::InvalidArgument("derivative shape mismatch".into()));
    }
    let eig = SymmetricEigen::new(rho.rho.clone());
    if let Some(&low) = eig.eigenvalues.iter().find(|&&l| l < NEGATIVE_EIGENVALUE) {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {low:e}"
        )));
    }
    let v = &eig.eigenvectors;
    let d = v.adjoint() * drho * v;
    let lam = &eig.eigenvalues;
    let n = lam.len();
    let mut h = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s = lam[i] + lam[j];
            if s > SLD_FLOOR {
                h += 2.0 * d[(i, j)].norm_sqr() / s;
            }
        }
    }
    Ok(h)
}

/// QFI of a state family at `phi`, with `ρ'` from a central difference.
pub fn oracle_qfi<F>(family: F, phi: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<FockState>,
{
    if !(1e-5..=1e-3).contains(&step) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must lie in [1e-5, 1e-3], got {step}"
        )));
    }
    let centre = family(phi)?;
    let plus = family(phi + step)?;
    let minus = family(phi - step)?;
    sld_qfi(&centre, &central_difference(&plus, &minus, step)?)
}

pub fn central_difference(plus: &FockState, minus: &FockState, step: f64) -> Result<DMatrix<C64>> {
    if plus.cutoff() != minus.cutoff() {
        return Err(Error::InvalidArgument("cutoff mismatch".into()));
    }
    Ok((&plus.rho - &minus.rho) * C64::new(0.5 / step, 0.0))
}

/// Uniform grid of homodyne outcomes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl XGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min <= -20.0 && max >= 20.0) || points < 3 {
            return Err(Error::InvalidArgument(format!(
                "outcome grid must cover [-20, 20] with >= 3 points, got [{min}, {max}] x {points}"
            )));
        }
        Ok(Self { min, max, points })
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.points).map(move |k| self.min + h * k as f64)
    }
}

impl Default for XGrid {
    fn default() -> Self {
        Self {
            min: -20.0,
            max: 20.0,
            points: 4001,
        }
    }
}

/// Number-state wavefunctions `⟨x|n⟩` on the `Q = a + a†` scale, rows indexed
/// by grid point.
fn hermite_functions(grid: &XGrid, levels: usize) -> DMatrix<f64> {
    let norm = 2.0_f64.powf(-0.25) * PI.powf(-0.25);
    let mut out = DMatrix::zeros(grid.points, levels);
    for (k, x) in grid.values().enumerate() {
        let y = x / std::f64::consts::SQRT_2;
        let mut prev = 0.0;
        let mut cur = norm * (-0.5 * y * y).exp();
        for n in 0..levels {
            out[(k, n)] = cur;
            let nf = n as f64;
            let next = (2.0 / (nf + 1.0)).sqrt() * y * cur - (nf / (nf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
    }
    out
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let inner: f64 = values.iter().sum();
    h * (inner - 0.5 * (values[0] + values[n - 1]))
}

/// Outcome density of a homodyne measurement of `X_ω = Q cos ω - P sin ω`.
pub fn oracle_homodyne_pdf(state: &FockState, omega: f64, grid: &XGrid) -> Result<Vec<f64>> {
    let grid = XGrid::new(grid.min, grid.max, grid.points)?;
    let n = state.cutoff();
    // rotate by ω: ρ_mn e^{iω(m-n)}
    let rot = DMatrix::from_fn(n, n, |m, k| {
        state.rho[(m, k)] * C64::from_polar(1.0, omega * (m as f64 - k as f64))
    });
    let psi = hermite_functions(&grid, n);
    // ψ is real, so only the symmetric real part of ρ contributes
    let m = &psi * rot.map(|z| z.re);
    let pdf: Vec<f64> = (0..grid.points)
        .map(|k| m.row(k).dot(&psi.row(k)).max(0.0))
        .collect();
    let total = trapezoid(&pdf, grid.spacing());
    if !((total - 1.0).abs() <= 1e-6) {
        return Err(Error::Oracle(format!(
            "homodyne density integrates to {total}"
        )));
    }
    Ok(pdf)
}

/// Fisher information `∫ (∂p)²/p dx` from densities at `φ ± step` and `φ`.
pub fn pdf_fisher(minus: &[f64], centre: &[f64], plus: &[f64], step: f64, grid: &XGrid) -> f64 {
    let floor = 1e-14 * centre.iter().cloned().fold(0.0, f64::max);
    let integrand: Vec<f64> = centre
        .iter()
        .zip(minus.iter().zip(plus))
        .map(|(&p, (&lo, &hi))| {
            if p > floor {
                let dp = (hi - lo) / (2.0 * step);
                dp * dp / p
            } else {
                0.0
            }
        })
        .collect();
    trapezoid(&integrand, grid.spacing())
}
