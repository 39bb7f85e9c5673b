//! Single-mode Gaussian states in phase space.
//!
//! Quadratures are `Q = a + a†` and `P = -i(a - a†)`, so the vacuum has unit
//! covariance matrix. A probe `D(α)S(ξ)|0⟩` is parametrised by its mean photon
//! number `n0`, the fraction `β` of those photons spent on squeezing, and the
//! squeezing angle `θ` (θ = 0 squeezes `Q`, θ = π squeezes `P`).

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};
use crate::scalar::Real;

/// Mean quadrature vector and symmetric covariance matrix of a Gaussian state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianState<T> {
    pub mean: Vec2<T>,
    pub cov: Mat2<T>,
}

/// Pure probe parameters `(n0, β, θ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeSpec<T> {
    pub n0: T,
    pub beta: T,
    pub theta: T,
}

/// Derivatives of an encoded state family with respect to the phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDerivatives<T> {
    pub dmean: Vec2<T>,
    pub dcov: Mat2<T>,
    pub dpurity: T,
}

impl<T: Real> GaussianState<T> {
    /// Builds a state, checking symmetry and the uncertainty bound `det σ ≥ 1`.
    pub fn new(mean: Vec2<T>, cov: Mat2<T>) -> Result<Self> {
        let state = Self { mean, cov };
        state.validate()?;
        Ok(state)
    }

    pub fn vacuum() -> Self {
        Self {
            mean: Vec2::zero(),
            cov: Mat2::identity(),
        }
    }

    pub(crate) fn from_parts(mean: Vec2<T>, cov: Mat2<T>) -> Self {
        Self { mean, cov }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() || !self.cov.is_finite() {
            return Err(Error::InvalidState("non-finite moments".into()));
        }
        if self.cov.asymmetry() > T::tol(1e-12) {
            return Err(Error::InvalidState(format!(
                "covariance not symmetric: {:?}",
                self.cov
            )));
        }
        let det = self.cov.det();
        if self.cov.get(0, 0) <= T::zero() || det <= T::zero() {
            return Err(Error::InvalidState(format!(
                "covariance not positive-definite: {:?}",
                self.cov
            )));
        }
        if det < T::one() - T::tol(1e-9) {
            return Err(Error::InvalidState(format!(
                "covariance violates the uncertainty bound: det = {det}"
            )));
        }
        Ok(())
    }
}

impl<T: Real> ProbeSpec<T> {
    pub fn new(n0: T, beta: T, theta: T) -> Result<Self> {
        let spec = Self { n0, beta, theta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn coherent(n0: T) -> Result<Self> {
        Self::new(n0, T::zero(), T::zero())
    }

    pub fn squeezed_vacuum(n0: T, theta: T) -> Result<Self> {
        Self::new(n0, T::one(), theta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n0 >= T::zero()) || !self.n0.is_finite() {
            return Err(Error::InvalidProbe(format!(
                "photon number must be finite and >= 0, got {}",
                self.n0
            )));
        }
        if !(self.beta >= T::zero() && self.beta <= T::one()) {
            return Err(Error::InvalidProbe(format!(
                "squeezing fraction must lie in [0, 1], got {}",
                self.beta
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidProbe("squeezing angle must be finite".into()));
        }
        Ok(())
    }

    /// Squeezing parameter `r = arcsinh √(β n0)`.
    pub fn squeezing(&self) -> T {
        (self.beta * self.n0).sqrt().asinh()
    }

    /// Real displacement amplitude `α = √((1-β) n0)`.
    pub fn displacement(&self) -> T {
        ((T::one() - self.beta) * self.n0).max(T::zero()).sqrt()
    }
}

/// Phase-space moments of `D(α)S(r e^{iθ})|0⟩`.
pub fn make_probe<T: Real>(spec: &ProbeSpec<T>) -> Result<GaussianState<T>> {
    spec.validate()?;
    let two = T::lit(2.0);
    let s = (spec.beta * spec.n0).sqrt();
    // e^{r} = √x + √(x+1) for r = arcsinh √x
    let stretch = (s + (s * s + T::one()).sqrt()).powi(2);
    let squeeze = T::one() / stretch;
    let rot = Mat2::rotation(spec.theta / two);
    let cov = Mat2::diag(squeeze, stretch).congruence(&rot);
    // exact symmetry regardless of rounding in the congruence
    let off = (cov.get(0, 1) + cov.get(1, 0)) / two;
    let cov = Mat2::new(cov.get(0, 0), off, off, cov.get(1, 1));
    let mean = Vec2::new(two * spec.displacement(), T::zero());
    Ok(GaussianState::from_parts(mean, cov))
}

/// `⟨a†a⟩ = (Tr σ + |X̄|² - 2) / 4`.
pub fn mean_photon_number<T: Real>(state: &GaussianState<T>) -> T {
    let n = (state.cov.trace() + state.mean.norm_sqr() - T::lit(2.0)) / T::lit(4.0);
    if n < T::zero() && n > -T::tol(1e-12) {
        T::zero()
    } else {
        n
    }
}

/// Purity `μ = 1/√det σ`.
pub fn purity<T: Real>(state: &GaussianState<T>) -> Result<T> {
    let det = state.cov.det();
    if !(det > T::zero()) {
        return Err(Error::InvalidState(format!(
            "non-positive covariance determinant {det}"
        )));
    }
    Ok(T::one() / det.sqrt())
}

/// Phase rotation `a → e^{-iφ} a`.
pub fn rotate<T: Real>(state: &GaussianState<T>, phi: T) -> GaussianState<T> {
    let r = Mat2::rotation(phi);
    GaussianState::from_parts(r.mul_vec(&state.mean), state.cov.congruence(&r))
}
