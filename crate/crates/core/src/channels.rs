//! Phase encoding with linear Hamiltonian disturbance.
//!
//! Both channels act on the mode as `exp{-i(φ a†a + η·X)}`. With a fixed
//! coefficient on `Q` this is a rotation followed by a φ-dependent
//! displacement. With Gaussian-distributed coefficients on `Q` and `P`,
//! averaging over the displacement adds isotropic noise `4Δ²κ(φ)²` to the
//! covariance, where `κ(φ) = 2 sin(φ/2) / φ`.

use crate::error::{Error, Result};
use crate::gaussian::{rotate, GaussianState, StateDerivatives};
use crate::linalg::{Mat2, Vec2};
use crate::scalar::Real;

/// Below this |φ| the trigonometric ratios switch to their series.
const SMALL_PHI: f64 = 1e-6;
/// Derivatives of the ratios cancel catastrophically sooner than the ratios.
const SMALL_PHI_DERIVATIVE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelModel<T> {
    /// Fixed disturbance `η Q` added to the generator.
    UnitaryDisturbance { eta: T },
    /// Disturbance `η₁ Q + η₂ P` with `η₁, η₂ ~ N(0, Δ²)`, averaged.
    RandomDisturbance { delta: T },
}

impl<T: Real> ChannelModel<T> {
    pub fn unitary(eta: T) -> Result<Self> {
        let model = ChannelModel::UnitaryDisturbance { eta };
        model.validate()?;
        Ok(model)
    }

    pub fn random(delta: T) -> Result<Self> {
        let model = ChannelModel::RandomDisturbance { delta };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::UnitaryDisturbance { eta } if !eta.is_finite() => Err(
                Error::InvalidChannel(format!("disturbance must be finite, got {eta}")),
            ),
            ChannelModel::RandomDisturbance { delta }
                if !(delta >= T::zero()) || !delta.is_finite() =>
            {
                Err(Error::InvalidChannel(format!(
                    "noise standard deviation must be finite and >= 0, got {delta}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Encodes the phase `phi` on `state`.
    pub fn apply(&self, state: &GaussianState<T>, phi: T) -> Result<GaussianState<T>> {
        match *self {
            ChannelModel::UnitaryDisturbance { eta } => {
                Ok(apply_unitary_disturbance(state, phi, eta))
            }
            ChannelModel::RandomDisturbance { delta } => {
                apply_random_disturbance(state, phi, delta)
            }
        }
    }
}

/// `(1 - cos φ) / φ`.
pub(crate) fn versine_ratio<T: Real>(phi: T) -> T {
    if phi.abs() < T::lit(SMALL_PHI) {
        let p2 = phi * phi;
        phi * (T::lit(0.5) - p2 / T::lit(24.0))
    } else {
        let s = (phi / T::lit(2.0)).sin();
        T::lit(2.0) * s * s / phi
    }
}

/// `sin φ / φ`.
pub(crate) fn sinc<T: Real>(phi: T) -> T {
    if phi.abs() < T::lit(SMALL_PHI) {
        let p2 = phi * phi;
        T::one() - p2 / T::lit(6.0) + p2 * p2 / T::lit(120.0)
    } else {
        phi.sin() / phi
    }
}

/// `κ(φ)² = (2 sin(φ/2) / φ)²`.
pub(crate) fn kappa_sq<T: Real>(phi: T) -> T {
    if phi.abs() < T::lit(SMALL_PHI) {
        let p2 = phi * phi;
        T::one() - p2 / T::lit(12.0) + p2 * p2 / T::lit(360.0)
    } else {
        let k = T::lit(2.0) * (phi / T::lit(2.0)).sin() / phi;
        k * k
    }
}

fn versine_ratio_deriv<T: Real>(phi: T) -> T {
    if phi.abs() < T::lit(SMALL_PHI_DERIVATIVE) {
        let p2 = phi * phi;
        T::lit(0.5) - p2 / T::lit(8.0) + p2 * p2 / T::lit(144.0)
    } else {
        sinc(phi) - versine_ratio(phi) / phi
    }
}

fn sinc_deriv<T: Real>(phi: T) -> T {
    if phi.abs() < T::lit(SMALL_PHI_DERIVATIVE) {
        let p2 = phi * phi;
        phi * (-T::one() / T::lit(3.0) + p2 / T::lit(30.0) - p2 * p2 / T::lit(840.0))
    } else {
        (phi.cos() - sinc(phi)) / phi
    }
}

fn kappa_sq_deriv<T: Real>(phi: T) -> T {
    if phi.abs() < T::lit(SMALL_PHI_DERIVATIVE) {
        let p2 = phi * phi;
        phi * (-T::one() / T::lit(6.0) + p2 / T::lit(90.0) - p2 * p2 / T::lit(3360.0))
    } else {
        T::lit(2.0) * (sinc(phi) - kappa_sq(phi)) / phi
    }
}

/// Displacement `d(φ, η)` produced by `exp{-i(φ a†a + η Q)}` on top of the rotation.
pub fn unitary_displacement<T: Real>(phi: T, eta: T) -> Vec2<T> {
    let two_eta = T::lit(2.0) * eta;
    Vec2::new(-two_eta * versine_ratio(phi), -two_eta * sinc(phi))
}

fn unitary_displacement_deriv<T: Real>(phi: T, eta: T) -> Vec2<T> {
    let two_eta = T::lit(2.0) * eta;
    Vec2::new(
        -two_eta * versine_ratio_deriv(phi),
        -two_eta * sinc_deriv(phi),
    )
}

pub fn apply_unitary_disturbance<T: Real>(
    state: &GaussianState<T>,
    phi: T,
    eta: T,
) -> GaussianState<T> {
    let rotated = rotate(state, phi);
    GaussianState::from_parts(rotated.mean + unitary_displacement(phi, eta), rotated.cov)
}

pub fn apply_random_disturbance<T: Real>(
    state: &GaussianState<T>,
    phi: T,
    delta: T,
) -> Result<GaussianState<T>> {
    ChannelModel::RandomDisturbance { delta }.validate()?;
    let rotated = rotate(state, phi);
    let noise = T::lit(4.0) * delta * delta * kappa_sq(phi);
    Ok(GaussianState::from_parts(
        rotated.mean,
        rotated.cov + Mat2::identity().scale(noise),
    ))
}

/// Analytic φ-derivatives of the encoded state family at `phi`.
pub fn channel_derivatives<T: Real>(
    probe: &GaussianState<T>,
    model: &ChannelModel<T>,
    phi: T,
) -> Result<StateDerivatives<T>> {
    model.validate()?;
    let j = Mat2::rotation_generator();
    let rotated = rotate(probe, phi);
    let rot_mean = j.mul_vec(&rotated.mean);
    // commutator with J is traceless, so only the noise term moves the purity
    let rot_cov = j * rotated.cov - rotated.cov * j;
    match *model {
        ChannelModel::UnitaryDisturbance { eta } => Ok(StateDerivatives {
            dmean: rot_mean + unitary_displacement_deriv(phi, eta),
            dcov: rot_cov,
            dpurity: T::zero(),
        }),
        ChannelModel::RandomDisturbance { delta } => {
            let four_d2 = T::lit(4.0) * delta * delta;
            let dnoise = four_d2 * kappa_sq_deriv(phi);
            let cov = rotated.cov + Mat2::identity().scale(four_d2 * kappa_sq(phi));
            let cov_inv = cov
                .inverse()
                .ok_or_else(|| Error::InvalidState("singular covariance after channel".into()))?;
            let mu = T::one() / cov.det().sqrt();
            Ok(StateDerivatives {
                dmean: rot_mean,
                dcov: rot_cov + Mat2::identity().scale(dnoise),
                dpurity: -mu * dnoise * cov_inv.trace() / T::lit(2.0),
            })
        }
    }
}
