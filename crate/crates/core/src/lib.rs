//! Precision limits for continuous-variable phase estimation when the phase
//! generator carries an unwanted linear term, fixed or Gaussian-random.
//!
//! The phase-space engine ([`gaussian`], [`channels`], [`metrology`]) is
//! generic over the scalar type; the aliases at the crate root fix it to
//! `f64`, which is what the optimizers, the Fock-space oracle and the
//! estimation simulator use.

// `!(x >= 0.0)` style checks are deliberate: NaN has to fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod channels;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod metrology;
pub mod mle;
pub mod optimize;
pub mod quadrature;
pub mod scalar;

pub use channels::{apply_random_disturbance, apply_unitary_disturbance, channel_derivatives};
pub use error::{Error, Result};
pub use gaussian::{make_probe, mean_photon_number, purity, rotate};
pub use metrology::{fi_homodyne, qfi_gaussian, qfi_gbar_unitary, qfi_unitary_closed_form};
pub use scalar::Real;

pub type GaussianState = gaussian::GaussianState<f64>;
pub type ProbeSpec = gaussian::ProbeSpec<f64>;
pub type StateDerivatives = gaussian::StateDerivatives<f64>;
pub type ChannelModel = channels::ChannelModel<f64>;
pub type FisherResult = metrology::FisherResult<f64>;
pub type HomodyneMarginal = metrology::HomodyneMarginal<f64>;
pub type Vec2 = linalg::Vec2<f64>;
pub type Mat2 = linalg::Mat2<f64>;

pub type GaussianStateF32 = gaussian::GaussianState<f32>;
pub type ProbeSpecF32 = gaussian::ProbeSpec<f32>;
pub type ChannelModelF32 = channels::ChannelModel<f32>;
