//! Quantum and homodyne Fisher information for Gaussian phase encoding.

use crate::channels::{channel_derivatives, versine_ratio, ChannelModel};
use crate::error::{Error, Result};
use crate::gaussian::{purity, GaussianState};
use crate::linalg::Vec2;
use crate::scalar::Real;

/// Below this |μ'| the purity-derivative term is taken as exactly zero.
const PURITY_DERIV_FLOOR: f64 = 1e-9;
/// `1 - μ⁴` below this is treated as a pure state.
const PURE_STATE_GAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FisherResult<T> {
    pub value: T,
    pub working_point: T,
    pub probe: GaussianState<T>,
    pub model: ChannelModel<T>,
}

/// Outcome distribution of a homodyne measurement of `X_ω = Q cos ω - P sin ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomodyneMarginal<T> {
    pub mean: T,
    pub variance: T,
}

fn clamp_fisher<T: Real>(value: T) -> Result<T> {
    if value >= T::zero() {
        Ok(value)
    } else if value > -T::tol(1e-9) {
        Ok(T::zero())
    } else {
        Err(Error::NumericalSingularity(format!(
            "negative Fisher information {value}"
        )))
    }
}

/// Quantum Fisher information of the encoded Gaussian family.
///
/// `H = ½ Tr[(σ⁻¹σ')²]/(1+μ²) + 2μ'²/(1-μ⁴) + X̄'ᵀσ⁻¹X̄'`, everything evaluated
/// on the output state at `phi`.
pub fn qfi_gaussian<T: Real>(
    probe: &GaussianState<T>,
    model: &ChannelModel<T>,
    phi: T,
) -> Result<FisherResult<T>> {
    let state = model.apply(probe, phi)?;
    let d = channel_derivatives(probe, model, phi)?;
    let cov_inv = state
        .cov
        .inverse()
        .ok_or_else(|| Error::InvalidState("singular covariance".into()))?;
    let mu = purity(&state)?;

    let a = cov_inv * d.dcov;
    let cov_term = (a * a).trace() / (T::lit(2.0) * (T::one() + mu * mu));

    let purity_term = if d.dpurity.abs() < T::lit(PURITY_DERIV_FLOOR) {
        T::zero()
    } else {
        let gap = T::one() - mu.powi(4);
        if gap < T::lit(PURE_STATE_GAP) {
            return Err(Error::NumericalSingularity(format!(
                "purity derivative {} on a pure state",
                d.dpurity
            )));
        }
        T::lit(2.0) * d.dpurity * d.dpurity / gap
    };

    let mean_term = cov_inv.quad_form(&d.dmean);
    Ok(FisherResult {
        value: clamp_fisher(cov_term + purity_term + mean_term)?,
        working_point: phi,
        probe: *probe,
        model: *model,
    })
}

/// Maximum QFI at φ = 0 for unitary disturbance (squeezed vacuum, θ = 0):
/// `8n0(n0+1) + (2n0 + 2√(n0(n0+1)) + 1)η²`.
pub fn qfi_unitary_closed_form<T: Real>(n0: T, eta: T) -> T {
    let two = T::lit(2.0);
    T::lit(8.0) * n0 * (n0 + T::one())
        + (two * n0 + two * (n0 * (n0 + T::one())).sqrt() + T::one()) * eta * eta
}

/// Homodyne direction `u(ω) = (cos ω, -sin ω)`.
pub fn homodyne_direction<T: Real>(omega: T) -> Vec2<T> {
    let (s, c) = omega.sin_cos();
    Vec2::new(c, -s)
}

pub fn homodyne_marginal<T: Real>(state: &GaussianState<T>, omega: T) -> HomodyneMarginal<T> {
    let u = homodyne_direction(omega);
    HomodyneMarginal {
        mean: u.dot(&state.mean),
        variance: state.cov.quad_form(&u),
    }
}

/// Classical Fisher information of homodyne detection at angle `omega`.
pub fn fi_homodyne<T: Real>(
    probe: &GaussianState<T>,
    model: &ChannelModel<T>,
    phi: T,
    omega: T,
) -> Result<FisherResult<T>> {
    let state = model.apply(probe, phi)?;
    let d = channel_derivatives(probe, model, phi)?;
    let u = homodyne_direction(omega);
    let v = state.cov.quad_form(&u);
    if !(v > T::zero()) {
        return Err(Error::InvalidState(format!(
            "non-positive homodyne variance {v}"
        )));
    }
    let dm = u.dot(&d.dmean);
    let dv = d.dcov.quad_form(&u);
    Ok(FisherResult {
        value: clamp_fisher(dm * dm / v + dv * dv / (T::lit(2.0) * v * v))?,
        working_point: phi,
        probe: *probe,
        model: *model,
    })
}

/// `(1 - sin φ/φ) / φ`, series near zero where the difference cancels.
fn sinc_defect<T: Real>(phi: T) -> T {
    if phi.abs() < T::lit(1e-2) {
        let p2 = phi * phi;
        phi * (T::one() / T::lit(6.0)
            + p2 * (-T::one() / T::lit(120.0)
                + p2 * (T::one() / T::lit(5040.0) - p2 / T::lit(362_880.0))))
    } else {
        (phi - phi.sin()) / (phi * phi)
    }
}

/// QFI of a pure probe under unitary disturbance as `4 Var(Ḡ)`.
///
/// `Ḡ = ∫₀¹ a†(t)a(t) dt` with `a(t) = e^{-iφt}a - (η/φ)(1 - e^{-iφt})` is
/// `a†a + A a + A* a† + const`; in quadratures this is `XᵀX/4 + lᵀX`, whose
/// variance on a Gaussian state follows from its first two moments.
pub fn qfi_gbar_unitary<T: Real>(
    probe: &GaussianState<T>,
    phi: T,
    eta: T,
) -> Result<FisherResult<T>> {
    let mu = purity(probe)?;
    if mu < T::one() - T::tol(1e-9) {
        return Err(Error::UnsupportedInput(format!(
            "generator-variance formula needs a pure probe, purity = {mu}"
        )));
    }
    let model = ChannelModel::unitary(eta)?;
    // A = η(1 - sinc φ)/φ + iη(1 - cos φ)/φ²
    let a_re = eta * sinc_defect(phi);
    let a_im = eta
        * if phi == T::zero() {
            T::lit(0.5)
        } else if phi.abs() < T::lit(1e-6) {
            T::lit(0.5) - phi * phi / T::lit(24.0)
        } else {
            versine_ratio(phi) / phi
        };
    let linear = Vec2::new(a_re, -a_im);

    let sigma = probe.cov;
    let quarter = T::lit(0.25);
    // Var(XᵀKX) = 2Tr[(Kσ)²] + ½Tr[(KΩ)²] with K = I/4 and [Q, P] = 2i
    let quadratic_var = (sigma * sigma).trace() / T::lit(8.0) - quarter;
    let shift = probe.mean.scale(T::lit(0.5)) + linear;
    let linear_var = sigma.quad_form(&shift);
    let var = quadratic_var + linear_var;
    Ok(FisherResult {
        value: clamp_fisher(T::lit(4.0) * var)?,
        working_point: phi,
        probe: *probe,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{make_probe, ProbeSpec};
    use crate::linalg::Mat2;
    use std::f64::consts::PI;

    fn probe(n0: f64, beta: f64, theta: f64) -> GaussianState<f64> {
        make_probe(&ProbeSpec::new(n0, beta, theta).unwrap()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn qfi_examples() {
        let unitary0 = ChannelModel::UnitaryDisturbance { eta: 0.0 };
        let h = qfi_gaussian(&probe(1.0, 1.0, 0.0), &unitary0, 0.0).unwrap();
        assert!(rel(h.value, 16.0) < 1e-12);

        let h = qfi_gaussian(
            &GaussianState::vacuum(),
            &ChannelModel::UnitaryDisturbance { eta: 1.0 },
            0.0,
        )
        .unwrap();
        assert!(rel(h.value, 1.0) < 1e-12);

        let noisy = ChannelModel::RandomDisturbance { delta: 0.5 };
        let h = qfi_gaussian(&probe(1.0, 0.0, 0.0), &noisy, 0.0).unwrap();
        assert!(rel(h.value, 2.0) < 1e-12);
        let h = qfi_gaussian(&probe(1.0, 1.0, 0.0), &noisy, 0.0).unwrap();
        assert!(rel(h.value, 16.0 / 4.5) < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(qfi_unitary_closed_form(1.0, 0.0), 16.0);
        assert!((qfi_unitary_closed_form(0.0, 1.5) - 2.25_f64).abs() < 1e-15);
        let expected = 53.0 + 2.0 * 6.0_f64.sqrt();
        assert!(rel(qfi_unitary_closed_form(2.0, 1.0), expected) < 1e-15);
        assert!((expected - 57.899).abs() < 1e-3);
    }

    #[test]
    fn closed_form_matches_gaussian_engine() {
        for &n0 in &[0.0, 0.1, 1.0, 10.0, 100.0] {
            for &eta in &[0.0, 0.5, 1.0, 1.5] {
                let h = qfi_gaussian(
                    &probe(n0, 1.0, 0.0),
                    &ChannelModel::UnitaryDisturbance { eta },
                    0.0,
                )
                .unwrap()
                .value;
                let c = qfi_unitary_closed_form(n0, eta);
                if c == 0.0 {
                    assert!(h.abs() < 1e-12);
                } else {
                    assert!(rel(h, c) < 1e-9, "{n0} {eta}: {h} vs {c}");
                }
            }
        }
    }

    #[test]
    fn homodyne_examples() {
        let unitary0 = ChannelModel::UnitaryDisturbance { eta: 0.0 };
        for &omega in &[0.0, 0.4, 2.0] {
            let f = fi_homodyne(&GaussianState::vacuum(), &unitary0, 0.0, omega).unwrap();
            assert_eq!(f.value, 0.0);
        }
        // coherent probe: read out P, the direction the mean moves in
        let noisy = ChannelModel::RandomDisturbance { delta: 0.5 };
        let f = fi_homodyne(&probe(1.0, 0.0, 0.0), &noisy, 0.0, PI / 2.0).unwrap();
        assert!(rel(f.value, 2.0) < 1e-12);
        // squeezed vacuum, noiseless: 45 degrees between the squeezed axes
        let f = fi_homodyne(&probe(1.0, 1.0, 0.0), &unitary0, 0.0, PI / 4.0).unwrap();
        assert!(f.value <= 16.0 + 1e-9);
    }

    #[test]
    fn homodyne_is_bounded_by_qfi() {
        let models = [
            ChannelModel::UnitaryDisturbance { eta: 0.0 },
            ChannelModel::UnitaryDisturbance { eta: 0.7 },
            ChannelModel::RandomDisturbance { delta: 0.4 },
            ChannelModel::RandomDisturbance { delta: 1.3 },
        ];
        for model in &models {
            for &(n0, beta, theta) in &[(0.5, 0.5, 0.0), (2.0, 1.0, PI), (3.0, 0.2, 1.0)] {
                let p = probe(n0, beta, theta);
                for &phi in &[0.0, 0.2] {
                    let h = qfi_gaussian(&p, model, phi).unwrap().value;
                    for k in 0..36 {
                        let omega = k as f64 * PI / 36.0;
                        let f = fi_homodyne(&p, model, phi, omega).unwrap().value;
                        assert!(
                            f <= h * (1.0 + 1e-6) + 1e-12,
                            "{model:?} {omega}: {f} > {h}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn squeezed_vacuum_random_qfi_is_theta_independent() {
        for &n0 in &[0.3, 1.0, 5.0] {
            for &delta in &[0.2, 0.8] {
                let model = ChannelModel::RandomDisturbance { delta };
                let values: Vec<f64> = (0..16)
                    .map(|k| {
                        let theta = k as f64 * 2.0 * PI / 16.0;
                        qfi_gaussian(&probe(n0, 1.0, theta), &model, 0.0)
                            .unwrap()
                            .value
                    })
                    .collect();
                let max = values.iter().cloned().fold(f64::MIN, f64::max);
                let min = values.iter().cloned().fold(f64::MAX, f64::min);
                assert!(max - min < 1e-10, "{n0} {delta}: spread {}", max - min);
            }
        }
    }

    #[test]
    fn random_qfi_decreases_with_noise() {
        for &n0 in &[0.5, 2.0, 10.0] {
            let p = probe(n0, 1.0, 0.0);
            let mut last = f64::INFINITY;
            for k in 0..=40 {
                let delta = k as f64 * 0.05;
                let h = qfi_gaussian(&p, &ChannelModel::RandomDisturbance { delta }, 0.0)
                    .unwrap()
                    .value;
                assert!(h <= last + 1e-12);
                last = h;
            }
        }
    }

    #[test]
    fn gbar_examples() {
        let h = qfi_gbar_unitary(&probe(1.0, 1.0, 0.0), 0.0, 0.0).unwrap();
        assert!(rel(h.value, 16.0) < 1e-12);
        let h = qfi_gbar_unitary(&GaussianState::vacuum(), 0.0, 1.0).unwrap();
        assert!(rel(h.value, 1.0) < 1e-12);

        let p = probe(0.5, 0.5, PI / 4.0);
        let g = qfi_gbar_unitary(&p, 0.3, 0.7).unwrap().value;
        let h = qfi_gaussian(&p, &ChannelModel::UnitaryDisturbance { eta: 0.7 }, 0.3)
            .unwrap()
            .value;
        assert!(rel(g, h) < 1e-8, "{g} vs {h}");
    }

    #[test]
    fn gbar_rejects_mixed_probe() {
        let thermal = GaussianState::new(Vec2::zero(), Mat2::identity().scale(1.5)).unwrap();
        assert!(matches!(
            qfi_gbar_unitary(&thermal, 0.0, 1.0),
            Err(Error::UnsupportedInput(_))
        ));
    }

    #[test]
    fn single_precision_monras_limit() {
        let p = make_probe(&ProbeSpec::new(1.0_f32, 1.0, 0.0).unwrap()).unwrap();
        let h = qfi_gaussian(&p, &ChannelModel::UnitaryDisturbance { eta: 0.0 }, 0.0).unwrap();
        assert!((h.value - 16.0).abs() < 1e-3);
        let g = qfi_gbar_unitary(&p, 0.0, 0.0).unwrap();
        assert!((g.value - 16.0).abs() < 1e-3);
    }
}
