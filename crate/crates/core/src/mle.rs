//! Monte-Carlo homodyne experiments and maximum-likelihood phase estimation.

use std::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::make_probe;
use crate::metrology::{fi_homodyne, homodyne_marginal, qfi_gaussian};
use crate::optimize::{golden_section_max, optimize_homodyne};
use crate::{ChannelModel, GaussianState, ProbeSpec};

/// Estimation interval around the working point.
pub const SEARCH_INTERVAL: (f64, f64) = (-0.5, 0.5);
const SEARCH_GRID: usize = 201;
const SEARCH_TOL: f64 = 1e-8;
/// Maximizers closer than this to an end of the interval are flagged.
const BOUNDARY_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub probe: ProbeSpec,
    pub model: ChannelModel,
    pub true_phase: f64,
    pub omega: f64,
    /// Samples per experiment `M`.
    pub samples: usize,
    /// Repetitions `R`.
    pub repetitions: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.probe.validate()?;
        self.model.validate()?;
        if self.samples == 0 || self.repetitions == 0 {
            return Err(Error::InvalidArgument(
                "samples and repetitions must be >= 1".into(),
            ));
        }
        if !self.true_phase.is_finite() || !self.omega.is_finite() {
            return Err(Error::InvalidArgument(
                "phase and angle must be finite".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateFlag {
    /// The likelihood peaks at an end of the search interval.
    Boundary,
    /// All outcomes are identical.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleEstimate {
    pub phi_hat: f64,
    pub log_likelihood: f64,
    pub flag: Option<EstimateFlag>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrbReport {
    pub mse: f64,
    /// `1/(M F)`.
    pub crb: f64,
    /// `mse · M · F`.
    pub ratio: f64,
    /// `1/(M H)`.
    pub qcrb: f64,
    pub fisher: f64,
    pub qfi: f64,
    pub flagged: usize,
}

/// Configurations used to demonstrate Cramér–Rao saturation: each homodyne
/// angle is the optimum at the true phase, `M = R = 1000`.
pub fn demo_configs(seed: u64) -> Result<Vec<ExperimentConfig>> {
    let cases = [
        (ProbeSpec::coherent(1.0)?, ChannelModel::unitary(0.0)?),
        (
            ProbeSpec::squeezed_vacuum(1.0, 0.0)?,
            ChannelModel::unitary(0.5)?,
        ),
        (ProbeSpec::coherent(1.0)?, ChannelModel::random(0.5)?),
        (ProbeSpec::new(1.0, 0.5, PI)?, ChannelModel::random(0.5)?),
    ];
    let true_phase = 0.05;
    cases
        .into_iter()
        .map(|(probe, model)| {
            let (omega, _) = optimize_homodyne(&make_probe(&probe)?, &model, true_phase)?;
            Ok(ExperimentConfig {
                probe,
                model,
                true_phase,
                omega,
                samples: 1000,
                repetitions: 1000,
                seed,
            })
        })
        .collect()
}

/// Standard normal deviate from two 64-bit words (Box–Muller, cosine branch).
fn normal_from(x: u64, y: u64) -> f64 {
    let u1 = ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = (y >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Outcomes of repetition `rep`.
///
/// Each repetition is its own ChaCha stream and sample `k` consumes words
/// `4k..4k+4`, so every outcome is a pure function of `(seed, rep, k)`.
pub fn sample_repetition(config: &ExperimentConfig, rep: usize) -> Result<Vec<f64>> {
    config.validate()?;
    let state = config
        .model
        .apply(&make_probe(&config.probe)?, config.true_phase)?;
    let marginal = homodyne_marginal(&state, config.omega);
    Ok(draw(config, rep, marginal.mean, marginal.variance.sqrt()))
}

fn draw(config: &ExperimentConfig, rep: usize, mean: f64, sd: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(rep as u64);
    rng.set_word_pos(0);
    (0..config.samples)
        .map(|_| {
            let (x, y) = (rng.next_u64(), rng.next_u64());
            mean + sd * normal_from(x, y)
        })
        .collect()
}

/// `R × M` outcome matrix drawn from the homodyne marginal at the true phase.
pub fn sample_homodyne(config: &ExperimentConfig) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let state = config
        .model
        .apply(&make_probe(&config.probe)?, config.true_phase)?;
    let marginal = homodyne_marginal(&state, config.omega);
    let sd = marginal.variance.sqrt();
    Ok((0..config.repetitions)
        .into_par_iter()
        .map(|rep| draw(config, rep, marginal.mean, sd))
        .collect())
}

fn log_likelihood(
    probe: &GaussianState,
    model: &ChannelModel,
    omega: f64,
    phi: f64,
    stats: (f64, f64, f64),
) -> Result<f64> {
    let (n, s1, s2) = stats;
    let m = homodyne_marginal(&model.apply(probe, phi)?, omega);
    let v = m.variance;
    if !(v > 0.0) {
        return Err(Error::InvalidState(format!(
            "non-positive homodyne variance {v}"
        )));
    }
    let rss = s2 - 2.0 * m.mean * s1 + n * m.mean * m.mean;
    Ok(-0.5 * n * (2.0 * PI * v).ln() - rss / (2.0 * v))
}

/// Maximum-likelihood phase on [`SEARCH_INTERVAL`] for Gaussian homodyne data.
pub fn mle_estimate(
    outcomes: &[f64],
    probe: &ProbeSpec,
    model: &ChannelModel,
    omega: f64,
) -> Result<MleEstimate> {
    if outcomes.is_empty() {
        return Err(Error::InvalidArgument("no outcomes".into()));
    }
    let probe = make_probe(probe)?;
    model.validate()?;
    let n = outcomes.len() as f64;
    let s1: f64 = outcomes.iter().sum();
    let s2: f64 = outcomes.iter().map(|x| x * x).sum();
    let stats = (n, s1, s2);
    let ll = |phi: f64| log_likelihood(&probe, model, omega, phi, stats);

    let (lo, hi) = SEARCH_INTERVAL;
    let h = (hi - lo) / (SEARCH_GRID - 1) as f64;
    let mut best = (lo, ll(lo)?);
    for k in 1..SEARCH_GRID {
        let phi = lo + h * k as f64;
        let v = ll(phi)?;
        if v > best.1 {
            best = (phi, v);
        }
    }
    let a = (best.0 - h).max(lo);
    let b = (best.0 + h).min(hi);
    let (x, fx) = golden_section_max(|p| ll(p).unwrap_or(f64::NEG_INFINITY), a, b, SEARCH_TOL);
    if fx > best.1 {
        best = (x, fx);
    }

    let degenerate = outcomes.len() >= 2 && outcomes.iter().all(|&x| x == outcomes[0]);
    let flag = if degenerate {
        Some(EstimateFlag::Degenerate)
    } else if best.0 - lo < BOUNDARY_MARGIN || hi - best.0 < BOUNDARY_MARGIN {
        Some(EstimateFlag::Boundary)
    } else {
        None
    };
    Ok(MleEstimate {
        phi_hat: best.0,
        log_likelihood: best.1,
        flag,
    })
}

/// Empirical mean-squared error of the MLE against the classical and quantum
/// Cramér–Rao bounds.
pub fn crb_check(config: &ExperimentConfig) -> Result<CrbReport> {
    config.validate()?;
    let probe = make_probe(&config.probe)?;
    let phi = config.true_phase;
    let fisher = fi_homodyne(&probe, &config.model, phi, config.omega)?.value;
    let qfi = qfi_gaussian(&probe, &config.model, phi)?.value;
    let state = config.model.apply(&probe, phi)?;
    let marginal = homodyne_marginal(&state, config.omega);
    let sd = marginal.variance.sqrt();

    let estimates = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            let x = draw(config, rep, marginal.mean, sd);
            mle_estimate(&x, &config.probe, &config.model, config.omega)
        })
        .collect::<Result<Vec<_>>>()?;
    // sequential reduction keeps the result independent of the schedule
    let sse: f64 = estimates.iter().map(|e| (e.phi_hat - phi).powi(2)).sum();
    let flagged = estimates.iter().filter(|e| e.flag.is_some()).count();
    let mse = sse / config.repetitions as f64;
    let m = config.samples as f64;
    Ok(CrbReport {
        mse,
        crb: 1.0 / (m * fisher),
        ratio: mse * m * fisher,
        qcrb: 1.0 / (m * qfi),
        fisher,
        qfi,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(
        probe: ProbeSpec,
        model: ChannelModel,
        phi: f64,
        omega: f64,
        m: usize,
        r: usize,
    ) -> ExperimentConfig {
        ExperimentConfig {
            probe,
            model,
            true_phase: phi,
            omega,
            samples: m,
            repetitions: r,
            seed: 42,
        }
    }

    fn mean_var(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        (
            m,
            x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0),
        )
    }

    #[test]
    fn vacuum_samples() {
        let c = config(
            ProbeSpec::coherent(0.0).unwrap(),
            ChannelModel::unitary(0.0).unwrap(),
            0.0,
            0.0,
            100_000,
            1,
        );
        let x = sample_homodyne(&c).unwrap();
        let (m, v) = mean_var(&x[0]);
        assert!(m.abs() < 0.02 && (v - 1.0).abs() < 0.02, "{m} {v}");
    }

    #[test]
    fn noisy_coherent_samples() {
        let c = config(
            ProbeSpec::coherent(1.0).unwrap(),
            ChannelModel::random(0.5).unwrap(),
            0.0,
            0.0,
            100_000,
            1,
        );
        let (m, v) = mean_var(&sample_homodyne(&c).unwrap()[0]);
        assert!((v - 2.0).abs() < 0.03 && (m - 2.0).abs() < 0.03, "{m} {v}");
    }

    #[test]
    fn sampling_is_reproducible_and_addressable() {
        let c = config(
            ProbeSpec::new(1.0, 0.5, 0.3).unwrap(),
            ChannelModel::random(0.2).unwrap(),
            0.1,
            0.4,
            50,
            7,
        );
        let a = sample_homodyne(&c).unwrap();
        let b = sample_homodyne(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(sample_repetition(&c, 5).unwrap(), a[5]);
        assert_ne!(a[0], a[1]);
        let other = ExperimentConfig { seed: 43, ..c };
        assert_ne!(sample_homodyne(&other).unwrap()[0], a[0]);
    }

    #[test]
    fn estimate_is_consistent() {
        let probe = ProbeSpec::coherent(1.0).unwrap();
        let model = ChannelModel::unitary(0.0).unwrap();
        let c = config(probe, model, 0.0, PI / 2.0, 200_000, 1);
        let x = sample_repetition(&c, 0).unwrap();
        let e = mle_estimate(&x, &probe, &model, PI / 2.0).unwrap();
        assert!(e.phi_hat.abs() < 0.01 && e.flag.is_none(), "{e:?}");
    }

    #[test]
    fn estimate_within_three_sigma() {
        let probe = ProbeSpec::coherent(1.0).unwrap();
        let model = ChannelModel::unitary(0.0).unwrap();
        let omega = PI / 2.0;
        let c = config(probe, model, 0.1, omega, 10_000, 1);
        let x = sample_repetition(&c, 0).unwrap();
        let e = mle_estimate(&x, &probe, &model, omega).unwrap();
        let f = fi_homodyne(&make_probe(&probe).unwrap(), &model, 0.1, omega)
            .unwrap()
            .value;
        let sigma = 1.0 / (10_000.0 * f).sqrt();
        assert!(
            (e.phi_hat - 0.1).abs() < 3.0 * sigma,
            "{} vs {sigma}",
            e.phi_hat
        );
    }

    #[test]
    fn degenerate_and_boundary_flags() {
        let probe = ProbeSpec::coherent(1.0).unwrap();
        let model = ChannelModel::unitary(0.0).unwrap();
        let e = mle_estimate(&[1.0; 20], &probe, &model, PI / 2.0).unwrap();
        assert_eq!(e.flag, Some(EstimateFlag::Degenerate));
        // mean 2 sin φ far above anything reachable on the interval
        let e = mle_estimate(&[5.0, 5.1, 4.9], &probe, &model, PI / 2.0).unwrap();
        assert_eq!(e.flag, Some(EstimateFlag::Boundary));
        assert!((e.phi_hat - 0.5).abs() < 1e-6);
        assert!(mle_estimate(&[], &probe, &model, 0.0).is_err());
    }

    #[test]
    fn single_sample_ratio_is_positive() {
        let c = config(
            ProbeSpec::coherent(1.0).unwrap(),
            ChannelModel::unitary(0.0).unwrap(),
            0.05,
            PI / 2.0,
            1,
            200,
        );
        let r = crb_check(&c).unwrap();
        assert!(r.ratio > 0.0 && r.mse > 0.0);
    }

    #[test]
    fn demo_configs_saturate_the_bound() {
        for c in demo_configs(42).unwrap() {
            let r = crb_check(&c).unwrap();
            assert!((0.9..=1.2).contains(&r.ratio), "{c:?}: {r:?}");
            assert!(r.mse >= 0.95 * r.qcrb, "{c:?}: {r:?}");
            assert_eq!(r.flagged, 0);
        }
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let c = ExperimentConfig {
            samples: 200,
            repetitions: 64,
            ..demo_configs(7).unwrap()[3]
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| (crb_check(&c).unwrap(), sample_homodyne(&c).unwrap()))
        };
        let (a, xa) = run(1);
        let (b, xb) = run(3);
        assert_eq!(a.mse.to_bits(), b.mse.to_bits());
        assert_eq!(xa, xb);
    }

    #[test]
    fn invalid_config_rejected() {
        let c = config(
            ProbeSpec::coherent(1.0).unwrap(),
            ChannelModel::unitary(0.0).unwrap(),
            0.0,
            0.0,
            0,
            1,
        );
        assert!(matches!(
            sample_homodyne(&c),
            Err(Error::InvalidArgument(_))
        ));
    }
}
