//! Gauss–Hermite quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights for `∫ e^{-x²} f(x) dx ≈ Σ wᵢ f(xᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Roots of the Hermite polynomial of degree `order` by Newton iteration on
    /// the orthonormal recurrence. Nodes come out in descending order and are
    /// exactly antisymmetric.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "quadrature order must be >= 1".into(),
            ));
        }
        let n = order;
        let pim4 = PI.powf(-0.25);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mut z = 0.0_f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => {
                    (2.0 * n as f64 + 1.0).sqrt()
                        - 1.855_75 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0)
                }
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut converged = false;
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Oracle(format!(
                    "Gauss-Hermite root {i} of order {n} did not converge"
                )));
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and probability weights for `E[f(η)]` with `η ~ N(0, σ²)`.
    pub fn normal(&self, sigma: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let scale = std::f64::consts::SQRT_2 * sigma;
        let norm = 1.0 / PI.sqrt();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (scale * x, w * norm))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_gaussian_moments() {
        for &order in &[5, 20, 40, 80] {
            let gh = GaussHermite::new(order).unwrap();
            let sum: f64 = gh.weights.iter().sum();
            assert!((sum - PI.sqrt()).abs() < 1e-13, "order {order}");
            let m2: f64 = gh
                .nodes
                .iter()
                .zip(&gh.weights)
                .map(|(x, w)| w * x * x)
                .sum();
            assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-13);
            let m4: f64 = gh
                .nodes
                .iter()
                .zip(&gh.weights)
                .map(|(x, w)| w * x.powi(4))
                .sum();
            assert!((m4 - 3.0 * PI.sqrt() / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nodes_are_antisymmetric() {
        let gh = GaussHermite::new(41).unwrap();
        for i in 0..41 {
            assert_eq!(gh.nodes[i], -gh.nodes[40 - i]);
            assert_eq!(gh.weights[i], gh.weights[40 - i]);
        }
        assert_eq!(gh.nodes[20], 0.0);
    }

    #[test]
    fn normal_expectation_of_cosine() {
        // E[cos η] = exp(-σ²/2)
        let gh = GaussHermite::new(40).unwrap();
        let sigma = 1.3;
        let e: f64 = gh.normal(sigma).map(|(x, w)| w * x.cos()).sum();
        assert!((e - (-sigma * sigma / 2.0).exp()).abs() < 1e-14);
    }

    #[test]
    fn zero_order_rejected() {
        assert!(GaussHermite::new(0).is_err());
    }
}
