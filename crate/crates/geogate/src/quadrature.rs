//! Gauss-Hermite quadrature for expectations over Gaussian-distributed
//! error values.
//!
//! Nodes and weights come from the Golub-Welsch construction: eigenvalues of
//! the symmetric tridiagonal Jacobi matrix of the physicists' Hermite
//! recurrence (off-diagonal sqrt(k/2)), with weights sqrt(pi) times the
//! squared first eigenvector components.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Quadrature rule for integrals against exp(-x^2).
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument("order must be >= 2".into()));
        }
        let mut jacobi = DMatrix::<f64>::zeros(order, order);
        for k in 1..order {
            let off = (k as f64 / 2.0).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let eig = jacobi.symmetric_eigen();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let mut pairs: Vec<(f64, f64)> = (0..order)
            .map(|k| {
                let node = eig.eigenvalues[k];
                let v0 = eig.eigenvectors[(0, k)];
                (node, sqrt_pi * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// E[f(eps)] for eps ~ N(0, sigma^2), truncated at |eps| <= trunc_sigmas * sigma.
    ///
    /// Substituting eps = sqrt(2) sigma x maps the Gaussian expectation onto
    /// the exp(-x^2) weight; nodes outside the truncation window are dropped
    /// and the remaining weights renormalized, so the sigma -> 0 limit and
    /// constant integrands stay exact.
    pub fn expect_gaussian<F>(&self, sigma: f64, trunc_sigmas: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if trunc_sigmas.is_nan() || trunc_sigmas <= 0.0 {
            return Err(Error::InvalidArgument("truncation must be positive".into()));
        }
        let scale = std::f64::consts::SQRT_2 * sigma;
        let cut = trunc_sigmas * sigma;
        let mut total_weight = 0.0;
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(self.weights.iter()) {
            let eps = scale * x;
            if eps.abs() > cut {
                continue;
            }
            acc += w * f(eps)?;
            total_weight += w;
        }
        if total_weight <= 0.0 {
            return Err(Error::Numerical(
                "all quadrature nodes fell outside the truncation window".into(),
            ));
        }
        Ok(acc / total_weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for order in [5, 11, 21] {
            let gh = GaussHermite::new(order).unwrap();
            let sum: f64 = gh.weights().iter().sum();
            assert!((sum - std::f64::consts::PI.sqrt()).abs() <= 1e-12);
        }
    }

    #[test]
    fn gaussian_moments() {
        let gh = GaussHermite::new(21).unwrap();
        let sigma = 0.37;
        let m2 = gh.expect_gaussian(sigma, 8.0, |x| Ok(x * x)).unwrap();
        assert!((m2 - sigma * sigma).abs() <= 1e-12);
        let m4 = gh.expect_gaussian(sigma, 8.0, |x| Ok(x.powi(4))).unwrap();
        assert!((m4 - 3.0 * sigma.powi(4)).abs() <= 1e-12);
        let m1 = gh.expect_gaussian(sigma, 8.0, Ok).unwrap();
        assert!(m1.abs() <= 1e-13);
    }

    #[test]
    fn constant_exact_under_truncation() {
        let gh = GaussHermite::new(21).unwrap();
        let v = gh.expect_gaussian(0.1, 4.0, |_| Ok(2.5)).unwrap();
        assert!((v - 2.5).abs() <= 1e-13);
    }

    #[test]
    fn analytic_sin_squared_expectation() {
        // E[sin^2(a x)] = (1 - exp(-2 a^2 sigma^2))/2
        let gh = GaussHermite::new(41).unwrap();
        let (a, sigma) = (std::f64::consts::FRAC_PI_4, 0.2);
        let got = gh
            .expect_gaussian(sigma, 8.0, |x| Ok((a * x).sin().powi(2)))
            .unwrap();
        let expect = 0.5 * (1.0 - (-2.0 * a * a * sigma * sigma).exp());
        assert!((got - expect).abs() <= 1e-10, "{got} vs {expect}");
    }

    #[test]
    fn bad_arguments() {
        assert!(GaussHermite::new(1).is_err());
        let gh = GaussHermite::new(5).unwrap();
        assert!(gh.expect_gaussian(0.0, 4.0, |_| Ok(0.0)).is_err());
        assert!(gh.expect_gaussian(0.1, -1.0, |_| Ok(0.0)).is_err());
    }
}
