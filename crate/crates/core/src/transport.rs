//! One-dimensional quadratic Wasserstein distance via the monotone quantile
//! coupling, and the gap lower-bound check `C_p - sigma^2 >= W2(mu, gamma)^2`.

use crate::error::{Error, Result};
use crate::measures::{summarize, GridMeasure};
use crate::numeric;
use crate::spectral;

/// Default number of midpoint quadrature nodes in probability space.
pub const DEFAULT_W2_NODES: usize = 4096;

/// Quantile function sampled at midpoint probability nodes.
#[derive(Debug, Clone)]
pub struct QuantileTable {
    pub probabilities: Vec<f64>,
    pub quantiles: Vec<f64>,
}

impl QuantileTable {
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// Quantiles of a grid measure at probabilities `us` via monotone
/// piecewise-linear CDF inversion (ties broken by the leftmost node).
pub fn grid_quantiles(mu: &GridMeasure, us: &[f64]) -> Vec<f64> {
    let cdf = mu.cdf();
    let total = *cdf.last().unwrap();
    let n = cdf.len();
    us.iter()
        .map(|&u| {
            let target = u * total;
            let k = cdf.partition_point(|&c| c < target);
            if k == 0 {
                return mu.node(0);
            }
            if k >= n {
                return mu.node(n - 1);
            }
            let (c0, c1) = (cdf[k - 1], cdf[k]);
            if c1 > c0 {
                let t = (target - c0) / (c1 - c0);
                mu.node(k - 1) + t * mu.step()
            } else {
                mu.node(k - 1)
            }
        })
        .collect()
}

/// Quantile table at `m` midpoint nodes.
pub fn quantile_table(mu: &GridMeasure, m: usize) -> Result<QuantileTable> {
    if m < 256 {
        return Err(Error::invalid_parameter("m_nodes", "must be >= 256"));
    }
    let probabilities = numeric::midpoint_probabilities(m);
    let quantiles = grid_quantiles(mu, &probabilities);
    Ok(QuantileTable {
        probabilities,
        quantiles,
    })
}

/// W2 from two quantile samplings on the same midpoint grid.
pub fn w2_from_quantiles(qa: &[f64], qb: &[f64]) -> f64 {
    assert_eq!(qa.len(), qb.len());
    let du = 1.0 / qa.len() as f64;
    let sq: f64 = qa
        .iter()
        .zip(qb)
        .map(|(a, b)| (a - b) * (a - b) * du)
        .sum();
    sq.sqrt()
}

/// Quadratic Wasserstein distance between grid measures by midpoint
/// quadrature of the inverse-CDF formula.
pub fn w2_quantile(mu: &GridMeasure, nu: &GridMeasure, m_nodes: usize) -> Result<f64> {
    if m_nodes < 256 {
        return Err(Error::invalid_parameter("m_nodes", "must be >= 256"));
    }
    let us = numeric::midpoint_probabilities(m_nodes);
    let qa = grid_quantiles(mu, &us);
    let qb = grid_quantiles(nu, &us);
    Ok(w2_from_quantiles(&qa, &qb))
}

/// Result of the gap lower-bound check.
#[derive(Debug, Clone, Copy)]
pub struct GapCheck {
    /// `C_p(mu) - sigma^2(mu)`.
    pub gap: f64,
    /// Squared W2 distance to the Gaussian with matched mean and variance.
    pub w2_sq: f64,
    pub holds: bool,
}

/// Check `C_p(mu) - sigma^2(mu) >= W2(mu, gamma_{sigma^2})^2` (the matched
/// Gaussian has the same mean and variance as `mu`).
pub fn gap_lower_bound_check(mu: &GridMeasure) -> Result<GapCheck> {
    let res = spectral::estimate_cp(mu)?;
    let s = summarize(mu);
    let gap = res.c_p - s.variance;
    let gauss = GridMeasure::gaussian(s.mean, s.variance, 10.0, mu.len().max(2049))?;
    let w2 = w2_quantile(mu, &gauss, DEFAULT_W2_NODES)?;
    let w2_sq = w2 * w2;
    let tol = 1e-3 * gap.abs().max(w2_sq).max(1e-6);
    Ok(GapCheck {
        gap,
        w2_sq,
        holds: gap >= w2_sq - tol,
    })
}
