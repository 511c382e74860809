//! Poincaré-constant estimation for grid measures.
//!
//! The constant is the reciprocal spectral gap of the Neumann
//! Sturm–Liouville operator `-(w f')' = lambda w f` with weight `w` equal to
//! the density. Discretization uses the conservative three-point stencil
//! with midpoint weights `w_{i+1/2}`, giving the generalized pencil
//! `K f = lambda M f` with `K = B' C B` (B the forward-difference map) and
//! diagonal mass `M`.
//!
//! The zero eigenvalue (constant eigenvector) is removed by deflation
//! against the weighted constant vector: passing to difference variables
//! `g = B f` turns the pencil into the positive-definite symmetric
//! tridiagonal problem `A y = lambda y` with
//! `A = C^{1/2} (B M^{-1} B') C^{1/2}`, whose spectrum is exactly the
//! nonzero spectrum of the pencil. The smallest eigenvalue of `A` is the
//! spectral gap; no index bookkeeping around a near-zero mode is needed.

use crate::eigen::SymTridiag;
use crate::error::{Error, Result};
use crate::measures::{summarize, GridMeasure};
use crate::numeric;

/// Relative density threshold for trimming vanishing tails. Kept far below
/// any resolvable density so that exponential-tail windows (e.g. the
/// two-sided exponential at |x| = 60) survive intact.
pub const TRIM_REL: f64 = 1e-30;

/// Estimated Poincaré constant with the extremal eigenfunction and
/// refinement diagnostics.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// Estimated Poincaré constant (1/gap).
    pub c_p: f64,
    /// Spectral gap: smallest nonzero eigenvalue of the weighted operator.
    pub gap: f64,
    /// Extremal eigenfunction on the full grid of the input measure,
    /// mean-centered and normalized to unit Dirichlet energy.
    pub eigenfunction: Vec<f64>,
    /// Mean of the eigenfunction's derivative under the measure.
    pub mean_gradient: f64,
    /// Variance of the eigenfunction's derivative under the measure.
    pub gradient_variance: f64,
    /// Number of grid nodes actually used (after tail trimming).
    pub grid_resolution: usize,
    /// Richardson extrapolation of c_p from a half-resolution solve.
    pub refinement_estimate: f64,
}

/// Two-sided Muckenhoupt bracket `B <= C_p <= 4B`, computed by quadrature
/// independently of the eigensolver.
#[derive(Debug, Clone, Copy)]
pub struct MuckenhouptBracket {
    pub lower: f64,
    pub upper: f64,
}

struct TrimmedGrid {
    start: usize,
    /// renormalized density samples on the trimmed window
    p: Vec<f64>,
    step: f64,
    /// trapezoid masses, summing to 1
    mass: Vec<f64>,
    /// midpoint Dirichlet coefficients c_i = p_{i+1/2} / step (renormalized)
    dirichlet: Vec<f64>,
}

fn trim(mu: &GridMeasure) -> Result<TrimmedGrid> {
    let values = mu.values();
    let n = values.len();
    let threshold = TRIM_REL * mu.peak();
    let start = values.iter().position(|&v| v >= threshold).unwrap_or(0);
    let end = n - 1
        - values
            .iter()
            .rev()
            .position(|&v| v >= threshold)
            .unwrap_or(0);
    if end <= start + 2 {
        return Err(Error::InvalidMeasure(
            "trimmed support has too few nodes".into(),
        ));
    }
    if let Some(k) = values[start..=end].iter().position(|&v| v < threshold) {
        return Err(Error::DisconnectedSupport(format!(
            "node {} inside the trimmed window [{}, {}]",
            start + k,
            start,
            end
        )));
    }
    build_trimmed(&values[start..=end], mu.step(), start)
}

fn build_trimmed(p_raw: &[f64], step: f64, start: usize) -> Result<TrimmedGrid> {
    let n = p_raw.len();
    if n < 4 {
        return Err(Error::InvalidMeasure("fewer than 4 usable nodes".into()));
    }
    let total = numeric::trapezoid(p_raw, step);
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::InvalidMeasure("degenerate trimmed mass".into()));
    }
    let p: Vec<f64> = p_raw.iter().map(|v| v / total).collect();
    let w = numeric::trapezoid_weights(n, step);
    let mass: Vec<f64> = p.iter().zip(&w).map(|(pi, wi)| pi * wi).collect();
    let dirichlet: Vec<f64> = p
        .windows(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]) / step)
        .collect();
    Ok(TrimmedGrid {
        start,
        p,
        step,
        mass,
        dirichlet,
    })
}

impl TrimmedGrid {
    /// Symmetrized difference-space operator whose spectrum is the nonzero
    /// spectrum of the Neumann pencil.
    fn difference_operator(&self) -> SymTridiag {
        let m = &self.mass;
        let c = &self.dirichlet;
        let k = c.len();
        let diag: Vec<f64> = (0..k).map(|i| c[i] * (1.0 / m[i] + 1.0 / m[i + 1])).collect();
        let off: Vec<f64> = (0..k - 1)
            .map(|i| -(c[i] * c[i + 1]).sqrt() / m[i + 1])
            .collect();
        SymTridiag::new(diag, off)
    }

    fn gap(&self) -> f64 {
        self.difference_operator().smallest_eigenvalue()
    }

    /// Half-resolution copy (every other node).
    fn coarsened(&self) -> Result<TrimmedGrid> {
        let p: Vec<f64> = self.p.iter().step_by(2).cloned().collect();
        build_trimmed(&p, 2.0 * self.step, self.start)
    }
}

/// Discrete Rayleigh quotient `Var(f) / Dirichlet(f)` with the same
/// quadrature conventions as the eigensolver (trapezoid masses for the
/// variance, midpoint weights for the energy).
fn rayleigh_quotient(grid: &TrimmedGrid, f: &[f64]) -> Result<f64> {
    let mean: f64 = grid.mass.iter().zip(f).map(|(m, fi)| m * fi).sum();
    let var: f64 = grid
        .mass
        .iter()
        .zip(f)
        .map(|(m, fi)| m * (fi - mean) * (fi - mean))
        .sum();
    let energy: f64 = grid
        .dirichlet
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let d = f[i + 1] - f[i];
            c * d * d
        })
        .sum();
    if energy <= 0.0 {
        return Err(Error::invalid_parameter(
            "f",
            "constant test function has zero Dirichlet energy",
        ));
    }
    Ok(var / energy)
}

/// Mean and variance of the derivative of `f` under the measure, using the
/// midpoint rule that matches the Dirichlet quadrature.
fn gradient_stats(grid: &TrimmedGrid, f: &[f64]) -> (f64, f64, f64) {
    let h = grid.step;
    let q_total: f64 = grid.dirichlet.iter().map(|c| c * h * h).sum();
    let mut mean = 0.0;
    let mut second = 0.0;
    for (i, c) in grid.dirichlet.iter().enumerate() {
        let g = (f[i + 1] - f[i]) / h;
        let q = c * h * h / q_total;
        mean += q * g;
        second += q * g * g;
    }
    (mean, second - mean * mean, second)
}

/// Estimate the Poincaré constant of `mu` by solving the discrete Neumann
/// problem, with a Richardson refinement from a half-resolution solve.
pub fn estimate_cp(mu: &GridMeasure) -> Result<SpectralResult> {
    let grid = trim(mu)?;
    let op = grid.difference_operator();
    let lambda = op.smallest_eigenvalue();
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::EigenSolve(format!(
            "nonpositive spectral gap {lambda:.3e}"
        )));
    }
    let c_p = 1.0 / lambda;

    let coarse = grid.coarsened()?;
    let c_coarse = 1.0 / coarse.gap();
    let refinement_estimate = c_p + (c_p - c_coarse) / 3.0;

    // eigenvector in difference variables, mapped back to node space by
    // f = (1/lambda) M^{-1} B' C g; this form is exactly mean-free and avoids
    // the cancellation a cumulative sum would suffer on growing profiles
    let y = op.eigenvector(lambda)?;
    let k = grid.dirichlet.len();
    let g: Vec<f64> = (0..k)
        .map(|i| y[i] / grid.dirichlet[i].sqrt())
        .collect();
    let mut f = vec![0.0; k + 1];
    for (j, slot) in f.iter_mut().enumerate() {
        let up = if j == 0 {
            0.0
        } else {
            grid.dirichlet[j - 1] * g[j - 1]
        };
        let dn = if j == k { 0.0 } else { grid.dirichlet[j] * g[j] };
        *slot = (up - dn) / (lambda * grid.mass[j]);
    }

    let ray = rayleigh_quotient(&grid, &f)?;
    if (ray - c_p).abs() > 1e-8 * c_p {
        return Err(Error::EigenSolve(format!(
            "eigenfunction Rayleigh quotient {ray:.9e} disagrees with c_p {c_p:.9e}"
        )));
    }

    // normalize to unit Dirichlet energy in the midpoint quadrature
    let (_, _, second_raw) = gradient_stats(&grid, &f);
    let scale = 1.0 / second_raw.sqrt();
    for fi in f.iter_mut() {
        *fi *= scale;
    }
    let (mean_gradient, gradient_variance, _) = gradient_stats(&grid, &f);

    // extend to the full grid by constants (zero gradient off the support)
    let mut full = vec![0.0; mu.len()];
    for (i, slot) in full.iter_mut().enumerate() {
        let j = i.clamp(grid.start, grid.start + f.len() - 1) - grid.start;
        *slot = f[j];
    }

    Ok(SpectralResult {
        c_p,
        gap: lambda,
        eigenfunction: full,
        mean_gradient,
        gradient_variance,
        grid_resolution: grid.p.len(),
        refinement_estimate,
    })
}

/// Two-sided Muckenhoupt criterion: with `m` the median,
/// `B+ = sup_{x>m} mu([x, inf)) * int_m^x 1/p` (and mirrored for `B-`),
/// the Poincaré constant lies in `[B, 4B]` for `B = max(B+, B-)`.
pub fn muckenhoupt_bracket(mu: &GridMeasure) -> Result<MuckenhouptBracket> {
    let grid = trim(mu)?;
    let n = grid.p.len();
    let cdf = numeric::cumulative_trapezoid(&grid.p, grid.step);
    let total = *cdf.last().unwrap();
    let median_idx = cdf
        .iter()
        .position(|&c| c >= 0.5 * total)
        .unwrap_or(n / 2);

    let inv_p: Vec<f64> = grid.p.iter().map(|&v| 1.0 / v).collect();

    let mut b_plus: f64 = 0.0;
    let mut integral = 0.0;
    for i in median_idx + 1..n {
        integral += 0.5 * grid.step * (inv_p[i - 1] + inv_p[i]);
        let tail = (total - cdf[i]).max(0.0);
        b_plus = b_plus.max(tail * integral);
    }
    let mut b_minus: f64 = 0.0;
    integral = 0.0;
    for i in (0..median_idx).rev() {
        integral += 0.5 * grid.step * (inv_p[i] + inv_p[i + 1]);
        b_minus = b_minus.max(cdf[i] * integral);
    }
    let b = b_plus.max(b_minus);
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidMeasure(format!(
            "degenerate Muckenhoupt functional {b:.3e}"
        )));
    }
    Ok(MuckenhouptBracket {
        lower: b,
        upper: 4.0 * b,
    })
}

/// Variance of the derivative of the stored eigenfunction under `mu`;
/// compare against the lower bound `(C_p - s2)^2 / ((C_p - s2)^2 + C_p s2)`.
pub fn extremal_gradient_variance(res: &SpectralResult, mu: &GridMeasure) -> Result<f64> {
    if res.eigenfunction.len() != mu.len() {
        return Err(Error::ShapeMismatch(format!(
            "eigenfunction has {} nodes, measure has {}",
            res.eigenfunction.len(),
            mu.len()
        )));
    }
    let grid = trim(mu)?;
    let f = &res.eigenfunction[grid.start..grid.start + grid.p.len()];
    let (_, var, _) = gradient_stats(&grid, f);
    Ok(var)
}

/// Lower bound on the gradient variance of near-extremal test functions in
/// terms of the constant and the variance.
pub fn gradient_variance_floor(c_p: f64, sigma2: f64) -> f64 {
    let d = c_p - sigma2;
    if d <= 0.0 {
        return 0.0;
    }
    d * d / (d * d + c_p * sigma2)
}

/// Rayleigh quotient of an arbitrary test function on the grid of `mu`:
/// certifies a lower bound on the Poincaré constant.
pub fn rayleigh_lower_bound(mu: &GridMeasure, f: &[f64]) -> Result<f64> {
    if f.len() != mu.len() {
        return Err(Error::ShapeMismatch(format!(
            "test function has {} nodes, measure has {}",
            f.len(),
            mu.len()
        )));
    }
    let grid = trim(mu)?;
    rayleigh_quotient(&grid, &f[grid.start..grid.start + grid.p.len()])
}

/// Convenience: the variance of `mu` with the same quadrature as the solver.
pub fn sigma2(mu: &GridMeasure) -> f64 {
    summarize(mu).variance
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{affine_pushforward, GridMeasure};

    fn std_gaussian() -> GridMeasure {
        GridMeasure::gaussian(0.0, 1.0, 8.0, 4097).unwrap()
    }

    fn uniform01() -> GridMeasure {
        GridMeasure::uniform(0.0, 1.0, 4097).unwrap()
    }

    fn laplace1() -> GridMeasure {
        GridMeasure::laplace(1.0, 60.0, 4097).unwrap()
    }

    #[test]
    fn gaussian_gap_is_one() {
        // Ornstein-Uhlenbeck oracle: lambda_1 = 1/sigma^2
        let res = estimate_cp(&std_gaussian()).unwrap();
        assert!((res.c_p - 1.0).abs() < 1e-3, "c_p {}", res.c_p);
        assert!(
            (res.refinement_estimate - res.c_p).abs() / res.c_p <= 0.01,
            "refinement {} vs {}",
            res.refinement_estimate,
            res.c_p
        );
    }

    #[test]
    fn uniform_gap_is_pi_squared() {
        // Neumann Laplacian oracle on [0,1]: lambda_1 = pi^2
        let res = estimate_cp(&uniform01()).unwrap();
        let exact = 1.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!(
            (res.c_p - exact).abs() / exact < 1e-3,
            "c_p {} vs {exact}",
            res.c_p
        );
    }

    #[test]
    fn laplace_constant_is_four() {
        // classical spectral bottom 1/4 for the two-sided exponential
        let res = estimate_cp(&laplace1()).unwrap();
        assert!((res.c_p - 4.0).abs() / 4.0 < 0.02, "c_p {}", res.c_p);
        let bracket = muckenhoupt_bracket(&laplace1()).unwrap();
        assert!(bracket.lower <= res.c_p * 1.02 && res.c_p <= bracket.upper * 1.02);
    }

    #[test]
    fn muckenhoupt_brackets_contain_known_constants() {
        // analytic oracles: B(uniform) = 1/16, B(laplace) = 1
        let b_uniform = muckenhoupt_bracket(&uniform01()).unwrap();
        assert!(
            (b_uniform.lower - 1.0 / 16.0).abs() < 1e-3,
            "B {}",
            b_uniform.lower
        );
        let pi2 = 1.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!(b_uniform.lower <= pi2 && pi2 <= b_uniform.upper);

        let b_gauss = muckenhoupt_bracket(&std_gaussian()).unwrap();
        assert!(b_gauss.lower <= 1.0 && 1.0 <= b_gauss.upper);

        let b_lap = muckenhoupt_bracket(&laplace1()).unwrap();
        assert!((b_lap.lower - 1.0).abs() < 1e-2, "B {}", b_lap.lower);
    }

    #[test]
    fn eigenfunction_realizes_rayleigh_quotient() {
        for mu in [std_gaussian(), uniform01(), laplace1()] {
            let res = estimate_cp(&mu).unwrap();
            let ray = rayleigh_lower_bound(&mu, &res.eigenfunction).unwrap();
            assert!(
                (ray - res.c_p).abs() <= 1e-8 * res.c_p.max(1.0),
                "{ray} vs {}",
                res.c_p
            );
            assert!(res.gradient_variance >= 0.0 && res.gradient_variance <= 1.0);
        }
    }

    #[test]
    fn linear_test_function_gives_variance() {
        let mu = std_gaussian();
        let f: Vec<f64> = (0..mu.len()).map(|i| mu.node(i)).collect();
        let ray = rayleigh_lower_bound(&mu, &f).unwrap();
        assert!((ray - 1.0).abs() < 1e-4, "ray {ray}");
        let res = estimate_cp(&mu).unwrap();
        assert!(ray <= res.c_p + 1e-6);
    }

    #[test]
    fn quadratic_test_function_on_gaussian() {
        // Var(x^2) / E[(2x)^2] = 2/4 by Gaussian moments
        let mu = std_gaussian();
        let f: Vec<f64> = (0..mu.len()).map(|i| mu.node(i) * mu.node(i)).collect();
        let ray = rayleigh_lower_bound(&mu, &f).unwrap();
        assert!((ray - 0.5).abs() < 1e-3, "ray {ray}");
    }

    #[test]
    fn constant_test_function_is_rejected() {
        let mu = std_gaussian();
        let f = vec![1.0; mu.len()];
        assert!(rayleigh_lower_bound(&mu, &f).is_err());
    }

    #[test]
    fn scaling_covariance() {
        let mu = uniform01();
        let base = estimate_cp(&mu).unwrap().c_p;
        for alpha in [0.5, 2.0, -1.0] {
            let scaled = affine_pushforward(&mu, alpha, 0.0).unwrap();
            let c = estimate_cp(&scaled).unwrap().c_p;
            assert!(
                (c - alpha * alpha * base).abs() <= 1e-3 * alpha * alpha * base,
                "alpha {alpha}: {c}"
            );
        }
    }

    #[test]
    fn gap_floor_c_p_at_least_variance() {
        for mu in [std_gaussian(), uniform01(), laplace1()] {
            let res = estimate_cp(&mu).unwrap();
            let var = sigma2(&mu);
            assert!(res.c_p >= var - 1e-3 * res.c_p, "{} < {var}", res.c_p);
        }
    }

    #[test]
    fn interior_zero_is_an_error() {
        let n = 1024;
        let mut values = vec![1.0; n];
        for v in values.iter_mut().skip(400).take(100) {
            *v = 0.0;
        }
        let mu = GridMeasure::from_samples(0.0, 1.0, values).unwrap();
        match estimate_cp(&mu) {
            Err(Error::DisconnectedSupport(_)) => {}
            other => panic!("expected DisconnectedSupport, got {other:?}"),
        }
    }

    #[test]
    fn extremal_gradient_variance_known_measures() {
        // Gaussian extremizer is linear: variance of the gradient ~ 0
        let g = std_gaussian();
        let res = estimate_cp(&g).unwrap();
        let v = extremal_gradient_variance(&res, &g).unwrap();
        assert!(v <= 0.01, "gaussian gradient variance {v}");

        // Laplace: floor = (4-2)^2/((4-2)^2 + 4*2) = 1/3
        let l = laplace1();
        let res = estimate_cp(&l).unwrap();
        let v = extremal_gradient_variance(&res, &l).unwrap();
        let floor = gradient_variance_floor(res.c_p, sigma2(&l));
        assert!((gradient_variance_floor(4.0, 2.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!(v >= 1.0 / 3.0 - 0.02, "laplace gradient variance {v}");
        assert!(v >= floor - 0.02, "{v} vs floor {floor}");

        // uniform[0,1]
        let u = uniform01();
        let res = estimate_cp(&u).unwrap();
        let v = extremal_gradient_variance(&res, &u).unwrap();
        assert!(v >= 0.0248 - 0.005, "uniform gradient variance {v}");
    }
}
