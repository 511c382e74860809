//! Probability measures on a uniform 1-D grid and their basic calculus.
//!
//! `GridMeasure` is the workhorse: a nonnegative density sampled on a uniform
//! grid over an explicit window, renormalized so the trapezoidal integral is
//! exactly 1. Atomic and Gaussian-mixture specifications materialize onto
//! grids; pure atoms have no density and must be smoothed first.

use crate::error::{Error, Result};
use crate::numeric;

/// Minimum admissible number of grid nodes.
pub const MIN_GRID: usize = 16;

/// Density floor used by the Fisher-information quadrature.
pub const FISHER_FLOOR: f64 = 1e-300;

/// Fisher integrals beyond this are reported as the +infinity sentinel.
pub const FISHER_OVERFLOW: f64 = 1e12;

/// Relative edge density above which the represented measure has a genuine
/// jump at its support boundary, making the Fisher information infinite.
const BOUNDARY_JUMP: f64 = 1e-6;

/// Default window half-width in standard deviations for materialization.
pub const DEFAULT_WINDOW_SIGMAS: f64 = 10.0;

/// Default grid resolution.
pub const DEFAULT_N_GRID: usize = 4097;

/// A nonnegative density sampled at `n` uniform nodes on `[lo, hi]`,
/// normalized so the trapezoidal integral equals 1.
#[derive(Debug, Clone)]
pub struct GridMeasure {
    lo: f64,
    hi: f64,
    step: f64,
    values: Vec<f64>,
}

/// Moments and Fisher information of a grid measure.
#[derive(Debug, Clone, Copy)]
pub struct MeasureSummary {
    pub mean: f64,
    /// Variance; equals sigma^2 in one dimension.
    pub variance: f64,
    /// `f64::INFINITY` when the density has a boundary jump or the
    /// quadrature exceeds the overflow guard.
    pub fisher_information: f64,
    /// Number of nodes excluded from the Fisher quadrature by the floor.
    pub fisher_nodes_excluded: usize,
}

/// Mixture of Gaussian components (weight, mean, variance).
#[derive(Debug, Clone)]
pub struct GaussianMixtureSpec {
    components: Vec<(f64, f64, f64)>,
}

/// Finitely many atoms (location, weight). Atoms never enter spectral
/// estimation directly; they are smoothed into a `GridMeasure` first.
#[derive(Debug, Clone)]
pub struct DiscreteAtoms {
    atoms: Vec<(f64, f64)>,
}

impl GridMeasure {
    /// Build from raw density samples; renormalizes to unit mass.
    pub fn from_samples(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::InvalidMeasure(format!(
                "window [{lo}, {hi}] is not a valid interval"
            )));
        }
        if values.len() < MIN_GRID {
            return Err(Error::InvalidMeasure(format!(
                "{} grid nodes < minimum {MIN_GRID}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidMeasure(
                "density samples must be finite and nonnegative".into(),
            ));
        }
        let step = (hi - lo) / (values.len() - 1) as f64;
        let mass = numeric::trapezoid(&values, step);
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidMeasure(format!("total mass {mass} unusable")));
        }
        let values = values.iter().map(|v| v / mass).collect();
        Ok(GridMeasure {
            lo,
            hi,
            step,
            values,
        })
    }

    /// Sample a density function on `n` uniform nodes over `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < MIN_GRID {
            return Err(Error::InvalidMeasure(format!("n_grid {n} < {MIN_GRID}")));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let values: Vec<f64> = (0..n).map(|i| f(lo + step * i as f64).max(0.0)).collect();
        GridMeasure::from_samples(lo, hi, values)
    }

    /// Uniform density on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if b <= a {
            return Err(Error::invalid_parameter("uniform", "requires a < b"));
        }
        GridMeasure::from_fn(a, b, n, |_| 1.0)
    }

    /// Two-sided exponential with the given scale on `[-halfwidth, halfwidth]`.
    pub fn laplace(scale: f64, halfwidth: f64, n: usize) -> Result<Self> {
        if scale <= 0.0 {
            return Err(Error::invalid_parameter("scale", "must be positive"));
        }
        GridMeasure::from_fn(-halfwidth, halfwidth, n, |x| {
            (-(x.abs()) / scale).exp() / (2.0 * scale)
        })
    }

    /// Exponential with the given rate on `[0, width]`.
    pub fn exponential(rate: f64, width: f64, n: usize) -> Result<Self> {
        if rate <= 0.0 {
            return Err(Error::invalid_parameter("rate", "must be positive"));
        }
        GridMeasure::from_fn(0.0, width, n, |x| rate * (-rate * x).exp())
    }

    /// Standard-normal-family convenience constructor.
    pub fn gaussian(mean: f64, variance: f64, window_sigmas: f64, n: usize) -> Result<Self> {
        GaussianMixtureSpec::new(vec![(1.0, mean, variance)])?.materialize(window_sigmas, n)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + self.step * i as f64
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Trapezoidal mass (1 up to rounding, by construction).
    pub fn mass(&self) -> f64 {
        numeric::trapezoid(&self.values, self.step)
    }

    /// Trapezoidal CDF sampled at the grid nodes.
    pub fn cdf(&self) -> Vec<f64> {
        numeric::cumulative_trapezoid(&self.values, self.step)
    }

    /// Evaluate the density between nodes with the monotone cubic interpolant.
    pub fn interpolant(&self) -> numeric::MonotoneCubic {
        numeric::MonotoneCubic::new(self.lo, self.step, &self.values)
    }
}

impl GaussianMixtureSpec {
    pub fn new(components: Vec<(f64, f64, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid_parameter("components", "empty mixture"));
        }
        let wsum: f64 = components.iter().map(|c| c.0).sum();
        if (wsum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid_parameter(
                "weights",
                format!("sum to {wsum}, expected 1 within 1e-12"),
            ));
        }
        for &(w, _, v) in &components {
            if w <= 0.0 || w > 1.0 {
                return Err(Error::invalid_parameter("weight", "must lie in (0, 1]"));
            }
            if v <= 0.0 {
                return Err(Error::invalid_parameter("variance", "must be positive"));
            }
        }
        Ok(GaussianMixtureSpec { components })
    }

    pub fn components(&self) -> &[(f64, f64, f64)] {
        &self.components
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(|&(w, m, _)| w * m).sum()
    }

    /// Total variance: within-component plus between-component.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.components
            .iter()
            .map(|&(w, m, v)| w * (v + (m - mean) * (m - mean)))
            .sum()
    }

    pub fn density(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|&(w, m, v)| w * numeric::normal_pdf(x, m, v))
            .sum()
    }

    /// Evaluate the exact mixture density on a grid covering
    /// `mean ± window_sigmas · stddev`.
    pub fn materialize(&self, window_sigmas: f64, n_grid: usize) -> Result<GridMeasure> {
        if window_sigmas <= 0.0 {
            return Err(Error::invalid_parameter("window_sigmas", "must be positive"));
        }
        if n_grid < MIN_GRID {
            return Err(Error::invalid_parameter(
                "n_grid",
                format!("{n_grid} < minimum {MIN_GRID}"),
            ));
        }
        let mean = self.mean();
        let sd = self.variance().sqrt();
        let half = window_sigmas * sd;
        GridMeasure::from_fn(mean - half, mean + half, n_grid, |x| self.density(x))
    }
}

impl DiscreteAtoms {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid_parameter("atoms", "empty atom list"));
        }
        let wsum: f64 = atoms.iter().map(|a| a.1).sum();
        if (wsum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid_parameter(
                "weights",
                format!("sum to {wsum}, expected 1 within 1e-12"),
            ));
        }
        for &(_, w) in &atoms {
            if w <= 0.0 || w > 1.0 {
                return Err(Error::invalid_parameter("weight", "must lie in (0, 1]"));
            }
        }
        let mut locs: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        locs.sort_by(f64::total_cmp);
        if locs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid_parameter("locations", "must be distinct"));
        }
        Ok(DiscreteAtoms { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * x).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.atoms
            .iter()
            .map(|&(x, w)| w * (x - mean) * (x - mean))
            .sum()
    }

    /// Smooth by an independent `N(0, delta2)` and return the exact mixture.
    pub fn smoothed(&self, delta2: f64) -> Result<GaussianMixtureSpec> {
        if delta2 <= 0.0 {
            return Err(Error::invalid_parameter(
                "delta2",
                "pure atoms cannot be a grid measure; smoothing variance must be positive",
            ));
        }
        GaussianMixtureSpec::new(self.atoms.iter().map(|&(x, w)| (w, x, delta2)).collect())
    }

    /// Law of the sum of `n` independent copies: exact atomic convolution.
    pub fn iid_sum(&self, n: usize) -> Result<DiscreteAtoms> {
        if n < 1 {
            return Err(Error::invalid_parameter("n", "must be >= 1"));
        }
        let mut acc = self.atoms.clone();
        for _ in 1..n {
            let mut merged: Vec<(f64, f64)> = Vec::with_capacity(acc.len() * self.atoms.len());
            for &(xa, wa) in &acc {
                for &(xb, wb) in &self.atoms {
                    merged.push((xa + xb, wa * wb));
                }
            }
            merged.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut folded: Vec<(f64, f64)> = Vec::new();
            for (x, w) in merged {
                match folded.last_mut() {
                    Some(last) if last.0 == x => last.1 += w,
                    _ => folded.push((x, w)),
                }
            }
            acc = folded;
        }
        // weights sum to 1 up to rounding; rescale so the constructor accepts
        let total: f64 = acc.iter().map(|a| a.1).sum();
        DiscreteAtoms::new(acc.into_iter().map(|(x, w)| (x, w / total)).collect())
    }

    /// Atoms of the centered, `1/sqrt(n)`-scaled sum of `n` copies.
    pub fn standardized_sum(&self, n: usize) -> Result<DiscreteAtoms> {
        let sum = self.iid_sum(n)?;
        let shift = sum.mean();
        let scale = 1.0 / (n as f64).sqrt();
        DiscreteAtoms::new(
            sum.atoms
                .iter()
                .map(|&(x, w)| ((x - shift) * scale, w))
                .collect(),
        )
    }

    /// Step quantile function evaluated at probabilities `us` (each in (0,1)).
    pub fn quantiles_at(&self, us: &[f64]) -> Vec<f64> {
        let mut sorted = self.atoms.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cum = Vec::with_capacity(sorted.len());
        let mut acc = 0.0;
        for &(_, w) in &sorted {
            acc += w;
            cum.push(acc);
        }
        us.iter()
            .map(|&u| {
                let k = cum.partition_point(|&c| c < u).min(sorted.len() - 1);
                sorted[k].0
            })
            .collect()
    }
}

/// Materialization source: a Gaussian mixture, or atoms smoothed by a
/// Gaussian of variance `delta2 > 0`.
#[derive(Debug, Clone)]
pub enum MaterializeSpec {
    Mixture(GaussianMixtureSpec),
    SmoothedAtoms { atoms: DiscreteAtoms, delta2: f64 },
}

/// Evaluate the exact mixture / smoothed-atom density on a fresh grid whose
/// window covers `mean ± window_sigmas · stddev` of the spec.
pub fn materialize(
    spec: &MaterializeSpec,
    window_sigmas: f64,
    n_grid: usize,
) -> Result<GridMeasure> {
    match spec {
        MaterializeSpec::Mixture(mix) => mix.materialize(window_sigmas, n_grid),
        MaterializeSpec::SmoothedAtoms { atoms, delta2 } => atoms
            .smoothed(*delta2)?
            .materialize(window_sigmas, n_grid),
    }
}

/// Mean, variance and Fisher information by quadrature.
///
/// The Fisher integrand `(p')^2 / p` uses central differences for `p'`;
/// nodes with `p` below the floor are excluded. A density that does not
/// vanish at its support boundary represents a measure with a jump there,
/// whose Fisher information is infinite; the sentinel is reported directly.
pub fn summarize(mu: &GridMeasure) -> MeasureSummary {
    let n = mu.len();
    let h = mu.step();
    let w = numeric::trapezoid_weights(n, h);
    let p = mu.values();

    let mass: f64 = p.iter().zip(&w).map(|(v, wi)| v * wi).sum();
    let mean: f64 = p
        .iter()
        .zip(&w)
        .enumerate()
        .map(|(i, (v, wi))| mu.node(i) * v * wi)
        .sum::<f64>()
        / mass;
    let variance: f64 = p
        .iter()
        .zip(&w)
        .enumerate()
        .map(|(i, (v, wi))| {
            let d = mu.node(i) - mean;
            d * d * v * wi
        })
        .sum::<f64>()
        / mass;

    let peak = mu.peak();
    let mut excluded = 0usize;
    let boundary_jump = p[0] > BOUNDARY_JUMP * peak || p[n - 1] > BOUNDARY_JUMP * peak;
    let mut fisher = 0.0;
    if boundary_jump {
        fisher = f64::INFINITY;
    } else {
        for i in 1..n - 1 {
            if p[i] < FISHER_FLOOR {
                excluded += 1;
                continue;
            }
            let dp = (p[i + 1] - p[i - 1]) / (2.0 * h);
            fisher += dp * dp / p[i] * h;
            if fisher > FISHER_OVERFLOW {
                fisher = f64::INFINITY;
                break;
            }
        }
    }

    MeasureSummary {
        mean,
        variance,
        fisher_information: fisher,
        fisher_nodes_excluded: excluded,
    }
}

/// Law of `alpha · X + beta` for `X ~ mu`.
///
/// An affine map sends a uniform grid to a uniform grid, so the pushforward
/// is exact: nodes are relabeled (reversed when `alpha < 0`) and densities
/// scaled by `1/|alpha|`; no interpolation error is introduced.
pub fn affine_pushforward(mu: &GridMeasure, alpha: f64, beta: f64) -> Result<GridMeasure> {
    if alpha == 0.0 {
        return Err(Error::invalid_parameter("alpha", "must be nonzero"));
    }
    let (a, b) = (alpha * mu.lo() + beta, alpha * mu.hi() + beta);
    let (lo, hi) = if alpha > 0.0 { (a, b) } else { (b, a) };
    let scale = 1.0 / alpha.abs();
    let mut values: Vec<f64> = mu.values().iter().map(|v| v * scale).collect();
    if alpha < 0.0 {
        values.reverse();
    }
    GridMeasure::from_samples(lo, hi, values)
}

/// Affine map to mean 0, variance 1.
pub fn standardize(mu: &GridMeasure) -> Result<GridMeasure> {
    let s = summarize(mu);
    if s.variance <= 1e-12 {
        return Err(Error::InvalidMeasure(
            "degenerate variance; cannot standardize".into(),
        ));
    }
    let sd = s.variance.sqrt();
    affine_pushforward(mu, 1.0 / sd, -s.mean / sd)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_gaussian() -> GridMeasure {
        GridMeasure::gaussian(0.0, 1.0, 8.0, 4097).unwrap()
    }

    #[test]
    fn single_gaussian_moments() {
        let s = summarize(&std_gaussian());
        assert!(s.mean.abs() < 1e-6, "mean {}", s.mean);
        assert!((s.variance - 1.0).abs() < 1e-4, "variance {}", s.variance);
    }

    #[test]
    fn smoothed_atoms_variance_adds() {
        // independent smoothing: var = var(atoms) + delta2 = 0.25 + 0.25
        let atoms = DiscreteAtoms::new(vec![(-0.5, 0.5), (0.5, 0.5)]).unwrap();
        let spec = MaterializeSpec::SmoothedAtoms {
            atoms,
            delta2: 0.25,
        };
        let mu = materialize(&spec, 10.0, 4097).unwrap();
        let s = summarize(&mu);
        assert!(s.mean.abs() < 1e-8);
        assert!((s.variance - 0.5).abs() < 1e-4, "variance {}", s.variance);
    }

    #[test]
    fn mixture_variance_is_within_plus_between() {
        let mix = GaussianMixtureSpec::new(vec![(0.5, -1.0, 1.0), (0.5, 1.0, 1.0)]).unwrap();
        let mu = mix.materialize(10.0, 4097).unwrap();
        let s = summarize(&mu);
        assert!((s.variance - 2.0).abs() < 2e-4, "variance {}", s.variance);
    }

    #[test]
    fn atoms_require_smoothing() {
        let atoms = DiscreteAtoms::new(vec![(-0.5, 0.5), (0.5, 0.5)]).unwrap();
        assert!(atoms.smoothed(0.0).is_err());
        let spec = MaterializeSpec::SmoothedAtoms { atoms, delta2: 0.0 };
        assert!(materialize(&spec, 8.0, 4097).is_err());
    }

    #[test]
    fn materialize_rejects_bad_window_and_grid() {
        let mix = GaussianMixtureSpec::new(vec![(1.0, 0.0, 1.0)]).unwrap();
        assert!(mix.materialize(0.0, 4097).is_err());
        assert!(mix.materialize(8.0, 8).is_err());
    }

    #[test]
    fn fisher_of_gaussian_is_inverse_variance() {
        // oracle: J(N(0, v)) = 1/v by the exact integral of (p'/p)^2 p
        let s = summarize(&std_gaussian());
        assert!(
            (s.fisher_information - 1.0).abs() < 1e-2,
            "J {}",
            s.fisher_information
        );
        let wide = GridMeasure::gaussian(0.0, 4.0, 8.0, 4097).unwrap();
        let s4 = summarize(&wide);
        assert!(
            (s4.fisher_information - 0.25).abs() < 1e-2,
            "J {}",
            s4.fisher_information
        );
    }

    #[test]
    fn fisher_of_uniform_is_infinite() {
        let mu = GridMeasure::uniform(0.0, 1.0, 4097).unwrap();
        let s = summarize(&mu);
        assert!((s.variance - 1.0 / 12.0).abs() < 1e-4);
        assert!(s.fisher_information.is_infinite());
    }

    #[test]
    fn cramer_rao_on_smooth_measures() {
        for mu in [
            std_gaussian(),
            GridMeasure::gaussian(2.0, 0.5, 9.0, 4097).unwrap(),
            GridMeasure::laplace(1.0, 60.0, 4097).unwrap(),
        ] {
            let s = summarize(&mu);
            if s.fisher_information.is_finite() {
                assert!(
                    s.fisher_information * s.variance >= 1.0 - 1e-3,
                    "J*var = {}",
                    s.fisher_information * s.variance
                );
            }
        }
    }

    #[test]
    fn laplace_fisher_is_one() {
        // central differences flatten the kink at 0, an O(step) deficit
        let mu = GridMeasure::laplace(1.0, 60.0, 4097).unwrap();
        let s = summarize(&mu);
        assert!((s.variance - 2.0).abs() < 1e-3, "variance {}", s.variance);
        assert!(
            (s.fisher_information - 1.0).abs() < 2e-2,
            "J {}",
            s.fisher_information
        );
    }

    #[test]
    fn affine_identity_and_scaling() {
        let mu = std_gaussian();
        let same = affine_pushforward(&mu, 1.0, 0.0).unwrap();
        for (a, b) in mu.values().iter().zip(same.values()) {
            assert!((a - b).abs() < 1e-10);
        }
        let doubled = affine_pushforward(&mu, 2.0, 0.0).unwrap();
        let s = summarize(&doubled);
        assert!((s.variance - 4.0).abs() < 1e-3, "variance {}", s.variance);
        assert!(affine_pushforward(&mu, 0.0, 1.0).is_err());
    }

    #[test]
    fn uniform_flip_symmetry() {
        let mu = GridMeasure::uniform(0.0, 1.0, 2048).unwrap();
        let flipped = affine_pushforward(&mu, -1.0, 1.0).unwrap();
        assert!((flipped.lo() - 0.0).abs() < 1e-12);
        assert!((flipped.hi() - 1.0).abs() < 1e-12);
        for (a, b) in mu.values().iter().zip(flipped.values()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn standardize_centers_and_idempotent() {
        for mu in [
            GridMeasure::gaussian(3.0, 4.0, 10.0, 4097).unwrap(),
            GridMeasure::uniform(0.0, 1.0, 4097).unwrap(),
        ] {
            let std1 = standardize(&mu).unwrap();
            let s = summarize(&std1);
            assert!(s.mean.abs() < 1e-8, "mean {}", s.mean);
            assert!((s.variance - 1.0).abs() < 1e-6, "variance {}", s.variance);
            let std2 = standardize(&std1).unwrap();
            for (a, b) in std1.values().iter().zip(std2.values()) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn variance_transforms_quadratically() {
        let mu = GridMeasure::laplace(1.0, 60.0, 4097).unwrap();
        let base = summarize(&mu).variance;
        for alpha in [0.5, 2.0, -1.0] {
            let pushed = affine_pushforward(&mu, alpha, 0.3).unwrap();
            let v = summarize(&pushed).variance;
            assert!(
                (v - alpha * alpha * base).abs() <= 1e-6 * alpha * alpha * base,
                "alpha {alpha}: {v} vs {}",
                alpha * alpha * base
            );
        }
    }

    #[test]
    fn normalization_always_holds() {
        for mu in [
            std_gaussian(),
            GridMeasure::uniform(-2.0, 5.0, 1024).unwrap(),
            GridMeasure::exponential(1.0, 60.0, 4097).unwrap(),
        ] {
            assert!((mu.mass() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn iid_sum_of_atoms_is_binomial() {
        let atoms = DiscreteAtoms::new(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let sum = atoms.iid_sum(4).unwrap();
        let expected = [1.0, 4.0, 6.0, 4.0, 1.0].map(|c| c / 16.0);
        assert_eq!(sum.atoms().len(), 5);
        for (k, &(x, w)) in sum.atoms().iter().enumerate() {
            assert!((x - k as f64).abs() < 1e-12);
            assert!((w - expected[k]).abs() < 1e-12);
        }
    }
}
