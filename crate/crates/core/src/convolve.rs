//! Convolution engine for grid measures: pairwise and iterated convolutions,
//! Gaussian smoothing, and standardized CLT sums.
//!
//! Pairs are resampled onto a common lattice (the finer of the two steps),
//! convolved by zero-padded FFT, clipped, trimmed and renormalized. Iterated
//! self-convolution uses binary powering so only O(log n) convolutions (and
//! no intermediate resamplings: equal steps share a lattice exactly) are
//! performed.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::measures::{
    affine_pushforward, materialize, summarize, DiscreteAtoms, GridMeasure, MaterializeSpec,
};
use crate::spectral::{self, SpectralResult};
use crate::transport;

/// Hard cap on lattice sizes produced by convolution.
pub const NODE_GUARD: usize = 1 << 22;

/// Mass clipped from FFT undershoot must stay below this.
pub const CLIP_LIMIT: f64 = 1e-9;

/// Relative density threshold for trimming convolution output tails; sits
/// above the FFT noise floor so clipped roundoff never splits the support.
const OUTPUT_TRIM: f64 = 1e-13;

/// One row of a CLT trace.
#[derive(Debug, Clone)]
pub struct CltEntry {
    pub n: usize,
    pub measure: GridMeasure,
    pub c_p: f64,
    pub sigma2: f64,
    /// W2 distance to the Gaussian with matched mean and variance.
    pub w2_to_gaussian: f64,
}

/// Poincaré constants and transport distances along the CLT.
#[derive(Debug, Clone)]
pub struct CltTrace {
    /// Grid representative at n = 1 (for atomic bases: the smoothed one).
    pub base: GridMeasure,
    pub delta2: f64,
    pub entries: Vec<CltEntry>,
}

/// Base of a CLT trace. Pure atoms cannot be represented on a grid, so the
/// atomic case is kept symbolic and smoothed only after standardization.
#[derive(Debug, Clone)]
pub enum CltBase {
    Grid(GridMeasure),
    Atoms(DiscreteAtoms),
}

fn real_fft_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);

    let mut fa: Vec<Complex<f64>> = a
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut fb: Vec<Complex<f64>> = b
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    fft.process(&mut fa);
    fft.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    ifft.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..out_len].iter().map(|c| c.re * scale).collect()
}

/// Resample onto a lattice with the given step, preserving the window.
fn resample_to_step(mu: &GridMeasure, step: f64) -> Result<GridMeasure> {
    if (step - mu.step()).abs() <= 1e-15 * step {
        return Ok(mu.clone());
    }
    let width = mu.hi() - mu.lo();
    let n = (width / step).ceil() as usize + 1;
    if n > NODE_GUARD {
        return Err(Error::GridTooLarge {
            nodes: n,
            guard: NODE_GUARD,
        });
    }
    let interp = mu.interpolant();
    let values: Vec<f64> = (0..n)
        .map(|i| interp.eval(mu.lo() + step * i as f64).max(0.0))
        .collect();
    GridMeasure::from_samples(mu.lo(), mu.lo() + step * (n - 1) as f64, values)
}

/// Clip FFT undershoot, trim vanished tails, renormalize.
fn finalize_convolution(lo: f64, step: f64, mut values: Vec<f64>) -> Result<GridMeasure> {
    let mut clipped = 0.0;
    for v in values.iter_mut() {
        if *v < 0.0 {
            clipped += -*v * step;
            *v = 0.0;
        }
    }
    if clipped > CLIP_LIMIT {
        return Err(Error::ConvolutionNoise {
            clipped,
            limit: CLIP_LIMIT,
        });
    }
    let peak = values.iter().cloned().fold(0.0, f64::max);
    let threshold = OUTPUT_TRIM * peak;
    let start = values.iter().position(|&v| v >= threshold).unwrap_or(0);
    let end = values.len()
        - 1
        - values
            .iter()
            .rev()
            .position(|&v| v >= threshold)
            .unwrap_or(0);
    let trimmed: Vec<f64> = values[start..=end].to_vec();
    let new_lo = lo + step * start as f64;
    let new_hi = lo + step * end as f64;
    GridMeasure::from_samples(new_lo, new_hi, trimmed)
}

/// Density of `X + Y` for independent `X ~ mu`, `Y ~ nu`.
pub fn convolve_pair(mu: &GridMeasure, nu: &GridMeasure) -> Result<GridMeasure> {
    let step = mu.step().min(nu.step());
    let a = resample_to_step(mu, step)?;
    let b = resample_to_step(nu, step)?;
    let out_len = a.len() + b.len() - 1;
    if out_len > NODE_GUARD {
        return Err(Error::GridTooLarge {
            nodes: out_len,
            guard: NODE_GUARD,
        });
    }
    let mut conv = real_fft_convolve(a.values(), b.values());
    for v in conv.iter_mut() {
        *v *= step;
    }
    finalize_convolution(a.lo() + b.lo(), step, conv)
}

/// Convolve with an exactly evaluated centered Gaussian of variance `delta2`.
pub fn gaussian_smooth(mu: &GridMeasure, delta2: f64) -> Result<GridMeasure> {
    if delta2 <= 0.0 {
        return Err(Error::invalid_parameter("delta2", "must be positive"));
    }
    let sd = delta2.sqrt();
    // resolve the kernel: refine the lattice when the kernel is narrower
    // than a few steps
    let step = mu.step().min(sd / 4.0);
    let base = resample_to_step(mu, step)?;
    let half = ((8.0 * sd / step).ceil() as usize).max(8);
    let kn = 2 * half + 1;
    if base.len() + kn - 1 > NODE_GUARD {
        return Err(Error::GridTooLarge {
            nodes: base.len() + kn - 1,
            guard: NODE_GUARD,
        });
    }
    let kernel: Vec<f64> = (0..kn)
        .map(|i| {
            let x = (i as f64 - half as f64) * step;
            crate::numeric::normal_pdf(x, 0.0, delta2)
        })
        .collect();
    let mut conv = real_fft_convolve(base.values(), &kernel);
    for v in conv.iter_mut() {
        *v *= step;
    }
    finalize_convolution(base.lo() - half as f64 * step, step, conv)
}

/// n-fold self-convolution by binary powering.
fn self_convolve(mu: &GridMeasure, n: usize) -> Result<GridMeasure> {
    let mut result: Option<GridMeasure> = None;
    let mut power = mu.clone();
    let mut k = n;
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => power.clone(),
                Some(acc) => convolve_pair(&acc, &power)?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        power = convolve_pair(&power, &power)?;
    }
    Ok(result.expect("n >= 1"))
}

/// Law of the standardized sum `(1/sqrt(n)) * sum of n centered copies`.
///
/// The output keeps the base variance (centering removes the mean; the
/// `1/sqrt(n)` scaling undoes the variance growth).
pub fn standardized_sum(base: &GridMeasure, n: usize) -> Result<GridMeasure> {
    if n < 1 {
        return Err(Error::invalid_parameter("n", "must be >= 1"));
    }
    let s = summarize(base);
    if s.variance <= 0.0 {
        return Err(Error::InvalidMeasure("base has zero variance".into()));
    }
    let centered = affine_pushforward(base, 1.0, -s.mean)?;
    if n == 1 {
        return Ok(centered);
    }
    let sum = self_convolve(&centered, n)?;
    affine_pushforward(&sum, 1.0 / (n as f64).sqrt(), 0.0)
}

/// The measure at index `n` of a trace: `nu_n` smoothed by `delta2/n` when
/// `delta2 > 0`; smoothing is applied after standardization. For atomic
/// bases the standardized sum stays exact and the smoothed law is the exact
/// Gaussian mixture.
pub fn trace_measure(base: &CltBase, n: usize, delta2: f64) -> Result<GridMeasure> {
    match base {
        CltBase::Grid(mu) => {
            let nu_n = standardized_sum(mu, n)?;
            if delta2 > 0.0 {
                gaussian_smooth(&nu_n, delta2 / n as f64)
            } else {
                Ok(nu_n)
            }
        }
        CltBase::Atoms(atoms) => {
            if delta2 <= 0.0 {
                return Err(Error::invalid_parameter(
                    "delta2",
                    "atomic base needs positive smoothing (its Poincaré constant is infinite)",
                ));
            }
            let nu_n = atoms.standardized_sum(n)?;
            materialize(
                &MaterializeSpec::SmoothedAtoms {
                    atoms: nu_n,
                    delta2: delta2 / n as f64,
                },
                10.0,
                crate::measures::DEFAULT_N_GRID,
            )
        }
    }
}

/// Estimate Poincaré constants and Gaussian W2 distances along the CLT.
pub fn clt_trace(base: &CltBase, n_list: &[usize], delta2: f64) -> Result<CltTrace> {
    if n_list.is_empty() {
        return Err(Error::invalid_parameter("n_list", "must be nonempty"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid_parameter(
            "n_list",
            "must be strictly ascending",
        ));
    }
    if delta2 < 0.0 {
        return Err(Error::invalid_parameter("delta2", "must be >= 0"));
    }
    let mut entries = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let measure = trace_measure(base, n, delta2)?;
        let spec_res: SpectralResult = spectral::estimate_cp(&measure)?;
        let s = summarize(&measure);
        let gauss = GridMeasure::gaussian(s.mean, s.variance, 10.0, measure.len().max(2049))?;
        let w2 = transport::w2_quantile(&measure, &gauss, transport::DEFAULT_W2_NODES)?;
        entries.push(CltEntry {
            n,
            measure,
            c_p: spec_res.c_p,
            sigma2: s.variance,
            w2_to_gaussian: w2,
        });
    }
    let base_measure = trace_measure(base, 1, delta2)?;
    Ok(CltTrace {
        base: base_measure,
        delta2,
        entries,
    })
}
