//! Small quadrature and interpolation helpers shared across modules.

/// Trapezoidal integral of uniformly spaced samples with spacing `step`.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..n - 1].iter().sum();
    step * (0.5 * (values[0] + values[n - 1]) + interior)
}

/// Trapezoid quadrature weights (step at interior nodes, step/2 at the ends).
pub fn trapezoid_weights(n: usize, step: f64) -> Vec<f64> {
    let mut w = vec![step; n];
    if n >= 1 {
        w[0] = 0.5 * step;
        w[n - 1] = 0.5 * step;
    }
    w
}

/// Running trapezoidal integral; `out[i]` is the integral over the first
/// `i + 1` nodes. `out[0] = 0`.
pub fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for pair in values.windows(2) {
        acc += 0.5 * step * (pair[0] + pair[1]);
        out.push(acc);
    }
    out
}

/// Midpoint-rule probability nodes u_j = (j - 1/2) / m, j = 1..m.
pub fn midpoint_probabilities(m: usize) -> Vec<f64> {
    (1..=m).map(|j| (j as f64 - 0.5) / m as f64).collect()
}

/// Monotone (Fritsch–Carlson) cubic Hermite interpolant on a uniform grid.
///
/// Shape-preserving: on every interval the interpolant stays between the
/// endpoint values, so nonnegative samples yield a nonnegative interpolant.
pub struct MonotoneCubic {
    lo: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(lo: f64, step: f64, values: &[f64]) -> Self {
        let n = values.len();
        assert!(n >= 2, "interpolation needs at least two nodes");
        let d: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]) / step).collect();
        let mut m = vec![0.0; n];
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] > 0.0 {
                // harmonic mean limiter
                m[i] = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
            } else {
                m[i] = 0.0;
            }
        }
        // clamp end slopes (de Boor/Swartz) to keep the end intervals monotone
        for (i, di) in [(0usize, 0usize), (n - 1, n - 2)] {
            if m[i] * d[di] <= 0.0 {
                m[i] = 0.0;
            } else if m[i].abs() > 3.0 * d[di].abs() {
                m[i] = 3.0 * d[di];
            }
        }
        MonotoneCubic {
            lo,
            step,
            values: values.to_vec(),
            slopes: m,
        }
    }

    /// Evaluate at `x`; returns 0 outside the data window.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let hi = self.lo + self.step * (n - 1) as f64;
        if x < self.lo || x > hi {
            return 0.0;
        }
        let mut k = ((x - self.lo) / self.step).floor() as usize;
        if k >= n - 1 {
            k = n - 2;
        }
        let t = (x - (self.lo + self.step * k as f64)) / self.step;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * self.step, self.slopes[k + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let z = (x - mean) * (x - mean) / (2.0 * variance);
    (-z).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

/// Deterministic per-instance seed derivation (counter-based splitting):
/// instance `k` of a sweep seeded with `master` is reproducible in isolation.
pub fn split_seed(master: u64, k: u64) -> u64 {
    let mut z = master ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_integrates_line_exactly() {
        let values: Vec<f64> = (0..101).map(|i| 2.0 * i as f64 * 0.01 + 1.0).collect();
        let got = trapezoid(&values, 0.01);
        assert!((got - 2.0).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn cumulative_matches_total() {
        let values: Vec<f64> = (0..64).map(|i| (i as f64 * 0.1).sin().abs()).collect();
        let cum = cumulative_trapezoid(&values, 0.1);
        let total = trapezoid(&values, 0.1);
        assert!((cum.last().unwrap() - total).abs() < 1e-13);
    }

    #[test]
    fn monotone_cubic_preserves_nonnegativity_and_nodes() {
        let vals = vec![0.0, 0.0, 1.0, 4.0, 1.0, 0.0, 0.0];
        let interp = MonotoneCubic::new(0.0, 1.0, &vals);
        for (i, v) in vals.iter().enumerate() {
            assert!((interp.eval(i as f64) - v).abs() < 1e-14);
        }
        let mut x = 0.0;
        while x <= 6.0 {
            assert!(interp.eval(x) >= -1e-15, "negative value at {x}");
            x += 0.01;
        }
        assert_eq!(interp.eval(-0.5), 0.0);
        assert_eq!(interp.eval(6.5), 0.0);
    }

    #[test]
    fn split_seed_is_stable_and_distinct() {
        let a = split_seed(42, 0);
        let b = split_seed(42, 1);
        assert_ne!(a, b);
        assert_eq!(a, split_seed(42, 0));
    }
}
