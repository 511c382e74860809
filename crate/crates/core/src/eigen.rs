//! Symmetric eigenvalue machinery: Sturm-sequence bisection on tridiagonal
//! matrices, inverse iteration for eigenvectors, and a dense path
//! (Householder reduction + bisection) for the small hypercube problems.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length mismatch");
        SymTridiag { diag, off }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `lambda` (negative pivots of the
    /// LDL^T factorization of `T - lambda I`).
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let n = self.n();
        let mut count = 0usize;
        let mut q = self.diag[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let q_safe = if q.abs() < 1e-300 {
                if q >= 0.0 {
                    1e-300
                } else {
                    -1e-300
                }
            } else {
                q
            };
            q = (self.diag[i] - lambda) - self.off[i - 1] * self.off[i - 1] / q_safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds on the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i < n - 1 { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// k-th smallest eigenvalue (0-indexed) by bisection on the Sturm count.
    pub fn eigenvalue_k(&self, k: usize) -> f64 {
        let (mut a, mut b) = self.gershgorin();
        a -= 1.0;
        b += 1.0;
        for _ in 0..220 {
            let mid = 0.5 * (a + b);
            if (b - a) < 2.0 * f64::EPSILON * mid.abs().max(1.0) {
                break;
            }
            if self.sturm_count(mid) <= k {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigenvalue_k(0)
    }

    pub fn largest_eigenvalue(&self) -> f64 {
        self.eigenvalue_k(self.n() - 1)
    }

    /// Solve `(T - shift I) x = b` by LDL^T with a pivot floor; the floor is
    /// what makes the solve usable for inverse iteration at a near-eigenvalue
    /// shift.
    pub fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let floor = 1e-280;
        d[0] = self.diag[0] - shift;
        if d[0].abs() < floor {
            d[0] = if d[0] >= 0.0 { floor } else { -floor };
        }
        for i in 1..n {
            l[i - 1] = self.off[i - 1] / d[i - 1];
            d[i] = (self.diag[i] - shift) - l[i - 1] * self.off[i - 1];
            if d[i].abs() < floor {
                d[i] = if d[i] >= 0.0 { floor } else { -floor };
            }
        }
        let mut x = b.to_vec();
        for i in 1..n {
            x[i] -= l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= d[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= l[i] * x[i + 1];
        }
        x
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i < n - 1 {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Eigenvector for an eigenvalue `lambda` obtained from bisection:
    /// inverse iteration with a detuned shift, then Rayleigh-quotient
    /// polishing until the residual reaches the rounding floor.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.n();
        let (glo, ghi) = self.gershgorin();
        let scale = (ghi - glo).abs().max(1.0);
        // deterministic, sign-varying start vector
        let mut v: Vec<f64> = (0..n)
            .map(|i| {
                let t = (i as f64 + 1.0) * 0.754_877_666;
                (t - t.floor()) - 0.5
            })
            .collect();
        normalize(&mut v);
        let mut shift = lambda - 1e-11 * scale;
        let mut best_res = f64::INFINITY;
        let mut best = v.clone();
        for iter in 0..30 {
            let mut w = self.solve_shifted(shift, &v);
            normalize(&mut w);
            let av = self.matvec(&w);
            let rayleigh: f64 = av.iter().zip(&w).map(|(a, x)| a * x).sum();
            let res: f64 = av
                .iter()
                .zip(&w)
                .map(|(a, x)| (a - rayleigh * x) * (a - rayleigh * x))
                .sum::<f64>()
                .sqrt();
            v = w;
            if res < best_res {
                best_res = res;
                best = v.clone();
            }
            if res <= 1e-13 * scale {
                return Ok(v);
            }
            if iter >= 2 {
                // Rayleigh-quotient refinement once the iterate is close
                shift = rayleigh - 1e-12 * scale;
            }
        }
        if best_res <= 1e-8 * scale {
            Ok(best)
        } else {
            Err(Error::EigenSolve(format!(
                "inverse iteration residual {best_res:.3e} at lambda {lambda:.6e}"
            )))
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// Dense symmetric matrix in row-major storage. Only the small problems from
/// the hypercube module go through this path.
#[derive(Debug, Clone)]
pub struct SymDense {
    pub n: usize,
    pub a: Vec<f64>,
}

impl SymDense {
    pub fn zeros(n: usize) -> Self {
        SymDense {
            n,
            a: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] += v;
    }

    /// Householder reduction to symmetric tridiagonal form (eigenvalues
    /// preserved; the transform itself is not accumulated).
    pub fn tridiagonalize(&self) -> SymTridiag {
        let n = self.n;
        let mut a = self.a.clone();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        for k in 0..n.saturating_sub(2) {
            // annihilate column k below the first subdiagonal
            let mut alpha2 = 0.0;
            for i in k + 1..n {
                alpha2 += a[i * n + k] * a[i * n + k];
            }
            let mut alpha = alpha2.sqrt();
            if alpha == 0.0 {
                continue;
            }
            if a[(k + 1) * n + k] > 0.0 {
                alpha = -alpha;
            }
            let mut v = vec![0.0; n];
            v[k + 1] = a[(k + 1) * n + k] - alpha;
            for i in k + 2..n {
                v[i] = a[i * n + k];
            }
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            // p = A v * (2/v'v); w = p - v (v'p / v'v)
            let mut p = vec![0.0; n];
            for i in 0..n {
                let mut acc = 0.0;
                for j in k + 1..n {
                    acc += a[i * n + j] * v[j];
                }
                p[i] = 2.0 * acc / vnorm2;
            }
            let vp: f64 = v.iter().zip(&p).map(|(x, y)| x * y).sum();
            for i in 0..n {
                p[i] -= vp * v[i] / vnorm2;
            }
            // A <- A - v w' - w v'
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] -= v[i] * p[j] + p[i] * v[j];
                }
            }
        }
        for i in 0..n {
            diag[i] = a[i * n + i];
            if i + 1 < n {
                off[i] = a[(i + 1) * n + i];
            }
        }
        SymTridiag::new(diag, off)
    }

    /// Cholesky factor R (upper triangular, `A = R' R`).
    /// Fails when the matrix is not positive definite.
    pub fn cholesky_upper(&self) -> Result<Vec<f64>> {
        let n = self.n;
        let mut r = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut sum = self.at(i, j);
                for k in 0..i {
                    sum -= r[k * n + i] * r[k * n + j];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::EigenSolve(format!(
                            "Cholesky pivot {sum:.3e} <= 0 at row {i}"
                        )));
                    }
                    r[i * n + i] = sum.sqrt();
                } else {
                    r[i * n + j] = sum / r[i * n + i];
                }
            }
        }
        Ok(r)
    }
}

/// Largest eigenvalue of the symmetric pencil `A x = theta B x` with `B`
/// positive definite: reduce with the Cholesky factor of `B`, tridiagonalize,
/// and bisect.
pub fn largest_generalized_eigenvalue(a: &SymDense, b: &SymDense) -> Result<f64> {
    let n = a.n;
    assert_eq!(n, b.n);
    let r = b.cholesky_upper()?;
    // S = R^{-T} A R^{-1}: first X = R^{-T} A (solve R' X = A column-wise),
    // then S = (R^{-T} X')' i.e. solve R' Y = X' and transpose.
    let mut x = vec![0.0; n * n];
    for col in 0..n {
        // forward solve R' y = a[:, col]
        for i in 0..n {
            let mut sum = a.at(i, col);
            for k in 0..i {
                sum -= r[k * n + i] * x[k * n + col];
            }
            x[i * n + col] = sum / r[i * n + i];
        }
    }
    let mut s = SymDense::zeros(n);
    for col in 0..n {
        for i in 0..n {
            let mut sum = x[col * n + i];
            for k in 0..i {
                sum -= r[k * n + i] * s.at(k, col);
            }
            s.set(i, col, sum / r[i * n + i]);
        }
    }
    // symmetrize against rounding before reduction
    for i in 0..n {
        for j in i + 1..n {
            let m = 0.5 * (s.at(i, j) + s.at(j, i));
            s.set(i, j, m);
            s.set(j, i, m);
        }
    }
    Ok(s.tridiagonalize().largest_eigenvalue())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_count_2x2() {
        // [[1, -1], [-1, 3]] has eigenvalues 2 ± sqrt(2)
        let t = SymTridiag::new(vec![1.0, 3.0], vec![-1.0]);
        assert_eq!(t.sturm_count(0.0), 0);
        assert_eq!(t.sturm_count(1.0), 1);
        assert_eq!(t.sturm_count(4.0), 2);
    }

    #[test]
    fn clean_chain_eigenvalues() {
        // free tight-binding chain: eigenvalues 2 cos(k pi / (n+1))
        let n = 64;
        let t = SymTridiag::new(vec![0.0; n], vec![-1.0; n - 1]);
        for k in [0usize, 1, n - 1] {
            let exact = 2.0 * ((n - k) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            let got = t.eigenvalue_k(k);
            assert!((got - exact).abs() < 1e-10, "k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn eigenvector_matches_eigenvalue() {
        let n = 200;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.01 * (i as f64).sin()).collect();
        let t = SymTridiag::new(diag, vec![-1.0; n - 1]);
        let lambda = t.smallest_eigenvalue();
        let v = t.eigenvector(lambda).unwrap();
        let av = t.matvec(&v);
        let rayleigh: f64 = av.iter().zip(&v).map(|(a, x)| a * x).sum();
        assert!(
            (rayleigh - lambda).abs() < 1e-9,
            "rayleigh {rayleigh} vs {lambda}"
        );
    }

    #[test]
    fn householder_preserves_spectrum() {
        // fixed small symmetric matrix; spectrum checked against the
        // tridiagonal bisection of the original (already tridiagonal) form
        let mut a = SymDense::zeros(4);
        let entries = [
            [4.0, 1.0, 0.5, 0.2],
            [1.0, 3.0, 0.7, 0.1],
            [0.5, 0.7, 2.0, 0.3],
            [0.2, 0.1, 0.3, 1.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                a.set(i, j, entries[i][j]);
            }
        }
        let t = a.tridiagonalize();
        // trace is invariant
        let trace_t: f64 = t.diag.iter().sum();
        assert!((trace_t - 10.0).abs() < 1e-10);
        // largest eigenvalue should match a power-iteration estimate
        let mut v = vec![1.0, 0.0, 0.0, 0.0];
        for _ in 0..400 {
            let mut w = vec![0.0; 4];
            for i in 0..4 {
                for j in 0..4 {
                    w[i] += entries[i][j] * v[j];
                }
            }
            normalize(&mut w);
            v = w;
        }
        let mut av = vec![0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                av[i] += entries[i][j] * v[j];
            }
        }
        let power: f64 = av.iter().zip(&v).map(|(a, x)| a * x).sum();
        let bisect = t.largest_eigenvalue();
        assert!((power - bisect).abs() < 1e-9, "{power} vs {bisect}");
    }

    #[test]
    fn generalized_identity_b_reduces_to_standard() {
        let mut a = SymDense::zeros(3);
        for (i, d) in [(0, 1.0), (1, 5.0), (2, 3.0)] {
            a.set(i, i, d);
        }
        a.set(0, 1, 0.5);
        a.set(1, 0, 0.5);
        let mut b = SymDense::zeros(3);
        for i in 0..3 {
            b.set(i, i, 1.0);
        }
        let theta = largest_generalized_eigenvalue(&a, &b).unwrap();
        // largest eigenvalue of the 2x2 block [[1,.5],[.5,5]]: 3 + sqrt(17)/2
        let exact = 3.0 + 17.0f64.sqrt() / 2.0;
        assert!((theta - exact).abs() < 1e-10, "{theta} vs {exact}");
    }
}
