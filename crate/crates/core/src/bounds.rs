//! Closed-form bound calculators. Every calculator is a pure arithmetic
//! function producing a `BoundReport` with full input provenance; together
//! they are the golden-file test surface of the library.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// A collection of distinct nonempty subsets of `{1..n}` with derived cover
/// statistics. Subsets are stored as bitmasks over 0-based indices; cover
/// counts are recomputed on demand so they can never go stale.
#[derive(Debug, Clone)]
pub struct SubsetFamily {
    n: usize,
    subsets: Vec<u64>,
}

impl SubsetFamily {
    /// Build from 1-based index lists.
    pub fn new(n: usize, subsets: &[Vec<usize>]) -> Result<Self> {
        if n < 1 || n > 63 {
            return Err(Error::invalid_parameter("n", "must lie in 1..=63"));
        }
        let mut masks = Vec::with_capacity(subsets.len());
        for s in subsets {
            if s.is_empty() {
                return Err(Error::invalid_parameter("subsets", "empty subset"));
            }
            let mut mask = 0u64;
            for &i in s {
                if i < 1 || i > n {
                    return Err(Error::invalid_parameter(
                        "subsets",
                        format!("index {i} outside 1..={n}"),
                    ));
                }
                mask |= 1 << (i - 1);
            }
            masks.push(mask);
        }
        let mut sorted = masks.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid_parameter("subsets", "must be distinct"));
        }
        Ok(SubsetFamily { n, subsets: masks })
    }

    pub fn from_masks(n: usize, masks: Vec<u64>) -> Result<Self> {
        let lists: Vec<Vec<usize>> = masks
            .iter()
            .map(|&m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect())
            .collect();
        SubsetFamily::new(n, &lists)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn masks(&self) -> &[u64] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Members (0-based) of subset `k`.
    pub fn members(&self, k: usize) -> Vec<usize> {
        (0..self.n).filter(|i| self.subsets[k] >> i & 1 == 1).collect()
    }

    fn cover_count(&self, i: usize) -> usize {
        self.subsets.iter().filter(|&&m| m >> i & 1 == 1).count()
    }

    /// Maximum cover count `r = max_i #{S : S contains i}`.
    pub fn r(&self) -> usize {
        (0..self.n).map(|i| self.cover_count(i)).max().unwrap_or(0)
    }

    /// Minimum cover count `t = min_i #{S : S contains i}`.
    pub fn t(&self) -> usize {
        (0..self.n).map(|i| self.cover_count(i)).min().unwrap_or(0)
    }

    /// All m-subsets of {1..n}.
    pub fn all_m_subsets(n: usize, m: usize) -> Result<Self> {
        let mut masks = Vec::new();
        for mask in 1u64..(1 << n) {
            if mask.count_ones() as usize == m {
                masks.push(mask);
            }
        }
        SubsetFamily::from_masks(n, masks)
    }

    /// Singletons {1}, ..., {n}.
    pub fn singletons(n: usize) -> Result<Self> {
        SubsetFamily::from_masks(n, (0..n).map(|i| 1u64 << i).collect())
    }
}

/// Named bound value with input provenance; serializes to one-line JSON.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub value: f64,
    pub inputs: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub satisfied: Option<bool>,
    pub tolerance: f64,
}

impl BoundReport {
    fn new(name: &str, value: f64, inputs: &[(&str, f64)]) -> Self {
        BoundReport {
            name: name.to_string(),
            value,
            inputs: inputs
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            satisfied: None,
            tolerance: 0.0,
        }
    }

    /// Record a comparison verdict `measured <= value + tolerance`.
    pub fn with_measurement(mut self, measured: f64, tolerance: f64) -> Self {
        self.inputs.insert("measured".into(), measured);
        self.tolerance = tolerance;
        self.satisfied = Some(measured <= self.value + tolerance);
        self
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid_parameter(name, "must be positive and finite"));
    }
    Ok(())
}

/// `C_p(mu * nu) <= C_p(mu) + C_p(nu)`.
pub fn subadditivity_bound(c_mu: f64, c_nu: f64) -> Result<BoundReport> {
    require_positive("c_mu", c_mu)?;
    require_positive("c_nu", c_nu)?;
    Ok(BoundReport::new(
        "subadditivity",
        c_mu + c_nu,
        &[("c_mu", c_mu), ("c_nu", c_nu)],
    ))
}

/// Subset convolution bound `(1/t) * sum of C_p over the family`.
/// `c_values` must be aligned with `family.masks()`.
pub fn shearer_subset_bound(family: &SubsetFamily, c_values: &[f64]) -> Result<BoundReport> {
    if c_values.len() != family.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} constants for {} subsets",
            c_values.len(),
            family.len()
        )));
    }
    for &c in c_values {
        require_positive("c_values", c)?;
    }
    let t = family.t();
    if t == 0 {
        let uncovered = (0..family.n())
            .find(|&i| family.cover_count(i) == 0)
            .unwrap_or(0);
        return Err(Error::UncoveredIndex { index: uncovered + 1 });
    }
    let sum: f64 = c_values.iter().sum();
    let mut report = BoundReport::new("shearer_subset", sum / t as f64, &[("sum", sum)]);
    report.inputs.insert("t".into(), t as f64);
    report
        .inputs
        .insert("n_subsets".into(), family.len() as f64);
    Ok(report)
}

fn stability_penalty(c_conv: f64, sigma2: f64) -> f64 {
    let d = c_conv - sigma2;
    d * d / (d * d + c_conv * sigma2)
}

/// Quantitative subadditivity: the right-hand side of the stability estimate
/// evaluated at a candidate value of `C_p(mu * nu)`.
pub fn stability_bound(c_mu: f64, c_nu: f64, c_conv: f64, sigma2: f64) -> Result<BoundReport> {
    require_positive("c_mu", c_mu)?;
    require_positive("c_nu", c_nu)?;
    require_positive("c_conv", c_conv)?;
    require_positive("sigma2", sigma2)?;
    if c_conv < sigma2 {
        return Err(Error::invalid_parameter(
            "c_conv",
            "candidate below sigma2 violates C_p >= sigma^2",
        ));
    }
    let s = c_mu + c_nu;
    let value = s - (c_mu * c_nu / s) * stability_penalty(c_conv, sigma2);
    Ok(BoundReport::new(
        "stability",
        value,
        &[
            ("c_mu", c_mu),
            ("c_nu", c_nu),
            ("c_conv", c_conv),
            ("sigma2", sigma2),
        ],
    ))
}

/// Certified envelope for the implicit stability estimate: the largest fixed
/// point `c*` of `c <= stability_bound(c_mu, c_nu, c, sigma2)`.
///
/// The penalty is increasing in `c` on `[sigma2, c_mu + c_nu]`, so the map
/// `c -> rhs(c)` is decreasing and `rhs(c) - c` crosses zero exactly once;
/// bisection is valid and every admissible `C_p(mu * nu)` is `<= c*`.
pub fn stability_implied_bound(c_mu: f64, c_nu: f64, sigma2: f64) -> Result<BoundReport> {
    require_positive("c_mu", c_mu)?;
    require_positive("c_nu", c_nu)?;
    require_positive("sigma2", sigma2)?;
    let s = c_mu + c_nu;
    if sigma2 > s {
        return Err(Error::invalid_parameter(
            "sigma2",
            "must be <= c_mu + c_nu",
        ));
    }
    let rhs = |c: f64| s - (c_mu * c_nu / s) * stability_penalty(c, sigma2);
    let (mut lo, mut hi) = (sigma2, s);
    if rhs(hi) >= hi {
        lo = hi;
    } else {
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if rhs(mid) >= mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let c_star = 0.5 * (lo + hi);
    Ok(BoundReport::new(
        "stability_implied",
        c_star,
        &[("c_mu", c_mu), ("c_nu", c_nu), ("sigma2", sigma2)],
    ))
}

/// i.i.d. stability: right-hand side of
/// `C_p(nu_2) <= C_p(nu_1) - (C_p(nu_1)/4) * penalty(C_p(nu_2), sigma2)`.
pub fn iid_stability_bound(c1: f64, c2_candidate: f64, sigma2: f64) -> Result<BoundReport> {
    require_positive("c1", c1)?;
    require_positive("c2_candidate", c2_candidate)?;
    require_positive("sigma2", sigma2)?;
    if c2_candidate < sigma2 {
        return Err(Error::invalid_parameter(
            "c2_candidate",
            "candidate below sigma2 violates C_p >= sigma^2",
        ));
    }
    let value = c1 - (c1 / 4.0) * stability_penalty(c2_candidate, sigma2);
    Ok(BoundReport::new(
        "iid_stability",
        value,
        &[("c1", c1), ("c2", c2_candidate), ("sigma2", sigma2)],
    ))
}

/// Largest fixed point of the i.i.d. stability estimate (one doubling step).
pub fn iid_implied_bound(c1: f64, sigma2: f64) -> Result<BoundReport> {
    require_positive("c1", c1)?;
    require_positive("sigma2", sigma2)?;
    if sigma2 > c1 {
        return Err(Error::invalid_parameter("sigma2", "must be <= c1"));
    }
    let rhs = |c: f64| c1 - (c1 / 4.0) * stability_penalty(c, sigma2);
    let (mut lo, mut hi) = (sigma2, c1);
    if rhs(hi) >= hi {
        lo = hi;
    } else {
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if rhs(mid) >= mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Ok(BoundReport::new(
        "iid_implied",
        0.5 * (lo + hi),
        &[("c1", c1), ("sigma2", sigma2)],
    ))
}

/// Fisher-information stability bound (comparison only; normalized setting
/// `sigma2 = 1`). Degenerates to subadditivity as `fisher_j -> infinity`.
pub fn johnson_stability_bound(c1: f64, c2_candidate: f64, fisher_j: f64) -> Result<BoundReport> {
    require_positive("c1", c1)?;
    require_positive("c2_candidate", c2_candidate)?;
    if !(fisher_j >= 1.0) {
        return Err(Error::invalid_parameter(
            "fisher_j",
            "must be >= 1 in the normalized setting",
        ));
    }
    let d = c2_candidate - 1.0;
    let value =
        c1 - (c1 / 9.0) * d * d / (c2_candidate * c2_candidate * (1.0 + fisher_j * c1));
    Ok(BoundReport::new(
        "johnson_stability",
        value,
        &[("c1", c1), ("c2", c2_candidate), ("fisher_j", fisher_j)],
    ))
}

/// Geometric decay toward 3/2: `3/2 + (3/4)^n (c1 - 3/2)`.
pub fn rate_geometric(c1: f64, n: u32) -> Result<BoundReport> {
    if !(c1 >= 1.0) {
        return Err(Error::invalid_parameter(
            "c1",
            "must be >= 1 (isotropic normalization)",
        ));
    }
    let value = 1.5 + 0.75f64.powi(n as i32) * (c1 - 1.5);
    Ok(BoundReport::new(
        "rate_geometric",
        value,
        &[("c1", c1), ("n", n as f64)],
    ))
}

/// Recurrence `a_0 = 2`, `a_{n+1} = -2 + sqrt(9 + 6 (a_n - 1))` (the positive
/// root of `a_{n+1} + (1/6)(a_{n+1} - 1)^2 = a_n`). Returns `a_0..=a_n_max`.
pub fn rate_recurrence(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut a = 2.0f64;
    out.push(a);
    for _ in 0..n_max {
        a = -2.0 + (9.0 + 6.0 * (a - 1.0)).sqrt();
        out.push(a);
    }
    out
}

/// Explicit envelope `1 + 7/(n+7)` for the recurrence.
pub fn rate_explicit(n: u32) -> Result<BoundReport> {
    let value = 1.0 + 7.0 / (n as f64 + 7.0);
    Ok(BoundReport::new("rate_explicit", value, &[("n", n as f64)]))
}

/// Quantitative CLT in W2: `d * 2 (delta2 + c_delta) / (delta2 + sqrt(n) - 1)`.
pub fn w2_clt_bound(d: u32, delta2: f64, c_delta: f64, n: u64) -> Result<BoundReport> {
    if d < 1 {
        return Err(Error::invalid_parameter("d", "must be >= 1"));
    }
    if n < 1 {
        return Err(Error::invalid_parameter("n", "must be >= 1"));
    }
    require_positive("delta2", delta2)?;
    require_positive("c_delta", c_delta)?;
    let denom = delta2 + (n as f64).sqrt() - 1.0;
    if denom <= 0.0 {
        return Err(Error::invalid_parameter("n", "denominator not positive"));
    }
    let value = d as f64 * 2.0 * (delta2 + c_delta) / denom;
    Ok(BoundReport::new(
        "w2_clt",
        value,
        &[
            ("d", d as f64),
            ("delta2", delta2),
            ("c_delta", c_delta),
            ("n", n as f64),
        ],
    ))
}

/// Compact-support CLT bound `25 d R^2 (1 + log n)^2 / n`.
pub fn zhai_bound(d: u32, radius: f64, n: u64) -> Result<BoundReport> {
    if d < 1 || n < 1 {
        return Err(Error::invalid_parameter("d/n", "must be >= 1"));
    }
    require_positive("radius", radius)?;
    let ln = (n as f64).ln();
    let value = 25.0 * d as f64 * radius * radius * (1.0 + ln) * (1.0 + ln) / n as f64;
    Ok(BoundReport::new(
        "zhai",
        value,
        &[("d", d as f64), ("radius", radius), ("n", n as f64)],
    ))
}

/// Smallest `n` at which the compact-support bound beats the W2-CLT bound.
/// The ratio is eventually decreasing in `n`, so a doubling scan followed by
/// binary search finds the single crossover.
pub fn zhai_crossover(d: u32, radius: f64, delta2: f64, c_delta: f64) -> Result<Option<u64>> {
    let beats = |n: u64| -> Result<bool> {
        Ok(zhai_bound(d, radius, n)?.value < w2_clt_bound(d, delta2, c_delta, n)?.value)
    };
    let mut hi = 32u64;
    let cap = 1u64 << 50;
    while !beats(hi)? {
        hi *= 2;
        if hi > cap {
            return Ok(None);
        }
    }
    let mut lo = 32u64;
    if beats(lo)? {
        // already ahead at the start of the monotone regime; scan down
        for n in 1..=32 {
            if beats(n)? {
                return Ok(Some(n));
            }
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if beats(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Exponential concentration profile
/// `exp(-min(t^2 / (K C_p), t / sqrt(K C_p)))`.
pub fn concentration_profile(t: f64, c_p: f64, k_abs: f64) -> Result<BoundReport> {
    if !(t >= 0.0) {
        return Err(Error::invalid_parameter("t", "must be >= 0"));
    }
    require_positive("c_p", c_p)?;
    require_positive("k_abs", k_abs)?;
    let kc = k_abs * c_p;
    let value = (-(t * t / kc).min(t / kc.sqrt())).exp();
    Ok(BoundReport::new(
        "concentration",
        value,
        &[("t", t), ("c_p", c_p), ("k_abs", k_abs)],
    ))
}

/// Smoothed-atom constant cap `delta2 * exp(4 / delta2)`.
pub fn smoothing_constant_bound(delta2: f64) -> Result<BoundReport> {
    require_positive("delta2", delta2)?;
    let value = delta2 * (4.0 / delta2).exp();
    Ok(BoundReport::new(
        "smoothing_constant",
        value,
        &[("delta2", delta2)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subadditivity_arithmetic() {
        assert_eq!(subadditivity_bound(1.0, 2.0).unwrap().value, 3.0);
        assert_eq!(subadditivity_bound(1.7, 1.7).unwrap().value, 3.4);
        assert!(subadditivity_bound(0.0, 1.0).is_err());
    }

    #[test]
    fn shearer_subset_examples() {
        // singletons recover plain subadditivity
        let singles = SubsetFamily::singletons(2).unwrap();
        let r = shearer_subset_bound(&singles, &[1.0, 2.0]).unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.inputs["t"], 1.0);

        // all 2-subsets of [3], equal constants c: t = 2, value 3c/2
        let pairs = SubsetFamily::all_m_subsets(3, 2).unwrap();
        assert_eq!(pairs.len(), 3);
        assert_eq!(pairs.t(), 2);
        let r = shearer_subset_bound(&pairs, &[2.0, 2.0, 2.0]).unwrap();
        assert!((r.value - 3.0).abs() < 1e-15);

        // {{1},{2},{1,2}}: t = 2, (1+1+2)/2 = 2
        let fam = SubsetFamily::new(2, &[vec![1], vec![2], vec![1, 2]]).unwrap();
        let r = shearer_subset_bound(&fam, &[1.0, 1.0, 2.0]).unwrap();
        assert!((r.value - 2.0).abs() < 1e-15);

        // uncovered index is an error, not +inf
        let gap = SubsetFamily::new(3, &[vec![1], vec![2]]).unwrap();
        match shearer_subset_bound(&gap, &[1.0, 1.0]) {
            Err(Error::UncoveredIndex { index: 3 }) => {}
            other => panic!("expected UncoveredIndex(3), got {other:?}"),
        }
    }

    #[test]
    fn stability_examples() {
        // 4 - 1 * (4 / (4 + 3)) = 24/7
        let r = stability_bound(2.0, 2.0, 3.0, 1.0).unwrap();
        assert!((r.value - 24.0 / 7.0).abs() < 1e-12);

        // zero-gap case: penalty vanishes
        let r = stability_bound(2.0, 2.0, 1.0, 1.0).unwrap();
        assert!((r.value - 4.0).abs() < 1e-15);

        // 4 - (3/4) * (4/12) = 3.75
        let r = stability_bound(1.0, 3.0, 4.0, 2.0).unwrap();
        assert!((r.value - 3.75).abs() < 1e-12);

        assert!(stability_bound(1.0, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn stability_implied_examples() {
        // sigma2 at the endpoint: no improvement possible
        let r = stability_implied_bound(1.0, 1.0, 2.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);

        // strict improvement otherwise; cross-check the fixed point by scan
        let r = stability_implied_bound(2.0, 2.0, 1.0).unwrap();
        assert!(r.value < 4.0);
        let rhs = |c: f64| 4.0 - (c - 1.0) * (c - 1.0) / ((c - 1.0) * (c - 1.0) + c);
        let mut best = f64::NAN;
        let mut c = 1.0;
        while c <= 4.0 {
            if rhs(c) >= c {
                best = c;
            }
            c += 1e-6;
        }
        assert!((r.value - best).abs() < 1e-5, "{} vs {best}", r.value);
        // the fixed point certifies every admissible value
        assert!(rhs(r.value) >= r.value - 1e-9);
    }

    #[test]
    fn iid_stability_examples() {
        let r = iid_stability_bound(2.0, 1.5, 1.0).unwrap();
        assert!((r.value - (2.0 - 0.5 * (0.25 / 1.75))).abs() < 1e-12);
        assert!((r.value - 1.928_571_428_571_428_6).abs() < 1e-12);

        let r = iid_stability_bound(3.0, 1.0, 1.0).unwrap();
        assert!((r.value - 3.0).abs() < 1e-15);

        let r = iid_stability_bound(4.0, 3.0, 1.0).unwrap();
        assert!((r.value - 24.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn johnson_examples_and_comparison() {
        let r = johnson_stability_bound(2.0, 1.5, 1.0).unwrap();
        assert!((r.value - 1.991_769_547_325_102_9).abs() < 1e-12, "{}", r.value);

        // degenerates to subadditivity as J grows
        let r = johnson_stability_bound(2.0, 1.5, 1e18).unwrap();
        assert!((r.value - 2.0).abs() < 1e-15);

        // the Fisher-free bound improves on the Fisher-dependent one
        let iid = iid_stability_bound(2.0, 1.5, 1.0).unwrap().value;
        let johnson = johnson_stability_bound(2.0, 1.5, 1.0).unwrap().value;
        assert!(iid <= johnson);
    }

    #[test]
    fn rate_calculators() {
        assert!((rate_geometric(3.0, 1).unwrap().value - 2.625).abs() < 1e-15);
        assert_eq!(rate_geometric(3.0, 0).unwrap().value, 3.0);
        assert_eq!(rate_geometric(1.5, 17).unwrap().value, 1.5);

        let a = rate_recurrence(64);
        assert_eq!(a[0], 2.0);
        assert!((a[1] - (-2.0 + 15.0f64.sqrt())).abs() < 1e-12);
        assert!((a[1] - 1.872_983_346_207_417).abs() < 1e-12);
        for (n, &an) in a.iter().enumerate() {
            assert!(
                an <= 1.0 + 7.0 / (n as f64 + 7.0) + 1e-12,
                "a_{n} = {an}"
            );
        }

        assert_eq!(rate_explicit(0).unwrap().value, 2.0);
        assert_eq!(rate_explicit(7).unwrap().value, 1.5);
        assert!((rate_explicit(63).unwrap().value - 1.1).abs() < 1e-15);
    }

    #[test]
    fn w2_clt_and_zhai() {
        assert!((w2_clt_bound(1, 1.0, 2.0, 4).unwrap().value - 3.0).abs() < 1e-15);
        let v1 = w2_clt_bound(1, 1.0, 2.0, 1 << 40).unwrap().value;
        assert!(v1 < 1e-5);
        let d5 = w2_clt_bound(5, 1.0, 2.0, 4).unwrap().value;
        assert!((d5 - 15.0).abs() < 1e-12);

        assert!((zhai_bound(1, 1.0, 1).unwrap().value - 25.0).abs() < 1e-15);
        assert!((zhai_bound(2, 1.0, 1).unwrap().value - 50.0).abs() < 1e-15);
    }

    #[test]
    fn zhai_crossover_is_single_and_bracketed() {
        let n = zhai_crossover(1, 1.0, 1.0, 2.0).unwrap().unwrap();
        // predicate flips exactly once in the monotone regime
        assert!(
            zhai_bound(1, 1.0, n).unwrap().value < w2_clt_bound(1, 1.0, 2.0, n).unwrap().value
        );
        assert!(
            zhai_bound(1, 1.0, n - 1).unwrap().value
                >= w2_clt_bound(1, 1.0, 2.0, n - 1).unwrap().value
        );
    }

    #[test]
    fn concentration_examples() {
        assert_eq!(concentration_profile(0.0, 1.0, 1.0).unwrap().value, 1.0);
        // both branches agree at the crossover t = sqrt(K C)
        let t = (2.0f64 * 3.0).sqrt();
        let v = concentration_profile(t, 3.0, 2.0).unwrap().value;
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        let v = concentration_profile(2.0, 1.0, 1.0).unwrap().value;
        assert!((v - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn smoothing_constant_examples() {
        assert!((smoothing_constant_bound(1.0).unwrap().value - 4.0f64.exp()).abs() < 1e-12);
        assert!(
            (smoothing_constant_bound(4.0).unwrap().value - 4.0 * 1.0f64.exp()).abs() < 1e-12
        );
        assert!(
            (smoothing_constant_bound(0.5).unwrap().value - 0.5 * 8.0f64.exp()).abs() < 1e-9
        );
    }

    #[test]
    fn stability_never_exceeds_subadditivity() {
        let mut c = 1.0;
        while c <= 5.0 {
            let sub = subadditivity_bound(c, 2.0).unwrap().value;
            let mut conv = 1.0;
            while conv <= sub {
                let st = stability_bound(c, 2.0, conv.max(1.0), 1.0).unwrap().value;
                assert!(st <= sub + 1e-12);
                conv += 0.37;
            }
            c += 0.61;
        }
    }

    #[test]
    fn calculators_are_monotone_in_constants() {
        // finite-difference sign tests on a coarse parameter grid
        let eps = 1e-6;
        for c in [1.0, 2.0, 5.0, 9.0] {
            let f0 = iid_stability_bound(c, 1.5, 1.0).unwrap().value;
            let f1 = iid_stability_bound(c + eps, 1.5, 1.0).unwrap().value;
            assert!(f1 >= f0);
            let g0 = johnson_stability_bound(c, 1.5, 2.0).unwrap().value;
            let g1 = johnson_stability_bound(c + eps, 1.5, 2.0).unwrap().value;
            assert!(g1 >= g0);
            let w0 = w2_clt_bound(1, 1.0, c, 16).unwrap().value;
            let w1 = w2_clt_bound(1, 1.0, c + eps, 16).unwrap().value;
            assert!(w1 >= w0);
            let r0 = rate_geometric(c, 3).unwrap().value;
            let r1 = rate_geometric(c + eps, 3).unwrap().value;
            assert!(r1 >= r0);
        }
    }

    #[test]
    fn one_doubling_reproduces_the_polynomial_lower_bounds() {
        // fixed point of the i.i.d. estimate (one doubling, sigma2 = 1):
        // the decrement dominates both closed-form penalty lower bounds
        let mut c1 = 1.0 + 1e-9;
        while c1 <= 10.0 {
            let c2 = iid_implied_bound(c1, 1.0).unwrap().value;
            let drop = c1 - c2;
            if c2 < 2.0 {
                assert!(
                    drop >= (c2 - 1.0) * (c2 - 1.0) / 6.0 - 1e-9,
                    "c1 {c1}: drop {drop}"
                );
            }
            assert!(
                drop >= (c2 - 1.0) / 3.0 - 1.0 / 6.0 - 1e-9,
                "c1 {c1}: drop {drop}"
            );
            // consistency with Theorem-3 doubling: the two routes agree
            let via_conv = stability_implied_bound(c1, c1, 2.0).unwrap().value / 2.0;
            assert!((via_conv - c2).abs() < 1e-8, "{via_conv} vs {c2}");
            c1 += 0.25;
        }
    }
}
