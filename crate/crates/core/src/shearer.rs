//! Exact verification of Shearer-type inequalities on finite probability
//! spaces, and the discrete-group subset bound on the hypercube.
//!
//! All expectations are exact sums (state spaces are capped at 10^6 cells),
//! so verdicts carry only floating-point slack, no Monte Carlo error.

use crate::bounds::SubsetFamily;
use crate::eigen::{largest_generalized_eigenvalue, SymDense};
use crate::error::{Error, Result};

/// Hard cap on product state-space size.
pub const CELL_CAP: usize = 1_000_000;

/// Independent factors `Q = prod Q_i` on a finite product alphabet.
#[derive(Debug, Clone)]
pub struct FiniteProductSpace {
    sizes: Vec<usize>,
    weights: Vec<Vec<f64>>,
}

/// Two sides of an inequality and the verdict.
#[derive(Debug, Clone, Copy)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn with_slack(lhs: f64, rhs: f64, slack: f64) -> Self {
        InequalityCheck {
            lhs,
            rhs,
            holds: lhs <= rhs + slack,
        }
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

impl FiniteProductSpace {
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid_parameter("weights", "no factors"));
        }
        let mut cells = 1usize;
        for w in &weights {
            if w.len() < 2 {
                return Err(Error::invalid_parameter("alphabet", "size must be >= 2"));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > 1e-14 {
                return Err(Error::invalid_parameter(
                    "weights",
                    format!("factor sums to {sum}, expected 1 within 1e-14"),
                ));
            }
            if w.iter().any(|&v| v < 0.0) {
                return Err(Error::invalid_parameter("weights", "negative weight"));
            }
            cells = cells.saturating_mul(w.len());
            if cells > CELL_CAP {
                return Err(Error::GridTooLarge {
                    nodes: cells,
                    guard: CELL_CAP,
                });
            }
        }
        let sizes = weights.iter().map(Vec::len).collect();
        Ok(FiniteProductSpace { sizes, weights })
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn factor_weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn cells(&self) -> usize {
        self.sizes.iter().product()
    }

    /// Decode a flat index into coordinates (last factor fastest).
    pub fn coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.n()];
        for i in (0..self.n()).rev() {
            out[i] = flat % self.sizes[i];
            flat /= self.sizes[i];
        }
        out
    }

    /// Product weight of a cell.
    pub fn q(&self, coords: &[usize]) -> f64 {
        coords
            .iter()
            .enumerate()
            .map(|(i, &x)| self.weights[i][x])
            .product()
    }

    /// Full product tensor of Q, flat.
    pub fn q_tensor(&self) -> Vec<f64> {
        (0..self.cells()).map(|c| self.q(&self.coords(c))).collect()
    }

    fn marginal_dims(&self, members: &[usize]) -> usize {
        members.iter().map(|&i| self.sizes[i]).product()
    }

    fn marginal_index(&self, coords: &[usize], members: &[usize]) -> usize {
        let mut idx = 0usize;
        for &i in members {
            idx = idx * self.sizes[i] + coords[i];
        }
        idx
    }

    /// Marginal of the product measure on a subset (exact products).
    fn q_marginal(&self, members: &[usize]) -> Vec<f64> {
        let dim = self.marginal_dims(members);
        let mut out = vec![1.0; dim];
        for (idx, slot) in out.iter_mut().enumerate() {
            let mut rest = idx;
            let mut v = 1.0;
            for &i in members.iter().rev() {
                v *= self.weights[i][rest % self.sizes[i]];
                rest /= self.sizes[i];
            }
            *slot = v;
        }
        out
    }
}

/// A joint measure `P << Q` on the product alphabet, flat-indexed.
#[derive(Debug, Clone)]
pub struct JointMeasure {
    pub space: FiniteProductSpace,
    pub weights: Vec<f64>,
}

impl JointMeasure {
    pub fn new(space: FiniteProductSpace, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.cells() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} cells",
                weights.len(),
                space.cells()
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid_parameter(
                "weights",
                format!("sum to {sum}, expected 1 within 1e-12"),
            ));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::invalid_parameter("weights", "negative weight"));
        }
        for (c, &w) in weights.iter().enumerate() {
            if w > 0.0 && space.q(&space.coords(c)) == 0.0 {
                return Err(Error::SupportViolation);
            }
        }
        Ok(JointMeasure { space, weights })
    }

    /// Exponential-family-free tilt `dP = (1 + eps f) dQ` for bounded
    /// centered `f`; used by the linearization consistency check.
    pub fn tilted(space: &FiniteProductSpace, f: &[f64], eps: f64) -> Result<Self> {
        let q = space.q_tensor();
        let mean: f64 = q.iter().zip(f).map(|(qi, fi)| qi * fi).sum();
        let weights: Vec<f64> = q
            .iter()
            .zip(f)
            .map(|(qi, fi)| qi * (1.0 + eps * (fi - mean)))
            .collect();
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::invalid_parameter(
                "eps",
                "tilt produces a negative density",
            ));
        }
        JointMeasure::new(space.clone(), weights)
    }

    fn marginal(&self, members: &[usize]) -> Vec<f64> {
        let dim = self.space.marginal_dims(members);
        let mut out = vec![0.0; dim];
        for (c, &w) in self.weights.iter().enumerate() {
            let coords = self.space.coords(c);
            out[self.space.marginal_index(&coords, members)] += w;
        }
        out
    }
}

fn relative_entropy(p: &[f64], q: &[f64]) -> Result<f64> {
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::SupportViolation);
            }
            d += pi * (pi / qi).ln();
        }
        // 0 log 0 = 0 convention
    }
    Ok(d)
}

/// Entropy subset inequality:
/// `sum_S D(P_S || Q_S) <= r D(P || Q)`.
pub fn entropy_shearer_check(p: &JointMeasure, family: &SubsetFamily) -> Result<InequalityCheck> {
    if family.n() != p.space.n() {
        return Err(Error::ShapeMismatch(format!(
            "family over {} indices, space has {} factors",
            family.n(),
            p.space.n()
        )));
    }
    let mut lhs = 0.0;
    for k in 0..family.len() {
        let members = family.members(k);
        let p_s = p.marginal(&members);
        let q_s = p.space.q_marginal(&members);
        lhs += relative_entropy(&p_s, &q_s)?;
    }
    let full: Vec<usize> = (0..p.space.n()).collect();
    let q_full = p.space.q_marginal(&full);
    let d_full = relative_entropy(&p.weights, &q_full)?;
    let rhs = family.r() as f64 * d_full;
    Ok(InequalityCheck::with_slack(lhs, rhs, 1e-12))
}

/// Conditional expectation of a tensor under the product measure:
/// returns (marginal weights Q_S, conditional values E[f | X_S = .]).
pub fn conditional_expectation(
    space: &FiniteProductSpace,
    f: &[f64],
    members: &[usize],
) -> (Vec<f64>, Vec<f64>) {
    let dim = space.marginal_dims(members);
    let mut qf = vec![0.0; dim];
    let q_s = space.q_marginal(members);
    for c in 0..space.cells() {
        let coords = space.coords(c);
        qf[space.marginal_index(&coords, members)] += space.q(&coords) * f[c];
    }
    let cond: Vec<f64> = qf
        .iter()
        .zip(&q_s)
        .map(|(&num, &den)| if den > 0.0 { num / den } else { 0.0 })
        .collect();
    (q_s, cond)
}

fn weighted_variance(weights: &[f64], values: &[f64]) -> f64 {
    let mean: f64 = weights.iter().zip(values).map(|(w, v)| w * v).sum();
    weights
        .iter()
        .zip(values)
        .map(|(w, v)| w * (v - mean) * (v - mean))
        .sum()
}

/// Variance projection inequality (the linearization of the entropy form):
/// `sum_S Var(E[f | X_S]) <= r Var(f)`.
pub fn variance_projection_check(
    space: &FiniteProductSpace,
    f: &[f64],
    family: &SubsetFamily,
) -> Result<InequalityCheck> {
    if f.len() != space.cells() {
        return Err(Error::ShapeMismatch(format!(
            "{} values for {} cells",
            f.len(),
            space.cells()
        )));
    }
    if family.n() != space.n() {
        return Err(Error::ShapeMismatch("family/space size mismatch".into()));
    }
    let mut lhs = 0.0;
    for k in 0..family.len() {
        let members = family.members(k);
        let (q_s, cond) = conditional_expectation(space, f, &members);
        lhs += weighted_variance(&q_s, &cond);
    }
    let q = space.q_tensor();
    let rhs = family.r() as f64 * weighted_variance(&q, f);
    Ok(InequalityCheck::with_slack(lhs, rhs, 1e-12))
}

/// Result of the sum projection check: the family form, plus the `(m/n)`
/// form when the factors are i.i.d. and the family is all m-subsets.
#[derive(Debug, Clone, Copy)]
pub struct SumProjectionCheck {
    pub family: InequalityCheck,
    pub dembo_kagan_shepp: Option<InequalityCheck>,
}

/// Projection inequality for functions of the total sum, conditioning on
/// partial sums `U_S`: `sum_S Var(E[f(U)|U_S]) <= r Var(f(U))`.
///
/// Partial sums are grouped by exact floating-point value; use exactly
/// representable alphabet embeddings (e.g. small integers) for genuine
/// `U_S`-conditioning.
pub fn sum_projection_check(
    space: &FiniteProductSpace,
    values: &[Vec<f64>],
    f: &dyn Fn(f64) -> f64,
    family: &SubsetFamily,
) -> Result<SumProjectionCheck> {
    if values.len() != space.n() {
        return Err(Error::ShapeMismatch("one value table per factor".into()));
    }
    for (vals, &size) in values.iter().zip(space.sizes()) {
        if vals.len() != size {
            return Err(Error::ShapeMismatch("value table/alphabet mismatch".into()));
        }
    }
    if family.n() != space.n() {
        return Err(Error::ShapeMismatch("family/space size mismatch".into()));
    }

    let cells = space.cells();
    let q = space.q_tensor();
    let total: Vec<f64> = (0..cells)
        .map(|c| {
            space
                .coords(c)
                .iter()
                .enumerate()
                .map(|(i, &x)| values[i][x])
                .sum()
        })
        .collect();
    let f_total: Vec<f64> = total.iter().map(|&u| f(u)).collect();
    let var_f = weighted_variance(&q, &f_total);

    let var_given_subset_sum = |members: &[usize]| -> f64 {
        use std::collections::BTreeMap;
        let mut groups: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
        for c in 0..cells {
            let coords = space.coords(c);
            let u_s: f64 = members.iter().map(|&i| values[i][coords[i]]).sum();
            let e = groups.entry(u_s.to_bits()).or_insert((0.0, 0.0));
            e.0 += q[c];
            e.1 += q[c] * f_total[c];
        }
        let mean: f64 = groups.values().map(|&(_, pf)| pf).sum();
        groups
            .values()
            .filter(|(p, _)| *p > 0.0)
            .map(|&(p, pf)| {
                let cond = pf / p;
                p * (cond - mean) * (cond - mean)
            })
            .sum()
    };

    let mut lhs = 0.0;
    for k in 0..family.len() {
        lhs += var_given_subset_sum(&family.members(k));
    }
    let rhs = family.r() as f64 * var_f;
    let family_check = InequalityCheck::with_slack(lhs, rhs, 1e-12);

    // i.i.d. factors + all-m-subset family: report the (m/n) form as well
    let iid = space.sizes().windows(2).all(|w| w[0] == w[1])
        && space
            .factor_weights()
            .windows(2)
            .all(|w| w[0] == w[1])
        && values.windows(2).all(|w| w[0] == w[1]);
    let m = family.masks()[0].count_ones() as usize;
    let is_all_m = family.masks().iter().all(|s| s.count_ones() as usize == m)
        && family.len() == binomial(space.n(), m);
    let dks = if iid && is_all_m {
        let members: Vec<usize> = (0..m).collect();
        let v = var_given_subset_sum(&members);
        let bound = m as f64 / space.n() as f64 * var_f;
        Some(InequalityCheck::with_slack(v, bound, 1e-12))
    } else {
        None
    };

    Ok(SumProjectionCheck {
        family: family_check,
        dembo_kagan_shepp: dks,
    })
}

fn binomial(n: usize, m: usize) -> usize {
    if m > n {
        return 0;
    }
    let mut acc = 1usize;
    for k in 0..m.min(n - m) {
        acc = acc * (n - k) / (k + 1);
    }
    acc
}

/// Result of the variance-drop check; `recentered` flags inputs whose mean
/// exceeded the 1e-12 tolerance and were centered before use.
#[derive(Debug, Clone, Copy)]
pub struct VarianceDropCheck {
    pub check: InequalityCheck,
    pub recentered: bool,
}

/// Variance drop: `E |sum_S psi_S(X_S)|^2 <= r sum_S E |psi_S(X_S)|^2`
/// for mean-zero `psi_S`. Each `psi` tensor is indexed over the marginal
/// alphabet of its subset, aligned with `family.masks()`.
pub fn variance_drop_check(
    space: &FiniteProductSpace,
    psis: &[Vec<f64>],
    family: &SubsetFamily,
) -> Result<VarianceDropCheck> {
    if psis.len() != family.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} psi tensors for {} subsets",
            psis.len(),
            family.len()
        )));
    }
    if family.n() != space.n() {
        return Err(Error::ShapeMismatch("family/space size mismatch".into()));
    }
    let mut recentered = false;
    let mut centered: Vec<Vec<f64>> = Vec::with_capacity(psis.len());
    for (k, psi) in psis.iter().enumerate() {
        let members = family.members(k);
        let dim = space.marginal_dims(&members);
        if psi.len() != dim {
            return Err(Error::ShapeMismatch(format!(
                "psi[{k}] has {} entries, marginal alphabet has {dim}",
                psi.len()
            )));
        }
        let q_s = space.q_marginal(&members);
        let mean: f64 = q_s.iter().zip(psi).map(|(w, v)| w * v).sum();
        if mean.abs() > 1e-12 {
            recentered = true;
        }
        centered.push(psi.iter().map(|v| v - mean).collect());
    }

    let q = space.q_tensor();
    let mut lhs = 0.0;
    let mut rhs_sum = 0.0;
    for c in 0..space.cells() {
        let coords = space.coords(c);
        let mut total = 0.0;
        for k in 0..family.len() {
            let members = family.members(k);
            total += centered[k][space.marginal_index(&coords, &members)];
        }
        lhs += q[c] * total * total;
    }
    for k in 0..family.len() {
        let members = family.members(k);
        let q_s = space.q_marginal(&members);
        rhs_sum += q_s
            .iter()
            .zip(&centered[k])
            .map(|(w, v)| w * v * v)
            .sum::<f64>();
    }
    let rhs = family.r() as f64 * rhs_sum;
    Ok(VarianceDropCheck {
        check: InequalityCheck::with_slack(lhs, rhs, 1e-12),
        recentered,
    })
}

/// A probability vector on the hypercube group Z_2^k.
#[derive(Debug, Clone)]
pub struct GroupMeasure {
    k: usize,
    weights: Vec<f64>,
}

impl GroupMeasure {
    pub fn new(k: usize, weights: Vec<f64>) -> Result<Self> {
        if k == 0 || k > 12 {
            return Err(Error::invalid_parameter("k", "must lie in 1..=12"));
        }
        if weights.len() != 1 << k {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for 2^{k} group elements",
                weights.len()
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid_parameter(
                "weights",
                format!("sum to {sum}, expected 1"),
            ));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::invalid_parameter("weights", "negative weight"));
        }
        Ok(GroupMeasure { k, weights })
    }

    /// Product of Bernoulli(p_i) bits.
    pub fn bernoulli_product(ps: &[f64]) -> Result<Self> {
        let k = ps.len();
        if k == 0 || k > 12 {
            return Err(Error::invalid_parameter("k", "must lie in 1..=12"));
        }
        let n = 1usize << k;
        let mut w = vec![1.0; n];
        for (x, slot) in w.iter_mut().enumerate() {
            for (i, &p) in ps.iter().enumerate() {
                *slot *= if x >> i & 1 == 1 { p } else { 1.0 - p };
            }
        }
        GroupMeasure::new(k, w)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Relabel `x -> x XOR t` (group translation).
    pub fn translated(&self, t: usize) -> Self {
        let n = self.weights.len();
        let mut w = vec![0.0; n];
        for (x, slot) in w.iter_mut().enumerate() {
            *slot = self.weights[x ^ (t & (n - 1))];
        }
        GroupMeasure {
            k: self.k,
            weights: w,
        }
    }

    /// Group convolution via the Walsh-Hadamard transform.
    pub fn convolve(&self, other: &GroupMeasure) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::ShapeMismatch("group dimension mismatch".into()));
        }
        let mut a = self.weights.clone();
        let mut b = other.weights.clone();
        walsh_hadamard(&mut a);
        walsh_hadamard(&mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= *y;
        }
        walsh_hadamard(&mut a);
        let scale = 1.0 / (1 << self.k) as f64;
        let weights: Vec<f64> = a.iter().map(|v| (v * scale).max(0.0)).collect();
        let total: f64 = weights.iter().sum();
        GroupMeasure::new(self.k, weights.iter().map(|w| w / total).collect())
    }
}

/// In-place Walsh-Hadamard transform (self-inverse up to 2^k).
pub fn walsh_hadamard(data: &mut [f64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut len = 1;
    while len < n {
        let mut i = 0;
        while i < n {
            for j in i..i + len {
                let (u, v) = (data[j], data[j + len]);
                data[j] = u + v;
                data[j + len] = u - v;
            }
            i += 2 * len;
        }
        len <<= 1;
    }
}

/// Poincaré constant on the hypercube with the unnormalized discrete
/// gradient `|grad f|^2(x) = sum_i (f(x) - f(x XOR e_i))^2`: the largest
/// eigenvalue of the pencil `Var(f) = theta * E|grad f|^2` with constants
/// deflated by a Householder reflector against the all-ones direction.
pub fn hypercube_poincare(mu: &GroupMeasure) -> Result<f64> {
    let n = 1usize << mu.k;
    if let Some(x) = mu.weights.iter().position(|&w| w <= 0.0) {
        return Err(Error::DisconnectedSupport(format!(
            "zero weight at group element {x:#b}"
        )));
    }
    // V = diag(mu) - mu mu', L the Dirichlet form of single-bit flips
    let mut v = SymDense::zeros(n);
    let mut l = SymDense::zeros(n);
    for x in 0..n {
        v.add(x, x, mu.weights[x]);
        for y in 0..n {
            v.add(x, y, -mu.weights[x] * mu.weights[y]);
        }
        for i in 0..mu.k {
            let y = x ^ (1 << i);
            l.add(x, x, mu.weights[x] + mu.weights[y]);
            l.add(x, y, -(mu.weights[x] + mu.weights[y]));
        }
    }
    // reflect e_0 onto the normalized constant vector and drop that row/col
    let deflated = |m: &SymDense| -> SymDense {
        let s = (n as f64).sqrt();
        let mut u: Vec<f64> = vec![1.0 / s; n];
        u[0] -= 1.0;
        let uu: f64 = u.iter().map(|x| x * x).sum();
        // H m H with H = I - 2 u u'/u'u, computed densely
        let mut mu_vec = vec![0.0; n];
        for i in 0..n {
            mu_vec[i] = (0..n).map(|j| m.at(i, j) * u[j]).sum();
        }
        let umu: f64 = u.iter().zip(&mu_vec).map(|(a, b)| a * b).sum();
        let mut h = SymDense::zeros(n - 1);
        for i in 1..n {
            for j in 1..n {
                let correction = -2.0 / uu * (u[i] * mu_vec[j] + mu_vec[i] * u[j])
                    + 4.0 * umu / (uu * uu) * u[i] * u[j];
                h.set(i - 1, j - 1, m.at(i, j) + correction);
            }
        }
        h
    };
    let v_d = deflated(&v);
    let l_d = deflated(&l);
    largest_generalized_eigenvalue(&v_d, &l_d)
}

/// Subset convolution bound on the group:
/// `C_p(mu_[n]) <= (1/t) sum_S C_p(mu_S)`.
pub fn group_subset_check(
    measures: &[GroupMeasure],
    family: &SubsetFamily,
) -> Result<InequalityCheck> {
    if measures.is_empty() {
        return Err(Error::invalid_parameter("measures", "empty list"));
    }
    if family.n() != measures.len() {
        return Err(Error::ShapeMismatch(format!(
            "family over {} indices, {} measures",
            family.n(),
            measures.len()
        )));
    }
    let k = measures[0].k;
    if measures.iter().any(|m| m.k != k) {
        return Err(Error::ShapeMismatch("group dimension mismatch".into()));
    }
    let t = family.t();
    if t == 0 {
        let uncovered = (0..family.n())
            .find(|&i| family.masks().iter().all(|&m| m >> i & 1 == 0))
            .unwrap_or(0);
        return Err(Error::UncoveredIndex { index: uncovered + 1 });
    }
    let convolve_members = |members: &[usize]| -> Result<GroupMeasure> {
        let mut acc = measures[members[0]].clone();
        for &i in &members[1..] {
            acc = acc.convolve(&measures[i])?;
        }
        Ok(acc)
    };
    let full: Vec<usize> = (0..measures.len()).collect();
    let lhs = hypercube_poincare(&convolve_members(&full)?)?;
    let mut sum = 0.0;
    for kx in 0..family.len() {
        sum += hypercube_poincare(&convolve_members(&family.members(kx))?)?;
    }
    let rhs = sum / t as f64;
    Ok(InequalityCheck::with_slack(lhs, rhs, 1e-10))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_space(sizes: &[usize]) -> FiniteProductSpace {
        FiniteProductSpace::new(
            sizes
                .iter()
                .map(|&s| vec![1.0 / s as f64; s])
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn entropy_zero_when_p_equals_q() {
        let space = uniform_space(&[2, 2]);
        let q = space.q_tensor();
        let p = JointMeasure::new(space, q).unwrap();
        let fam = SubsetFamily::singletons(2).unwrap();
        let check = entropy_shearer_check(&p, &fam).unwrap();
        assert_eq!(check.lhs, 0.0);
        assert_eq!(check.rhs, 0.0);
        assert!(check.holds);
    }

    #[test]
    fn entropy_correlated_pair() {
        // perfectly correlated uniform bits vs independent uniform:
        // marginals match (lhs = 0), D(P||Q) = log 2
        let space = uniform_space(&[2, 2]);
        let p = JointMeasure::new(space, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let fam = SubsetFamily::singletons(2).unwrap();
        let check = entropy_shearer_check(&p, &fam).unwrap();
        assert!(check.lhs.abs() < 1e-15);
        assert!((check.rhs - 2.0f64.ln()).abs() < 1e-15);
        assert!(check.holds);
    }

    #[test]
    fn support_violation_detected() {
        let space = FiniteProductSpace::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let res = JointMeasure::new(space, vec![0.25, 0.25, 0.25, 0.25]);
        assert!(matches!(res, Err(Error::SupportViolation)));
    }

    #[test]
    fn variance_projection_parity_and_coordinate() {
        let space = uniform_space(&[2, 2]);
        let fam = SubsetFamily::singletons(2).unwrap();
        // parity indicator: conditional means are constant, lhs = 0
        let parity: Vec<f64> = (0..4)
            .map(|c| {
                let x = space.coords(c);
                ((x[0] + x[1]) % 2) as f64
            })
            .collect();
        let check = variance_projection_check(&space, &parity, &fam).unwrap();
        assert!(check.lhs.abs() < 1e-15);
        assert!(check.holds);

        // f = x1: equality with r = 1
        let coord: Vec<f64> = (0..4).map(|c| space.coords(c)[0] as f64).collect();
        let check = variance_projection_check(&space, &coord, &fam).unwrap();
        assert!((check.lhs - 0.25).abs() < 1e-15);
        assert!((check.rhs - 0.25).abs() < 1e-15);
        assert!(check.holds);
    }

    #[test]
    fn variance_projection_full_set_is_equality() {
        let space = uniform_space(&[3, 2]);
        let fam = SubsetFamily::new(2, &[vec![1, 2]]).unwrap();
        let f: Vec<f64> = (0..6).map(|c| (c as f64).sin()).collect();
        let check = variance_projection_check(&space, &f, &fam).unwrap();
        assert!((check.lhs - check.rhs).abs() < 1e-14);
    }

    #[test]
    fn sum_projection_linear_is_tight() {
        // identity f on i.i.d. factors: Var(E[U_n | U_m]) = (m/n) Var(U_n)
        let space = uniform_space(&[2, 2, 2]);
        let values = vec![vec![0.0, 1.0]; 3];
        let fam = SubsetFamily::all_m_subsets(3, 2).unwrap();
        let check = sum_projection_check(&space, &values, &|u| u, &fam).unwrap();
        let dks = check.dembo_kagan_shepp.unwrap();
        assert!((dks.lhs - dks.rhs).abs() < 1e-14, "{} vs {}", dks.lhs, dks.rhs);
        assert!(check.family.holds);
    }

    #[test]
    fn sum_projection_indicator() {
        // n = 3 Bernoulli(1/2), f = indicator(U_3 == 3), m = 2:
        // exact enumeration oracle: Var(E[f|U_2]) = E[(U2/4 - 1/8)^2 expanded]
        let space = uniform_space(&[2, 2, 2]);
        let values = vec![vec![0.0, 1.0]; 3];
        let fam = SubsetFamily::all_m_subsets(3, 2).unwrap();
        let f = |u: f64| if u == 3.0 { 1.0 } else { 0.0 };
        let check = sum_projection_check(&space, &values, &f, &fam).unwrap();
        let dks = check.dembo_kagan_shepp.unwrap();
        // E[f|U_2 = u2] = P(X3 = 1)/1 when u2 = 2 else 0 => values {0, 0, 1/2}
        // Var = E[g^2] - (E g)^2 with P(U2 = 2) = 1/4: 1/16 - 1/64 = 3/64
        assert!((dks.lhs - 3.0 / 64.0).abs() < 1e-15, "lhs {}", dks.lhs);
        // (2/3) Var(f) = (2/3)(1/8)(7/8)
        assert!((dks.rhs - 2.0 / 3.0 * 7.0 / 64.0).abs() < 1e-15);
        assert!(dks.holds);
    }

    #[test]
    fn variance_drop_disjoint_singletons_equality() {
        let space = uniform_space(&[2, 2]);
        let fam = SubsetFamily::singletons(2).unwrap();
        let psis = vec![vec![-1.0, 1.0], vec![-2.0, 2.0]];
        let res = variance_drop_check(&space, &psis, &fam).unwrap();
        assert!(!res.recentered);
        assert!((res.check.lhs - res.check.rhs).abs() < 1e-14);
    }

    #[test]
    fn variance_drop_aligned_copies_equality() {
        // r identical copies on the full set: lhs = r^2 E|psi|^2 = rhs
        let space = uniform_space(&[2, 2]);
        let full = vec![1, 2];
        let fam = SubsetFamily::new(2, &[full.clone()]).unwrap();
        let psi: Vec<f64> = vec![1.0, -1.0, -1.0, 1.0];
        let res = variance_drop_check(&space, &[psi], &fam).unwrap();
        assert!((res.check.lhs - res.check.rhs).abs() < 1e-14);
    }

    #[test]
    fn hypercube_two_point_closed_forms() {
        // uniform on Z_2: Var = (f0-f1)^2/4, E|grad|^2 = (f0-f1)^2
        let u = GroupMeasure::new(1, vec![0.5, 0.5]).unwrap();
        let c = hypercube_poincare(&u).unwrap();
        assert!((c - 0.25).abs() < 1e-12, "c {c}");

        for p in [0.1, 0.3, 0.42, 0.77] {
            let mu = GroupMeasure::new(1, vec![1.0 - p, p]).unwrap();
            let c = hypercube_poincare(&mu).unwrap();
            assert!((c - p * (1.0 - p)).abs() < 1e-12, "p {p}: c {c}");
        }
    }

    #[test]
    fn hypercube_uniform_square() {
        // product of uniform bits keeps the constant
        let u = GroupMeasure::new(2, vec![0.25; 4]).unwrap();
        let c = hypercube_poincare(&u).unwrap();
        assert!((c - 0.25).abs() < 1e-12, "c {c}");
    }

    #[test]
    fn hypercube_translation_invariance() {
        let mu = GroupMeasure::new(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let c = hypercube_poincare(&mu).unwrap();
        for t in 1..4 {
            let ct = hypercube_poincare(&mu.translated(t)).unwrap();
            assert!((c - ct).abs() < 1e-12, "t {t}: {c} vs {ct}");
        }
    }

    #[test]
    fn hypercube_zero_weight_is_error() {
        let mu = GroupMeasure::new(1, vec![1.0, 0.0]);
        // constructor admits it; the solver rejects it
        let mu = mu.unwrap();
        assert!(matches!(
            hypercube_poincare(&mu),
            Err(Error::DisconnectedSupport(_))
        ));
    }

    #[test]
    fn group_convolution_of_bernoullis() {
        // Bernoulli(p) * Bernoulli(q) = Bernoulli(p(1-q) + q(1-p)) on Z_2
        let (p, q) = (0.3, 0.6);
        let a = GroupMeasure::new(1, vec![1.0 - p, p]).unwrap();
        let b = GroupMeasure::new(1, vec![1.0 - q, q]).unwrap();
        let conv = a.convolve(&b).unwrap();
        let expect = p * (1.0 - q) + q * (1.0 - p);
        assert!((conv.weights()[1] - expect).abs() < 1e-14);

        let fam = SubsetFamily::singletons(2).unwrap();
        let check = group_subset_check(&[a, b], &fam).unwrap();
        let bound = p * (1.0 - p) + q * (1.0 - q);
        assert!((check.rhs - bound).abs() < 1e-12);
        assert!((check.lhs - expect * (1.0 - expect)).abs() < 1e-12);
        assert!(check.holds);
    }

    #[test]
    fn group_uniform_fixed_point() {
        // uniform is the convolution fixed point: C_p = 1/4 throughout
        let u = GroupMeasure::new(1, vec![0.5, 0.5]).unwrap();
        let measures = vec![u.clone(), u.clone(), u];
        let fam = SubsetFamily::all_m_subsets(3, 2).unwrap();
        let check = group_subset_check(&measures, &fam).unwrap();
        assert!((check.lhs - 0.25).abs() < 1e-12);
        assert!((check.rhs - 0.25 * 3.0 / 2.0).abs() < 1e-12);
        assert!(check.holds);
    }

    #[test]
    fn linearization_of_entropy_recovers_variance_projection() {
        // (2/eps^2) sum_S D(P_eps,S || Q_S) -> sum_S Var(E[f|X_S])
        let space = uniform_space(&[2, 3]);
        let f: Vec<f64> = (0..6).map(|c| ((c * 7 + 3) % 5) as f64 / 5.0).collect();
        let fam = SubsetFamily::new(2, &[vec![1], vec![2], vec![1, 2]]).unwrap();

        let exact = {
            let mut s = 0.0;
            for k in 0..fam.len() {
                let (q_s, cond) = conditional_expectation(&space, &f, &fam.members(k));
                s += weighted_variance(&q_s, &cond);
            }
            s
        };
        let val = |eps: f64| -> f64 {
            let p = JointMeasure::tilted(&space, &f, eps).unwrap();
            let mut s = 0.0;
            for k in 0..fam.len() {
                let members = fam.members(k);
                s += relative_entropy(&p.marginal(&members), &space.q_marginal(&members))
                    .unwrap();
            }
            2.0 * s / (eps * eps)
        };
        let (e1, e2) = (1e-2, 1e-3);
        let (v1, v2) = (val(e1), val(e2));
        let richardson = v2 + (v2 - v1) * e2 / (e1 - e2);
        assert!(
            (richardson - exact).abs() < 1e-4,
            "richardson {richardson} vs exact {exact}"
        );
    }
}
