use poincare_lab::eigen::SymTridiag;

fn main() {
    let n = 4097usize;
    let h = 120.0 / (n as f64 - 1.0);
    let p: Vec<f64> = (0..n).map(|i| (-((-60.0 + h * i as f64).abs())).exp() / 2.0).collect();
    let w: Vec<f64> = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect();
    let total: f64 = p.iter().zip(&w).map(|(a, b)| a * b).sum();
    let m: Vec<f64> = p.iter().zip(&w).map(|(a, b)| a * b / total).collect();
    let c: Vec<f64> = p.windows(2).map(|q| 0.5 * (q[0] + q[1]) / h / total).collect();
    let k = c.len();
    let diag: Vec<f64> = (0..k).map(|i| c[i] * (1.0 / m[i] + 1.0 / m[i + 1])).collect();
    let off: Vec<f64> = (0..k - 1).map(|i| -(c[i] * c[i + 1]).sqrt() / m[i + 1]).collect();
    let t = SymTridiag::new(diag, off);
    let l0 = t.eigenvalue_k(0);
    let y = t.eigenvector(l0).unwrap();

    // reconstruct f by cumulative sum of g = y / sqrt(c)
    let mut f = vec![0.0; k + 1];
    for i in 0..k {
        f[i + 1] = f[i] + y[i] / c[i].sqrt();
    }
    let mass_sum: f64 = m.iter().sum();
    let mean: f64 = m.iter().zip(&f).map(|(mi, fi)| mi * fi).sum();
    let var: f64 = m.iter().zip(&f).map(|(mi, fi)| mi * (fi - mean) * (fi - mean)).sum();
    let energy: f64 = c.iter().enumerate().map(|(i, ci)| { let d = f[i+1]-f[i]; ci * d * d }).sum();
    let y2: f64 = y.iter().map(|v| v * v).sum();
    println!("mass_sum - 1   = {:.3e}", mass_sum - 1.0);
    println!("mean(f)        = {:.6e}", mean);
    println!("energy - |y|^2 = {:.3e}   |y|^2 = {:.12}", energy - y2, y2);
    println!("var/energy     = {:.12}", var / energy);
    println!("1/l0           = {:.12}", 1.0 / l0);
    println!("f range: [{:.3e}, {:.3e}]", f.iter().cloned().fold(f64::MAX, f64::min), f.iter().cloned().fold(f64::MIN, f64::max));

    // alternative reconstruction: f2 = (1/l0) M^-1 B' C g  (exactly mean-free)
    let g: Vec<f64> = (0..k).map(|i| y[i] / c[i].sqrt()).collect();
    let mut f2 = vec![0.0; k + 1];
    for j in 0..=k {
        let up = if j == 0 { 0.0 } else { c[j - 1] * g[j - 1] };
        let dn = if j == k { 0.0 } else { c[j] * g[j] };
        f2[j] = (up - dn) / (l0 * m[j]);
    }
    let mean2: f64 = m.iter().zip(&f2).map(|(mi, fi)| mi * fi).sum();
    let var2: f64 = m.iter().zip(&f2).map(|(mi, fi)| mi * (fi - mean2) * (fi - mean2)).sum();
    let energy2: f64 = c.iter().enumerate().map(|(i, ci)| { let d = f2[i+1]-f2[i]; ci * d * d }).sum();
    println!("direct: var/energy = {:.12}  mean = {:.3e}", var2 / energy2, mean2);
    // compare Bf2 with g
    let maxdiff = (0..k).map(|i| ((f2[i+1]-f2[i]) - g[i]).abs() / (g[i].abs().max(1e-30))).fold(0.0f64, f64::max);
    println!("max rel |Bf2 - g| = {:.3e}", maxdiff);
}
