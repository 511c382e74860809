//! Verification suites behind a common trait, registered by name and
//! selected at runtime (`verify <suite>` on the CLI, `verify_<suite>` tasks
//! in configs). Each suite checks one family of inequalities against
//! independent numerics and reports verdict rows plus a worst-margin table.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, SubsetFamily};
use crate::convolve::{self, CltBase};
use crate::error::{Error, Result};
use crate::measures::{self, summarize, DiscreteAtoms, GridMeasure};
use crate::numeric::{midpoint_probabilities, split_seed};
use crate::report::{CsvTable, Verdict};
use crate::shearer::{self, FiniteProductSpace, GroupMeasure, JointMeasure};
use crate::spectral;
use crate::transport;
use crate::zoo;

/// Parameters common to all suites; suites ignore what they do not use.
#[derive(Debug, Clone)]
pub struct SuiteParams {
    pub seed: u64,
    /// Randomized instance count; `None` means the suite default.
    pub instances: Option<usize>,
    pub max_n: usize,
    pub max_alphabet: usize,
    pub max_k: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            seed: 1,
            instances: None,
            max_n: 4,
            max_alphabet: 3,
            max_k: 3,
        }
    }
}

/// Outcome of a suite run.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub verdicts: Vec<Verdict>,
    /// Worst margins (or the suite's main numbers), CSV-ready.
    pub table: CsvTable,
    pub pass: bool,
}

impl SuiteReport {
    fn new(name: &str, verdicts: Vec<Verdict>, table: CsvTable) -> Self {
        let pass = verdicts.iter().all(|v| v.holds);
        SuiteReport {
            name: name.to_string(),
            verdicts,
            table,
            pass,
        }
    }
}

/// A named, runtime-selectable verification suite.
pub trait VerifySuite: Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn run(&self, params: &SuiteParams) -> Result<SuiteReport>;
}

fn instance_rng(master: u64, k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(split_seed(master, k))
}

fn random_family(rng: &mut ChaCha8Rng, n: usize, require_cover: bool) -> SubsetFamily {
    let all = (1u64 << n) - 1;
    loop {
        let count = rng.gen_range(1..=(all.min(5)) as usize);
        let mut masks: Vec<u64> = Vec::with_capacity(count);
        while masks.len() < count {
            let m = rng.gen_range(1..=all);
            if !masks.contains(&m) {
                masks.push(m);
            }
        }
        let family = SubsetFamily::from_masks(n, masks).expect("masks are valid");
        if !require_cover || family.t() >= 1 {
            return family;
        }
    }
}

fn random_space(rng: &mut ChaCha8Rng, max_n: usize, max_alphabet: usize) -> FiniteProductSpace {
    let n = rng.gen_range(1..=max_n);
    let weights: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let size = rng.gen_range(2..=max_alphabet);
            let raw: Vec<f64> = (0..size).map(|_| rng.gen_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.iter().map(|w| w / sum).collect()
        })
        .collect();
    FiniteProductSpace::new(weights).expect("random space is valid")
}

fn worst_rows(table: &mut CsvTable, rows: &mut Vec<(f64, Vec<String>)>, keep: usize) {
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, row) in rows.iter().take(keep) {
        table.push_row(row.clone());
    }
}

// ---------------------------------------------------------------------------
// shearer: exact finite-space inequalities, randomized
// ---------------------------------------------------------------------------

struct ShearerSuite;

impl VerifySuite for ShearerSuite {
    fn name(&self) -> &'static str {
        "shearer"
    }

    fn describe(&self) -> &'static str {
        "entropy/variance projection, sum projection and variance drop on random finite spaces"
    }

    fn run(&self, params: &SuiteParams) -> Result<SuiteReport> {
        let instances = params.instances.unwrap_or(10_000);
        let mut violations = [0usize; 4];
        let mut rows: Vec<(f64, Vec<String>)> = Vec::new();
        let check_names = [
            "entropy_shearer",
            "variance_projection",
            "sum_projection",
            "variance_drop",
        ];

        for k in 0..instances {
            let mut rng = instance_rng(params.seed, k as u64);
            let space = random_space(&mut rng, params.max_n, params.max_alphabet);
            let n = space.n();
            let family = random_family(&mut rng, n, false);
            let cells = space.cells();

            // entropy: random P << Q with occasional zero cells
            let mut p_raw: Vec<f64> = (0..cells)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        0.0
                    } else {
                        rng.gen_range(0.0..1.0)
                    }
                })
                .collect();
            let total: f64 = p_raw.iter().sum();
            if total <= 0.0 {
                p_raw = vec![1.0 / cells as f64; cells];
            } else {
                for w in p_raw.iter_mut() {
                    *w /= total;
                }
            }
            let joint = JointMeasure::new(space.clone(), p_raw)?;
            let checks = [
                shearer::entropy_shearer_check(&joint, &family)?,
                {
                    let f: Vec<f64> = (0..cells).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    shearer::variance_projection_check(&space, &f, &family)?
                },
                {
                    let values: Vec<Vec<f64>> = space
                        .sizes()
                        .iter()
                        .map(|&s| (0..s).map(|v| v as f64).collect())
                        .collect();
                    let (a, b, c) = (
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    );
                    let f = move |u: f64| a + b * u + c * u * u;
                    shearer::sum_projection_check(&space, &values, &f, &family)?.family
                },
                {
                    let psis: Vec<Vec<f64>> = (0..family.len())
                        .map(|s| {
                            let dim: usize =
                                family.members(s).iter().map(|&i| space.sizes()[i]).product();
                            (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
                        })
                        .collect();
                    shearer::variance_drop_check(&space, &psis, &family)?.check
                },
            ];
            for (idx, check) in checks.iter().enumerate() {
                if !check.holds {
                    violations[idx] += 1;
                }
                rows.push((
                    check.margin(),
                    vec![
                        k.to_string(),
                        check_names[idx].to_string(),
                        crate::report::fmt_sig(check.lhs),
                        crate::report::fmt_sig(check.rhs),
                        crate::report::fmt_sig(check.margin()),
                    ],
                ));
            }
        }

        let mut verdicts: Vec<Verdict> = check_names
            .iter()
            .zip(&violations)
            .map(|(name, &v)| {
                Verdict::new(
                    "verify_shearer",
                    &format!("{name}: violations over {instances} instances"),
                    v as f64,
                    0.0,
                    v == 0,
                )
            })
            .collect();

        // linearization consistency on a handful of instances
        let mut worst_linearization = 0.0f64;
        for k in 0..16u64 {
            let mut rng = instance_rng(params.seed ^ 0xA5A5, k);
            let space = random_space(&mut rng, params.max_n, params.max_alphabet);
            let family = random_family(&mut rng, space.n(), false);
            let f: Vec<f64> = (0..space.cells()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let err = linearization_error(&space, &f, &family)?;
            worst_linearization = worst_linearization.max(err);
        }
        verdicts.push(Verdict::new(
            "verify_shearer",
            "linearization: |richardson - exact|",
            worst_linearization,
            1e-4,
            worst_linearization <= 1e-4,
        ));

        let mut table = CsvTable::new(&["instance", "check", "lhs", "rhs", "margin"]);
        worst_rows(&mut table, &mut rows, 32);
        Ok(SuiteReport::new(self.name(), verdicts, table))
    }
}

/// `(2/eps^2) sum_S D(P_eps,S || Q_S)` extrapolated in eps against the exact
/// variance projection sum.
fn linearization_error(
    space: &FiniteProductSpace,
    f: &[f64],
    family: &SubsetFamily,
) -> Result<f64> {
    let exact: f64 = {
        let mut s = 0.0;
        for k in 0..family.len() {
            let (q_s, cond) = shearer::conditional_expectation(space, f, &family.members(k));
            let mean: f64 = q_s.iter().zip(&cond).map(|(w, v)| w * v).sum();
            s += q_s
                .iter()
                .zip(&cond)
                .map(|(w, v)| w * (v - mean) * (v - mean))
                .sum::<f64>();
        }
        s
    };
    let val = |eps: f64| -> Result<f64> {
        let p = JointMeasure::tilted(space, f, eps)?;
        let check = shearer::entropy_shearer_check(&p, family)?;
        Ok(2.0 * check.lhs / (eps * eps))
    };
    let (e1, e2) = (1e-2, 1e-3);
    let (v1, v2) = (val(e1)?, val(e2)?);
    let richardson = v2 + (v2 - v1) * e2 / (e1 - e2);
    Ok((richardson - exact).abs())
}

// ---------------------------------------------------------------------------
// hypercube: group subset bound, randomized + closed forms
// ---------------------------------------------------------------------------

struct HypercubeSuite;

impl VerifySuite for HypercubeSuite {
    fn name(&self) -> &'static str {
        "hypercube"
    }

    fn describe(&self) -> &'static str {
        "subset convolution bound for hypercube measures, randomized, plus exact two-point forms"
    }

    fn run(&self, params: &SuiteParams) -> Result<SuiteReport> {
        let instances = params.instances.unwrap_or(1_000);
        let mut violations = 0usize;
        let mut rows: Vec<(f64, Vec<String>)> = Vec::new();
        for k in 0..instances {
            let mut rng = instance_rng(params.seed, k as u64);
            let dim = rng.gen_range(1..=params.max_k);
            let n = rng.gen_range(1..=params.max_n);
            let measures: Vec<GroupMeasure> = (0..n)
                .map(|_| {
                    let raw: Vec<f64> =
                        (0..1usize << dim).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let sum: f64 = raw.iter().sum();
                    GroupMeasure::new(dim, raw.iter().map(|w| w / sum).collect())
                        .expect("random group measure")
                })
                .collect();
            let family = random_family(&mut rng, n, true);
            let check = shearer::group_subset_check(&measures, &family)?;
            if !check.holds {
                violations += 1;
            }
            rows.push((
                check.margin(),
                vec![
                    k.to_string(),
                    format!("k={dim},n={n}"),
                    crate::report::fmt_sig(check.lhs),
                    crate::report::fmt_sig(check.rhs),
                    crate::report::fmt_sig(check.margin()),
                ],
            ));
        }
        let mut verdicts = vec![Verdict::new(
            "verify_hypercube",
            &format!("group subset bound: violations over {instances} instances"),
            violations as f64,
            0.0,
            violations == 0,
        )];

        // closed form C_p = p (1 - p) on Z_2
        let mut worst = 0.0f64;
        for i in 1..20 {
            let p = i as f64 / 20.0;
            let mu = GroupMeasure::new(1, vec![1.0 - p, p])?;
            let c = shearer::hypercube_poincare(&mu)?;
            worst = worst.max((c - p * (1.0 - p)).abs());
        }
        verdicts.push(Verdict::new(
            "verify_hypercube",
            "two-point closed form |C_p - p(1-p)|",
            worst,
            1e-12,
            worst <= 1e-12,
        ));

        let mut table = CsvTable::new(&["instance", "shape", "lhs", "rhs", "margin"]);
        worst_rows(&mut table, &mut rows, 32);
        Ok(SuiteReport::new(self.name(), verdicts, table))
    }
}

// ---------------------------------------------------------------------------
// spectral: constant oracles and Muckenhoupt agreement
// ---------------------------------------------------------------------------

struct SpectralSuite;

impl VerifySuite for SpectralSuite {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn describe(&self) -> &'static str {
        "known constants (Gaussian, uniform, two-sided exponential) and Muckenhoupt brackets"
    }

    fn run(&self, _params: &SuiteParams) -> Result<SuiteReport> {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let oracles = [
            ("gaussian_std", 1.0, 1e-3),
            ("uniform01", 1.0 / pi2, 1e-3),
            ("laplace1", 4.0, 0.02),
        ];
        let mut verdicts = Vec::new();
        let mut table = CsvTable::new(&["measure", "c_p", "oracle", "rel_err", "bracket_lo", "bracket_hi"]);
        for (name, oracle, tol) in oracles {
            let mu = zoo::by_name(name).ok_or_else(|| Error::UnknownName(name.into()))?;
            let res = spectral::estimate_cp(&mu)?;
            let bracket = spectral::muckenhoupt_bracket(&mu)?;
            let rel = (res.c_p - oracle).abs() / oracle;
            verdicts.push(Verdict::new(
                "verify_spectral",
                &format!("{name}: |c_p - oracle|/oracle"),
                rel,
                tol,
                rel <= tol,
            ));
            let in_bracket =
                bracket.lower <= res.c_p * 1.02 && res.c_p <= bracket.upper * 1.02;
            verdicts.push(Verdict::new(
                "verify_spectral",
                &format!("{name}: inside Muckenhoupt bracket"),
                bracket.lower,
                bracket.upper,
                in_bracket,
            ));
            table.push_row(vec![
                name.to_string(),
                crate::report::fmt_sig(res.c_p),
                crate::report::fmt_sig(oracle),
                crate::report::fmt_sig(rel),
                crate::report::fmt_sig(bracket.lower),
                crate::report::fmt_sig(bracket.upper),
            ]);
        }
        // every zoo measure sits inside its own bracket
        for (name, mu) in zoo::zoo() {
            let res = spectral::estimate_cp(&mu)?;
            let bracket = spectral::muckenhoupt_bracket(&mu)?;
            let ok = bracket.lower <= res.c_p * 1.02 && res.c_p <= bracket.upper * 1.02;
            verdicts.push(Verdict::new(
                "verify_spectral",
                &format!("{name}: bracket agreement"),
                bracket.lower,
                bracket.upper,
                ok,
            ));
        }
        Ok(SuiteReport::new(self.name(), verdicts, table))
    }
}

// ---------------------------------------------------------------------------
// zoo pair machinery shared by subadditivity / stability
// ---------------------------------------------------------------------------

struct PairData {
    name_a: String,
    name_b: String,
    c_a: f64,
    c_b: f64,
    c_conv: f64,
    sigma2_conv: f64,
}

fn zoo_pair_table() -> Result<Vec<PairData>> {
    let z = zoo::zoo();
    let constants: Vec<f64> = z
        .iter()
        .map(|(_, mu)| spectral::estimate_cp(mu).map(|r| r.c_p))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..z.len() {
        for j in i..z.len() {
            let conv = convolve::convolve_pair(&z[i].1, &z[j].1)?;
            let c_conv = spectral::estimate_cp(&conv)?.c_p;
            let sigma2_conv = summarize(&conv).variance;
            out.push(PairData {
                name_a: z[i].0.clone(),
                name_b: z[j].0.clone(),
                c_a: constants[i],
                c_b: constants[j],
                c_conv,
                sigma2_conv,
            });
        }
    }
    Ok(out)
}

struct SubadditivitySuite;

impl VerifySuite for SubadditivitySuite {
    fn name(&self) -> &'static str {
        "subadditivity"
    }

    fn describe(&self) -> &'static str {
        "c_p(mu*nu) <= c_p(mu) + c_p(nu) on all zoo pairs, Gaussian equality, and the 3-copy subset bound"
    }

    fn run(&self, _params: &SuiteParams) -> Result<SuiteReport> {
        let pairs = zoo_pair_table()?;
        let mut verdicts = Vec::new();
        let mut table =
            CsvTable::new(&["pair", "c_mu", "c_nu", "c_conv", "bound", "margin"]);
        for p in &pairs {
            let bound = p.c_a + p.c_b;
            let holds = p.c_conv <= bound * (1.0 + 1e-3);
            verdicts.push(Verdict::new(
                "verify_subadditivity",
                &format!("{} * {}", p.name_a, p.name_b),
                p.c_conv,
                bound,
                holds,
            ));
            table.push_row(vec![
                format!("{}*{}", p.name_a, p.name_b),
                crate::report::fmt_sig(p.c_a),
                crate::report::fmt_sig(p.c_b),
                crate::report::fmt_sig(p.c_conv),
                crate::report::fmt_sig(bound),
                crate::report::fmt_sig(bound - p.c_conv),
            ]);
            if p.name_a == "gaussian_std" && p.name_b == "gaussian_std" {
                let eq = (p.c_conv - bound).abs() <= 1e-3 * bound;
                verdicts.push(Verdict::new(
                    "verify_subadditivity",
                    "gaussian pair equality",
                    (p.c_conv - bound).abs(),
                    1e-3 * bound,
                    eq,
                ));
            }
        }

        // three i.i.d. copies, all 2-subsets: c_p(mu*mu*mu) <= (3/2) c_p(mu*mu)
        for name in ["uniform01", "gaussian_std", "bernoulli_smooth_05"] {
            let mu = zoo::by_name(name).ok_or_else(|| Error::UnknownName(name.into()))?;
            let two = convolve::convolve_pair(&mu, &mu)?;
            let three = convolve::convolve_pair(&two, &mu)?;
            let c2 = spectral::estimate_cp(&two)?.c_p;
            let c3 = spectral::estimate_cp(&three)?.c_p;
            let family = SubsetFamily::all_m_subsets(3, 2)?;
            let bound = bounds::shearer_subset_bound(&family, &[c2, c2, c2])?.value;
            verdicts.push(Verdict::new(
                "verify_subadditivity",
                &format!("{name}: 3 copies vs 2-subset bound"),
                c3,
                bound,
                c3 <= bound * (1.0 + 1e-3),
            ));
        }
        Ok(SuiteReport::new(self.name(), verdicts, table))
    }
}

struct StabilitySuite;

impl VerifySuite for StabilitySuite {
    fn name(&self) -> &'static str {
        "stability"
    }

    fn describe(&self) -> &'static str {
        "quantitative subadditivity with the measured gap penalty, on all zoo pairs"
    }

    fn run(&self, _params: &SuiteParams) -> Result<SuiteReport> {
        let pairs = zoo_pair_table()?;
        let mut verdicts = Vec::new();
        let mut table = CsvTable::new(&["pair", "c_conv", "stability_rhs", "implied", "margin"]);
        for p in &pairs {
            let rhs =
                bounds::stability_bound(p.c_a, p.c_b, p.c_conv.max(p.sigma2_conv), p.sigma2_conv)?
                    .value;
            let implied =
                bounds::stability_implied_bound(p.c_a, p.c_b, p.sigma2_conv.min(p.c_a + p.c_b))?
                    .value;
            let holds_direct = p.c_conv <= rhs * (1.0 + 1e-3);
            let holds_implied = p.c_conv <= implied + 1e-3 * implied;
            verdicts.push(Verdict::new(
                "verify_stability",
                &format!("{} * {}: direct", p.name_a, p.name_b),
                p.c_conv,
                rhs,
                holds_direct,
            ));
            verdicts.push(Verdict::new(
                "verify_stability",
                &format!("{} * {}: implied envelope", p.name_a, p.name_b),
                p.c_conv,
                implied,
                holds_implied,
            ));
            table.push_row(vec![
                format!("{}*{}", p.name_a, p.name_b),
                crate::report::fmt_sig(p.c_conv),
                crate::report::fmt_sig(rhs),
                crate::report::fmt_sig(implied),
                crate::report::fmt_sig(rhs - p.c_conv),
            ]);
        }
        Ok(SuiteReport::new(self.name(), verdicts, table))
    }
}

// ---------------------------------------------------------------------------
// gap: C_p - sigma^2 >= W2(mu, matched gaussian)^2 on the zoo
// ---------------------------------------------------------------------------

struct GapSuite;

impl VerifySuite for GapSuite {
    fn name(&self) -> &'static str {
        "gap"
    }

    fn describe(&self) -> &'static str {
        "gap lower bound via the matched-Gaussian W2 distance on the whole zoo"
    }

    fn run(&self, _params: &SuiteParams) -> Result<SuiteReport> {
        let mut verdicts = Vec::new();
        let mut table = CsvTable::new(&["measure", "gap", "w2_sq", "margin"]);
        for (name, mu) in zoo::zoo() {
            let check = transport::gap_lower_bound_check(&mu)?;
            verdicts.push(Verdict::new(
                "verify_gap",
                &format!("{name}: gap >= W2^2"),
                check.w2_sq,
                check.gap,
                check.holds,
            ));
            table.push_row(vec![
                name,
                crate::report::fmt_sig(check.gap),
                crate::report::fmt_sig(check.w2_sq),
                crate::report::fmt_sig(check.gap - check.w2_sq),
            ]);
        }
        Ok(SuiteReport::new(self.name(), verdicts, table))
    }
}

// ---------------------------------------------------------------------------
// w2clt: quantitative CLT bound at desk scale
// ---------------------------------------------------------------------------

struct W2CltSuite;

impl VerifySuite for W2CltSuite {
    fn name(&self) -> &'static str {
        "w2clt"
    }

    fn describe(&self) -> &'static str {
        "W2(nu_n, gamma_1)^2 against the smoothed-constant bound for the +/-1 Bernoulli base"
    }

    fn run(&self, _params: &SuiteParams) -> Result<SuiteReport> {
        let delta2 = 1.0;
        let atoms = DiscreteAtoms::new(vec![(-1.0, 0.5), (1.0, 0.5)])?;
        let smoothed = measures::materialize(
            &measures::MaterializeSpec::SmoothedAtoms {
                atoms: atoms.clone(),
                delta2,
            },
            10.0,
            measures::DEFAULT_N_GRID,
        )?;
        let c_delta = spectral::estimate_cp(&smoothed)?.c_p;
        let gauss = GridMeasure::gaussian(0.0, 1.0, 10.0, measures::DEFAULT_N_GRID)?;
        let us = midpoint_probabilities(transport::DEFAULT_W2_NODES);
        let gauss_q = transport::grid_quantiles(&gauss, &us);

        let mut verdicts = Vec::new();
        let mut table = CsvTable::new(&["n", "w2_sq", "bound", "margin"]);
        for n in [1usize, 4, 16, 64] {
            let nu_n = atoms.standardized_sum(n)?;
            let q = nu_n.quantiles_at(&us);
            let w2 = transport::w2_from_quantiles(&q, &gauss_q);
            let w2_sq = w2 * w2;
            let bound = bounds::w2_clt_bound(1, delta2, c_delta, n as u64)?.value;
            verdicts.push(Verdict::new(
                "verify_w2clt",
                &format!("n = {n}: W2^2 <= bound"),
                w2_sq,
                bound,
                w2_sq <= bound + 1e-3,
            ));
            table.push_numbers(&[n as f64, w2_sq, bound, bound - w2_sq]);
        }
        Ok(SuiteReport::new(self.name(), verdicts, table))
    }
}

// ---------------------------------------------------------------------------
// cltmono: monotone trace and vanishing-regularization trace
// ---------------------------------------------------------------------------

struct CltMonoSuite;

impl VerifySuite for CltMonoSuite {
    fn name(&self) -> &'static str {
        "cltmono"
    }

    fn describe(&self) -> &'static str {
        "c_p non-increasing along standardized sums; smoothed-trace cap for the Bernoulli base"
    }

    fn run(&self, _params: &SuiteParams) -> Result<SuiteReport> {
        let mut verdicts = Vec::new();
        let mut table = CsvTable::new(&["trace", "n", "c_p", "sigma2", "w2"]);

        let uniform = measures::standardize(&GridMeasure::uniform(0.0, 1.0, 2049)?)?;
        let trace = convolve::clt_trace(&CltBase::Grid(uniform), &[1, 2, 4, 8], 0.0)?;
        for pair in trace.entries.windows(2) {
            verdicts.push(Verdict::new(
                "verify_cltmono",
                &format!("uniform: c_p(n={}) <= c_p(n={})", pair[1].n, pair[0].n),
                pair[1].c_p,
                pair[0].c_p,
                pair[1].c_p <= pair[0].c_p + 1e-6,
            ));
        }
        for e in &trace.entries {
            table.push_row(vec![
                "uniform".into(),
                e.n.to_string(),
                crate::report::fmt_sig(e.c_p),
                crate::report::fmt_sig(e.sigma2),
                crate::report::fmt_sig(e.w2_to_gaussian),
            ]);
        }

        let atoms = DiscreteAtoms::new(vec![(-0.5, 0.5), (0.5, 0.5)])?;
        let delta2 = 0.5;
        let trace = convolve::clt_trace(&CltBase::Atoms(atoms), &[1, 2, 4, 8], delta2)?;
        let first = trace.entries[0].c_p;
        let cap = bounds::smoothing_constant_bound(delta2)?.value;
        for e in &trace.entries {
            verdicts.push(Verdict::new(
                "verify_cltmono",
                &format!("bernoulli: c_p(n={}) <= c_p(n=1)", e.n),
                e.c_p,
                first,
                e.c_p <= first + 1e-3,
            ));
            verdicts.push(Verdict::new(
                "verify_cltmono",
                &format!("bernoulli: c_p(n={}) <= smoothing cap", e.n),
                e.c_p,
                cap,
                e.c_p <= cap,
            ));
            table.push_row(vec![
                "bernoulli".into(),
                e.n.to_string(),
                crate::report::fmt_sig(e.c_p),
                crate::report::fmt_sig(e.sigma2),
                crate::report::fmt_sig(e.w2_to_gaussian),
            ]);
        }
        Ok(SuiteReport::new(self.name(), verdicts, table))
    }
}

// ---------------------------------------------------------------------------
// comparison: Fisher-free vs Fisher-dependent bound; compact-support crossover
// ---------------------------------------------------------------------------

struct ComparisonSuite;

impl VerifySuite for ComparisonSuite {
    fn name(&self) -> &'static str {
        "comparison"
    }

    fn describe(&self) -> &'static str {
        "iid stability <= Fisher-dependent stability on a parameter grid; compact-support crossover"
    }

    fn run(&self, _params: &SuiteParams) -> Result<SuiteReport> {
        let mut violations = 0usize;
        let mut total = 0usize;
        for i in 0..20 {
            let c1 = 1.0 + 9.0 * i as f64 / 19.0;
            for j in 0..20 {
                let c2 = 1.0 + (c1 - 1.0) * j as f64 / 19.0;
                for jf in [1.0, 2.0, 5.0, 10.0, 100.0] {
                    total += 1;
                    let iid = bounds::iid_stability_bound(c1, c2, 1.0)?.value;
                    let johnson = bounds::johnson_stability_bound(c1, c2, jf)?.value;
                    if iid > johnson + 1e-12 {
                        violations += 1;
                    }
                }
            }
        }
        let mut verdicts = vec![Verdict::new(
            "verify_comparison",
            &format!("iid <= johnson: violations over {total} grid points"),
            violations as f64,
            0.0,
            violations == 0,
        )];

        let crossover = bounds::zhai_crossover(1, 1.0, 1.0, 2.0)?;
        let mut table = CsvTable::new(&["quantity", "value"]);
        match crossover {
            Some(n) => {
                let single = bounds::zhai_bound(1, 1.0, n)?.value
                    < bounds::w2_clt_bound(1, 1.0, 2.0, n)?.value
                    && bounds::zhai_bound(1, 1.0, n - 1)?.value
                        >= bounds::w2_clt_bound(1, 1.0, 2.0, n - 1)?.value;
                verdicts.push(Verdict::new(
                    "verify_comparison",
                    "compact-support crossover is a single n",
                    n as f64,
                    n as f64,
                    single,
                ));
                table.push_row(vec!["crossover_n".into(), n.to_string()]);
            }
            None => {
                verdicts.push(Verdict::new(
                    "verify_comparison",
                    "compact-support crossover exists",
                    f64::INFINITY,
                    0.0,
                    false,
                ));
            }
        }
        Ok(SuiteReport::new(self.name(), verdicts, table))
    }
}

/// The suite registry, in listing order.
pub fn registry() -> &'static [&'static dyn VerifySuite] {
    &[
        &ShearerSuite,
        &HypercubeSuite,
        &SpectralSuite,
        &SubadditivitySuite,
        &StabilitySuite,
        &GapSuite,
        &W2CltSuite,
        &CltMonoSuite,
        &ComparisonSuite,
    ]
}

/// Look a suite up by name.
pub fn lookup(name: &str) -> Result<&'static dyn VerifySuite> {
    registry()
        .iter()
        .find(|s| s.name() == name)
        .copied()
        .ok_or_else(|| Error::UnknownName(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_resolve() {
        for suite in registry() {
            assert!(lookup(suite.name()).is_ok());
        }
        assert!(lookup("ghost").is_err());
    }

    #[test]
    fn shearer_suite_small_run_passes_and_is_deterministic() {
        let params = SuiteParams {
            seed: 42,
            instances: Some(50),
            ..Default::default()
        };
        let a = lookup("shearer").unwrap().run(&params).unwrap();
        let b = lookup("shearer").unwrap().run(&params).unwrap();
        assert!(a.pass);
        assert_eq!(a.table.render(), b.table.render());
    }

    #[test]
    fn hypercube_suite_small_run_passes() {
        let params = SuiteParams {
            seed: 7,
            instances: Some(25),
            ..Default::default()
        };
        let report = lookup("hypercube").unwrap().run(&params).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn comparison_suite_passes() {
        let report = lookup("comparison")
            .unwrap()
            .run(&SuiteParams::default())
            .unwrap();
        assert!(report.pass);
        let rendered = report.table.render();
        assert!(rendered.contains("crossover_n"));
    }
}
