//! Built-in test measures.

use crate::error::Result;
use crate::measures::{materialize, DiscreteAtoms, GaussianMixtureSpec, GridMeasure,
    MaterializeSpec};

/// Grid resolution used by the zoo.
pub const ZOO_N_GRID: usize = 4097;

/// Half-width (in units of the scale) for exponential-tail windows. Wide
/// enough that window truncation moves the Laplace/exponential constants by
/// about 1%, well inside the 2% oracle tolerance.
pub const EXP_TAIL_HALFWIDTH: f64 = 60.0;

fn smoothed_bernoulli(delta2: f64) -> Result<GridMeasure> {
    let atoms = DiscreteAtoms::new(vec![(-0.5, 0.5), (0.5, 0.5)])?;
    materialize(
        &MaterializeSpec::SmoothedAtoms { atoms, delta2 },
        10.0,
        ZOO_N_GRID,
    )
}

/// The built-in measure zoo, in a fixed order.
pub fn zoo() -> Vec<(String, GridMeasure)> {
    let gauss = GridMeasure::gaussian(0.0, 1.0, 8.0, ZOO_N_GRID).expect("gaussian");
    let uniform = GridMeasure::uniform(0.0, 1.0, ZOO_N_GRID).expect("uniform");
    let laplace = GridMeasure::laplace(1.0, EXP_TAIL_HALFWIDTH, ZOO_N_GRID).expect("laplace");
    let expo = GridMeasure::exponential(1.0, EXP_TAIL_HALFWIDTH, ZOO_N_GRID).expect("exponential");
    let bern025 = smoothed_bernoulli(0.25).expect("smoothed bernoulli 0.25");
    let bern05 = smoothed_bernoulli(0.5).expect("smoothed bernoulli 0.5");
    let mix = GaussianMixtureSpec::new(vec![(0.5, -1.0, 1.0), (0.5, 1.0, 1.0)])
        .and_then(|m| m.materialize(10.0, ZOO_N_GRID))
        .expect("gaussian mixture");
    vec![
        ("gaussian_std".into(), gauss),
        ("uniform01".into(), uniform),
        ("laplace1".into(), laplace),
        ("exponential1".into(), expo),
        ("bernoulli_smooth_025".into(), bern025),
        ("bernoulli_smooth_05".into(), bern05),
        ("gauss_mix_sym".into(), mix),
    ]
}

/// Look up a zoo measure by name.
pub fn by_name(name: &str) -> Option<GridMeasure> {
    zoo().into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, m)| m)
}
