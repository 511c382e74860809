//! Named bound calculators behind a common trait.
//!
//! Every closed-form calculator is registered by name and selected at
//! runtime (`bounds <name> ...` on the CLI, `bounds_<name>` tasks in
//! configs). Arguments arrive as a JSON object; each strategy parses its
//! own and returns a one-line JSON report.

use serde_json::{Map, Value};

use crate::bounds::{self, SubsetFamily};
use crate::error::{Error, Result};

pub type ArgMap = Map<String, Value>;

/// A named, runtime-selectable bound calculator.
pub trait BoundCalculator: Sync {
    fn name(&self) -> &'static str;
    /// One-line parameter summary for `--help`-style listings.
    fn usage(&self) -> &'static str;
    fn evaluate(&self, args: &ArgMap) -> Result<Value>;
}

fn real(args: &ArgMap, key: &str) -> Result<f64> {
    args.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::invalid_parameter(key, "missing or not a number"))
}

fn integer(args: &ArgMap, key: &str) -> Result<u64> {
    args.get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::invalid_parameter(key, "missing or not a nonnegative integer"))
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

macro_rules! calculator {
    ($struct_name:ident, $name:literal, $usage:literal, $args:ident, $body:expr) => {
        struct $struct_name;
        impl BoundCalculator for $struct_name {
            fn name(&self) -> &'static str {
                $name
            }
            fn usage(&self) -> &'static str {
                $usage
            }
            fn evaluate(&self, $args: &ArgMap) -> Result<Value> {
                $body
            }
        }
    };
}

calculator!(
    Subadditivity,
    "subadditivity",
    "--c_mu R --c_nu R",
    args,
    to_value(&bounds::subadditivity_bound(
        real(args, "c_mu")?,
        real(args, "c_nu")?
    )?)
);

calculator!(
    ShearerSubset,
    "shearer_subset",
    "--n I --subsets [[1,2],...] --values [R,...]",
    args,
    {
        let n = integer(args, "n")? as usize;
        let subsets: Vec<Vec<usize>> = args
            .get("subsets")
            .cloned()
            .ok_or_else(|| Error::invalid_parameter("subsets", "missing"))
            .and_then(|v| serde_json::from_value(v).map_err(Error::from))?;
        let values: Vec<f64> = args
            .get("values")
            .cloned()
            .ok_or_else(|| Error::invalid_parameter("values", "missing"))
            .and_then(|v| serde_json::from_value(v).map_err(Error::from))?;
        let family = SubsetFamily::new(n, &subsets)?;
        to_value(&bounds::shearer_subset_bound(&family, &values)?)
    }
);

calculator!(
    Stability,
    "stability",
    "--c_mu R --c_nu R --c_conv R --sigma2 R",
    args,
    to_value(&bounds::stability_bound(
        real(args, "c_mu")?,
        real(args, "c_nu")?,
        real(args, "c_conv")?,
        real(args, "sigma2")?
    )?)
);

calculator!(
    StabilityImplied,
    "stability_implied",
    "--c_mu R --c_nu R --sigma2 R",
    args,
    to_value(&bounds::stability_implied_bound(
        real(args, "c_mu")?,
        real(args, "c_nu")?,
        real(args, "sigma2")?
    )?)
);

calculator!(
    IidStability,
    "iid_stability",
    "--c1 R --c2 R --sigma2 R",
    args,
    to_value(&bounds::iid_stability_bound(
        real(args, "c1")?,
        real(args, "c2")?,
        real(args, "sigma2")?
    )?)
);

calculator!(
    IidImplied,
    "iid_implied",
    "--c1 R --sigma2 R",
    args,
    to_value(&bounds::iid_implied_bound(
        real(args, "c1")?,
        real(args, "sigma2")?
    )?)
);

calculator!(
    JohnsonStability,
    "johnson_stability",
    "--c1 R --c2 R --fisher_j R",
    args,
    to_value(&bounds::johnson_stability_bound(
        real(args, "c1")?,
        real(args, "c2")?,
        real(args, "fisher_j")?
    )?)
);

calculator!(
    RateGeometric,
    "rate_geometric",
    "--c1 R --n I",
    args,
    to_value(&bounds::rate_geometric(
        real(args, "c1")?,
        integer(args, "n")? as u32
    )?)
);

calculator!(
    RateRecurrence,
    "rate_recurrence",
    "--n_max I",
    args,
    {
        let n_max = integer(args, "n_max")? as usize;
        let values = bounds::rate_recurrence(n_max);
        Ok(serde_json::json!({
            "name": "rate_recurrence",
            "n_max": n_max,
            "values": values,
        }))
    }
);

calculator!(
    RateExplicit,
    "rate_explicit",
    "--n I",
    args,
    to_value(&bounds::rate_explicit(integer(args, "n")? as u32)?)
);

calculator!(
    W2Clt,
    "w2_clt",
    "--d I --delta2 R --c_delta R --n I",
    args,
    to_value(&bounds::w2_clt_bound(
        integer(args, "d")? as u32,
        real(args, "delta2")?,
        real(args, "c_delta")?,
        integer(args, "n")?
    )?)
);

calculator!(
    Zhai,
    "zhai",
    "--d I --radius R --n I",
    args,
    to_value(&bounds::zhai_bound(
        integer(args, "d")? as u32,
        real(args, "radius")?,
        integer(args, "n")?
    )?)
);

calculator!(
    ZhaiCrossover,
    "zhai_crossover",
    "--d I --radius R --delta2 R --c_delta R",
    args,
    {
        let n = bounds::zhai_crossover(
            integer(args, "d")? as u32,
            real(args, "radius")?,
            real(args, "delta2")?,
            real(args, "c_delta")?,
        )?;
        Ok(serde_json::json!({
            "name": "zhai_crossover",
            "crossover_n": n,
        }))
    }
);

calculator!(
    Concentration,
    "concentration",
    "--t R --c_p R --k_abs R",
    args,
    to_value(&bounds::concentration_profile(
        real(args, "t")?,
        real(args, "c_p")?,
        real(args, "k_abs")?
    )?)
);

calculator!(
    SmoothingConstant,
    "smoothing_constant",
    "--delta2 R",
    args,
    to_value(&bounds::smoothing_constant_bound(real(args, "delta2")?)?)
);

/// The full calculator registry, in listing order.
pub fn registry() -> &'static [&'static dyn BoundCalculator] {
    &[
        &Subadditivity,
        &ShearerSubset,
        &Stability,
        &StabilityImplied,
        &IidStability,
        &IidImplied,
        &JohnsonStability,
        &RateGeometric,
        &RateRecurrence,
        &RateExplicit,
        &W2Clt,
        &Zhai,
        &ZhaiCrossover,
        &Concentration,
        &SmoothingConstant,
    ]
}

/// Look a calculator up by name.
pub fn lookup(name: &str) -> Result<&'static dyn BoundCalculator> {
    registry()
        .iter()
        .find(|c| c.name() == name)
        .copied()
        .ok_or_else(|| Error::UnknownName(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(pairs: &[(&str, Value)]) -> ArgMap {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn registry_names_are_unique_and_resolvable() {
        let mut names: Vec<&str> = registry().iter().map(|c| c.name()).collect();
        let total = names.len();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), total);
        for name in names {
            assert!(lookup(name).is_ok());
        }
        assert!(lookup("not_a_bound").is_err());
    }

    #[test]
    fn evaluate_through_the_registry() {
        let calc = lookup("subadditivity").unwrap();
        let out = calc
            .evaluate(&args(&[("c_mu", 1.0.into()), ("c_nu", 2.0.into())]))
            .unwrap();
        assert_eq!(out["value"], Value::from(3.0));

        let calc = lookup("shearer_subset").unwrap();
        let out = calc
            .evaluate(&args(&[
                ("n", 2u64.into()),
                ("subsets", serde_json::json!([[1], [2], [1, 2]])),
                ("values", serde_json::json!([1.0, 1.0, 2.0])),
            ]))
            .unwrap();
        assert_eq!(out["value"], Value::from(2.0));

        let calc = lookup("rate_recurrence").unwrap();
        let out = calc.evaluate(&args(&[("n_max", 2u64.into())])).unwrap();
        assert_eq!(out["values"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn missing_arguments_are_reported() {
        let calc = lookup("stability").unwrap();
        assert!(calc.evaluate(&args(&[("c_mu", 1.0.into())])).is_err());
    }
}
