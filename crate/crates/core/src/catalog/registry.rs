//! Named catalog entries addressable as `name?key=value&key=value`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::catalog::constructions::{
    generic_graph, make_cone, make_rotational, perturbed_clifford_cone, standard_cone,
    standard_cylinder, standard_torus,
};
use crate::catalog::curves::spiral_cylinder;
use crate::catalog::surfaces::{clifford_torus, hyperbolic_cylinder};
use crate::error::{Error, Result};
use crate::jet::ImmersionSpec;

/// One catalog entry: stable name, parameter schema with defaults, and the
/// classification branch the entry realizes (empty for negative controls).
#[derive(Clone, Debug)]
pub struct EntryInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [(&'static str, f64)],
    pub branch: &'static str,
    /// whether every jet is closed-form Taylor (true for all current entries)
    pub closed_form: bool,
}

pub const ENTRIES: &[EntryInfo] = &[
    EntryInfo {
        name: "cone-clifford",
        description: "cone over the Clifford torus S^1(r) x S^1(sqrt(1-r^2)) in S^3",
        params: &[("r", FRAC_1_SQRT_2), ("n", 4.0)],
        branch: "ThreeCurv-ConeClifford",
        closed_form: true,
    },
    EntryInfo {
        name: "rot-hypcyl",
        description: "rotational hypersurface over the hyperbolic cylinder S^1(r) x H^1(sqrt(1+r^2))",
        params: &[("r", 1.0), ("n", 4.0)],
        branch: "ThreeCurv-RotHypCylinder",
        closed_form: true,
    },
    EntryInfo {
        name: "cyl-spiral",
        description: "cylinder over the plane curve with curvature b e^{a s}",
        params: &[("a", 0.3), ("b", 1.0), ("n", 4.0)],
        branch: "TwoCurv-CurveType",
        closed_form: true,
    },
    EntryInfo {
        name: "cyl-sphere",
        description: "standard cylinder S^k(r) x R^{n-k}",
        params: &[("k", 1.0), ("n", 4.0), ("r", 1.0)],
        branch: "TwoCurv-i",
        closed_form: true,
    },
    EntryInfo {
        name: "cone-sphere",
        description: "standard cone over a small sphere S^k(r) in S^{k+1}",
        params: &[("k", 1.0), ("n", 4.0), ("r", FRAC_1_SQRT_2)],
        branch: "TwoCurv-ii",
        closed_form: true,
    },
    EntryInfo {
        name: "torus",
        description: "S^k(r) x S^{n-k}(sqrt(1-r^2)) in S^{n+1}, stereographically projected",
        params: &[("k", 2.0), ("n", 4.0), ("r", 0.6)],
        branch: "TwoCurv-iii",
        closed_form: true,
    },
    EntryInfo {
        name: "cone-clifford-perturbed",
        description: "negative control: Clifford-torus cone with a squashed generator",
        params: &[("r", FRAC_1_SQRT_2), ("ratio", 1.2), ("n", 4.0)],
        branch: "",
        closed_form: true,
    },
    EntryInfo {
        name: "graph",
        description: "negative control: generic graph hypersurface",
        params: &[("n", 4.0)],
        branch: "",
        closed_form: true,
    },
];

pub fn entries() -> &'static [EntryInfo] {
    ENTRIES
}

/// Parses `name?key=value&...` into the entry name and parameter map.
pub fn parse_name(input: &str) -> Result<(String, BTreeMap<String, f64>)> {
    let (name, rest) = match input.split_once('?') {
        Some((n, r)) => (n, Some(r)),
        None => (input, None),
    };
    if name.is_empty() {
        return Err(Error::UnknownCatalogEntry(input.to_string()));
    }
    let mut params = BTreeMap::new();
    if let Some(rest) = rest {
        for pair in rest.split('&').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::UnknownCatalogEntry(format!("bad parameter `{pair}` in `{input}`")))?;
            let value: f64 = value.parse().map_err(|_| {
                Error::UnknownCatalogEntry(format!("non-numeric value `{value}` in `{input}`"))
            })?;
            params.insert(key.to_string(), value);
        }
    }
    Ok((name.to_string(), params))
}

fn resolve_params(
    info: &EntryInfo,
    given: &BTreeMap<String, f64>,
    input: &str,
) -> Result<BTreeMap<String, f64>> {
    let mut out: BTreeMap<String, f64> =
        info.params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in given {
        if !out.contains_key(k) {
            return Err(Error::UnknownCatalogEntry(format!(
                "unknown parameter `{k}` for `{}` in `{input}`",
                info.name
            )));
        }
        out.insert(k.clone(), *v);
    }
    Ok(out)
}

fn as_int(params: &BTreeMap<String, f64>, key: &str, lo: usize) -> Result<usize> {
    let v = params[key];
    if v.fract() != 0.0 || v < lo as f64 || v > 16.0 {
        return Err(Error::ParamOutOfRange(format!(
            "`{key}` must be an integer in [{lo}, 16], got {v}"
        )));
    }
    Ok(v as usize)
}

fn as_dim(params: &BTreeMap<String, f64>, key: &str) -> Result<usize> {
    as_int(params, key, 2)
}

/// Builds the ImmersionSpec for a catalog name with inline parameters.
pub fn lookup(input: &str) -> Result<ImmersionSpec> {
    let (name, given) = parse_name(input)?;
    let info = ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalogEntry(name.clone()))?;
    let p = resolve_params(info, &given, input)?;
    let spec = match info.name {
        "cone-clifford" => make_cone(&clifford_torus(p["r"])?, as_dim(&p, "n")?)?,
        "rot-hypcyl" => make_rotational(&hyperbolic_cylinder(p["r"])?, as_dim(&p, "n")?)?,
        "cyl-spiral" => spiral_cylinder(p["a"], p["b"], as_dim(&p, "n")?)?,
        "cyl-sphere" => standard_cylinder(as_int(&p, "k", 1)?, as_dim(&p, "n")?, p["r"])?,
        "cone-sphere" => standard_cone(as_int(&p, "k", 1)?, as_dim(&p, "n")?, p["r"])?,
        "torus" => standard_torus(as_int(&p, "k", 1)?, as_dim(&p, "n")?, p["r"])?,
        "cone-clifford-perturbed" => {
            perturbed_clifford_cone(p["r"], p["ratio"], as_dim(&p, "n")?)?
        }
        "graph" => generic_graph(as_dim(&p, "n")?)?,
        _ => unreachable!(),
    };
    let spec = spec
        .with_metadata("entry", info.name)
        .with_metadata("branch", info.branch);
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_entries_all_construct() {
        for info in entries() {
            let spec = lookup(info.name).unwrap();
            assert_eq!(spec.metadata["entry"], info.name);
        }
    }

    #[test]
    fn parameters_override_defaults() {
        let spec = lookup("cone-clifford?r=0.5&n=5").unwrap();
        assert_eq!(spec.n, 5);
        assert_eq!(spec.metadata["r"], "0.5");
    }

    #[test]
    fn unknown_entries_and_params_are_rejected() {
        assert!(matches!(
            lookup("nope"),
            Err(Error::UnknownCatalogEntry(_))
        ));
        assert!(matches!(
            lookup("torus?bogus=1"),
            Err(Error::UnknownCatalogEntry(_))
        ));
        assert!(matches!(
            lookup("torus?k=abc"),
            Err(Error::UnknownCatalogEntry(_))
        ));
    }
}
