//! External hypersurface descriptions: a small declarative JSON schema that
//! references the built-in chart primitives and composition operators. No
//! runtime code loading, so files are safe to share.
//!
//! Schema (tagged by `kind`):
//! - `{"kind": "catalog", "name": "cone-clifford", "params": {"r": 0.5}}`
//! - `{"kind": "surface", "surface": "clifford-torus", "r": 0.7071,
//!    "construction": "cone", "n": 4, "axis_ratio": 1.2}` (ratio optional)
//! - `{"kind": "curve-cylinder", "a": 0.3, "b": 1.0, "n": 4,
//!    "integrated": {"interval": [0.0, 2.0], "step": 0.004}}` (block optional)

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::catalog::constructions::{
    make_cone, make_cylinder, make_rotational, perturbed_clifford_cone,
};
use crate::catalog::curves::{integrated_curve_cylinder, spiral_cylinder, CurvatureLaw};
use crate::catalog::registry;
use crate::catalog::surfaces::{clifford_torus, hyperbolic_cylinder, SurfaceSpec};
use crate::error::{Error, Result};
use crate::jet::ImmersionSpec;

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    CliffordTorus,
    HyperbolicCylinder,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Cylinder,
    Cone,
    Rotational,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Integration {
    pub interval: (f64, f64),
    pub step: f64,
}

/// Parsed form of an external spec file.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpecFile {
    /// a catalog entry with parameter overrides
    Catalog {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    /// a composition operator applied to a generating surface
    Surface {
        surface: SurfaceKind,
        r: f64,
        construction: Construction,
        n: usize,
        /// optional squash perturbation (Clifford torus + cone only)
        #[serde(default)]
        axis_ratio: Option<f64>,
    },
    /// cylinder over the plane curve with curvature b e^{a s}
    CurveCylinder {
        a: f64,
        b: f64,
        n: usize,
        /// integrate the Frenet system instead of using the closed form
        #[serde(default)]
        integrated: Option<Integration>,
    },
}

fn build_surface(kind: SurfaceKind, r: f64) -> Result<SurfaceSpec> {
    match kind {
        SurfaceKind::CliffordTorus => clifford_torus(r),
        SurfaceKind::HyperbolicCylinder => hyperbolic_cylinder(r),
    }
}

impl SpecFile {
    pub fn build(&self) -> Result<ImmersionSpec> {
        match self {
            SpecFile::Catalog { name, params } => {
                let mut full = name.clone();
                if !params.is_empty() {
                    let tail: Vec<String> =
                        params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    full = format!("{name}?{}", tail.join("&"));
                }
                registry::lookup(&full)
            }
            SpecFile::Surface {
                surface,
                r,
                construction,
                n,
                axis_ratio,
            } => {
                if let Some(ratio) = axis_ratio {
                    return match (surface, construction) {
                        (SurfaceKind::CliffordTorus, Construction::Cone) => {
                            perturbed_clifford_cone(*r, *ratio, *n)
                        }
                        _ => Err(Error::InvalidSpecFile(
                            "axis_ratio is only supported for the Clifford-torus cone".into(),
                        )),
                    };
                }
                let g = build_surface(*surface, *r)?;
                match construction {
                    Construction::Cylinder => make_cylinder(&g, *n),
                    Construction::Cone => make_cone(&g, *n),
                    Construction::Rotational => make_rotational(&g, *n),
                }
            }
            SpecFile::CurveCylinder { a, b, n, integrated } => match integrated {
                None => spiral_cylinder(*a, *b, *n),
                Some(cfg) => integrated_curve_cylinder(
                    CurvatureLaw::Exponential { a: *a, b: *b },
                    cfg.interval,
                    cfg.step,
                    *n,
                ),
            },
        }
    }
}

/// Parses a JSON spec description.
pub fn parse_spec_file(text: &str) -> Result<SpecFile> {
    serde_json::from_str(text).map_err(|e| Error::InvalidSpecFile(e.to_string()))
}

/// Reads and builds a spec file from disk.
pub fn load_spec_file(path: &Path) -> Result<ImmersionSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidSpecFile(format!("{}: {e}", path.display())))?;
    parse_spec_file(&text)?.build()
}

/// Resolves a CLI argument: a catalog name (with optional inline parameters)
/// or a path to a JSON spec file.
pub fn resolve(arg: &str) -> Result<ImmersionSpec> {
    let path = Path::new(arg);
    if arg.ends_with(".json") || path.is_file() {
        load_spec_file(path)
    } else {
        registry::lookup(arg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_kind_matches_registry_lookup() {
        let sf = parse_spec_file(
            r#"{"kind": "catalog", "name": "cone-clifford", "params": {"r": 0.5, "n": 5}}"#,
        )
        .unwrap();
        let a = sf.build().unwrap();
        let b = registry::lookup("cone-clifford?r=0.5&n=5").unwrap();
        assert_eq!(a.n, b.n);
        assert_eq!(a.eval_value(&[0.2, -0.3, 0.4, 0.9, 0.1]), b.eval_value(&[0.2, -0.3, 0.4, 0.9, 0.1]));
    }

    #[test]
    fn surface_composition_builds() {
        let sf = parse_spec_file(
            r#"{"kind": "surface", "surface": "hyperbolic-cylinder", "r": 1.0,
                "construction": "rotational", "n": 4}"#,
        )
        .unwrap();
        let spec = sf.build().unwrap();
        assert_eq!(spec.n, 4);
    }

    #[test]
    fn perturbed_cone_via_axis_ratio() {
        let sf = parse_spec_file(
            r#"{"kind": "surface", "surface": "clifford-torus", "r": 0.7071067811865476,
                "construction": "cone", "n": 4, "axis_ratio": 1.2}"#,
        )
        .unwrap();
        assert!(sf.build().is_ok());
        let bad = parse_spec_file(
            r#"{"kind": "surface", "surface": "hyperbolic-cylinder", "r": 1.0,
                "construction": "rotational", "n": 4, "axis_ratio": 1.2}"#,
        )
        .unwrap();
        assert!(matches!(bad.build(), Err(Error::InvalidSpecFile(_))));
    }

    #[test]
    fn malformed_text_is_rejected() {
        assert!(matches!(
            parse_spec_file(r#"{"kind": "teleporter"}"#),
            Err(Error::InvalidSpecFile(_))
        ));
        assert!(matches!(
            parse_spec_file("not json"),
            Err(Error::InvalidSpecFile(_))
        ));
    }

    #[test]
    fn integrated_curve_cylinder_builds() {
        let sf = parse_spec_file(
            r#"{"kind": "curve-cylinder", "a": 0.3, "b": 1.0, "n": 4,
                "integrated": {"interval": [0.0, 1.0], "step": 0.005}}"#,
        )
        .unwrap();
        let spec = sf.build().unwrap();
        assert_eq!(spec.metadata["construction"], "curve-cylinder-integrated");
    }
}
