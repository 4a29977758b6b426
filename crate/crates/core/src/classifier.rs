//! Branch classification of a sampled hypersurface.
//!
//! The classifier samples interior chart points, runs the full invariant
//! pipeline at each, checks that the cluster structure of the Moebius
//! principal curvatures is stable across the sample, decides semi-parallelity
//! by both routes, and then places the hypersurface on a branch of the known
//! classification using sign discriminants of the Moebius sectional curvature
//! within thick eigenvalue clusters and the size of the Moebius form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{analyze_point, PointData};
use crate::jet::ImmersionSpec;
use crate::sampling::sample_points;
use crate::semiparallel::{
    cluster_spectrum, semiparallel_direct, semiparallel_spectral, verdict, SemiparallelVerdict,
    SpectrumReport, Verdict, TOL_CLUSTER, TOL_VERDICT,
};

/// Minimum admissible sample size.
pub const MIN_SAMPLES: usize = 8;
/// Sign threshold for within-cluster sectional curvature discriminants.
const K_SIGN_TOL: f64 = 1e-4;
/// Threshold on the Moebius form norm separating curve-type branches.
const OMEGA_TOL: f64 = 1e-4;

/// Sampling and tolerance configuration for a classification run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleConfig {
    pub point_count: usize,
    pub seed: u64,
    pub tol_cluster: f64,
    pub tol_verdict: f64,
    /// admissible spread of cluster constants across the sample
    pub tol_constancy: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            point_count: 16,
            seed: 0,
            tol_cluster: TOL_CLUSTER,
            tol_verdict: TOL_VERDICT,
            tol_constancy: 1e-6,
        }
    }
}

/// Per-cluster statistics aggregated over the sample.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterSummary {
    pub multiplicity: usize,
    pub lambda_mean: f64,
    pub lambda_spread: f64,
    pub theta_mean: f64,
    /// lambda^2 + 2 theta, the cluster constant of the warped decomposition
    pub invariant_mean: f64,
    pub invariant_spread: f64,
    /// mean Moebius sectional curvature over planes inside the cluster's
    /// eigendistribution; absent for singleton clusters
    pub within_sectional: Option<f64>,
}

/// Full result of a classification run. Field order is the JSON field order.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub entry: String,
    pub n: usize,
    pub point_count: usize,
    pub seed: u64,
    pub multiplicities: Vec<usize>,
    pub clusters: Vec<ClusterSummary>,
    pub s_star_mean: f64,
    pub s_star_spread: f64,
    pub omega_norm_mean: f64,
    pub max_structure_residual: f64,
    pub semiparallel: SemiparallelVerdict,
    pub branch: String,
    pub notes: Vec<String>,
}

fn mean_spread(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (mean, hi - lo)
}

/// Samples the spec, verifies cluster stability, decides semi-parallelity and
/// assigns a classification branch.
pub fn classify(spec: &ImmersionSpec, cfg: &SampleConfig) -> Result<ClassificationReport> {
    if cfg.point_count < MIN_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "need at least {MIN_SAMPLES} sample points, got {}",
            cfg.point_count
        )));
    }
    let points = sample_points(spec, cfg.point_count, cfg.seed);
    let analyzed: Vec<(PointData, SpectrumReport)> = points
        .par_iter()
        .map(|x| {
            let pd = analyze_point(spec, x)?;
            let rep = cluster_spectrum(&pd.moebius.lambda_bar, &pd.moebius.theta, cfg.tol_cluster)?;
            Ok((pd, rep))
        })
        .collect::<Result<Vec<_>>>()?;

    // cluster structure must be stable over the whole sample
    let base = &analyzed[0].1;
    for (_, rep) in &analyzed[1..] {
        if base.match_to(rep).is_none() {
            return Err(Error::IndeterminateSpectrum(
                "cluster structure varies across sample points".into(),
            ));
        }
    }
    let k = base.clusters.len();
    let multiplicities = base.multiplicities();

    // semi-parallelity: worst residual of each route over the sample
    let mut direct = 0.0f64;
    let mut spectral = 0.0f64;
    for (pd, rep) in &analyzed {
        direct = direct.max(semiparallel_direct(&pd.moebius));
        spectral = spectral.max(semiparallel_spectral(rep)?);
    }
    let sp = verdict(direct, spectral, cfg.tol_verdict);

    // aggregate per-cluster constants and discriminants
    let mut clusters = Vec::with_capacity(k);
    for ci in 0..k {
        let lambdas: Vec<f64> = analyzed.iter().map(|(_, r)| r.clusters[ci].lambda).collect();
        let thetas: Vec<f64> = analyzed.iter().map(|(_, r)| r.clusters[ci].theta).collect();
        let invariants: Vec<f64> = analyzed
            .iter()
            .map(|(_, r)| r.clusters[ci].invariant)
            .collect();
        let (lambda_mean, lambda_spread) = mean_spread(&lambdas);
        let (theta_mean, _) = mean_spread(&thetas);
        let (invariant_mean, invariant_spread) = mean_spread(&invariants);
        let within_sectional = if multiplicities[ci] >= 2 {
            let total: f64 = analyzed
                .iter()
                .map(|(pd, r)| {
                    let m = &r.clusters[ci].members;
                    pd.moebius.mean_sectional(m, m)
                })
                .sum();
            Some(total / analyzed.len() as f64)
        } else {
            None
        };
        clusters.push(ClusterSummary {
            multiplicity: multiplicities[ci],
            lambda_mean,
            lambda_spread,
            theta_mean,
            invariant_mean,
            invariant_spread,
            within_sectional,
        });
    }
    let s_stars: Vec<f64> = analyzed.iter().map(|(pd, _)| pd.moebius.s_star).collect();
    let (s_star_mean, s_star_spread) = mean_spread(&s_stars);
    let omega_norm_mean = analyzed
        .iter()
        .map(|(pd, _)| pd.moebius.omega_norm)
        .sum::<f64>()
        / analyzed.len() as f64;
    let max_structure_residual = analyzed
        .iter()
        .map(|(pd, _)| pd.residuals.max())
        .fold(0.0f64, f64::max);

    let mut notes = Vec::new();
    let branch = decide_branch(spec.n, &sp, &clusters, omega_norm_mean, cfg, &mut notes);

    Ok(ClassificationReport {
        entry: spec.name.clone(),
        n: spec.n,
        point_count: cfg.point_count,
        seed: cfg.seed,
        multiplicities,
        clusters,
        s_star_mean,
        s_star_spread,
        omega_norm_mean,
        max_structure_residual,
        semiparallel: sp,
        branch,
        notes,
    })
}

fn decide_branch(
    n: usize,
    sp: &SemiparallelVerdict,
    clusters: &[ClusterSummary],
    omega_norm_mean: f64,
    cfg: &SampleConfig,
    notes: &mut Vec<String>,
) -> String {
    match sp.verdict {
        Verdict::NotSemiParallel => return "NotSemiParallel".into(),
        Verdict::Indeterminate => {
            notes.push("semi-parallelity verdict is indeterminate".into());
            return "Indeterminate".into();
        }
        Verdict::SemiParallel => {}
    }
    // Moebius principal curvatures are constant on every branch of the
    // classification; only theta-dependent quantities may vary (curve-type).
    let max_lambda_spread = clusters
        .iter()
        .map(|c| c.lambda_spread)
        .fold(0.0f64, f64::max);
    if max_lambda_spread > cfg.tol_constancy {
        notes.push(format!(
            "Moebius principal curvatures drift across the sample: spread {max_lambda_spread:.3e}"
        ));
        return "Indeterminate".into();
    }
    match clusters.len() {
        2 => {
            if omega_norm_mean > OMEGA_TOL {
                // closed Moebius form but nonzero: cylinder/cone/rotational
                // hypersurface over a curve of prescribed curvature
                return "TwoCurv-CurveType".into();
            }
            // thick-cluster sectional curvature signs separate the three
            // parallel families: spherical cylinder (one flat distribution),
            // cone over a sphere (a hyperbolic factor), product of spheres
            let within: Vec<f64> = clusters
                .iter()
                .filter_map(|c| c.within_sectional)
                .collect();
            if within.is_empty() {
                notes.push("no thick cluster to probe sectional signs".into());
                return "Indeterminate".into();
            }
            if within.iter().any(|&v| v < -K_SIGN_TOL) {
                "TwoCurv-ii".into()
            } else if within.iter().any(|&v| v.abs() <= K_SIGN_TOL) {
                "TwoCurv-i".into()
            } else {
                "TwoCurv-iii".into()
            }
        }
        3 => {
            let max_inv_spread = clusters
                .iter()
                .map(|c| c.invariant_spread)
                .fold(0.0f64, f64::max);
            if max_inv_spread > cfg.tol_constancy {
                notes.push(format!(
                    "cluster constants drift across the sample: spread {max_inv_spread:.3e}"
                ));
                return "Indeterminate".into();
            }
            let mut mults: Vec<usize> = clusters.iter().map(|c| c.multiplicity).collect();
            mults.sort_unstable();
            if mults == [1, 1, n - 2] {
                let thick = clusters
                    .iter()
                    .find(|c| c.multiplicity == n - 2)
                    .and_then(|c| c.within_sectional);
                match thick {
                    Some(v) if v < -K_SIGN_TOL => "ThreeCurv-ConeClifford".into(),
                    Some(v) if v > K_SIGN_TOL => "ThreeCurv-RotHypCylinder".into(),
                    _ => {
                        notes.push("thick-cluster sectional curvature has no clear sign".into());
                        "Indeterminate".into()
                    }
                }
            } else if mults[0] >= 2 {
                // all clusters thick: parallel Moebius second fundamental form
                "ThreeCurv-MoebiusParallel".into()
            } else {
                notes.push(format!("unrecognized multiplicity pattern {mults:?}"));
                "Indeterminate".into()
            }
        }
        k => {
            notes.push(format!("unrecognized cluster count {k}"));
            "Indeterminate".into()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn cfg() -> SampleConfig {
        SampleConfig {
            point_count: 8,
            seed: 42,
            ..Default::default()
        }
    }

    fn run(entry: &str) -> ClassificationReport {
        let spec = catalog::lookup(entry).unwrap();
        classify(&spec, &cfg()).unwrap()
    }

    #[test]
    fn three_curvature_branches() {
        let r = run("cone-clifford");
        assert_eq!(r.branch, "ThreeCurv-ConeClifford");
        assert_eq!(r.semiparallel.verdict, Verdict::SemiParallel);
        let mut m = r.multiplicities.clone();
        m.sort_unstable();
        assert_eq!(m, vec![1, 1, 2]);

        let r = run("rot-hypcyl");
        assert_eq!(r.branch, "ThreeCurv-RotHypCylinder");
        assert_eq!(r.semiparallel.verdict, Verdict::SemiParallel);
    }

    #[test]
    fn two_curvature_branches() {
        assert_eq!(run("cyl-sphere").branch, "TwoCurv-i");
        assert_eq!(run("cone-sphere").branch, "TwoCurv-ii");
        assert_eq!(run("torus").branch, "TwoCurv-iii");
        assert_eq!(run("cyl-spiral").branch, "TwoCurv-CurveType");
    }

    #[test]
    fn negative_controls() {
        let r = run("cone-clifford-perturbed");
        assert_eq!(r.branch, "NotSemiParallel");
        assert!(r.semiparallel.spectral > 1e-3);
        let r = run("graph");
        assert_eq!(r.branch, "NotSemiParallel");
    }

    #[test]
    fn constancy_spreads_are_tight_on_positives() {
        // principal curvatures are constant on every branch; cluster
        // constants and s* additionally on the non-curve-type branches
        for entry in ["cone-clifford", "rot-hypcyl", "torus", "cyl-spiral"] {
            let r = run(entry);
            for c in &r.clusters {
                assert!(c.lambda_spread < 1e-6, "{entry}: lambda spread {}", c.lambda_spread);
            }
        }
        for entry in ["cone-clifford", "rot-hypcyl", "torus"] {
            let r = run(entry);
            assert!(r.s_star_spread < 1e-6, "{entry}: s* spread {}", r.s_star_spread);
            for c in &r.clusters {
                assert!(
                    c.invariant_spread < 1e-6,
                    "{entry}: invariant spread {}",
                    c.invariant_spread
                );
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let spec = catalog::lookup("torus").unwrap();
        let a = serde_json::to_string(&classify(&spec, &cfg()).unwrap()).unwrap();
        let b = serde_json::to_string(&classify(&spec, &cfg()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let spec = catalog::lookup("torus").unwrap();
        let mut c = cfg();
        c.point_count = 4;
        assert!(matches!(
            classify(&spec, &c),
            Err(Error::InsufficientSamples(_))
        ));
    }
}
