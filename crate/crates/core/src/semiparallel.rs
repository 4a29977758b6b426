//! Semi-parallelity of the Moebius second fundamental form, decided by two
//! independent routes: the tensorial action of the Moebius curvature on B,
//! and the spectral identity on cluster pairs. Also the two derived lemma
//! checks (directional constancy on thick clusters, and the warped-function
//! conditions on generating surfaces).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::catalog::surfaces::{surface_geometry, SurfaceGeometry, SurfaceSpec};
use crate::error::{Error, Result};
use crate::invariants::{analyze_point, MoebiusData};
use crate::jet::ImmersionSpec;

/// Default clustering tolerance (relative to the spectral radius).
pub const TOL_CLUSTER: f64 = 1e-6;
/// Default verdict tolerance.
pub const TOL_VERDICT: f64 = 1e-6;

/// One cluster of near-equal Moebius principal curvatures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cluster {
    /// mean Moebius principal curvature of the cluster
    pub lambda: f64,
    pub multiplicity: usize,
    /// max - min within the cluster
    pub width: f64,
    /// mean Blaschke eigenvalue over the cluster
    pub theta: f64,
    /// lambda^2 + 2 theta, the derived cluster invariant
    pub invariant: f64,
    /// indices into the ascending eigenvalue list
    pub members: Vec<usize>,
}

/// Clustered spectrum with separation diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub clusters: Vec<Cluster>,
    /// minimum gap between adjacent cluster means
    pub separation: f64,
    /// set when some cluster width is not small against the separation
    pub indeterminate: bool,
}

/// Greedy gap clustering of the ascending spectrum; `theta` values are paired
/// by index and averaged per cluster.
pub fn cluster_spectrum(
    lambda_bar: &[f64],
    theta: &[f64],
    tol_cluster: f64,
) -> Result<SpectrumReport> {
    assert_eq!(lambda_bar.len(), theta.len());
    let n = lambda_bar.len();
    let radius = lambda_bar.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap_tol = tol_cluster * radius.max(1.0);
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..n {
        if lambda_bar[i] - lambda_bar[i - 1] > gap_tol {
            groups.push(vec![i]);
        } else {
            groups.last_mut().unwrap().push(i);
        }
    }
    if groups.len() < 2 {
        return Err(Error::DegenerateSpectrum);
    }
    let clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|members| {
            let m = members.len() as f64;
            let lambda = members.iter().map(|&i| lambda_bar[i]).sum::<f64>() / m;
            let th = members.iter().map(|&i| theta[i]).sum::<f64>() / m;
            let width = lambda_bar[*members.last().unwrap()] - lambda_bar[members[0]];
            Cluster {
                lambda,
                multiplicity: members.len(),
                width,
                theta: th,
                invariant: lambda * lambda + 2.0 * th,
                members,
            }
        })
        .collect();
    let separation = clusters
        .windows(2)
        .map(|w| w[1].lambda - w[0].lambda)
        .fold(f64::INFINITY, f64::min);
    let max_width = clusters.iter().fold(0.0f64, |m, c| m.max(c.width));
    let indeterminate = max_width >= 0.1 * separation;
    Ok(SpectrumReport {
        clusters,
        separation,
        indeterminate,
    })
}

impl SpectrumReport {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    /// Matches this report's clusters to `other`'s by nearest lambda;
    /// `None` when counts or multiplicities disagree.
    pub fn match_to(&self, other: &SpectrumReport) -> Option<Vec<usize>> {
        if self.clusters.len() != other.clusters.len() {
            return None;
        }
        // both are ascending in lambda, so matching is positional; verify
        // multiplicities line up
        for (a, b) in self.clusters.iter().zip(other.clusters.iter()) {
            if a.multiplicity != b.multiplicity {
                return None;
            }
        }
        Some((0..self.clusters.len()).collect())
    }
}

/// Max norm of (R*(X_p, X_q) B - B R*(X_p, X_q)) X_k over the g*-orthonormal
/// eigenframe: the tensorial semi-parallelity residual.
pub fn semiparallel_direct(md: &MoebiusData) -> f64 {
    let n = md.n;
    let b_frame = md.to_frame(&md.b);
    let mut worst = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            let u = md.frame.column(p).into();
            let v = md.frame.column(q).into();
            let rop = md.curvature_operator(&u, &v);
            let r_frame = md.frame.transpose() * &md.gstar * rop * &md.frame;
            let comm: DMatrix<f64> = &r_frame * &b_frame - &b_frame * &r_frame;
            for k in 0..n {
                worst = worst.max(comm.column(k).norm());
            }
        }
    }
    worst
}

/// Max over distinct cluster pairs of |lambda_i lambda_j + theta_i + theta_j|:
/// the spectral semi-parallelity residual.
pub fn semiparallel_spectral(report: &SpectrumReport) -> Result<f64> {
    if report.indeterminate {
        return Err(Error::IndeterminateSpectrum(format!(
            "cluster widths too large against separation {}",
            report.separation
        )));
    }
    let mut worst = 0.0f64;
    for (i, a) in report.clusters.iter().enumerate() {
        for b in report.clusters.iter().skip(i + 1) {
            worst = worst.max((a.lambda * b.lambda + a.theta + b.theta).abs());
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    SemiParallel,
    NotSemiParallel,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemiparallelVerdict {
    pub direct: f64,
    pub spectral: f64,
    pub verdict: Verdict,
    pub tol: f64,
    pub note: Option<String>,
}

/// Combines both residual routes with a 10x hysteresis band.
pub fn verdict(direct: f64, spectral: f64, tol: f64) -> SemiparallelVerdict {
    let (v, note) = if direct < tol && spectral < tol {
        (Verdict::SemiParallel, None)
    } else if direct > 10.0 * tol && spectral > 10.0 * tol {
        (Verdict::NotSemiParallel, None)
    } else {
        (
            Verdict::Indeterminate,
            Some(format!(
                "routes disagree or sit inside the hysteresis band: direct {direct:.3e}, spectral {spectral:.3e}"
            )),
        )
    };
    SemiparallelVerdict {
        direct,
        spectral,
        verdict: v,
        tol,
        note,
    }
}

/// Directional-derivative residuals of lambda^2 + 2 theta along each thick
/// cluster's own eigendirections (central differences in the chart).
/// Returns `(cluster index, max |derivative|)` for clusters of multiplicity
/// at least 2.
pub fn check_warped_lemma(
    spec: &ImmersionSpec,
    x: &[f64],
    report: &SpectrumReport,
    md: &MoebiusData,
    tol_cluster: f64,
) -> Result<Vec<(usize, f64)>> {
    let step = 1e-4
        * spec
            .domain
            .iter()
            .map(|(lo, hi)| hi - lo)
            .fold(f64::INFINITY, f64::min);
    let mut out = Vec::new();
    for (ci, cluster) in report.clusters.iter().enumerate() {
        if cluster.multiplicity < 2 {
            continue;
        }
        let mut worst = 0.0f64;
        for &member in &cluster.members {
            let dir = md.frame.column(member);
            let shift = |sign: f64| -> Result<f64> {
                let xs: Vec<f64> = x
                    .iter()
                    .zip(dir.iter())
                    .map(|(xi, di)| xi + sign * step * di)
                    .collect();
                let pd = analyze_point(spec, &xs)?;
                let rep = cluster_spectrum(&pd.moebius.lambda_bar, &pd.moebius.theta, tol_cluster)?;
                // nearest-lambda matching to the base cluster
                let nearest = rep
                    .clusters
                    .iter()
                    .min_by(|a, b| {
                        (a.lambda - cluster.lambda)
                            .abs()
                            .partial_cmp(&(b.lambda - cluster.lambda).abs())
                            .unwrap()
                    })
                    .unwrap();
                Ok(nearest.invariant)
            };
            let plus = shift(1.0)?;
            let minus = shift(-1.0)?;
            worst = worst.max(((plus - minus) / (2.0 * step)).abs());
        }
        out.push((ci, worst));
    }
    Ok(out)
}

/// Warped-function conditions on a generating surface: residuals of
/// (i) ||grad mu^{-1}||^2 + K mu^{-2} = 0 and
/// (ii) Hess mu^{-1} + K mu^{-1} ds^2 = 0,
/// where mu^2 = 4 H^2 - (2n/(n-1))(K - c).
pub fn check_cond_m(surface: &SurfaceSpec, n: usize, x: &[f64]) -> Result<SurfaceGeometry> {
    surface_geometry(surface, x, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::f64::consts::FRAC_1_SQRT_2;
    use std::sync::Arc;

    #[test]
    fn clusters_of_the_round_cylinder_spectrum() {
        let lb = [-0.25, -0.25, -0.25, 0.75];
        let th = [0.1, 0.1, 0.1, 0.4];
        let rep = cluster_spectrum(&lb, &th, 1e-6).unwrap();
        assert_eq!(rep.multiplicities(), vec![3, 1]);
        assert!((rep.clusters[0].lambda + 0.25).abs() < 1e-15);
        assert!((rep.clusters[1].lambda - 0.75).abs() < 1e-15);
        assert!(!rep.indeterminate);
    }

    #[test]
    fn single_cluster_is_degenerate() {
        let lb = [0.3, 0.3, 0.3, 0.3];
        let th = [0.0; 4];
        assert!(matches!(
            cluster_spectrum(&lb, &th, 1e-6),
            Err(Error::DegenerateSpectrum)
        ));
    }

    #[test]
    fn verdict_hysteresis() {
        assert_eq!(verdict(1e-9, 1e-9, 1e-6).verdict, Verdict::SemiParallel);
        assert_eq!(verdict(1e-2, 1e-2, 1e-6).verdict, Verdict::NotSemiParallel);
        let v = verdict(1e-9, 1e-2, 1e-6);
        assert_eq!(v.verdict, Verdict::Indeterminate);
        assert!(v.note.is_some());
    }

    #[test]
    fn clifford_cone_is_semiparallel_by_both_routes() {
        let spec = catalog::lookup("cone-clifford").unwrap();
        let pd = analyze_point(&spec, &[0.3, -0.8, 1.1, 0.2]).unwrap();
        let rep = cluster_spectrum(&pd.moebius.lambda_bar, &pd.moebius.theta, TOL_CLUSTER).unwrap();
        assert_eq!(rep.clusters.len(), 3);
        let mut mults = rep.multiplicities();
        mults.sort_unstable();
        assert_eq!(mults, vec![1, 1, 2]);
        let direct = semiparallel_direct(&pd.moebius);
        let spectral = semiparallel_spectral(&rep).unwrap();
        assert!(direct < 1e-7, "direct {direct}");
        assert!(spectral < 1e-7, "spectral {spectral}");
        // spectrum values from the closed form: +-sqrt(3/8) and a double zero
        let expect = (3.0f64 / 8.0).sqrt();
        assert!((rep.clusters[0].lambda + expect).abs() < 1e-9);
        assert!((rep.clusters[2].lambda - expect).abs() < 1e-9);
        assert!(rep.clusters[1].lambda.abs() < 1e-9);
    }

    #[test]
    fn perturbed_cone_fails_both_routes() {
        let spec = catalog::lookup("cone-clifford-perturbed").unwrap();
        let pd = analyze_point(&spec, &[0.3, -0.8, 1.1, 0.2]).unwrap();
        let rep = cluster_spectrum(&pd.moebius.lambda_bar, &pd.moebius.theta, TOL_CLUSTER).unwrap();
        let direct = semiparallel_direct(&pd.moebius);
        let spectral = semiparallel_spectral(&rep).unwrap();
        assert!(direct > 1e-3, "direct {direct}");
        assert!(spectral > 1e-3, "spectral {spectral}");
        assert_eq!(verdict(direct, spectral, TOL_VERDICT).verdict, Verdict::NotSemiParallel);
    }

    #[test]
    fn warped_lemma_on_the_thick_cluster() {
        let spec = catalog::lookup("cone-clifford").unwrap();
        let x = [0.3, -0.8, 1.1, 0.2];
        let pd = analyze_point(&spec, &x).unwrap();
        let rep = cluster_spectrum(&pd.moebius.lambda_bar, &pd.moebius.theta, TOL_CLUSTER).unwrap();
        let residuals = check_warped_lemma(&spec, &x, &rep, &pd.moebius, TOL_CLUSTER).unwrap();
        assert_eq!(residuals.len(), 1);
        assert!(residuals[0].1 < 1e-5, "warped residual {}", residuals[0].1);
    }

    #[test]
    fn cond_m_holds_on_both_generating_surfaces() {
        let torus = catalog::clifford_torus(FRAC_1_SQRT_2).unwrap();
        let geo = check_cond_m(&torus, 4, &[0.4, -0.9]).unwrap();
        assert!((geo.mu - (8.0f64 / 3.0).sqrt()).abs() < 1e-10);
        assert!(geo.cond_i < 1e-8, "cond_i {}", geo.cond_i);
        assert!(geo.cond_ii < 1e-8, "cond_ii {}", geo.cond_ii);

        let hyp = catalog::hyperbolic_cylinder(1.0).unwrap();
        let geo = check_cond_m(&hyp, 4, &[0.4, 0.3]).unwrap();
        assert!(geo.cond_i < 1e-8, "cond_i {}", geo.cond_i);
        assert!(geo.cond_ii < 1e-8, "cond_ii {}", geo.cond_ii);
    }

    #[test]
    fn totally_geodesic_sphere_has_no_real_mu() {
        // equatorial S^2 in S^3: H = 0, K = 1, so mu^2 = 0
        let eval: Arc<crate::catalog::surfaces::SurfEvalFn> = Arc::new(|seeds| {
            let u = &seeds[0];
            let v = &seeds[1];
            let ctx = u.ctx().clone();
            vec![
                u.cos().mul(&v.cos()),
                u.cos().mul(&v.sin()),
                u.sin(),
                ctx.constant(0.0),
            ]
        });
        let sphere = crate::catalog::SurfaceSpec {
            name: "equator".into(),
            c: 1,
            ambient: 4,
            domain: vec![(-0.5, 0.5), (-0.5, 0.5)],
            params: Default::default(),
            eval,
        };
        assert!(matches!(
            check_cond_m(&sphere, 4, &[0.1, 0.2]),
            Err(Error::NonRealMu(_))
        ));
    }
}
