//! Cross-checks of the invariant pipeline against closed-form expressions of
//! the three composition operators, plus orientation and reparametrization
//! invariance.

use moebiuslab::catalog::{self, clifford_torus, hyperbolic_cylinder, surface_geometry, CurvatureLaw};
use moebiuslab::invariants::{analyze_point, analyze_point_oriented};
use moebiuslab::sampling::sample_points;

const SEED: u64 = 77;

#[test]
fn cylinder_conformal_factor_closed_form() {
    // cylinder over the plane curve with kappa = b e^{a s}: the generating
    // surface (gamma(s), u) has H = kappa/2 and K = 0, so rho^2 = kappa^2
    let (a, b) = (0.3, 1.0);
    let law = CurvatureLaw::Exponential { a, b };
    let spec = catalog::lookup("cyl-spiral?a=0.3&b=1&n=4").unwrap();
    for x in sample_points(&spec, 16, SEED) {
        let pd = analyze_point(&spec, &x).unwrap();
        let kappa = law.kappa(x[0]);
        let dev = (pd.moebius.rho * pd.moebius.rho - kappa * kappa).abs();
        assert!(dev < 1e-8, "rho^2 vs kappa^2 residual {dev:e} at s = {}", x[0]);
    }
}

#[test]
fn cone_conformal_factor_closed_form() {
    // rho^2 = t^{-2} (4 H_g^2 - (2n/(n-1))(K_g - 1)) over a spherical surface
    let r = 0.6;
    let surface = clifford_torus(r).unwrap();
    let spec = catalog::lookup(&format!("cone-clifford?r={r}&n=4")).unwrap();
    for x in sample_points(&spec, 16, SEED) {
        let pd = analyze_point(&spec, &x).unwrap();
        let geo = surface_geometry(&surface, &x[..2], 4).unwrap();
        let t = x[2];
        let expect = (4.0 * geo.h_mean * geo.h_mean - (8.0 / 3.0) * (geo.k_gauss - 1.0)) / (t * t);
        let dev = (pd.moebius.rho * pd.moebius.rho - expect).abs();
        assert!(dev < 1e-8, "cone rho^2 residual {dev:e}");
    }
}

#[test]
fn rotational_conformal_factor_closed_form() {
    // rho^2 = z3^{-2} (4 H_g^2 - (2n/(n-1))(K_g + 1)) over a half-space surface
    let surface = hyperbolic_cylinder(1.0).unwrap();
    let spec = catalog::lookup("rot-hypcyl?r=1&n=4").unwrap();
    for x in sample_points(&spec, 16, SEED) {
        let pd = analyze_point(&spec, &x).unwrap();
        let geo = surface_geometry(&surface, &x[..2], 4).unwrap();
        let z3 = surface.eval_value(&x[..2])[2];
        let expect = (4.0 * geo.h_mean * geo.h_mean - (8.0 / 3.0) * (geo.k_gauss + 1.0)) / (z3 * z3);
        let dev = (pd.moebius.rho * pd.moebius.rho - expect).abs();
        assert!(dev < 1e-8, "rotational rho^2 residual {dev:e}");
    }
}

#[test]
fn rotational_thick_principal_curvature_formula() {
    // the multiplicity-(n-2) Euclidean principal curvature of the rotational
    // hypersurface is -n3/z3, with n3 the vertical component of the Euclidean
    // unit normal of the generating surface in the half-space chart
    let surface = hyperbolic_cylinder(1.0).unwrap();
    let spec = catalog::lookup("rot-hypcyl?r=1&n=4").unwrap();
    for x in sample_points(&spec, 8, SEED) {
        let pd = analyze_point(&spec, &x).unwrap();
        let geo = surface_geometry(&surface, &x[..2], 4).unwrap();
        let z3 = surface.eval_value(&x[..2])[2];
        let expect = (geo.normal[2] / z3).abs();
        // the thick value appears with multiplicity n-2 = 2 in the sorted list
        let hits = pd
            .classical
            .principal
            .iter()
            .filter(|l| (l.abs() - expect).abs() < 1e-7)
            .count();
        assert!(hits >= 2, "principal {:?} vs |n3/z3| = {expect}", pd.classical.principal);
    }
}

#[test]
fn normal_flip_negates_shape_but_preserves_moebius_data() {
    for name in ["cone-clifford", "torus", "graph"] {
        let spec = catalog::lookup(name).unwrap();
        let x = sample_points(&spec, 1, SEED).remove(0);
        let plus = analyze_point_oriented(&spec, &x, false).unwrap();
        let minus = analyze_point_oriented(&spec, &x, true).unwrap();
        assert!((plus.classical.mean + minus.classical.mean).abs() < 1e-12);
        assert!((plus.moebius.rho - minus.moebius.rho).abs() < 1e-12);
        // lambda_bar negates and re-sorts; the multiset of pair values
        // lambda_i lambda_j + theta_i + theta_j is unchanged
        let mut neg: Vec<f64> = minus.moebius.lambda_bar.iter().map(|v| -v).collect();
        neg.sort_by(|p, q| p.partial_cmp(q).unwrap());
        for (p, q) in plus.moebius.lambda_bar.iter().zip(neg.iter()) {
            assert!((p - q).abs() < 1e-10, "{name}: spectrum flip mismatch");
        }
        let dev = (plus.moebius.s_star - minus.moebius.s_star).abs();
        assert!(dev < 1e-10, "{name}: s* changed under flip by {dev:e}");
        assert!(minus.residuals.max() < plus.residuals.max().max(1e-10) * 10.0);
    }
}

#[test]
fn cone_scale_reparametrization_preserves_spectrum() {
    // t -> 2t is an ambient dilation, a Moebius transformation
    let spec = catalog::lookup("cone-clifford").unwrap();
    let x = [0.4, -0.9, 0.7, 0.3];
    let mut x2 = x;
    x2[2] = 2.0 * x[2];
    let a = analyze_point(&spec, &x).unwrap();
    let b = analyze_point(&spec, &x2).unwrap();
    for (p, q) in a.moebius.lambda_bar.iter().zip(b.moebius.lambda_bar.iter()) {
        assert!((p - q).abs() < 1e-10);
    }
}

#[test]
fn inversion_preserves_theta_spectrum() {
    let spec = catalog::lookup("cone-clifford").unwrap();
    let mut center = vec![0.0; spec.n + 1];
    center[0] = 4.0;
    let inverted = spec.compose_inversion(center);
    let x = sample_points(&spec, 1, SEED).remove(0);
    let a = analyze_point(&spec, &x).unwrap();
    let b = analyze_point(&inverted, &x).unwrap();
    let mut ta = a.moebius.theta.clone();
    let mut tb = b.moebius.theta.clone();
    ta.sort_by(|p, q| p.partial_cmp(q).unwrap());
    tb.sort_by(|p, q| p.partial_cmp(q).unwrap());
    for (p, q) in ta.iter().zip(tb.iter()) {
        assert!((p - q).abs() < 1e-6, "theta mismatch {p} vs {q}");
    }
}
