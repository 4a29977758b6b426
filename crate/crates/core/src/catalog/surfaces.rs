//! Surfaces in the three ambient space forms, used as generators for the
//! cylinder / cone / rotational constructions.
//!
//! Models: R^3 for c = 0; the unit sphere S^3 in R^4 for c = 1; the upper
//! half-space with metric dz^2 / z_3^2 for c = -1.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::invariants::generalized_cross_taylor;
use crate::linalg::taylor_mat_inv;
use crate::taylor::{ctx_for, Taylor};

pub type SurfEvalFn = dyn Fn(&[Taylor]) -> Vec<Taylor> + Send + Sync;

/// Taylor degree for the surface pipeline. The warped-function conditions
/// take a Hessian of a quantity already containing second derivatives.
pub const SURFACE_DEGREE: usize = 6;

/// A two-dimensional surface chart into a space-form model.
#[derive(Clone)]
pub struct SurfaceSpec {
    pub name: String,
    /// ambient space-form curvature: 0, 1 or -1
    pub c: i32,
    /// number of ambient chart components (3 for c = 0 / c = -1, 4 for c = 1)
    pub ambient: usize,
    pub domain: Vec<(f64, f64)>,
    pub params: BTreeMap<String, f64>,
    pub eval: Arc<SurfEvalFn>,
}

impl SurfaceSpec {
    pub fn eval_taylor(&self, x: &[f64], degree: usize) -> Vec<Taylor> {
        let ctx = ctx_for(2, degree);
        let seeds: Vec<Taylor> = x
            .iter()
            .enumerate()
            .map(|(i, &xi)| ctx.variable(i, xi))
            .collect();
        let out = (self.eval)(&seeds);
        assert_eq!(out.len(), self.ambient);
        out
    }

    pub fn eval_value(&self, x: &[f64]) -> Vec<f64> {
        self.eval_taylor(x, 0).iter().map(|t| t.value()).collect()
    }
}

/// The Clifford-type torus S^1(r) x S^1(sqrt(1-r^2)) in S^3.
pub fn clifford_torus(r: f64) -> Result<SurfaceSpec> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::ParamOutOfRange(format!(
            "clifford torus radius must satisfy 0 < r < 1, got {r}"
        )));
    }
    let s = (1.0 - r * r).sqrt();
    let eval: Arc<SurfEvalFn> = Arc::new(move |seeds| {
        let u = &seeds[0];
        let v = &seeds[1];
        vec![
            u.cos().scale(r),
            u.sin().scale(r),
            v.cos().scale(s),
            v.sin().scale(s),
        ]
    });
    let mut params = BTreeMap::new();
    params.insert("r".to_string(), r);
    Ok(SurfaceSpec {
        name: format!("clifford-torus(r={r})"),
        c: 1,
        ambient: 4,
        domain: vec![(-PI, PI), (-PI, PI)],
        params,
        eval,
    })
}

/// The hyperbolic cylinder S^1(r) x H^1(sqrt(1+r^2)) in H^3, written in the
/// upper half-space model through the standard hyperboloid chart.
pub fn hyperbolic_cylinder(r: f64) -> Result<SurfaceSpec> {
    if !(r > 0.0) {
        return Err(Error::ParamOutOfRange(format!(
            "hyperbolic cylinder radius must be positive, got {r}"
        )));
    }
    let w = (1.0 + r * r).sqrt();
    let eval: Arc<SurfEvalFn> = Arc::new(move |seeds| {
        let u = &seeds[0];
        let v = &seeds[1];
        // hyperboloid point (r cos u, r sin u, w sinh v, w cosh v), mapped to
        // the half-space by z = (x1, x2, 1) / (x4 - x3)
        let denom = (v.cosh() - v.sinh()).scale(w);
        let inv = denom.recip();
        vec![
            u.cos().scale(r).mul(&inv),
            u.sin().scale(r).mul(&inv),
            inv,
        ]
    });
    let mut params = BTreeMap::new();
    params.insert("r".to_string(), r);
    Ok(SurfaceSpec {
        name: format!("hyperbolic-cylinder(r={r})"),
        c: -1,
        ambient: 3,
        domain: vec![(-PI, PI), (-1.2, 1.2)],
        params,
        eval,
    })
}

/// Pointwise extrinsic and intrinsic surface data in the surface's own model
/// metric, plus the residuals of the warped-function conditions used by the
/// two-curvature lemmas.
#[derive(Clone, Debug)]
pub struct SurfaceGeometry {
    pub c: i32,
    /// mean curvature in the model
    pub h_mean: f64,
    /// intrinsic Gauss curvature
    pub k_gauss: f64,
    /// principal curvatures, ascending
    pub principal: [f64; 2],
    /// mu = sqrt(4 H^2 - (2n/(n-1)) (K - c)) for the requested n
    pub mu: f64,
    /// residual of ||grad mu^{-1}||^2 + K mu^{-2} = 0
    pub cond_i: f64,
    /// max-norm residual of Hess mu^{-1} + K mu^{-1} ds^2 = 0
    pub cond_ii: f64,
    /// model containment residual: | |g| - 1 | for c = 1, -min(z3, 0) for c = -1
    pub model_residual: f64,
    /// unit normal in the flat chart coordinates (Euclidean-normalized)
    pub normal: DVector<f64>,
}

/// Full surface pipeline at one chart point; `n` is the dimension of the
/// hypersurface the surface will generate (it enters mu).
pub fn surface_geometry(spec: &SurfaceSpec, x: &[f64], n: usize) -> Result<SurfaceGeometry> {
    let f = spec.eval_taylor(x, SURFACE_DEGREE);
    let ctx = f[0].ctx().clone();
    let amb = spec.ambient;
    let df: Vec<Vec<Taylor>> = (0..2)
        .map(|i| (0..amb).map(|a| f[a].deriv(i)).collect())
        .collect();
    let d2f: Vec<Vec<Vec<Taylor>>> = (0..2)
        .map(|i| {
            (0..2)
                .map(|j| (0..amb).map(|a| df[i][a].deriv(j)).collect())
                .collect()
        })
        .collect();

    // Euclidean induced metric of the chart.
    let dot = |a: &[Taylor], b: &[Taylor]| {
        let mut acc = ctx.constant(0.0);
        for (p, q) in a.iter().zip(b.iter()) {
            acc = &acc + &p.mul(q);
        }
        acc
    };
    let eucl: Vec<Vec<Taylor>> = (0..2)
        .map(|i| (0..2).map(|j| dot(&df[i], &df[j])).collect())
        .collect();

    let mut model_residual = 0.0f64;
    // Intrinsic model metric and scalar second fundamental form.
    let (ds2, h): (Vec<Vec<Taylor>>, Vec<Vec<Taylor>>);
    let normal_flat: Vec<Taylor>;
    match spec.c {
        0 => {
            let cross = generalized_cross_taylor(&df);
            let inv_norm = dot(&cross, &cross).sqrt().recip();
            normal_flat = cross.iter().map(|t| t.mul(&inv_norm)).collect();
            h = (0..2)
                .map(|i| (0..2).map(|j| dot(&d2f[i][j], &normal_flat)).collect())
                .collect();
            ds2 = eucl;
        }
        1 => {
            let norm2 = dot(&f, &f).value();
            model_residual = (norm2.sqrt() - 1.0).abs();
            // normal in T S^3: orthogonal to position and both tangents
            let rows = vec![f.clone(), df[0].clone(), df[1].clone()];
            let cross = generalized_cross_taylor(&rows);
            let inv_norm = dot(&cross, &cross).sqrt().recip();
            normal_flat = cross.iter().map(|t| t.mul(&inv_norm)).collect();
            // projection-free: the normal is Euclidean-orthogonal to f
            h = (0..2)
                .map(|i| (0..2).map(|j| dot(&d2f[i][j], &normal_flat)).collect())
                .collect();
            ds2 = eucl;
        }
        -1 => {
            let z3 = &f[2];
            let z3v = z3.value();
            if z3v <= 0.0 {
                return Err(Error::PointOutsideDomain(x.to_vec()));
            }
            model_residual = 0.0f64.max(-z3v);
            let cross = generalized_cross_taylor(&df);
            let inv_norm = dot(&cross, &cross).sqrt().recip();
            normal_flat = cross.iter().map(|t| t.mul(&inv_norm)).collect();
            let z3_inv = z3.recip();
            let z3_inv2 = z3_inv.mul(&z3_inv);
            ds2 = (0..2)
                .map(|i| (0..2).map(|j| eucl[i][j].mul(&z3_inv2)).collect())
                .collect();
            // hyperbolic second fundamental form: correct the flat second
            // derivative by the ambient Christoffel symbols of dz^2/z3^2,
            // pair with the hyperbolic unit normal z3 * normal_flat
            h = (0..2)
                .map(|i| {
                    (0..2)
                        .map(|j| {
                            let vz = &df[i][2];
                            let wz = &df[j][2];
                            let vw = dot(&df[i], &df[j]);
                            let corrected: Vec<Taylor> = (0..3)
                                .map(|k| {
                                    let mut t = d2f[i][j][k].clone();
                                    let mut gamma =
                                        &vz.mul(&df[j][k]) + &wz.mul(&df[i][k]);
                                    if k == 2 {
                                        gamma = &gamma - &vw;
                                    }
                                    t = &t - &gamma.mul(&z3_inv);
                                    t
                                })
                                .collect();
                            dot(&corrected, &normal_flat).mul(&z3_inv)
                        })
                        .collect()
                })
                .collect();
        }
        other => {
            return Err(Error::ParamOutOfRange(format!(
                "unsupported space-form curvature {other}"
            )))
        }
    }

    let ds2_inv = taylor_mat_inv(&ds2);
    // shape operator, mean and Gauss curvature
    let mut shape = vec![vec![ctx.constant(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = ctx.constant(0.0);
            for k in 0..2 {
                acc = &acc + &ds2_inv[i][k].mul(&h[k][j]);
            }
            shape[i][j] = acc;
        }
    }
    let h_mean = (&shape[0][0] + &shape[1][1]).scale(0.5);
    let det_a = &shape[0][0].mul(&shape[1][1]) - &shape[0][1].mul(&shape[1][0]);
    let k_gauss = &det_a + spec.c as f64;

    let nf = n as f64;
    let mu2 = &h_mean.mul(&h_mean).scale(4.0)
        - &(&k_gauss - spec.c as f64).scale(2.0 * nf / (nf - 1.0));
    if mu2.value() <= 0.0 {
        return Err(Error::NonRealMu(mu2.value()));
    }
    let mu = mu2.sqrt();
    let w = mu.recip();

    // Christoffel symbols of ds^2 and the two warped-function conditions.
    let dds2: Vec<Vec<Vec<Taylor>>> = (0..2)
        .map(|k| {
            (0..2)
                .map(|i| (0..2).map(|j| ds2[i][j].deriv(k)).collect())
                .collect()
        })
        .collect();
    let mut gamma = vec![vec![vec![ctx.constant(0.0); 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ctx.constant(0.0);
                for l in 0..2 {
                    let term = &(&dds2[i][j][l] + &dds2[j][i][l]) - &dds2[l][i][j];
                    acc = &acc + &ds2_inv[k][l].mul(&term);
                }
                gamma[k][i][j] = acc.scale(0.5);
            }
        }
    }
    let dw: Vec<Taylor> = (0..2).map(|i| w.deriv(i)).collect();
    let mut grad_norm2 = ctx.constant(0.0);
    for i in 0..2 {
        for j in 0..2 {
            grad_norm2 = &grad_norm2 + &ds2_inv[i][j].mul(&dw[i]).mul(&dw[j]);
        }
    }
    let cond_i = (&grad_norm2 + &k_gauss.mul(&w).mul(&w)).value().abs();
    let mut cond_ii = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut hess = dw[i].deriv(j);
            for k in 0..2 {
                hess = &hess - &gamma[k][i][j].mul(&dw[k]);
            }
            let res = &hess + &k_gauss.mul(&w).mul(&ds2[i][j]);
            cond_ii = cond_ii.max(res.value().abs());
        }
    }

    // numeric principal curvatures from the 2x2 generalized problem
    let ds2_num = DMatrix::from_fn(2, 2, |i, j| ds2[i][j].value());
    let h_num = DMatrix::from_fn(2, 2, |i, j| h[i][j].value());
    let chol = nalgebra::Cholesky::new(ds2_num)
        .ok_or_else(|| Error::RankDeficient(x.to_vec()))?;
    let l = chol.l();
    let linv = l.clone().try_inverse().unwrap();
    let sym = &linv * h_num * linv.transpose();
    let (vals, _) = crate::linalg::sym_eigen_sorted(&sym);
    let normal = DVector::from_fn(amb, |a, _| normal_flat[a].value());

    Ok(SurfaceGeometry {
        c: spec.c,
        h_mean: h_mean.value(),
        k_gauss: k_gauss.value(),
        principal: [vals[0], vals[1]],
        mu: mu.value(),
        cond_i,
        cond_ii,
        model_residual,
        normal,
    })
}
