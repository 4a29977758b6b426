//! Hypersurface constructions: cylinders, cones and rotational hypersurfaces
//! over space-form surfaces, and the standard two-curvature products.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use crate::catalog::surfaces::SurfaceSpec;
use crate::error::{Error, Result};
use crate::jet::{EvalFn, ImmersionSpec};
use crate::taylor::Taylor;

/// Stereographic-style chart of the unit sphere S^m in R^{m+1}:
/// w in R^m maps to (2w, 1 - |w|^2) / (1 + |w|^2).
pub(crate) fn sphere_chart(w: &[Taylor]) -> Vec<Taylor> {
    let ctx = w[0].ctx().clone();
    let mut norm2 = ctx.constant(0.0);
    for t in w {
        norm2 = &norm2 + &t.mul(t);
    }
    let inv = (&norm2 + 1.0).recip();
    let mut out: Vec<Taylor> = w.iter().map(|t| t.scale(2.0).mul(&inv)).collect();
    out.push((&ctx.constant(1.0) - &norm2).mul(&inv));
    out
}

/// Cylinder over a flat-model surface: f(x, u) = (g(x), u) in R^{n+1}.
pub fn make_cylinder(g: &SurfaceSpec, n: usize) -> Result<ImmersionSpec> {
    if g.c != 0 {
        return Err(Error::SurfaceModelMismatch {
            expected: 0,
            got: g.c as i8,
        });
    }
    if n < 3 {
        return Err(Error::ParamOutOfRange(format!(
            "cylinder needs n >= 3, got {n}"
        )));
    }
    let inner = g.eval.clone();
    let eval: Arc<EvalFn> = Arc::new(move |seeds| {
        let mut out = inner(&seeds[..2]);
        out.extend(seeds[2..].iter().cloned());
        out
    });
    let mut domain = g.domain.clone();
    domain.extend(std::iter::repeat((-1.0, 1.0)).take(n - 2));
    let mut spec = ImmersionSpec::new(format!("cylinder[{}]", g.name), n, domain, eval)
        .with_metadata("construction", "cylinder");
    for (k, v) in &g.params {
        spec = spec.with_metadata(k, v);
    }
    Ok(spec)
}

/// Cone over a spherical surface: f(x, t, y) = (t g(x), y) in R^{n+1}.
pub fn make_cone(g: &SurfaceSpec, n: usize) -> Result<ImmersionSpec> {
    if g.c != 1 {
        return Err(Error::SurfaceModelMismatch {
            expected: 1,
            got: g.c as i8,
        });
    }
    if n < 3 {
        return Err(Error::ParamOutOfRange(format!("cone needs n >= 3, got {n}")));
    }
    let inner = g.eval.clone();
    let eval: Arc<EvalFn> = Arc::new(move |seeds| {
        let t = &seeds[2];
        let mut out: Vec<Taylor> = inner(&seeds[..2]).iter().map(|u| u.mul(t)).collect();
        out.extend(seeds[3..].iter().cloned());
        out
    });
    let mut domain = g.domain.clone();
    domain.push((0.5, 2.0));
    domain.extend(std::iter::repeat((-1.0, 1.0)).take(n - 3));
    let mut spec = ImmersionSpec::new(format!("cone[{}]", g.name), n, domain, eval)
        .with_metadata("construction", "cone");
    for (k, v) in &g.params {
        spec = spec.with_metadata(k, v);
    }
    Ok(spec)
}

/// Rotational hypersurface over a half-space-model surface:
/// f(x, w) = (z1(x), z2(x), z3(x) Y(w)) with Y a chart of S^{n-2}.
pub fn make_rotational(g: &SurfaceSpec, n: usize) -> Result<ImmersionSpec> {
    if g.c != -1 {
        return Err(Error::SurfaceModelMismatch {
            expected: -1,
            got: g.c as i8,
        });
    }
    if n < 4 {
        return Err(Error::ParamOutOfRange(format!(
            "rotational hypersurface needs n >= 4, got {n}"
        )));
    }
    let inner = g.eval.clone();
    let eval: Arc<EvalFn> = Arc::new(move |seeds| {
        let z = inner(&seeds[..2]);
        let y = sphere_chart(&seeds[2..]);
        let mut out = vec![z[0].clone(), z[1].clone()];
        out.extend(y.iter().map(|c| c.mul(&z[2])));
        out
    });
    let mut domain = g.domain.clone();
    domain.extend(std::iter::repeat((-0.8, 0.8)).take(n - 2));
    let mut spec = ImmersionSpec::new(format!("rotational[{}]", g.name), n, domain, eval)
        .with_metadata("construction", "rotational");
    for (k, v) in &g.params {
        spec = spec.with_metadata(k, v);
    }
    Ok(spec)
}

/// The standard cylinder S^k(r) x R^{n-k} in R^{n+1}.
pub fn standard_cylinder(k: usize, n: usize, r: f64) -> Result<ImmersionSpec> {
    if k < 1 || k > n - 1 {
        return Err(Error::ParamOutOfRange(format!(
            "need 1 <= k <= n-1, got k={k}, n={n}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::ParamOutOfRange(format!("radius must be positive, got {r}")));
    }
    let eval: Arc<EvalFn> = Arc::new(move |seeds| {
        let mut out: Vec<Taylor> = sphere_chart(&seeds[..k])
            .iter()
            .map(|c| c.scale(r))
            .collect();
        out.extend(seeds[k..].iter().cloned());
        out
    });
    let mut domain = vec![(-0.8, 0.8); k];
    domain.extend(std::iter::repeat((-1.0, 1.0)).take(n - k));
    Ok(ImmersionSpec::new(
        format!("sphere-cylinder(k={k},n={n},r={r})"),
        n,
        domain,
        eval,
    )
    .with_metadata("construction", "standard-cylinder")
    .with_metadata("k", k)
    .with_metadata("r", r))
}

/// The standard cone over S^k in R^{n+1}: the cone construction applied to a
/// small sphere S^k(r) inside S^{k+1}, with flat directions appended. The
/// image is Moebius equivalent to S^k x H^{n-k}.
pub fn standard_cone(k: usize, n: usize, r: f64) -> Result<ImmersionSpec> {
    if k < 1 || k + 1 > n - 1 {
        return Err(Error::ParamOutOfRange(format!(
            "need 1 <= k <= n-2, got k={k}, n={n}"
        )));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::ParamOutOfRange(format!(
            "small-sphere radius must satisfy 0 < r < 1, got {r}"
        )));
    }
    let s = (1.0 - r * r).sqrt();
    let eval: Arc<EvalFn> = Arc::new(move |seeds| {
        let ctx = seeds[0].ctx().clone();
        // small sphere S^k(r) in S^{k+1} at height sqrt(1-r^2)
        let mut y: Vec<Taylor> = sphere_chart(&seeds[..k])
            .iter()
            .map(|c| c.scale(r))
            .collect();
        y.push(ctx.constant(s));
        let t = &seeds[k];
        let mut out: Vec<Taylor> = y.iter().map(|c| c.mul(t)).collect();
        out.extend(seeds[k + 1..].iter().cloned());
        out
    });
    let mut domain = vec![(-0.8, 0.8); k];
    domain.push((0.5, 2.0));
    domain.extend(std::iter::repeat((-1.0, 1.0)).take(n - k - 1));
    Ok(ImmersionSpec::new(
        format!("sphere-cone(k={k},n={n},r={r})"),
        n,
        domain,
        eval,
    )
    .with_metadata("construction", "standard-cone")
    .with_metadata("k", k)
    .with_metadata("r", r))
}

/// The product S^k(r) x S^{n-k}(sqrt(1-r^2)) in S^{n+1}, pulled to R^{n+1}
/// by stereographic projection from the north pole of S^{n+1}.
pub fn standard_torus(k: usize, n: usize, r: f64) -> Result<ImmersionSpec> {
    if k < 1 || k > n - 1 {
        return Err(Error::ParamOutOfRange(format!(
            "need 1 <= k <= n-1, got k={k}, n={n}"
        )));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::ParamOutOfRange(format!(
            "torus radius must satisfy 0 < r < 1, got {r}"
        )));
    }
    let s = (1.0 - r * r).sqrt();
    let eval: Arc<EvalFn> = Arc::new(move |seeds| {
        let ctx = seeds[0].ctx().clone();
        let a: Vec<Taylor> = sphere_chart(&seeds[..k]).iter().map(|c| c.scale(r)).collect();
        let b: Vec<Taylor> = sphere_chart(&seeds[k..]).iter().map(|c| c.scale(s)).collect();
        // point of S^{n+1} in R^{n+2}; project from the last axis pole
        let pole_coord = b.last().unwrap();
        let inv = (&ctx.constant(1.0) - pole_coord).recip();
        let mut out: Vec<Taylor> = a.iter().map(|c| c.mul(&inv)).collect();
        out.extend(b[..b.len() - 1].iter().map(|c| c.mul(&inv)));
        out
    });
    let domain = vec![(-0.8, 0.8); n];
    Ok(ImmersionSpec::new(
        format!("sphere-torus(k={k},n={n},r={r})"),
        n,
        domain,
        eval,
    )
    .with_metadata("construction", "standard-torus")
    .with_metadata("k", k)
    .with_metadata("r", r))
}

/// Which two-curvature product family to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    /// S^k x R^{n-k}
    Cylinder,
    /// S^k x H^{n-k}, realized as a cone over a small sphere
    Cone,
    /// S^k x S^{n-k} via stereographic projection
    Torus,
}

/// Standard product hypersurfaces of Euclidean space with two distinct
/// principal curvatures.
pub fn standard_products(k: usize, n: usize, kind: ProductKind) -> Result<ImmersionSpec> {
    match kind {
        ProductKind::Cylinder => standard_cylinder(k, n, 1.0),
        ProductKind::Cone => standard_cone(k, n, FRAC_1_SQRT_2),
        ProductKind::Torus => standard_torus(k, n, FRAC_1_SQRT_2),
    }
}

/// Unit-sphere graph patch: umbilic everywhere, used as a guard fixture.
pub fn sphere_patch(n: usize) -> ImmersionSpec {
    ImmersionSpec::new(
        "sphere-patch",
        n,
        vec![(-0.5, 0.5); n],
        Arc::new(|seeds: &[Taylor]| {
            let ctx = seeds[0].ctx().clone();
            let mut r2 = ctx.constant(0.0);
            for s in seeds {
                r2 = &r2 + &(s * s);
            }
            let mut out: Vec<Taylor> = seeds.to_vec();
            out.push((ctx.constant(1.0) - r2).sqrt());
            out
        }),
    )
}

/// Generic graph hypersurface with no special Moebius structure; negative
/// control for the semi-parallel tests.
pub fn generic_graph(n: usize) -> Result<ImmersionSpec> {
    if n < 3 {
        return Err(Error::ParamOutOfRange(format!(
            "graph control needs n >= 3, got {n}"
        )));
    }
    let eval: Arc<EvalFn> = Arc::new(move |seeds: &[Taylor]| {
        let x = &seeds[0];
        let y = &seeds[1];
        let z = &seeds[2];
        let mut height = &x.mul(x).scale(0.8) + &y.mul(y).mul(y).scale(0.3);
        height = &height + &x.mul(y).mul(&z.sin()).scale(0.4);
        height = &height + &z.exp().scale(0.2);
        for (i, s) in seeds.iter().enumerate().skip(3) {
            height = &height + &s.mul(s).mul(x).scale(0.1 * (i as f64));
        }
        let mut out: Vec<Taylor> = seeds.to_vec();
        out.push(height);
        out
    });
    Ok(
        ImmersionSpec::new("generic-graph", n, vec![(-1.0, 1.0); n], eval)
            .with_metadata("construction", "graph"),
    )
}

/// Clifford-torus cone with the generating torus squashed by an axis ratio
/// and renormalized back onto S^3; breaks minimality and flatness, hence
/// semi-parallelity. Negative control.
pub fn perturbed_clifford_cone(r: f64, ratio: f64, n: usize) -> Result<ImmersionSpec> {
    let torus = super::surfaces::clifford_torus(r)?;
    if !(ratio > 0.0) {
        return Err(Error::ParamOutOfRange(format!(
            "axis ratio must be positive, got {ratio}"
        )));
    }
    let inner = torus.eval.clone();
    let squashed = SurfaceSpec {
        name: format!("squashed-clifford(r={r},ratio={ratio})"),
        c: 1,
        ambient: 4,
        domain: torus.domain.clone(),
        params: torus.params.clone(),
        eval: Arc::new(move |seeds: &[Taylor]| {
            let mut g = inner(seeds);
            g[0] = g[0].scale(ratio);
            let mut norm2 = g[0].ctx().constant(0.0);
            for t in &g {
                norm2 = &norm2 + &t.mul(t);
            }
            let inv = norm2.sqrt().recip();
            g.iter().map(|t| t.mul(&inv)).collect()
        }),
    };
    let spec = make_cone(&squashed, n)?;
    Ok(spec.with_metadata("perturbation", format!("axis-ratio={ratio}")))
}
