//! Immersion specifications and order-4 jets.
//!
//! The default derivative engine is truncated Taylor arithmetic, which gives
//! machine-precision partials for analytic chart maps. A Richardson-
//! extrapolated central finite-difference evaluator serves as an independent
//! cross-oracle in tests.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::NTensor;
use crate::taylor::{ctx_for, Taylor};

pub type EvalFn = dyn Fn(&[Taylor]) -> Vec<Taylor> + Send + Sync;

/// Relative inset from the domain boundary inside which points are accepted.
pub const BOUNDARY_MARGIN: f64 = 0.05;

/// A parametrized umbilic-free hypersurface chart: a map from an open box in
/// R^n into R^{n+1}, evaluable on truncated Taylor scalars.
#[derive(Clone)]
pub struct ImmersionSpec {
    pub name: String,
    pub n: usize,
    pub domain: Vec<(f64, f64)>,
    pub metadata: BTreeMap<String, String>,
    eval: Arc<EvalFn>,
}

impl ImmersionSpec {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        domain: Vec<(f64, f64)>,
        eval: Arc<EvalFn>,
    ) -> Self {
        assert!(n >= 2, "intrinsic dimension must be at least 2");
        assert_eq!(domain.len(), n, "domain box must have one interval per axis");
        Self {
            name: name.into(),
            n,
            domain,
            metadata: BTreeMap::new(),
            eval,
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    /// Checks that `x` is inside the domain with the standard boundary inset.
    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::PointOutsideDomain(x.to_vec()));
        }
        for (xi, (lo, hi)) in x.iter().zip(self.domain.iter()) {
            let margin = BOUNDARY_MARGIN * (hi - lo);
            if *xi < lo + margin || *xi > hi - margin {
                return Err(Error::PointOutsideDomain(x.to_vec()));
            }
        }
        Ok(())
    }

    /// Evaluates the chart on Taylor seeds `x_i + dx_i` at the given degree.
    pub fn eval_taylor(&self, x: &[f64], degree: usize) -> Vec<Taylor> {
        let ctx = ctx_for(self.n, degree);
        let seeds: Vec<Taylor> = x
            .iter()
            .enumerate()
            .map(|(i, &xi)| ctx.variable(i, xi))
            .collect();
        let out = (self.eval)(&seeds);
        assert_eq!(
            out.len(),
            self.n + 1,
            "chart map must produce n+1 ambient components"
        );
        out
    }

    /// Plain value evaluation (degree-0 Taylor pass).
    pub fn eval_value(&self, x: &[f64]) -> Vec<f64> {
        self.eval_taylor(x, 0).iter().map(|t| t.value()).collect()
    }

    /// Post-composition with the ambient inversion `y -> (y - c)/|y - c|^2`,
    /// a Moebius transformation whenever the image avoids `c`.
    pub fn compose_inversion(&self, center: Vec<f64>) -> ImmersionSpec {
        assert_eq!(center.len(), self.n + 1);
        let inner = self.eval.clone();
        let eval: Arc<EvalFn> = Arc::new(move |seeds| {
            let y = inner(seeds);
            let ctx = y[0].ctx().clone();
            let shifted: Vec<Taylor> = y
                .iter()
                .zip(center.iter())
                .map(|(t, c)| t - *c)
                .collect();
            let mut norm2 = ctx.constant(0.0);
            for t in &shifted {
                norm2 = &norm2 + &(t * t);
            }
            let inv = norm2.recip();
            shifted.iter().map(|t| t * &inv).collect()
        });
        let mut spec = ImmersionSpec::new(
            format!("{}+inversion", self.name),
            self.n,
            self.domain.clone(),
            eval,
        );
        spec.metadata = self.metadata.clone();
        spec
    }
}

/// Position plus all partial derivative tensors of the chart map up to
/// order 4 at one base point.
#[derive(Clone, Debug)]
pub struct Jet {
    pub x: Vec<f64>,
    pub position: Vec<f64>,
    /// `[n+1, n]`
    pub d1: NTensor,
    /// `[n+1, n, n]`, symmetric in the derivative axes
    pub d2: NTensor,
    pub d3: NTensor,
    pub d4: NTensor,
}

impl Jet {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn tensors(&self) -> [&NTensor; 4] {
        [&self.d1, &self.d2, &self.d3, &self.d4]
    }
}

fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t2 = t.clone();
                    t2.push(i);
                    t2
                })
            })
            .collect();
    }
    out
}

fn tuple_to_exps(n: usize, tuple: &[usize]) -> Vec<u8> {
    let mut exps = vec![0u8; n];
    for &i in tuple {
        exps[i] += 1;
    }
    exps
}

fn rank_check(spec: &ImmersionSpec, x: &[f64], d1: &NTensor) -> Result<()> {
    let n = spec.n;
    let m = DMatrix::from_fn(n + 1, n, |a, i| d1.get(&[a, i]));
    let svd = m.svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if !(min > 1e-8 * max.max(1.0)) {
        return Err(Error::RankDeficient(x.to_vec()));
    }
    Ok(())
}

/// Full order-4 jet of the chart map via Taylor arithmetic.
pub fn evaluate_jet(spec: &ImmersionSpec, x: &[f64]) -> Result<Jet> {
    spec.check_point(x)?;
    let f = spec.eval_taylor(x, 4);
    let n = spec.n;
    let position = f.iter().map(|t| t.value()).collect();
    let mut tensors = Vec::with_capacity(4);
    for k in 1..=4usize {
        let mut dims = vec![n + 1];
        dims.extend(std::iter::repeat(n).take(k));
        let mut t = NTensor::zeros(&dims);
        for tuple in index_tuples(n, k) {
            let exps = tuple_to_exps(n, &tuple);
            for (a, fa) in f.iter().enumerate() {
                let mut idx = vec![a];
                idx.extend(&tuple);
                t.set(&idx, fa.partial(&exps));
            }
        }
        tensors.push(t);
    }
    let d4 = tensors.pop().unwrap();
    let d3 = tensors.pop().unwrap();
    let d2 = tensors.pop().unwrap();
    let d1 = tensors.pop().unwrap();
    rank_check(spec, x, &d1)?;
    Ok(Jet {
        x: x.to_vec(),
        position,
        d1,
        d2,
        d3,
        d4,
    })
}

/// One-dimensional central-difference stencils of O(h^2) accuracy,
/// per derivative order; offsets in units of h.
fn stencil(order: usize) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!(),
    }
}

fn fd_partial(spec: &ImmersionSpec, x: &[f64], exps: &[u8], h: f64) -> Vec<f64> {
    let n = spec.n;
    // Tensor product of the per-variable stencils.
    let mut points: Vec<(Vec<i32>, f64)> = vec![(vec![0; n], 1.0)];
    let mut scale = 1.0;
    for (var, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        scale *= h.powi(e as i32);
        let st = stencil(e as usize);
        points = points
            .into_iter()
            .flat_map(|(offs, coeff)| {
                st.iter().map(move |&(o, c)| {
                    let mut offs2 = offs.clone();
                    offs2[var] = o;
                    (offs2, coeff * c)
                })
            })
            .collect();
    }
    let mut acc = vec![0.0; n + 1];
    for (offs, coeff) in points {
        let xs: Vec<f64> = x
            .iter()
            .zip(offs.iter())
            .map(|(&xi, &o)| xi + o as f64 * h)
            .collect();
        let fv = spec.eval_value(&xs);
        for (a, v) in fv.iter().enumerate() {
            acc[a] += coeff * v;
        }
    }
    acc.iter().map(|v| v / scale).collect()
}

/// Richardson-extrapolated central finite differences to order 4.
///
/// Used as an independent oracle for [`evaluate_jet`]; never on the
/// production path.
pub fn evaluate_jet_fd(spec: &ImmersionSpec, x: &[f64], h: f64) -> Result<Jet> {
    spec.check_point(x)?;
    if h <= 0.0 {
        return Err(Error::StepTooLarge(h));
    }
    let n = spec.n;
    // Stencils reach 2h along each axis.
    for (xi, (lo, hi)) in x.iter().zip(spec.domain.iter()) {
        if xi - 2.0 * h <= *lo || xi + 2.0 * h >= *hi {
            return Err(Error::StepTooLarge(h));
        }
    }
    let position = spec.eval_value(x);
    let mut tensors = Vec::with_capacity(4);
    for k in 1..=4usize {
        let mut dims = vec![n + 1];
        dims.extend(std::iter::repeat(n).take(k));
        let mut t = NTensor::zeros(&dims);
        for tuple in index_tuples(n, k) {
            let mut sorted = tuple.clone();
            sorted.sort_unstable();
            if sorted != tuple {
                continue; // fill from the sorted representative below
            }
            let exps = tuple_to_exps(n, &tuple);
            let coarse = fd_partial(spec, x, &exps, h);
            let fine = fd_partial(spec, x, &exps, h * 0.5);
            let extrap: Vec<f64> = coarse
                .iter()
                .zip(fine.iter())
                .map(|(c, f)| (4.0 * f - c) / 3.0)
                .collect();
            // Write into every permutation of the derivative axes.
            for perm in index_tuples(n, k) {
                let mut ps = perm.clone();
                ps.sort_unstable();
                if ps != tuple {
                    continue;
                }
                for (a, v) in extrap.iter().enumerate() {
                    let mut idx = vec![a];
                    idx.extend(&perm);
                    t.set(&idx, *v);
                }
            }
        }
        tensors.push(t);
    }
    let d4 = tensors.pop().unwrap();
    let d3 = tensors.pop().unwrap();
    let d2 = tensors.pop().unwrap();
    let d1 = tensors.pop().unwrap();
    rank_check(spec, x, &d1)?;
    Ok(Jet {
        x: x.to_vec(),
        position,
        d1,
        d2,
        d3,
        d4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(n: usize) -> ImmersionSpec {
        ImmersionSpec::new(
            "plane",
            n,
            vec![(-1.0, 1.0); n],
            Arc::new(|seeds: &[Taylor]| {
                let ctx = seeds[0].ctx().clone();
                let mut out: Vec<Taylor> = seeds.to_vec();
                out.push(ctx.constant(0.0));
                out
            }),
        )
    }

    fn sphere_graph(n: usize) -> ImmersionSpec {
        ImmersionSpec::new(
            "sphere-graph",
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

    #[test]
    fn plane_jet_is_affine() {
        let spec = plane(4);
        let jet = evaluate_jet(&spec, &[0.1, -0.2, 0.0, 0.3]).unwrap();
        for i in 0..4 {
            for a in 0..5 {
                let expect = if a == i { 1.0 } else { 0.0 };
                assert_eq!(jet.d1.get(&[a, i]), expect);
            }
        }
        assert_eq!(jet.d2.max_abs(), 0.0);
        assert_eq!(jet.d3.max_abs(), 0.0);
        assert_eq!(jet.d4.max_abs(), 0.0);
    }

    #[test]
    fn sphere_graph_second_partials_at_origin() {
        let spec = sphere_graph(3);
        let jet = evaluate_jet(&spec, &[0.0, 0.0, 0.0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..4 {
                    let expect = if a == 3 && i == j { -1.0 } else { 0.0 };
                    assert!((jet.d2.get(&[a, i, j]) - expect).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn fd_on_affine_map_has_zero_second_partials() {
        let spec = plane(3);
        let jet = evaluate_jet_fd(&spec, &[0.0, 0.1, -0.1], 1e-2).unwrap();
        // roundoff of exact cancellations divided by h^k
        assert!(jet.d2.max_abs() < 1e-11);
        assert!(jet.d3.max_abs() < 1e-8);
        assert!(jet.d4.max_abs() < 1e-6);
    }

    #[test]
    fn fd_fourth_derivative_of_exp() {
        // f(x) = (x1, x2, exp(x1)) on an n=2 patch: d^4 f_3 / dx1^4 = 1 at 0.
        let spec = ImmersionSpec::new(
            "exp-graph",
            2,
            vec![(-1.0, 1.0); 2],
            Arc::new(|seeds: &[Taylor]| {
                vec![seeds[0].clone(), seeds[1].clone(), seeds[0].exp()]
            }),
        );
        let jet = evaluate_jet_fd(&spec, &[0.0, 0.0], 1e-2).unwrap();
        assert!((jet.d4.get(&[2, 0, 0, 0, 0]) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn outside_domain_is_rejected() {
        let spec = plane(2);
        assert!(matches!(
            evaluate_jet(&spec, &[0.99, 0.0]),
            Err(Error::PointOutsideDomain(_))
        ));
    }

    #[test]
    fn fd_step_too_large_is_rejected() {
        let spec = plane(2);
        assert!(matches!(
            evaluate_jet_fd(&spec, &[0.8, 0.0], 0.2),
            Err(Error::StepTooLarge(_))
        ));
    }

    #[test]
    fn taylor_and_fd_jets_agree_on_analytic_map() {
        let spec = sphere_graph(3);
        let x = [0.1, -0.15, 0.2];
        let jt = evaluate_jet(&spec, &x).unwrap();
        let jf = evaluate_jet_fd(&spec, &x, 5e-3).unwrap();
        for (a, b) in jt.tensors().iter().zip(jf.tensors().iter()) {
            assert!(a.rel_distance(b) < 1e-5, "{}", a.rel_distance(b));
        }
    }
}
