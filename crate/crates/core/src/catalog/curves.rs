//! Plane and spherical curves with prescribed curvature, and the hypersurface
//! cylinders built over them.
//!
//! The exponential curvature law has a closed form for its tangent angle, so
//! the spiral cylinder evaluates Taylor-exact jets: the tangent is composed
//! analytically and the position is recovered by formal antidifferentiation
//! plus a fixed Gauss-Legendre quadrature for the base-point constant. The
//! generic prescribed-curvature integrator (fixed-step RK4 with windowed
//! polynomial fits) is kept as the general route and cross-checked against
//! the closed form in tests.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{EvalFn, ImmersionSpec};
use crate::taylor::{ctx_for, Taylor};

/// Curvature laws named by the two-curvature classification.
#[derive(Clone, Copy, Debug)]
pub enum CurvatureLaw {
    /// kappa(s) = b * exp(a s), b > 0
    Exponential { a: f64, b: f64 },
    /// kappa(s) = 1 / sqrt(c s + b), c, b > 0
    InverseSqrt { c: f64, b: f64 },
}

impl CurvatureLaw {
    pub fn kappa(&self, s: f64) -> f64 {
        match *self {
            CurvatureLaw::Exponential { a, b } => b * (a * s).exp(),
            CurvatureLaw::InverseSqrt { c, b } => 1.0 / (c * s + b).sqrt(),
        }
    }

    fn check(&self, interval: (f64, f64)) -> Result<()> {
        let ok = match *self {
            CurvatureLaw::Exponential { b, .. } => b > 0.0,
            CurvatureLaw::InverseSqrt { c, b } => {
                c > 0.0 && b > 0.0 && c * interval.0 + b > 0.0 && c * interval.1 + b > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ParamOutOfRange(format!(
                "curvature law {self:?} not positive on {interval:?}"
            )))
        }
    }
}

const GL10_NODES: [f64; 5] = [
    0.1488743389816312,
    0.4333953941292472,
    0.6794095682990244,
    0.8650633666889845,
    0.9739065285171717,
];
const GL10_WEIGHTS: [f64; 5] = [
    0.2955242247147529,
    0.2692667193099963,
    0.2190863625159820,
    0.1494513491505806,
    0.0666713443086881,
];

/// Composite 10-point Gauss-Legendre quadrature of an analytic integrand.
fn quad(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let width = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * width;
        let mid = a + 0.5 * width;
        let half = 0.5 * width;
        for (x, w) in GL10_NODES.iter().zip(GL10_WEIGHTS.iter()) {
            acc += w * half * (f(mid + half * x) + f(mid - half * x));
        }
    }
    acc
}

/// Tangent angle of the exponential-curvature plane curve:
/// phi(s) = (b/a)(e^{a s} - 1), or b s when a = 0.
fn spiral_angle(a: f64, b: f64, s: f64) -> f64 {
    if a == 0.0 {
        b * s
    } else {
        b / a * ((a * s).exp() - 1.0)
    }
}

fn spiral_angle_taylor(a: f64, b: f64, s: &Taylor) -> Taylor {
    if a == 0.0 {
        s.scale(b)
    } else {
        (&s.scale(a).exp() - 1.0).scale(b / a)
    }
}

/// Cylinder over the plane curve with kappa(s) = b e^{a s}:
/// f(s, u) = (gamma(s), u) in R^{n+1}.
pub fn spiral_cylinder(a: f64, b: f64, n: usize) -> Result<ImmersionSpec> {
    if !(b > 0.0) {
        return Err(Error::ParamOutOfRange(format!(
            "spiral curvature scale must be positive, got {b}"
        )));
    }
    if n < 2 {
        return Err(Error::ParamOutOfRange(format!(
            "spiral cylinder needs n >= 2, got {n}"
        )));
    }
    let eval: Arc<EvalFn> = Arc::new(move |seeds: &[Taylor]| {
        let s = &seeds[0];
        let s0 = s.value();
        // base position by quadrature of the closed-form tangent
        let gx = quad(|t| spiral_angle(a, b, t).cos(), 0.0, s0, 8);
        let gy = quad(|t| spiral_angle(a, b, t).sin(), 0.0, s0, 8);
        let phi = spiral_angle_taylor(a, b, s);
        // increments by formal antidifferentiation of the tangent
        let x = &phi.cos().antideriv(0) + gx;
        let y = &phi.sin().antideriv(0) + gy;
        let mut out = vec![x, y];
        out.extend(seeds[1..].iter().cloned());
        out
    });
    let mut domain = vec![(-1.0, 1.0)];
    domain.extend(std::iter::repeat((-1.0, 1.0)).take(n - 1));
    Ok(
        ImmersionSpec::new(format!("spiral-cylinder(a={a},b={b})"), n, domain, eval)
            .with_metadata("construction", "curve-cylinder")
            .with_metadata("a", a)
            .with_metadata("b", b),
    )
}

/// A prescribed-curvature curve integrated by fixed-step RK4, with windowed
/// degree-8 polynomial interpolation for evaluation between samples.
#[derive(Clone, Debug)]
pub struct IntegratedCurve {
    /// model curvature: 0 (plane) or 1 (unit sphere)
    pub c: i32,
    pub s_lo: f64,
    pub step: f64,
    /// ambient dimension of the model chart (2 or 3)
    pub ambient: usize,
    /// positions gamma(s_lo + i step)
    samples: Vec<Vec<f64>>,
}

const FIT_WINDOW: usize = 9;

fn frenet_rhs(c: i32, kappa: f64, state: &[f64]) -> Vec<f64> {
    match c {
        0 => {
            // state = (x, y, tx, ty); J T = (-ty, tx)
            let (tx, ty) = (state[2], state[3]);
            vec![tx, ty, -kappa * ty, kappa * tx]
        }
        1 => {
            // state = (gamma, T) in R^3 x R^3 on the unit sphere;
            // T' = kappa (gamma x T) - gamma
            let g = &state[..3];
            let t = &state[3..];
            let cross = [
                g[1] * t[2] - g[2] * t[1],
                g[2] * t[0] - g[0] * t[2],
                g[0] * t[1] - g[1] * t[0],
            ];
            vec![
                t[0],
                t[1],
                t[2],
                kappa * cross[0] - g[0],
                kappa * cross[1] - g[1],
                kappa * cross[2] - g[2],
            ]
        }
        _ => unreachable!("curve model must be plane or sphere"),
    }
}

fn rk4_step(c: i32, law: &CurvatureLaw, s: f64, state: &[f64], h: f64) -> Vec<f64> {
    let add = |a: &[f64], b: &[f64], f: f64| -> Vec<f64> {
        a.iter().zip(b.iter()).map(|(x, y)| x + f * y).collect()
    };
    let k1 = frenet_rhs(c, law.kappa(s), state);
    let k2 = frenet_rhs(c, law.kappa(s + 0.5 * h), &add(state, &k1, 0.5 * h));
    let k3 = frenet_rhs(c, law.kappa(s + 0.5 * h), &add(state, &k2, 0.5 * h));
    let k4 = frenet_rhs(c, law.kappa(s + h), &add(state, &k3, h));
    state
        .iter()
        .enumerate()
        .map(|(i, x)| x + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Integrates the Frenet system gamma' = T, nabla_T T = kappa J T on the
/// plane (c = 0) or the unit sphere (c = 1) over `interval` with fixed step.
pub fn curve_with_curvature(
    law: CurvatureLaw,
    c: i32,
    interval: (f64, f64),
    step: f64,
) -> Result<IntegratedCurve> {
    if c != 0 && c != 1 {
        return Err(Error::ParamOutOfRange(format!(
            "curve model curvature must be 0 or 1, got {c}"
        )));
    }
    law.check(interval)?;
    if !(step > 0.0) || interval.1 <= interval.0 {
        return Err(Error::ParamOutOfRange(format!(
            "bad integration setup: step {step}, interval {interval:?}"
        )));
    }
    let ambient = if c == 0 { 2 } else { 3 };
    let mut state: Vec<f64> = if c == 0 {
        vec![0.0, 0.0, 1.0, 0.0]
    } else {
        // start at (1,0,0) heading along (0,1,0)
        vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0]
    };

    // step-doubling local error estimate at the start of the interval
    let one = rk4_step(c, &law, interval.0, &state, step);
    let half = rk4_step(c, &law, interval.0, &state, 0.5 * step);
    let two = rk4_step(c, &law, interval.0 + 0.5 * step, &half, 0.5 * step);
    let est = one
        .iter()
        .zip(two.iter())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / 15.0;
    if est > 1e-10 {
        return Err(Error::IntegratorStepTooLarge(step));
    }

    let count = ((interval.1 - interval.0) / step).ceil() as usize + 1;
    if count < FIT_WINDOW {
        return Err(Error::ParamOutOfRange(format!(
            "interval too short for the fit window: {count} samples"
        )));
    }
    let mut samples = Vec::with_capacity(count);
    samples.push(state[..ambient].to_vec());
    for i in 0..count - 1 {
        let s = interval.0 + i as f64 * step;
        state = rk4_step(c, &law, s, &state, step);
        samples.push(state[..ambient].to_vec());
    }
    Ok(IntegratedCurve {
        c,
        s_lo: interval.0,
        step,
        ambient,
        samples,
    })
}

impl IntegratedCurve {
    fn window_start(&self, s: f64) -> usize {
        let idx = ((s - self.s_lo) / self.step).round() as isize;
        let half = (FIT_WINDOW / 2) as isize;
        let max_start = self.samples.len() as isize - FIT_WINDOW as isize;
        (idx - half).clamp(0, max_start) as usize
    }

    /// Evaluates the interpolated curve on a Taylor scalar through a Newton
    /// form fitted on the window of samples around the base point.
    pub fn eval_taylor(&self, s: &Taylor) -> Vec<Taylor> {
        let start = self.window_start(s.value());
        let nodes: Vec<f64> = (0..FIT_WINDOW)
            .map(|i| self.s_lo + (start + i) as f64 * self.step)
            .collect();
        (0..self.ambient)
            .map(|a| {
                // Newton divided differences per component
                let mut table: Vec<f64> = (0..FIT_WINDOW)
                    .map(|i| self.samples[start + i][a])
                    .collect();
                let mut coeffs = vec![table[0]];
                for level in 1..FIT_WINDOW {
                    for i in 0..FIT_WINDOW - level {
                        table[i] =
                            (table[i + 1] - table[i]) / (nodes[i + level] - nodes[i]);
                    }
                    coeffs.push(table[0]);
                }
                // Horner evaluation of the Newton form on the Taylor scalar
                let ctx = s.ctx().clone();
                let mut acc = ctx.constant(coeffs[FIT_WINDOW - 1]);
                for i in (0..FIT_WINDOW - 1).rev() {
                    acc = &(&acc * &(s - nodes[i])) + coeffs[i];
                }
                acc
            })
            .collect()
    }

    pub fn position(&self, s: f64) -> Vec<f64> {
        let ctx = ctx_for(1, 0);
        let seed = ctx.variable(0, s);
        self.eval_taylor(&seed).iter().map(|t| t.value()).collect()
    }
}

/// Cylinder over an integrated plane curve: f(s, u) = (gamma(s), u).
/// Jet accuracy is limited by the polynomial fit; residual tolerances for
/// entries built this way are relaxed accordingly.
pub fn integrated_curve_cylinder(
    law: CurvatureLaw,
    interval: (f64, f64),
    step: f64,
    n: usize,
) -> Result<ImmersionSpec> {
    let curve = Arc::new(curve_with_curvature(law, 0, interval, step)?);
    let inset = 6.0 * step;
    let domain_s = (interval.0 + inset, interval.1 - inset);
    let eval: Arc<EvalFn> = Arc::new(move |seeds: &[Taylor]| {
        let mut out = curve.eval_taylor(&seeds[0]);
        out.extend(seeds[1..].iter().cloned());
        out
    });
    let mut domain = vec![domain_s];
    domain.extend(std::iter::repeat((-1.0, 1.0)).take(n - 1));
    Ok(
        ImmersionSpec::new("integrated-curve-cylinder", n, domain, eval)
            .with_metadata("construction", "curve-cylinder-integrated"),
    )
}
