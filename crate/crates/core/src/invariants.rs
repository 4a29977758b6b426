//! Pointwise classical and Moebius invariants, and the conformal structure
//! equations evaluated as residuals.
//!
//! The whole pipeline runs in truncated Taylor arithmetic (degree 5) so that
//! every derived field -- the conformal factor, the Moebius metric, its
//! Christoffel symbols, the Blaschke tensor, the Moebius form -- carries
//! enough exact derivatives to evaluate curvature and covariant-derivative
//! identities at machine precision, with no nested numerical differentiation.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::jet::{ImmersionSpec, Jet};
use crate::linalg::{sym_eigen_sorted, taylor_det, taylor_mat_inv, NTensor};
use crate::taylor::Taylor;

/// Taylor degree used for the invariant pipeline. Degree 5 is needed because
/// the covariant derivative of the Blaschke tensor (second conformal Codazzi
/// equation) consumes five orders of the immersion.
pub const PIPELINE_DEGREE: usize = 5;

/// Umbilic threshold: rho^2 below this is treated as an umbilic point.
pub fn umbilic_threshold(alpha_norm2: f64) -> f64 {
    1e-10 * alpha_norm2.max(1.0)
}

/// First/second fundamental data of the immersion at a point.
#[derive(Clone, Debug)]
pub struct ClassicalData {
    pub n: usize,
    /// induced metric
    pub g: DMatrix<f64>,
    /// unit normal in R^{n+1}
    pub normal: DVector<f64>,
    /// scalar second fundamental form coefficients
    pub h: DMatrix<f64>,
    /// shape operator A = g^{-1} h
    pub shape: DMatrix<f64>,
    /// mean curvature H = tr A / n
    pub mean: f64,
    /// ||alpha||^2 = tr A^2 in codimension one
    pub alpha_norm2: f64,
    /// principal curvatures, ascending
    pub principal: Vec<f64>,
}

/// All pointwise Moebius invariants.
#[derive(Clone, Debug)]
pub struct MoebiusData {
    pub n: usize,
    pub rho: f64,
    pub mean: f64,
    /// Moebius shape operator, coordinate components
    pub b: DMatrix<f64>,
    /// eigenvalues of B, ascending
    pub lambda_bar: Vec<f64>,
    /// g*-orthonormal eigenframe of B: column p = coordinate components of X_p
    pub frame: DMatrix<f64>,
    /// Blaschke tensor, coordinate components
    pub psi: DMatrix<f64>,
    /// diagonal of the Blaschke tensor in the B-eigenframe, paired to lambda_bar
    pub theta: Vec<f64>,
    /// Moebius form components omega_i in the coordinate frame
    pub omega: DVector<f64>,
    /// g*-norm of the Moebius form
    pub omega_norm: f64,
    /// scalar curvature of the Moebius metric
    pub s_star: f64,
    /// curvature tensor of the Moebius metric, R^l_{kij} indexed [l,k,i,j]
    pub rstar: NTensor,
    pub g: DMatrix<f64>,
    pub gstar: DMatrix<f64>,
    /// ||[psi,B]|| / (||psi|| ||B||), certifies the common eigenframe
    pub commutator_rel: f64,
}

impl MoebiusData {
    /// Frame matrix of an endomorphism given by coordinate components:
    /// entry (p,q) = <P X_q, X_p>*.
    pub fn to_frame(&self, p: &DMatrix<f64>) -> DMatrix<f64> {
        self.frame.transpose() * &self.gstar * p * &self.frame
    }

    /// Curvature operator R*(u, v) for coordinate-component vectors, as a
    /// matrix acting on coordinate components.
    pub fn curvature_operator(&self, u: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut out = DMatrix::zeros(n, n);
        for l in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += self.rstar.get(&[l, k, i, j]) * u[i] * v[j];
                    }
                }
                out[(l, k)] = acc;
            }
        }
        out
    }

    /// Sectional curvature of the Moebius metric for the plane spanned by
    /// coordinate-component vectors u, v.
    pub fn sectional(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let r = self.curvature_operator(u, v);
        let rv = r * v;
        let num = (self.gstar.clone() * rv).dot(u);
        let uu = (self.gstar.clone() * u).dot(u);
        let vv = (self.gstar.clone() * v).dot(v);
        let uv = (self.gstar.clone() * v).dot(u);
        num / (uu * vv - uv * uv)
    }

    /// Mean sectional curvature over pairs of frame vectors drawn from the
    /// index sets `a` and `b` (disjoint or equal; equal pairs are skipped).
    pub fn mean_sectional(&self, a: &[usize], b: &[usize]) -> f64 {
        let mut acc = 0.0;
        let mut count = 0usize;
        for &p in a {
            for &q in b {
                if p == q {
                    continue;
                }
                let u: DVector<f64> = self.frame.column(p).into();
                let v: DVector<f64> = self.frame.column(q).into();
                acc += self.sectional(&u, &v);
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            acc / count as f64
        }
    }
}

/// Max-norm residuals of the conformal structure equations at one point,
/// evaluated in a g*-orthonormal frame.
#[derive(Clone, Debug)]
pub struct StructureResiduals {
    pub gauss: f64,
    pub codazzi_b: f64,
    pub codazzi_psi: f64,
    pub ricci: f64,
    pub bianchi: f64,
}

impl StructureResiduals {
    pub fn max(&self) -> f64 {
        self.gauss
            .max(self.codazzi_b)
            .max(self.codazzi_psi)
            .max(self.ricci)
    }
}

/// Everything the engine knows about one sample point.
#[derive(Clone, Debug)]
pub struct PointData {
    pub x: Vec<f64>,
    pub classical: ClassicalData,
    pub moebius: MoebiusData,
    pub residuals: StructureResiduals,
}

pub(crate) fn generalized_cross_taylor(df: &[Vec<Taylor>]) -> Vec<Taylor> {
    // df[i][a]: i = coordinate, a = ambient. Returns the (unnormalized)
    // vector orthogonal to all df[i], via cofactor expansion.
    let n = df.len();
    let mut out = Vec::with_capacity(n + 1);
    for a in 0..=n {
        let minor: Vec<Vec<Taylor>> = (0..n)
            .map(|i| {
                (0..=n)
                    .filter(|b| *b != a)
                    .map(|b| df[i][b].clone())
                    .collect()
            })
            .collect();
        let det = taylor_det(&minor);
        out.push(if a % 2 == 0 { det } else { -det });
    }
    out
}

fn generalized_cross_numeric(d1: &NTensor) -> DVector<f64> {
    let np1 = d1.dims()[0];
    let n = d1.dims()[1];
    let mut out = DVector::zeros(np1);
    for a in 0..np1 {
        let minor = DMatrix::from_fn(n, n, |i, col| {
            let b = if col < a { col } else { col + 1 };
            d1.get(&[b, i])
        });
        let det = minor.determinant();
        out[a] = if a % 2 == 0 { det } else { -det };
    }
    out
}

/// Classical invariants from an order-4 jet (numeric route).
pub fn classical_data(jet: &Jet) -> Result<ClassicalData> {
    let n = jet.n();
    let g = DMatrix::from_fn(n, n, |i, j| {
        (0..=n).map(|a| jet.d1.get(&[a, i]) * jet.d1.get(&[a, j])).sum()
    });
    let cross = generalized_cross_numeric(&jet.d1);
    let norm = cross.norm();
    if !(norm > 0.0) {
        return Err(Error::RankDeficient(jet.x.clone()));
    }
    let normal = cross / norm;
    let h = DMatrix::from_fn(n, n, |i, j| {
        (0..=n).map(|a| jet.d2.get(&[a, i, j]) * normal[a]).sum()
    });
    let ginv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient(jet.x.clone()))?;
    let shape = ginv * &h;
    let mean = shape.trace() / n as f64;
    let alpha_norm2 = (&shape * &shape).trace();
    // Principal curvatures: eigenvalues of the g-self-adjoint operator A.
    let chol = Cholesky::new(g.clone()).ok_or_else(|| Error::RankDeficient(jet.x.clone()))?;
    let l = chol.l();
    let linv_t = l
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient(jet.x.clone()))?;
    let sym = l.transpose() * &shape * &linv_t;
    let (principal, _) = sym_eigen_sorted(&sym);
    Ok(ClassicalData {
        n,
        g,
        normal,
        h,
        shape,
        mean,
        alpha_norm2,
        principal,
    })
}

/// Moebius conformal factor rho from classical data.
pub fn rho_from_classical(cd: &ClassicalData) -> Result<f64> {
    let n = cd.n as f64;
    let rho2 = n / (n - 1.0) * (cd.alpha_norm2 - n * cd.mean * cd.mean);
    let threshold = umbilic_threshold(cd.alpha_norm2);
    if rho2 <= threshold {
        return Err(Error::UmbilicPoint {
            rho2,
            threshold,
        });
    }
    Ok(rho2.sqrt())
}

/// Moebius shape operator B = rho^{-1}(A - H I) and its spectrum (ascending).
pub fn moebius_shape_operator(cd: &ClassicalData, rho: f64) -> (DMatrix<f64>, Vec<f64>) {
    let n = cd.n;
    let b = (cd.shape.clone() - DMatrix::identity(n, n) * cd.mean) / rho;
    let lambda: Vec<f64> = cd.principal.iter().map(|l| (l - cd.mean) / rho).collect();
    (b, lambda)
}

struct TaylorMatrixOps;

impl TaylorMatrixOps {
    fn matmul(a: &[Vec<Taylor>], b: &[Vec<Taylor>]) -> Vec<Vec<Taylor>> {
        let n = a.len();
        let m = b[0].len();
        let k = b.len();
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let mut acc = a[0][0].ctx().constant(0.0);
                        for l in 0..k {
                            acc = &acc + &a[i][l].mul(&b[l][j]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }
}

/// Full invariant pipeline at one point. `flip_normal` recomputes with the
/// opposite normal orientation (used by invariance tests).
pub fn analyze_point_oriented(
    spec: &ImmersionSpec,
    x: &[f64],
    flip_normal: bool,
) -> Result<PointData> {
    spec.check_point(x)?;
    let n = spec.n;
    let nf = n as f64;
    let f = spec.eval_taylor(x, PIPELINE_DEGREE);
    let ctx = f[0].ctx().clone();

    // First and second derivatives of the chart map.
    let df: Vec<Vec<Taylor>> = (0..n)
        .map(|i| (0..=n).map(|a| f[a].deriv(i)).collect())
        .collect();
    let d2f: Vec<Vec<Vec<Taylor>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..=n).map(|a| df[i][a].deriv(j)).collect())
                .collect()
        })
        .collect();

    // Induced metric.
    let g: Vec<Vec<Taylor>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = ctx.constant(0.0);
                    for a in 0..=n {
                        acc = &acc + &df[i][a].mul(&df[j][a]);
                    }
                    acc
                })
                .collect()
        })
        .collect();

    // Unit normal.
    let cross = generalized_cross_taylor(&df);
    let mut cross_norm2 = ctx.constant(0.0);
    for c in &cross {
        cross_norm2 = &cross_norm2 + &c.mul(c);
    }
    if !(cross_norm2.value() > 0.0) {
        return Err(Error::RankDeficient(x.to_vec()));
    }
    let inv_norm = cross_norm2.sqrt().recip();
    let sign = if flip_normal { -1.0 } else { 1.0 };
    let normal: Vec<Taylor> = cross.iter().map(|c| c.mul(&inv_norm).scale(sign)).collect();

    // Second fundamental form and shape operator.
    let h: Vec<Vec<Taylor>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = ctx.constant(0.0);
                    for a in 0..=n {
                        acc = &acc + &d2f[i][j][a].mul(&normal[a]);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let ginv = taylor_mat_inv(&g);
    let shape = TaylorMatrixOps::matmul(&ginv, &h);
    let mut mean = ctx.constant(0.0);
    for i in 0..n {
        mean = &mean + &shape[i][i];
    }
    let mean = mean.scale(1.0 / nf);
    let mut alpha2 = ctx.constant(0.0);
    for i in 0..n {
        for j in 0..n {
            alpha2 = &alpha2 + &shape[i][j].mul(&shape[j][i]);
        }
    }

    // Conformal factor; reject umbilic points.
    let rho2 = (&alpha2 - &mean.mul(&mean).scale(nf)).scale(nf / (nf - 1.0));
    let threshold = umbilic_threshold(alpha2.value());
    if rho2.value() <= threshold {
        return Err(Error::UmbilicPoint {
            rho2: rho2.value(),
            threshold,
        });
    }
    let rho = rho2.sqrt();
    let rho_inv = rho.recip();
    let rho2_inv = rho2.recip();

    // Moebius shape operator.
    let b_tay: Vec<Vec<Taylor>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let centered = if i == j {
                        &shape[i][j] - &mean
                    } else {
                        shape[i][j].clone()
                    };
                    centered.mul(&rho_inv)
                })
                .collect()
        })
        .collect();

    // Moebius metric and its Christoffel symbols.
    let gstar: Vec<Vec<Taylor>> = (0..n)
        .map(|i| (0..n).map(|j| g[i][j].mul(&rho2)).collect())
        .collect();
    let gstar_inv: Vec<Vec<Taylor>> = (0..n)
        .map(|i| (0..n).map(|j| ginv[i][j].mul(&rho2_inv)).collect())
        .collect();
    let dgstar: Vec<Vec<Vec<Taylor>>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| (0..n).map(|j| gstar[i][j].deriv(k)).collect())
                .collect()
        })
        .collect();
    // Gamma^k_{ij}
    let gamma: Vec<Vec<Vec<Taylor>>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let mut acc = ctx.constant(0.0);
                            for l in 0..n {
                                let term = &(&dgstar[i][j][l] + &dgstar[j][i][l])
                                    - &dgstar[l][i][j];
                                acc = &acc + &gstar_inv[k][l].mul(&term);
                            }
                            acc.scale(0.5)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    // grad* rho and its covariant derivative.
    let drho: Vec<Taylor> = (0..n).map(|l| rho.deriv(l)).collect();
    let grad_rho: Vec<Taylor> = (0..n)
        .map(|k| {
            let mut acc = ctx.constant(0.0);
            for l in 0..n {
                acc = &acc + &gstar_inv[k][l].mul(&drho[l]);
            }
            acc
        })
        .collect();
    let mut grad_rho_norm2 = ctx.constant(0.0);
    for k in 0..n {
        for l in 0..n {
            acc_add(&mut grad_rho_norm2, &gstar[k][l].mul(&grad_rho[k]).mul(&grad_rho[l]));
        }
    }
    // (nabla_i grad* rho)^k
    let nabla_u: Vec<Vec<Taylor>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    let mut acc = grad_rho[k].deriv(i);
                    for m in 0..n {
                        acc = &acc + &gamma[k][i][m].mul(&grad_rho[m]);
                    }
                    acc
                })
                .collect()
        })
        .collect();

    // Blaschke tensor psi^k_i.
    let h_over_rho = mean.mul(&rho_inv);
    let scalar_part = (&grad_rho_norm2 + &mean.mul(&mean)).mul(&rho2_inv).scale(0.5);
    let psi_tay: Vec<Vec<Taylor>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let mut acc = h_over_rho.mul(&b_tay[k][i]);
                    if k == i {
                        acc = &acc + &scalar_part;
                    }
                    acc = &acc - &rho_inv.mul(&nabla_u[i][k]);
                    acc
                })
                .collect()
        })
        .collect();

    // Moebius form omega_i = -rho^{-1}(d_i H + g*_{ij}(B grad* rho)^j).
    let b_grad_rho: Vec<Taylor> = (0..n)
        .map(|j| {
            let mut acc = ctx.constant(0.0);
            for k in 0..n {
                acc = &acc + &b_tay[j][k].mul(&grad_rho[k]);
            }
            acc
        })
        .collect();
    let omega_tay: Vec<Taylor> = (0..n)
        .map(|i| {
            let mut acc = mean.deriv(i);
            for j in 0..n {
                acc = &acc + &gstar[i][j].mul(&b_grad_rho[j]);
            }
            -acc.mul(&rho_inv)
        })
        .collect();

    // ---- numeric extraction ----
    let val = |t: &Taylor| t.value();
    let part = |t: &Taylor, l: usize| {
        let mut e = vec![0u8; n];
        e[l] = 1;
        t.partial(&e)
    };

    let g_num = DMatrix::from_fn(n, n, |i, j| val(&g[i][j]));
    let gstar_num = DMatrix::from_fn(n, n, |i, j| val(&gstar[i][j]));
    let b_num = DMatrix::from_fn(n, n, |k, j| val(&b_tay[k][j]));
    let psi_num = DMatrix::from_fn(n, n, |k, j| val(&psi_tay[k][j]));
    let shape_num = DMatrix::from_fn(n, n, |i, j| val(&shape[i][j]));
    let h_num = DMatrix::from_fn(n, n, |i, j| val(&h[i][j]));
    let normal_num = DVector::from_fn(n + 1, |a, _| val(&normal[a]));
    let omega_num = DVector::from_fn(n, |i, _| val(&omega_tay[i]));
    let rho_num = val(&rho);
    let mean_num = val(&mean);

    // Christoffel values and first derivatives; curvature of g*.
    let mut gam = NTensor::zeros(&[n, n, n]);
    let mut dgam = NTensor::zeros(&[n, n, n, n]);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                gam.set(&[k, i, j], val(&gamma[k][i][j]));
                for l in 0..n {
                    dgam.set(&[l, k, i, j], part(&gamma[k][i][j], l));
                }
            }
        }
    }
    let mut rstar = NTensor::zeros(&[n, n, n, n]);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dgam.get(&[i, l, j, k]) - dgam.get(&[j, l, i, k]);
                    for m in 0..n {
                        v += gam.get(&[l, i, m]) * gam.get(&[m, j, k])
                            - gam.get(&[l, j, m]) * gam.get(&[m, i, k]);
                    }
                    rstar.set(&[l, k, i, j], v);
                }
            }
        }
    }

    // g*-orthonormal eigenframe of B, theta diagonal, commutator check.
    let chol = Cholesky::new(gstar_num.clone())
        .ok_or_else(|| Error::RankDeficient(x.to_vec()))?;
    let lmat = chol.l();
    let linv_t = lmat
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient(x.to_vec()))?;
    let b_sym = lmat.transpose() * &b_num * &linv_t;
    let (lambda_bar, w) = sym_eigen_sorted(&b_sym);
    let frame = &linv_t * &w;
    let psi_sym = lmat.transpose() * &psi_num * &linv_t;
    let psi_frame = w.transpose() * &psi_sym * &w;
    let theta: Vec<f64> = (0..n).map(|p| psi_frame[(p, p)]).collect();
    let comm = &psi_num * &b_num - &b_num * &psi_num;
    let comm_sym = lmat.transpose() * comm * &linv_t;
    let commutator_rel =
        comm_sym.norm() / (psi_sym.norm() * b_sym.norm()).max(f64::MIN_POSITIVE);

    // Frame curvature components and residual suite.
    let md_frame = frame.clone();
    let frame_vec = |p: usize| -> DVector<f64> { md_frame.column(p).into() };
    // <R(X_p, X_q) X_r, X_s>*
    let mut rframe = NTensor::zeros(&[n, n, n, n]);
    for p in 0..n {
        for q in 0..n {
            // operator matrix of R(X_p, X_q) in coordinates
            let mut rop = DMatrix::zeros(n, n);
            for l in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            acc += rstar.get(&[l, k, i, j]) * md_frame[(i, p)] * md_frame[(j, q)];
                        }
                    }
                    rop[(l, k)] = acc;
                }
            }
            let rop_frame = md_frame.transpose() * &gstar_num * rop * &md_frame;
            for r in 0..n {
                for s in 0..n {
                    rframe.set(&[p, q, r, s], rop_frame[(s, r)]);
                }
            }
        }
    }
    let b_frame = md_frame.transpose() * &gstar_num * &b_num * &md_frame;
    let p_frame = md_frame.transpose() * &gstar_num * &psi_num * &md_frame;

    let mut gauss = 0.0f64;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let lhs = rframe.get(&[p, q, r, s]);
                    let t1 = b_frame[(r, q)] * b_frame[(s, p)] - b_frame[(r, p)] * b_frame[(s, q)];
                    let t2 = if q == r { p_frame[(s, p)] } else { 0.0 }
                        - if s == q { p_frame[(r, p)] } else { 0.0 };
                    let t3 = p_frame[(r, q)] * if s == p { 1.0 } else { 0.0 }
                        - if p == r { p_frame[(s, q)] } else { 0.0 };
                    gauss = gauss.max((lhs - t1 - t2 - t3).abs());
                }
            }
        }
    }

    let mut bianchi = 0.0f64;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = rframe.get(&[p, q, r, s])
                        + rframe.get(&[q, r, p, s])
                        + rframe.get(&[r, p, q, s]);
                    bianchi = bianchi.max(v.abs());
                }
            }
        }
    }

    // Scalar curvature of g*.
    let mut scal = 0.0;
    for p in 0..n {
        for q in 0..n {
            scal += rframe.get(&[p, q, q, p]);
        }
    }
    let s_star = scal / (nf * (nf - 1.0));

    // Conformal Codazzi residuals.
    let cov_endo = |field: &Vec<Vec<Taylor>>, i: usize| -> DMatrix<f64> {
        // (nabla_i P)^k_j
        DMatrix::from_fn(n, n, |k, j| {
            let mut v = part(&field[k][j], i);
            for m in 0..n {
                v += gam.get(&[k, i, m]) * val(&field[m][j])
                    - gam.get(&[m, i, j]) * val(&field[k][m]);
            }
            v
        })
    };
    let nabla_b: Vec<DMatrix<f64>> = (0..n).map(|i| cov_endo(&b_tay, i)).collect();
    let nabla_psi: Vec<DMatrix<f64>> = (0..n).map(|i| cov_endo(&psi_tay, i)).collect();
    let gstar_norm = |v: &DVector<f64>| ((gstar_num.clone() * v).dot(v)).max(0.0).sqrt();
    let mut codazzi_b = 0.0f64;
    let mut codazzi_psi = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            let xp = frame_vec(p);
            let xq = frame_vec(q);
            let mut res_b = DVector::zeros(n);
            let mut res_psi = DVector::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    let wgt = xp[i] * xq[j];
                    if wgt == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        let delta_kj = if k == j { 1.0 } else { 0.0 };
                        let delta_ki = if k == i { 1.0 } else { 0.0 };
                        let lhs_b = nabla_b[i][(k, j)] - nabla_b[j][(k, i)];
                        let rhs_b = omega_num[i] * delta_kj - omega_num[j] * delta_ki;
                        res_b[k] += wgt * (lhs_b - rhs_b);
                        let lhs_p = nabla_psi[i][(k, j)] - nabla_psi[j][(k, i)];
                        let rhs_p = omega_num[j] * b_num[(k, i)] - omega_num[i] * b_num[(k, j)];
                        res_psi[k] += wgt * (lhs_p - rhs_p);
                    }
                }
            }
            codazzi_b = codazzi_b.max(gstar_norm(&res_b));
            codazzi_psi = codazzi_psi.max(gstar_norm(&res_psi));
        }
    }

    // Conformal Ricci: d omega pairs with the commutator of the Blaschke
    // tensor and B. With d omega(X,Y) = X(omega(Y)) - Y(omega(X)) and the
    // sign conventions fixed above, the matching order is [B, psi]
    // (cross-checked against a finite-difference exterior derivative).
    let domega = DMatrix::from_fn(n, n, |i, j| part(&omega_tay[j], i));
    let comm_num = &b_num * &psi_num - &psi_num * &b_num;
    let comm_lowered = &gstar_num * &comm_num; // (j,i) entry = <[B,psi] d_i, d_j>*
    let mut ricci = 0.0f64;
    for p in 0..n {
        for q in (p + 1)..n {
            let xp = frame_vec(p);
            let xq = frame_vec(q);
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let dw = domega[(i, j)] - domega[(j, i)];
                    acc += xp[i] * xq[j] * (dw - comm_lowered[(j, i)]);
                }
            }
            ricci = ricci.max(acc.abs());
        }
    }

    // Assemble.
    let gstar_inv_num = gstar_num
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient(x.to_vec()))?;
    let omega_norm = ((gstar_inv_num * &omega_num).dot(&omega_num)).max(0.0).sqrt();
    let shape_sym = lmat.transpose() * &shape_num * &linv_t;
    let (principal, _) = sym_eigen_sorted(&shape_sym);
    // principal curvatures of A are eigenvalues w.r.t. g, not g*; recover via
    // the plain metric instead.
    let chol_g = Cholesky::new(g_num.clone()).ok_or_else(|| Error::RankDeficient(x.to_vec()))?;
    let lg = chol_g.l();
    let lg_inv_t = lg
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient(x.to_vec()))?;
    let (principal_g, _) = sym_eigen_sorted(&(lg.transpose() * &shape_num * &lg_inv_t));
    let _ = principal;

    let classical = ClassicalData {
        n,
        g: g_num.clone(),
        normal: normal_num,
        h: h_num,
        shape: shape_num,
        mean: mean_num,
        alpha_norm2: val(&alpha2),
        principal: principal_g,
    };
    let moebius = MoebiusData {
        n,
        rho: rho_num,
        mean: mean_num,
        b: b_num,
        lambda_bar,
        frame,
        psi: psi_num,
        theta,
        omega: omega_num,
        omega_norm,
        s_star,
        rstar,
        g: g_num,
        gstar: gstar_num,
        commutator_rel,
    };
    let residuals = StructureResiduals {
        gauss,
        codazzi_b,
        codazzi_psi,
        ricci,
        bianchi,
    };
    Ok(PointData {
        x: x.to_vec(),
        classical,
        moebius,
        residuals,
    })
}

fn acc_add(acc: &mut Taylor, t: &Taylor) {
    *acc = &*acc + t;
}

/// Full invariant pipeline with the default normal orientation.
pub fn analyze_point(spec: &ImmersionSpec, x: &[f64]) -> Result<PointData> {
    analyze_point_oriented(spec, x, false)
}
