//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Taylor`] value is a polynomial in `nvars` formal increments truncated at
//! a fixed total degree. Ring operations and the elementary functions close
//! within the truncation, so seeding the inputs of an analytic map with
//! `x_i + dx_i` and evaluating yields every partial derivative of the map at
//! `x` up to the truncation order, at machine precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

static CTX_CACHE: Lazy<Mutex<HashMap<(usize, usize), Arc<TaylorCtx>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached context lookup; building the multiplication table is cheap but not
/// free, and every sample point of a given spec reuses the same one.
pub fn ctx_for(nvars: usize, degree: usize) -> Arc<TaylorCtx> {
    let mut cache = CTX_CACHE.lock().unwrap();
    cache
        .entry((nvars, degree))
        .or_insert_with(|| TaylorCtx::new(nvars, degree))
        .clone()
}

/// Shared tables for one `(nvars, degree)` configuration.
///
/// Holds the monomial enumeration (graded-lex), the index lookup, the
/// truncated multiplication table and per-variable differentiation tables.
pub struct TaylorCtx {
    nvars: usize,
    degree: usize,
    monomials: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    /// Flat list of `(i, j, k)`: product of monomials `i` and `j` lands in `k`.
    mul_table: Vec<(u32, u32, u32)>,
    /// `deriv_table[var][m] = Some((target, factor))` when `d/dx_var` of
    /// monomial `m` is `factor * monomial[target]`.
    deriv_table: Vec<Vec<Option<(usize, f64)>>>,
    /// `alpha! = prod_i alpha_i!` per monomial, used to turn coefficients
    /// into partial derivatives.
    factorial: Vec<f64>,
}

fn enumerate_monomials(nvars: usize, degree: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; nvars];
    for d in 0..=degree {
        fn rec(cur: &mut Vec<u8>, pos: usize, left: u8, out: &mut Vec<Vec<u8>>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(cur.clone());
                return;
            }
            for v in (0..=left).rev() {
                cur[pos] = v;
                rec(cur, pos + 1, left - v, out);
            }
            cur[pos] = 0;
        }
        rec(&mut cur, 0, d as u8, &mut out);
    }
    out
}

impl TaylorCtx {
    pub fn new(nvars: usize, degree: usize) -> Arc<Self> {
        assert!(nvars >= 1, "need at least one variable");
        let monomials = enumerate_monomials(nvars, degree);
        let index: HashMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(k, m)| (m.clone(), k))
            .collect();
        let deg = |m: &[u8]| m.iter().map(|&e| e as usize).sum::<usize>();

        let mut mul_table = Vec::new();
        for (i, mi) in monomials.iter().enumerate() {
            let di = deg(mi);
            for (j, mj) in monomials.iter().enumerate() {
                if di + deg(mj) > degree {
                    continue;
                }
                let sum: Vec<u8> = mi.iter().zip(mj.iter()).map(|(a, b)| a + b).collect();
                let k = index[&sum];
                mul_table.push((i as u32, j as u32, k as u32));
            }
        }

        let mut deriv_table = Vec::with_capacity(nvars);
        for var in 0..nvars {
            let mut t = Vec::with_capacity(monomials.len());
            for m in &monomials {
                if m[var] == 0 {
                    t.push(None);
                } else {
                    let mut target = m.clone();
                    target[var] -= 1;
                    t.push(Some((index[&target], m[var] as f64)));
                }
            }
            deriv_table.push(t);
        }

        let factorial = monomials
            .iter()
            .map(|m| {
                m.iter()
                    .map(|&e| (1..=e as u64).product::<u64>() as f64)
                    .product::<f64>()
            })
            .collect();

        Arc::new(Self {
            nvars,
            degree,
            monomials,
            index,
            mul_table,
            deriv_table,
            factorial,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn constant(self: &Arc<Self>, v: f64) -> Taylor {
        let mut c = vec![0.0; self.len()];
        c[0] = v;
        Taylor {
            ctx: self.clone(),
            c,
        }
    }

    /// The seed `x_var + dx_var` used when extracting jets.
    pub fn variable(self: &Arc<Self>, var: usize, base: f64) -> Taylor {
        assert!(var < self.nvars);
        let mut c = vec![0.0; self.len()];
        c[0] = base;
        if self.degree >= 1 {
            let mut m = vec![0u8; self.nvars];
            m[var] = 1;
            c[self.index[&m]] = 1.0;
        }
        Taylor {
            ctx: self.clone(),
            c,
        }
    }

    fn monomial_index(&self, exps: &[u8]) -> usize {
        self.index[exps]
    }
}

/// A scalar carried with all its partial derivatives up to the context degree.
#[derive(Clone)]
pub struct Taylor {
    ctx: Arc<TaylorCtx>,
    c: Vec<f64>,
}

impl std::fmt::Debug for Taylor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Taylor")
            .field("nvars", &self.ctx.nvars)
            .field("degree", &self.ctx.degree)
            .field("coeffs", &self.c)
            .finish()
    }
}


impl Taylor {
    pub fn ctx(&self) -> &Arc<TaylorCtx> {
        &self.ctx
    }

    /// Degree-0 coefficient.
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeff(&self, exps: &[u8]) -> f64 {
        self.c[self.ctx.monomial_index(exps)]
    }

    /// Partial derivative `d^|alpha| / dx^alpha` at the base point
    /// (coefficient times `alpha!`).
    pub fn partial(&self, exps: &[u8]) -> f64 {
        let k = self.ctx.monomial_index(exps);
        self.c[k] * self.ctx.factorial[k]
    }

    /// Formal derivative with respect to variable `var`. Coefficients of the
    /// top truncation degree are lost, as usual for truncated series.
    pub fn deriv(&self, var: usize) -> Taylor {
        let mut c = vec![0.0; self.ctx.len()];
        for (m, entry) in self.ctx.deriv_table[var].iter().enumerate() {
            if let Some((target, factor)) = entry {
                c[*target] += self.c[m] * factor;
            }
        }
        Taylor {
            ctx: self.ctx.clone(),
            c,
        }
    }

    /// Formal antiderivative with respect to `var`, with zero constant term.
    /// The inverse lookup reuses the derivative table transposed.
    pub fn antideriv(&self, var: usize) -> Taylor {
        let mut c = vec![0.0; self.ctx.len()];
        for (m, entry) in self.ctx.deriv_table[var].iter().enumerate() {
            if let Some((target, factor)) = entry {
                c[m] += self.c[*target] / factor;
            }
        }
        Taylor {
            ctx: self.ctx.clone(),
            c,
        }
    }

    fn same_ctx(&self, other: &Taylor) {
        debug_assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx)
                || (self.ctx.nvars == other.ctx.nvars && self.ctx.degree == other.ctx.degree),
            "mixed Taylor contexts"
        );
    }

    pub fn mul(&self, other: &Taylor) -> Taylor {
        self.same_ctx(other);
        let mut c = vec![0.0; self.ctx.len()];
        for &(i, j, k) in &self.ctx.mul_table {
            c[k as usize] += self.c[i as usize] * other.c[j as usize];
        }
        Taylor {
            ctx: self.ctx.clone(),
            c,
        }
    }

    pub fn scale(&self, s: f64) -> Taylor {
        Taylor {
            ctx: self.ctx.clone(),
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    /// Composition with a univariate analytic function given by its
    /// derivatives `ders[k] = f^(k)(value)` at the base value.
    pub fn apply_series(&self, ders: &[f64]) -> Taylor {
        let degree = self.ctx.degree;
        assert!(ders.len() > degree);
        // w = self - value, nilpotent within truncation.
        let mut w = self.clone();
        w.c[0] = 0.0;
        let mut out = self.ctx.constant(ders[0]);
        let mut wpow = self.ctx.constant(1.0);
        let mut fact = 1.0;
        for k in 1..=degree {
            wpow = wpow.mul(&w);
            fact *= k as f64;
            out = &out + &wpow.scale(ders[k] / fact);
        }
        out
    }

    pub fn recip(&self) -> Taylor {
        let a = self.value();
        assert!(a != 0.0, "division by a non-unit Taylor scalar");
        let mut ders = Vec::with_capacity(self.ctx.degree + 1);
        let mut d = 1.0 / a;
        ders.push(d);
        for k in 1..=self.ctx.degree {
            d *= -(k as f64) / a;
            ders.push(d);
        }
        self.apply_series(&ders)
    }

    pub fn sqrt(&self) -> Taylor {
        let a = self.value();
        assert!(a > 0.0, "sqrt of a non-positive Taylor scalar");
        // d^k sqrt = (1/2)(1/2-1)...(1/2-k+1) a^{1/2-k}
        let mut ders = Vec::with_capacity(self.ctx.degree + 1);
        for k in 0..=self.ctx.degree {
            let mut coef = 1.0;
            for i in 0..k {
                coef *= 0.5 - i as f64;
            }
            ders.push(coef * a.powf(0.5 - k as f64));
        }
        self.apply_series(&ders)
    }

    pub fn exp(&self) -> Taylor {
        let e = self.value().exp();
        let ders = vec![e; self.ctx.degree + 1];
        self.apply_series(&ders)
    }

    pub fn ln(&self) -> Taylor {
        let a = self.value();
        assert!(a > 0.0);
        let mut ders = Vec::with_capacity(self.ctx.degree + 1);
        ders.push(a.ln());
        let mut d = 1.0 / a;
        for k in 1..=self.ctx.degree {
            if k > 1 {
                d *= -((k - 1) as f64) / a;
            }
            ders.push(d);
        }
        self.apply_series(&ders)
    }

    pub fn sin(&self) -> Taylor {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let ders: Vec<f64> = (0..=self.ctx.degree).map(|k| cycle[k % 4]).collect();
        self.apply_series(&ders)
    }

    pub fn cos(&self) -> Taylor {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let ders: Vec<f64> = (0..=self.ctx.degree).map(|k| cycle[k % 4]).collect();
        self.apply_series(&ders)
    }

    pub fn sinh(&self) -> Taylor {
        let ep = self.exp();
        let em = self.scale(-1.0).exp();
        (&ep - &em).scale(0.5)
    }

    pub fn cosh(&self) -> Taylor {
        let ep = self.exp();
        let em = self.scale(-1.0).exp();
        (&ep + &em).scale(0.5)
    }

    pub fn powi(&self, mut e: u32) -> Taylor {
        let mut out = self.ctx.constant(1.0);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &Taylor {
            type Output = Taylor;
            fn $method(self, rhs: &Taylor) -> Taylor {
                self.same_ctx(rhs);
                Taylor {
                    ctx: self.ctx.clone(),
                    c: self
                        .c
                        .iter()
                        .zip(rhs.c.iter())
                        .map(|(a, b)| a $op b)
                        .collect(),
                }
            }
        }
        impl std::ops::$trait for Taylor {
            type Output = Taylor;
            fn $method(self, rhs: Taylor) -> Taylor {
                (&self) $op (&rhs)
            }
        }
        impl std::ops::$trait<&Taylor> for Taylor {
            type Output = Taylor;
            fn $method(self, rhs: &Taylor) -> Taylor {
                (&self) $op rhs
            }
        }
        impl std::ops::$trait<Taylor> for &Taylor {
            type Output = Taylor;
            fn $method(self, rhs: Taylor) -> Taylor {
                self $op (&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl std::ops::Mul for &Taylor {
    type Output = Taylor;
    fn mul(self, rhs: &Taylor) -> Taylor {
        Taylor::mul(self, rhs)
    }
}
impl std::ops::Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        Taylor::mul(&self, &rhs)
    }
}
impl std::ops::Mul<&Taylor> for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: &Taylor) -> Taylor {
        Taylor::mul(&self, rhs)
    }
}
impl std::ops::Mul<Taylor> for &Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        Taylor::mul(self, &rhs)
    }
}

impl std::ops::Div for &Taylor {
    type Output = Taylor;
    fn div(self, rhs: &Taylor) -> Taylor {
        Taylor::mul(self, &rhs.recip())
    }
}
impl std::ops::Div for Taylor {
    type Output = Taylor;
    fn div(self, rhs: Taylor) -> Taylor {
        Taylor::mul(&self, &rhs.recip())
    }
}

impl std::ops::Neg for &Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}
impl std::ops::Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}

impl std::ops::Mul<f64> for &Taylor {
    type Output = Taylor;
    fn mul(self, rhs: f64) -> Taylor {
        self.scale(rhs)
    }
}
impl std::ops::Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: f64) -> Taylor {
        self.scale(rhs)
    }
}
impl std::ops::Add<f64> for &Taylor {
    type Output = Taylor;
    fn add(self, rhs: f64) -> Taylor {
        let mut out = self.clone();
        out.c[0] += rhs;
        out
    }
}
impl std::ops::Add<f64> for Taylor {
    type Output = Taylor;
    fn add(self, rhs: f64) -> Taylor {
        (&self) + rhs
    }
}
impl std::ops::Sub<f64> for &Taylor {
    type Output = Taylor;
    fn sub(self, rhs: f64) -> Taylor {
        self + (-rhs)
    }
}
impl std::ops::Sub<f64> for Taylor {
    type Output = Taylor;
    fn sub(self, rhs: f64) -> Taylor {
        (&self) + (-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> Arc<TaylorCtx> {
        TaylorCtx::new(2, 4)
    }

    #[test]
    fn exp_series_matches_known_coefficients() {
        let ctx = ctx();
        let x = ctx.variable(0, 0.0);
        let e = x.exp();
        // exp(dx) = 1 + dx + dx^2/2 + dx^3/6 + dx^4/24
        assert!((e.coeff(&[0, 0]) - 1.0).abs() < 1e-15);
        assert!((e.coeff(&[1, 0]) - 1.0).abs() < 1e-15);
        assert!((e.coeff(&[2, 0]) - 0.5).abs() < 1e-15);
        assert!((e.coeff(&[3, 0]) - 1.0 / 6.0).abs() < 1e-15);
        assert!((e.coeff(&[4, 0]) - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_of_one_minus_t_matches_binomial_series() {
        let ctx = ctx();
        let t = ctx.variable(0, 0.0);
        let s = (ctx.constant(1.0) - t).sqrt();
        // (1-t)^(1/2) = 1 - t/2 - t^2/8 - t^3/16 - 5 t^4/128
        assert!((s.coeff(&[1, 0]) + 0.5).abs() < 1e-15);
        assert!((s.coeff(&[2, 0]) + 0.125).abs() < 1e-15);
        assert!((s.coeff(&[3, 0]) + 1.0 / 16.0).abs() < 1e-15);
        assert!((s.coeff(&[4, 0]) + 5.0 / 128.0).abs() < 1e-15);
    }

    #[test]
    fn division_round_trips() {
        let ctx = ctx();
        let x = ctx.variable(0, 0.7);
        let y = ctx.variable(1, -1.3);
        let p = &(&x * &y) + &x.sin();
        let q = &(&x + &y.cos()) + 3.0;
        let r = &(&p / &q) * &q;
        for (a, b) in r.c.iter().zip(p.c.iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn partials_carry_factorials() {
        let ctx = ctx();
        let x = ctx.variable(0, 0.0);
        let f = x.powi(3); // d^3/dx^3 = 6
        assert!((f.partial(&[3, 0]) - 6.0).abs() < 1e-15);
    }

    #[test]
    fn antideriv_inverts_deriv() {
        let ctx = ctx();
        let x = ctx.variable(0, 0.3);
        let f = x.sin() * x.clone();
        let g = f.deriv(0).antideriv(0);
        // agree on all monomials with positive power of x_0, below top degree
        for (k, m) in ctx.monomials.iter().enumerate() {
            let deg: u8 = m.iter().sum();
            if m[0] > 0 && (deg as usize) < ctx.degree() {
                assert!((g.c[k] - f.c[k]).abs() < 1e-13);
            }
        }
    }

    fn arb_taylor() -> impl Strategy<Value = Taylor> {
        proptest::collection::vec(-2.0f64..2.0, 15).prop_map(|c| Taylor {
            ctx: ctx(),
            c,
        })
    }

    proptest! {
        #[test]
        fn ring_associativity(a in arb_taylor(), b in arb_taylor(), c in arb_taylor()) {
            let lhs = (&a * &b) * &c;
            let rhs = &a * (&b * &c);
            for (x, y) in lhs.c.iter().zip(rhs.c.iter()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn ring_distributivity(a in arb_taylor(), b in arb_taylor(), c in arb_taylor()) {
            let lhs = &a * &(&b + &c);
            let rhs = &(&a * &b) + &(&a * &c);
            for (x, y) in lhs.c.iter().zip(rhs.c.iter()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
