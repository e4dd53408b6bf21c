//! The commutative metrised algebra of a cubic form.
//!
//! Given a cubic form `u` and a non-degenerate symmetric metric `Q`, the
//! product `xy` is the unique vector with `Q(xy, z) = u(x; y; z)` for every
//! `z`, where `u(x; y; z)` is the full polarization (`u(x; x; x) = 6 u(x)`).
//! With the Euclidean metric this gives `x^2 = 2 grad u(x)` and
//! `L_x = Hessian u(x)`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::AlgebraError;
use crate::linalg::LinOp;
use crate::poly::{CubicForm, GramMetric, HomoPoly};
use crate::scalar::{Rational, Scalar};

#[derive(Debug)]
pub struct FSAlgebra<S> {
    u: CubicForm<S>,
    gram: GramMetric<S>,
    /// Flattened third-derivative tensor of `u`.
    tensor: Vec<S>,
    /// `G^{-1}`; `None` for the identity metric.
    gram_inv: Option<LinOp<S>>,
    b: OnceLock<Vec<S>>,
}

impl<S: Scalar> Clone for FSAlgebra<S> {
    fn clone(&self) -> Self {
        Self {
            u: self.u.clone(),
            gram: self.gram.clone(),
            tensor: self.tensor.clone(),
            gram_inv: self.gram_inv.clone(),
            b: self.b.clone(),
        }
    }
}

impl<S: Scalar> FSAlgebra<S> {
    pub fn new(u: CubicForm<S>, gram: GramMetric<S>) -> Result<Self, AlgebraError> {
        if u.n() != gram.n() {
            return Err(crate::error::PolyError::DimensionMismatch {
                expected: u.n(),
                found: gram.n(),
            }
            .into());
        }
        let gram_inv = if gram.is_identity() {
            None
        } else {
            Some(gram.matrix().inverse().ok_or(AlgebraError::SingularGram)?)
        };
        let tensor = u.third_derivatives();
        Ok(Self {
            u,
            gram,
            tensor,
            gram_inv,
            b: OnceLock::new(),
        })
    }

    /// Algebra of `u` with the standard inner product.
    pub fn euclidean(u: CubicForm<S>) -> Self {
        let n = u.n();
        Self::new(u, GramMetric::identity(n)).expect("identity metric is non-degenerate")
    }

    pub fn n(&self) -> usize {
        self.u.n()
    }

    pub fn cubic(&self) -> &CubicForm<S> {
        &self.u
    }

    pub fn metric(&self) -> &GramMetric<S> {
        &self.gram
    }

    pub fn is_euclidean(&self) -> bool {
        self.gram.is_identity()
    }

    pub fn is_zero_algebra(&self) -> bool {
        self.u.poly().is_zero()
    }

    pub fn inner(&self, x: &[S], y: &[S]) -> S {
        self.gram.inner(x, y)
    }

    pub fn norm_sq(&self, x: &[S]) -> S {
        self.gram.inner(x, x)
    }

    fn t(&self, i: usize, j: usize, k: usize) -> &S {
        let n = self.n();
        &self.tensor[(i * n + j) * n + k]
    }

    fn raise(&self, covector: Vec<S>) -> Vec<S> {
        match &self.gram_inv {
            None => covector,
            Some(inv) => inv.apply(&covector),
        }
    }

    /// `xy`, defined by `Q(xy, z) = u(x; y; z)`.
    pub fn product(&self, x: &[S], y: &[S]) -> Vec<S> {
        let n = self.n();
        assert!(x.len() == n && y.len() == n, "dimension mismatch");
        let mut w = vec![S::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = x[i].clone() * y[j].clone();
                for (k, wk) in w.iter_mut().enumerate() {
                    let t = self.t(i, j, k);
                    if !t.is_zero() {
                        *wk = wk.clone() + t.clone() * xy.clone();
                    }
                }
            }
        }
        self.raise(w)
    }

    pub fn square(&self, x: &[S]) -> Vec<S> {
        self.product(x, x)
    }

    /// Principal power `x^k = L_x^{k-1} x`.
    pub fn principal_power(&self, x: &[S], k: u32) -> Vec<S> {
        assert!(k >= 1, "principal powers start at k = 1");
        let mut p = x.to_vec();
        for _ in 1..k {
            p = self.product(x, &p);
        }
        p
    }

    /// Matrix of the multiplication operator `L_x: y -> xy`.
    pub fn lx_matrix(&self, x: &[S]) -> LinOp<S> {
        let n = self.n();
        let mut h: LinOp<S> = LinOp::zeros(n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    let t = self.t(i, j, k);
                    if !t.is_zero() {
                        let v = h.get(k, j).clone() + t.clone() * xi.clone();
                        h.set(k, j, v);
                    }
                }
            }
        }
        match &self.gram_inv {
            None => h,
            Some(inv) => inv.compose(&h),
        }
    }

    /// Rank-one operator `a (x) b: y -> a Q(b, y)`.
    pub fn rank_one(&self, a: &[S], b: &[S]) -> LinOp<S> {
        if self.gram.is_identity() {
            LinOp::outer(a, b)
        } else {
            LinOp::outer(a, &self.gram.matrix().apply(b))
        }
    }

    /// Trace vector `b = sum_i e_i^2` over a `Q`-orthonormal basis,
    /// computed as the `Q`-gradient of the linear form `x -> trace L_x`.
    pub fn b_vector(&self) -> Result<&[S], AlgebraError> {
        if let Some(b) = self.b.get() {
            return Ok(b);
        }
        if !self.gram.is_positive_definite() {
            return Err(AlgebraError::NotPositiveDefinite);
        }
        let n = self.n();
        let mut grad = vec![S::zero(); n];
        for (i, gi) in grad.iter_mut().enumerate() {
            let mut s = S::zero();
            for k in 0..n {
                for m in 0..n {
                    let ginv_km = match &self.gram_inv {
                        None if k == m => S::one(),
                        None => continue,
                        Some(inv) => inv.get(k, m).clone(),
                    };
                    let t = self.t(i, m, k);
                    if !t.is_zero() && !ginv_km.is_zero() {
                        s = s + ginv_km * t.clone();
                    }
                }
            }
            *gi = s;
        }
        let b = self.raise(grad);
        Ok(self.b.get_or_init(|| b))
    }

    /// Algebra of `t u` on the same metric.
    pub fn scaled(&self, t: &S) -> Self {
        let u = CubicForm::new(self.u.poly().scale(t)).expect("scaling keeps the degree");
        Self::new(u, self.gram.clone()).expect("metric unchanged")
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> FSAlgebra<T> {
        FSAlgebra::new(self.u.map_coeffs(f), self.gram.map(f)).expect("metric stays invertible")
    }

    /// The coordinate vector `x = (x_1, .., x_n)` as linear polynomials.
    pub fn coordinate_vector(&self) -> Vec<HomoPoly<S>> {
        (0..self.n()).map(|i| HomoPoly::variable(self.n(), i)).collect()
    }

    /// Product of polynomial-valued vectors, coefficientwise in the algebra.
    pub fn product_poly(&self, x: &[HomoPoly<S>], y: &[HomoPoly<S>]) -> Vec<HomoPoly<S>> {
        let n = self.n();
        let mut w: Vec<HomoPoly<S>> = vec![HomoPoly::zero(n); n];
        for i in 0..n {
            for j in 0..n {
                if x[i].is_zero() || y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for (k, wk) in w.iter_mut().enumerate() {
                    let t = self.t(i, j, k);
                    if !t.is_zero() {
                        *wk = &*wk + &xy.scale(t);
                    }
                }
            }
        }
        match &self.gram_inv {
            None => w,
            Some(inv) => (0..n)
                .map(|k| {
                    (0..n).fold(HomoPoly::zero(n), |acc, m| &acc + &w[m].scale(inv.get(k, m)))
                })
                .collect(),
        }
    }

    /// `Q(x, y)` for polynomial-valued vectors.
    pub fn inner_poly_vec(&self, x: &[HomoPoly<S>], y: &[HomoPoly<S>]) -> HomoPoly<S> {
        let n = self.n();
        let mut out = HomoPoly::zero(n);
        for i in 0..n {
            for j in 0..n {
                let g = if self.gram.is_identity() {
                    if i != j {
                        continue;
                    }
                    S::one()
                } else {
                    self.gram.matrix().get(i, j).clone()
                };
                if g.is_zero() || x[i].is_zero() || y[j].is_zero() {
                    continue;
                }
                out = &out + &(&x[i] * &y[j]).scale(&g);
            }
        }
        out
    }

    /// Products `e_i e_j`, the metric, and `b`.
    pub fn multiplication_table(&self) -> MultiplicationTable {
        let n = self.n();
        let basis: Vec<Vec<S>> = (0..n).map(|i| crate::scalar::unit_vector(n, i)).collect();
        let json_vec = |v: &[S]| v.iter().map(Scalar::to_json).collect::<Vec<_>>();
        let products = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| json_vec(&self.product(&basis[i], &basis[j])))
                    .collect()
            })
            .collect();
        MultiplicationTable {
            schema_version: MULTIPLICATION_TABLE_SCHEMA.to_string(),
            n,
            u: self.u.poly().to_string(),
            gram: self.gram.matrix().rows().iter().map(|r| json_vec(r)).collect(),
            products,
            b: self.b_vector().ok().map(json_vec),
        }
    }
}

impl FSAlgebra<Rational> {
    pub fn to_f64(&self) -> FSAlgebra<f64> {
        self.map(|v| v.to_f64())
    }
}

pub const MULTIPLICATION_TABLE_SCHEMA: &str = "cubalg.multiplication-table/1";

/// JSON dump of an algebra. `products[i][j]` is `e_i e_j`.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplicationTable {
    pub schema_version: String,
    pub n: usize,
    pub u: String,
    pub gram: Vec<Vec<serde_json::Value>>,
    pub products: Vec<Vec<Vec<serde_json::Value>>>,
    /// Absent when the metric is not positive definite.
    pub b: Option<Vec<serde_json::Value>>,
}
