//! The residual of `Delta_p` (or `Delta_inf`) on the space of cubics, as a
//! cubic map from coefficient vectors to quintic coefficient vectors, and
//! its squared norm `R(a) = r(a)^T W r(a)`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};

use crate::error::AlgebraError;
use crate::ops::PParam;
use crate::poly::{exponents, Exponent, HomoPoly, InnerScheme};
use crate::scalar::{Rational, Scalar};
use crate::search::moments::sphere_moment;

/// One coefficient of the cubic map: `r[row] += coef * a_i a_j a_k`.
#[derive(Clone, Copy, Debug)]
struct Term {
    row: usize,
    i: usize,
    j: usize,
    k: usize,
    coef: f64,
}

pub struct ResidualModel {
    n: usize,
    p: PParam,
    scheme: InnerScheme,
    cubics: Vec<Exponent>,
    quintics: Vec<Exponent>,
    terms: Vec<Term>,
    /// Sphere-moment Gram matrix; `None` means the identity.
    weight: Option<DMatrix<f64>>,
}

type Tensor = BTreeMap<[usize; 3], HomoPoly<Rational>>;

/// Exact tensors `B(i,j,k) = <Dm_i, Dm_j> Delta m_k` and
/// `C(i,j,k) = <Dm_i, D<Dm_j, Dm_k>>`, summed over orderings into the
/// coefficient of `a_i a_j a_k` with `i <= j <= k`.
fn exact_tensors(
    n: usize,
    cubics: &[Exponent],
) -> (Tensor, Tensor) {
    let m: Vec<HomoPoly<Rational>> = cubics
        .iter()
        .map(|e| HomoPoly::monomial(e.clone(), Rational::from_i64(1)))
        .collect();
    let grads: Vec<Vec<HomoPoly<Rational>>> = m.iter().map(|p| p.gradient()).collect();
    let laps: Vec<HomoPoly<Rational>> = m.iter().map(crate::ops::laplacian).collect();
    let big_n = m.len();
    let mut gram = vec![vec![HomoPoly::zero(n); big_n]; big_n];
    let mut dgram = vec![vec![Vec::new(); big_n]; big_n];
    for j in 0..big_n {
        for k in j..big_n {
            let g = grads[j]
                .iter()
                .zip(&grads[k])
                .fold(HomoPoly::zero(n), |acc, (a, b)| &acc + &(a * b));
            dgram[j][k] = g.gradient();
            dgram[k][j] = dgram[j][k].clone();
            gram[k][j] = g.clone();
            gram[j][k] = g;
        }
    }
    let mut b_map: BTreeMap<[usize; 3], HomoPoly<Rational>> = BTreeMap::new();
    let mut c_map: BTreeMap<[usize; 3], HomoPoly<Rational>> = BTreeMap::new();
    for i in 0..big_n {
        for j in 0..big_n {
            for k in 0..big_n {
                let mut key = [i, j, k];
                key.sort_unstable();
                let b = &gram[i][j] * &laps[k];
                let c = grads[i]
                    .iter()
                    .zip(&dgram[j][k])
                    .fold(HomoPoly::zero(n), |acc, (a, d)| &acc + &(a * d));
                let eb = b_map.entry(key).or_insert_with(|| HomoPoly::zero(n));
                *eb = &*eb + &b;
                let ec = c_map.entry(key).or_insert_with(|| HomoPoly::zero(n));
                *ec = &*ec + &c;
            }
        }
    }
    (b_map, c_map)
}

impl ResidualModel {
    /// Builds the model for `Delta_p` (finite `p`) or `Delta_inf`.
    pub fn new(n: usize, p: &PParam, scheme: InnerScheme) -> Result<Self, AlgebraError> {
        if n == 0 {
            return Err(crate::error::PolyError::ZeroDimension.into());
        }
        let cubics = exponents(n, 3);
        let quintics = exponents(n, 5);
        let row_of: HashMap<&Exponent, usize> =
            quintics.iter().enumerate().map(|(r, e)| (e, r)).collect();
        let (b_map, c_map) = exact_tensors(n, &cubics);
        let shift = match p {
            PParam::Finite(_) => Some(p.half_shift()?),
            PParam::Infinity => None,
        };
        let mut terms = Vec::new();
        for (key, c) in &c_map {
            let total = match &shift {
                Some(s) => &b_map[key] + &c.scale(s),
                None => c.clone(),
            };
            for (e, v) in total.terms() {
                terms.push(Term {
                    row: row_of[e],
                    i: key[0],
                    j: key[1],
                    k: key[2],
                    coef: v.to_f64(),
                });
            }
        }
        let weight = match scheme {
            InnerScheme::CoefficientL2 => None,
            InnerScheme::SphereL2 => {
                let m = quintics.len();
                Some(DMatrix::from_fn(m, m, |r, c| {
                    let sum: Exponent =
                        quintics[r].iter().zip(&quintics[c]).map(|(x, y)| x + y).collect();
                    sphere_moment(&sum, n).to_f64()
                }))
            }
        };
        Ok(Self {
            n,
            p: p.clone(),
            scheme,
            cubics,
            quintics,
            terms,
            weight,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &PParam {
        &self.p
    }

    pub fn scheme(&self) -> InnerScheme {
        self.scheme
    }

    /// Dimension of the coefficient space.
    pub fn dim(&self) -> usize {
        self.cubics.len()
    }

    /// Cubic monomials indexing the coefficient vector.
    pub fn monomials(&self) -> &[Exponent] {
        &self.cubics
    }

    pub fn cubic(&self, a: &[f64]) -> HomoPoly<f64> {
        HomoPoly::from_terms(self.n, self.cubics.iter().cloned().zip(a.iter().copied()))
            .expect("cubic monomials")
    }

    /// Coefficient vector of a cubic in this model's basis.
    pub fn coefficients(&self, u: &HomoPoly<f64>) -> Vec<f64> {
        self.cubics.iter().map(|e| u.coeff(e)).collect()
    }

    /// Quintic coefficients of the residual of `u_a`.
    pub fn residual(&self, a: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.quintics.len()];
        for t in &self.terms {
            r[t.row] += t.coef * a[t.i] * a[t.j] * a[t.k];
        }
        r
    }

    pub fn residual_poly(&self, a: &[f64]) -> HomoPoly<f64> {
        HomoPoly::from_terms(self.n, self.quintics.iter().cloned().zip(self.residual(a)))
            .expect("quintic monomials")
    }

    fn weighted(&self, r: &[f64]) -> Vec<f64> {
        match &self.weight {
            None => r.to_vec(),
            Some(w) => (w * DVector::from_column_slice(r)).iter().copied().collect(),
        }
    }

    pub fn value(&self, a: &[f64]) -> f64 {
        let r = self.residual(a);
        let w = self.weighted(&r);
        r.iter().zip(&w).map(|(x, y)| x * y).sum()
    }

    fn jacobian(&self, a: &[f64]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.quintics.len(), self.dim());
        for t in &self.terms {
            j[(t.row, t.i)] += t.coef * a[t.j] * a[t.k];
            j[(t.row, t.j)] += t.coef * a[t.i] * a[t.k];
            j[(t.row, t.k)] += t.coef * a[t.i] * a[t.j];
        }
        j
    }

    /// `R(a)` and its Euclidean gradient.
    pub fn value_grad(&self, a: &[f64]) -> (f64, Vec<f64>) {
        let r = self.residual(a);
        let w = self.weighted(&r);
        let value = r.iter().zip(&w).map(|(x, y)| x * y).sum();
        let g = self.jacobian(a).transpose() * DVector::from_vec(w) * 2.0;
        (value, g.iter().copied().collect())
    }

    /// Euclidean Hessian of `R`.
    pub fn hessian(&self, a: &[f64]) -> DMatrix<f64> {
        let r = self.residual(a);
        let w = self.weighted(&r);
        let j = self.jacobian(a);
        let mut h = match &self.weight {
            None => j.transpose() * &j,
            Some(wm) => j.transpose() * wm * &j,
        } * 2.0;
        for t in &self.terms {
            let c = 2.0 * w[t.row] * t.coef;
            if c == 0.0 {
                continue;
            }
            let (i, j, k) = (t.i, t.j, t.k);
            for (x, y, z) in [(i, j, k), (j, i, k), (i, k, j), (k, i, j), (j, k, i), (k, j, i)] {
                h[(x, y)] += c * a[z];
            }
        }
        h
    }
}
