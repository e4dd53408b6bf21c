//! Small dense square matrices over a [`Scalar`].

use nalgebra::DMatrix;

use crate::scalar::{dot, Scalar};

/// Square matrix acting on column vectors. Row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct LinOp<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> LinOp<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[Vec<S>]) -> Self {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), n, "matrix must be square");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Rank-one operator `y -> a * <b, y>` with the plain dot product.
    pub fn outer(a: &[S], b: &[S]) -> Self {
        let n = a.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, a[i].clone() * b[j].clone());
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.n, "dimension mismatch");
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = m.get(i, j).clone() + a.clone() * other.get(k, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.n), |acc, _| acc.compose(self))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, t: &S) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| t.clone() * v.clone()).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> S {
        (0..self.n).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LinOp<T> {
        LinOp {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.n, self.n, self.data.iter().map(Scalar::to_f64))
    }

    /// Largest singular value, computed in `f64`.
    pub fn spectral_norm(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let m = self.to_nalgebra();
        m.singular_values().iter().cloned().fold(0.0, f64::max)
    }

    /// Gauss-Jordan inverse. `None` when singular (exactly singular in
    /// rational mode; pivot below `1e-14 * scale` in float mode).
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self
            .data
            .iter()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = pivot_row(&a, col, scale)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a.get(col, col).clone();
            for j in 0..n {
                a.set(col, j, a.get(col, j).clone() / p.clone());
                inv.set(col, j, inv.get(col, j).clone() / p.clone());
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a.get(i, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = a.get(i, j).clone() - f.clone() * a.get(col, j).clone();
                    a.set(i, j, v);
                    let w = inv.get(i, j).clone() - f.clone() * inv.get(col, j).clone();
                    inv.set(i, j, w);
                }
            }
        }
        Some(inv)
    }

    /// Determinant by elimination.
    pub fn determinant(&self) -> S {
        let n = self.n;
        let mut a = self.clone();
        let mut det = S::one();
        let scale = self
            .data
            .iter()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for col in 0..n {
            let Some(pivot) = pivot_row(&a, col, scale) else {
                return S::zero();
            };
            if pivot != col {
                a.swap_rows(col, pivot);
                det = -det;
            }
            let p = a.get(col, col).clone();
            det = det * p.clone();
            for i in col + 1..n {
                let f = a.get(i, col).clone() / p.clone();
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a.get(i, j).clone() - f.clone() * a.get(col, j).clone();
                    a.set(i, j, v);
                }
            }
        }
        det
    }

    /// Leading principal minors `det(A[..k, ..k])` for `k = 1..=n`.
    pub fn leading_minors(&self) -> Vec<S> {
        (1..=self.n)
            .map(|k| {
                let rows = (0..k).map(|i| self.row(i)[..k].to_vec()).collect();
                LinOp::from_rows(rows).determinant()
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.n {
            self.data.swap(a * self.n + j, b * self.n + j);
        }
    }
}

fn pivot_row<S: Scalar>(a: &LinOp<S>, col: usize, scale: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in col..a.n {
        let v = a.get(i, col);
        if v.is_zero() {
            continue;
        }
        let mag = v.to_f64().abs();
        if !S::EXACT && mag <= 1e-14 * scale {
            continue;
        }
        if best.is_none_or(|(_, m)| mag > m) {
            best = Some((i, mag));
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn exact_inverse_round_trips() {
        let m: LinOp<Rational> = LinOp::from_rows(vec![
            vec![rat(2, 1), rat(1, 1), rat(0, 1)],
            vec![rat(1, 1), rat(3, 1), rat(1, 1)],
            vec![rat(0, 1), rat(1, 1), rat(4, 1)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.compose(&inv), LinOp::identity(3));
        assert_eq!(m.determinant(), rat(18, 1));
        assert_eq!(m.leading_minors(), vec![rat(2, 1), rat(5, 1), rat(18, 1)]);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m: LinOp<Rational> =
            LinOp::from_rows(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]]);
        assert!(m.inverse().is_none());
        assert_eq!(m.determinant(), rat(0, 1));
        let f = m.map(|v| v.to_f64());
        assert!(f.inverse().is_none());
    }

    #[test]
    fn outer_product_acts_as_rank_one() {
        let a = vec![1.0, 2.0];
        let b = vec![3.0, -1.0];
        let m = LinOp::outer(&a, &b);
        assert_eq!(m.apply(&[1.0, 1.0]), vec![2.0, 4.0]);
        assert!((m.spectral_norm() - (5.0f64).sqrt() * (10.0f64).sqrt()).abs() < 1e-12);
    }
}
