//! Minimization of `R` over the unit sphere of coefficient space: projected
//! gradient descent with Armijo backtracking, then a Riemannian trust-region
//! polish with an exact subproblem solve.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::scalar::norm_f64;
use crate::search::residual::ResidualModel;
use crate::search::sphere::normalized;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OptimizerConfig {
    pub descent_iters: usize,
    pub trust_region_iters: usize,
    /// Convergence when the tangential gradient is below
    /// `grad_tol * (1 + R)`.
    pub grad_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            descent_iters: 300,
            trust_region_iters: 100,
            grad_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalMin {
    pub a: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn tangential(a: &[f64], g: &[f64]) -> Vec<f64> {
    let radial: f64 = a.iter().zip(g).map(|(x, y)| x * y).sum();
    g.iter().zip(a).map(|(gi, ai)| gi - radial * ai).collect()
}

/// Orthonormal basis of the tangent space at the unit vector `a`, as the
/// columns of an `N x (N-1)` matrix (Householder reflection of `e_1` to `a`).
fn tangent_basis(a: &[f64]) -> DMatrix<f64> {
    let n = a.len();
    let sign = if a[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = DVector::from_column_slice(a);
    v[0] += sign;
    let vv = v.dot(&v);
    let h = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / vv);
    h.columns(1, n - 1).into_owned()
}

/// Minimizer of `g^T s + s^T H s / 2` over `|s| <= delta`.
fn trust_region_step(h: &DMatrix<f64>, g: &DVector<f64>, delta: f64) -> DVector<f64> {
    let eig = h.clone().symmetric_eigen();
    let q = &eig.eigenvectors;
    let lam = &eig.eigenvalues;
    let gt = q.transpose() * g;
    let step = |mu: f64| -> DVector<f64> {
        let coeffs = DVector::from_fn(lam.len(), |i, _| -gt[i] / (lam[i] + mu));
        q * coeffs
    };
    let (imin, lmin) = lam
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &l)| if l < acc.1 { (i, l) } else { acc });
    if lmin > 0.0 {
        let s = step(0.0);
        if s.norm() <= delta {
            return s;
        }
    }
    let lo0 = (-lmin).max(0.0);
    let eps = 1e-12 * (1.0 + lam.amax());
    let mut lo = lo0 + eps;
    if step(lo).norm() < delta {
        // Hard case: move to the boundary along the lowest eigenvector.
        let s = step(lo);
        let rest = (delta * delta - s.norm_squared()).max(0.0).sqrt();
        return s + q.column(imin) * rest;
    }
    let mut hi = lo.max(1.0);
    while step(hi).norm() > delta {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if step(mid).norm() > delta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    step(hi)
}

/// Local minimum of `R` on the unit sphere reached from `start`.
pub fn minimize_on_sphere(
    model: &ResidualModel,
    start: &[f64],
    cfg: &OptimizerConfig,
) -> LocalMin {
    let mut a = normalized(start);
    let (mut f, g) = model.value_grad(&a);
    let mut gt = tangential(&a, &g);
    let mut iterations = 0;
    let done = |f: f64, gt: &[f64]| norm_f64(gt) <= cfg.grad_tol * (1.0 + f);

    // angle of the trial step
    let mut theta: f64 = 0.1;
    while iterations < cfg.descent_iters && !done(f, &gt) {
        iterations += 1;
        let gnorm = norm_f64(&gt);
        let mut accepted = false;
        while theta > 1e-14 {
            let t = theta / gnorm;
            let cand = normalized(&a.iter().zip(&gt).map(|(x, d)| x - t * d).collect::<Vec<_>>());
            let fc = model.value(&cand);
            if fc <= f - 1e-4 * t * gnorm * gnorm {
                a = cand;
                theta = (theta * 2.0).min(1.0);
                accepted = true;
                break;
            }
            theta *= 0.5;
        }
        if !accepted {
            break;
        }
        let (fv, g) = model.value_grad(&a);
        f = fv;
        gt = tangential(&a, &g);
    }

    let n = a.len();
    let mut delta: f64 = 0.1;
    let mut tr_iters = 0;
    while n > 1 && tr_iters < cfg.trust_region_iters && !done(f, &gt) {
        tr_iters += 1;
        let (_, g) = model.value_grad(&a);
        let radial: f64 = a.iter().zip(&g).map(|(x, y)| x * y).sum();
        let u = tangent_basis(&a);
        let hess = model.hessian(&a);
        let h = u.transpose() * hess * &u - DMatrix::identity(n - 1, n - 1) * radial;
        let h = (&h + h.transpose()) * 0.5;
        let gr = u.transpose() * DVector::from_vec(g);
        let s = trust_region_step(&h, &gr, delta);
        let predicted = -(gr.dot(&s) + 0.5 * s.dot(&(&h * &s)));
        let ambient = &u * &s;
        let cand = normalized(
            &a.iter()
                .zip(ambient.iter())
                .map(|(x, d)| x + d)
                .collect::<Vec<_>>(),
        );
        let fc = model.value(&cand);
        let noise = 1e-14 * f.abs();
        let rho = (f - fc + noise) / (predicted + noise);
        if !(predicted > 0.0) && !(fc < f) {
            break;
        }
        if rho < 0.25 {
            delta *= 0.25;
        } else if rho > 0.75 && s.norm() >= 0.99 * delta {
            delta = (2.0 * delta).min(1.0);
        }
        if rho > 0.1 {
            a = cand;
            let (fv, g) = model.value_grad(&a);
            f = fv;
            gt = tangential(&a, &g);
        }
        if delta < 1e-15 {
            break;
        }
    }
    let grad_norm = norm_f64(&gt);
    LocalMin {
        converged: done(f, &gt),
        a,
        value: f,
        grad_norm,
        iterations: iterations + tr_iters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::PParam;
    use crate::poly::InnerScheme;

    #[test]
    fn tangent_basis_is_orthonormal_and_tangent() {
        let a = normalized(&[0.3, -0.5, 0.1, 0.8]);
        let u = tangent_basis(&a);
        let gram = u.transpose() * &u;
        assert!((gram - DMatrix::identity(3, 3)).amax() < 1e-14);
        let av = DVector::from_vec(a.clone());
        assert!((u.transpose() * av).amax() < 1e-14);
    }

    #[test]
    fn trust_region_step_respects_radius() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -2.0]);
        let g = DVector::from_vec(vec![1.0, 0.5]);
        for delta in [0.1, 1.0, 10.0] {
            let s = trust_region_step(&h, &g, delta);
            assert!(s.norm() <= delta * (1.0 + 1e-9));
        }
        let h = DMatrix::identity(2, 2) * 4.0;
        let s = trust_region_step(&h, &g, 10.0);
        assert!((s + g / 4.0).norm() < 1e-14);
    }

    #[test]
    fn finds_harmonic_zero_at_p_two() {
        let model = ResidualModel::new(2, &PParam::from_int(2), InnerScheme::CoefficientL2).unwrap();
        let m = minimize_on_sphere(&model, &[0.9, 0.3, -2.0, 0.1], &OptimizerConfig::default());
        assert!(m.value < 1e-20, "value {}", m.value);
        assert!((norm_f64(&m.a) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stays_positive_at_p_three() {
        let model = ResidualModel::new(2, &PParam::from_int(3), InnerScheme::CoefficientL2).unwrap();
        let m = minimize_on_sphere(&model, &[0.2, 0.4, -0.1, 0.7], &OptimizerConfig::default());
        assert!(m.value > 1e-6);
        assert!(m.converged, "grad {}", m.grad_norm);
    }
}
