//! Local maximization of a homogeneous polynomial on the Euclidean unit
//! sphere: projected gradient ascent, then Newton on the Lagrange system
//! `Df(y) = lambda y, |y| = 1`.

use nalgebra::{DMatrix, DVector};

use crate::poly::HomoPoly;
use crate::scalar::norm_f64;

#[derive(Clone, Copy, Debug)]
pub struct AscentConfig {
    pub max_iters: usize,
    /// Stop ascending once the tangential gradient is below this.
    pub grad_tol: f64,
    pub newton_iters: usize,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tol: 1e-10,
            newton_iters: 30,
        }
    }
}

/// A critical point of `f` restricted to the unit sphere.
#[derive(Clone, Debug)]
pub struct SpherePoint {
    pub y: Vec<f64>,
    pub value: f64,
    /// Lagrange multiplier `<y, Df(y)>`.
    pub lambda: f64,
    /// Norm of `Df(y) - lambda y`.
    pub tangential_grad: f64,
    pub iterations: usize,
}

/// Polynomial with cached first and second derivatives.
pub struct SpherePoly {
    f: HomoPoly<f64>,
    grad: Vec<HomoPoly<f64>>,
    hess: Vec<Vec<HomoPoly<f64>>>,
}

impl SpherePoly {
    pub fn new(f: HomoPoly<f64>) -> Self {
        let grad = f.gradient();
        let hess = grad.iter().map(|g| g.gradient()).collect();
        Self { f, grad, hess }
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        self.f.eval(y)
    }

    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval(y)).collect()
    }

    pub fn hessian(&self, y: &[f64]) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.hess[i][j].eval(y))
    }

    fn tangential(&self, y: &[f64]) -> (Vec<f64>, f64) {
        let g = self.gradient(y);
        let lambda: f64 = g.iter().zip(y).map(|(a, b)| a * b).sum();
        let t = g.iter().zip(y).map(|(a, b)| a - lambda * b).collect();
        (t, lambda)
    }

    /// Ascends from `start` (normalized internally) to a local maximum.
    pub fn maximize(&self, start: &[f64], cfg: &AscentConfig) -> SpherePoint {
        let mut y = normalized(start);
        let mut value = self.value(&y);
        let mut step = 1.0;
        let mut iterations = 0;
        let scale = 1.0 + value.abs();
        while iterations < cfg.max_iters {
            let (t, _) = self.tangential(&y);
            let gnorm = norm_f64(&t);
            if gnorm <= cfg.grad_tol * scale {
                break;
            }
            iterations += 1;
            let mut accepted = false;
            for _ in 0..60 {
                let cand: Vec<f64> =
                    normalized(&y.iter().zip(&t).map(|(a, b)| a + step * b).collect::<Vec<_>>());
                let cv = self.value(&cand);
                if cv >= value + 1e-4 * step * gnorm * gnorm {
                    y = cand;
                    value = cv;
                    step *= 2.0;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let y = self.polish(y, cfg.newton_iters);
        let (t, lambda) = self.tangential(&y);
        SpherePoint {
            value: self.value(&y),
            lambda,
            tangential_grad: norm_f64(&t),
            y,
            iterations,
        }
    }

    /// Newton on `F(y, mu) = (Df(y) - mu y, (1 - |y|^2) / 2)`. Keeps the
    /// input when Newton does not reduce the residual.
    pub fn polish(&self, y0: Vec<f64>, iters: usize) -> Vec<f64> {
        let n = self.n();
        let residual = |y: &[f64], mu: f64| -> f64 {
            let g = self.gradient(y);
            let r: f64 = g
                .iter()
                .zip(y)
                .map(|(a, b)| (a - mu * b).powi(2))
                .sum::<f64>()
                + (0.5 * (1.0 - y.iter().map(|v| v * v).sum::<f64>())).powi(2);
            r.sqrt()
        };
        let mut y = y0.clone();
        let mut mu: f64 = self.gradient(&y).iter().zip(&y).map(|(a, b)| a * b).sum();
        let mut best = (residual(&y, mu), y.clone());
        for _ in 0..iters {
            let g = self.gradient(&y);
            let h = self.hessian(&y);
            let mut j = DMatrix::zeros(n + 1, n + 1);
            let mut f = DVector::zeros(n + 1);
            for r in 0..n {
                for c in 0..n {
                    j[(r, c)] = h[(r, c)] - if r == c { mu } else { 0.0 };
                }
                j[(r, n)] = -y[r];
                j[(n, r)] = -y[r];
                f[r] = g[r] - mu * y[r];
            }
            f[n] = 0.5 * (1.0 - y.iter().map(|v| v * v).sum::<f64>());
            let Some(delta) = j.lu().solve(&f) else {
                break;
            };
            for r in 0..n {
                y[r] -= delta[r];
            }
            mu -= delta[n];
            let res = residual(&y, mu);
            if res < best.0 {
                best = (res, y.clone());
            }
            if res <= 1e-15 * (1.0 + mu.abs()) {
                break;
            }
        }
        let out = normalized(&best.1);
        // A Newton jump to a different critical point is rejected.
        let drift: f64 = out.iter().zip(&y0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if drift > 1e-3 {
            normalized(&y0)
        } else {
            out
        }
    }
}

pub fn normalized(v: &[f64]) -> Vec<f64> {
    let n = norm_f64(v);
    if n == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn poly(text: &str, n: usize) -> HomoPoly<f64> {
        HomoPoly::<Rational>::parse(text, n).unwrap().to_f64()
    }

    #[test]
    fn maximizes_linear_cube_at_axis() {
        let f = SpherePoly::new(poly("x1^3", 2));
        let p = f.maximize(&[0.3, 0.8], &AscentConfig::default());
        assert!((p.y[0] - 1.0).abs() < 1e-12 && p.y[1].abs() < 1e-10);
        assert!((p.value - 1.0).abs() < 1e-12);
        assert!((p.lambda - 3.0).abs() < 1e-10);
    }

    #[test]
    fn harmonic_cubic_maxima_are_cube_roots_of_unity() {
        let f = SpherePoly::new(poly("x1^3 - 3*x1*x2^2", 2));
        for start in [[1.0, 0.1], [-0.5, 0.9], [-0.5, -0.9]] {
            let p = f.maximize(&start, &AscentConfig::default());
            assert!((p.value - 1.0).abs() < 1e-12, "value {}", p.value);
            assert!(p.tangential_grad < 1e-12);
        }
    }
}
