//! Constructive idempotent search: maximize `<x^2, x>` on the unit sphere of
//! the metric, rescale the maximizer `y` (which satisfies `y^2 = k y`) to
//! `c = y / k`, then refine `c^2 = c` with Newton's method.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::AlgebraError;
use crate::fsalg::FSAlgebra;
use crate::linalg::LinOp;
use crate::poly::HomoPoly;
use crate::search::sphere::{AscentConfig, SpherePoly};
use crate::search::{random_unit, restart_rng};

#[derive(Clone, Debug, Serialize)]
pub struct SphereMax {
    /// Unit vector in the metric.
    pub y: Vec<f64>,
    /// `k` with `y^2 = k y`, equal to `<y^2, y> = 6 u(y)`.
    pub k: f64,
    /// Norm of `y^2 - k y`.
    pub lagrange_residual: f64,
}

/// Maps the metric's unit sphere onto the Euclidean one: `x = M z` with
/// `M = L^{-T}`, `G = L L^T`.
fn whitening(a: &FSAlgebra<f64>) -> Result<Option<LinOp<f64>>, AlgebraError> {
    if a.is_euclidean() {
        return Ok(None);
    }
    let g = a.metric().matrix().to_nalgebra();
    let chol = g.cholesky().ok_or(AlgebraError::NotPositiveDefinite)?;
    let l = chol.l();
    let linv = l
        .try_inverse()
        .ok_or(AlgebraError::NotPositiveDefinite)?;
    let m = linv.transpose();
    let n = a.n();
    Ok(Some(LinOp::from_rows(
        (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect(),
    )))
}

/// Cubic to maximize in whitened coordinates, with the back-map.
fn whitened_cubic(a: &FSAlgebra<f64>) -> Result<(SpherePoly, Option<LinOp<f64>>), AlgebraError> {
    let m = whitening(a)?;
    let u: &HomoPoly<f64> = a.cubic().poly();
    let v = match &m {
        None => u.clone(),
        Some(m) => u.linear_substitute(m),
    };
    Ok((SpherePoly::new(v), m))
}

fn q_norm(a: &FSAlgebra<f64>, x: &[f64]) -> f64 {
    a.norm_sq(x).max(0.0).sqrt()
}

/// Best local maximum of `<x^2, x>` over the seeds.
pub fn maximize_cubic_on_sphere(
    a: &FSAlgebra<f64>,
    seeds: &[Vec<f64>],
    cfg: &AscentConfig,
) -> Result<SphereMax, AlgebraError> {
    if a.is_zero_algebra() {
        return Err(AlgebraError::ZeroAlgebra);
    }
    if !a.metric().is_positive_definite() {
        return Err(AlgebraError::NotPositiveDefinite);
    }
    let (f, m) = whitened_cubic(a)?;
    let best = seeds
        .iter()
        .map(|s| f.maximize(s, cfg))
        .max_by(|p, q| p.value.partial_cmp(&q.value).unwrap_or(Ordering::Equal))
        .ok_or(AlgebraError::ZeroAlgebra)?;
    let coeff_scale = a
        .cubic()
        .poly()
        .terms()
        .map(|(_, c)| c.abs())
        .fold(0.0, f64::max);
    if best.value <= 1e-14 * coeff_scale {
        return Err(AlgebraError::ZeroAlgebra);
    }
    let y = match &m {
        None => best.y.clone(),
        Some(m) => m.apply(&best.y),
    };
    Ok(lagrange_point(a, y))
}

fn lagrange_point(a: &FSAlgebra<f64>, y: Vec<f64>) -> SphereMax {
    let y2 = a.square(&y);
    let k = a.inner(&y2, &y);
    let r: Vec<f64> = y2.iter().zip(&y).map(|(p, q)| p - k * q).collect();
    SphereMax {
        lagrange_residual: q_norm(a, &r),
        y,
        k,
    }
}

#[derive(Clone, Debug)]
pub struct IdempotentConfig {
    pub restarts: usize,
    pub seed: u64,
    pub ascent: AscentConfig,
    pub max_newton: usize,
    /// Newton stops once `|c^2 - c| <= newton_tol * max(1, |c|)`.
    pub newton_tol: f64,
    /// Idempotents with a final residual above this are discarded.
    pub accept_tol: f64,
    pub dedup_radius: f64,
}

impl Default for IdempotentConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            ascent: AscentConfig::default(),
            max_newton: 50,
            newton_tol: 1e-15,
            accept_tol: 1e-10,
            dedup_radius: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Idempotent {
    pub c: Vec<f64>,
    /// `|c^2 - c|` in the metric.
    pub residual: f64,
    /// Restart index that produced it.
    pub source: usize,
    pub newton_iters: usize,
    /// `|c^2 - c|` before each Newton step and after the last one.
    pub history: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdempotentSearch {
    pub idempotents: Vec<Idempotent>,
    pub zero_algebra: bool,
    /// Nonzero algebra but nothing found: a nonzero idempotent always exists
    /// for a positive definite metric, so this flags the optimizer.
    pub optimizer_failure: bool,
    pub restarts: usize,
}

/// Newton iteration on `F(c) = c^2 - c`, Jacobian `2 L_c - I`.
pub fn refine_idempotent(
    a: &FSAlgebra<f64>,
    c0: &[f64],
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = a.n();
    let mut c = c0.to_vec();
    let mut history = Vec::new();
    for _ in 0..=max_iter {
        let f: Vec<f64> = a.square(&c).iter().zip(&c).map(|(p, q)| p - q).collect();
        let r = q_norm(a, &f);
        history.push(r);
        let scale = q_norm(a, &c).max(1.0);
        if r <= tol * scale || history.len() > max_iter {
            break;
        }
        if history.len() >= 3 && r >= history[history.len() - 2] && r < 1e-12 * scale {
            break;
        }
        let l = a.lx_matrix(&c).to_nalgebra();
        let j = l * 2.0 - DMatrix::identity(n, n);
        let Some(delta) = j.lu().solve(&DVector::from_vec(f)) else {
            break;
        };
        for (ci, d) in c.iter_mut().zip(delta.iter()) {
            *ci -= d;
        }
    }
    (c, history)
}

/// Multistart idempotent search. Results are deduplicated and sorted
/// lexicographically on coordinates rounded to `1e-8`.
pub fn find_idempotents(a: &FSAlgebra<f64>, cfg: &IdempotentConfig) -> IdempotentSearch {
    let mut out = IdempotentSearch {
        idempotents: Vec::new(),
        zero_algebra: a.is_zero_algebra(),
        optimizer_failure: false,
        restarts: cfg.restarts,
    };
    if out.zero_algebra {
        return out;
    }
    let Ok((f, m)) = whitened_cubic(a) else {
        out.optimizer_failure = true;
        return out;
    };
    let n = a.n();
    for index in 0..cfg.restarts {
        let mut rng = restart_rng(cfg.seed, index as u64);
        let start = random_unit(&mut rng, n);
        let point = f.maximize(&start, &cfg.ascent);
        let y = match &m {
            None => point.y.clone(),
            Some(m) => m.apply(&point.y),
        };
        let sm = lagrange_point(a, y);
        if sm.k <= 1e-12 {
            continue;
        }
        let c0: Vec<f64> = sm.y.iter().map(|v| v / sm.k).collect();
        let (c, history) = refine_idempotent(a, &c0, cfg.max_newton, cfg.newton_tol);
        let residual = *history.last().unwrap_or(&f64::INFINITY);
        if !(residual <= cfg.accept_tol * q_norm(a, &c).max(1.0)) || q_norm(a, &c) < 1e-12 {
            continue;
        }
        let duplicate = out.idempotents.iter().any(|e| {
            let d: Vec<f64> = e.c.iter().zip(&c).map(|(p, q)| p - q).collect();
            q_norm(a, &d) < cfg.dedup_radius
        });
        if duplicate {
            continue;
        }
        out.idempotents.push(Idempotent {
            c,
            residual,
            source: index,
            newton_iters: history.len() - 1,
            history,
        });
    }
    out.idempotents.sort_by_key(|p| sort_key(&p.c));
    out.optimizer_failure = out.idempotents.is_empty();
    out
}

fn sort_key(c: &[f64]) -> Vec<i64> {
    c.iter().map(|v| (v * 1e8).round() as i64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::CubicForm;
    use crate::scalar::Rational;

    fn alg(text: &str, n: usize) -> FSAlgebra<f64> {
        FSAlgebra::euclidean(
            CubicForm::new(HomoPoly::<Rational>::parse(text, n).unwrap().to_f64()).unwrap(),
        )
    }

    #[test]
    fn maximize_examples() {
        let a = alg("x1^3", 2);
        let seeds = vec![vec![0.2, 0.9], vec![-0.7, 0.1]];
        let m = maximize_cubic_on_sphere(&a, &seeds, &AscentConfig::default()).unwrap();
        assert!((m.y[0] - 1.0).abs() < 1e-12 && m.y[1].abs() < 1e-10);
        assert!((m.k - 6.0).abs() < 1e-10);
        let z = alg("0", 2);
        assert_eq!(
            maximize_cubic_on_sphere(&z, &seeds, &AscentConfig::default()).unwrap_err(),
            AlgebraError::ZeroAlgebra
        );
        let h = alg("x1^3 - 3*x1*x2^2", 2);
        let m = maximize_cubic_on_sphere(&h, &seeds, &AscentConfig::default()).unwrap();
        assert!((m.k - 6.0).abs() < 1e-10);
        assert!(m.lagrange_residual < 1e-10);
    }

    #[test]
    fn finds_linear_cube_idempotent() {
        let s = find_idempotents(&alg("x1^3", 2), &IdempotentConfig::default());
        assert_eq!(s.idempotents.len(), 1);
        let c = &s.idempotents[0].c;
        assert!((c[0] - 1.0 / 6.0).abs() < 1e-12 && c[1].abs() < 1e-12);
        assert!(!s.optimizer_failure);
    }

    #[test]
    fn zero_algebra_gives_empty_flagged_result() {
        let s = find_idempotents(&alg("0", 3), &IdempotentConfig::default());
        assert!(s.zero_algebra && s.idempotents.is_empty() && !s.optimizer_failure);
    }
}
