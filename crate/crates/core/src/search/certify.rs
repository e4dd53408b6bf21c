//! Nonexistence certificates: multistart minimization of `R(a)` over unit
//! coefficient vectors of cubics, a brute-force grid oracle for `n = 2`,
//! and a sweep that locates the exponents where `R` has zeros.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::SearchError;
use crate::ops::{certified_constant, laplacian, linear_cube_null_p, PParam};
use crate::poly::{HomoPoly, InnerScheme};
use crate::scalar::{norm_f64, Rational};
use crate::search::optimize::{minimize_on_sphere, LocalMin, OptimizerConfig};
use crate::search::residual::ResidualModel;
use crate::search::sphere::{normalized, AscentConfig, SpherePoly};
use crate::search::{random_unit, restart_rng};

pub const CERT_SCHEMA: &str = "cubalg.cert-report/1";
pub const SWEEP_SCHEMA: &str = "cubalg.exceptional-sweep/1";

/// `best_value` above this counts as a positive certificate.
pub const POSITIVITY_FLOOR: f64 = 1e-6;
/// `best_value` below this counts as an exact zero of `R`.
pub const ZERO_CEILING: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct CertConfig {
    pub restarts: usize,
    pub seed: u64,
    pub scheme: InnerScheme,
    pub optimizer: OptimizerConfig,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for CertConfig {
    fn default() -> Self {
        Self {
            restarts: 200,
            seed: 42,
            scheme: InnerScheme::CoefficientL2,
            optimizer: OptimizerConfig::default(),
            jobs: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RestartRecord {
    pub index: usize,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMethod {
    Multistart,
    Grid,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertReport {
    pub schema_version: &'static str,
    pub method: CertMethod,
    pub n: usize,
    pub p: PParam,
    /// `p-laplace` or `infinity-laplace`.
    pub residual: &'static str,
    pub norm_scheme: InnerScheme,
    pub restarts: usize,
    pub seed: Option<u64>,
    pub best_value: f64,
    pub best_restart: Option<usize>,
    /// Unit coefficient vector, indexed like `monomials`.
    pub best_coeffs: Vec<f64>,
    pub best_cubic: String,
    pub monomials: Vec<String>,
    /// Angle between the minimizer and the harmonic cubics.
    pub harmonic_angle: f64,
    /// Angle between the minimizer and the nearest cube of a linear form.
    pub linear_cube_angle: f64,
    /// Coefficient `s` of `<x^2,x^3>` in the verified quintic identity.
    pub certified_s: Option<String>,
    /// The halved alternative `(p-2)/2`.
    pub halved_s: Option<String>,
    pub positivity_floor: f64,
    pub certified_positive: bool,
    pub per_restart: Vec<RestartRecord>,
    pub grid_resolution: Option<usize>,
    pub config: Option<CertConfig>,
}

fn monomial_text(e: &[u32]) -> String {
    HomoPoly::<f64>::monomial(e.to_vec(), 1.0).to_string()
}

/// Angle between `a` and the kernel of the Laplacian on cubics.
pub fn harmonic_angle(model: &ResidualModel, a: &[f64]) -> f64 {
    let n = model.n();
    let cols: Vec<Vec<f64>> = model
        .monomials()
        .iter()
        .map(|e| {
            let l = laplacian(&HomoPoly::<f64>::monomial(e.clone(), 1.0));
            (0..n)
                .map(|i| {
                    let mut unit = vec![0; n];
                    unit[i] = 1;
                    l.coeff(&unit)
                })
                .collect()
        })
        .collect();
    let l = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
    let av = DVector::from_column_slice(a);
    let llt = &l * l.transpose();
    let Some(y) = llt.lu().solve(&(&l * &av)) else {
        return 0.0;
    };
    let off = l.transpose() * y;
    let on = &av - &off;
    off.norm().atan2(on.norm())
}

/// Angle between `a` and the cube `(y.x)^3` where `y` maximizes `|u_a|` on
/// the unit sphere.
pub fn linear_cube_angle(model: &ResidualModel, a: &[f64]) -> f64 {
    let n = model.n();
    let u = model.cubic(a);
    let neg = u.scale(&-1.0);
    let cfg = AscentConfig::default();
    let mut seeds: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rng = restart_rng(0, 0);
    seeds.extend((0..8).map(|_| random_unit(&mut rng, n)));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for f in [SpherePoly::new(u), SpherePoly::new(neg)] {
        for s in &seeds {
            let pt = f.maximize(s, &cfg);
            if best.as_ref().is_none_or(|(v, _)| pt.value > *v) {
                best = Some((pt.value, pt.y));
            }
        }
    }
    let Some((_, y)) = best else {
        return std::f64::consts::FRAC_PI_2;
    };
    let cube = HomoPoly::linear(&y).pow(3);
    let v = normalized(&model.coefficients(&cube));
    let along: f64 = a.iter().zip(&v).map(|(x, w)| x * w).sum();
    let rest: Vec<f64> = a.iter().zip(&v).map(|(x, w)| x - along * w).collect();
    norm_f64(&rest).atan2(along.abs())
}

fn constants(p: &PParam) -> (Option<String>, Option<String>) {
    match p {
        PParam::Infinity => (None, None),
        PParam::Finite(_) => (
            certified_constant(p).ok().flatten().map(|s| s.to_string()),
            p.half_shift().ok().map(|s| s.to_string()),
        ),
    }
}

fn report(
    model: &ResidualModel,
    method: CertMethod,
    best: &LocalMin,
    best_restart: Option<usize>,
    restarts: usize,
) -> CertReport {
    let (certified_s, halved_s) = constants(model.p());
    CertReport {
        schema_version: CERT_SCHEMA,
        method,
        n: model.n(),
        p: model.p().clone(),
        residual: if model.p().is_infinity() {
            "infinity-laplace"
        } else {
            "p-laplace"
        },
        norm_scheme: model.scheme(),
        restarts,
        seed: None,
        best_value: best.value,
        best_restart,
        best_coeffs: best.a.clone(),
        best_cubic: model.cubic(&best.a).to_string(),
        monomials: model.monomials().iter().map(|e| monomial_text(e)).collect(),
        harmonic_angle: harmonic_angle(model, &best.a),
        linear_cube_angle: linear_cube_angle(model, &best.a),
        certified_s,
        halved_s,
        positivity_floor: POSITIVITY_FLOOR,
        certified_positive: best.value > POSITIVITY_FLOOR,
        per_restart: Vec::new(),
        grid_resolution: None,
        config: None,
    }
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs.and_then(|j| rayon::ThreadPoolBuilder::new().num_threads(j).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// Multistart minimization of `R` over unit cubics in `n` variables.
pub fn certify_nonexistence(
    n: usize,
    p: &PParam,
    cfg: &CertConfig,
) -> Result<CertReport, SearchError> {
    if n < 2 {
        return Err(SearchError::InvalidDimension(n));
    }
    if cfg.restarts == 0 {
        return Err(SearchError::NoRestarts);
    }
    let model = ResidualModel::new(n, p, cfg.scheme)?;
    let dim = model.dim();
    let runs: Vec<LocalMin> = in_pool(cfg.jobs, || {
        (0..cfg.restarts)
            .into_par_iter()
            .map(|i| {
                let mut rng = restart_rng(cfg.seed, i as u64);
                let start = random_unit(&mut rng, dim);
                minimize_on_sphere(&model, &start, &cfg.optimizer)
            })
            .collect()
    });
    let (best_index, best) = runs
        .iter()
        .enumerate()
        .fold(None::<(usize, &LocalMin)>, |acc, (i, r)| match acc {
            Some((_, b)) if b.value <= r.value => acc,
            _ => Some((i, r)),
        })
        .expect("at least one restart");
    let mut out = report(&model, CertMethod::Multistart, best, Some(best_index), cfg.restarts);
    out.seed = Some(cfg.seed);
    out.per_restart = runs
        .iter()
        .enumerate()
        .map(|(index, r)| RestartRecord {
            index,
            value: r.value,
            grad_norm: r.grad_norm,
            iterations: r.iterations,
            converged: r.converged,
        })
        .collect();
    out.config = Some(cfg.clone());
    Ok(out)
}

/// Minimum of `R` over the projection onto the unit sphere of a uniform
/// grid on the boundary of the cube `[-1,1]^4` (`n = 2`). `R` is even, so
/// the faces with a coordinate fixed at `+1` suffice.
pub fn grid_certify_2d(
    p: &PParam,
    resolution: usize,
    scheme: InnerScheme,
) -> Result<CertReport, SearchError> {
    if resolution < 10 {
        return Err(SearchError::GridTooCoarse(resolution));
    }
    let model = ResidualModel::new(2, p, scheme)?;
    let axis: Vec<f64> = (0..resolution)
        .map(|i| -1.0 + 2.0 * i as f64 / (resolution - 1) as f64)
        .collect();
    let best = (0..4 * resolution)
        .into_par_iter()
        .map(|slab| {
            let (face, first) = (slab / resolution, slab % resolution);
            let mut best = (f64::INFINITY, Vec::new());
            for &y in &axis {
                for &z in &axis {
                    let free = [axis[first], y, z];
                    let mut a = Vec::with_capacity(4);
                    let mut it = free.iter();
                    for c in 0..4 {
                        a.push(if c == face { 1.0 } else { *it.next().unwrap() });
                    }
                    let a = normalized(&a);
                    let v = model.value(&a);
                    if v < best.0 {
                        best = (v, a);
                    }
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::INFINITY, Vec::new()), |acc, b| if b.0 < acc.0 { b } else { acc });
    let (_, g) = model.value_grad(&best.1);
    let radial: f64 = best.1.iter().zip(&g).map(|(x, y)| x * y).sum();
    let gt: Vec<f64> = g.iter().zip(&best.1).map(|(gi, ai)| gi - radial * ai).collect();
    let local = LocalMin {
        value: best.0,
        grad_norm: norm_f64(&gt),
        a: best.1,
        iterations: 0,
        converged: false,
    };
    let points = 4 * resolution.pow(3);
    let mut out = report(&model, CertMethod::Grid, &local, None, points);
    out.grid_resolution = Some(resolution);
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    pub p: PParam,
    pub best_value: f64,
    pub harmonic_angle: f64,
    pub linear_cube_angle: f64,
    pub exceptional: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub schema_version: &'static str,
    pub n: usize,
    pub zero_ceiling: f64,
    pub entries: Vec<SweepEntry>,
    /// Exponents in the sweep where `R` attains zero.
    pub empirical_exceptional: Vec<String>,
    /// Exceptional exponents claimed for the halved coefficient.
    pub candidate_exceptional: Vec<String>,
    /// `p = 2` and the exact zero of `p -> Delta_p x1^3`.
    pub oracle_exceptional: Vec<String>,
    pub config: CertConfig,
}

/// Runs the certifier at each `p` and reports where `R` vanishes.
pub fn exceptional_sweep(
    n: usize,
    ps: &[PParam],
    cfg: &CertConfig,
) -> Result<SweepReport, SearchError> {
    let mut entries = Vec::new();
    for p in ps {
        let r = certify_nonexistence(n, p, cfg)?;
        entries.push(SweepEntry {
            p: p.clone(),
            best_value: r.best_value,
            harmonic_angle: r.harmonic_angle,
            linear_cube_angle: r.linear_cube_angle,
            exceptional: r.best_value < ZERO_CEILING,
        });
    }
    let empirical_exceptional = entries
        .iter()
        .filter(|e| e.exceptional)
        .map(|e| e.p.to_string())
        .collect();
    let mut oracle: Vec<Rational> = vec![Rational::from_integer(2.into())];
    if let Some(p) = linear_cube_null_p() {
        oracle.push(p);
    }
    oracle.sort();
    oracle.dedup();
    Ok(SweepReport {
        schema_version: SWEEP_SCHEMA,
        n,
        zero_ceiling: ZERO_CEILING,
        entries,
        empirical_exceptional,
        candidate_exceptional: vec!["0".into(), "2".into()],
        oracle_exceptional: oracle.iter().map(|p| p.to_string()).collect(),
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(restarts: usize) -> CertConfig {
        CertConfig {
            restarts,
            ..CertConfig::default()
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = PParam::from_int(3);
        assert_eq!(
            certify_nonexistence(1, &p, &quick(4)).unwrap_err(),
            SearchError::InvalidDimension(1)
        );
        assert_eq!(
            certify_nonexistence(2, &p, &quick(0)).unwrap_err(),
            SearchError::NoRestarts
        );
        assert_eq!(
            grid_certify_2d(&p, 0, InnerScheme::CoefficientL2).unwrap_err(),
            SearchError::GridTooCoarse(0)
        );
    }

    #[test]
    fn report_fields_are_consistent() {
        let r = certify_nonexistence(2, &PParam::from_int(3), &quick(8)).unwrap();
        let min = r.per_restart.iter().map(|x| x.value).fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_value, min);
        assert!((norm_f64(&r.best_coeffs) - 1.0).abs() < 1e-12);
        assert_eq!(r.certified_s.as_deref(), Some("1"));
        assert_eq!(r.halved_s.as_deref(), Some("1/2"));
        assert!(r.certified_positive);
    }

    #[test]
    fn angles_detect_known_families() {
        let model = ResidualModel::new(2, &PParam::from_int(2), InnerScheme::CoefficientL2).unwrap();
        let h = normalized(&[1.0, 0.0, -3.0, 0.0]);
        assert!(harmonic_angle(&model, &h) < 1e-14);
        let cube = normalized(&[1.0, 6.0, 12.0, 8.0]);
        assert!(linear_cube_angle(&model, &cube) < 1e-8);
        assert!(harmonic_angle(&model, &cube) > 0.1);
        assert!(linear_cube_angle(&model, &h) > 0.1);
    }
}
