//! The idempotent contradiction chain as executable checks.
//!
//! Starting from the normalized quintic identity
//! `<q,x><x^2,x^2> + <x^2,x^3> = 0` (with `q = b/s`), its first and second
//! polarizations, the relations it forces at an idempotent `c`, the
//! vanishing of products on `c^perp`, and the final trace identity for `b`.
//! [`proof_trace`] replays the chain on a concrete algebra and reports the
//! first step that fails.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::AlgebraError;
use crate::fsalg::FSAlgebra;
use crate::linalg::LinOp;
use crate::ops::{certified_constant, equivalence_check, PParam};
use crate::poly::HomoPoly;
use crate::scalar::{dot, rationalize, Rational, Scalar};
use crate::search::idempotents::{find_idempotents, IdempotentConfig};

pub const TRACE_SCHEMA: &str = "cubalg.proof-trace/1";

fn require_euclidean<S: Scalar>(a: &FSAlgebra<S>) -> Result<(), AlgebraError> {
    if a.is_euclidean() {
        Ok(())
    } else {
        Err(AlgebraError::NonIdentityMetric)
    }
}

fn lin<S: Scalar>(terms: &[(S, &[S])], n: usize) -> Vec<S> {
    let mut out = vec![S::zero(); n];
    for (t, v) in terms {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o = o.clone() + t.clone() * x.clone();
        }
    }
    out
}

/// `<q,x><x^2,x^2> + <x^2,x^3>`.
pub fn l01_residual<S: Scalar>(a: &FSAlgebra<S>, q: &[S], x: &[S]) -> Result<S, AlgebraError> {
    require_euclidean(a)?;
    let x2 = a.square(x);
    let x3 = a.product(x, &x2);
    Ok(dot(q, x) * a.inner(&x2, &x2) + a.inner(&x2, &x3))
}

/// `<x^2,x^2> q + 4<q,x> x^3 + 4 x^4 + x^2 x^2`, the gradient of
/// [`l01_residual`] in `x`.
pub fn l02_residual<S: Scalar>(
    a: &FSAlgebra<S>,
    q: &[S],
    x: &[S],
) -> Result<Vec<S>, AlgebraError> {
    require_euclidean(a)?;
    let four = S::from_i64(4);
    let x2 = a.square(x);
    let x3 = a.product(x, &x2);
    let x4 = a.product(x, &x3);
    let x2x2 = a.square(&x2);
    Ok(lin(
        &[
            (a.inner(&x2, &x2), q),
            (four.clone() * dot(q, x), &x3),
            (four, &x4),
            (S::one(), &x2x2),
        ],
        a.n(),
    ))
}

/// `2L_x^3 + L_{x^3} + <q,x>(L_{x^2} + 2L_x^2) + L_x L_{x^2} + L_{x^2} L_x
/// + q (x) x^3 + x^3 (x) q`; its action on `y` is a quarter of the
/// derivative of [`l02_residual`] at `x` in direction `y`.
pub fn l03_residual<S: Scalar>(
    a: &FSAlgebra<S>,
    q: &[S],
    x: &[S],
) -> Result<LinOp<S>, AlgebraError> {
    require_euclidean(a)?;
    let two = S::from_i64(2);
    let x2 = a.square(x);
    let x3 = a.product(x, &x2);
    let lx = a.lx_matrix(x);
    let lx2 = a.lx_matrix(&x2);
    let lx3 = a.lx_matrix(&x3);
    let lx_sq = lx.compose(&lx);
    let mut out = lx_sq.compose(&lx).scale(&two).add(&lx3);
    out = out.add(&lx2.add(&lx_sq.scale(&two)).scale(&dot(q, x)));
    out = out.add(&lx.compose(&lx2)).add(&lx2.compose(&lx));
    out = out.add(&a.rank_one(q, &x3)).add(&a.rank_one(&x3, q));
    Ok(out)
}

/// [`l01_residual`] as a quintic polynomial in `x`.
pub fn l01_poly<S: Scalar>(a: &FSAlgebra<S>, q: &[S]) -> Result<HomoPoly<S>, AlgebraError> {
    require_euclidean(a)?;
    let x = a.coordinate_vector();
    let x2 = a.product_poly(&x, &x);
    let x3 = a.product_poly(&x, &x2);
    let qx = HomoPoly::linear(q);
    Ok(&(&qx * &a.inner_poly_vec(&x2, &x2)) + &a.inner_poly_vec(&x2, &x3))
}

/// [`l02_residual`] as a vector of quartic polynomials in `x`.
pub fn l02_poly<S: Scalar>(
    a: &FSAlgebra<S>,
    q: &[S],
) -> Result<Vec<HomoPoly<S>>, AlgebraError> {
    require_euclidean(a)?;
    let n = a.n();
    let x = a.coordinate_vector();
    let x2 = a.product_poly(&x, &x);
    let x3 = a.product_poly(&x, &x2);
    let x4 = a.product_poly(&x, &x3);
    let x2x2 = a.product_poly(&x2, &x2);
    let x2n = a.inner_poly_vec(&x2, &x2);
    let qx = HomoPoly::linear(q).scale(&S::from_i64(4));
    Ok((0..n)
        .map(|i| {
            let mut t = x2n.scale(&q[i]);
            t = &t + &(&qx * &x3[i]);
            t = &t + &x4[i].scale(&S::from_i64(4));
            &t + &x2x2[i]
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepName {
    FindIdempotent,
    C03,
    C04,
    ZeroPerp,
    FinalBIdentity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub step: StepName,
    pub verdict: Verdict,
    pub residuals: BTreeMap<&'static str, f64>,
    pub witness: Value,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn norm<S: Scalar>(a: &FSAlgebra<S>, v: &[S]) -> f64 {
    a.norm_sq(v).to_f64().max(0.0).sqrt()
}

/// Zero test of a vector: exactly in rational mode, by norm otherwise.
fn vec_ok<S: Scalar>(a: &FSAlgebra<S>, v: &[S], tol: f64) -> bool {
    if S::EXACT {
        v.iter().all(|x| x.is_zero())
    } else {
        norm(a, v) <= tol
    }
}

fn op_ok<S: Scalar>(m: &LinOp<S>, tol: f64) -> bool {
    if S::EXACT {
        m.is_zero()
    } else {
        m.spectral_norm() <= tol
    }
}

fn json_vec<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(Scalar::to_json).collect())
}

fn json_op<S: Scalar>(m: &LinOp<S>) -> Value {
    Value::Array(m.rows().iter().map(|r| json_vec(r)).collect())
}

fn sub<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(a, b)| a.clone() - b.clone()).collect()
}

fn scaled<S: Scalar>(t: &S, v: &[S]) -> Vec<S> {
    v.iter().map(|x| t.clone() * x.clone()).collect()
}

/// `<q,c> = -1` and `q = -c/|c|^2`.
pub fn c03_check<S: Scalar>(a: &FSAlgebra<S>, c: &[S], q: &[S], tol: f64) -> Check {
    let cc = a.norm_sq(c);
    let r1 = dot(q, c) + S::one();
    let r2: Vec<S> = q
        .iter()
        .zip(c)
        .map(|(qi, ci)| qi.clone() + ci.clone() / cc.clone())
        .collect();
    let ok = r1.is_negligible(tol) && vec_ok(a, &r2, tol);
    Check {
        step: StepName::C03,
        verdict: Verdict::from_bool(ok),
        residuals: BTreeMap::from([
            ("q_dot_c_plus_one", r1.abs().to_f64()),
            ("q_plus_c_over_norm_sq", norm(a, &r2)),
        ]),
        witness: json!({ "q_dot_c": dot(q, c).to_json(), "c_norm_sq": cc.to_json() }),
    }
}

/// `L_c^3 = c (x) c / |c|^2`; also reports `|L_c|_{c^perp}|`.
pub fn c04_check<S: Scalar>(a: &FSAlgebra<S>, c: &[S], tol: f64) -> Check {
    let n = a.n();
    let cc = a.norm_sq(c);
    let lc = a.lx_matrix(c);
    let proj_c = a.rank_one(c, c).scale(&(S::one() / cc));
    let diff = lc.pow(3).sub(&proj_c);
    let restriction = lc.compose(&LinOp::identity(n).sub(&proj_c));
    Check {
        step: StepName::C04,
        verdict: Verdict::from_bool(op_ok(&diff, tol)),
        residuals: BTreeMap::from([
            ("lc_cubed_minus_projection", diff.spectral_norm()),
            ("lc_on_c_perp", restriction.spectral_norm()),
        ]),
        witness: json!({
            "lc": json_op(&lc),
            "lc_vanishes_on_c_perp": op_ok(&restriction, tol),
        }),
    }
}

/// Orthogonal basis of `c^perp`: Gram-Schmidt on the coordinate vectors,
/// skipping the coordinate where `|c_k|` is largest. Vectors are left
/// unnormalized so that rational arithmetic stays exact; checks divide by
/// their norms instead.
pub fn c_perp_basis<S: Scalar>(a: &FSAlgebra<S>, c: &[S]) -> Vec<Vec<S>> {
    let n = a.n();
    let pivot = (0..n).fold(0, |best, k| {
        if c[k].abs().to_f64() > c[best].abs().to_f64() {
            k
        } else {
            best
        }
    });
    let mut basis: Vec<Vec<S>> = vec![c.to_vec()];
    for k in (0..n).filter(|&k| k != pivot) {
        let mut v = vec![S::zero(); n];
        v[k] = S::one();
        for w in &basis {
            let t = a.inner(&v, w) / a.norm_sq(w);
            v = sub(&v, &scaled(&t, w));
        }
        basis.push(v);
    }
    basis.remove(0);
    basis
}

/// Products of basis vectors of `c^perp` vanish, and `<xy, c> = 0` on it.
pub fn zero_perp_check<S: Scalar>(a: &FSAlgebra<S>, c: &[S], tol: f64) -> Check {
    let basis = c_perp_basis(a, c);
    let mut worst = 0.0f64;
    let mut worst_pair: Option<(usize, usize)> = None;
    let mut closure = 0.0f64;
    let mut ok = true;
    let cn = norm(a, c);
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let prod = a.product(&basis[i], &basis[j]);
            let scale = norm(a, &basis[i]) * norm(a, &basis[j]);
            let rel = norm(a, &prod) / scale;
            if !vec_ok(a, &prod, tol * scale) {
                ok = false;
            }
            if worst_pair.is_none() || rel > worst {
                worst = rel;
                worst_pair = Some((i, j));
            }
            closure = closure.max(a.inner(&prod, c).abs().to_f64() / (scale * cn));
        }
    }
    Check {
        step: StepName::ZeroPerp,
        verdict: Verdict::from_bool(ok),
        residuals: BTreeMap::from([
            ("max_product_norm", worst),
            ("max_closure_defect", closure),
        ]),
        witness: json!({
            "dimension": basis.len(),
            "basis": basis.iter().map(|v| json_vec(v)).collect::<Vec<_>>(),
            "worst_pair": worst_pair,
        }),
    }
}

/// `b = c/|c|^2` and `s q = -q`: the trace of a zero subalgebra plus one
/// idempotent, against `s q = b`.
pub fn final_identity_check<S: Scalar>(
    a: &FSAlgebra<S>,
    c: &[S],
    b: &[S],
    q: &[S],
    s: &S,
    q_halved: Option<(&[S], &S)>,
    tol: f64,
) -> Check {
    let cc = a.norm_sq(c);
    let inv = S::one() / cc;
    let r1 = sub(b, &scaled(&inv, c));
    let sq_plus_q: Vec<S> = q.iter().map(|x| s.clone() * x.clone() + x.clone()).collect();
    let ok = vec_ok(a, &r1, tol) && vec_ok(a, &sq_plus_q, tol);
    let halved = q_halved.map(|(qp, sp)| {
        let v: Vec<S> = qp.iter().map(|x| sp.clone() * x.clone() + x.clone()).collect();
        norm(a, &v)
    });
    Check {
        step: StepName::FinalBIdentity,
        verdict: Verdict::from_bool(ok),
        residuals: BTreeMap::from([
            ("b_minus_c_over_norm_sq", norm(a, &r1)),
            ("s_q_plus_q", norm(a, &sq_plus_q)),
        ]),
        witness: json!({
            "s": s.to_json(),
            "halved_s_q_plus_q": halved,
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMode {
    Exact,
    Float,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceConfig {
    pub mode: TraceMode,
    /// Tolerance for checks run in floating point.
    pub tol: f64,
    /// Largest denominator tried when snapping an idempotent to rationals.
    pub max_denominator: i64,
    #[serde(skip)]
    pub search: IdempotentConfig,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        let search = IdempotentConfig::default();
        Self {
            mode: TraceMode::Exact,
            tol: 1e-9,
            max_denominator: 1_000_000,
            restarts: search.restarts,
            seed: search.seed,
            search,
        }
    }
}

impl TraceConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.search.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self.search.restarts = restarts;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    /// Arithmetic the branch ran in: `exact` when the idempotent snapped to
    /// rationals with `c^2 = c` exactly.
    pub arithmetic: TraceMode,
    pub c: Value,
    pub idempotent_residual: f64,
    /// `<c^2, c^3> - |c|^2`, zero for every idempotent.
    pub c05_defect: f64,
    /// Steps in order, ending at the first failure.
    pub steps: Vec<Check>,
    /// Every check evaluated regardless of earlier failures.
    pub diagnostics: Vec<Check>,
    pub first_failure: Option<StepName>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TraceOutcome {
    /// Some step fails on every idempotent.
    Contradiction { step: StepName },
    /// Some idempotent passes every step.
    CounterexampleAlarm,
    /// The search found no idempotent.
    NoIdempotent,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofTrace {
    pub schema_version: &'static str,
    pub p: PParam,
    pub cubic: String,
    pub n: usize,
    pub certified_s: String,
    pub halved_s: String,
    pub b: Value,
    /// `b / s` with the certified `s`.
    pub q: Value,
    /// `b / s` with the halved `s = (p-2)/2`.
    pub q_halved: Value,
    pub idempotent_search: Check,
    pub branches: Vec<Branch>,
    pub outcome: TraceOutcome,
    pub first_failure: Option<StepName>,
    pub config: TraceConfig,
    pub seed: u64,
}

impl ProofTrace {
    pub fn is_contradiction(&self) -> bool {
        matches!(self.outcome, TraceOutcome::Contradiction { .. })
    }
}

fn run_branch<S: Scalar>(
    a: &FSAlgebra<S>,
    c: &[S],
    s: &S,
    s_halved: &S,
    tol: f64,
    mode: TraceMode,
) -> Branch {
    let b = a.b_vector().expect("identity metric").to_vec();
    let q = scaled(&(S::one() / s.clone()), &b);
    let q_halved = scaled(&(S::one() / s_halved.clone()), &b);
    let c2 = a.square(c);
    let c3 = a.product(c, &c2);
    let c05 = a.inner(&c2, &c3) - a.norm_sq(c);
    let diagnostics = vec![
        c03_check(a, c, &q, tol),
        c04_check(a, c, tol),
        zero_perp_check(a, c, tol),
        final_identity_check(a, c, &b, &q, s, Some((&q_halved, s_halved)), tol),
    ];
    let mut steps = Vec::new();
    for d in &diagnostics {
        steps.push(d.clone());
        if !d.passed() {
            break;
        }
    }
    let first_failure = steps.iter().find(|s| !s.passed()).map(|s| s.step);
    Branch {
        arithmetic: mode,
        c: json_vec(c),
        idempotent_residual: norm(a, &sub(&c2, c)),
        c05_defect: c05.abs().to_f64(),
        steps,
        diagnostics,
        first_failure,
    }
}

/// Replays the contradiction chain on `a` at exponent `p`.
pub fn proof_trace(
    a: &FSAlgebra<Rational>,
    p: &PParam,
    cfg: &TraceConfig,
) -> Result<ProofTrace, AlgebraError> {
    if p.is_two() {
        return Err(AlgebraError::PIsTwo);
    }
    let s_halved = p.half_shift()?;
    require_euclidean(a)?;
    if a.is_zero_algebra() {
        return Err(AlgebraError::ZeroAlgebra);
    }
    let s = equivalence_check(a.cubic(), p)?
        .certified()
        .or(certified_constant(p)?)
        .unwrap_or_else(|| s_halved.clone() * Rational::from_integer(2.into()));
    let b = a.b_vector()?.to_vec();
    let q = scaled(&(Rational::from_integer(1.into()) / s.clone()), &b);
    let q_halved = scaled(&(Rational::from_integer(1.into()) / s_halved.clone()), &b);

    let af = a.to_f64();
    let search = find_idempotents(&af, &cfg.search);
    let found = !search.idempotents.is_empty();
    let idempotent_search = Check {
        step: StepName::FindIdempotent,
        verdict: Verdict::from_bool(found),
        residuals: BTreeMap::from([(
            "max_idempotent_residual",
            search
                .idempotents
                .iter()
                .map(|i| i.residual)
                .fold(0.0, f64::max),
        )]),
        witness: json!({
            "count": search.idempotents.len(),
            "zero_algebra": search.zero_algebra,
            "optimizer_failure": search.optimizer_failure,
        }),
    };

    let sf = s.to_f64();
    let spf = s_halved.to_f64();
    let branches: Vec<Branch> = search
        .idempotents
        .iter()
        .map(|idem| {
            let exact = match cfg.mode {
                TraceMode::Float => None,
                TraceMode::Exact => snap(a, &idem.c, cfg.max_denominator),
            };
            match exact {
                Some(c) => run_branch(a, &c, &s, &s_halved, 0.0, TraceMode::Exact),
                None => run_branch(&af, &idem.c, &sf, &spf, cfg.tol, TraceMode::Float),
            }
        })
        .collect();

    let outcome = if !found {
        TraceOutcome::NoIdempotent
    } else if branches.iter().any(|b| b.first_failure.is_none()) {
        TraceOutcome::CounterexampleAlarm
    } else {
        TraceOutcome::Contradiction {
            step: branches[0].first_failure.expect("every branch failed"),
        }
    };
    let first_failure = if found {
        branches.iter().find_map(|b| b.first_failure)
    } else {
        Some(StepName::FindIdempotent)
    };
    Ok(ProofTrace {
        schema_version: TRACE_SCHEMA,
        p: p.clone(),
        cubic: a.cubic().poly().to_string(),
        n: a.n(),
        certified_s: s.to_string(),
        halved_s: s_halved.to_string(),
        b: json_vec(&b),
        q: json_vec(&q),
        q_halved: json_vec(&q_halved),
        idempotent_search,
        branches,
        outcome,
        first_failure,
        config: cfg.clone(),
        seed: cfg.seed,
    })
}

/// Rational approximation of `c` that is an exact idempotent, if any.
pub fn snap(a: &FSAlgebra<Rational>, c: &[f64], max_den: i64) -> Option<Vec<Rational>> {
    let r: Option<Vec<Rational>> = c.iter().map(|&x| rationalize(x, max_den)).collect();
    let r = r?;
    (a.square(&r) == r && r.iter().any(|x| !x.is_zero())).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::CubicForm;
    use crate::scalar::rat;

    fn alg(text: &str, n: usize) -> FSAlgebra<Rational> {
        FSAlgebra::euclidean(CubicForm::new(HomoPoly::parse(text, n).unwrap()).unwrap())
    }

    fn v(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    #[test]
    fn l01_examples() {
        let z = alg("0", 3);
        assert!(l01_residual(&z, &v(&[(1, 1), (2, 1), (3, 1)]), &v(&[(1, 2), (1, 1), (-1, 1)]))
            .unwrap()
            .is_zero());
        let a = alg("x1^3", 2);
        let t = rat(3, 2);
        let x = vec![t.clone(), rat(0, 1)];
        let expected = rat(216, 1) * t.clone() * t.clone() * t.clone() * t.clone() * t;
        assert_eq!(l01_residual(&a, &v(&[(0, 1), (0, 1)]), &x).unwrap(), expected);
        let e1 = v(&[(1, 1), (0, 1)]);
        // <x^2,x^2> = 36 and <x^2,x^3> = 216 at e1
        assert_eq!(l01_residual(&a, &v(&[(-1, 1), (0, 1)]), &e1).unwrap(), rat(180, 1));
        assert!(l01_residual(&a, &v(&[(-6, 1), (0, 1)]), &e1).unwrap().is_zero());
    }

    #[test]
    fn l02_and_l03_examples() {
        let a = alg("x1^3", 2);
        let zero = v(&[(0, 1), (0, 1)]);
        let e1 = v(&[(1, 1), (0, 1)]);
        assert_eq!(l02_residual(&a, &zero, &e1).unwrap(), v(&[(1080, 1), (0, 1)]));
        assert!(l02_residual(&a, &e1, &zero).unwrap().iter().all(|x| x.is_zero()));
        let l3 = l03_residual(&a, &zero, &e1).unwrap();
        assert_eq!(l3.get(0, 0), &rat(1080, 1));
        assert!(l3.get(0, 1).is_zero() && l3.get(1, 0).is_zero() && l3.get(1, 1).is_zero());
        assert!(l03_residual(&a, &e1, &zero).unwrap().is_zero());
    }

    #[test]
    fn polarization_chain_on_a_mixed_cubic() {
        let a = alg("x1^3 - 2*x1*x2*x3 + 1/3*x2^2*x3 + x3^3 - x1^2*x2", 3);
        let q = v(&[(1, 2), (-3, 1), (2, 5)]);
        let l01 = l01_poly(&a, &q).unwrap();
        assert_eq!(l01.gradient(), l02_poly(&a, &q).unwrap());
        let x = v(&[(2, 3), (-1, 1), (5, 4)]);
        let y = v(&[(1, 1), (1, 7), (-2, 1)]);
        assert_eq!(l01.eval(&x), l01_residual(&a, &q, &x).unwrap());
        let l02 = l02_poly(&a, &q).unwrap();
        let directional: Vec<Rational> = l02
            .iter()
            .map(|p| {
                p.gradient_at(&x)
                    .iter()
                    .zip(&y)
                    .fold(rat(0, 1), |acc, (g, yi)| acc + g * yi)
            })
            .collect();
        let l3y: Vec<Rational> = l03_residual(&a, &q, &x)
            .unwrap()
            .apply(&y)
            .into_iter()
            .map(|t| t * rat(4, 1))
            .collect();
        assert_eq!(directional, l3y);
    }

    #[test]
    fn c03_examples() {
        let a = alg("x1^3", 2);
        let c = v(&[(1, 6), (0, 1)]);
        let bad = c03_check(&a, &c, &v(&[(-36, 1), (0, 1)]), 0.0);
        assert_eq!(bad.verdict, Verdict::Fail);
        assert_eq!(bad.residuals["q_dot_c_plus_one"], 5.0);
        let good = c03_check(&a, &c, &v(&[(-6, 1), (0, 1)]), 0.0);
        assert!(good.passed());
        assert_eq!(good.residuals["q_plus_c_over_norm_sq"], 0.0);
    }

    #[test]
    fn c04_examples() {
        let one = alg("x1^3", 1);
        assert!(c04_check(&one, &v(&[(1, 6)]), 0.0).passed());
        let a = alg("x1^3", 2);
        let r = c04_check(&a, &v(&[(1, 6), (0, 1)]), 0.0);
        assert!(r.passed());
        assert_eq!(r.residuals["lc_on_c_perp"], 0.0);
        let h = alg("x1^3 - 3*x1*x2^2", 2);
        let r = c04_check(&h, &v(&[(1, 6), (0, 1)]), 0.0);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(h.lx_matrix(&v(&[(1, 6), (0, 1)])), LinOp::from_rows(vec![
            v(&[(1, 1), (0, 1)]),
            v(&[(0, 1), (-1, 1)]),
        ]));
    }

    #[test]
    fn zero_perp_examples() {
        let a = alg("x1^3", 2);
        assert!(zero_perp_check(&a, &v(&[(1, 6), (0, 1)]), 0.0).passed());
        let h = alg("x1^3 - 3*x1*x2^2", 2);
        let r = zero_perp_check(&h, &v(&[(1, 6), (0, 1)]), 0.0);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(h.square(&v(&[(0, 1), (1, 1)])), v(&[(-6, 1), (0, 1)]));
        let one = alg("x1^3", 1);
        let r = zero_perp_check(&one, &v(&[(1, 6)]), 0.0);
        assert!(r.passed());
        assert_eq!(r.witness["dimension"], 0);
    }

    #[test]
    fn c_perp_basis_is_orthogonal() {
        let a = alg("x1^3 + x2^3 + x3^3", 3);
        let c = v(&[(1, 3), (-1, 2), (1, 6)]);
        let basis = c_perp_basis(&a, &c);
        assert_eq!(basis.len(), 2);
        for w in &basis {
            assert!(a.inner(w, &c).is_zero());
        }
        assert!(a.inner(&basis[0], &basis[1]).is_zero());
    }

    #[test]
    fn trace_fails_at_c03_for_linear_cube() {
        let t = proof_trace(&alg("x1^3", 2), &PParam::from_int(3), &TraceConfig::default()).unwrap();
        assert_eq!(t.outcome, TraceOutcome::Contradiction { step: StepName::C03 });
        assert_eq!(t.branches.len(), 1);
        assert_eq!(t.branches[0].arithmetic, TraceMode::Exact);
        assert_eq!(t.certified_s, "1");
        assert_eq!(t.halved_s, "1/2");
        assert_eq!(t.branches[0].c05_defect, 0.0);
    }

    #[test]
    fn linear_cube_passes_every_step_at_its_null_exponent() {
        let t = proof_trace(&alg("x1^3", 2), &PParam::from_int(1), &TraceConfig::default()).unwrap();
        assert_eq!(t.outcome, TraceOutcome::CounterexampleAlarm);
        assert_eq!(t.branches[0].steps.len(), 4);
    }

    #[test]
    fn trace_rejects_inadmissible_inputs() {
        let a = alg("x1^3", 2);
        let cfg = TraceConfig::default();
        assert_eq!(proof_trace(&a, &PParam::from_int(2), &cfg).unwrap_err(), AlgebraError::PIsTwo);
        assert_eq!(proof_trace(&a, &PParam::Infinity, &cfg).unwrap_err(), AlgebraError::PInfinite);
        assert_eq!(
            proof_trace(&alg("0", 2), &PParam::from_int(3), &cfg).unwrap_err(),
            AlgebraError::ZeroAlgebra
        );
    }
}
