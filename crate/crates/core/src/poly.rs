//! Homogeneous polynomials in `n` variables, their text format, and the
//! trilinear polarization of cubic forms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::PolyError;
use crate::linalg::LinOp;
use crate::scalar::{dot, Rational, Scalar};
use crate::search::moments::sphere_moment;

/// Exponent multi-index; its length is the number of variables.
pub type Exponent = Vec<u32>;

/// Homogeneous polynomial with sparse monomial storage.
///
/// Every stored exponent has length `n` and total degree `d`; zero
/// coefficients are never stored. The zero polynomial carries degree 0 and
/// equals any other zero polynomial of the same dimension.
#[derive(Clone, Debug)]
pub struct HomoPoly<S> {
    n: usize,
    d: usize,
    coeffs: BTreeMap<Exponent, S>,
}

impl<S: Scalar> PartialEq for HomoPoly<S> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.coeffs == other.coeffs && (self.is_zero() || self.d == other.d)
    }
}

impl<S: Scalar> HomoPoly<S> {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            d: 0,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: S) -> Self {
        Self::monomial(vec![0; n], c)
    }

    pub fn monomial(alpha: Exponent, c: S) -> Self {
        let n = alpha.len();
        let d = total_degree(&alpha);
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(alpha, c);
        }
        let d = if coeffs.is_empty() { 0 } else { d };
        Self { n, d, coeffs }
    }

    /// The coordinate function `x_i` (0-based).
    pub fn variable(n: usize, i: usize) -> Self {
        let mut alpha = vec![0; n];
        alpha[i] = 1;
        Self::monomial(alpha, S::one())
    }

    /// Linear form `sum_i a_i x_i`.
    pub fn linear(a: &[S]) -> Self {
        let n = a.len();
        Self::from_terms(
            n,
            a.iter().enumerate().map(|(i, c)| {
                let mut alpha = vec![0; n];
                alpha[i] = 1;
                (alpha, c.clone())
            }),
        )
        .expect("linear terms share degree 1")
    }

    /// `|x|^2 = sum_i x_i^2`.
    pub fn squared_norm(n: usize) -> Self {
        Self::from_terms(
            n,
            (0..n).map(|i| {
                let mut alpha = vec![0; n];
                alpha[i] = 2;
                (alpha, S::one())
            }),
        )
        .expect("quadratic terms share degree 2")
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, summing repeats.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (Exponent, S)>,
    ) -> Result<Self, PolyError> {
        let mut coeffs: BTreeMap<Exponent, S> = BTreeMap::new();
        let mut degree: Option<usize> = None;
        for (alpha, c) in terms {
            if alpha.len() != n {
                return Err(PolyError::DimensionMismatch {
                    expected: n,
                    found: alpha.len(),
                });
            }
            if c.is_zero() {
                continue;
            }
            let d = total_degree(&alpha);
            match degree {
                Some(expected) if expected != d => {
                    return Err(PolyError::DegreeMismatch(expected, d));
                }
                _ => degree = Some(d),
            }
            accumulate(&mut coeffs, alpha, c);
        }
        let d = if coeffs.is_empty() {
            0
        } else {
            degree.unwrap_or(0)
        };
        Ok(Self { n, d, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, alpha: &[u32]) -> S {
        self.coeffs.get(alpha).cloned().unwrap_or_else(S::zero)
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &S)> {
        self.coeffs.iter()
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> HomoPoly<T> {
        let coeffs: BTreeMap<Exponent, T> = self
            .coeffs
            .iter()
            .map(|(a, c)| (a.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let d = if coeffs.is_empty() { 0 } else { self.d };
        HomoPoly { n: self.n, d, coeffs }
    }

    pub fn to_f64(&self) -> HomoPoly<f64> {
        self.map_coeffs(Scalar::to_f64)
    }

    pub fn eval(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.n, "dimension mismatch");
        self.coeffs.iter().fold(S::zero(), |acc, (alpha, c)| {
            acc + c.clone() * monomial_value(alpha, x)
        })
    }

    /// Partial derivative in the 0-based variable `i`.
    pub fn partial(&self, i: usize) -> Result<Self, PolyError> {
        if i >= self.n {
            return Err(PolyError::VariableOutOfRange {
                index: i + 1,
                n: self.n,
            });
        }
        let mut coeffs = BTreeMap::new();
        for (alpha, c) in &self.coeffs {
            if alpha[i] == 0 {
                continue;
            }
            let mut beta = alpha.clone();
            beta[i] -= 1;
            accumulate(&mut coeffs, beta, S::from_i64(alpha[i] as i64) * c.clone());
        }
        let d = if coeffs.is_empty() { 0 } else { self.d - 1 };
        Ok(Self {
            n: self.n,
            d,
            coeffs,
        })
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.n)
            .map(|i| self.partial(i).expect("index within range"))
            .collect()
    }

    pub fn gradient_at(&self, x: &[S]) -> Vec<S> {
        self.gradient().iter().map(|g| g.eval(x)).collect()
    }

    /// Hessian matrix evaluated at `x`.
    pub fn hessian_at(&self, x: &[S]) -> LinOp<S> {
        let grad = self.gradient();
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| grad[i].partial(j).expect("index within range").eval(x))
                    .collect()
            })
            .collect();
        LinOp::from_rows(rows)
    }

    pub fn scale(&self, t: &S) -> Self {
        if t.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .map(|(a, c)| (a.clone(), t.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.combine(other, false)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self, PolyError> {
        if self.n != other.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if !self.is_zero() && !other.is_zero() && self.d != other.d {
            return Err(PolyError::DegreeMismatch(self.d, other.d));
        }
        let mut coeffs = self.coeffs.clone();
        for (alpha, c) in &other.coeffs {
            let c = if negate { -c.clone() } else { c.clone() };
            accumulate(&mut coeffs, alpha.clone(), c);
        }
        let d = if coeffs.is_empty() {
            0
        } else if self.is_zero() {
            other.d
        } else {
            self.d
        };
        Ok(Self {
            n: self.n,
            d,
            coeffs,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        if self.n != other.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut coeffs = BTreeMap::new();
        for (a, c) in &self.coeffs {
            for (b, e) in &other.coeffs {
                let sum: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                accumulate(&mut coeffs, sum, c.clone() * e.clone());
            }
        }
        let d = if coeffs.is_empty() {
            0
        } else {
            self.d + other.d
        };
        Ok(Self {
            n: self.n,
            d,
            coeffs,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.n, S::one()), |acc, _| &acc * self)
    }

    /// Composition `z -> p(M z)` where `M` is given by its rows.
    pub fn linear_substitute(&self, m: &LinOp<S>) -> Self {
        assert_eq!(m.dim(), self.n, "dimension mismatch");
        let forms: Vec<Self> = (0..self.n).map(|i| Self::linear(m.row(i))).collect();
        let mut out = Self::zero(self.n);
        for (alpha, c) in &self.coeffs {
            let mut term = Self::constant(self.n, c.clone());
            for (i, &e) in alpha.iter().enumerate() {
                if e > 0 {
                    term = &term * &forms[i].pow(e);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Euler operator `sum_i x_i d_i p` as a polynomial.
    pub fn euler(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (i, g) in self.gradient().iter().enumerate() {
            out = &out + &(&Self::variable(self.n, i) * g);
        }
        out
    }
}

impl HomoPoly<Rational> {
    /// Parses the polynomial text format. Variables are `x1 .. xn`.
    pub fn parse(text: &str, n: usize) -> Result<Self, PolyError> {
        parse::<Rational>(text, n)
    }
}

impl<S: Scalar> Add for &HomoPoly<S> {
    type Output = HomoPoly<S>;
    fn add(self, rhs: Self) -> HomoPoly<S> {
        self.try_add(rhs).expect("polynomial addition")
    }
}

impl<S: Scalar> Sub for &HomoPoly<S> {
    type Output = HomoPoly<S>;
    fn sub(self, rhs: Self) -> HomoPoly<S> {
        self.try_sub(rhs).expect("polynomial subtraction")
    }
}

impl<S: Scalar> Mul for &HomoPoly<S> {
    type Output = HomoPoly<S>;
    fn mul(self, rhs: Self) -> HomoPoly<S> {
        self.try_mul(rhs).expect("polynomial multiplication")
    }
}

impl<S: Scalar> Neg for &HomoPoly<S> {
    type Output = HomoPoly<S>;
    fn neg(self) -> HomoPoly<S> {
        self.scale(&(-S::one()))
    }
}

fn accumulate<S: Scalar>(coeffs: &mut BTreeMap<Exponent, S>, alpha: Exponent, c: S) {
    use std::collections::btree_map::Entry;
    match coeffs.entry(alpha) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            let v = e.get().clone() + c;
            if v.is_zero() {
                e.remove();
            } else {
                e.insert(v);
            }
        }
    }
}

fn total_degree(alpha: &[u32]) -> usize {
    alpha.iter().map(|&e| e as usize).sum()
}

/// All exponents of total degree `d` in `n` variables, in the printer's
/// order (`x1^d` first).
pub fn exponents(n: usize, d: u32) -> Vec<Exponent> {
    fn fill(prefix: &mut Exponent, n: usize, left: u32, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            fill(prefix, n, left - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        fill(&mut Vec::with_capacity(n), n, d, &mut out);
    }
    out
}

fn monomial_value<S: Scalar>(alpha: &[u32], x: &[S]) -> S {
    let mut v = S::one();
    for (xi, &e) in x.iter().zip(alpha) {
        for _ in 0..e {
            v = v * xi.clone();
        }
    }
    v
}

/// Canonical text: graded-lex order (largest exponent of `x1` first),
/// coefficients as exact literals, unit coefficients left implicit.
impl<S: Scalar> fmt::Display for HomoPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (alpha, c)) in self.coeffs.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let factors: Vec<String> = alpha
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, e)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == S::one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Parses `text` into a homogeneous polynomial over `S`.
///
/// Grammar: terms joined by `+`/`-`; a term is an optional coefficient
/// (`p`, `p/q`, or a decimal) followed by `*`-joined factors `x<k>[^e]`.
/// Whitespace is ignored.
pub fn parse<S: Scalar>(text: &str, n: usize) -> Result<HomoPoly<S>, PolyError> {
    if n == 0 {
        return Err(PolyError::ZeroDimension);
    }
    Parser::new(text, n).parse()
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    n: usize,
    len: usize,
}

impl Parser {
    fn new(src: &str, n: usize) -> Self {
        let chars: Vec<(usize, char)> = src
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Self {
            chars,
            pos: 0,
            n,
            len: src.len(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn parse<S: Scalar>(mut self) -> Result<HomoPoly<S>, PolyError> {
        let mut coeffs: BTreeMap<Exponent, S> = BTreeMap::new();
        let mut degree: Option<usize> = None;
        if self.peek().is_none() {
            return self.error("empty polynomial");
        }
        let mut first = true;
        while self.peek().is_some() {
            let negative = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    false
                }
                Some('-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => return self.error("expected `+` or `-`"),
            };
            first = false;
            let start = self.offset();
            let (c, alpha) = self.term::<S>()?;
            let c = if negative { -c } else { c };
            let d = total_degree(&alpha);
            if c.is_zero() {
                continue;
            }
            match degree {
                Some(expected) if expected != d => {
                    return Err(PolyError::MixedDegree {
                        pos: start,
                        expected,
                        found: d,
                    });
                }
                _ => degree = Some(d),
            }
            accumulate(&mut coeffs, alpha, c);
        }
        let d = if coeffs.is_empty() {
            0
        } else {
            degree.unwrap_or(0)
        };
        Ok(HomoPoly {
            n: self.n,
            d,
            coeffs,
        })
    }

    fn term<S: Scalar>(&mut self) -> Result<(S, Exponent), PolyError> {
        let mut alpha = vec![0u32; self.n];
        let mut coeff = S::one();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                coeff = self.coefficient()?;
                if self.peek() == Some('*') {
                    self.pos += 1;
                } else {
                    return Ok((coeff, alpha));
                }
            }
            Some('x') => {}
            Some(_) => return self.error("expected a coefficient or a variable"),
            None => return self.error("unexpected end of input"),
        }
        loop {
            self.factor(&mut alpha)?;
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((coeff, alpha))
    }

    fn coefficient<S: Scalar>(&mut self) -> Result<S, PolyError> {
        let start = self.pos;
        let mut literal = self.number_text();
        if self.peek() == Some('/') {
            self.pos += 1;
            let denom = self.number_text();
            if denom.is_empty() {
                return self.error("expected a denominator");
            }
            literal = format!("{literal}/{denom}");
        }
        S::parse_literal(&literal).ok_or(PolyError::Syntax {
            pos: self.chars.get(start).map_or(self.len, |&(i, _)| i),
            msg: format!("invalid coefficient `{literal}`"),
        })
    }

    fn number_text(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == '.' {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn integer(&mut self) -> Result<u32, PolyError> {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if s.is_empty() {
            return self.error("expected an integer");
        }
        s.parse()
            .or_else(|_| self.error(format!("integer `{s}` out of range")))
    }

    fn factor(&mut self, alpha: &mut [u32]) -> Result<(), PolyError> {
        if self.peek() != Some('x') {
            return self.error("expected a variable `x<k>`");
        }
        self.pos += 1;
        let index = self.integer()? as usize;
        if index == 0 || index > self.n {
            return Err(PolyError::VariableOutOfRange { index, n: self.n });
        }
        let mut e = 1;
        if self.peek() == Some('^') {
            self.pos += 1;
            e = self.integer()?;
            if e == 0 {
                return self.error("exponent must be positive");
            }
        }
        alpha[index - 1] += e;
        Ok(())
    }
}

/// Homogeneous polynomial of degree exactly 3 (or the zero form).
#[derive(Clone, Debug)]
pub struct CubicForm<S>(HomoPoly<S>);

impl<S: Scalar> PartialEq for CubicForm<S> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<S: Scalar> CubicForm<S> {
    pub fn new(poly: HomoPoly<S>) -> Result<Self, PolyError> {
        if poly.n() == 0 {
            return Err(PolyError::ZeroDimension);
        }
        if !poly.is_zero() && poly.degree() != 3 {
            return Err(PolyError::NotCubic(poly.degree()));
        }
        Ok(Self(poly))
    }

    pub fn zero(n: usize) -> Self {
        Self(HomoPoly::zero(n))
    }

    pub fn poly(&self) -> &HomoPoly<S> {
        &self.0
    }

    pub fn into_poly(self) -> HomoPoly<S> {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> CubicForm<T> {
        CubicForm(self.0.map_coeffs(f))
    }

    pub fn to_f64(&self) -> CubicForm<f64> {
        CubicForm(self.0.to_f64())
    }

    /// Fully symmetric trilinear form `u(x;y;z)` with `u(x;x;x) = 6 u(x)`.
    ///
    /// Each monomial `c * x_a x_b x_c` contributes `c` times the sum over
    /// the 6 orderings of `(a, b, c)` assigned to the three slots.
    pub fn polarize3(&self, x: &[S], y: &[S], z: &[S]) -> Result<S, PolyError> {
        self.check_dims(&[x, y, z])?;
        let mut total = S::zero();
        for (alpha, c) in self.0.terms() {
            let f = factor_indices(alpha);
            let mut s = S::zero();
            for [i, j, k] in PERMUTATIONS {
                s = s + x[f[i]].clone() * y[f[j]].clone() * z[f[k]].clone();
            }
            total = total + c.clone() * s;
        }
        Ok(total)
    }

    /// Inclusion-exclusion polarization
    /// `u(x+y+z) - u(x+y) - u(x+z) - u(y+z) + u(x) + u(y) + u(z)`.
    pub fn polarize3_inclusion_exclusion(&self, x: &[S], y: &[S], z: &[S]) -> Result<S, PolyError> {
        self.check_dims(&[x, y, z])?;
        let add = |a: &[S], b: &[S]| -> Vec<S> {
            a.iter().zip(b).map(|(p, q)| p.clone() + q.clone()).collect()
        };
        let u = |v: &[S]| self.0.eval(v);
        let xy = add(x, y);
        let xz = add(x, z);
        let yz = add(y, z);
        let xyz = add(&xy, z);
        Ok(u(&xyz) - u(&xy) - u(&xz) - u(&yz) + u(x) + u(y) + u(z))
    }

    /// Symmetric tensor `T[i][j][k] = d^3 u / dx_i dx_j dx_k`, flattened.
    pub fn third_derivatives(&self) -> Vec<S> {
        let n = self.n();
        let mut t = vec![S::zero(); n * n * n];
        for (alpha, c) in self.0.terms() {
            let f = factor_indices(alpha);
            for [i, j, k] in PERMUTATIONS {
                let idx = (f[i] * n + f[j]) * n + f[k];
                t[idx] = t[idx].clone() + c.clone();
            }
        }
        t
    }

    fn check_dims(&self, vs: &[&[S]]) -> Result<(), PolyError> {
        for v in vs {
            if v.len() != self.n() {
                return Err(PolyError::DimensionMismatch {
                    expected: self.n(),
                    found: v.len(),
                });
            }
        }
        Ok(())
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Expands a degree-3 exponent into its three variable indices.
fn factor_indices(alpha: &[u32]) -> [usize; 3] {
    let mut out = [0usize; 3];
    let mut k = 0;
    for (i, &e) in alpha.iter().enumerate() {
        for _ in 0..e {
            out[k] = i;
            k += 1;
        }
    }
    debug_assert_eq!(k, 3);
    out
}

/// Symmetric bilinear metric `Q(x, y) = x^T G y`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMetric<S> {
    g: LinOp<S>,
    identity: bool,
}

impl<S: Scalar> GramMetric<S> {
    pub fn identity(n: usize) -> Self {
        Self {
            g: LinOp::identity(n),
            identity: true,
        }
    }

    pub fn new(g: LinOp<S>) -> Result<Self, crate::error::AlgebraError> {
        if !g.is_symmetric() {
            return Err(crate::error::AlgebraError::NotSymmetric);
        }
        let identity = g == LinOp::identity(g.dim());
        Ok(Self { g, identity })
    }

    pub fn n(&self) -> usize {
        self.g.dim()
    }

    pub fn matrix(&self) -> &LinOp<S> {
        &self.g
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn inner(&self, x: &[S], y: &[S]) -> S {
        if self.identity {
            dot(x, y)
        } else {
            dot(x, &self.g.apply(y))
        }
    }

    /// Leading principal minors in exact mode; smallest eigenvalue above
    /// `1e-12` times the largest in float mode.
    pub fn is_positive_definite(&self) -> bool {
        if self.identity {
            return true;
        }
        if S::EXACT {
            self.g
                .leading_minors()
                .iter()
                .all(|m| !m.is_zero() && !m.is_negative())
        } else {
            let eig = self.g.to_nalgebra().symmetric_eigenvalues();
            let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            max > 0.0 && min > 1e-12 * max
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> GramMetric<T> {
        GramMetric {
            g: self.g.map(f),
            identity: self.identity,
        }
    }
}

/// Weighting used by [`inner_poly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InnerScheme {
    /// `sum_alpha p_alpha q_alpha`.
    #[default]
    CoefficientL2,
    /// Mean of `p q` over the unit sphere.
    SphereL2,
}

impl std::str::FromStr for InnerScheme {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coefficient-l2" | "coeff" => Ok(Self::CoefficientL2),
            "sphere-l2" | "sphere" => Ok(Self::SphereL2),
            other => Err(PolyError::UnknownScheme(other.to_string())),
        }
    }
}

impl fmt::Display for InnerScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CoefficientL2 => "coefficient-l2",
            Self::SphereL2 => "sphere-l2",
        })
    }
}

/// Inner product of two homogeneous polynomials of equal shape.
pub fn inner_poly<S: Scalar>(
    p: &HomoPoly<S>,
    q: &HomoPoly<S>,
    scheme: InnerScheme,
) -> Result<S, PolyError> {
    if p.n() != q.n() {
        return Err(PolyError::DimensionMismatch {
            expected: p.n(),
            found: q.n(),
        });
    }
    if p.is_zero() || q.is_zero() {
        return Ok(S::zero());
    }
    if p.degree() != q.degree() {
        return Err(PolyError::DegreeMismatch(p.degree(), q.degree()));
    }
    Ok(match scheme {
        InnerScheme::CoefficientL2 => p
            .terms()
            .fold(S::zero(), |acc, (a, c)| acc + c.clone() * q.coeff(a)),
        InnerScheme::SphereL2 => {
            let mut total = S::zero();
            for (a, c) in p.terms() {
                for (b, e) in q.terms() {
                    let sum: Exponent = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    let m = sphere_moment(&sum, p.n());
                    if !num_traits::Zero::is_zero(&m) {
                        total = total + c.clone() * e.clone() * S::from_rational(&m);
                    }
                }
            }
            total
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn p(text: &str, n: usize) -> HomoPoly<Rational> {
        HomoPoly::parse(text, n).unwrap()
    }

    #[test]
    fn parse_examples() {
        let u = p("x1^3 - 3*x1*x2^2", 2);
        assert_eq!(u.degree(), 3);
        assert_eq!(u.num_terms(), 2);
        assert_eq!(u.coeff(&[3, 0]), rat(1, 1));
        assert_eq!(u.coeff(&[1, 2]), rat(-3, 1));

        let z = p("0", 3);
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
        assert_eq!(z, HomoPoly::zero(3));

        let v = p("2/3*x1^2*x2", 2);
        assert_eq!(v.coeff(&[2, 1]), rat(2, 3));
    }

    #[test]
    fn parse_accepts_whitespace_decimals_and_repeats() {
        let u = p(" - 0.5 * x1 * x1 * x2 + x2^ 3 + x1^2*x2", 2);
        assert_eq!(u.coeff(&[2, 1]), rat(1, 2));
        assert_eq!(u.coeff(&[0, 3]), rat(1, 1));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            HomoPoly::parse("x1^3 + x2", 2),
            Err(PolyError::MixedDegree { expected: 3, found: 1, .. })
        ));
        assert!(matches!(
            HomoPoly::parse("x3^3", 2),
            Err(PolyError::VariableOutOfRange { index: 3, n: 2 })
        ));
        assert!(matches!(
            HomoPoly::parse("x0", 2),
            Err(PolyError::VariableOutOfRange { index: 0, .. })
        ));
        match HomoPoly::parse("x1^3 + * x2", 2) {
            Err(PolyError::Syntax { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(HomoPoly::parse("", 2), Err(PolyError::Syntax { .. })));
        assert!(matches!(HomoPoly::parse("x1 x2", 2), Err(PolyError::Syntax { .. })));
        assert!(matches!(HomoPoly::parse("1/0*x1", 2), Err(PolyError::Syntax { .. })));
        assert!(matches!(HomoPoly::parse("x1^0", 2), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn cancelling_terms_give_zero() {
        let z = p("x1*x2 - x2*x1", 2);
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
    }

    #[test]
    fn printer_is_canonical() {
        let u = p("-3*x1*x2^2 + x1^3", 2);
        assert_eq!(u.to_string(), "x1^3 - 3*x1*x2^2");
        let v = p("x2^3 - 2/3*x1^2*x2", 2);
        assert_eq!(v.to_string(), "-2/3*x1^2*x2 + x2^3");
        assert_eq!(HomoPoly::<Rational>::zero(2).to_string(), "0");
        assert_eq!(p("5", 2).to_string(), "5");
    }

    #[test]
    fn partial_examples() {
        let u = p("x1^3", 2);
        assert_eq!(u.partial(0).unwrap(), p("3*x1^2", 2));
        assert!(u.partial(1).unwrap().is_zero());
        assert_eq!(p("x1^2*x2", 2).partial(0).unwrap(), p("2*x1*x2", 2));
        assert!(matches!(
            u.partial(2),
            Err(PolyError::VariableOutOfRange { index: 3, n: 2 })
        ));
    }

    #[test]
    fn polarize_examples() {
        let e1 = vec![rat(1, 1), rat(0, 1)];
        let e2 = vec![rat(0, 1), rat(1, 1)];
        let u = CubicForm::new(p("x1^3", 2)).unwrap();
        assert_eq!(u.polarize3(&e1, &e1, &e1).unwrap(), rat(6, 1));
        let v = CubicForm::new(p("x1^2*x2", 2)).unwrap();
        assert_eq!(v.polarize3(&e1, &e1, &e2).unwrap(), rat(2, 1));
        assert_eq!(v.polarize3_inclusion_exclusion(&e1, &e1, &e2).unwrap(), rat(2, 1));
        let z = CubicForm::<Rational>::zero(2);
        assert_eq!(z.polarize3(&e1, &e2, &e1).unwrap(), rat(0, 1));
        assert!(matches!(
            u.polarize3(&e1, &e1, &[rat(1, 1)]),
            Err(PolyError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn cubic_form_rejects_other_degrees() {
        assert_eq!(CubicForm::new(p("x1^2", 2)), Err(PolyError::NotCubic(2)));
        assert!(CubicForm::new(p("0", 2)).is_ok());
    }

    #[test]
    fn inner_poly_examples() {
        let a = p("x1^2", 2);
        assert_eq!(inner_poly(&a, &a, InnerScheme::CoefficientL2).unwrap(), rat(1, 1));
        let x1 = p("x1", 3);
        assert_eq!(inner_poly(&x1, &x1, InnerScheme::SphereL2).unwrap(), rat(1, 3));
        let b = p("x2^2", 2);
        assert_eq!(inner_poly(&a, &b, InnerScheme::SphereL2).unwrap(), rat(1, 8));
        assert!(matches!(
            inner_poly(&a, &p("x1^3", 2), InnerScheme::CoefficientL2),
            Err(PolyError::DegreeMismatch(2, 3))
        ));
        assert!(matches!(
            "l1".parse::<InnerScheme>(),
            Err(PolyError::UnknownScheme(_))
        ));
    }

    #[test]
    fn gram_metric_positive_definiteness() {
        let g = GramMetric::new(LinOp::from_rows(vec![
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ]))
        .unwrap();
        assert!(g.is_positive_definite());
        assert!(g.map(|v| v.to_f64()).is_positive_definite());
        let h = GramMetric::new(LinOp::from_rows(vec![
            vec![rat(1, 1), rat(2, 1)],
            vec![rat(2, 1), rat(1, 1)],
        ]))
        .unwrap();
        assert!(!h.is_positive_definite());
        assert!(!h.map(|v| v.to_f64()).is_positive_definite());
        assert!(GramMetric::new(LinOp::from_rows(vec![
            vec![rat(1, 1), rat(2, 1)],
            vec![rat(0, 1), rat(1, 1)],
        ]))
        .is_err());
    }

    #[test]
    fn linear_substitution_matches_evaluation() {
        let u = p("x1^3 - 3*x1*x2^2 + 2*x2^3", 2);
        let m = LinOp::from_rows(vec![vec![rat(1, 2), rat(1, 1)], vec![rat(-1, 1), rat(3, 1)]]);
        let v = u.linear_substitute(&m);
        let z = vec![rat(2, 1), rat(-5, 3)];
        assert_eq!(v.eval(&z), u.eval(&m.apply(&z)));
    }

    #[test]
    fn exponent_enumeration() {
        let e = exponents(2, 3);
        assert_eq!(e, vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
        assert_eq!(exponents(3, 3).len(), 10);
        assert_eq!(exponents(3, 5).len(), 21);
        assert_eq!(exponents(1, 4), vec![vec![4]]);
    }
}
