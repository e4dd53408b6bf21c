//! Named cubic forms with closed-form facts. Every fact carries a routine
//! that re-derives it in exact arithmetic; [`fixture`] runs them all before
//! returning.

use rand::Rng;
use serde::Serialize;

use crate::error::FixtureError;
use crate::fsalg::FSAlgebra;
use crate::identities::c04_check;
use crate::ops::{
    equivalence_check, grad_norm_sq, inf_laplace_residual, laplacian, p_laplace_residual,
    radial_residual, PParam,
};
use crate::poly::{exponents, CubicForm, Exponent, HomoPoly};
use crate::scalar::{rat, Rational};
use crate::search::restart_rng;

type Verify = fn(&FSAlgebra<Rational>) -> bool;

#[derive(Clone, Serialize)]
pub struct Fact {
    pub name: &'static str,
    pub statement: &'static str,
    #[serde(skip)]
    verify: Verify,
}

impl Fact {
    pub fn verify(&self, a: &FSAlgebra<Rational>) -> bool {
        (self.verify)(a)
    }
}

impl std::fmt::Debug for Fact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fact").field("name", &self.name).finish()
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub algebra: FSAlgebra<Rational>,
    pub facts: Vec<Fact>,
}

#[derive(Serialize)]
struct FixtureJson<'a> {
    name: &'a str,
    description: &'a str,
    n: usize,
    cubic: String,
    facts: &'a [Fact],
}

impl Fixture {
    pub fn cubic(&self) -> &CubicForm<Rational> {
        self.algebra.cubic()
    }

    pub fn n(&self) -> usize {
        self.algebra.n()
    }

    /// The cubic in the polynomial text format.
    pub fn to_text(&self) -> String {
        self.cubic().poly().to_string()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FixtureJson {
            name: self.name,
            description: self.description,
            n: self.n(),
            cubic: self.to_text(),
            facts: &self.facts,
        })
        .expect("fixture serializes")
    }
}

pub const NAMES: [&str; 5] = [
    "linear_cube_2d",
    "linear_form_cube_3d",
    "harmonic_2d",
    "zero_3d",
    "random_3d",
];

fn poly(text: &str, n: usize) -> HomoPoly<Rational> {
    HomoPoly::parse(text, n).expect("fixture text parses")
}

fn r(n: i64) -> Rational {
    rat(n, 1)
}

/// `x^2` as polynomials equals the given components.
fn square_map_is(a: &FSAlgebra<Rational>, comps: &[&str]) -> bool {
    let x = a.coordinate_vector();
    let sq = a.product_poly(&x, &x);
    sq.iter().zip(comps).all(|(s, t)| *s == poly(t, a.n()))
}

fn p_laplace_is(a: &FSAlgebra<Rational>, p: i64, expected: &HomoPoly<Rational>) -> bool {
    p_laplace_residual(a.cubic().poly(), &PParam::from_int(p)).is_ok_and(|r| r == *expected)
}

fn linear_cube_2d() -> Fixture {
    Fixture {
        name: "linear_cube_2d",
        description: "cube of the coordinate x1 in two variables",
        algebra: FSAlgebra::euclidean(CubicForm::new(poly("x1^3", 2)).expect("cubic")),
        facts: vec![
            Fact {
                name: "square-map",
                statement: "x^2 = (6 x1^2, 0), so the only idempotent is e1/6",
                verify: |a| square_map_is(a, &["6*x1^2", "0"]),
            },
            Fact {
                name: "idempotent",
                statement: "c = e1/6 satisfies c^2 = c",
                verify: |a| {
                    let c = vec![rat(1, 6), r(0)];
                    a.square(&c) == c
                },
            },
            Fact {
                name: "b-vector",
                statement: "b = 6 e1",
                verify: |a| a.b_vector().is_ok_and(|b| b == [r(6), r(0)]),
            },
            Fact {
                name: "c04-at-idempotent",
                statement: "L_c^3 = c (x) c / |c|^2 at c = e1/6",
                verify: |a| c04_check(a, &[rat(1, 6), r(0)], 0.0).passed(),
            },
            Fact {
                name: "p-laplace",
                statement: "Delta_p u = 54 (p - 1) x1^5",
                verify: |a| {
                    [-1i64, 0, 1, 3, 7]
                        .iter()
                        .all(|&p| p_laplace_is(a, p, &poly("x1^5", 2).scale(&r(54 * (p - 1)))))
                },
            },
            Fact {
                name: "infinity-laplace",
                statement: "Delta_inf u = 108 x1^5",
                verify: |a| inf_laplace_residual(a.cubic().poly()) == poly("108*x1^5", 2),
            },
        ],
    }
}

fn linear_form_cube_3d() -> Fixture {
    Fixture {
        name: "linear_form_cube_3d",
        description: "cube of the linear form x1 - x2 + 2 x3",
        algebra: FSAlgebra::euclidean(
            CubicForm::new(poly("x1 - x2 + 2*x3", 3).pow(3)).expect("cubic"),
        ),
        facts: vec![
            Fact {
                name: "p-laplace",
                statement: "Delta_p u = 54 (p - 1) |a|^4 (a.x)^5 with |a|^2 = 6",
                verify: |a| {
                    let a5 = poly("x1 - x2 + 2*x3", 3).pow(5);
                    [-1i64, 0, 1, 3]
                        .iter()
                        .all(|&p| p_laplace_is(a, p, &a5.scale(&r(54 * 36 * (p - 1)))))
                },
            },
            Fact {
                name: "idempotent",
                statement: "c = a / (6 |a|^4) = (1, -1, 2)/216 satisfies c^2 = c",
                verify: |a| {
                    let c = vec![rat(1, 216), rat(-1, 216), rat(2, 216)];
                    a.square(&c) == c
                },
            },
            Fact {
                name: "b-vector",
                statement: "b = 6 |a|^2 a = 36 (1, -1, 2)",
                verify: |a| a.b_vector().is_ok_and(|b| b == [r(36), r(-36), r(72)]),
            },
        ],
    }
}

fn harmonic_2d() -> Fixture {
    Fixture {
        name: "harmonic_2d",
        description: "planar harmonic cubic x1^3 - 3 x1 x2^2",
        algebra: FSAlgebra::euclidean(CubicForm::new(poly("x1^3 - 3*x1*x2^2", 2)).expect("cubic")),
        facts: vec![
            Fact {
                name: "harmonic",
                statement: "Delta u = 0",
                verify: |a| laplacian(a.cubic().poly()).is_zero(),
            },
            Fact {
                name: "gradient-norm",
                statement: "|Du|^2 = 9 |x|^4",
                verify: |a| {
                    grad_norm_sq(a.cubic().poly()) == HomoPoly::squared_norm(2).pow(2).scale(&r(9))
                },
            },
            Fact {
                name: "b-vector",
                statement: "b = 0",
                verify: |a| a.b_vector().is_ok_and(|b| b.iter().all(|x| *x == r(0))),
            },
            Fact {
                name: "radial",
                statement: "Delta_p u = 54 (p - 2) |x|^2 u",
                verify: |a| {
                    [-1i64, 0, 1, 3, 7].iter().all(|&p| {
                        radial_residual(a.cubic().poly(), &PParam::from_int(p), &r(54 * (p - 2)))
                            .is_ok_and(|res| res.is_zero())
                    })
                },
            },
            Fact {
                name: "square-map",
                statement: "x^2 = (6 x1^2 - 6 x2^2, -12 x1 x2)",
                verify: |a| square_map_is(a, &["6*x1^2 - 6*x2^2", "-12*x1*x2"]),
            },
            Fact {
                name: "idempotents",
                statement: "idempotents are (1/6, 0) and (-1/12, t) with t^2 = 1/48",
                verify: |a| {
                    let c = vec![rat(1, 6), r(0)];
                    // (a, t) is idempotent iff 6a^2 - 6t^2 = a and -12 a t = t;
                    // with t^2 = 1/48 both are linear in the known quantities.
                    let x = rat(-1, 12);
                    let t2 = rat(1, 48);
                    a.square(&c) == c
                        && r(6) * x.clone() * x.clone() - r(6) * t2 == x
                        && r(-12) * x == r(1)
                },
            },
            Fact {
                name: "multiplication-operator",
                statement: "L_c = diag(1, -1) at c = (1/6, 0)",
                verify: |a| {
                    let l = a.lx_matrix(&[rat(1, 6), r(0)]);
                    l.rows() == vec![vec![r(1), r(0)], vec![r(0), r(-1)]]
                },
            },
        ],
    }
}

fn zero_3d() -> Fixture {
    Fixture {
        name: "zero_3d",
        description: "zero form in three variables",
        algebra: FSAlgebra::euclidean(CubicForm::zero(3)),
        facts: vec![
            Fact {
                name: "zero-algebra",
                statement: "every product vanishes",
                verify: |a| {
                    let x = a.coordinate_vector();
                    a.is_zero_algebra() && a.product_poly(&x, &x).iter().all(|p| p.is_zero())
                },
            },
            Fact {
                name: "b-vector",
                statement: "b = 0",
                verify: |a| a.b_vector().is_ok_and(|b| b.iter().all(|x| *x == r(0))),
            },
        ],
    }
}

const RANDOM_3D: &str = "x1^3 - 3*x1^2*x2 + 2*x1*x2*x3 + 5/3*x2^3 - x2^2*x3 + 1/2*x3^3";

fn random_3d() -> Fixture {
    Fixture {
        name: "random_3d",
        description: "fixed rational cubic in three variables with no special structure",
        algebra: FSAlgebra::euclidean(CubicForm::new(poly(RANDOM_3D, 3)).expect("cubic")),
        facts: vec![
            Fact {
                name: "trace-form",
                statement: "Delta u = <b, x>",
                verify: |a| {
                    a.b_vector()
                        .is_ok_and(|b| laplacian(a.cubic().poly()) == HomoPoly::linear(b))
                },
            },
            Fact {
                name: "quintic-identity",
                statement: "4 Delta_p u = <b,x><x^2,x^2> + (p - 2) <x^2,x^3> at p = 3 and p = -1",
                verify: |a| {
                    [3i64, -1].iter().all(|&p| {
                        equivalence_check(a.cubic(), &PParam::from_int(p))
                            .is_ok_and(|rep| rep.certified() == Some(r(p - 2)))
                    })
                },
            },
            Fact {
                name: "square-is-twice-gradient",
                statement: "x^2 = 2 Du(x)",
                verify: |a| {
                    let x = a.coordinate_vector();
                    let sq = a.product_poly(&x, &x);
                    let grad = a.cubic().poly().gradient();
                    sq.iter().zip(&grad).all(|(s, g)| *s == g.scale(&r(2)))
                },
            },
        ],
    }
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    let num: i64 = rng.random_range(-9..=9);
    let den: i64 = rng.random_range(1..=5);
    rat(num, den)
}

/// Reproducible random rational cubic in `n` variables; never zero.
pub fn random_cubic(n: usize, seed: u64) -> CubicForm<Rational> {
    let mut rng = restart_rng(seed, 0);
    let terms: Vec<(Exponent, Rational)> = exponents(n, 3)
        .into_iter()
        .filter_map(|e| {
            let keep = rng.random_bool(0.7);
            let c = random_rational(&mut rng);
            keep.then_some((e, c))
        })
        .collect();
    let mut u = HomoPoly::from_terms(n, terms).expect("cubic exponents");
    if u.is_zero() {
        u = HomoPoly::variable(n, 0).pow(3);
    }
    CubicForm::new(u).expect("degree 3")
}

/// Reproducible random rational vector; `stream` separates draws under one
/// seed.
pub fn random_rational_vector(n: usize, seed: u64, stream: u64) -> Vec<Rational> {
    let mut rng = restart_rng(seed, stream + 1);
    (0..n).map(|_| random_rational(&mut rng)).collect()
}

/// Loads a fixture by name, re-verifying every fact.
pub fn fixture(name: &str) -> Result<Fixture, FixtureError> {
    let f = match name {
        "linear_cube_2d" => linear_cube_2d(),
        "linear_form_cube_3d" => linear_form_cube_3d(),
        "harmonic_2d" => harmonic_2d(),
        "zero_3d" => zero_3d(),
        "random_3d" => random_3d(),
        other => return Err(FixtureError::Unknown(other.to_string(), NAMES.join(", "))),
    };
    for fact in &f.facts {
        if !fact.verify(&f.algebra) {
            return Err(FixtureError::FactFailed {
                fixture: f.name.to_string(),
                fact: fact.name.to_string(),
            });
        }
    }
    Ok(f)
}
