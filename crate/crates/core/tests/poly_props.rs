use cubalg::poly::exponents;
use cubalg::scalar::rat;
use cubalg::{CubicForm, HomoPoly, Rational};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn cubic(n: usize) -> impl Strategy<Value = CubicForm<Rational>> {
    let k = exponents(n, 3).len();
    prop::collection::vec(rational(), k).prop_map(move |cs| {
        let terms = exponents(n, 3).into_iter().zip(cs);
        CubicForm::new(HomoPoly::from_terms(n, terms).unwrap()).unwrap()
    })
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), n)
}

fn case() -> impl Strategy<Value = (CubicForm<Rational>, [Vec<Rational>; 4], Rational)> {
    (1usize..=4).prop_flat_map(|n| {
        (cubic(n), [vector(n), vector(n), vector(n), vector(n)], rational())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polarization_is_symmetric((u, [x, y, z, _], _) in case()) {
        let v = u.polarize3(&x, &y, &z).unwrap();
        for (a, b, c) in [(&y, &x, &z), (&x, &z, &y), (&z, &y, &x), (&y, &z, &x)] {
            prop_assert_eq!(u.polarize3(a, b, c).unwrap(), v.clone());
        }
        prop_assert_eq!(u.polarize3_inclusion_exclusion(&x, &y, &z).unwrap(), v);
    }

    #[test]
    fn polarization_is_linear((u, [x, y, z, w], t) in case()) {
        let comb: Vec<Rational> = x.iter().zip(&w).map(|(a, b)| t.clone() * a + b).collect();
        let lhs = u.polarize3(&comb, &y, &z).unwrap();
        let rhs = u.polarize3(&x, &y, &z).unwrap() * t + u.polarize3(&w, &y, &z).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn diagonal_is_six_u((u, [x, ..], _) in case()) {
        prop_assert_eq!(u.polarize3(&x, &x, &x).unwrap(), u.poly().eval(&x) * rat(6, 1));
    }

    #[test]
    fn euler_relation((u, _, _) in case()) {
        prop_assert_eq!(u.poly().euler(), u.poly().scale(&rat(3, 1)));
    }

    #[test]
    fn print_parse_round_trip((u, _, _) in case()) {
        let text = u.poly().to_string();
        prop_assert_eq!(&HomoPoly::parse(&text, u.n()).unwrap(), u.poly());
    }

    #[test]
    fn float_gradient_matches_differences((u, [x, ..], _) in case()) {
        let f = u.poly().to_f64();
        let xf: Vec<f64> = x.iter().map(cubalg::Scalar::to_f64).collect();
        let g = f.gradient_at(&xf);
        let h = 1e-5;
        for i in 0..xf.len() {
            let (mut a, mut b) = (xf.clone(), xf.clone());
            a[i] += h;
            b[i] -= h;
            let fd = (f.eval(&a) - f.eval(&b)) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()), "{} vs {}", fd, g[i]);
        }
    }
}

#[test]
fn parse_rejects_non_cubic() {
    let p = HomoPoly::parse("x1^2 + x2^2", 2).unwrap();
    assert!(CubicForm::new(p).is_err());
    assert!(HomoPoly::parse("x1^3 + x2", 2).is_err());
    assert!(HomoPoly::parse("x3^3", 2).is_err());
}
