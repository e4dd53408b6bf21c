use cubalg::fixtures::{random_cubic, random_rational_vector};
use cubalg::identities::{l01_poly, l02_poly, l03_residual};
use cubalg::scalar::{dot, rat};
use cubalg::search::idempotents::{find_idempotents, refine_idempotent, IdempotentConfig};
use cubalg::{FSAlgebra, GramMetric, LinOp, Rational};
use proptest::prelude::*;

fn setup(n: usize, seed: u64) -> (FSAlgebra<Rational>, [Vec<Rational>; 3]) {
    let a = FSAlgebra::euclidean(random_cubic(n, seed));
    let v = |s| random_rational_vector(n, seed, s);
    (a, [v(0), v(1), v(2)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_commutative_and_invariant(n in 1usize..=5, seed in 0u64..10_000) {
        let (a, [x, y, z]) = setup(n, seed);
        prop_assert_eq!(a.product(&x, &y), a.product(&y, &x));
        prop_assert_eq!(a.inner(&a.product(&x, &y), &z), a.inner(&x, &a.product(&y, &z)));
    }

    #[test]
    fn invariance_under_general_metric(seed in 0u64..10_000) {
        let g = LinOp::from_rows(vec![
            vec![rat(2, 1), rat(1, 1), rat(0, 1)],
            vec![rat(1, 1), rat(3, 1), rat(1, 2)],
            vec![rat(0, 1), rat(1, 2), rat(1, 1)],
        ]);
        let a = FSAlgebra::new(random_cubic(3, seed), GramMetric::new(g).unwrap()).unwrap();
        let v = |s| random_rational_vector(3, seed, s);
        let (x, y, z) = (v(0), v(1), v(2));
        let xy_z = a.inner(&a.product(&x, &y), &z);
        prop_assert_eq!(xy_z.clone(), a.inner(&x, &a.product(&y, &z)));
        prop_assert_eq!(xy_z, a.cubic().polarize3(&x, &y, &z).unwrap());
    }

    #[test]
    fn b_vector_is_basis_independent(seed in 0u64..10_000) {
        let m = LinOp::from_rows(vec![
            vec![rat(3, 5), rat(-4, 5), rat(0, 1)],
            vec![rat(4, 5), rat(3, 5), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(-1, 1)],
        ]);
        let u = random_cubic(3, seed);
        let rotated = cubalg::CubicForm::new(u.poly().linear_substitute(&m)).unwrap();
        let b = FSAlgebra::euclidean(u).b_vector().unwrap().to_vec();
        let b_rot = FSAlgebra::euclidean(rotated).b_vector().unwrap().to_vec();
        prop_assert_eq!(b_rot, m.transpose().apply(&b));
    }

    #[test]
    fn polarization_chain_exact(n in 1usize..=3, seed in 0u64..10_000) {
        let (a, [q, x, y]) = setup(n, seed);
        let l02 = l02_poly(&a, &q).unwrap();
        prop_assert_eq!(l01_poly(&a, &q).unwrap().gradient(), l02.clone());
        let dir: Vec<Rational> = l02.iter().map(|p| dot(&p.gradient_at(&x), &y)).collect();
        let l03y: Vec<Rational> = l03_residual(&a, &q, &x).unwrap().apply(&y)
            .into_iter().map(|v| v * rat(4, 1)).collect();
        prop_assert_eq!(dir, l03y);
    }

    #[test]
    fn idempotents_scale_inversely(seed in 0u64..1000, t in prop::sample::select(vec![2i64, -3, 5])) {
        let a = FSAlgebra::euclidean(random_cubic(2, seed)).to_f64();
        let at = FSAlgebra::euclidean(random_cubic(2, seed)).scaled(&rat(t, 1)).to_f64();
        let cfg = IdempotentConfig { restarts: 24, ..IdempotentConfig::default() };
        let tf = t as f64;
        let defect = |alg: &FSAlgebra<f64>, c: &[f64]| {
            alg.square(c).iter().zip(c).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
        };
        let base = find_idempotents(&a, &cfg);
        let scaled = find_idempotents(&at, &cfg);
        prop_assert!(!base.idempotents.is_empty() && !scaled.idempotents.is_empty());
        for c in &base.idempotents {
            let d: Vec<f64> = c.c.iter().map(|v| v / tf).collect();
            prop_assert!(defect(&at, &d) <= 1e-9, "c/t not idempotent for c = {:?}", c.c);
        }
        for d in &scaled.idempotents {
            let c: Vec<f64> = d.c.iter().map(|v| v * tf).collect();
            prop_assert!(defect(&a, &c) <= 1e-9 * (1.0 + tf.abs()), "t d not idempotent for d = {:?}", d.c);
        }
    }
}

#[test]
fn newton_converges_quadratically() {
    let a = FSAlgebra::euclidean(random_cubic(3, 4)).to_f64();
    let found = find_idempotents(&a, &IdempotentConfig::default());
    let c = &found.idempotents[0].c;
    let start: Vec<f64> = c.iter().enumerate().map(|(i, v)| v + 1e-3 * (i as f64 + 1.0)).collect();
    let (end, history) = refine_idempotent(&a, &start, 50, 1e-15);
    assert!(history.last().unwrap() < &1e-13);
    assert!(end.iter().zip(c).all(|(p, q)| (p - q).abs() < 1e-10));
    let steps: Vec<f64> = history.windows(2).filter(|w| w[1] > 1e-13).map(|w| w[1] / (w[0] * w[0])).collect();
    assert!(!steps.is_empty());
    assert!(steps.iter().all(|r| *r < 1e3), "{history:?}");
}
