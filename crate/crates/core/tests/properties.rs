use cubic_thue::bounds::epsilon_real;
use cubic_thue::real::{Complex, Real};
use cubic_thue::reduction::{find_equivalence, is_reduced, reduce, ReducedForm};
use cubic_thue::resolvent::{build_resolvents, check_cosi, classify};
use cubic_thue::solver::enumerate_points;
use cubic_thue::{CubicForm, UnimodularMatrix};
use proptest::prelude::*;
use rug::Integer;

fn any_form(bound: i64) -> impl Strategy<Value = CubicForm> {
    (-bound..=bound, -bound..=bound, -bound..=bound, -bound..=bound)
        .prop_filter_map("zero form", |(a, b, c, d)| CubicForm::try_new(a, b, c, d).ok())
}

fn big_form() -> impl Strategy<Value = CubicForm> {
    (any::<i64>(), any::<i64>(), any::<i64>(), any::<i64>(), 0u32..64).prop_filter_map("zero form", |(a, b, c, d, s)| {
        let big = |v: i64| Integer::from(v) << s;
        CubicForm::try_new(big(a), big(b), big(c), big(d)).ok()
    })
}

fn positive_irreducible(bound: i64) -> impl Strategy<Value = CubicForm> {
    any_form(bound).prop_filter("need D > 0 and irreducible", |f| f.discriminant() > 0 && f.is_irreducible())
}

fn matrix() -> impl Strategy<Value = UnimodularMatrix> {
    prop::collection::vec((0u8..3, -7i64..=7), 0..10).prop_map(|steps| {
        steps.into_iter().fold(UnimodularMatrix::identity(), |m, (kind, t)| {
            let step = match kind {
                0 => UnimodularMatrix::translation(t),
                1 => UnimodularMatrix::rotation(),
                _ => UnimodularMatrix::swap(),
            };
            m.compose(&step)
        })
    })
}

fn point() -> impl Strategy<Value = (i64, i64)> {
    (-10_000i64..=10_000, -10_000i64..=10_000).prop_filter("nonzero", |&(x, y)| (x, y) != (0, 0))
}

/// `|v - exact| <= tol` in the interval sense.
fn close(v: &Real, exact: &Integer, tol: f64) -> bool {
    let p = v.prec();
    v.sub(&Real::from_int(exact, p)).mag().to_f64() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn syzygy_holds(f in any_form(1_000_000)) {
        prop_assert!(f.syzygy_holds());
    }

    #[test]
    fn syzygy_holds_for_huge_coefficients(f in big_form()) {
        prop_assert!(f.syzygy_holds());
    }

    #[test]
    fn hessian_discriminant(f in any_form(100_000)) {
        prop_assert_eq!(f.hessian().discriminant(), Integer::from(-3) * f.discriminant());
    }

    #[test]
    fn covariants_transform(f in any_form(1000), m in matrix()) {
        let g = f.apply(&m);
        prop_assert_eq!(g.discriminant(), f.discriminant());
        prop_assert_eq!(g.hessian(), f.hessian().apply(&m));
        let expected = if m.det() == 1 { f.g_covariant().apply(&m) } else { f.g_covariant().apply(&m).negate() };
        prop_assert_eq!(g.g_covariant(), expected);
    }

    #[test]
    fn action_composes(f in any_form(100), p in matrix(), q in matrix()) {
        prop_assert_eq!(f.apply(&p).apply(&q), f.apply(&p.compose(&q)));
        prop_assert_eq!(f.apply(&p).apply(&p.inverse()), f);
    }

    #[test]
    fn reduce_gives_reduced_witness(f in positive_irreducible(60), m in matrix()) {
        let g = f.apply(&m);
        let r = reduce(&g).unwrap();
        prop_assert!(is_reduced(&r.reduced_form).unwrap());
        prop_assert_eq!(g.apply(&r.transform), r.reduced_form.clone());
        prop_assert_eq!(r.reduced_form.discriminant(), f.discriminant());
        // Reducing again changes nothing about reducedness.
        prop_assert!(is_reduced(&reduce(&r.reduced_form).unwrap().reduced_form).unwrap());
    }

    #[test]
    fn equivalence_witness(f in positive_irreducible(30), m in matrix()) {
        let g = f.apply(&m);
        let w = find_equivalence(&f, &g).unwrap().expect("equivalent by construction");
        prop_assert_eq!(f.apply(&w), g);
    }

    #[test]
    fn hessian_bounds_on_reduced_forms(f in positive_irreducible(60), (x, y) in point()) {
        let r = reduce(&f).unwrap().reduced_form;
        let rf = ReducedForm::new(r).unwrap();
        let (x, y) = (Integer::from(x), Integer::from(y));
        if y != 0 {
            prop_assert!(rf.check_hessian_lower_bound(&x, &y).unwrap());
        }
        prop_assert!(rf.check_hessian_y_bound(&x, &y));
    }

    #[test]
    fn resolvent_identities(f in positive_irreducible(200), (x, y) in point()) {
        let set = build_resolvents(&f).unwrap();
        let (xi, yi) = (Integer::from(x), Integer::from(y));
        let hv = f.hessian().eval(&xi, &yi);
        let gv = f.g_covariant().eval(&xi, &yi);
        let fv = f.eval(&xi, &yi);
        let scale = Integer::from(hv.abs_ref()).to_f64().max(1.0).powf(1.5);
        for pair in set.pairs() {
            let xv = pair.xi(&xi, &yi);
            let ev = pair.eta(&xi, &yi);
            // xi eta = H, xi^3 + eta^3 = G.
            let prod = xv.mul(&ev);
            prop_assert!(close(&prod.re, &hv, 1e-20 * scale));
            prop_assert!(prod.im.mag().to_f64() <= 1e-20 * scale);
            let sum = xv.cube().add(&ev.cube());
            prop_assert!(close(&sum.re, &gv, 1e-20 * scale));
            // xi^3 - eta^3 = 3 sqrt(-3D) F is purely imaginary.
            let diff = xv.cube().sub(&ev.cube());
            let p = diff.re.prec();
            let three_d = Real::from_int(&(Integer::from(3) * f.discriminant()), p).sqrt();
            let target = three_d.mul_int(&(Integer::from(3) * &fv));
            prop_assert!(diff.re.mag().to_f64() <= 1e-20 * scale);
            prop_assert!(diff.im.sub(&target).mag().to_f64() <= 1e-20 * scale);
            // eta is the conjugate of xi at integer points.
            let conj: Complex = xv.conj();
            prop_assert!(conj.sub(&ev).abs().mag().to_f64() <= 1e-20 * scale.cbrt());
        }
    }

    #[test]
    fn solutions_satisfy_angle_bound(f in positive_irreducible(12), h in 1u64..6) {
        let set = build_resolvents(&f).unwrap();
        for (x, y) in enumerate_points(&f, h, 60).unwrap() {
            let data = classify(&set, &Integer::from(x), &Integer::from(y)).unwrap();
            prop_assert!(!data.tie);
            prop_assert!(check_cosi(&data), "({}, {}) {:?}", x, y, data);
        }
    }

    #[test]
    fn epsilon_relation(d in 1u64..1_000_000_000, h in 1u64..100) {
        // 2 pi h = (3D)^(1/4 - eps).
        let (dd, hh) = (Integer::from(d), Integer::from(h));
        let p = 128;
        let eps = epsilon_real(&dd, &hh, p);
        let rhs = Real::from_ratio(1, 4, p).sub(&eps).mul(&Real::from_int(&(Integer::from(3) * &dd), p).ln()).exp();
        let lhs = Real::pi(p).mul_int(&Integer::from(2 * h));
        prop_assert!(lhs.sub(&rhs).mag().to_f64() <= 1e-25 * lhs.mag().to_f64());
    }

    #[test]
    fn interval_contains_float_result(a in -1e6f64..1e6, b in 1e-3f64..1e6) {
        let p = 96;
        let (ra, rb) = (Real::from_f64(a, p), Real::from_f64(b, p));
        for (r, v) in [
            (ra.add(&rb), a + b),
            (ra.mul(&rb), a * b),
            (ra.div(&rb), a / b),
            (rb.sqrt(), b.sqrt()),
            (rb.ln(), b.ln()),
        ] {
            let tol = v.abs() * 4.0 * f64::EPSILON + 1e-300;
            prop_assert!(r.lo().to_f64() <= v + tol && v - tol <= r.hi().to_f64(), "{} not in {:?}", v, r);
        }
    }
}
