use metric_jet::catalog::{cantor_distance, cantor_distance_exact, contact_closed_form, entry, entry_with_dim, fp_map};
use metric_jet::contact::{estimate_contact, gdiff_1d, verify_contact, GDiffOutcome};
use metric_jet::extrema::first_order_min_test;
use metric_jet::spaces::{star, star_inv, ContractingSpace, Norm, Scalar, ValuedMonoid, Variant};
use metric_jet::tangency::{tangency_test, SamplingConfig, TangencyStatus};
use metric_jet::FunctionHandle;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn cfg() -> SamplingConfig {
    SamplingConfig::default()
}

fn norm_strategy() -> impl Strategy<Value = Norm> {
    prop_oneof![Just(Norm::L1), Just(Norm::L2), Just(Norm::LInf)]
}

fn point(dim: usize, span: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-span..span, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn star_round_trip(
        base in point(3, 5.0),
        x in point(3, 5.0),
        t in 0.01f64..10.0,
        k in 0u32..12,
        std in any::<bool>(),
        neg in any::<bool>(),
    ) {
        let (monoid, variant, scalar) = if std {
            (ValuedMonoid::Reals, Variant::StandardReal, Scalar::Real(if neg { -t } else { t }))
        } else {
            (ValuedMonoid::nr(0.5).unwrap(), Variant::Canonical, Scalar::Nat(k))
        };
        let s = ContractingSpace::new(base, Norm::L2, variant, monoid).unwrap();
        let y = star(&s, &scalar, &x).unwrap();
        let back = star_inv(&s, &scalar, &y).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()) * 1e3);
        }
        // d(t⋆x, t⋆base) = v(t) d(x, base)
        let v = match scalar { Scalar::Real(t) => t.abs(), Scalar::Nat(k) => 0.5f64.powi(k as i32), Scalar::Infinity => 0.0 };
        let lhs = s.dist(&y, &s.base);
        prop_assert!((lhs - v * s.dist(&x, &s.base)).abs() <= 1e-9 * (1.0 + lhs));
    }

    #[test]
    fn giseh_is_one_lipschitz(x in -2.0f64..30.0, y in -2.0f64..30.0) {
        prop_assert!((cantor_distance(x) - cantor_distance(y)).abs() <= (x - y).abs() * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn giseh_scales_by_three(n in -500i64..5000, d in 1i64..400) {
        let x = BigRational::new(BigInt::from(n), BigInt::from(d));
        let three = BigInt::from(3);
        prop_assert_eq!(cantor_distance_exact(&(&x * &three)), cantor_distance_exact(&x) * three);
    }

    #[test]
    fn fp_maps_are_two_lipschitz(p in norm_strategy(), x in point(3, 4.0), y in point(3, 4.0)) {
        let f = fp_map(p, 3);
        let lhs = p.dist(&f.eval(&x), &f.eval(&y));
        prop_assert!(lhs <= 2.0 * p.dist(&x, &y) * (1.0 + 1e-12) + 1e-15, "{lhs} vs {}", p.dist(&x, &y));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // two distinct homogeneous maps are never tangent at the centre
    #[test]
    fn homogeneous_maps_tangent_only_if_equal(
        rows in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 2),
        bump in prop::collection::vec(-1.0f64..1.0, 4),
        eps in 1e-3f64..1.0,
    ) {
        let bn: f64 = bump.iter().map(|b| b * b).sum::<f64>().sqrt();
        prop_assume!(bn > 1e-2);
        let other: Vec<Vec<f64>> = (0..2)
            .map(|i| (0..2).map(|j| rows[i][j] + eps * bump[2 * i + j] / bn).collect())
            .collect();
        let (l, m) = (FunctionHandle::linear(rows.clone()), FunctionHandle::linear(other));
        let v = tangency_test(&l, &m, &[0.0, 0.0], &cfg()).unwrap();
        prop_assert_eq!(v.status, TangencyStatus::NotTangent);
        let same = tangency_test(&l, &l, &[0.0, 0.0], &cfg()).unwrap();
        prop_assert_eq!(same.status, TangencyStatus::Tangent);
    }

    // the contact of a homogeneous map at its centre is the map itself
    #[test]
    fn homogeneous_reconstruction(
        idx in 0usize..5,
        dim in 2usize..4,
        x in point(3, 3.0),
    ) {
        let name = ["max", "min", "n1", "n2", "ninf"][idx];
        let f = entry_with_dim(name, dim).unwrap().handle;
        let z = vec![0.0; dim];
        let h = estimate_contact(&f, &z, &ValuedMonoid::NonnegReals, &cfg()).unwrap().contact_eval.unwrap();
        let x = &x[..dim];
        prop_assert!((h.eval(x)[0] - f.eval(x)[0]).abs() <= 1e-9 * (1.0 + Norm::L2.norm(x)));
    }

    // a k-lipschitz map has a k-bounded contact
    #[test]
    fn contact_is_bounded(
        idx in 0usize..5,
        a in point(2, 2.0),
        x in point(2, 3.0),
    ) {
        let name = ["max", "min", "n1", "n2", "ninf"][idx];
        let k = if name == "n1" { 2f64.sqrt() } else { 1.0 };
        let f = entry(name).unwrap().handle;
        let v = estimate_contact(&f, &a, &ValuedMonoid::NonnegReals, &cfg()).unwrap();
        let h = v.contact_eval.unwrap();
        prop_assert!(h.eval(&x)[0].abs() <= k * Norm::L2.norm(&x) + 1e-6);
        let cf = contact_closed_form(name, &a, &ValuedMonoid::NonnegReals).unwrap();
        prop_assert!((h.eval(&x)[0] - cf.eval(&x)[0]).abs() <= 1e-6 * (1.0 + Norm::L2.norm(&x)));
    }

    #[test]
    fn one_dimensional_assembly(left in -3.0f64..3.0, right in -3.0f64..3.0, c in -2.0f64..2.0, a in -1.0f64..1.0) {
        let f = FunctionHandle::real("kink", move |x| {
            let t = x - a;
            (if t >= 0.0 { right * t } else { left * t }) + c * t * t
        });
        let GDiffOutcome::GDiff(d) = gdiff_1d(&f, a, &cfg()) else {
            return Err(TestCaseError::fail("no G-differential"));
        };
        prop_assert!((d.left - left).abs() < 1e-6 && (d.right - right).abs() < 1e-6, "{d:?}");
        prop_assert!(verify_contact(&f, &[a], &d.assemble(), &cfg()).unwrap());
    }

    #[test]
    fn extremum_verdict_is_scale_invariant(idx in 0usize..6, c in 0.05f64..20.0) {
        let name = ["theta", "identity", "square", "n1", "n2", "max"][idx];
        let f = entry(name).unwrap().handle;
        let z = vec![0.0; f.dim_in];
        let g = f.scale(c);
        let m = ValuedMonoid::NonnegReals;
        let vf = first_order_min_test(&f, &z, &m, &cfg()).unwrap();
        let vg = first_order_min_test(&g, &z, &m, &cfg()).unwrap();
        prop_assert_eq!(vf.status, vg.status);
    }
}
