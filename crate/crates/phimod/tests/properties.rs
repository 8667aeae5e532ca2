use phimod::classify::{c_of_mu_params, c_of_point, canonical_class, level_conic_second_point, mu_point, CInvariant};
use phimod::linalg::Matrix;
use phimod::module::{build_family, mu_c, FamilyParams, FilteredPhiModule, ModuleRecord};
use phimod::monodromy::BlockData;
use phimod::scalar::{Cyclo, PrimeContext, Scalar, Valuation};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Scalar> {
    (-40i64..=40, 1i64..=6, -2i64..=2).prop_map(|(n, d, k)| Scalar::frac(n, d) * Scalar::int(7).pow(k))
}

fn cyclo3() -> impl Strategy<Value = Scalar> {
    (rational(), rational()).prop_map(|(a, b)| a + b * Scalar::zeta(Cyclo::Three))
}

fn eps() -> impl Strategy<Value = i8> {
    -1i8..=1
}

fn mu_params() -> impl Strategy<Value = (i8, Scalar, Scalar)> {
    (eps(), rational(), rational()).prop_filter("ab = -1", |(_, a, b)| !(a * b + Scalar::one()).is_zero())
}

fn integer_matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3i64..=3, n * n).prop_map(move |e| Matrix::from_ints(n, n, &e)).prop_filter("singular", |m| !m.det().is_zero())
}

fn p7() -> Scalar {
    Scalar::int(7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chart_and_family_c_agree((e, a, b) in mu_params()) {
        let pt = mu_point(&a, &b, e, &p7()).unwrap();
        let c = c_of_mu_params(&a, &b, e, &p7()).unwrap();
        prop_assert_eq!(c_of_point(&pt, e, &p7()), CInvariant::Finite(c));
    }

    #[test]
    fn block_relations_hold((e, a, b) in mu_params()) {
        prop_assert!(BlockData::for_mu(&a, &b, e, &p7()).unwrap().relations_hold(e, &p7()));
    }

    #[test]
    fn lattice_identity((e, a, b) in mu_params()) {
        prop_assume!(!a.is_zero());
        let p = p7();
        let c = mu_c(&a, &b, e, &p).unwrap();
        let rhs = -((&c + &(Scalar::int(e as i64) * &p) + &p * &p * &b * &b) / a.clone());
        prop_assert_eq!(&a + &(&b * &c), rhs);
    }

    #[test]
    fn conic_second_point_keeps_c((e, a, b) in mu_params(), dir in prop::array::uniform3(-4i64..=4)) {
        let p = p7();
        let pt = mu_point(&a, &b, e, &p).unwrap();
        let CInvariant::Finite(c) = c_of_point(&pt, e, &p) else { return Ok(()) };
        let dir = dir.map(Scalar::int);
        if let Some(q) = level_conic_second_point(&pt, &dir, &c, e, &p) {
            prop_assert_eq!(c_of_point(&q, e, &p), CInvariant::Finite(c));
        }
    }

    #[test]
    fn field_axioms(x in cyclo3(), y in cyclo3(), z in cyclo3()) {
        prop_assert_eq!(&x * &(&y + &z), &x * &y + &x * &z);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        if !x.is_zero() {
            prop_assert_eq!(&x * &(Scalar::one() / x.clone()), Scalar::one());
        }
    }

    #[test]
    fn valuation_is_multiplicative(x in cyclo3(), y in cyclo3()) {
        let ctx = PrimeContext::new(7, 3).unwrap();
        prop_assume!(!x.is_zero() && !y.is_zero());
        let (vx, vy) = (ctx.valuation(&x).unwrap(), ctx.valuation(&y).unwrap());
        prop_assert_eq!(ctx.valuation(&(&x * &y)).unwrap(), vx + vy);
        let vs = ctx.valuation(&(&x + &y)).unwrap();
        prop_assert!(vs >= vx.min(vy) || vs == Valuation::Infinite);
    }

    #[test]
    fn scalar_parse_roundtrip(x in cyclo3()) {
        prop_assert_eq!(Scalar::parse(&x.to_record(), Cyclo::Three).unwrap(), x.clone());
        prop_assert_eq!(Scalar::from_pair(&x.to_pair(), Cyclo::Three).unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn class_is_basis_independent((e, a, b) in mu_params(), g in integer_matrix(2), q in integer_matrix(4)) {
        let ctx = PrimeContext::rational(7).unwrap();
        let d = build_family(&FamilyParams::Mu { eps: e, a, b }, &ctx).unwrap();
        let class = canonical_class(&d).unwrap();
        prop_assert_eq!(canonical_class(&d.rebase_fil1(&g).unwrap()).unwrap(), class.clone());
        prop_assert_eq!(canonical_class(&d.change_basis(&q).unwrap()).unwrap(), class);
    }

    #[test]
    fn module_record_roundtrip((e, a, b) in mu_params()) {
        let ctx = PrimeContext::rational(7).unwrap();
        let d = build_family(&FamilyParams::Mu { eps: e, a, b }, &ctx).unwrap();
        let json = serde_json::to_string(&d.to_record()).unwrap();
        let rec: ModuleRecord = serde_json::from_str(&json).unwrap();
        let back = FilteredPhiModule::from_record(&rec).unwrap();
        prop_assert_eq!(back.to_record(), d.to_record());
        prop_assert_eq!(canonical_class(&back).unwrap(), canonical_class(&d).unwrap());
    }
}
