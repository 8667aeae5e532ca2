use phimod::classify::{canonical_class, CanonicalClass, DegenerateBranch};
use phimod::lattice::{construct_lattice, verify_lattice, LatticeProvenance};
use phimod::module::{build_family, FamilyParams};
use phimod::monodromy::{family_monodromy, GroupKind};
use phimod::scan::{scan, ScanConfig, ScanRow};
use phimod::weil::enumerate_ss_weil_deg4;
use phimod::{Execution, PrimeContext, Scalar};

fn ctx7() -> PrimeContext {
    PrimeContext::rational(7).unwrap()
}

#[test]
fn weil_list_at_seven() {
    let polys: Vec<String> = enumerate_ss_weil_deg4(7).unwrap().iter().map(|w| w.to_string()).collect();
    assert_eq!(polys, ["X^4 - 14X^2 + 49", "X^4 + 14X^2 + 49", "X^4 - 7X^2 + 49", "X^4 + 49", "X^4 + 7X^2 + 49"]);
}

#[test]
fn group_examples() {
    let ctx = ctx7();
    let kind = |params: FamilyParams, ctx: &PrimeContext| family_monodromy(&params, ctx, Execution::Sequential).unwrap();
    assert_eq!(kind(FamilyParams::Prod { eps_prime: 1 }, &ctx).group.kind, GroupKind::Gm2);
    assert_eq!(kind(FamilyParams::Iso { eps: 0, eps_prime: -1 }, &ctx).group.kind, GroupKind::GL2);
    assert_eq!(kind(FamilyParams::Nu { eps: 0, a_prime: Scalar::zero() }, &ctx).group.kind, GroupKind::Gm3);
    assert_eq!(kind(FamilyParams::Mu { eps: 0, a: Scalar::int(7), b: Scalar::zero() }, &ctx).group.kind, GroupKind::GL2FiberDet);
    let z3 = PrimeContext::new(7, 3).unwrap();
    let line = kind(FamilyParams::Mu { eps: 1, a: -(z3.zeta() * Scalar::int(7)), b: Scalar::one() }, &z3);
    assert_eq!(line.group.kind, GroupKind::Ga2SemidirectGm2);
    assert!(!line.semisimple);
}

#[test]
fn split_origin_and_lines() {
    let ctx = PrimeContext::new(13, 4).unwrap();
    let origin = build_family(&FamilyParams::Mu { eps: 0, a: Scalar::zero(), b: Scalar::zero() }, &ctx).unwrap();
    assert_eq!(canonical_class(&origin).unwrap(), CanonicalClass::MuDegenerate { eps: 0, branch: DegenerateBranch::Origin });
    let on_line = build_family(&FamilyParams::Mu { eps: 0, a: -(ctx.zeta() * Scalar::int(13)), b: Scalar::one() }, &ctx).unwrap();
    assert!(matches!(canonical_class(&on_line).unwrap(), CanonicalClass::MuDegenerate { branch: DegenerateBranch::Line1 | DegenerateBranch::Line2, .. }));
}

#[test]
fn shifted_lattice_example() {
    let ctx = ctx7();
    let (a, b) = (Scalar::frac(1, 49), Scalar::frac(1, 343));
    let n = construct_lattice(&a, &b, &ctx).unwrap();
    assert_eq!(n.provenance, LatticeProvenance::ShiftedByU { u: Scalar::one(), n: 2 });
    assert!(verify_lattice(&n, &a, &b, 1, &ctx).unwrap());
}

#[test]
fn strategies_give_identical_scans() {
    let ctx = ctx7();
    let cfg = ScanConfig { eps: 1, height: 2, seed: 9 };
    let rows = |exec| scan(&ctx, &cfg, exec).unwrap().rows.iter().map(ScanRow::to_tsv).collect::<Vec<_>>();
    assert_eq!(rows(Execution::Sequential), rows(Execution::Parallel));
}
