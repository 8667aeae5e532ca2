//! Neutral component of the monodromy group of a canonical-family module,
//! via the Lie closure of the Frobenius conjugates of the Hodge cocharacter.

use std::fmt;

use serde::Serialize;

use crate::classify::{degenerate_roots, level_conic_second_point, mu_params_of_point, CInvariant, CanonicalClass, DegenerateBranch, ModuliPoint};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{is_solvable, lie_closure_with, LieAlgebraBasis, Matrix, SubspaceBasis, Vector};
use crate::module::{build_family, mu_c, validate_geometric_params, FamilyParams, FilteredPhiModule};
use crate::scalar::{PrimeContext, Scalar, Valuation};

/// Bound on the search for a scalar power of φ.
pub const CENTRAL_POWER_BOUND: usize = 48;

/// Smallest k ≥ 1 with φᵏ scalar.
pub fn phi_central_order(phi: &Matrix) -> Result<usize> {
    let mut power = phi.clone();
    for k in 1..=CENTRAL_POWER_BOUND {
        if power.scalar_value().is_some() {
            return Ok(k);
        }
        power = power.mul(phi);
    }
    Err(Error::NoCentralPower(CENTRAL_POWER_BOUND))
}

/// diag(1, 1, 0, 0): the derivative of the Hodge cocharacter in an adapted basis.
pub fn hodge_generator() -> Matrix {
    Matrix::diag(&[Scalar::one(), Scalar::one(), Scalar::zero(), Scalar::zero()])
}

/// The distinct conjugates φⁱEφ⁻ⁱ, stopping when the sequence cycles.
pub fn toric_generators(phi: &Matrix) -> Result<Vec<Matrix>> {
    let bound = phi_central_order(phi)?;
    let inv = phi.inverse().ok_or(Error::Singular)?;
    let mut out: Vec<Matrix> = Vec::new();
    let mut cur = hodge_generator();
    for _ in 0..bound {
        if out.contains(&cur) {
            break;
        }
        let next = phi.mul(&cur).mul(&inv);
        out.push(cur);
        cur = next;
    }
    Ok(out)
}

fn is_adapted(d: &FilteredPhiModule) -> bool {
    let e: Vec<Vector> = (0..2).map(|i| (0..4).map(|k| Scalar::int((k == i) as i64)).collect()).collect();
    d.fil1() == &SubspaceBasis::span(4, &e)
}

/// Lie closure of the toric generators; the identity must lie in it.
pub fn monodromy_lie(d: &FilteredPhiModule, exec: Execution) -> Result<LieAlgebraBasis> {
    if !is_adapted(d) {
        return Err(Error::PreconditionFailed("fil1 must be span(e1, e2) in an adapted basis".into()));
    }
    let gens = toric_generators(d.phi())?;
    let l = lie_closure_with(&gens, exec);
    if !l.contains(&Matrix::identity(4)) {
        return Err(Error::ScalarsMissing);
    }
    Ok(l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GroupKind {
    Gm2,
    Gm3,
    Ga2SemidirectGm2,
    GL2,
    GL2FiberDet,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupType {
    #[serde(rename = "type")]
    pub kind: GroupKind,
    pub dim: usize,
    pub solvable: bool,
}

pub fn group_type(l: &LieAlgebraBasis) -> Result<GroupType> {
    let dim = l.dim();
    let (solvable, _) = is_solvable(l);
    let kind = match (dim, solvable) {
        (2, _) => GroupKind::Gm2,
        (3, _) => GroupKind::Gm3,
        (4, true) => GroupKind::Ga2SemidirectGm2,
        (4, false) => GroupKind::GL2,
        (7, _) => GroupKind::GL2FiberDet,
        _ => return Err(Error::UnclassifiedDimension(dim)),
    };
    Ok(GroupType { kind, dim, solvable })
}

/// The 2×2 blocks governing the Mu-family computation.
#[derive(Clone, Debug)]
pub struct BlockData {
    pub s: Matrix,
    pub m: Matrix,
    pub c: Scalar,
}

impl BlockData {
    pub fn for_mu(a: &Scalar, b: &Scalar, eps: i8, p: &Scalar) -> Result<Self> {
        let c = mu_c(a, b, eps, p)?;
        let pp = p * p;
        let lower = (a + &(b * &c)).checked_div(&pp).unwrap();
        let s = Matrix::from_rows(vec![vec![-b.clone(), a.clone()], vec![lower, b.clone()]]);
        let m = Matrix::from_rows(vec![vec![Scalar::zero(), -pp], vec![Scalar::one(), c.clone()]]);
        Ok(BlockData { s, m, c })
    }

    /// M² − cM + p²I = 0, MS + SM = cS and S² = −((εp + c)/p²)I.
    pub fn relations_hold(&self, eps: i8, p: &Scalar) -> bool {
        let i2 = Matrix::identity(2);
        let pp = p * p;
        let (s, m, c) = (&self.s, &self.m, &self.c);
        let r1 = m.mul(m).sub(&m.scale(c)).add(&i2.scale(&pp)).is_zero();
        let r2 = m.mul(s).add(&s.mul(m)) == s.scale(c);
        let k = -((Scalar::int(eps as i64) * p + c).checked_div(&pp).unwrap());
        let r3 = s.mul(s) == i2.scale(&k);
        r1 && r2 && r3
    }
}

fn blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
    Matrix::from_blocks(a, b, c, d)
}

/// The span the closure is predicted to equal, for Mu and Iso modules.
pub fn predicted_span(params: &FamilyParams, p: &Scalar) -> Result<LieAlgebraBasis> {
    let z = Matrix::zero(2, 2);
    let i = Matrix::identity(2);
    let mats = match params {
        FamilyParams::Mu { eps, a, b } => {
            let bd = BlockData::for_mu(a, b, *eps, p)?;
            let (s, m) = (&bd.s, &bd.m);
            let mut mats = vec![blocks(&i, &z, &z, &z), blocks(&z, s, &z, &z), blocks(&z, &z, s, &z), blocks(&z, &z, &z, &i)];
            if bd.c != -(Scalar::int(*eps as i64) * p) {
                mats.push(blocks(m, &z, &z, m));
                mats.push(blocks(&z, &m.mul(s), &z, &z));
                mats.push(blocks(&z, &z, &s.mul(m), &z));
            }
            mats
        }
        FamilyParams::Iso { eps, eps_prime } => {
            let t = -(Scalar::int(*eps as i64 + 2 * *eps_prime as i64) * p);
            let s = Matrix::from_rows(vec![vec![Scalar::zero(), t], vec![Scalar::one(), Scalar::zero()]]);
            vec![blocks(&i, &z, &z, &z), blocks(&z, &s, &z, &z), blocks(&z, &z, &s, &z), blocks(&z, &z, &z, &i)]
        }
        _ => return Err(Error::PreconditionFailed("predicted spans exist for Mu and Iso only".into())),
    };
    Ok(LieAlgebraBasis::linear_span(4, &mats))
}

/// L equals the predicted block span.
pub fn structural_membership_check(params: &FamilyParams, l: &LieAlgebraBasis, p: &Scalar) -> bool {
    match predicted_span(params, p) {
        Ok(pred) => pred.dim() == l.dim() && l.basis().iter().all(|x| pred.contains(x)),
        Err(_) => false,
    }
}

pub fn is_semisimple_module(d: &FilteredPhiModule, exec: Execution) -> Result<bool> {
    Ok(group_type(&monodromy_lie(d, exec)?)?.kind != GroupKind::Ga2SemidirectGm2)
}

/// Group predicted for a class by the classification of monodromy groups.
pub fn expected_group(class: &CanonicalClass) -> GroupKind {
    match class {
        CanonicalClass::Prod { .. } => GroupKind::Gm2,
        CanonicalClass::Iso { .. } => GroupKind::GL2,
        CanonicalClass::NuInfinity { eps: 0 } => GroupKind::Gm3,
        CanonicalClass::NuInfinity { .. } => GroupKind::GL2FiberDet,
        CanonicalClass::MuDegenerate { branch: DegenerateBranch::Origin, .. } => GroupKind::Gm2,
        CanonicalClass::MuDegenerate { .. } => GroupKind::Ga2SemidirectGm2,
        CanonicalClass::MuGeneric { .. } => GroupKind::GL2FiberDet,
    }
}

/// `expected_group` refined by the c-value: the non-split c = −εp class is
/// the origin alone.
pub fn expected_group_at(class: &CanonicalClass, p: &Scalar) -> GroupKind {
    match class {
        CanonicalClass::MuGeneric { eps, c } if *c == -(Scalar::int(*eps as i64) * p) => GroupKind::Gm2,
        _ => expected_group(class),
    }
}

/// A canonical-family module standing for a class.
#[derive(Clone, Debug)]
pub struct Representative {
    pub params: FamilyParams,
    /// Whether the family member has exactly the class's c-value. Inexact
    /// representatives are p-adic approximations of a Q_p-rational one.
    pub exact: bool,
    /// v(c_rep − c) for inexact representatives.
    pub agreement: Option<i64>,
    pub geometric: bool,
}

/// Number of fixed-point steps used to approximate a ν-parameter.
pub const NU_APPROX_STEPS: usize = 2;

/// Root w of w² − cw + p² with v(w) ≥ 2 (requires v(c) ≤ 0), by the
/// contraction w ↦ p²/(c − w) started at 0. Each step gains at least two
/// digits of accuracy.
pub fn nu_shift_approximation(c: &Scalar, p: &Scalar, steps: usize) -> Scalar {
    let pp = p * p;
    let mut w = Scalar::zero();
    for _ in 0..steps.max(1) {
        w = pp.checked_div(&(c - &w)).expect("c - w is a unit multiple of c");
    }
    w
}

/// The exact root of w² − cw + p² with v(w) ≥ 2, when it lies in the field.
pub fn nu_shift_exact(c: &Scalar, ctx: &PrimeContext) -> Result<Option<Scalar>> {
    let p = ctx.p_scalar();
    let disc = c * c - Scalar::int(4) * &p * &p;
    let Some(r) = ctx.sqrt(&disc) else {
        return Ok(None);
    };
    for w in [(c + &r) * Scalar::frac(1, 2), (c - &r) * Scalar::frac(1, 2)] {
        if ctx.valuation(&w)?.at_least(2) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

const CONIC_DIRECTIONS: [[i64; 3]; 8] = [[0, 1, 0], [1, 1, 0], [0, 1, 1], [1, 1, 1], [1, 2, 3], [2, 1, 5], [3, 5, 1], [1, 3, 7]];

/// A Mu parameter pair with c-value c, found from a point on the level set.
pub fn mu_params_on_level(pt: &ModuliPoint, c: &Scalar, eps: i8, p: &Scalar) -> Option<(Scalar, Scalar)> {
    if let Some(ab) = mu_params_of_point(pt, eps, p) {
        return Some(ab);
    }
    CONIC_DIRECTIONS.iter().find_map(|d| {
        let dir = d.map(Scalar::int);
        let q = level_conic_second_point(pt, &dir, c, eps, p)?;
        mu_params_of_point(&q, eps, p)
    })
}

/// A canonical-family representative of `class`. The point on the level
/// set is needed for MuGeneric classes with c ∈ pZ_p.
pub fn representative(class: &CanonicalClass, point: Option<&ModuliPoint>, ctx: &PrimeContext) -> Result<Representative> {
    let p = ctx.p_scalar();
    let exact = |params: FamilyParams| -> Result<Representative> {
        let geometric = validate_geometric_params(&params, ctx)?;
        Ok(Representative { params, exact: true, agreement: None, geometric })
    };
    match class {
        CanonicalClass::Prod { eps_prime } => exact(FamilyParams::Prod { eps_prime: *eps_prime }),
        CanonicalClass::Iso { eps, eps_prime } => exact(FamilyParams::Iso { eps: *eps, eps_prime: *eps_prime }),
        CanonicalClass::NuInfinity { eps } => exact(FamilyParams::Nu { eps: *eps, a_prime: Scalar::int(*eps as i64) * &p }),
        CanonicalClass::MuDegenerate { eps, branch } => {
            let (a, b) = match branch {
                DegenerateBranch::Origin => (Scalar::zero(), Scalar::zero()),
                DegenerateBranch::Line1 | DegenerateBranch::Line2 => {
                    let roots = degenerate_roots(ctx, *eps)?.ok_or_else(|| Error::Internal("degenerate branch in a non-split field".into()))?;
                    let m = &roots[if *branch == DegenerateBranch::Line1 { 0 } else { 1 }];
                    (-(m * &p), Scalar::one())
                }
            };
            exact(FamilyParams::Mu { eps: *eps, a, b })
        }
        CanonicalClass::MuGeneric { eps, c } => {
            let eps = *eps;
            if *c == -(Scalar::int(eps as i64) * &p) {
                return exact(FamilyParams::Mu { eps, a: Scalar::zero(), b: Scalar::zero() });
            }
            if ctx.valuation(c)?.at_least(1) {
                let pt = point.ok_or_else(|| Error::PreconditionFailed("a point on the level set is required".into()))?;
                let (a, b) = mu_params_on_level(pt, c, eps, &p).ok_or_else(|| Error::Internal(format!("no Mu chart point found for c = {c}")))?;
                return exact(FamilyParams::Mu { eps, a, b });
            }
            let shift = Scalar::int(eps as i64) * &p;
            if let Some(w) = nu_shift_exact(c, ctx)? {
                return exact(FamilyParams::Nu { eps, a_prime: shift + w });
            }
            let w = nu_shift_approximation(c, &p, NU_APPROX_STEPS);
            let params = FamilyParams::Nu { eps, a_prime: &shift + &w };
            let c_rep = &w + &(&p * &p).checked_div(&w).unwrap();
            let agreement = match ctx.valuation(&(&c_rep - c))? {
                Valuation::Finite(v) => v,
                Valuation::Infinite => i64::MAX,
            };
            let geometric = validate_geometric_params(&params, ctx)?;
            Ok(Representative { params, exact: false, agreement: Some(agreement), geometric })
        }
    }
}

/// Monodromy of a family member: Lie algebra, group type, semisimplicity.
#[derive(Clone, Debug)]
pub struct MonodromyReport {
    pub lie: LieAlgebraBasis,
    pub group: GroupType,
    pub semisimple: bool,
}

pub fn family_monodromy(params: &FamilyParams, ctx: &PrimeContext, exec: Execution) -> Result<MonodromyReport> {
    let d = build_family(params, ctx)?;
    let lie = monodromy_lie(&d, exec)?;
    let group = group_type(&lie)?;
    Ok(MonodromyReport { semisimple: group.kind != GroupKind::Ga2SemidirectGm2, lie, group })
}

/// Convenience for the c-value of a family member's class.
pub fn family_c(params: &FamilyParams, p: &Scalar) -> Result<CInvariant> {
    Ok(match params {
        FamilyParams::Prod { .. } => return Err(Error::PreconditionFailed("product modules carry no c-invariant".into())),
        FamilyParams::Iso { eps_prime, .. } => CInvariant::Finite(Scalar::int(2 * *eps_prime as i64) * p),
        FamilyParams::Nu { eps, a_prime } => {
            let w = a_prime - &(Scalar::int(*eps as i64) * p);
            match (p * p).checked_div(&w) {
                Some(q) => CInvariant::Finite(w + q),
                None => CInvariant::Infinity,
            }
        }
        FamilyParams::Mu { eps, a, b } => CInvariant::Finite(mu_c(a, b, *eps, p)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx7() -> PrimeContext {
        PrimeContext::rational(7).unwrap()
    }

    fn mon(params: FamilyParams, ctx: &PrimeContext) -> MonodromyReport {
        family_monodromy(&params, ctx, Execution::Sequential).unwrap()
    }

    #[test]
    fn central_orders() {
        let c = ctx7();
        assert_eq!(phi_central_order(build_family(&FamilyParams::Prod { eps_prime: 1 }, &c).unwrap().phi()).unwrap(), 2);
        let comp = Matrix::from_ints(4, 4, &[0, 0, 0, -49, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0]);
        assert_eq!(phi_central_order(&comp).unwrap(), 4);
        assert_eq!(phi_central_order(&Matrix::identity(4)).unwrap(), 1);
        let unipotent = Matrix::from_ints(2, 2, &[1, 1, 0, 1]);
        assert_eq!(phi_central_order(&unipotent), Err(Error::NoCentralPower(48)));
    }

    #[test]
    fn toric_examples() {
        let c = ctx7();
        let g = toric_generators(build_family(&FamilyParams::Prod { eps_prime: 1 }, &c).unwrap().phi()).unwrap();
        let d = |v: [i64; 4]| Matrix::diag(&v.map(Scalar::int));
        assert_eq!(g, vec![d([1, 1, 0, 0]), d([0, 0, 1, 1])]);
        let nu = build_family(&FamilyParams::Nu { eps: 0, a_prime: Scalar::zero() }, &c).unwrap();
        let g = toric_generators(nu.phi()).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.iter().all(|m| m.mul(m) == *m && (0..4).all(|i| (0..4).all(|j| i == j || m.get(i, j).is_zero()))));
        assert_eq!(LieAlgebraBasis::linear_span(4, &g).dim(), 3);
    }

    #[test]
    fn group_table() {
        let c = ctx7();
        assert_eq!(mon(FamilyParams::Prod { eps_prime: -1 }, &c).group.kind, GroupKind::Gm2);
        assert_eq!(mon(FamilyParams::Nu { eps: 0, a_prime: Scalar::zero() }, &c).group.kind, GroupKind::Gm3);
        assert_eq!(mon(FamilyParams::Nu { eps: 1, a_prime: Scalar::int(56) }, &c).group.dim, 7);
        let iso = mon(FamilyParams::Iso { eps: 0, eps_prime: -1 }, &c);
        assert_eq!(iso.group, GroupType { kind: GroupKind::GL2, dim: 4, solvable: false });
        let z3 = PrimeContext::new(7, 3).unwrap();
        let a = -(z3.zeta() * Scalar::int(7));
        let params = FamilyParams::Mu { eps: 1, a, b: Scalar::one() };
        let r = mon(params.clone(), &z3);
        assert_eq!(r.group.kind, GroupKind::Ga2SemidirectGm2);
        assert!(!r.semisimple);
        assert!(structural_membership_check(&params, &r.lie, &Scalar::int(7)));
        assert!(mon(FamilyParams::Prod { eps_prime: -1 }, &c).semisimple);
    }

    #[test]
    fn membership_checks() {
        let p = Scalar::int(7);
        let c = ctx7();
        for params in [
            FamilyParams::Mu { eps: 0, a: Scalar::int(7), b: Scalar::zero() },
            FamilyParams::Iso { eps: 0, eps_prime: 1 },
            FamilyParams::Iso { eps: -1, eps_prime: -1 },
            FamilyParams::Mu { eps: 1, a: Scalar::int(14), b: Scalar::int(3) },
        ] {
            let r = mon(params.clone(), &c);
            assert!(structural_membership_check(&params, &r.lie, &p), "{params}");
        }
        let r = mon(FamilyParams::Mu { eps: 0, a: Scalar::zero(), b: Scalar::zero() }, &c);
        assert_eq!(r.group.kind, GroupKind::Gm2);
        assert!(r.lie.is_abelian());
    }

    #[test]
    fn block_relations() {
        let p = Scalar::int(7);
        for (a, b, e) in [(7, 0, 0), (3, 5, 1), (-2, 9, -1), (0, 1, 0)] {
            let bd = BlockData::for_mu(&Scalar::int(a), &Scalar::int(b), e, &p).unwrap();
            assert!(bd.relations_hold(e, &p));
        }
    }

    #[test]
    fn representatives() {
        let c = ctx7();
        let p = c.p_scalar();
        let r = representative(&CanonicalClass::MuGeneric { eps: 0, c: Scalar::int(50) }, None, &c).unwrap();
        assert!(r.exact && r.geometric);
        assert_eq!(r.params, FamilyParams::Nu { eps: 0, a_prime: Scalar::int(49) });
        let r = representative(&CanonicalClass::MuGeneric { eps: 0, c: Scalar::int(3) }, None, &c).unwrap();
        assert!(!r.exact && r.geometric);
        assert!(r.agreement.unwrap() >= 4);
        let pt = ModuliPoint::from_ints(14, 0, 1).unwrap();
        let cl = crate::classify::class_from_point(&pt, 0, &c).unwrap();
        let r = representative(&cl, Some(&pt), &c).unwrap();
        assert!(r.exact);
        assert_eq!(family_c(&r.params, &p).unwrap(), cl.c_value(&p).unwrap());
    }
}
