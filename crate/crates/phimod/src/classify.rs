//! Isomorphism classes of admissible modules: the P² point of a module,
//! the c-invariant, the canonical class and the Wintenberger type.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::module::{check_s1_s2, complement_in_fil1, cyclic_candidates, orbit_matrix, require_admissible_given, FilteredPhiModule, S12Report};
use crate::scalar::{PrimeContext, Scalar, Valuation};
use crate::weil::WeilLabel;

/// A point of P², normalised so that its first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuliPoint([Scalar; 3]);

impl ModuliPoint {
    pub fn new(x: Scalar, y: Scalar, z: Scalar) -> Result<Self> {
        let coords = [x, y, z];
        let lead = coords.iter().find(|c| !c.is_zero()).cloned().ok_or_else(|| Error::PreconditionFailed("all coordinates zero".into()))?;
        let inv = lead.inv().unwrap();
        Ok(ModuliPoint(coords.map(|c| &c * &inv)))
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Result<Self> {
        Self::new(Scalar::int(x), Scalar::int(y), Scalar::int(z))
    }

    pub fn coords(&self) -> &[Scalar; 3] {
        &self.0
    }

    pub fn x(&self) -> &Scalar {
        &self.0[0]
    }

    pub fn y(&self) -> &Scalar {
        &self.0[1]
    }

    pub fn z(&self) -> &Scalar {
        &self.0[2]
    }
}

impl fmt::Display for ModuliPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}:{}]", self.0[0], self.0[1], self.0[2])
    }
}

/// The c-invariant, a point of P¹.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CInvariant {
    Finite(Scalar),
    Infinity,
}

impl CInvariant {
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            CInvariant::Finite(c) => Some(c),
            CInvariant::Infinity => None,
        }
    }

    /// Valuation with the convention v(∞) = −∞, encoded as `None`.
    pub fn valuation(&self, ctx: &PrimeContext) -> Result<Option<Valuation>> {
        match self {
            CInvariant::Finite(c) => ctx.valuation(c).map(Some),
            CInvariant::Infinity => Ok(None),
        }
    }
}

impl fmt::Display for CInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CInvariant::Finite(c) => write!(f, "{c}"),
            CInvariant::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DegenerateBranch {
    Line1,
    Line2,
    Origin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonicalClass {
    Prod { eps_prime: i8 },
    Iso { eps: i8, eps_prime: i8 },
    NuInfinity { eps: i8 },
    MuGeneric { eps: i8, c: Scalar },
    MuDegenerate { eps: i8, branch: DegenerateBranch },
}

impl CanonicalClass {
    pub fn tag(&self) -> &'static str {
        match self {
            CanonicalClass::Prod { .. } => "Prod",
            CanonicalClass::Iso { .. } => "Iso",
            CanonicalClass::NuInfinity { .. } => "NuInfinity",
            CanonicalClass::MuGeneric { .. } => "MuGeneric",
            CanonicalClass::MuDegenerate { .. } => "MuDegenerate",
        }
    }

    pub fn eps(&self) -> Option<i8> {
        match self {
            CanonicalClass::Prod { .. } => None,
            CanonicalClass::Iso { eps, .. }
            | CanonicalClass::NuInfinity { eps }
            | CanonicalClass::MuGeneric { eps, .. }
            | CanonicalClass::MuDegenerate { eps, .. } => Some(*eps),
        }
    }

    /// The c-invariant of the class; `None` for the product classes.
    pub fn c_value(&self, p: &Scalar) -> Option<CInvariant> {
        match self {
            CanonicalClass::Prod { .. } => None,
            CanonicalClass::Iso { eps_prime, .. } => Some(CInvariant::Finite(Scalar::int(2 * *eps_prime as i64) * p)),
            CanonicalClass::NuInfinity { .. } => Some(CInvariant::Infinity),
            CanonicalClass::MuGeneric { c, .. } => Some(CInvariant::Finite(c.clone())),
            CanonicalClass::MuDegenerate { eps, .. } => Some(CInvariant::Finite(-(Scalar::int(*eps as i64) * p))),
        }
    }

    pub fn to_record(&self, p: &Scalar) -> ClassRecord {
        let (epsilon_prime, branch) = match self {
            CanonicalClass::Prod { eps_prime } | CanonicalClass::Iso { eps_prime, .. } => (Some(*eps_prime), None),
            CanonicalClass::MuDegenerate { branch, .. } => (None, Some(*branch)),
            _ => (None, None),
        };
        let c = self.c_value(p).and_then(|c| c.finite().map(Scalar::to_pair));
        ClassRecord { tag: self.tag().to_string(), epsilon: self.eps(), epsilon_prime, c, branch }
    }
}

impl fmt::Display for CanonicalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalClass::Prod { eps_prime } => write!(f, "Prod{{{eps_prime:+}}}"),
            CanonicalClass::Iso { eps, eps_prime } => write!(f, "Iso{{{eps}, {eps_prime:+}}}"),
            CanonicalClass::NuInfinity { eps } => write!(f, "NuInfinity{{{eps}}}"),
            CanonicalClass::MuGeneric { eps, c } => write!(f, "MuGeneric{{{eps}, c={c}}}"),
            CanonicalClass::MuDegenerate { eps, branch } => write!(f, "MuDegenerate{{{eps}, {branch:?}}}"),
        }
    }
}

/// Stable serialisation of a class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassRecord {
    pub tag: String,
    pub epsilon: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_prime: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<DegenerateBranch>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum WintenbergerType {
    A,
    B,
    C,
    D,
}

impl fmt::Display for WintenbergerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

fn eps_scalar(eps: i8) -> Scalar {
    Scalar::int(eps as i64)
}

/// εpz² + y² − xz; c is infinite exactly where this vanishes.
pub fn c_denominator(pt: &ModuliPoint, eps: i8, p: &Scalar) -> Scalar {
    let [x, y, z] = pt.coords();
    eps_scalar(eps) * p * z * z + y * y - x * z
}

pub fn c_of_point(pt: &ModuliPoint, eps: i8, p: &Scalar) -> CInvariant {
    let [x, _, z] = pt.coords();
    let den = c_denominator(pt, eps, p);
    if den.is_zero() {
        return CInvariant::Infinity;
    }
    let e = eps_scalar(eps);
    let num = x * x - &e * p * x * z + p * p * z * z;
    CInvariant::Finite(-(num.checked_div(&den).unwrap()) - e * p)
}

/// −(a² + εp + b²p²)/(ab + 1).
pub fn c_of_mu_params(a: &Scalar, b: &Scalar, eps: i8, p: &Scalar) -> Result<Scalar> {
    crate::module::mu_c(a, b, eps, p)
}

/// The point [c₁:c₂:c₃] with fil₁ = span(x, Σ cⱼφʲx) for a cyclic x ∈ fil₁.
pub fn point_from_cyclic_vector(d: &FilteredPhiModule, x: &[Scalar]) -> Result<ModuliPoint> {
    if !d.fil1().contains(x) {
        return Err(Error::PreconditionFailed("vector not in fil1".into()));
    }
    let t = orbit_matrix(d.phi(), x);
    let ti = t.inverse().ok_or(Error::NoCyclicVector)?;
    let y = complement_in_fil1(d, x);
    let c: Vector = ti.apply(&y);
    ModuliPoint::new(c[1].clone(), c[2].clone(), c[3].clone())
}

/// Point of the first cyclic vector in the fixed search order.
pub fn point_from_module(d: &FilteredPhiModule) -> Result<ModuliPoint> {
    point_from_module_nth(d, 0)?.ok_or(Error::NoCyclicVector)
}

/// Point of the `k`-th cyclic vector in the search order, if there is one.
pub fn point_from_module_nth(d: &FilteredPhiModule, k: usize) -> Result<Option<ModuliPoint>> {
    let cyclic = cyclic_candidates(d).into_iter().filter(|x| !orbit_matrix(d.phi(), x).det().is_zero()).nth(k);
    cyclic.map(|x| point_from_cyclic_vector(d, &x)).transpose()
}

/// Roots of X² + εX + 1 in the scalar field, ordered by their residues
/// mod p. The degenerate lines are x = −μ̂ᵢ·p·z.
pub fn degenerate_roots(ctx: &PrimeContext, eps: i8) -> Result<Option<[Scalar; 2]>> {
    let e = eps as i64;
    let Some(root) = ctx.sqrt(&Scalar::int(e * e - 4)) else {
        return Ok(None);
    };
    let half = Scalar::frac(1, 2);
    let r1 = (Scalar::int(-e) + &root) * &half;
    let r2 = (Scalar::int(-e) - &root) * &half;
    let k1 = ctx.residue(&r1)?;
    let k2 = ctx.residue(&r2)?;
    Ok(Some(if k1 <= k2 { [r1, r2] } else { [r2, r1] }))
}

/// Class of the moduli-plane model with fil₁ = ι(pt).
pub fn class_from_point(pt: &ModuliPoint, eps: i8, ctx: &PrimeContext) -> Result<CanonicalClass> {
    let p = ctx.p_scalar();
    let c = match c_of_point(pt, eps, &p) {
        CInvariant::Infinity => return Ok(CanonicalClass::NuInfinity { eps }),
        CInvariant::Finite(c) => c,
    };
    for ep in [1i8, -1] {
        if c == Scalar::int(2 * ep as i64) * &p {
            return Ok(CanonicalClass::Iso { eps, eps_prime: ep });
        }
    }
    if c != -(eps_scalar(eps) * &p) {
        return Ok(CanonicalClass::MuGeneric { eps, c });
    }
    let Some([m1, m2]) = degenerate_roots(ctx, eps)? else {
        return Ok(CanonicalClass::MuGeneric { eps, c });
    };
    let [x, _, z] = pt.coords();
    let branch = if z.is_zero() {
        DegenerateBranch::Origin
    } else {
        let r = x.checked_div(&(&p * z)).unwrap();
        if r == -m1 {
            DegenerateBranch::Line1
        } else if r == -m2 {
            DegenerateBranch::Line2
        } else {
            return Err(Error::Internal(format!("point {pt} has c = -eps*p but lies on neither line")));
        }
    };
    Ok(CanonicalClass::MuDegenerate { eps, branch })
}

fn weil_label(s12: &S12Report) -> Result<WeilLabel> {
    if !s12.s1 || !s12.s2 {
        return Err(Error::PreconditionFailed(format!("S1 = {}, S2 = {}", s12.s1, s12.s2)));
    }
    Ok(s12.label.expect("S2 implies a label"))
}

/// The canonical class of an admissible module.
pub fn canonical_class(d: &FilteredPhiModule) -> Result<CanonicalClass> {
    let s12 = check_s1_s2(d);
    let label = weil_label(&s12)?;
    require_admissible_given(d, &s12)?;
    match label {
        WeilLabel::ProdPlus => Ok(CanonicalClass::Prod { eps_prime: 1 }),
        WeilLabel::ProdMinus => Ok(CanonicalClass::Prod { eps_prime: -1 }),
        WeilLabel::Eps(eps) => class_from_point(&point_from_module(d)?, eps, d.ctx()),
    }
}

/// Type A iff v(c) ≤ 0 (with v(∞) = −∞); the product classes are type B.
pub fn type_of_class(class: &CanonicalClass, ctx: &PrimeContext) -> Result<WintenbergerType> {
    match class.c_value(&ctx.p_scalar()) {
        None => Ok(WintenbergerType::B),
        Some(c) => Ok(match c.valuation(ctx)? {
            Some(v) if v.at_least(1) => WintenbergerType::B,
            _ => WintenbergerType::A,
        }),
    }
}

pub fn wintenberger_type(d: &FilteredPhiModule) -> Result<WintenbergerType> {
    type_of_class(&canonical_class(d)?, d.ctx())
}

pub fn is_isomorphic(d1: &FilteredPhiModule, d2: &FilteredPhiModule) -> Result<bool> {
    if d1.p() != d2.p() {
        return Ok(false);
    }
    Ok(canonical_class(d1)? == canonical_class(d2)?)
}

/// x² − εpxz + p²z² + (c + εp)(εpz² + y² − xz); its zero set is the
/// closure of the level set c̄ = c.
pub fn level_form(v: &[Scalar; 3], c: &Scalar, eps: i8, p: &Scalar) -> Scalar {
    let [x, y, z] = v;
    let e = eps_scalar(eps);
    let k = c + &(&e * p);
    x * x - &e * p * x * z + p * p * z * z + k * (&e * p * z * z + y * y - x * z)
}

/// Second intersection of the line through `pt` in direction `dir` with the
/// level conic of c through `pt`. `None` if the line is tangent or lies on it.
pub fn level_conic_second_point(pt: &ModuliPoint, dir: &[Scalar; 3], c: &Scalar, eps: i8, p: &Scalar) -> Option<ModuliPoint> {
    let q = |v: &[Scalar; 3]| level_form(v, c, eps, p);
    let qd = q(dir);
    if qd.is_zero() {
        return None;
    }
    let base = pt.coords();
    let sum: [Scalar; 3] = std::array::from_fn(|i| &base[i] + &dir[i]);
    let twice_b = q(&sum) - q(base) - &qd;
    let t = -(twice_b.checked_div(&qd).unwrap());
    let out: [Scalar; 3] = std::array::from_fn(|i| &base[i] + &(&t * &dir[i]));
    let [x, y, z] = out;
    ModuliPoint::new(x, y, z).ok()
}

/// (a, b) with μ(a, b) = pt, for points with y ≠ 0 and finite c.
pub fn mu_params_of_point(pt: &ModuliPoint, eps: i8, p: &Scalar) -> Option<(Scalar, Scalar)> {
    let [x, y, z] = pt.coords();
    if y.is_zero() {
        return None;
    }
    let (x, z) = (x.checked_div(y)?, z.checked_div(y)?);
    let b = -z.clone();
    let den = Scalar::one() - &x * &z + eps_scalar(eps) * p * &z * &z;
    let a = (-(&z * &z * &z * p * p) - x).checked_div(&den)?;
    if (&a * &b + Scalar::one()).is_zero() {
        return None;
    }
    Some((a, b))
}

/// μ(a, b) = [−(a + εpab² − b³p²)/(ab + 1) : 1 : −b].
pub fn mu_point(a: &Scalar, b: &Scalar, eps: i8, p: &Scalar) -> Result<ModuliPoint> {
    let den = a * b + Scalar::one();
    let num = a + &(eps_scalar(eps) * p * a * b * b) - b * b * b * p * p;
    let x = -(num.checked_div(&den).ok_or_else(|| Error::DegenerateDenominator("ab = -1".into()))?);
    ModuliPoint::new(x, Scalar::one(), -b.clone())
}

/// ν(a′) = [a′ : 0 : 1].
pub fn nu_point(a_prime: &Scalar) -> ModuliPoint {
    ModuliPoint::new(a_prime.clone(), Scalar::zero(), Scalar::one()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{build_family, FamilyParams};

    fn ctx7() -> PrimeContext {
        PrimeContext::rational(7).unwrap()
    }

    fn mu(eps: i8, a: i64, b: i64) -> FamilyParams {
        FamilyParams::Mu { eps, a: Scalar::int(a), b: Scalar::int(b) }
    }

    fn unit(i: usize) -> Vector {
        (0..4).map(|k| Scalar::int((k == i) as i64)).collect()
    }

    #[test]
    fn c_formula_examples() {
        let p = Scalar::int(7);
        assert_eq!(c_of_point(&ModuliPoint::from_ints(0, 1, 0).unwrap(), 1, &p), CInvariant::Finite(Scalar::int(-7)));
        assert_eq!(c_of_point(&ModuliPoint::from_ints(14, 0, 1).unwrap(), 1, &p), CInvariant::Finite(Scalar::int(14)));
        let a = Scalar::int(30);
        let w = Scalar::int(30 - 7);
        let expect = &w + &Scalar::frac(49, 23);
        assert_eq!(c_of_point(&nu_point(&a), 1, &p), CInvariant::Finite(expect));
        assert_eq!(c_of_point(&ModuliPoint::from_ints(1, 0, 0).unwrap(), 0, &p), CInvariant::Infinity);
        assert_eq!(c_of_point(&ModuliPoint::from_ints(7, 0, 1).unwrap(), 1, &p), CInvariant::Infinity);
        assert_eq!(c_of_mu_params(&Scalar::zero(), &Scalar::one(), 0, &p).unwrap(), Scalar::int(-49));
    }

    #[test]
    fn points_of_families() {
        let c = ctx7();
        let nu = build_family(&FamilyParams::Nu { eps: 1, a_prime: Scalar::int(56) }, &c).unwrap();
        assert_eq!(point_from_cyclic_vector(&nu, &unit(1)).unwrap(), ModuliPoint::from_ints(56, 0, 1).unwrap());
        let iso = build_family(&FamilyParams::Iso { eps: 0, eps_prime: -1 }, &c).unwrap();
        assert_eq!(point_from_cyclic_vector(&iso, &unit(1)).unwrap(), ModuliPoint::from_ints(-7, 0, 1).unwrap());
        let m = build_family(&mu(0, 7, 0), &c).unwrap();
        assert_eq!(point_from_cyclic_vector(&m, &unit(0)).unwrap(), mu_point(&Scalar::int(7), &Scalar::zero(), 0, &Scalar::int(7)).unwrap());
    }

    #[test]
    fn classes_of_examples() {
        let c = ctx7();
        let cls = canonical_class(&build_family(&mu(0, 7, 0), &c).unwrap()).unwrap();
        assert_eq!(cls, CanonicalClass::MuGeneric { eps: 0, c: Scalar::int(-49) });
        assert_eq!(canonical_class(&build_family(&mu(0, 0, 0), &c).unwrap()).unwrap(), CanonicalClass::MuGeneric { eps: 0, c: Scalar::zero() });
        let c13 = PrimeContext::new(13, 4).unwrap();
        assert_eq!(
            canonical_class(&build_family(&mu(0, 0, 0), &c13).unwrap()).unwrap(),
            CanonicalClass::MuDegenerate { eps: 0, branch: DegenerateBranch::Origin }
        );
        assert_eq!(canonical_class(&build_family(&FamilyParams::Prod { eps_prime: -1 }, &c).unwrap()).unwrap(), CanonicalClass::Prod { eps_prime: -1 });
        let iso = build_family(&FamilyParams::Iso { eps: 1, eps_prime: 1 }, &c).unwrap();
        assert_eq!(canonical_class(&iso).unwrap(), CanonicalClass::Iso { eps: 1, eps_prime: 1 });
        let nu_inf = build_family(&FamilyParams::Nu { eps: -1, a_prime: Scalar::int(-7) }, &c).unwrap();
        assert_eq!(canonical_class(&nu_inf).unwrap(), CanonicalClass::NuInfinity { eps: -1 });
    }

    #[test]
    fn types_and_isomorphism() {
        let c = ctx7();
        let nu = build_family(&FamilyParams::Nu { eps: 0, a_prime: Scalar::int(49) }, &c).unwrap();
        assert_eq!(wintenberger_type(&nu).unwrap(), WintenbergerType::A);
        assert_eq!(canonical_class(&nu).unwrap(), CanonicalClass::MuGeneric { eps: 0, c: Scalar::int(50) });
        let m = build_family(&mu(0, 7, 0), &c).unwrap();
        assert_eq!(wintenberger_type(&m).unwrap(), WintenbergerType::B);
        let iso = |ep| build_family(&FamilyParams::Iso { eps: 0, eps_prime: ep }, &c).unwrap();
        assert_eq!(wintenberger_type(&iso(1)).unwrap(), WintenbergerType::B);
        assert!(is_isomorphic(&m, &build_family(&mu(0, 0, 1), &c).unwrap()).unwrap());
        assert!(!is_isomorphic(&nu, &m).unwrap());
        assert!(!is_isomorphic(&iso(1), &iso(-1)).unwrap());
    }

    #[test]
    fn zeta_member_is_degenerate() {
        let c = PrimeContext::new(7, 3).unwrap();
        let a = -(c.zeta() * Scalar::int(7));
        let d = build_family(&FamilyParams::Mu { eps: 1, a, b: Scalar::one() }, &c).unwrap();
        assert!(matches!(canonical_class(&d).unwrap(), CanonicalClass::MuDegenerate { eps: 1, branch: DegenerateBranch::Line1 | DegenerateBranch::Line2 }));
    }

    #[test]
    fn degenerate_lines_are_distinct() {
        let ctx = PrimeContext::new(13, 4).unwrap();
        let p = ctx.p_scalar();
        let [m1, m2] = degenerate_roots(&ctx, 0).unwrap().unwrap();
        let on = |m: &Scalar| ModuliPoint::new(-(m * &p), Scalar::int(3), Scalar::one()).unwrap();
        assert_eq!(class_from_point(&on(&m1), 0, &ctx).unwrap(), CanonicalClass::MuDegenerate { eps: 0, branch: DegenerateBranch::Line1 });
        assert_eq!(class_from_point(&on(&m2), 0, &ctx).unwrap(), CanonicalClass::MuDegenerate { eps: 0, branch: DegenerateBranch::Line2 });
        assert!(degenerate_roots(&ctx7(), 0).unwrap().is_none());
    }

    #[test]
    fn conic_and_inverse_chart() {
        let p = Scalar::int(7);
        let pt = mu_point(&Scalar::int(7), &Scalar::int(2), 1, &p).unwrap();
        let c = c_of_point(&pt, 1, &p).finite().cloned().unwrap();
        let q = level_conic_second_point(&pt, &[Scalar::int(1), Scalar::int(2), Scalar::int(3)], &c, 1, &p).unwrap();
        assert_ne!(q, pt);
        assert_eq!(c_of_point(&q, 1, &p), CInvariant::Finite(c.clone()));
        let (a, b) = mu_params_of_point(&q, 1, &p).unwrap();
        assert_eq!(mu_point(&a, &b, 1, &p).unwrap(), q);
        assert_eq!(c_of_mu_params(&a, &b, 1, &p).unwrap(), c);
    }
}
