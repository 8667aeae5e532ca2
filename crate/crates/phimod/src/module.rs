//! Rank-4 filtered φ-modules: the canonical families, the S1/S2 checks,
//! admissibility with an independent subobject sweep, and skew forms.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{char_poly, Matrix, SubspaceBasis, Vector};
use crate::poly::Poly;
use crate::scalar::{Cyclo, PrimeContext, Scalar, Valuation};
use crate::weil::{is_ss_weil, label_of, WeilLabel};

/// A Frobenius matrix on K⁴ with a two-dimensional fil₁.
///
/// The generators of fil₁ are kept as supplied (they steer the cyclic
/// vector search); `fil1()` is the echelon-normalised span.
#[derive(Clone, Debug)]
pub struct FilteredPhiModule {
    ctx: PrimeContext,
    phi: Matrix,
    fil1_gens: [Vector; 2],
    fil1: SubspaceBasis,
}

impl FilteredPhiModule {
    pub fn new(ctx: PrimeContext, phi: Matrix, fil1_gens: [Vector; 2]) -> Result<Self> {
        if phi.rows() != 4 || phi.cols() != 4 {
            return Err(Error::DimensionMismatch(format!("phi is {}x{}, expected 4x4", phi.rows(), phi.cols())));
        }
        if fil1_gens.iter().any(|v| v.len() != 4) {
            return Err(Error::DimensionMismatch("fil1 generators must have length 4".into()));
        }
        if phi.det().is_zero() {
            return Err(Error::Singular);
        }
        let fil1 = SubspaceBasis::span(4, &fil1_gens);
        if fil1.dim() != 2 {
            return Err(Error::PreconditionFailed(format!("fil1 has dimension {}, expected 2", fil1.dim())));
        }
        Ok(FilteredPhiModule { ctx, phi, fil1_gens, fil1 })
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn fil1(&self) -> &SubspaceBasis {
        &self.fil1
    }

    pub fn fil1_generators(&self) -> &[Vector; 2] {
        &self.fil1_gens
    }

    /// Same module, fil₁ described by different generators.
    pub fn with_fil1_generators(&self, gens: [Vector; 2]) -> Result<Self> {
        let m = FilteredPhiModule::new(self.ctx.clone(), self.phi.clone(), gens)?;
        if m.fil1 != self.fil1 {
            return Err(Error::PreconditionFailed("new generators span a different fil1".into()));
        }
        Ok(m)
    }

    /// Fil₁ generators rewritten through an invertible 2×2 matrix.
    pub fn rebase_fil1(&self, g: &Matrix) -> Result<Self> {
        if g.det().is_zero() {
            return Err(Error::Singular);
        }
        let [f1, f2] = &self.fil1_gens;
        let comb = |a: &Scalar, b: &Scalar| -> Vector { f1.iter().zip(f2).map(|(x, y)| a * x + b * y).collect() };
        self.with_fil1_generators([comb(g.get(0, 0), g.get(1, 0)), comb(g.get(0, 1), g.get(1, 1))])
    }

    /// The isomorphic module in the basis given by the columns of `q`:
    /// φ′ = Q⁻¹φQ and fil₁′ = Q⁻¹·fil₁.
    pub fn change_basis(&self, q: &Matrix) -> Result<Self> {
        let qi = q.inverse().ok_or(Error::Singular)?;
        let phi = qi.mul(&self.phi).mul(q);
        let gens = [qi.apply(&self.fil1_gens[0]), qi.apply(&self.fil1_gens[1])];
        FilteredPhiModule::new(self.ctx.clone(), phi, gens)
    }

    pub fn char_poly(&self) -> Poly {
        char_poly(&self.phi)
    }

    pub fn to_record(&self) -> ModuleRecord {
        let phi = self.phi.entries().iter().map(Scalar::to_pair).collect();
        let fil1 = self.fil1.vectors().iter().flatten().map(Scalar::to_pair).collect();
        ModuleRecord { p: self.ctx.p(), m: self.ctx.order(), n: self.ctx.precision(), phi, fil1 }
    }

    pub fn from_record(rec: &ModuleRecord) -> Result<Self> {
        let ctx = PrimeContext::with_precision(rec.p, rec.m, rec.n)?;
        Self::from_record_in(rec, ctx)
    }

    /// Parse a record inside an existing context (keeps its precision cap).
    pub fn from_record_in(rec: &ModuleRecord, ctx: PrimeContext) -> Result<Self> {
        if rec.p != ctx.p() || rec.m != ctx.order() {
            return Err(Error::Parse("record prime or field differs from the context".into()));
        }
        if rec.phi.len() != 16 || rec.fil1.len() != 8 {
            return Err(Error::Parse(format!(
                "expected 16 phi entries and 8 fil1 entries, got {} and {}",
                rec.phi.len(),
                rec.fil1.len()
            )));
        }
        let field = ctx.field();
        let parse = |pairs: &[[String; 2]]| -> Result<Vec<Scalar>> {
            pairs.iter().map(|pr| Scalar::from_pair(pr, field)).collect()
        };
        let phi = Matrix::new(4, 4, parse(&rec.phi)?);
        let f = parse(&rec.fil1)?;
        FilteredPhiModule::new(ctx, phi, [f[..4].to_vec(), f[4..].to_vec()])
    }
}

/// Flat serialisation: φ row-major, fil₁ as two echelon rows, every scalar
/// as its `[re, ζ-coefficient]` pair of `num/den` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleRecord {
    pub p: u64,
    pub m: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub phi: Vec<[String; 2]>,
    pub fil1: Vec<[String; 2]>,
}

/// Parameters of the canonical families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyParams {
    Prod { eps_prime: i8 },
    Iso { eps: i8, eps_prime: i8 },
    Nu { eps: i8, a_prime: Scalar },
    Mu { eps: i8, a: Scalar, b: Scalar },
}

impl FamilyParams {
    /// ε of the characteristic polynomial X⁴ + εpX² + p², if any.
    pub fn eps(&self) -> Option<i8> {
        match self {
            FamilyParams::Prod { .. } => None,
            FamilyParams::Iso { eps, .. } | FamilyParams::Nu { eps, .. } | FamilyParams::Mu { eps, .. } => Some(*eps),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            FamilyParams::Prod { .. } => "prod",
            FamilyParams::Iso { .. } => "iso",
            FamilyParams::Nu { .. } => "nu",
            FamilyParams::Mu { .. } => "mu",
        }
    }

    fn check_signs(&self) -> Result<()> {
        let bad_eps = self.eps().is_some_and(|e| !(-1..=1).contains(&e));
        let bad_ep = match self {
            FamilyParams::Prod { eps_prime } | FamilyParams::Iso { eps_prime, .. } => eps_prime.abs() != 1,
            _ => false,
        };
        if bad_eps || bad_ep {
            return Err(Error::PreconditionFailed(format!("sign parameters out of range in {self:?}")));
        }
        Ok(())
    }
}

impl std::fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilyParams::Prod { eps_prime } => write!(f, "Prod{{{eps_prime:+}}}"),
            FamilyParams::Iso { eps, eps_prime } => write!(f, "Iso{{{eps}, {eps_prime:+}}}"),
            FamilyParams::Nu { eps, a_prime } => write!(f, "Nu{{{eps}, {a_prime}}}"),
            FamilyParams::Mu { eps, a, b } => write!(f, "Mu{{{eps}, {a}, {b}}}"),
        }
    }
}

fn int(n: i64) -> Scalar {
    Scalar::int(n)
}

/// −(a² + εp + b²p²)/(ab + 1).
pub fn mu_c(a: &Scalar, b: &Scalar, eps: i8, p: &Scalar) -> Result<Scalar> {
    let den = a * b + int(1);
    let num = a * a + int(eps as i64) * p + b * b * p * p;
    (-num).checked_div(&den).ok_or_else(|| Error::DegenerateDenominator("ab = -1".into()))
}

/// The matrix of a canonical family member in its adapted basis.
pub fn family_phi(params: &FamilyParams, p: &Scalar) -> Result<Matrix> {
    params.check_signs()?;
    let z = Scalar::zero;
    let o = Scalar::one;
    let rows: Vec<Vec<Scalar>> = match params {
        FamilyParams::Prod { eps_prime } => {
            let ep = int(*eps_prime as i64) * p;
            vec![vec![z(), z(), ep.clone(), z()], vec![z(), z(), z(), ep], vec![o(), z(), z(), z()], vec![z(), o(), z(), z()]]
        }
        FamilyParams::Iso { eps, eps_prime } => {
            let ep = int(*eps_prime as i64) * p;
            let s = -(int(*eps as i64 + 2 * *eps_prime as i64) * p);
            vec![vec![z(), z(), ep.clone(), z()], vec![z(), z(), z(), ep], vec![o(), z(), z(), s], vec![z(), o(), o(), z()]]
        }
        FamilyParams::Nu { eps, a_prime } => {
            let ep = int(*eps as i64) * p;
            vec![
                vec![z(), z(), z(), o()],
                vec![-(p * p), z(), z(), z()],
                vec![z(), o(), z(), -a_prime.clone()],
                vec![a_prime - &ep, z(), o(), z()],
            ]
        }
        FamilyParams::Mu { eps, a, b } => {
            let c = mu_c(a, b, *eps, p)?;
            let den = a * b + int(1);
            let d_num = a * a * a + int(*eps as i64) * a * p - b * p * p;
            let d = -(d_num.checked_div(&den).expect("denominator checked by mu_c"));
            vec![
                vec![z(), z(), z(), -(p * p)],
                vec![z(), z(), o(), c],
                vec![o(), z(), a.clone(), d],
                vec![z(), o(), b.clone(), -a.clone()],
            ]
        }
    };
    Ok(Matrix::from_rows(rows))
}

fn unit_vector(i: usize) -> Vector {
    (0..4).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect()
}

/// The canonical family member with fil₁ = span(e₁, e₂).
pub fn build_family(params: &FamilyParams, ctx: &PrimeContext) -> Result<FilteredPhiModule> {
    for s in family_scalars(params) {
        if !s.is_rational() && s.field() != ctx.field() {
            return Err(Error::FieldMismatch);
        }
    }
    let phi = family_phi(params, &ctx.p_scalar())?;
    FilteredPhiModule::new(ctx.clone(), phi, [unit_vector(0), unit_vector(1)])
}

fn family_scalars(params: &FamilyParams) -> Vec<&Scalar> {
    match params {
        FamilyParams::Nu { a_prime, .. } => vec![a_prime],
        FamilyParams::Mu { a, b, .. } => vec![a, b],
        _ => Vec::new(),
    }
}

/// Whether the parameters satisfy the valuation conditions under which the
/// canonical family member is a classified object.
pub fn validate_geometric_params(params: &FamilyParams, ctx: &PrimeContext) -> Result<bool> {
    if params.check_signs().is_err() {
        return Ok(false);
    }
    let p = ctx.p_scalar();
    match params {
        FamilyParams::Prod { .. } | FamilyParams::Iso { .. } => Ok(true),
        FamilyParams::Nu { eps, a_prime } => {
            let shift = a_prime - &(int(*eps as i64) * &p);
            Ok(ctx.valuation(&shift)?.at_least(2))
        }
        FamilyParams::Mu { a, b, .. } => {
            if (a * b + int(1)).is_zero() {
                return Ok(false);
            }
            let va = ctx.valuation(a)?;
            let vb = ctx.valuation(b)?;
            let standard = va.at_least(1) && vb.at_least(0);
            let shifted = match (va, vb) {
                (Valuation::Finite(x), Valuation::Finite(y)) => x == y + 1,
                _ => false,
            };
            Ok(standard || shifted)
        }
    }
}

/// Outcome of the S1 and S2 checks.
#[derive(Clone, Debug)]
pub struct S12Report {
    pub s1: bool,
    pub s2: bool,
    pub char_poly: Poly,
    pub label: Option<WeilLabel>,
    pub semisimple: bool,
    pub minimal_poly: Poly,
}

/// Minimal polynomial. The radical of χ is tried first; otherwise the first
/// linear dependency among I, φ, φ², … is used.
pub fn minimal_polynomial(m: &Matrix) -> Poly {
    let chi = char_poly(m);
    let radical = chi.div_rem(&chi.gcd(&chi.derivative())).0.monic();
    if radical.eval_matrix(m).entries().iter().all(Scalar::is_zero) {
        return radical;
    }
    minimal_polynomial_by_powers(m)
}

fn minimal_polynomial_by_powers(m: &Matrix) -> Poly {
    let n = m.rows();
    let mut powers = vec![Matrix::identity(n)];
    loop {
        let cols: Vec<Vector> = powers.iter().map(Matrix::flatten).collect();
        let kernel = Matrix::from_cols(&cols).kernel();
        if let Some(v) = kernel.vectors().iter().find(|v| !v.last().unwrap().is_zero()) {
            return Poly::new(v.clone()).monic();
        }
        let next = powers.last().unwrap().mul(m);
        powers.push(next);
    }
}

fn integer_coefficients(f: &Poly) -> Option<Vec<BigInt>> {
    f.coeffs()
        .iter()
        .map(|c| c.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer()))
        .collect()
}

/// S1: dim D = 4 and dim fil₁ = 2. S2: χ_φ is a supersingular Weil
/// polynomial of degree 4 and φ is semisimple.
pub fn check_s1_s2(d: &FilteredPhiModule) -> S12Report {
    let chi = d.char_poly();
    let radical = chi.div_rem(&chi.gcd(&chi.derivative())).0.monic();
    let minimal_poly = if radical.eval_matrix(d.phi()).entries().iter().all(Scalar::is_zero) {
        radical
    } else {
        minimal_polynomial_by_powers(d.phi())
    };
    let semisimple = minimal_poly.is_squarefree();
    let p = d.p();
    let (label, ss) = match integer_coefficients(&chi) {
        Some(ints) => (label_of(&ints, p), is_ss_weil(&ints, p)),
        None => (None, false),
    };
    S12Report {
        s1: d.phi().rows() == 4 && d.fil1().dim() == 2,
        s2: ss && label.is_some() && semisimple,
        char_poly: chi,
        label,
        semisimple,
        minimal_poly,
    }
}

/// Hodge and Newton numbers of one φ-stable subspace.
#[derive(Clone, Debug)]
pub struct SubobjectNumbers {
    pub basis: SubspaceBasis,
    pub t_h: i64,
    pub t_n: i64,
}

#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    /// Verdict of the fil₁-stability test.
    pub admissible: bool,
    /// A vector x ∈ fil₁ with φ(x) ∉ fil₁, when one exists.
    pub witness: Option<Vector>,
    /// The φ-stable planes swept by the independent oracle.
    pub subobjects: Vec<SubobjectNumbers>,
    /// Verdict of the t_H ≤ t_N sweep.
    pub sweep_admissible: bool,
}

impl AdmissibilityReport {
    pub fn verdicts_agree(&self) -> bool {
        self.admissible == self.sweep_admissible
    }
}

fn fmt_vector(v: &[Scalar]) -> String {
    let parts: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// φ restricted to a stable subspace, in the echelon basis of that subspace.
fn restrict(phi: &Matrix, w: &SubspaceBasis) -> Option<Matrix> {
    let cols: Option<Vec<Vector>> = w.vectors().iter().map(|v| w.coordinates(&phi.apply(v))).collect();
    cols.map(|c| Matrix::from_cols(&c))
}

fn subobject_numbers(d: &FilteredPhiModule, w: SubspaceBasis) -> Result<Option<SubobjectNumbers>> {
    let Some(block) = restrict(d.phi(), &w) else {
        return Ok(None);
    };
    let t_h = w.intersection_dim(d.fil1()) as i64;
    let t_n = match d.ctx().valuation(&block.det())? {
        Valuation::Finite(v) => v,
        Valuation::Infinite => return Err(Error::Singular),
    };
    Ok(Some(SubobjectNumbers { basis: w, t_h, t_n }))
}

/// The φ-stable planes defined over the scalar field that the sweep visits.
fn stable_planes(d: &FilteredPhiModule, label: WeilLabel) -> Vec<SubspaceBasis> {
    let phi = d.phi();
    let mut out: Vec<SubspaceBasis> = Vec::new();
    match label {
        WeilLabel::ProdPlus | WeilLabel::ProdMinus => {
            // φ² is scalar, so span(f, φf) is stable for every f; the planes
            // meeting fil₁ in dimension 2 are among these.
            let [f1, f2] = [&d.fil1().vectors()[0], &d.fil1().vectors()[1]];
            let sum: Vector = f1.iter().zip(f2).map(|(a, b)| a + b).collect();
            for f in [f1.clone(), f2.clone(), sum] {
                let w = SubspaceBasis::span(4, &[f.clone(), phi.apply(&f)]);
                if w.dim() == 2 && !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        WeilLabel::Eps(eps) => {
            // χ = (X² − r₁)(X² − r₂) with r₁, r₂ the roots of Y² + εpY + p².
            let p = d.ctx().p_scalar();
            let disc = &p * &p * int((eps as i64) * (eps as i64) - 4);
            if let Some(root) = d.ctx().sqrt(&disc) {
                let phi2 = phi.mul(phi);
                for sign in [1, -1] {
                    let r = (-(int(eps as i64) * &p) + int(sign) * &root) * Scalar::frac(1, 2);
                    let w = phi2.sub(&Matrix::identity(4).scale(&r)).kernel();
                    if w.dim() == 2 && !out.contains(&w) {
                        out.push(w);
                    }
                }
            }
        }
    }
    out
}

/// Admissibility: fil₁ is not φ-stable. The report also sweeps the
/// φ-stable planes over the scalar field and compares t_H with t_N.
pub fn is_admissible(d: &FilteredPhiModule) -> Result<AdmissibilityReport> {
    is_admissible_given(d, &check_s1_s2(d))
}

/// [`is_admissible`] with the S1/S2 report already computed.
pub fn is_admissible_given(d: &FilteredPhiModule, s12: &S12Report) -> Result<AdmissibilityReport> {
    if !s12.s1 || !s12.s2 {
        return Err(Error::PreconditionFailed(format!(
            "S1 = {}, S2 = {} (characteristic polynomial {})",
            s12.s1, s12.s2, s12.char_poly
        )));
    }
    let label = s12.label.expect("S2 implies a label");
    let image = d.fil1().image(d.phi());
    let witness = d.fil1().vectors().iter().find(|v| !d.fil1().contains(&d.phi().apply(v))).cloned();
    let admissible = !d.fil1().contains_subspace(&image);
    let mut subobjects = Vec::new();
    for w in stable_planes(d, label) {
        if let Some(n) = subobject_numbers(d, w)? {
            subobjects.push(n);
        }
    }
    let sweep_admissible = subobjects.iter().all(|s| s.t_h <= s.t_n);
    Ok(AdmissibilityReport { admissible, witness, subobjects, sweep_admissible })
}

/// Admissibility as a hard requirement; the error names the stable fil₁.
pub fn require_admissible(d: &FilteredPhiModule) -> Result<AdmissibilityReport> {
    require_admissible_given(d, &check_s1_s2(d))
}

pub fn require_admissible_given(d: &FilteredPhiModule, s12: &S12Report) -> Result<AdmissibilityReport> {
    let rep = is_admissible_given(d, s12)?;
    if !rep.verdicts_agree() {
        return Err(Error::Internal("fil1-stability and subobject sweep disagree".into()));
    }
    if !rep.admissible {
        let w: Vec<String> = d.fil1().vectors().iter().map(|v| fmt_vector(v)).collect();
        return Err(Error::NotAdmissible { witness: w.join(", ") });
    }
    Ok(rep)
}

/// Which basis a Gram matrix was first written in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormBasis {
    /// (x, y, φx, φy) for a basis (x, y) of fil₁.
    ProductPairs,
    /// (x, φx, φ²x, φ³x) for a cyclic vector x ∈ fil₁.
    Orbit,
}

/// A skew form on D, Gram matrix expressed in the standard basis of D.
#[derive(Clone, Debug)]
pub struct SkewForm {
    pub gram: Matrix,
    pub basis_note: FormBasis,
    /// The Gram matrix in the basis described by `basis_note`.
    pub local_gram: Matrix,
    /// Coefficients (x₁, x₂, x₃) for orbit-basis forms.
    pub coefficients: Option<[Scalar; 3]>,
}

/// The orbit-basis Gram matrix built from the coefficients α of
/// y ≡ α₁φx + α₂φ²x + α₃φ³x modulo x, with the isotropy condition
/// (α₁ + (1−ε)pα₃)x₁ + α₂x₂ = 0 and x₃ = (1−ε)px₁.
pub fn automat_gram(alpha: &[Scalar; 3], eps: i8, p: &Scalar) -> (Matrix, [Scalar; 3]) {
    let shift = int(1 - eps as i64) * p;
    let lead = &alpha[0] + &(&shift * &alpha[2]);
    let (mut x1, mut x2) = (-alpha[1].clone(), lead);
    if x1.is_zero() && x2.is_zero() {
        x1 = Scalar::one();
    } else {
        let first = if x1.is_zero() { x2.clone() } else { x1.clone() };
        let inv = first.inv().unwrap();
        x1 = &x1 * &inv;
        x2 = &x2 * &inv;
    }
    let x3 = &shift * &x1;
    let z = Scalar::zero();
    let pp = p * p;
    let g = Matrix::from_rows(vec![
        vec![z.clone(), x1.clone(), x2.clone(), x3.clone()],
        vec![-x1.clone(), z.clone(), p * &x1, p * &x2],
        vec![-x2.clone(), -(p * &x1), z.clone(), &pp * &x1],
        vec![-x3.clone(), -(p * &x2), -(&pp * &x1), z],
    ]);
    (g, [x1, x2, x3])
}

/// The Gram matrix of the product-case form in the basis (x, y, φx, φy).
pub fn product_gram(eps_prime: i8) -> Matrix {
    let e = eps_prime as i64;
    Matrix::from_ints(4, 4, &[0, 0, 0, 1, 0, 0, -e, 0, 0, e, 0, 0, -1, 0, 0, 0])
}

/// Transport a Gram matrix from the basis with columns T to the standard basis.
fn to_standard(local: &Matrix, t: &Matrix) -> Result<Matrix> {
    let ti = t.inverse().ok_or(Error::Singular)?;
    Ok(ti.transpose().mul(local).mul(&ti))
}

/// A vector of fil₁ whose φ-orbit spans D, by a fixed search order.
pub fn find_cyclic_vector(d: &FilteredPhiModule) -> Result<Vector> {
    cyclic_candidates(d).into_iter().find(|x| orbit_matrix(d.phi(), x).det() != Scalar::zero()).ok_or(Error::NoCyclicVector)
}

/// Candidates in search order: the two generators, their sum, then
/// c₁f₁ + c₂f₂ with |cᵢ| ≤ 3.
pub fn cyclic_candidates(d: &FilteredPhiModule) -> Vec<Vector> {
    let [f1, f2] = d.fil1_generators();
    let comb = |a: i64, b: i64| -> Vector { f1.iter().zip(f2).map(|(x, y)| int(a) * x + int(b) * y).collect() };
    let mut out = vec![f1.clone(), f2.clone(), comb(1, 1)];
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            if (a, b) != (0, 0) && (a, b) != (1, 0) && (a, b) != (0, 1) && (a, b) != (1, 1) {
                out.push(comb(a, b));
            }
        }
    }
    out
}

/// Columns x, φx, φ²x, φ³x.
pub fn orbit_matrix(phi: &Matrix, x: &[Scalar]) -> Matrix {
    let mut cols = vec![x.to_vec()];
    for _ in 0..3 {
        let next = phi.apply(cols.last().unwrap());
        cols.push(next);
    }
    Matrix::from_cols(&cols)
}

/// A generator of fil₁ completing x to a basis of fil₁.
pub fn complement_in_fil1(d: &FilteredPhiModule, x: &[Scalar]) -> Vector {
    d.fil1()
        .vectors()
        .iter()
        .find(|v| SubspaceBasis::span(4, &[x.to_vec(), v.to_vec()]).dim() == 2)
        .cloned()
        .expect("fil1 has dimension 2")
}

/// Skew form making φ a p-similitude with fil₁ totally isotropic.
pub fn construct_skew_form(d: &FilteredPhiModule) -> Result<SkewForm> {
    let s12 = check_s1_s2(d);
    let p = d.ctx().p_scalar();
    match s12.label {
        Some(WeilLabel::ProdPlus) | Some(WeilLabel::ProdMinus) => {
            let ep = s12.label.unwrap().eps_prime().unwrap();
            let x = d.fil1().vectors()[0].clone();
            let y = d.fil1().vectors()[1].clone();
            let t = Matrix::from_cols(&[x.clone(), y.clone(), d.phi().apply(&x), d.phi().apply(&y)]);
            let local = product_gram(ep);
            Ok(SkewForm { gram: to_standard(&local, &t)?, basis_note: FormBasis::ProductPairs, local_gram: local, coefficients: None })
        }
        Some(WeilLabel::Eps(eps)) => {
            let x = find_cyclic_vector(d)?;
            let t = orbit_matrix(d.phi(), &x);
            let y = complement_in_fil1(d, &x);
            let coords = t.inverse().ok_or(Error::Singular)?.apply(&y);
            let alpha = [coords[1].clone(), coords[2].clone(), coords[3].clone()];
            let (local, coeffs) = automat_gram(&alpha, eps, &p);
            Ok(SkewForm { gram: to_standard(&local, &t)?, basis_note: FormBasis::Orbit, local_gram: local, coefficients: Some(coeffs) })
        }
        None => Err(Error::PreconditionFailed(format!("characteristic polynomial {} is not supersingular", s12.char_poly))),
    }
}

fn pairing(g: &Matrix, u: &[Scalar], v: &[Scalar]) -> Scalar {
    u.iter().zip(g.apply(v)).map(|(a, b)| a * &b).sum()
}

/// S3: δ non-degenerate, φ a p-similitude, fil₁ totally isotropic.
pub fn verify_s3(d: &FilteredPhiModule, form: &SkewForm) -> bool {
    let g = &form.gram;
    if g.rows() != 4 || g.transpose() != g.neg() || g.det().is_zero() {
        return false;
    }
    let p = d.ctx().p_scalar();
    let similitude = d.phi().transpose().mul(g).mul(d.phi()) == g.scale(&p);
    let f = d.fil1().vectors();
    similitude && pairing(g, &f[0], &f[1]).is_zero()
}

/// Tag check mirroring the scalar field of a module.
pub fn field_of(d: &FilteredPhiModule) -> Cyclo {
    d.ctx().field()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx7() -> PrimeContext {
        PrimeContext::rational(7).unwrap()
    }

    #[test]
    fn prod_matrix_and_checks() {
        let d = build_family(&FamilyParams::Prod { eps_prime: 1 }, &ctx7()).unwrap();
        assert_eq!(d.phi(), &Matrix::from_ints(4, 4, &[0, 0, 7, 0, 0, 0, 0, 7, 1, 0, 0, 0, 0, 1, 0, 0]));
        let r = check_s1_s2(&build_family(&FamilyParams::Prod { eps_prime: -1 }, &ctx7()).unwrap());
        assert!(r.s1 && r.s2);
        assert_eq!(r.label, Some(WeilLabel::ProdMinus));
    }

    #[test]
    fn zeta_member_has_c_minus_p() {
        let ctx = PrimeContext::new(7, 3).unwrap();
        let a = -(ctx.zeta() * Scalar::int(7));
        let d = build_family(&FamilyParams::Mu { eps: 1, a, b: Scalar::one() }, &ctx).unwrap();
        assert_eq!(d.phi().get(1, 3), &Scalar::int(-7));
        assert_eq!(d.char_poly(), Poly::from_ints(&[49, 0, 7, 0, 1]));
    }

    #[test]
    fn degenerate_denominator() {
        let r = build_family(&FamilyParams::Mu { eps: 0, a: Scalar::one(), b: Scalar::int(-1) }, &ctx7());
        assert!(matches!(r, Err(Error::DegenerateDenominator(_))));
    }

    #[test]
    fn admissibility_examples() {
        let nu = build_family(&FamilyParams::Nu { eps: 1, a_prime: Scalar::int(7) }, &ctx7()).unwrap();
        let r = is_admissible(&nu).unwrap();
        assert!(r.admissible && r.verdicts_agree());

        let prod = build_family(&FamilyParams::Prod { eps_prime: 1 }, &ctx7()).unwrap();
        let bad = FilteredPhiModule::new(ctx7(), prod.phi().clone(), [unit_vector(0), unit_vector(2)]).unwrap();
        let r = is_admissible(&bad).unwrap();
        assert!(!r.admissible && r.verdicts_agree());
        assert!(matches!(require_admissible(&bad), Err(Error::NotAdmissible { .. })));
    }

    #[test]
    fn s2_rejects_non_weil() {
        let phi = Matrix::diag(&[Scalar::int(1), Scalar::int(2), Scalar::int(3), Scalar::int(4)]);
        let d = FilteredPhiModule::new(ctx7(), phi, [unit_vector(0), unit_vector(1)]).unwrap();
        let r = check_s1_s2(&d);
        assert!(r.s1 && !r.s2);
        assert!(matches!(is_admissible(&d), Err(Error::PreconditionFailed(_))));
        let mu = build_family(&FamilyParams::Mu { eps: 0, a: Scalar::int(7), b: Scalar::zero() }, &ctx7()).unwrap();
        let r = check_s1_s2(&mu);
        assert!(r.s2);
        assert_eq!(r.char_poly, Poly::from_ints(&[49, 0, 0, 0, 1]));
    }

    #[test]
    fn geometric_validation() {
        let c = ctx7();
        assert!(validate_geometric_params(&FamilyParams::Nu { eps: 0, a_prime: Scalar::int(49) }, &c).unwrap());
        assert!(!validate_geometric_params(&FamilyParams::Nu { eps: 1, a_prime: Scalar::int(49) }, &c).unwrap());
        assert!(validate_geometric_params(&FamilyParams::Mu { eps: 0, a: Scalar::int(7), b: Scalar::zero() }, &c).unwrap());
        assert!(!validate_geometric_params(&FamilyParams::Mu { eps: 0, a: Scalar::one(), b: Scalar::one() }, &c).unwrap());
        assert!(validate_geometric_params(&FamilyParams::Mu { eps: 0, a: Scalar::frac(1, 7), b: Scalar::frac(1, 49) }, &c).unwrap());
    }

    #[test]
    fn skew_forms() {
        let c = ctx7();
        let prod = build_family(&FamilyParams::Prod { eps_prime: 1 }, &c).unwrap();
        let f = construct_skew_form(&prod).unwrap();
        assert_eq!(f.local_gram, product_gram(1));
        assert!(verify_s3(&prod, &f));
        let zero = SkewForm { gram: Matrix::zero(4, 4), basis_note: FormBasis::Orbit, local_gram: Matrix::zero(4, 4), coefficients: None };
        assert!(!verify_s3(&prod, &zero));

        let nu = build_family(&FamilyParams::Nu { eps: 0, a_prime: Scalar::int(49) }, &c).unwrap();
        let f = construct_skew_form(&nu).unwrap();
        assert!(verify_s3(&nu, &f));

        let p = Scalar::int(7);
        let (g, x) = automat_gram(&[Scalar::int(5), Scalar::zero(), Scalar::one()], 0, &p);
        assert_eq!(x, [Scalar::zero(), Scalar::one(), Scalar::zero()]);
        assert_eq!(g.det(), Scalar::int(49));
        let (_, x) = automat_gram(&[Scalar::zero(), Scalar::zero(), Scalar::one()], 1, &p);
        assert_eq!(x, [Scalar::one(), Scalar::zero(), Scalar::zero()]);
        // x₃ = (1−ε)p·x₁ when the condition is vacuous.
        let (_, x) = automat_gram(&[Scalar::zero(), Scalar::zero(), Scalar::zero()], -1, &p);
        assert_eq!(x, [Scalar::one(), Scalar::zero(), Scalar::int(14)]);
    }

    #[test]
    fn record_round_trip() {
        let ctx = PrimeContext::new(7, 3).unwrap();
        let a = -(ctx.zeta() * Scalar::int(7));
        let d = build_family(&FamilyParams::Mu { eps: 1, a, b: Scalar::one() }, &ctx).unwrap();
        let rec = d.to_record();
        let back = FilteredPhiModule::from_record(&rec).unwrap();
        assert_eq!(back.phi(), d.phi());
        assert_eq!(back.fil1(), d.fil1());
    }

    #[test]
    fn minimal_polynomials() {
        let prod = build_family(&FamilyParams::Prod { eps_prime: -1 }, &ctx7()).unwrap();
        assert_eq!(minimal_polynomial(prod.phi()), Poly::from_ints(&[7, 0, 1]));
        let j = Matrix::from_ints(2, 2, &[1, 1, 0, 1]);
        assert_eq!(minimal_polynomial(&j), Poly::from_ints(&[1, -2, 1]));
        assert!(!minimal_polynomial(&j).is_squarefree());
    }
}
