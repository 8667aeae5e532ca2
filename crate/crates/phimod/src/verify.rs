//! Verification suites shared by the acceptance harness and the CLI.
//!
//! Each check returns a [`CheckReport`]; expected values come from
//! independent computations (brute-force orbit products, the explicit chart
//! maps, the block description of the Lie algebras) rather than from the
//! code path under test.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{
    c_of_mu_params, c_of_point, canonical_class, class_from_point, degenerate_roots, is_isomorphic, level_conic_second_point, mu_params_of_point,
    mu_point, nu_point, CInvariant, CanonicalClass, DegenerateBranch, ModuliPoint, WintenbergerType,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lattice::{construct_lattice, lattice_grid_check, valuation_region, verify_lattice};
use crate::moduli::{crosscheck_c_definitions, random_eigendata, verify_invariant_ring};
use crate::module::{
    build_family, check_s1_s2, construct_skew_form, mu_c, require_admissible, validate_geometric_params, verify_s3, FamilyParams, FilteredPhiModule,
};
use crate::monodromy::{family_monodromy, is_semisimple_module, structural_membership_check, GroupKind};
use crate::sampling::{random_integral, random_invertible, random_unimodular, random_unit, rng_for, sample_iso, sample_mu, sample_mu_degenerate, sample_nu, sample_prod};
use crate::scalar::{is_prime, PrimeContext, Scalar, Valuation};
use crate::scan::{is_exceptional_c, point_module, scan, ScanConfig};
use crate::weil::{enumerate_ss_weil_deg4, galois_orbit_products};

const EPSILONS: [i8; 3] = [-1, 0, 1];

/// Outcome of one verification check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    #[serde(serialize_with = "as_secs")]
    pub elapsed: Duration,
    #[serde(serialize_with = "opt_as_secs")]
    pub budget: Option<Duration>,
}

fn as_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

fn opt_as_secs<S: serde::Serializer>(d: &Option<Duration>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match d {
        Some(d) => s.serialize_some(&d.as_secs_f64()),
        None => s.serialize_none(),
    }
}

impl CheckReport {
    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.elapsed <= b)
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.within_budget()
    }
}

/// Collects case outcomes for one check.
struct Tally {
    name: &'static str,
    start: Instant,
    budget: Option<Duration>,
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new(name: &'static str, budget_secs: Option<u64>) -> Self {
        Tally { name, start: Instant::now(), budget: budget_secs.map(Duration::from_secs), cases: 0, failures: Vec::new() }
    }

    fn case(&mut self, outcome: Result<Option<String>>, label: impl FnOnce() -> String) {
        self.cases += 1;
        match outcome {
            Ok(None) => {}
            Ok(Some(msg)) => self.failures.push(format!("{}: {msg}", label())),
            Err(e) => self.failures.push(format!("{}: error: {e}", label())),
        }
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn finish(self) -> CheckReport {
        CheckReport { name: self.name, cases: self.cases, failures: self.failures, elapsed: self.start.elapsed(), budget: self.budget }
    }
}

fn fail_if(bad: bool, msg: impl FnOnce() -> String) -> Option<String> {
    bad.then(msg)
}

/// Enumeration of supersingular quartics against the orbit-product oracle.
pub fn weil_enumeration() -> CheckReport {
    let mut t = Tally::new("weil enumeration", Some(5));
    for p in (7u64..=97).filter(|&p| is_prime(p)) {
        let outcome = enumerate_ss_weil_deg4(p).map(|list| {
            let got: BTreeSet<_> = list.into_iter().map(|w| w.coefficients).collect();
            let oracle: BTreeSet<_> = galois_orbit_products(p).into_iter().collect();
            if got.len() != 5 {
                Some(format!("{} polynomials", got.len()))
            } else if got != oracle {
                Some(format!("enumeration differs from the oracle ({} oracle polynomials)", oracle.len()))
            } else {
                None
            }
        });
        t.case(outcome, || format!("p = {p}"));
    }
    t.finish()
}

/// The class predicted by the chart maps alone.
pub fn class_by_chart(params: &FamilyParams, ctx: &PrimeContext) -> Result<CanonicalClass> {
    let p = ctx.p_scalar();
    match params {
        FamilyParams::Prod { eps_prime } => Ok(CanonicalClass::Prod { eps_prime: *eps_prime }),
        FamilyParams::Iso { eps, eps_prime } => Ok(CanonicalClass::Iso { eps: *eps, eps_prime: *eps_prime }),
        FamilyParams::Nu { eps, a_prime } => class_from_point(&nu_point(a_prime), *eps, ctx),
        FamilyParams::Mu { eps, a, b } => class_from_point(&mu_point(a, b, *eps, &p)?, *eps, ctx),
    }
}

fn sample_any(rng: &mut ChaCha8Rng, index: usize, eps: i8, p: u64) -> FamilyParams {
    match index % 10 {
        0 => sample_prod(rng),
        1 => sample_iso(rng, eps),
        2..=4 => sample_nu(rng, eps, p),
        _ => sample_mu(rng, eps, p),
    }
}

fn roundtrip_case(params: &FamilyParams, rng: &mut ChaCha8Rng, ctx: &PrimeContext) -> Result<Option<String>> {
    if !validate_geometric_params(params, ctx)? {
        return Ok(Some("sampled parameters are not geometric".into()));
    }
    let d = build_family(params, ctx)?;
    let adm = require_admissible(&d)?;
    if !adm.verdicts_agree() {
        return Ok(Some("admissibility verdicts disagree".into()));
    }
    let s12 = check_s1_s2(&d);
    if !(s12.s1 && s12.s2) {
        return Ok(Some(format!("S1 = {}, S2 = {}", s12.s1, s12.s2)));
    }
    let form = construct_skew_form(&d)?;
    if !verify_s3(&d, &form) {
        return Ok(Some("constructed skew form fails S3".into()));
    }
    let class = canonical_class(&d)?;
    let expected = class_by_chart(params, ctx)?;
    if class != expected {
        return Ok(Some(format!("class {class}, chart predicts {expected}")));
    }
    for k in 0..5 {
        let rebased = d.rebase_fil1(&random_invertible(rng, 2, 3))?;
        let c = canonical_class(&rebased)?;
        if c != class {
            return Ok(Some(format!("fil1 change {k} gives {c}")));
        }
    }
    for k in 0..5 {
        let conj = d.change_basis(&random_unimodular(rng, 4, 6, 2))?;
        let c = canonical_class(&conj)?;
        if c != class {
            return Ok(Some(format!("conjugation {k} gives {c}")));
        }
    }
    Ok(None)
}

/// Admissibility, S1–S3 and stability of the class under changes of basis.
pub fn classification_roundtrip(samples_per_eps: usize, seed: u64, exec: Execution) -> CheckReport {
    let mut t = Tally::new("classification round-trip", Some(60));
    for p in [7u64, 13] {
        let ctx = PrimeContext::rational(p).expect("valid prime");
        for eps in EPSILONS {
            let outcomes = exec.map_range(samples_per_eps, |i| {
                let mut rng = rng_for(seed ^ p ^ ((eps + 1) as u64) << 8, i as u64);
                let params = sample_any(&mut rng, i, eps, p);
                (params.clone(), roundtrip_case(&params, &mut rng, &ctx))
            });
            for (params, outcome) in outcomes {
                t.case(outcome, || format!("p = {p}, {params}"));
            }
        }
    }
    t.finish()
}

fn random_direction(rng: &mut ChaCha8Rng) -> [Scalar; 3] {
    std::array::from_fn(|_| Scalar::int(rng.gen_range(-4..=4)))
}

fn random_small_point(rng: &mut ChaCha8Rng) -> ModuliPoint {
    loop {
        let v: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-9..=9));
        if let Ok(pt) = ModuliPoint::from_ints(v[0], v[1], v[2]) {
            return pt;
        }
    }
}

/// A pair of modules with equal finite c ≠ −εp, from a point and a second
/// point of its level conic.
fn equal_c_pair(rng: &mut ChaCha8Rng, k: usize, ctx: &PrimeContext) -> (FilteredPhiModule, FilteredPhiModule, String) {
    let p = ctx.p_scalar();
    loop {
        let eps = EPSILONS[k % 3];
        let minus_ep = -(Scalar::int(eps as i64) * &p);
        if k.is_multiple_of(2) {
            let FamilyParams::Mu { a, b, .. } = sample_mu(rng, eps, ctx.p()) else { unreachable!() };
            let Ok(c) = c_of_mu_params(&a, &b, eps, &p) else { continue };
            if c == minus_ep {
                continue;
            }
            let pt = mu_point(&a, &b, eps, &p).expect("ab + 1 is nonzero");
            let Some(q) = level_conic_second_point(&pt, &random_direction(rng), &c, eps, &p) else { continue };
            let Some((a2, b2)) = mu_params_of_point(&q, eps, &p) else { continue };
            if (&a2, &b2) == (&a, &b) {
                continue;
            }
            let first = FamilyParams::Mu { eps, a, b };
            let second = FamilyParams::Mu { eps, a: a2, b: b2 };
            let (Ok(d1), Ok(d2)) = (build_family(&first, ctx), build_family(&second, ctx)) else { continue };
            return (d1, d2, format!("{first} ~ {second}"));
        } else {
            let pt = random_small_point(rng);
            let CInvariant::Finite(c) = c_of_point(&pt, eps, &p) else { continue };
            if c == minus_ep {
                continue;
            }
            let Some(q) = level_conic_second_point(&pt, &random_direction(rng), &c, eps, &p) else { continue };
            if q == pt {
                continue;
            }
            let (Ok(d1), Ok(d2)) = (point_module(&pt, eps, ctx), point_module(&q, eps, ctx)) else { continue };
            return (d1, d2, format!("eps = {eps}, {pt} ~ {q}"));
        }
    }
}

/// Two modules whose c-values (computed by the chart formulas) differ.
fn distinct_c_pair(rng: &mut ChaCha8Rng, k: usize, ctx: &PrimeContext) -> (FilteredPhiModule, FilteredPhiModule, String) {
    let p = ctx.p_scalar();
    let eps = EPSILONS[k % 3];
    let draw = |rng: &mut ChaCha8Rng| -> (FilteredPhiModule, CInvariant, String) {
        loop {
            if rng.gen_bool(0.5) {
                let params = if rng.gen_bool(0.5) { sample_mu(rng, eps, ctx.p()) } else { sample_nu(rng, eps, ctx.p()) };
                let c = match &params {
                    FamilyParams::Mu { a, b, .. } => c_of_point(&mu_point(a, b, eps, &p).unwrap(), eps, &p),
                    FamilyParams::Nu { a_prime, .. } => c_of_point(&nu_point(a_prime), eps, &p),
                    _ => unreachable!(),
                };
                if let Ok(d) = build_family(&params, ctx) {
                    return (d, c, params.to_string());
                }
            } else {
                let pt = random_small_point(rng);
                if let Ok(d) = point_module(&pt, eps, ctx) {
                    return (d, c_of_point(&pt, eps, &p), format!("eps = {eps}, {pt}"));
                }
            }
        }
    };
    loop {
        let (d1, c1, l1) = draw(rng);
        let (d2, c2, l2) = draw(rng);
        if c1 != c2 {
            return (d1, d2, format!("{l1} (c = {c1}) vs {l2} (c = {c2})"));
        }
    }
}

/// Equal c gives isomorphic modules, distinct c non-isomorphic ones, and
/// the three branches over c = −εp are separated in the split case.
pub fn c_injectivity(pairs: usize, seed: u64, exec: Execution) -> CheckReport {
    let mut t = Tally::new("injectivity of c", Some(30));
    let ctx = PrimeContext::rational(7).expect("valid prime");
    let equal = exec.map_range(pairs, |k| {
        let (d1, d2, label) = equal_c_pair(&mut rng_for(seed, k as u64), k, &ctx);
        (label, is_isomorphic(&d1, &d2).map(|iso| fail_if(!iso, || "equal c but not isomorphic".into())))
    });
    for (label, outcome) in equal {
        t.case(outcome, || label);
    }
    let distinct = exec.map_range(pairs, |k| {
        let (d1, d2, label) = distinct_c_pair(&mut rng_for(seed.wrapping_add(1), k as u64), k, &ctx);
        (label, is_isomorphic(&d1, &d2).map(|iso| fail_if(iso, || "distinct c but isomorphic".into())))
    });
    for (label, outcome) in distinct {
        t.case(outcome, || label);
    }
    match degenerate_branches(seed) {
        Ok(failures) => {
            t.cases += 1;
            t.failures.extend(failures);
        }
        Err(e) => t.case(Err(e), || "degenerate branches".into()),
    }
    t.finish()
}

/// At p = 13 over Q(ζ₄), ε = 0: sampled modules on each line and at the
/// origin land in their own branch, and the three branches are distinct.
fn degenerate_branches(seed: u64) -> Result<Vec<String>> {
    let ctx = PrimeContext::new(13, 4)?;
    let p = ctx.p_scalar();
    let roots = degenerate_roots(&ctx, 0)?.ok_or_else(|| Error::Internal("X^2 + 1 does not split at 13".into()))?;
    let mut rng = rng_for(seed, 0xD);
    let mut failures = Vec::new();
    let mut seen = BTreeSet::new();
    let mut record = |d: &FilteredPhiModule, want: DegenerateBranch, label: String, seen: &mut BTreeSet<String>| -> Result<()> {
        match canonical_class(d)? {
            CanonicalClass::MuDegenerate { branch, .. } if branch == want => {
                seen.insert(format!("{branch:?}"));
            }
            other => failures.push(format!("{label}: expected {want:?}, got {other}")),
        }
        Ok(())
    };
    for (i, (root, branch)) in roots.iter().zip([DegenerateBranch::Line1, DegenerateBranch::Line2]).enumerate() {
        for _ in 0..10 {
            let params = sample_mu_degenerate(&mut rng, 0, &ctx, root);
            record(&build_family(&params, &ctx)?, branch, params.to_string(), &mut seen)?;
            let z = random_unit(&mut rng, 13);
            let y = random_integral(&mut rng, 13);
            let pt = ModuliPoint::new(-(root * &p * &z), y, z)?;
            record(&point_module(&pt, 0, &ctx)?, branch, format!("line {} point {pt}", i + 1), &mut seen)?;
        }
    }
    let origin = FamilyParams::Mu { eps: 0, a: Scalar::zero(), b: Scalar::zero() };
    record(&build_family(&origin, &ctx)?, DegenerateBranch::Origin, origin.to_string(), &mut seen)?;
    record(&point_module(&ModuliPoint::from_ints(0, 1, 0)?, 0, &ctx)?, DegenerateBranch::Origin, "[0:1:0]".into(), &mut seen)?;
    if seen.len() != 3 {
        failures.push(format!("branches seen: {seen:?}"));
    }
    Ok(failures)
}

/// (dimension, solvable) predicted for a family member by its parameters.
pub fn tabulated_group(params: &FamilyParams, p: &Scalar) -> Result<(usize, bool)> {
    Ok(match params {
        FamilyParams::Prod { .. } => (2, true),
        FamilyParams::Iso { .. } => (4, false),
        FamilyParams::Nu { eps, a_prime } => {
            if *eps == 0 && a_prime.is_zero() {
                (3, true)
            } else {
                (7, false)
            }
        }
        FamilyParams::Mu { eps, a, b } => {
            let c = mu_c(a, b, *eps, p)?;
            if c == -(Scalar::int(*eps as i64) * p) {
                if a.is_zero() && b.is_zero() {
                    (2, true)
                } else {
                    (4, true)
                }
            } else if c == Scalar::int(2) * p || c == Scalar::int(-2) * p {
                // isomorphic to an Iso module
                (4, false)
            } else {
                (7, false)
            }
        }
    })
}

fn monodromy_case(params: &FamilyParams, ctx: &PrimeContext) -> Result<Option<String>> {
    let p = ctx.p_scalar();
    if !validate_geometric_params(params, ctx)? {
        return Ok(Some("sampled parameters are not geometric".into()));
    }
    let report = family_monodromy(params, ctx, Execution::Sequential)?;
    let want = tabulated_group(params, &p)?;
    let got = (report.group.dim, report.group.solvable);
    if got != want {
        return Ok(Some(format!("group {} dim {} solvable {}, table gives dim {} solvable {}", report.group.kind, got.0, got.1, want.0, want.1)));
    }
    if matches!(params, FamilyParams::Mu { .. } | FamilyParams::Iso { .. }) && !structural_membership_check(params, &report.lie, &p) {
        return Ok(Some("Lie algebra differs from the block description".into()));
    }
    Ok(None)
}

/// Split contexts for the degenerate Mu samples of each ε.
fn degenerate_context(eps: i8) -> Result<PrimeContext> {
    if eps == 0 {
        PrimeContext::new(13, 4)
    } else {
        PrimeContext::new(7, 3)
    }
}

/// Group types of sampled family members against the tabulated groups.
pub fn monodromy_table(samples: usize, seed: u64, exec: Execution) -> CheckReport {
    let mut t = Tally::new("monodromy table", Some(300));
    let ctx = PrimeContext::rational(7).expect("valid prime");
    let mut jobs: Vec<(FamilyParams, PrimeContext)> = Vec::new();
    let mut rng = rng_for(seed, 0);
    for _ in 0..samples {
        jobs.push((sample_prod(&mut rng), ctx.clone()));
    }
    for eps in EPSILONS {
        for _ in 0..samples {
            jobs.push((sample_iso(&mut rng, eps), ctx.clone()));
            jobs.push((sample_nu(&mut rng, eps, 7), ctx.clone()));
            jobs.push((sample_mu(&mut rng, eps, 7), ctx.clone()));
        }
        let split = match degenerate_context(eps) {
            Ok(c) => c,
            Err(e) => {
                t.case(Err(e), || format!("split context for eps = {eps}"));
                continue;
            }
        };
        let roots = degenerate_roots(&split, eps).ok().flatten().expect("split context");
        jobs.push((FamilyParams::Mu { eps, a: Scalar::zero(), b: Scalar::zero() }, split.clone()));
        for k in 0..samples {
            jobs.push((sample_mu_degenerate(&mut rng, eps, &split, &roots[k % 2]), split.clone()));
        }
    }
    let outcomes = exec.map(&jobs, |(params, ctx)| monodromy_case(params, ctx));
    for ((params, ctx), outcome) in jobs.iter().zip(outcomes) {
        t.case(outcome, || format!("p = {}, {params}", ctx.p()));
    }
    t.finish()
}

/// Non-semisimplicity occurs exactly on the degenerate lines.
pub fn nonsemisimple_locus(samples: usize, seed: u64, exec: Execution) -> CheckReport {
    let mut t = Tally::new("non-semisimple locus", None);
    let ctx = match PrimeContext::new(7, 3) {
        Ok(c) => c,
        Err(e) => {
            t.case(Err(e), || "Q(zeta_3) at 7".into());
            return t.finish();
        }
    };
    let p = ctx.p_scalar();
    let line = FamilyParams::Mu { eps: 1, a: -(ctx.zeta() * &p), b: Scalar::one() };
    let outcome = build_family(&line, &ctx).and_then(|d| is_semisimple_module(&d, exec)).map(|s| fail_if(s, || "reported semisimple".into()));
    t.case(outcome, || line.to_string());
    let prod = FamilyParams::Prod { eps_prime: -1 };
    let outcome = build_family(&prod, &ctx).and_then(|d| is_semisimple_module(&d, exec)).map(|s| fail_if(!s, || "reported non-semisimple".into()));
    t.case(outcome, || prod.to_string());
    let mut rng = rng_for(seed, 5);
    let mut generic = Vec::new();
    while generic.len() < samples {
        let eps = EPSILONS[rng.gen_range(0..3)];
        let params = sample_mu(&mut rng, eps, 7);
        let FamilyParams::Mu { a, b, .. } = &params else { unreachable!() };
        if mu_c(a, b, eps, &p).is_ok_and(|c| c != -(Scalar::int(eps as i64) * &p)) {
            generic.push(params);
        }
    }
    let outcomes = exec.map(&generic, |params| {
        build_family(params, &ctx).and_then(|d| is_semisimple_module(&d, Execution::Sequential)).map(|s| fail_if(!s, || "reported non-semisimple".into()))
    });
    for (params, outcome) in generic.iter().zip(outcomes) {
        t.case(outcome, || params.to_string());
    }
    t.finish()
}

/// Type A exactly when v(c) ≤ 0, and the representing family matches the type.
pub fn wintenberger_distribution(height: i64, seed: u64, exec: Execution) -> CheckReport {
    let mut t = Tally::new("Wintenberger distribution", None);
    let ctx = PrimeContext::rational(7).expect("valid prime");
    let p = ctx.p_scalar();
    for eps in [0i8, 1] {
        let report = match scan(&ctx, &ScanConfig { eps, height, seed }, exec) {
            Ok(r) => r,
            Err(e) => {
                t.case(Err(e), || format!("scan eps = {eps}"));
                continue;
            }
        };
        for row in &report.rows {
            let outcome = (|| -> Result<Option<String>> {
                let v_le_0 = match c_of_point(&row.point, eps, &p) {
                    CInvariant::Infinity => true,
                    CInvariant::Finite(c) => ctx.valuation(&c)? <= Valuation::Finite(0),
                };
                if (row.wintenberger == WintenbergerType::A) != v_le_0 {
                    return Ok(Some(format!("type {} but v(c) <= 0 is {v_le_0}", row.wintenberger)));
                }
                let family_ok = match &row.representative.params {
                    FamilyParams::Nu { .. } => row.wintenberger == WintenbergerType::A,
                    FamilyParams::Mu { .. } | FamilyParams::Iso { .. } => row.wintenberger == WintenbergerType::B,
                    FamilyParams::Prod { .. } => false,
                };
                Ok(fail_if(!family_ok || !row.representative.geometric, || format!("type {} represented by {}", row.wintenberger, row.representative.params)))
            })();
            t.case(outcome, || format!("eps = {eps}, {}", row.point));
        }
    }
    t.finish()
}

/// Torus invariants of the Plücker ring, the determinant identity and the
/// agreement of the two definitions of c.
pub fn git_layer(seed: u64, exec: Execution) -> CheckReport {
    let mut t = Tally::new("GIT layer", Some(30));
    let ring = verify_invariant_ring(12, exec);
    t.expect(ring.passed(), || format!("invariant ring: {:?}", ring.violations));
    t.expect(ring.checked_weights == (1..=6).collect::<Vec<_>>(), || format!("checked weights {:?}", ring.checked_weights));
    let mut rng = rng_for(seed, 7);
    for k in 0..50 {
        let l = random_eigendata(&mut rng);
        let det = l.coefficient_matrix().det();
        let van = l.vandermonde();
        t.expect(det == van, || format!("determinant identity {k}: {det} vs {van}"));
    }
    let cross = crosscheck_c_definitions(100, seed, exec);
    t.cases += cross.trials;
    t.failures.extend(cross.mismatches);
    t.finish()
}

/// The valuation-grid equivalence, and construct→verify on sampled Mu parameters.
pub fn adapted_lattices(seed: u64, exec: Execution) -> CheckReport {
    let mut t = Tally::new("adapted lattices", Some(10));
    for p in [7u64, 13] {
        let ctx = PrimeContext::rational(p).expect("valid prime");
        for eps in EPSILONS {
            let grid = lattice_grid_check(eps, &ctx, exec);
            t.cases += grid.samples;
            t.failures.extend(grid.failures.into_iter().map(|f| format!("p = {p}, eps = {eps}: {f}")));
        }
        let mut rng = rng_for(seed, p);
        let ps = ctx.p_scalar();
        for k in 0..100 {
            let eps = EPSILONS[k % 3];
            let FamilyParams::Mu { a, b, .. } = sample_mu(&mut rng, eps, p) else { unreachable!() };
            let outcome = (|| -> Result<Option<String>> {
                let region = valuation_region(&a, &b, &ctx)?;
                if !region.admits_lattice() {
                    return Ok(Some(format!("sampler produced region {region:?}")));
                }
                let n = construct_lattice(&a, &b, &ctx)?;
                if !verify_lattice(&n, &a, &b, eps, &ctx)? {
                    return Ok(Some("lattice fails".into()));
                }
                if a.is_zero() {
                    return Ok(None);
                }
                // a + bc = −(c + εp + p²b²)/a
                let c = mu_c(&a, &b, eps, &ps)?;
                let lhs = &a + &(&b * &c);
                let rhs = -((&c + &(Scalar::int(eps as i64) * &ps) + &ps * &ps * &b * &b).checked_div(&a).unwrap());
                Ok(fail_if(lhs != rhs, || "identity a + bc fails".into()))
            })();
            t.case(outcome, || format!("p = {p}, Mu{{{eps}, {a}, {b}}}"));
        }
    }
    t.finish()
}

/// The group each exceptional c-value carries at ε = 0.
fn exceptional_group(c: &CInvariant, p: &Scalar) -> Option<GroupKind> {
    match c {
        CInvariant::Infinity => Some(GroupKind::Gm3),
        CInvariant::Finite(x) if x.is_zero() => Some(GroupKind::Gm2),
        CInvariant::Finite(x) if *x == Scalar::int(2) * p || *x == Scalar::int(-2) * p => Some(GroupKind::GL2),
        _ => None,
    }
}

/// Generic group on the height-bounded scan at ε = 0, exception table elsewhere.
pub fn distribution_scan(height: i64, seed: u64, exec: Execution) -> CheckReport {
    let mut t = Tally::new("distribution scan", Some(120));
    let ctx = PrimeContext::rational(7).expect("valid prime");
    let p = ctx.p_scalar();
    let report = match scan(&ctx, &ScanConfig { eps: 0, height, seed }, exec) {
        Ok(r) => r,
        Err(e) => {
            t.case(Err(e), || "scan".into());
            return t.finish();
        }
    };
    for row in &report.rows {
        let c = c_of_point(&row.point, 0, &p);
        let want = if is_exceptional_c(&c, 0, &p) { exceptional_group(&c, &p) } else { Some(GroupKind::GL2FiberDet) };
        let ok = want == Some(row.group.kind) && row.consistent;
        t.expect(ok, || format!("{} (c = {c}): group {}, expected {want:?}; issues {:?}", row.point, row.group.kind, row.issues));
    }
    t.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Weil,
    Classify,
    Monodromy,
    Git,
    Lattice,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "weil" => Suite::Weil,
            "classify" => Suite::Classify,
            "monodromy" => Suite::Monodromy,
            "git" => Suite::Git,
            "lattice" => Suite::Lattice,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

/// Sample sizes and seed of a run.
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub roundtrip_samples: usize,
    pub injectivity_pairs: usize,
    pub monodromy_samples: usize,
    pub semisimple_samples: usize,
    pub wintenberger_height: i64,
    pub distribution_height: i64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 2024,
            roundtrip_samples: 200,
            injectivity_pairs: 100,
            monodromy_samples: 100,
            semisimple_samples: 50,
            wintenberger_height: 5,
            distribution_height: 10,
        }
    }
}

/// Criterion number and check, in order.
pub type NumberedCheck = (u32, CheckReport);

fn run_one(n: u32, cfg: &VerifyConfig, exec: Execution) -> CheckReport {
    match n {
        1 => weil_enumeration(),
        2 => classification_roundtrip(cfg.roundtrip_samples, cfg.seed, exec),
        3 => c_injectivity(cfg.injectivity_pairs, cfg.seed, exec),
        4 => monodromy_table(cfg.monodromy_samples, cfg.seed, exec),
        5 => nonsemisimple_locus(cfg.semisimple_samples, cfg.seed, exec),
        6 => wintenberger_distribution(cfg.wintenberger_height, cfg.seed, exec),
        7 => git_layer(cfg.seed, exec),
        8 => adapted_lattices(cfg.seed, exec),
        9 => distribution_scan(cfg.distribution_height, cfg.seed, exec),
        _ => unreachable!("criteria are numbered 1 to 9"),
    }
}

pub fn suite_criteria(suite: Suite) -> &'static [u32] {
    match suite {
        Suite::Weil => &[1],
        Suite::Classify => &[2, 3, 6],
        Suite::Monodromy => &[4, 5, 9],
        Suite::Git => &[7],
        Suite::Lattice => &[8],
        Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9],
    }
}

/// Run the checks of a suite, calling `on_done` as each one finishes.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig, exec: Execution, mut on_done: impl FnMut(u32, &CheckReport)) -> Vec<NumberedCheck> {
    suite_criteria(suite)
        .iter()
        .map(|&n| {
            let r = run_one(n, cfg, exec);
            on_done(n, &r);
            (n, r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        let exec = Execution::default();
        let checks = [
            weil_enumeration(),
            classification_roundtrip(6, 1, exec),
            c_injectivity(6, 1, exec),
            nonsemisimple_locus(3, 1, exec),
            wintenberger_distribution(1, 1, exec),
            adapted_lattices(1, exec),
            distribution_scan(1, 1, exec),
        ];
        for r in checks {
            assert!(r.failures.is_empty(), "{}: {:?}", r.name, r.failures);
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn chart_classes_of_examples() {
        let ctx = PrimeContext::rational(7).unwrap();
        let mu = FamilyParams::Mu { eps: 0, a: Scalar::int(7), b: Scalar::zero() };
        assert_eq!(class_by_chart(&mu, &ctx).unwrap(), CanonicalClass::MuGeneric { eps: 0, c: Scalar::int(-49) });
        assert_eq!(tabulated_group(&mu, &ctx.p_scalar()).unwrap(), (7, false));
        assert!("bogus".parse::<Suite>().is_err());
    }
}
