//! The moduli plane inside the Grassmannian of planes in K⁴: the chart
//! maps, Plücker coordinates, the trace definition of c, its torus-quotient
//! formula in an eigenbasis, and the invariant-ring check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{CInvariant, ModuliPoint};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{rank, Matrix, SubspaceBasis, Vector};
use crate::scalar::Scalar;

/// Index pairs of the Plücker coordinates, in storage order.
pub const PLUCKER_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Plücker coordinates (x₁₂, x₁₃, x₁₄, x₂₃, x₂₄, x₃₄) of a plane.
#[derive(Clone, Debug)]
pub struct PluckerPoint(pub [Scalar; 6]);

impl PluckerPoint {
    pub fn from_vectors(u: &[Scalar], v: &[Scalar]) -> Result<Self> {
        let coords = PLUCKER_PAIRS.map(|(i, j)| &u[i] * &v[j] - &u[j] * &v[i]);
        if coords.iter().all(Scalar::is_zero) {
            return Err(Error::PreconditionFailed("vectors do not span a plane".into()));
        }
        Ok(PluckerPoint(coords))
    }

    pub fn from_plane(plane: &SubspaceBasis) -> Result<Self> {
        if plane.dim() != 2 || plane.ambient() != 4 {
            return Err(Error::DimensionMismatch(format!("expected a plane in K^4, got dim {}", plane.dim())));
        }
        Self::from_vectors(&plane.vectors()[0], &plane.vectors()[1])
    }

    /// x_ij for 1 ≤ i < j ≤ 4.
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        let k = PLUCKER_PAIRS.iter().position(|&pr| pr == (i - 1, j - 1)).expect("index pair with i < j");
        &self.0[k]
    }

    /// x₁₂x₃₄ − x₁₃x₂₄ + x₁₄x₂₃.
    pub fn relation(&self) -> Scalar {
        self.get(1, 2) * self.get(3, 4) - self.get(1, 3) * self.get(2, 4) + self.get(1, 4) * self.get(2, 3)
    }

    /// Projective equality.
    pub fn same_point(&self, other: &PluckerPoint) -> bool {
        (0..6).all(|i| (0..6).all(|j| &self.0[i] * &other.0[j] == &self.0[j] * &other.0[i]))
    }
}

fn unit(i: usize) -> Vector {
    (0..4).map(|k| Scalar::int((k == i) as i64)).collect()
}

/// The plane span(e₁, (0, t₁, t₂, t₃)) and its Plücker coordinates.
pub fn iota(pt: &ModuliPoint) -> (SubspaceBasis, PluckerPoint) {
    let [t1, t2, t3] = pt.coords().clone();
    let v = vec![Scalar::zero(), t1, t2, t3];
    let e1 = unit(0);
    let plucker = PluckerPoint::from_vectors(&e1, &v).expect("point is nonzero");
    (SubspaceBasis::span(4, &[e1, v]), plucker)
}

/// The Frobenius of the moduli-plane model: companion matrix of X⁴ + εpX² + p².
pub fn companion_phi(eps: i8, p: &Scalar) -> Matrix {
    let z = Scalar::zero;
    let o = Scalar::one;
    Matrix::from_rows(vec![
        vec![z(), z(), z(), -(p * p)],
        vec![o(), z(), z(), z()],
        vec![z(), o(), z(), -(Scalar::int(eps as i64) * p)],
        vec![z(), z(), o(), z()],
    ])
}

/// Trace of φ² followed by the projection onto the plane along its image;
/// infinite when the plane and its image do not span K⁴.
pub fn c_intrinsic(phi: &Matrix, plane: &SubspaceBasis) -> CInvariant {
    let v = plane.vectors();
    let cols = vec![v[0].clone(), v[1].clone(), phi.apply(&v[0]), phi.apply(&v[1])];
    let Some(binv) = Matrix::from_cols(&cols).inverse() else {
        return CInvariant::Infinity;
    };
    let phi2 = phi.mul(phi);
    let t: Scalar = (0..2).map(|i| binv.apply(&phi2.apply(&v[i]))[i].clone()).sum();
    CInvariant::Finite(t)
}

/// Pairwise distinct nonzero eigenvalues of a diagonal Frobenius.
#[derive(Clone, Debug)]
pub struct EigenData(pub [Scalar; 4]);

impl EigenData {
    pub fn new(l: [Scalar; 4]) -> Result<Self> {
        let distinct = (0..4).all(|i| (i + 1..4).all(|j| l[i] != l[j]));
        if !distinct || l.iter().any(Scalar::is_zero) {
            return Err(Error::PreconditionFailed("eigenvalues must be distinct and nonzero".into()));
        }
        Ok(EigenData(l))
    }

    pub fn phi(&self) -> Matrix {
        Matrix::diag(&self.0)
    }

    /// Coefficients [[A₁, −B₁], [−A₂, B₂]] of (s₁, s₂) in (x₁₄x₂₃, x₁₃x₂₄).
    pub fn coefficient_matrix(&self) -> Matrix {
        let [l1, l2, l3, l4] = &self.0;
        let a2 = (l1 - l3) * (l2 - l4);
        let b2 = (l1 - l4) * (l2 - l3);
        let a1 = (l1 * l3 + l2 * l4) * &a2;
        let b1 = (l1 * l4 + l2 * l3) * &b2;
        Matrix::from_rows(vec![vec![a1, -b1], vec![-a2, b2]])
    }

    /// ∏_{i<j} (λᵢ − λⱼ).
    pub fn vandermonde(&self) -> Scalar {
        let l = &self.0;
        let mut out = Scalar::one();
        for i in 0..4 {
            for j in i + 1..4 {
                out = out * (&l[i] - &l[j]);
            }
        }
        out
    }
}

/// The two invariant sections [s₁ : s₂] whose ratio is c̄.
pub fn plucker_c(lambda: &EigenData, x: &PluckerPoint) -> Result<[Scalar; 2]> {
    let m = lambda.coefficient_matrix();
    let u = x.get(1, 4) * x.get(2, 3);
    let w = x.get(1, 3) * x.get(2, 4);
    let s1 = m.get(0, 0) * &u + m.get(0, 1) * &w;
    let s2 = m.get(1, 0) * &u + m.get(1, 1) * &w;
    if s1.is_zero() && s2.is_zero() {
        return Err(Error::NotSemistable);
    }
    Ok([s1, s2])
}

/// Not both x₁₂x₃₄ and x₁₃x₂₄ vanish.
pub fn is_semistable(x: &PluckerPoint) -> bool {
    !((x.get(1, 2) * x.get(3, 4)).is_zero() && (x.get(1, 3) * x.get(2, 4)).is_zero())
}

/// Exponent vector (d₁₂, d₁₃, d₁₄, d₂₃, d₂₄, d₃₄) of a Plücker monomial.
pub type Exponents = [u32; 6];

/// Φₖ: total exponent of the variables x_ij with k ∈ {i, j}.
pub fn incidence_weights(d: &Exponents) -> [u32; 4] {
    let mut w = [0u32; 4];
    for (k, &(i, j)) in PLUCKER_PAIRS.iter().enumerate() {
        w[i] += d[k];
        w[j] += d[k];
    }
    w
}

pub fn is_weight_trivial(d: &Exponents) -> bool {
    let w = incidence_weights(d);
    w.iter().all(|&x| x == w[0])
}

/// d₁₂d₃₄ = d₁₃d₂₄ = d₁₄d₂₃ = 0: the exponents of the free basis over the
/// candidate invariant subalgebra.
pub fn in_free_basis_set(d: &Exponents) -> bool {
    d[0] * d[5] == 0 && d[1] * d[4] == 0 && d[2] * d[3] == 0
}

/// All exponent vectors of total degree `deg`, lexicographic.
pub fn monomials_of_degree(deg: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    let mut cur = [0u32; 6];
    fn rec(pos: usize, left: u32, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if pos == 5 {
            cur[5] = left;
            out.push(*cur);
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e;
            rec(pos + 1, left - e, cur, out);
        }
    }
    rec(0, deg, &mut cur, &mut out);
    out
}

pub fn monomial_name(d: &Exponents) -> String {
    let names = ["x12", "x13", "x14", "x23", "x24", "x34"];
    let parts: Vec<String> = d
        .iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(e, n)| if *e == 1 { n.to_string() } else { format!("{n}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeRecord {
    pub degree: u32,
    pub invariant_monomials: Vec<String>,
    pub dimension_mod_relation: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantRingReport {
    pub degrees: Vec<DegreeRecord>,
    /// n for which D ∩ Eₙ was checked empty.
    pub checked_weights: Vec<u32>,
    pub violations: Vec<String>,
}

impl InvariantRingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Invariants of degree 2n modulo the relation: monomials uⁱvʲwᵏ in
/// u = x₁₂x₃₄, v = x₁₃x₂₄, w = x₁₄x₂₃ (i + j + k = n) modulo the multiples
/// of u − v + w. Returns (dimension of the quotient, whether the uⁱwᵏ span it).
fn invariant_quotient(n: u32) -> (usize, bool) {
    let idx = |i: u32, j: u32| -> usize {
        // position of (i, j, n − i − j) in the triangle enumeration
        let mut pos = 0usize;
        for a in 0..i {
            pos += (n - a + 1) as usize;
        }
        pos + j as usize
    };
    let size = ((n + 1) * (n + 2) / 2) as usize;
    let vec_of = |terms: &[((u32, u32), i64)]| -> Vector {
        let mut v = vec![Scalar::zero(); size];
        for &((i, j), c) in terms {
            v[idx(i, j)] = &v[idx(i, j)] + &Scalar::int(c);
        }
        v
    };
    let mut relation_multiples = Vec::new();
    if n >= 1 {
        for i in 0..n {
            for j in 0..n - i {
                relation_multiples.push(vec_of(&[((i + 1, j), 1), ((i, j + 1), -1), ((i, j), 1)]));
            }
        }
    }
    let rel_rank = rank(size, &relation_multiples);
    let mut all = relation_multiples.clone();
    for i in 0..=n {
        all.push(vec_of(&[((i, 0), 1)]));
    }
    let spans = rank(size, &all) == size;
    (size - rel_rank, spans)
}

/// Enumerate Plücker monomials up to `max_degree` and check the description
/// of the torus-invariant subalgebra.
pub fn verify_invariant_ring(max_degree: u32, exec: Execution) -> InvariantRingReport {
    let degrees: Vec<u32> = (1..=max_degree).collect();
    let per_degree = exec.map(&degrees, |&deg| {
        let mut violations = Vec::new();
        let mons = monomials_of_degree(deg);
        let inv: Vec<&Exponents> = mons.iter().filter(|d| is_weight_trivial(d)).collect();
        for d in &inv {
            if !(d[0] == d[5] && d[1] == d[4] && d[2] == d[3]) {
                violations.push(format!("degree {deg}: {} is invariant but not a product of matchings", monomial_name(d)));
            }
            if deg > 0 && in_free_basis_set(d) {
                violations.push(format!("degree {deg}: {} lies in D and in E_{}", monomial_name(d), deg / 2));
            }
        }
        let dimension = if deg % 2 == 0 {
            let n = deg / 2;
            let (dim, spans) = invariant_quotient(n);
            if dim != (n + 1) as usize {
                violations.push(format!("degree {deg}: quotient dimension {dim}, expected {}", n + 1));
            }
            if !spans {
                violations.push(format!("degree {deg}: u^i w^j do not span the quotient"));
            }
            dim
        } else {
            if !inv.is_empty() {
                violations.push(format!("odd degree {deg} has invariant monomials"));
            }
            0
        };
        let rec = DegreeRecord { degree: deg, invariant_monomials: inv.iter().map(|d| monomial_name(d)).collect(), dimension_mod_relation: dimension };
        (rec, violations)
    });
    let mut report = InvariantRingReport { degrees: Vec::new(), checked_weights: Vec::new(), violations: Vec::new() };
    for (rec, v) in per_degree {
        report.degrees.push(rec);
        report.violations.extend(v);
    }
    report.checked_weights = (1..=max_degree / 2).collect();
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckReport {
    pub trials: usize,
    pub infinite_cases: usize,
    pub mismatches: Vec<String>,
}

/// Random distinct nonzero rationals.
pub fn random_eigendata(rng: &mut ChaCha8Rng) -> EigenData {
    loop {
        let l: [Scalar; 4] = std::array::from_fn(|_| Scalar::frac(rng.gen_range(-30..=30), rng.gen_range(1..=4)));
        if let Ok(e) = EigenData::new(l) {
            return e;
        }
    }
}

fn random_semistable_plane(rng: &mut ChaCha8Rng) -> (SubspaceBasis, PluckerPoint) {
    loop {
        let u: Vector = (0..4).map(|_| Scalar::int(rng.gen_range(-5..=5))).collect();
        let v: Vector = (0..4).map(|_| Scalar::int(rng.gen_range(-5..=5))).collect();
        let plane = SubspaceBasis::span(4, &[u, v]);
        if plane.dim() != 2 {
            continue;
        }
        let x = PluckerPoint::from_plane(&plane).unwrap();
        if is_semistable(&x) {
            return (plane, x);
        }
    }
}

/// Compare the trace definition of c on a diagonal Frobenius with the
/// ratio of invariant sections, on random semistable planes.
pub fn crosscheck_c_definitions(trials: usize, seed: u64, exec: Execution) -> CrosscheckReport {
    let results = exec.map_range(trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let lambda = random_eigendata(&mut rng);
        let (plane, x) = random_semistable_plane(&mut rng);
        let trace = c_intrinsic(&lambda.phi(), &plane);
        let sections = plucker_c(&lambda, &x);
        let ok = match (&trace, &sections) {
            (CInvariant::Finite(c), Ok([s1, s2])) => &(c * s2) == s1,
            (CInvariant::Infinity, Ok([_, s2])) => s2.is_zero(),
            (_, Err(_)) => false,
        };
        let infinite = trace == CInvariant::Infinity;
        let msg = (!ok).then(|| format!("trial {t}: lambda {:?}, plane {:?}: trace {trace}, sections {sections:?}", lambda.0, plane.vectors()));
        (infinite, msg)
    });
    CrosscheckReport {
        trials,
        infinite_cases: results.iter().filter(|r| r.0).count(),
        mismatches: results.into_iter().filter_map(|r| r.1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{c_of_point, mu_point, nu_point};

    fn span(u: &[i64], v: &[i64]) -> SubspaceBasis {
        SubspaceBasis::span(4, &[u.iter().map(|&x| Scalar::int(x)).collect(), v.iter().map(|&x| Scalar::int(x)).collect()])
    }

    #[test]
    fn iota_examples() {
        let (_, x) = iota(&ModuliPoint::from_ints(1, 0, 0).unwrap());
        assert_eq!(x.0, [1, 0, 0, 0, 0, 0].map(Scalar::int));
        let (_, x) = iota(&ModuliPoint::from_ints(0, 1, 0).unwrap());
        assert_eq!(x.0, [0, 1, 0, 0, 0, 0].map(Scalar::int));
        let (_, x) = iota(&ModuliPoint::from_ints(5, 0, 1).unwrap());
        assert!(x.same_point(&PluckerPoint([5, 0, 1, 0, 0, 0].map(Scalar::int))));
        assert!(x.relation().is_zero());
    }

    #[test]
    fn chart_maps() {
        let p = Scalar::int(7);
        assert_eq!(nu_point(&Scalar::int(49)), ModuliPoint::from_ints(49, 0, 1).unwrap());
        assert_eq!(mu_point(&Scalar::zero(), &Scalar::zero(), 0, &p).unwrap(), ModuliPoint::from_ints(0, 1, 0).unwrap());
        assert_eq!(mu_point(&Scalar::int(7), &Scalar::zero(), 0, &p).unwrap(), ModuliPoint::from_ints(-7, 1, 0).unwrap());
        assert!(matches!(mu_point(&Scalar::one(), &Scalar::int(-1), 0, &p), Err(Error::DegenerateDenominator(_))));
    }

    #[test]
    fn trace_matches_point_formula() {
        let p = Scalar::int(7);
        for eps in [-1i8, 0, 1] {
            let phi = companion_phi(eps, &p);
            for (x, y, z) in [(30, 0, 1), (1, 2, 3), (0, 1, 0), (-4, 1, 2), (5, 3, 0)] {
                let pt = ModuliPoint::from_ints(x, y, z).unwrap();
                assert_eq!(c_intrinsic(&phi, &iota(&pt).0), c_of_point(&pt, eps, &p), "eps {eps} point {pt}");
            }
        }
    }

    #[test]
    fn sections_examples() {
        let l = EigenData::new([1, 2, 3, 4].map(Scalar::int)).unwrap();
        assert_eq!(l.coefficient_matrix().det(), l.vandermonde());
        let plane = span(&[1, 0, 1, 0], &[0, 1, 0, 1]);
        let x = PluckerPoint::from_plane(&plane).unwrap();
        assert!(x.same_point(&PluckerPoint([1, 0, 1, -1, 0, 1].map(Scalar::int))));
        assert!(is_semistable(&x));
        let [s1, s2] = plucker_c(&l, &x).unwrap();
        assert_eq!(c_intrinsic(&l.phi(), &plane), CInvariant::Finite(s1.checked_div(&s2).unwrap()));
        let e12 = PluckerPoint([1, 0, 0, 0, 0, 0].map(Scalar::int));
        assert_eq!(plucker_c(&l, &e12), Err(Error::NotSemistable));
        assert!(!is_semistable(&e12));
        assert!(!is_semistable(&PluckerPoint([0, 1, 0, 0, 0, 0].map(Scalar::int))));
        assert_eq!(c_intrinsic(&l.phi(), &span(&[1, 0, 0, 0], &[0, 1, 0, 0])), CInvariant::Infinity);
    }

    #[test]
    fn invariant_ring_small() {
        let r = verify_invariant_ring(6, Execution::Sequential);
        assert!(r.passed(), "{:?}", r.violations);
        assert!(r.degrees[0].invariant_monomials.is_empty());
        assert_eq!(r.degrees[1].invariant_monomials, vec!["x12*x34", "x13*x24", "x14*x23"]);
        assert_eq!(r.degrees[1].dimension_mod_relation, 2);
        assert!(monomials_of_degree(1).iter().all(|d| !in_free_basis_set(d) || !is_weight_trivial(d)));
    }

    #[test]
    fn crosscheck_runs_clean() {
        let r = crosscheck_c_definitions(40, 11, Execution::Sequential);
        assert!(r.mismatches.is_empty(), "{:?}", r.mismatches);
    }
}
