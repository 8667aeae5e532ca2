//! Supersingular p-Weil polynomials of degree 4.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{is_prime, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum WeilLabel {
    /// (X² − p)²
    ProdPlus,
    /// (X² + p)²
    ProdMinus,
    /// X⁴ + εpX² + p²
    Eps(i8),
}

impl WeilLabel {
    pub const ALL: [WeilLabel; 5] =
        [WeilLabel::ProdPlus, WeilLabel::ProdMinus, WeilLabel::Eps(-1), WeilLabel::Eps(0), WeilLabel::Eps(1)];

    /// ε′ with χ = (X² − ε′p)², for the product labels.
    pub fn eps_prime(self) -> Option<i8> {
        match self {
            WeilLabel::ProdPlus => Some(1),
            WeilLabel::ProdMinus => Some(-1),
            WeilLabel::Eps(_) => None,
        }
    }

    pub fn eps(self) -> Option<i8> {
        match self {
            WeilLabel::Eps(e) => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for WeilLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeilLabel::ProdPlus => write!(f, "ProdPlus"),
            WeilLabel::ProdMinus => write!(f, "ProdMinus"),
            WeilLabel::Eps(e) => write!(f, "Eps({e:+})"),
        }
    }
}

/// Integer polynomial, constant term first.
pub type IntPoly = Vec<BigInt>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilPolynomial {
    pub p: u64,
    pub label: WeilLabel,
    pub coefficients: IntPoly,
}

impl WeilPolynomial {
    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coefficients.iter().map(|c| Scalar::big_int(c.clone())).collect())
    }
}

impl fmt::Display for WeilPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn trim(mut f: IntPoly) -> IntPoly {
    while f.last().is_some_and(Zero::is_zero) {
        f.pop();
    }
    f
}

fn ip_mul(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn ip_sub(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let n = a.len().max(b.len());
    let get = |f: &[BigInt], k: usize| f.get(k).cloned().unwrap_or_default();
    trim((0..n).map(|k| get(a, k) - get(b, k)).collect())
}

/// Division by a monic divisor.
fn ip_divrem_monic(a: &[BigInt], b: &[BigInt]) -> (IntPoly, IntPoly) {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut rem = trim(a.to_vec());
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigInt::zero(); rem.len() - db];
    while rem.len() > db {
        let k = rem.len() - 1 - db;
        let q = rem.last().unwrap().clone();
        for (j, c) in b.iter().enumerate() {
            rem[k + j] -= &q * c;
        }
        quot[k] = q;
        rem = trim(rem);
    }
    (trim(quot), rem)
}

/// f(X) ↦ f(−X).
fn ip_negate_var(f: &[BigInt]) -> IntPoly {
    f.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() }).collect()
}

/// G(Y) ↦ G(X²).
fn ip_in_square(g: &[BigInt]) -> IntPoly {
    let mut out = vec![BigInt::zero(); 2 * g.len().saturating_sub(1) + 1];
    for (k, c) in g.iter().enumerate() {
        out[2 * k] = c.clone();
    }
    trim(out)
}

pub fn totient(n: u32) -> u32 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u32
}

/// Φ_m with integer coefficients, constant term first.
pub fn cyclotomic_polynomial(m: u32) -> IntPoly {
    let mut f: IntPoly = vec![BigInt::zero(); m as usize + 1];
    f[0] = big(-1);
    f[m as usize] = big(1);
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        f = ip_divrem_monic(&f, &cyclotomic_polynomial(d)).0;
    }
    f
}

/// The polynomial of the given label at the prime p.
pub fn weil_polynomial(label: WeilLabel, p: u64) -> IntPoly {
    let p = big(p as i64);
    let p2 = &p * &p;
    match label {
        WeilLabel::ProdPlus => vec![p2.clone(), big(0), -&p * 2, big(0), big(1)],
        WeilLabel::ProdMinus => vec![p2.clone(), big(0), &p * 2, big(0), big(1)],
        WeilLabel::Eps(e) => vec![p2, big(0), &p * big(i64::from(e)), big(0), big(1)],
    }
}

pub fn enumerate_ss_weil_deg4(p: u64) -> Result<Vec<WeilPolynomial>> {
    if p < 7 {
        return Err(Error::PrimeTooSmall(p));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(WeilLabel::ALL
        .iter()
        .map(|&label| WeilPolynomial { p, label, coefficients: weil_polynomial(label, p) })
        .collect())
}

/// The label of a monic quartic, if it is one of the five forms.
pub fn label_of(f: &[BigInt], p: u64) -> Option<WeilLabel> {
    WeilLabel::ALL.into_iter().find(|&l| trim(f.to_vec()) == weil_polynomial(l, p))
}

/// Multiplicity of (X² − p) as a factor of f.
fn multiplicity_at_x2_minus_p(f: &[BigInt], p: &BigInt) -> usize {
    let fac = vec![-p.clone(), big(0), big(1)];
    let mut cur = trim(f.to_vec());
    let mut k = 0;
    while !cur.is_empty() {
        let (q, r) = ip_divrem_monic(&cur, &fac);
        if !r.is_empty() {
            break;
        }
        cur = q;
        k += 1;
    }
    k
}

/// Supersingularity test: the polynomial g(Y) whose roots are α²/p must be
/// a product of cyclotomic polynomials Φ_m with m ≤ 30, and X² − p must
/// divide f to an even power.
pub fn is_ss_weil(f: &[BigInt], p: u64) -> bool {
    let f = trim(f.to_vec());
    if f.len() != 5 || !f[4].is_one() {
        return false;
    }
    let pb = big(p as i64);
    // f(X) = E(X²) + X·O(X²); the roots of E(Y)² − Y·O(Y)² are the α².
    let e = vec![f[0].clone(), f[2].clone(), f[4].clone()];
    let o = vec![f[1].clone(), f[3].clone()];
    let y_o2 = {
        let mut t = vec![big(0)];
        t.extend(ip_mul(&o, &o));
        t
    };
    let h = ip_sub(&ip_mul(&e, &e), &y_o2);
    if h.len() != 5 {
        return false;
    }
    // g(Y) = h(pY)/p⁴
    let p4 = num_traits::pow(pb.clone(), 4);
    let mut g = Vec::with_capacity(5);
    for (k, c) in h.iter().enumerate() {
        let num = c * num_traits::pow(pb.clone(), k);
        let (q, r) = num.div_rem(&p4);
        if !r.is_zero() {
            return false;
        }
        g.push(q);
    }
    for m in 1..=30u32 {
        let phi = cyclotomic_polynomial(m);
        loop {
            if g.len() < phi.len() {
                break;
            }
            let (q, r) = ip_divrem_monic(&g, &phi);
            if !r.is_empty() {
                break;
            }
            g = q;
        }
    }
    g == vec![big(1)] && multiplicity_at_x2_minus_p(&f, &pb).is_multiple_of(2)
}

/// A root written symbolically as sign · ζ_m^power · √p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolicRoot {
    pub sign: i8,
    pub power: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootOrbit {
    pub m: u32,
    pub roots: Vec<SymbolicRoot>,
    /// Power to which the orbit's minimal polynomial occurs in the label.
    pub multiplicity: u32,
}

impl fmt::Display for RootOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .roots
            .iter()
            .map(|r| {
                let s = if r.sign < 0 { "-" } else { "+" };
                match (self.m, r.power) {
                    (_, 0) => format!("{s}√p"),
                    (m, k) => format!("{s}ζ{m}^{k}√p"),
                }
            })
            .collect();
        write!(f, "m={} {{{}}}", self.m, parts.join(", "))
    }
}

pub fn conjugacy_orbit(label: WeilLabel) -> RootOrbit {
    let (m, powers, multiplicity): (u32, &[u32], u32) = match label {
        WeilLabel::ProdPlus => (1, &[0], 2),
        WeilLabel::ProdMinus => (4, &[1], 2),
        WeilLabel::Eps(1) => (3, &[1, 2], 1),
        WeilLabel::Eps(0) => (8, &[1, 7], 1),
        WeilLabel::Eps(-1) => (12, &[1, 11], 1),
        WeilLabel::Eps(e) => panic!("no Weil label with ε = {e}"),
    };
    let roots = powers
        .iter()
        .flat_map(|&k| [SymbolicRoot { sign: 1, power: k }, SymbolicRoot { sign: -1, power: k }])
        .collect();
    RootOrbit { m, roots, multiplicity }
}

/// Elements of Q[ζ]/Φ_m, coefficient vectors of length φ(m).
struct CycloRing {
    modulus: IntPoly,
}

impl CycloRing {
    fn new(m: u32) -> Self {
        CycloRing { modulus: cyclotomic_polynomial(m) }
    }

    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn reduce(&self, mut v: Vec<BigRational>) -> Vec<BigRational> {
        let d = self.degree();
        while v.len() > d {
            let lead = v.pop().unwrap();
            let k = v.len() - d;
            for (j, c) in self.modulus.iter().take(d).enumerate() {
                v[k + j] -= &lead * BigRational::from_integer(c.clone());
            }
        }
        v.resize(d, BigRational::zero());
        v
    }

    fn mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); a.len() + b.len()];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        self.reduce(out)
    }

    fn add(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn zeta_power(&self, k: u32) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); k as usize + 1];
        v[k as usize] = BigRational::one();
        self.reduce(v)
    }

    fn constant(&self, c: BigRational) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.degree()];
        v[0] = c;
        v
    }
}

/// ∏ (X − root) over the orbit, expanded in Q(ζ_m)[X] and checked rational.
/// Roots come in ± pairs so √p only enters through (√p)² = p.
pub fn orbit_polynomial(orbit: &RootOrbit, p: u64) -> Option<IntPoly> {
    let ring = CycloRing::new(orbit.m);
    let mut powers: Vec<u32> = orbit.roots.iter().map(|r| r.power).collect();
    powers.sort_unstable();
    powers.dedup();
    for &k in &powers {
        let has = |s: i8| orbit.roots.contains(&SymbolicRoot { sign: s, power: k });
        if !(has(1) && has(-1)) {
            return None;
        }
    }
    let pq = BigRational::from_integer(big(p as i64));
    // polynomial in X with ring coefficients, constant term first
    let mut acc: Vec<Vec<BigRational>> = vec![ring.constant(BigRational::one())];
    for &k in &powers {
        // X² − p·ζ^{2k}
        let c0: Vec<BigRational> =
            ring.zeta_power(2 * k % orbit.m.max(1)).into_iter().map(|x| -x * &pq).collect();
        let factor = [c0, ring.constant(BigRational::zero()), ring.constant(BigRational::one())];
        let mut next = vec![ring.constant(BigRational::zero()); acc.len() + 2];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in factor.iter().enumerate() {
                next[i + j] = ring.add(&next[i + j], &ring.mul(a, b));
            }
        }
        acc = next;
    }
    let mut out = Vec::new();
    for c in acc {
        if c.iter().skip(1).any(|x| !x.is_zero()) || !c[0].is_integer() {
            return None;
        }
        out.push(c[0].to_integer());
    }
    Some(trim(out))
}

fn isqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Writes R(X) = G(X²) as H(X)·(−1)^d·H(−X) with H monic integer of degree
/// d = deg G, when possible. Only d ∈ {1, 2, 4} is needed: other totients
/// give Galois orbits of degree > 4.
fn split_even(g: &[BigInt], p: u64) -> Option<IntPoly> {
    let d = g.len() - 1;
    let r = ip_in_square(g);
    let check = |h: IntPoly| -> Option<IntPoly> {
        let mut conj = ip_negate_var(&h);
        if d % 2 == 1 {
            conj = conj.into_iter().map(|c| -c).collect();
        }
        (ip_mul(&h, &conj) == r).then_some(h)
    };
    match d {
        1 => {
            let h0 = isqrt_exact(&-g[0].clone())?;
            check(vec![h0, big(1)])
        }
        2 => {
            for e0 in [isqrt_exact(&g[0])?, -isqrt_exact(&g[0])?] {
                if let Some(o0) = isqrt_exact(&(&e0 * 2 - &g[1])) {
                    if let Some(h) = check(vec![e0.clone(), o0, big(1)]) {
                        return Some(h);
                    }
                }
            }
            None
        }
        4 => {
            // H = X⁴ + o1X³ + e1X² + o0X + e0, |o1| ≤ 4√p.
            let bound: BigInt = BigInt::from(16 * p).sqrt() + 1;
            let root0 = isqrt_exact(&g[0])?;
            let mut o1 = -bound.clone();
            while o1 <= bound {
                let t: BigInt = &g[3] + &o1 * &o1;
                if t.is_even() {
                    let e1: BigInt = t / 2;
                    for e0 in [root0.clone(), -root0.clone()] {
                        let mut cands = Vec::new();
                        if o1.is_zero() {
                            if &e1 * &e1 + &e0 * 2 == g[2] {
                                if let Some(o0) = isqrt_exact(&(&e1 * &e0 * 2 - &g[1])) {
                                    cands.push(o0.clone());
                                    cands.push(-o0);
                                }
                            }
                        } else {
                            let num: BigInt = &e1 * &e1 + &e0 * 2 - &g[2];
                            let den: BigInt = &o1 * 2;
                            if (&num % &den).is_zero() {
                                cands.push(num / den);
                            }
                        }
                        for o0 in cands {
                            if let Some(h) = check(vec![e0.clone(), o0, e1.clone(), o1.clone(), big(1)]) {
                                return Some(h);
                            }
                        }
                    }
                }
                o1 += 1;
            }
            None
        }
        _ => None,
    }
}

/// Rational Galois orbits of the numbers ζ·√p (ζ a root of unity of order
/// n, φ(n) ≤ 8) whose minimal polynomial has degree ≤ 4.
pub fn small_galois_orbits(p: u64) -> Vec<IntPoly> {
    let pb = big(p as i64);
    let mut orbits: Vec<IntPoly> = Vec::new();
    for n in (1..=30u32).filter(|&n| totient(n) <= 8) {
        let phi = cyclotomic_polynomial(n);
        let d = phi.len() - 1;
        // G(Y) = p^d Φ_n(Y/p) has roots p·ω, ω primitive of order n.
        let g: IntPoly = phi.iter().enumerate().map(|(k, c)| c * num_traits::pow(pb.clone(), d - k)).collect();
        let pieces = match split_even(&g, p) {
            Some(h) => {
                let mut conj = ip_negate_var(&h);
                if d % 2 == 1 {
                    conj = conj.into_iter().map(|c| -c).collect();
                }
                vec![h, conj]
            }
            None => vec![ip_in_square(&g)],
        };
        for piece in pieces {
            if piece.len() - 1 <= 4 && !orbits.contains(&piece) {
                orbits.push(piece);
            }
        }
    }
    orbits.sort();
    orbits
}

/// Brute-force oracle: all degree-4 products of small Galois orbits that
/// satisfy the even-multiplicity condition at X² − p.
pub fn galois_orbit_products(p: u64) -> Vec<IntPoly> {
    let orbits = small_galois_orbits(p);
    let pb = big(p as i64);
    let mut out: Vec<IntPoly> = Vec::new();
    fn go(orbits: &[IntPoly], start: usize, acc: IntPoly, deg: usize, out: &mut Vec<IntPoly>, pb: &BigInt) {
        if deg == 4 {
            if multiplicity_at_x2_minus_p(&acc, pb).is_multiple_of(2) && !out.contains(&acc) {
                out.push(acc);
            }
            return;
        }
        for i in start..orbits.len() {
            let d = orbits[i].len() - 1;
            if deg + d <= 4 {
                go(orbits, i, ip_mul(&acc, &orbits[i]), deg + d, out, pb);
            }
        }
    }
    go(&orbits, 0, vec![big(1)], 0, &mut out, &pb);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> IntPoly {
        xs.iter().map(|&x| big(x)).collect()
    }

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(8), ints(&[1, 0, 0, 0, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        assert_eq!(totient(30), 8);
    }

    #[test]
    fn enumeration_examples() {
        let list = enumerate_ss_weil_deg4(7).unwrap();
        let mut got: Vec<IntPoly> = list.iter().map(|w| w.coefficients.clone()).collect();
        got.sort();
        let mut want = vec![
            ints(&[49, 0, -14, 0, 1]),
            ints(&[49, 0, 14, 0, 1]),
            ints(&[49, 0, -7, 0, 1]),
            ints(&[49, 0, 0, 0, 1]),
            ints(&[49, 0, 7, 0, 1]),
        ];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(enumerate_ss_weil_deg4(11).unwrap().len(), 5);
        assert_eq!(enumerate_ss_weil_deg4(5), Err(Error::PrimeTooSmall(5)));
    }

    #[test]
    fn supersingularity_examples() {
        assert!(is_ss_weil(&ints(&[49, 0, 7, 0, 1]), 7));
        assert!(!is_ss_weil(&ints(&[49, 0, 21, 0, 1]), 7));
        assert!(is_ss_weil(&ints(&[49, 0, -14, 0, 1]), 7));
        // (X² − 7)(X² + 7): odd power of X² − 7
        assert!(!is_ss_weil(&ints(&[-49, 0, 0, 0, 1]), 7));
    }

    #[test]
    fn orbits_reproduce_labels() {
        for p in [7u64, 11, 13] {
            for label in WeilLabel::ALL {
                let orbit = conjugacy_orbit(label);
                let base = orbit_polynomial(&orbit, p).unwrap();
                let mut f = ints(&[1]);
                for _ in 0..orbit.multiplicity {
                    f = ip_mul(&f, &base);
                }
                assert_eq!(f, weil_polynomial(label, p), "{label} at p={p}");
            }
        }
        assert_eq!(conjugacy_orbit(WeilLabel::Eps(0)).m, 8);
        assert_eq!(conjugacy_orbit(WeilLabel::Eps(-1)).m, 12);
        assert_eq!(conjugacy_orbit(WeilLabel::ProdPlus).m, 1);
    }

    #[test]
    fn oracle_matches_at_seven() {
        let mut want: Vec<IntPoly> = WeilLabel::ALL.iter().map(|&l| weil_polynomial(l, 7)).collect();
        want.sort();
        assert_eq!(galois_orbit_products(7), want);
    }

    #[test]
    fn functional_equation() {
        for w in enumerate_ss_weil_deg4(13).unwrap() {
            // a_{4−k} = p^{2−k}·a_k for the palindromic-up-to-scaling shape
            let p = big(13);
            let a = &w.coefficients;
            assert_eq!(a[0], &p * &p * &a[4]);
            assert_eq!(a[1], &p * &a[3]);
        }
    }
}
