//! Exact arithmetic in Q(ζ_m) for m ∈ {1, 3, 4} together with p-adic
//! valuations through a fixed Hensel-lifted embedding into Q_p.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default number of p-adic digits carried by the embedding root.
pub const DEFAULT_PRECISION: u32 = 20;
/// Default ceiling for precision escalation.
pub const DEFAULT_PRECISION_CAP: u32 = 256;

/// The cyclotomic field housing the scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cyclo {
    One,
    Three,
    Four,
}

impl Cyclo {
    pub fn from_order(m: u32) -> Result<Self> {
        match m {
            1 => Ok(Cyclo::One),
            3 => Ok(Cyclo::Three),
            4 => Ok(Cyclo::Four),
            other => Err(Error::UnsupportedOrder(other)),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Cyclo::One => 1,
            Cyclo::Three => 3,
            Cyclo::Four => 4,
        }
    }

    fn join(self, other: Cyclo, self_pure: bool, other_pure: bool) -> Cyclo {
        if self == other || other == Cyclo::One {
            return self;
        }
        if self == Cyclo::One {
            return other;
        }
        match (self_pure, other_pure) {
            (true, _) => other,
            (_, true) => self,
            _ => panic!("{}", Error::FieldMismatch),
        }
    }
}

/// An element `re + zeta·ζ` of Q(ζ_m).
#[derive(Clone, Debug)]
pub struct Scalar {
    re: BigRational,
    zeta: BigRational,
    field: Cyclo,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.re != other.re || self.zeta != other.zeta {
            return false;
        }
        self.zeta.is_zero() || self.field == other.field
    }
}

impl Eq for Scalar {}

impl std::hash::Hash for Scalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.re.hash(state);
        self.zeta.hash(state);
        if !self.zeta.is_zero() {
            self.field.hash(state);
        }
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn new(re: BigRational, zeta: BigRational, field: Cyclo) -> Self {
        assert!(
            field != Cyclo::One || zeta.is_zero(),
            "rational field cannot carry a ζ-coefficient"
        );
        Scalar { re, zeta, field }
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(re: BigRational) -> Self {
        Scalar { re, zeta: BigRational::zero(), field: Cyclo::One }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn big_int(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(ratio(n, d))
    }

    /// The generator ζ_m of the given field.
    pub fn zeta(field: Cyclo) -> Self {
        assert!(field != Cyclo::One, "Q has no primitive root to adjoin");
        Scalar { re: BigRational::zero(), zeta: BigRational::one(), field }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn zeta_coeff(&self) -> &BigRational {
        &self.zeta
    }

    pub fn field(&self) -> Cyclo {
        self.field
    }

    /// Re-tag a scalar as living in a (compatible) larger field.
    pub fn in_field(mut self, field: Cyclo) -> Self {
        if self.zeta.is_zero() {
            self.field = field;
            self
        } else {
            assert_eq!(self.field, field, "{}", Error::FieldMismatch);
            self
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.zeta.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.zeta.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.zeta.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.re)
    }

    /// Canonical form. Construction already keeps fractions reduced and
    /// ζ-degree below 2, so this is the identity on well-formed values.
    pub fn normalize(&self) -> Scalar {
        self.clone()
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Scalar {
        match self.field {
            Cyclo::One => self.clone(),
            // ζ̄ = ζ² = −1 − ζ
            Cyclo::Three => Scalar {
                re: &self.re - &self.zeta,
                zeta: -self.zeta.clone(),
                field: self.field,
            },
            Cyclo::Four => Scalar { re: self.re.clone(), zeta: -self.zeta.clone(), field: self.field },
        }
    }

    /// Field norm down to Q.
    pub fn norm(&self) -> BigRational {
        let (u, v) = (&self.re, &self.zeta);
        match self.field {
            Cyclo::One => u.clone(),
            Cyclo::Three => u * u - u * v + v * v,
            Cyclo::Four => u * u + v * v,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return Some(Scalar { re: self.re.recip(), zeta: BigRational::zero(), field: self.field });
        }
        let n = self.norm();
        let c = self.conj();
        Some(Scalar { re: &c.re / &n, zeta: &c.zeta / &n, field: self.field })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        rhs.inv().map(|r| self * &r)
    }

    pub fn pow(&self, e: i64) -> Scalar {
        let base = if e < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Scalar::one().in_field(self.field);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            k >>= 1;
        }
        acc
    }

    fn add_ref(&self, rhs: &Scalar) -> Scalar {
        let field = self.field.join(rhs.field, self.zeta.is_zero(), rhs.zeta.is_zero());
        let zeta = if rhs.zeta.is_zero() {
            self.zeta.clone()
        } else if self.zeta.is_zero() {
            rhs.zeta.clone()
        } else {
            &self.zeta + &rhs.zeta
        };
        Scalar { re: &self.re + &rhs.re, zeta, field }
    }

    fn sub_ref(&self, rhs: &Scalar) -> Scalar {
        let field = self.field.join(rhs.field, self.zeta.is_zero(), rhs.zeta.is_zero());
        let zeta = if rhs.zeta.is_zero() { self.zeta.clone() } else { &self.zeta - &rhs.zeta };
        Scalar { re: &self.re - &rhs.re, zeta, field }
    }

    fn mul_ref(&self, rhs: &Scalar) -> Scalar {
        let field = self.field.join(rhs.field, self.zeta.is_zero(), rhs.zeta.is_zero());
        if rhs.zeta.is_zero() {
            if self.zeta.is_zero() {
                return Scalar { re: &self.re * &rhs.re, zeta: BigRational::zero(), field };
            }
            return Scalar { re: &self.re * &rhs.re, zeta: &self.zeta * &rhs.re, field };
        }
        if self.zeta.is_zero() {
            return Scalar { re: &self.re * &rhs.re, zeta: &self.re * &rhs.zeta, field };
        }
        let (u1, v1, u2, v2) = (&self.re, &self.zeta, &rhs.re, &rhs.zeta);
        let vv = v1 * v2;
        let mixed = u1 * v2 + v1 * u2;
        match field {
            Cyclo::Three => Scalar { re: u1 * u2 - &vv, zeta: mixed - vv, field },
            Cyclo::Four => Scalar { re: u1 * u2 - vv, zeta: mixed, field },
            Cyclo::One => unreachable!(),
        }
    }

    /// Serialized form `num/den`, with a `+ζ·num/den` suffix outside Q.
    pub fn to_record(&self) -> String {
        let r = |q: &BigRational| format!("{}/{}", q.numer(), q.denom());
        if self.field == Cyclo::One {
            r(&self.re)
        } else {
            format!("{}+ζ·{}", r(&self.re), r(&self.zeta))
        }
    }

    /// Coefficient pair `[re, ζ-coefficient]` as `num/den` strings.
    pub fn to_pair(&self) -> [String; 2] {
        let r = |q: &BigRational| format!("{}/{}", q.numer(), q.denom());
        [r(&self.re), r(&self.zeta)]
    }

    pub fn from_pair(pair: &[String; 2], field: Cyclo) -> Result<Scalar> {
        let re = parse_rational(&pair[0])?;
        let zeta = parse_rational(&pair[1])?;
        if field == Cyclo::One && !zeta.is_zero() {
            return Err(Error::Parse(format!("ζ-coefficient {} in a rational context", pair[1])));
        }
        Ok(Scalar { re, zeta, field })
    }

    /// Parse `7`, `-1/7`, `3-2z`, `-7ζ`, or the record form `3/1+ζ·-7/1`.
    pub fn parse(text: &str, field: Cyclo) -> Result<Scalar> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        let mut prev: Option<char> = None;
        for ch in s.chars() {
            let splits = (ch == '+' || ch == '-')
                && !cur.is_empty()
                && !matches!(prev, Some('·') | Some('*') | Some('/'));
            if splits {
                terms.push(std::mem::take(&mut cur));
            }
            if !(ch == '+' && cur.is_empty()) {
                cur.push(ch);
            }
            prev = Some(ch);
        }
        terms.push(cur);
        let mut out = Scalar::zero().in_field(field);
        for term in terms {
            if term.is_empty() {
                return Err(Error::Parse(format!("malformed scalar {text:?}")));
            }
            let is_zeta = term.contains('ζ') || term.contains('z');
            if is_zeta {
                if field == Cyclo::One {
                    return Err(Error::Parse(format!("{text:?} uses ζ but the field is Q")));
                }
                let coeff: String =
                    term.chars().filter(|c| !matches!(c, 'ζ' | 'z' | '·' | '*')).collect();
                let q = match coeff.as_str() {
                    "" | "+" => BigRational::one(),
                    "-" => -BigRational::one(),
                    other => parse_rational(other)?,
                };
                out = &out + &Scalar { re: BigRational::zero(), zeta: q, field };
            } else {
                out = &out + &Scalar::rational(parse_rational(&term)?);
            }
        }
        Ok(out)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim_start_matches('+').parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zeta.is_zero() {
            return write!(f, "{}", self.re);
        }
        let z = if self.zeta.is_one() {
            "ζ".to_string()
        } else if (-self.zeta.clone()).is_one() {
            "-ζ".to_string()
        } else {
            format!("{}ζ", self.zeta)
        };
        if self.re.is_zero() {
            write!(f, "{z}")
        } else if z.starts_with('-') {
            write!(f, "{}{}", self.re, z)
        } else {
            write!(f, "{}+{}", self.re, z)
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                self.$inner(rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$inner(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                self.$inner(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$inner(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, zeta: -self.zeta, field: self.field }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

/// A p-adic valuation: an integer or +∞ (ordered above every integer).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }

    pub fn at_least(self, k: i64) -> bool {
        self >= Valuation::Finite(k)
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exponent of p in a nonzero integer.
pub fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    assert!(!n.is_zero());
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn rational_valuation(q: &BigRational, p: &BigInt) -> Valuation {
    if q.is_zero() {
        Valuation::Infinite
    } else {
        Valuation::Finite(int_valuation(q.numer(), p) - int_valuation(q.denom(), p))
    }
}

fn cyclotomic_eval(m: u32, r: &BigInt) -> BigInt {
    match m {
        3 => r * r + r + 1,
        4 => r * r + 1,
        _ => unreachable!(),
    }
}

fn cyclotomic_derivative(m: u32, r: &BigInt) -> BigInt {
    match m {
        3 => r * 2 + 1,
        4 => r * 2,
        _ => unreachable!(),
    }
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    let eg = a.mod_floor(modulus).extended_gcd(modulus);
    eg.gcd.is_one().then(|| eg.x.mod_floor(modulus))
}

/// Root of Φ_m modulo p^n: the smallest root mod p, lifted by Newton
/// iteration. Lifts are unique, so successive precisions are compatible.
pub fn hensel_root(m: u32, p: u64, n: u32) -> Result<BigInt> {
    if m != 3 && m != 4 {
        return Err(Error::UnsupportedOrder(m));
    }
    if n == 0 {
        return Err(Error::PreconditionFailed("precision must be positive".into()));
    }
    if p % u64::from(m) != 1 {
        return Err(Error::NoRoot { m, p });
    }
    let pb = BigInt::from(p);
    let mut r = (0..p)
        .map(BigInt::from)
        .find(|r| cyclotomic_eval(m, r).mod_floor(&pb).is_zero())
        .ok_or(Error::NoRoot { m, p })?;
    let mut prec = 1u32;
    while prec < n {
        prec = (prec * 2).min(n);
        let modulus = num_traits::pow(pb.clone(), prec as usize);
        let inv = mod_inverse(&cyclotomic_derivative(m, &r), &modulus)
            .ok_or_else(|| Error::Internal("derivative not invertible".into()))?;
        r = (&r - cyclotomic_eval(m, &r) * inv).mod_floor(&modulus);
    }
    Ok(r)
}

/// Prime together with the cyclotomic field and its embedding into Q_p.
#[derive(Clone, Debug)]
pub struct PrimeContext {
    p: u64,
    p_big: BigInt,
    field: Cyclo,
    precision: u32,
    cap: u32,
    root: Option<BigInt>,
}

impl PrimeContext {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        Self::with_precision(p, m, DEFAULT_PRECISION)
    }

    pub fn rational(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn with_precision(p: u64, m: u32, precision: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p < 7 {
            return Err(Error::PrimeTooSmall(p));
        }
        let field = Cyclo::from_order(m)?;
        let root = match field {
            Cyclo::One => None,
            _ => Some(hensel_root(m, p, precision)?),
        };
        Ok(PrimeContext { p, p_big: BigInt::from(p), field, precision, cap: DEFAULT_PRECISION_CAP.max(precision), root })
    }

    pub fn with_cap(mut self, cap: u32) -> Self {
        self.cap = cap.max(1);
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn p_big(&self) -> &BigInt {
        &self.p_big
    }

    pub fn p_scalar(&self) -> Scalar {
        Scalar::big_int(self.p_big.clone())
    }

    pub fn field(&self) -> Cyclo {
        self.field
    }

    pub fn order(&self) -> u32 {
        self.field.order()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn embedding_root(&self) -> Option<&BigInt> {
        self.root.as_ref()
    }

    /// The generator ζ of the context's field.
    pub fn zeta(&self) -> Scalar {
        Scalar::zeta(self.field)
    }

    fn root_at(&self, n: u32) -> Result<BigInt> {
        if n == self.precision {
            Ok(self.root.clone().expect("root present outside Q"))
        } else {
            hensel_root(self.order(), self.p, n)
        }
    }

    fn check_field(&self, s: &Scalar) -> Result<()> {
        if !s.is_rational() && s.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Integer data of a nonzero cyclotomic scalar: s = p^shift · (a + bζ)
    /// with a, b coprime integers up to a p-adic unit denominator.
    fn integral_parts(&self, s: &Scalar) -> (BigInt, BigInt, i64) {
        let l = s.re().denom().lcm(s.zeta_coeff().denom());
        let a = (s.re() * BigRational::from_integer(l.clone())).to_integer();
        let b = (s.zeta_coeff() * BigRational::from_integer(l.clone())).to_integer();
        let g = a.gcd(&b);
        let shift = int_valuation(&g, &self.p_big) - int_valuation(&l, &self.p_big);
        (a / &g, b / &g, shift)
    }

    /// p-adic valuation of the image of `s` under the fixed embedding.
    pub fn valuation(&self, s: &Scalar) -> Result<Valuation> {
        self.check_field(s)?;
        if s.is_zero() {
            return Ok(Valuation::Infinite);
        }
        if s.is_rational() {
            return Ok(rational_valuation(s.re(), &self.p_big));
        }
        let (a, b, shift) = self.integral_parts(s);
        let mut n = self.precision;
        loop {
            let r = self.root_at(n)?;
            let modulus = num_traits::pow(self.p_big.clone(), n as usize);
            let image = (&a + &b * r).mod_floor(&modulus);
            if !image.is_zero() {
                return Ok(Valuation::Finite(shift + int_valuation(&image, &self.p_big)));
            }
            if n >= self.cap {
                return Err(Error::PrecisionExhausted { cap: self.cap });
            }
            n = (n * 2).min(self.cap);
        }
    }

    /// Residue mod p of a p-integral scalar under the embedding, as an
    /// integer in [0, p). `None` when the valuation is negative.
    pub fn residue(&self, s: &Scalar) -> Result<Option<u64>> {
        let v = self.valuation(s)?;
        if v < Valuation::Finite(0) {
            return Ok(None);
        }
        if v > Valuation::Finite(0) {
            return Ok(Some(0));
        }
        let l = s.re().denom().lcm(s.zeta_coeff().denom());
        let a = (s.re() * BigRational::from_integer(l.clone())).to_integer();
        let b = (s.zeta_coeff() * BigRational::from_integer(l.clone())).to_integer();
        let lv = int_valuation(&l, &self.p_big);
        let n = (lv as u32 + 2).max(self.precision);
        let modulus = num_traits::pow(self.p_big.clone(), n as usize);
        let r = if s.is_rational() { BigInt::zero() } else { self.root_at(n)? };
        let mut image = (&a + &b * r).mod_floor(&modulus);
        let mut l = l;
        for _ in 0..lv {
            image /= &self.p_big;
            l /= &self.p_big;
        }
        let inv = mod_inverse(&l, &self.p_big).expect("unit denominator");
        Ok((image * inv).mod_floor(&self.p_big).to_u64())
    }

    /// Square root inside the context's field for rational radicands;
    /// `None` when no root exists there (or the radicand is irrational).
    pub fn sqrt(&self, s: &Scalar) -> Option<Scalar> {
        let q = s.as_rational()?;
        if let Some(r) = rational_sqrt(q) {
            return Some(Scalar::rational(r));
        }
        match self.field {
            Cyclo::One => None,
            // (q·ζ₄)² = −q²
            Cyclo::Four => rational_sqrt(&-q.clone()).map(|r| Scalar::rational(r) * self.zeta()),
            // (1 + 2ζ₃)² = −3
            Cyclo::Three => {
                let t = -q.clone() / BigRational::from_integer(BigInt::from(3));
                rational_sqrt(&t).map(|r| Scalar::rational(r) * (Scalar::one() + Scalar::int(2) * self.zeta()))
            }
        }
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3() -> Scalar {
        Scalar::zeta(Cyclo::Three)
    }

    #[test]
    fn hensel_examples() {
        assert_eq!(hensel_root(3, 7, 1).unwrap(), BigInt::from(2));
        assert_eq!(hensel_root(3, 7, 2).unwrap(), BigInt::from(30));
        assert_eq!(hensel_root(4, 7, 1), Err(Error::NoRoot { m: 4, p: 7 }));
    }

    #[test]
    fn hensel_precisions_compatible() {
        for (m, p) in [(3u32, 7u64), (3, 13), (4, 13), (4, 17)] {
            let hi = hensel_root(m, p, 12).unwrap();
            for n in 1..12 {
                let lo = hensel_root(m, p, n).unwrap();
                let modulus = num_traits::pow(BigInt::from(p), n as usize);
                assert_eq!(hi.mod_floor(&modulus), lo);
                assert!(cyclotomic_eval(m, &lo).mod_floor(&modulus).is_zero());
            }
        }
    }

    #[test]
    fn valuation_examples() {
        let ctx = PrimeContext::new(7, 3).unwrap();
        assert_eq!(ctx.valuation(&Scalar::frac(7, 3)).unwrap(), Valuation::Finite(1));
        assert_eq!(ctx.valuation(&Scalar::zero()).unwrap(), Valuation::Infinite);
        assert_eq!(ctx.valuation(&(z3() - Scalar::one())).unwrap(), Valuation::Finite(0));
        assert_eq!(ctx.valuation(&z3()).unwrap(), Valuation::Finite(0));
        let t = Scalar::one() - z3() * Scalar::int(7);
        assert_eq!(ctx.valuation(&t).unwrap(), Valuation::Finite(0));
    }

    #[test]
    fn valuation_of_embedded_zero_divisor() {
        // ζ − r vanishes to high order under the embedding with root r.
        let ctx = PrimeContext::with_precision(7, 3, 4).unwrap();
        let expected = int_valuation(&(hensel_root(3, 7, 40).unwrap() - 30), &BigInt::from(7));
        assert!(expected >= 2);
        let v = ctx.valuation(&(z3() - Scalar::int(30))).unwrap();
        assert_eq!(v, Valuation::Finite(expected));
        // the conjugate root is a unit distance away
        let other = ctx.valuation(&(z3().conj() - Scalar::int(30))).unwrap();
        assert_eq!(other, Valuation::Finite(0));
    }

    #[test]
    fn precision_cap_reported() {
        let ctx = PrimeContext::with_precision(7, 3, 2).unwrap().with_cap(4);
        let r = hensel_root(3, 7, 40).unwrap();
        let close = z3() - Scalar::big_int(r);
        assert_eq!(ctx.valuation(&close), Err(Error::PrecisionExhausted { cap: 4 }));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(Scalar::frac(2, 4), Scalar::frac(1, 2));
        assert_eq!(z3() * z3(), -Scalar::one() - z3());
        assert_eq!(z3() + z3() * z3(), -Scalar::one());
        let i = Scalar::zeta(Cyclo::Four);
        assert_eq!(&i * &i, -Scalar::one());
    }

    #[test]
    fn inverse_roundtrip() {
        let s = Scalar::frac(3, 2) + Scalar::int(5) * z3();
        assert!((&s * &s.inv().unwrap()).is_one());
        assert_eq!(z3().pow(3), Scalar::one());
        assert_eq!(Scalar::zeta(Cyclo::Four).pow(-2), -Scalar::one());
    }

    #[test]
    fn parse_and_record() {
        let f = Cyclo::Three;
        let s = Scalar::parse("-7z", f).unwrap();
        assert_eq!(s, Scalar::int(-7) * z3());
        assert_eq!(Scalar::parse(&s.to_record(), f).unwrap(), s);
        assert_eq!(Scalar::parse("3-2ζ", f).unwrap(), Scalar::int(3) - Scalar::int(2) * z3());
        assert_eq!(Scalar::parse("-1/7", Cyclo::One).unwrap(), Scalar::frac(-1, 7));
        assert!(Scalar::parse("z", Cyclo::One).is_err());
        assert!(Scalar::parse("1/0", Cyclo::One).is_err());
        let pair = s.to_pair();
        assert_eq!(Scalar::from_pair(&pair, f).unwrap(), s);
    }

    #[test]
    fn square_roots_in_field() {
        let c4 = PrimeContext::new(13, 4).unwrap();
        let r = c4.sqrt(&Scalar::int(-4 * 169)).unwrap();
        assert_eq!(&r * &r, Scalar::int(-4 * 169));
        let c3 = PrimeContext::new(7, 3).unwrap();
        let r = c3.sqrt(&Scalar::int(-3 * 49)).unwrap();
        assert_eq!(&r * &r, Scalar::int(-147));
        assert!(PrimeContext::rational(7).unwrap().sqrt(&Scalar::int(-1)).is_none());
        assert!(c3.sqrt(&Scalar::int(7)).is_none());
    }

    #[test]
    fn residues() {
        let ctx = PrimeContext::new(7, 3).unwrap();
        assert_eq!(ctx.residue(&z3()).unwrap(), Some(2));
        assert_eq!(ctx.residue(&z3().conj()).unwrap(), Some(4));
        assert_eq!(ctx.residue(&Scalar::frac(1, 7)).unwrap(), None);
        assert_eq!(ctx.residue(&Scalar::frac(3, 2)).unwrap(), Some(5));
    }

    #[test]
    fn context_rejects_bad_primes() {
        assert_eq!(PrimeContext::rational(5).unwrap_err(), Error::PrimeTooSmall(5));
        assert_eq!(PrimeContext::rational(9).unwrap_err(), Error::NotPrime(9));
        assert!(PrimeContext::new(11, 3).is_err());
    }
}
