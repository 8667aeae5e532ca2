//! Univariate polynomials over the scalar field.

use std::fmt;

use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Coefficients from the constant term upwards, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Scalar::int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial c·X^k.
    pub fn monomial(c: Scalar, k: usize) -> Self {
        let mut v = vec![Scalar::zero(); k];
        v.push(c);
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                Poly::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.leading().unwrap().inv().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Scalar::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let q = rem.last().unwrap() * &lead_inv;
            if !q.is_zero() {
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &(&q * c);
                }
            }
            quot[k] = q;
            rem.pop();
            while rem.last().is_some_and(Scalar::is_zero) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.div_rem(self).1.is_zero()
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * &Scalar::int(k as i64)).collect(),
        )
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| &acc * x + c)
    }

    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        let n = m.rows();
        self.coeffs
            .iter()
            .rev()
            .fold(Matrix::zero(n, n), |acc, c| acc.mul(m).add(&Matrix::identity(n).scale(c)))
    }

    /// Multiplicity of `factor` (of positive degree) as a divisor.
    pub fn multiplicity(&self, factor: &Poly) -> usize {
        let mut k = 0;
        let mut cur = self.clone();
        while !cur.is_zero() {
            let (q, r) = cur.div_rem(factor);
            if !r.is_zero() {
                break;
            }
            cur = q;
            k += 1;
        }
        k
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut body = c.to_string();
            let wrapped = !c.is_rational() || body.contains('/');
            let negative = !wrapped && body.starts_with('-');
            if negative {
                body.remove(0);
            }
            if wrapped {
                body = format!("({body})");
            }
            let mono = match k {
                0 => body,
                _ => {
                    let x = if k == 1 { "X".to_string() } else { format!("X^{k}") };
                    if body == "1" {
                        x
                    } else {
                        format!("{body}{x}")
                    }
                }
            };
            match (first, negative) {
                (true, true) => write!(f, "-{mono}")?,
                (true, false) => write!(f, "{mono}")?,
                (false, true) => write!(f, " - {mono}")?,
                (false, false) => write!(f, " + {mono}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        // (X² − 1) = (X − 1)(X + 1)
        let a = Poly::from_ints(&[-1, 0, 1]);
        let b = Poly::from_ints(&[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, Poly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&Poly::from_ints(&[-1, 1]).pow(2)), Poly::from_ints(&[-1, 1]));
        assert!(a.is_squarefree());
        assert!(!Poly::from_ints(&[1, 1]).pow(2).is_squarefree());
        assert_eq!(Poly::from_ints(&[-7, 0, 1]).pow(2).multiplicity(&Poly::from_ints(&[-7, 0, 1])), 2);
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_ints(&[49, 0, 7, 0, 1]).to_string(), "X^4 + 7X^2 + 49");
        assert_eq!(Poly::from_ints(&[49, 0, -14, 0, 1]).to_string(), "X^4 - 14X^2 + 49");
    }

    #[test]
    fn evaluation() {
        let f = Poly::from_ints(&[1, 1, 1]);
        assert_eq!(f.eval(&Scalar::int(2)), Scalar::int(7));
        assert_eq!(f.derivative(), Poly::from_ints(&[1, 2]));
    }
}
