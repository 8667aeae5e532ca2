//! Valuation regions of Mu parameters and the adapted lattices that exist
//! exactly when c ∈ pZ_p.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{Matrix, Vector};
use crate::module::mu_c;
use crate::scalar::{PrimeContext, Scalar, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ValuationRegion {
    /// x ≤ y, x ≤ 0
    D1,
    /// x ≥ y + 2, y ≤ −1
    D2,
    /// x ≥ 1, y ≥ 0
    D3,
    /// x − y = 1, x ≤ 0
    L,
}

impl ValuationRegion {
    pub fn admits_lattice(self) -> bool {
        matches!(self, ValuationRegion::D3 | ValuationRegion::L)
    }
}

/// Region of (v(a), v(b)); an infinite valuation satisfies every lower bound.
pub fn region_of_valuations(x: Valuation, y: Valuation) -> ValuationRegion {
    use ValuationRegion::*;
    match (x.finite(), y.finite()) {
        (None, None) => D3,
        (None, Some(y)) => {
            if y >= 0 {
                D3
            } else {
                D2
            }
        }
        (Some(x), None) => {
            if x >= 1 {
                D3
            } else {
                D1
            }
        }
        (Some(x), Some(y)) => {
            if x >= 1 && y >= 0 {
                D3
            } else if x - y == 1 && x <= 0 {
                L
            } else if x <= y && x <= 0 {
                D1
            } else {
                debug_assert!(x >= y + 2 && y <= -1);
                D2
            }
        }
    }
}

fn check_denominator(a: &Scalar, b: &Scalar) -> Result<()> {
    if (a * b + Scalar::one()).is_zero() {
        return Err(Error::DegenerateDenominator("ab = -1".into()));
    }
    Ok(())
}

pub fn valuation_region(a: &Scalar, b: &Scalar, ctx: &PrimeContext) -> Result<ValuationRegion> {
    check_denominator(a, b)?;
    Ok(region_of_valuations(ctx.valuation(a)?, ctx.valuation(b)?))
}

/// Whether c(a, b) has valuation at least 1.
pub fn c_in_pzp(a: &Scalar, b: &Scalar, eps: i8, ctx: &PrimeContext) -> Result<bool> {
    let c = mu_c(a, b, eps, &ctx.p_scalar())?;
    Ok(ctx.valuation(&c)?.at_least(1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeProvenance {
    Standard,
    ShiftedByU { u: Scalar, n: i64 },
}

/// A Z_p-lattice in K², given by two basis vectors.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    pub vectors: [Vector; 2],
    pub provenance: LatticeProvenance,
}

impl LatticeBasis {
    pub fn standard() -> Self {
        LatticeBasis { vectors: [vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero(), Scalar::one()]], provenance: LatticeProvenance::Standard }
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_cols(&self.vectors)
    }
}

/// The lattice of the region: standard for D3, {e₁, (e₁ + u·e₂)/pⁿ} with
/// u = bp/a and n = −v(a) for L.
pub fn construct_lattice(a: &Scalar, b: &Scalar, ctx: &PrimeContext) -> Result<LatticeBasis> {
    match valuation_region(a, b, ctx)? {
        ValuationRegion::D3 => Ok(LatticeBasis::standard()),
        ValuationRegion::L => {
            let p = ctx.p_scalar();
            let u = (b * &p).checked_div(a).expect("a is nonzero in region L");
            let n = -ctx.valuation(a)?.finite().expect("finite in region L");
            let scale = p.pow(-n);
            let v2 = vec![scale.clone(), &u * &scale];
            Ok(LatticeBasis { vectors: [vec![Scalar::one(), Scalar::zero()], v2], provenance: LatticeProvenance::ShiftedByU { u, n } })
        }
        r => Err(Error::RegionWithoutLattice(format!("{r:?}"))),
    }
}

fn integral(m: &Matrix, ctx: &PrimeContext) -> Result<bool> {
    for e in m.entries() {
        if !ctx.valuation(e)?.at_least(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// N is stable under (0, −1; 1, c/p) with unit determinant, and under
/// (−pb, a; a + bc, pb).
pub fn verify_lattice(n: &LatticeBasis, a: &Scalar, b: &Scalar, eps: i8, ctx: &PrimeContext) -> Result<bool> {
    let p = ctx.p_scalar();
    let c = mu_c(a, b, eps, &p)?;
    let basis = n.matrix();
    let Some(binv) = basis.inverse() else {
        return Ok(false);
    };
    let in_basis = |m: &Matrix| binv.mul(m).mul(&basis);
    let first = Matrix::from_rows(vec![vec![Scalar::zero(), Scalar::int(-1)], vec![Scalar::one(), c.checked_div(&p).unwrap()]]);
    let f = in_basis(&first);
    let unit_det = ctx.valuation(&f.det())? == Valuation::Finite(0);
    let second = Matrix::from_rows(vec![vec![-(&p * b), a.clone()], vec![a + &(b * &c), &p * b]]);
    Ok(integral(&f, ctx)? && unit_det && integral(&in_basis(&second), ctx)?)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GridReport {
    pub samples: usize,
    pub with_lattice: usize,
    pub failures: Vec<String>,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples a = pⁱw, b = pʲw′ for i, j in −7..=7 and units w, w′ ∈ {1, 2, 3}:
/// c ∈ pZ_p must agree with the region, and every constructed lattice must verify.
pub fn lattice_grid_check(eps: i8, ctx: &PrimeContext, exec: Execution) -> GridReport {
    let p = ctx.p_scalar();
    let mut cases = Vec::new();
    for i in -7i64..=7 {
        for j in -7i64..=7 {
            for w in 1..=3 {
                for w2 in 1..=3 {
                    cases.push((i, j, w, w2));
                }
            }
        }
    }
    let results = exec.map(&cases, |&(i, j, w, w2)| -> (bool, Option<String>) {
        let a = p.pow(i) * Scalar::int(w);
        let b = p.pow(j) * Scalar::int(w2);
        let run = || -> Result<(bool, Option<String>)> {
            let region = valuation_region(&a, &b, ctx)?;
            let in_pzp = c_in_pzp(&a, &b, eps, ctx)?;
            if in_pzp != region.admits_lattice() {
                return Ok((false, Some(format!("(v(a), v(b)) = ({i}, {j}): region {region:?} but c in pZp is {in_pzp}"))));
            }
            if !region.admits_lattice() {
                return Ok((false, None));
            }
            let n = construct_lattice(&a, &b, ctx)?;
            if !verify_lattice(&n, &a, &b, eps, ctx)? {
                return Ok((true, Some(format!("(v(a), v(b)) = ({i}, {j}): constructed lattice fails"))));
            }
            Ok((true, None))
        };
        run().unwrap_or_else(|e| (false, Some(format!("({i}, {j}): {e}"))))
    });
    let mut report = GridReport { samples: cases.len(), ..Default::default() };
    for (lat, fail) in results {
        report.with_lattice += lat as usize;
        report.failures.extend(fail);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx7() -> PrimeContext {
        PrimeContext::rational(7).unwrap()
    }

    #[test]
    fn regions() {
        let c = ctx7();
        let r = |a: Scalar, b: Scalar| valuation_region(&a, &b, &c).unwrap();
        assert_eq!(r(Scalar::one(), Scalar::one()), ValuationRegion::D1);
        assert_eq!(r(Scalar::int(7), Scalar::one()), ValuationRegion::D3);
        assert_eq!(r(Scalar::frac(1, 7), Scalar::frac(1, 49)), ValuationRegion::L);
        assert_eq!(r(Scalar::zero(), Scalar::frac(1, 7)), ValuationRegion::D2);
        assert_eq!(r(Scalar::one(), Scalar::zero()), ValuationRegion::D1);
        assert_eq!(r(Scalar::int(7), Scalar::zero()), ValuationRegion::D3);
        assert_eq!(r(Scalar::frac(1, 7), Scalar::frac(1, 343)), ValuationRegion::D2);
    }

    #[test]
    fn c_membership() {
        let c = ctx7();
        assert!(!c_in_pzp(&Scalar::one(), &Scalar::one(), 0, &c).unwrap());
        assert!(c_in_pzp(&Scalar::int(7), &Scalar::zero(), 0, &c).unwrap());
        assert!(c_in_pzp(&Scalar::frac(1, 7), &Scalar::frac(1, 49), 0, &c).unwrap());
    }

    #[test]
    fn lattices() {
        let c = ctx7();
        let (a, b) = (Scalar::int(7), Scalar::one());
        let n = construct_lattice(&a, &b, &c).unwrap();
        assert_eq!(n.provenance, LatticeProvenance::Standard);
        assert!(verify_lattice(&n, &a, &b, 0, &c).unwrap());

        let (a, b) = (Scalar::frac(1, 7), Scalar::frac(1, 49));
        let n = construct_lattice(&a, &b, &c).unwrap();
        assert_eq!(n.provenance, LatticeProvenance::ShiftedByU { u: Scalar::one(), n: 1 });
        assert!(verify_lattice(&n, &a, &b, 0, &c).unwrap());
        assert!(!verify_lattice(&LatticeBasis::standard(), &a, &b, 0, &c).unwrap());
        // Scaling the shifted vector up by p instead of down breaks condition (ii).
        let up = LatticeBasis { vectors: [n.vectors[0].clone(), vec![Scalar::int(7), Scalar::int(7)]], provenance: LatticeProvenance::Standard };
        assert!(!verify_lattice(&up, &a, &b, 0, &c).unwrap());

        assert!(matches!(construct_lattice(&Scalar::one(), &Scalar::one(), &c), Err(Error::RegionWithoutLattice(_))));
    }

    #[test]
    fn grid() {
        let c = ctx7();
        for eps in [-1, 0, 1] {
            let r = lattice_grid_check(eps, &c, Execution::Sequential);
            assert!(r.passed(), "{:?}", r.failures);
            assert_eq!(r.samples, 15 * 15 * 9);
        }
    }
}
