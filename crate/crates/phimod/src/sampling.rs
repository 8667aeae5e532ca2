//! Seeded samplers for geometric family parameters and random changes of basis.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::module::FamilyParams;
use crate::scalar::{PrimeContext, Scalar};

/// Deterministic per-index generator derived from a seed.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn coprime_to(p: u64, n: i64) -> bool {
    !n.unsigned_abs().is_multiple_of(p)
}

/// A p-adic unit: ±n/d with n, d ≤ 30 prime to p.
pub fn random_unit(rng: &mut ChaCha8Rng, p: u64) -> Scalar {
    loop {
        let n: i64 = rng.gen_range(1..=30) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let d: i64 = rng.gen_range(1..=5);
        if coprime_to(p, n) && coprime_to(p, d) {
            return Scalar::frac(n, d);
        }
    }
}

/// A p-integral rational, zero with small probability.
pub fn random_integral(rng: &mut ChaCha8Rng, p: u64) -> Scalar {
    if rng.gen_ratio(1, 10) {
        return Scalar::zero();
    }
    let k = rng.gen_range(0..=2);
    random_unit(rng, p) * Scalar::int(p as i64).pow(k)
}

pub fn sample_prod(rng: &mut ChaCha8Rng) -> FamilyParams {
    FamilyParams::Prod { eps_prime: if rng.gen_bool(0.5) { 1 } else { -1 } }
}

pub fn sample_iso(rng: &mut ChaCha8Rng, eps: i8) -> FamilyParams {
    FamilyParams::Iso { eps, eps_prime: if rng.gen_bool(0.5) { 1 } else { -1 } }
}

/// a′ = εp + p²t with t p-integral.
pub fn sample_nu(rng: &mut ChaCha8Rng, eps: i8, p: u64) -> FamilyParams {
    let ps = Scalar::int(p as i64);
    let t = random_integral(rng, p);
    FamilyParams::Nu { eps, a_prime: Scalar::int(eps as i64) * &ps + &ps * &ps * t }
}

/// Geometric Mu parameters from either valuation region with c ∈ pZ_p.
pub fn sample_mu(rng: &mut ChaCha8Rng, eps: i8, p: u64) -> FamilyParams {
    let ps = Scalar::int(p as i64);
    loop {
        let (a, b) = if rng.gen_bool(0.6) {
            (&ps * random_integral(rng, p), random_integral(rng, p))
        } else {
            let k = rng.gen_range(0..=3);
            (random_unit(rng, p) * ps.pow(1 - k), random_unit(rng, p) * ps.pow(-k))
        };
        if !(&a * &b + Scalar::one()).is_zero() {
            return FamilyParams::Mu { eps, a, b };
        }
    }
}

/// Mu parameters on a degenerate line: a = −μ̂·p·b for a root μ̂ of X² + εX + 1.
pub fn sample_mu_degenerate(rng: &mut ChaCha8Rng, eps: i8, ctx: &PrimeContext, root: &Scalar) -> FamilyParams {
    let p = ctx.p();
    loop {
        let k = rng.gen_range(-2..=1);
        let b = random_unit(rng, p) * Scalar::int(p as i64).pow(k);
        let a = -(root * &ctx.p_scalar() * &b);
        if !(&a * &b + Scalar::one()).is_zero() {
            return FamilyParams::Mu { eps, a, b };
        }
    }
}

/// Random invertible n×n integer matrix with small entries.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Matrix {
    loop {
        let entries: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-bound..=bound)).collect();
        let m = Matrix::from_ints(n, n, &entries);
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// Random element of GL_n(Z): a signed permutation times `moves` elementary
/// row operations with multipliers in [−bound, bound].
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, moves: usize, bound: i64) -> Matrix {
    let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for i in (1..n).rev() {
        rows.swap(i, rng.gen_range(0..=i));
    }
    for row in rows.iter_mut() {
        if rng.gen_bool(0.5) {
            row.iter_mut().for_each(|x| *x = -*x);
        }
    }
    for _ in 0..moves {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let k = rng.gen_range(-bound..=bound);
        if i != j && k != 0 {
            let src = rows[j].clone();
            rows[i].iter_mut().zip(src).for_each(|(x, y)| *x += k * y);
        }
    }
    let entries: Vec<i64> = rows.into_iter().flatten().collect();
    Matrix::from_ints(n, n, &entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::validate_geometric_params;

    #[test]
    fn samples_are_geometric() {
        let ctx = PrimeContext::rational(7).unwrap();
        let mut rng = rng_for(5, 0);
        for eps in [-1, 0, 1] {
            for _ in 0..50 {
                assert!(validate_geometric_params(&sample_nu(&mut rng, eps, 7), &ctx).unwrap());
                let m = sample_mu(&mut rng, eps, 7);
                assert!(validate_geometric_params(&m, &ctx).unwrap(), "{m}");
            }
        }
        let z3 = PrimeContext::new(7, 3).unwrap();
        let root = z3.zeta();
        for _ in 0..20 {
            assert!(validate_geometric_params(&sample_mu_degenerate(&mut rng, 1, &z3, &root), &z3).unwrap());
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<u32> = (0..5).map(|_| rng_for(9, 3).gen()).collect();
        let b: Vec<u32> = (0..5).map(|_| rng_for(9, 3).gen()).collect();
        assert_eq!(a, b);
        assert!(!random_invertible(&mut rng_for(1, 1), 4, 3).det().is_zero());
        let u = random_unimodular(&mut rng_for(1, 2), 4, 6, 2);
        assert!(u.det() == Scalar::one() || u.det() == Scalar::int(-1));
    }
}
