//! Volumes of R(i, j) = {μ ∈ Z_p^× : p^c | G_j(μ)} by residue counting and by refinement.
//!
//! For j ≥ 0, G_j(μ) = n·p^{2j} + r·p^j·μ + m·μ² and c = i + 2j; for j < 0,
//! G_j(μ) = n + r·p^{−j}·μ + m·p^{−2j}·μ² and c = i.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::valuation_int;
use crate::error::{Error, Result};
use crate::form::HalfIntegralForm;
use crate::scalar::{rat, rat_pow};

fn coefficients(i: i64, j: i64, t: &HalfIntegralForm, p: u64) -> ([BigInt; 3], i64) {
    let pb = BigInt::from(p);
    let (n, r, m) = (BigInt::from(t.n), BigInt::from(t.r), BigInt::from(t.m));
    if j >= 0 {
        let pj = num_traits::pow(pb, j as usize);
        ([n * &pj * &pj, r * &pj, m], i + 2 * j)
    } else {
        let pj = num_traits::pow(pb, (-j) as usize);
        ([n, r * &pj, m * &pj * &pj], i)
    }
}

fn v_big(x: &BigInt, p: u64) -> i64 {
    if x.is_zero() {
        i64::MAX / 4
    } else {
        valuation_int(x, p).map(i64::from).unwrap_or(0)
    }
}

fn full(p: u64) -> BigRational {
    BigRational::one() - rat_pow(p, -1)
}

/// vol R(i, j) by counting units μ mod p^B; fails when p^c does not divide p^B.
pub fn volume_r_flat(i: i64, j: i64, t: &HalfIntegralForm, p: u64, depth: u32) -> Result<BigRational> {
    let ([a0, a1, a2], c) = coefficients(i, j, t, p);
    if c <= 0 {
        return Ok(full(p));
    }
    if c > depth as i64 {
        return Err(Error::DepthExceeded { depth });
    }
    let q = (p as i128).pow(depth);
    let pc = (p as i128).pow(c as u32);
    let red = |x: &BigInt| -> i128 {
        let r = x % BigInt::from(pc);
        i128::try_from(r).expect("residue fits") .rem_euclid(pc)
    };
    let (b0, b1, b2) = (red(&a0), red(&a1), red(&a2));
    let mut count: i128 = 0;
    for mu in 0..q {
        if mu % p as i128 == 0 {
            continue;
        }
        let x = mu % pc;
        if (b0 + (b1 * x) % pc + (b2 * x % pc) * x) % pc == 0 {
            count += 1;
        }
    }
    Ok(rat(count as i64, q as i64))
}

/// vol R(i, j) by refining residue classes until membership is constant on each.
pub fn volume_r(i: i64, j: i64, t: &HalfIntegralForm, p: u64) -> Result<BigRational> {
    let ([a0, a1, a2], c) = coefficients(i, j, t, p);
    if c <= 0 {
        return Ok(full(p));
    }
    let v2 = v_big(&a2, p);
    let pb = BigInt::from(p);
    let two = BigInt::from(2);
    let mut vol = BigRational::zero();
    let mut stack: Vec<(BigInt, u32)> = (1..p).map(|u| (BigInt::from(u), 1)).collect();
    while let Some((mu0, k)) = stack.pop() {
        let ki = k as i64;
        let g = &a0 + &a1 * &mu0 + &a2 * &mu0 * &mu0;
        let dg = &a1 + &two * &a2 * &mu0;
        let vg = v_big(&g, p);
        let delta = (ki + v_big(&dg, p)).min(2 * ki + v2);
        if vg < delta || delta >= c {
            if vg >= c {
                vol += rat_pow(p, -ki);
            }
            continue;
        }
        let step = num_traits::pow(pb.clone(), k as usize);
        for d in 0..p {
            stack.push((&mu0 + &step * BigInt::from(d), k + 1));
        }
    }
    Ok(vol)
}

/// vol S(i, j) = vol R(i − 1, j) − vol R(i, j).
pub fn volume_s(i: i64, j: i64, t: &HalfIntegralForm, p: u64) -> Result<BigRational> {
    Ok(volume_r(i - 1, j, t, p)? - volume_r(i, j, t, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfactors::volume_r_closed_form;

    #[test]
    fn flat_and_adaptive_agree_with_closed_form() {
        for p in [3u64, 5] {
            for &(n, m) in &[(1i64, 1i64), (1, -1), (2, 9), (3, 1), (1, 27), (p as i64, 2)] {
                let t = HalfIntegralForm::new(n, 0, m);
                for i in 0..=3 {
                    for j in -2..=2 {
                        let closed = volume_r_closed_form(i, j, n, m, p).unwrap();
                        assert_eq!(volume_r(i, j, &t, p).unwrap(), closed, "p={p} T={t} i={i} j={j}");
                        if i + 2 * j.max(0) <= 6 {
                            assert_eq!(volume_r_flat(i, j, &t, p, 6).unwrap(), closed);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn example_two_thirds() {
        let t = HalfIntegralForm::new(1, 0, 1);
        assert_eq!(volume_r(0, 0, &t, 3).unwrap(), rat(2, 3));
        assert!(matches!(volume_r_flat(9, 0, &t, 3, 4), Err(Error::DepthExceeded { depth: 4 })));
    }
}
