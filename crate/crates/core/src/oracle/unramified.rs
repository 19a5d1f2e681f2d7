//! The unramified local integral by exact counting over Sym₂(p^{-a}Z_p)/Sym₂(Z_p).
//!
//! With x = χ_p(p)·p^{−s} the integral is Σ_t Φ_t(T)·x^t, where Φ_t sums the additive
//! character over the classes S whose elementary divisors have total exponent t.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::Mat4;
use super::section::{delta_exponent_minors, weyl_s2s1s2};
use super::{OracleEstimate, TruncationWindow};
use crate::error::{Error, Result};
use crate::form::HalfIntegralForm;
use crate::scalar::{rat, rat_int, rat_pow, Cyclo, CycloAccumulator, RootOfUnity};

fn vp(mut x: i64, p: i64) -> u32 {
    if x == 0 {
        return u32::MAX;
    }
    let mut c = 0;
    while x % p == 0 {
        x /= p;
        c += 1;
    }
    c
}

fn inv_mod(a: i64, m: i64) -> i64 {
    crate::arith::inv_mod(a, m as u64).expect("unit") as i64
}

/// Ramanujan sum c_{p^a}(j).
fn ramanujan(p: i64, a: u32, j: i64) -> i64 {
    let v = vp(j, p);
    if v >= a {
        p.pow(a) - p.pow(a - 1)
    } else if v + 1 == a {
        -p.pow(a - 1)
    } else {
        0
    }
}

/// E(a, w) for w = 0..=a: the character sum Σ e(tr(T·S₀)/p^a) over symmetric S₀ mod p^a
/// with p^w | det S₀.
pub fn e_sums(t: &HalfIntegralForm, p: u64, a: u32) -> Vec<BigRational> {
    let pi = p as i64;
    let q = pi.pow(a);
    let (n, r, m) = (t.n.rem_euclid(q), t.r.rem_euclid(q), t.m.rem_euclid(q));
    let mut cnt = vec![vec![0i64; q as usize]; a as usize + 1];
    for l0 in 0..q {
        let al = vp(l0, pi).min(a);
        for m0 in 0..q {
            let base = (n * l0 + r * m0) % q;
            let sq = (m0 as i128 * m0 as i128 % q as i128) as i64;
            for w in 0..=a {
                if al >= w {
                    if vp(sq, pi) >= w && m % q == 0 {
                        cnt[w as usize][base as usize] += q;
                    }
                } else {
                    let pal = pi.pow(al);
                    if sq % pal != 0 {
                        continue;
                    }
                    let modulus = pi.pow(w - al);
                    let weight = pi.pow(a - w + al);
                    if m % weight != 0 {
                        continue;
                    }
                    let lu = (l0 / pal).rem_euclid(modulus);
                    let c = ((sq / pal) % modulus) * inv_mod(lu, modulus) % modulus;
                    let idx = (base + m * c) % q;
                    cnt[w as usize][idx as usize] += weight;
                }
            }
        }
    }
    let phi = q - q / pi;
    cnt.into_iter()
        .map(|row| {
            let s: i64 = row.iter().enumerate().map(|(j, &c)| c * ramanujan(pi, a, j as i64)).sum();
            rat(s, phi)
        })
        .collect()
}

/// Φ_0..=Φ_A.
pub fn phi_coefficients(t: &HalfIntegralForm, p: u64, a_max: u32) -> Vec<BigRational> {
    let es: Vec<Vec<BigRational>> = (0..=a_max)
        .map(|a| if a == 0 { vec![BigRational::one()] } else { e_sums(t, p, a) })
        .collect();
    let e = |a: u32, w: u32| -> BigRational { if a == 0 { BigRational::one() } else { es[a as usize][w as usize].clone() } };
    let prim = |a: u32, w: u32| -> BigRational { e(a, w) - e(a - 1, w.saturating_sub(2)) };
    let mut out = vec![BigRational::one()];
    for t in 1..=a_max {
        let mut s = BigRational::zero();
        for a in 1..=t {
            let w = 2 * a as i64 - t as i64;
            if w < 0 || w > a as i64 {
                continue;
            }
            let w = w as u32;
            s += if w == a { prim(a, a) } else { prim(a, w) - prim(a, w + 1) };
        }
        out.push(s);
    }
    out
}

/// Φ_t for t ≤ a by evaluating the spherical section on s₂s₁s₂·n(S₀/p^a) for every S₀ mod p^a.
pub fn phi_naive(t: &HalfIntegralForm, p: u64, a: u32) -> Result<Vec<BigRational>> {
    let q = (p as i64).pow(a);
    let w = weyl_s2s1s2();
    let mut accs: Vec<CycloAccumulator> = (0..=2 * a).map(|_| CycloAccumulator::new(q as u64)).collect();
    for l0 in 0..q {
        for m0 in 0..q {
            for k0 in 0..q {
                let g = &w * &Mat4::upper(&rat(l0, q), &rat(m0, q), &rat(k0, q));
                let e = delta_exponent_minors(&g, p)?;
                let phase = (t.n * l0 + t.r * m0 + t.m * k0).rem_euclid(q);
                accs[e as usize].add_root(RootOfUnity::new(phase, q as u64), &BigRational::one());
            }
        }
    }
    accs.into_iter()
        .take(a as usize + 1)
        .map(|acc| acc.finish().to_rational().ok_or_else(|| Error::domain("character sum is not rational")))
        .collect()
}

/// Σ_{t>A} (t+1)·p/(p−1)·ρ^t with ρ = p^{2−s}, bounding the omitted part of Σ Φ_t·x^t.
pub fn unramified_tail(p: u64, s: i64, a_max: u32) -> Result<BigRational> {
    if s <= 2 {
        return Err(Error::Uncertified(format!("the tail diverges at s = {s}")));
    }
    let rho = rat_pow(p, 2 - s);
    let t0 = rat_int(a_max as i64 + 1);
    let one = BigRational::one();
    let geom = num_traits::pow(rho.clone(), a_max as usize + 1) * (&t0 + &one - &t0 * &rho)
        / ((&one - &rho) * (&one - &rho));
    Ok(geom * rat(p as i64, p as i64 - 1))
}

/// |Φ_t| ≤ (t+1)·p/(p−1)·p^{2t}.
pub fn phi_bound(p: u64, t: u32) -> BigRational {
    rat_int(t as i64 + 1) * rat(p as i64, p as i64 - 1) * rat_pow(p, 2 * t as i64)
}

/// The truncated integral Σ_{t≤A} Φ_t·x^t together with its certified tail.
pub fn brute_force_local_integral(
    t: &HalfIntegralForm,
    p: u64,
    chi_at_p: RootOfUnity,
    s: i64,
    window: &TruncationWindow,
) -> Result<OracleEstimate> {
    if t.delta()? == 0 {
        return Err(Error::domain("the local integral needs Δ ≠ 0"));
    }
    let phis = phi_coefficients(t, p, window.a);
    let value = sum_phi_series(&phis, p, chi_at_p, s);
    Ok(OracleEstimate { value, tail: window.tail.clone() })
}

/// Σ_t Φ_t·x^t over the given coefficients, with x = χ_p(p)·p^{−s}.
pub fn sum_phi_series(phis: &[BigRational], p: u64, chi_at_p: RootOfUnity, s: i64) -> Cyclo {
    let x = chi_at_p.to_cyclo().scale(&rat_pow(p, -s));
    let mut value = Cyclo::zero();
    let mut pw = Cyclo::one();
    for c in phis {
        value = &value + &pw.scale(c);
        pw = &pw * &x;
    }
    value
}

/// Smallest A whose tail falls below the target.
pub fn window_for(p: u64, s: i64, target: &BigRational) -> Result<TruncationWindow> {
    for a in 1..=12u32 {
        let tail = unramified_tail(p, s, a)?;
        if &tail < target {
            return Ok(TruncationWindow { a, b: a, tail });
        }
    }
    Err(Error::Uncertified(format!("no window up to depth 12 reaches the target at p = {p}, s = {s}")))
}

impl TruncationWindow {
    pub fn unramified(p: u64, s: i64, a: u32) -> Result<Self> {
        Ok(TruncationWindow { a, b: a, tail: unramified_tail(p, s, a)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfactors::{unramified_series, GoodPlaceInput};

    #[test]
    fn counting_agrees_with_naive_enumeration() {
        for (p, t) in [(3u64, HalfIntegralForm::new(1, 0, 9)), (3, HalfIntegralForm::new(1, 1, 7)), (5, HalfIntegralForm::new(1, 0, 2))] {
            let a = if p == 3 { 2 } else { 1 };
            assert_eq!(phi_naive(&t, p, a).unwrap(), phi_coefficients(&t, p, a)[..=a as usize].to_vec());
        }
    }

    #[test]
    fn series_matches_closed_form() {
        let t = HalfIntegralForm::new(1, 0, 9);
        let input = GoodPlaceInput::from_form(&t, 3, RootOfUnity::one(), 4).unwrap();
        let phis = phi_coefficients(&t, 3, 4);
        assert_eq!(phis, unramified_series(3, input.e_p, input.f_p, input.l, 4));
    }

    #[test]
    fn tail_decays_fast_enough() {
        for p in [3u64, 5] {
            for s in [4i64, 5] {
                for a in 1..8 {
                    let ratio = unramified_tail(p, s, a + 1).unwrap() / unramified_tail(p, s, a).unwrap();
                    assert!(ratio <= rat_pow(p, 3 - s));
                }
            }
        }
    }
}
