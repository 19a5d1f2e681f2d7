//! Bernoulli numbers, ζ(k) and Dirichlet L-values at integers k ≥ 2.
//!
//! Even zeta values are exact rational multiples of π^k. Everything else goes
//! through the Hurwitz zeta function, evaluated by Euler–Maclaurin summation
//! with a remainder bounded by the first omitted correction term.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{binomial, factorial};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::scalar::{rat, rat_int, Complex, Cyclo, CycloAccumulator, Fixed, Precision, RootOfUnity};

/// B_k with the convention B_1 = −1/2.
pub fn bernoulli(k: u32) -> BigRational {
    static MEMO: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(vec![BigRational::one()]));
    let mut table = memo.lock().unwrap();
    while table.len() <= k as usize {
        let n = table.len() as u64;
        let mut acc = BigRational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += BigRational::from_integer(binomial(n + 1, j as u64)) * b;
        }
        table.push(-acc / BigRational::from_integer(BigInt::from(n + 1)));
    }
    table[k as usize].clone()
}

/// The Bernoulli polynomial B_n(x) = Σ_j C(n, j) B_j x^{n−j}.
pub fn bernoulli_poly(n: u32, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut xp = BigRational::one();
    for j in (0..=n).rev() {
        acc += BigRational::from_integer(binomial(n as u64, j as u64)) * bernoulli(j) * &xp;
        xp *= x;
    }
    acc
}

/// B_{n,χ} = f^{n−1} Σ_{a=1}^{f} χ(a) B_n(a/f) for a character χ of modulus f.
pub fn generalized_bernoulli(n: u32, chi: &DirichletCharacter) -> Cyclo {
    let f = chi.modulus();
    let mut acc = CycloAccumulator::new(chi.order());
    let scale = BigRational::from_integer(BigInt::from(f).pow(n.saturating_sub(1)));
    let scale = if n == 0 { BigRational::new(BigInt::one(), BigInt::from(f)) } else { scale };
    for a in 1..=f {
        if let Some(v) = chi.eval(a as i64) {
            acc.add_root(v, &(bernoulli_poly(n, &rat(a as i64, f as i64)) * &scale));
        }
    }
    acc.finish()
}

/// ζ(k)/π^k for even k ≥ 2, i.e. (−1)^{k/2+1} B_k 2^{k−1}/k!.
pub fn zeta_even_over_pi_power(k: u32) -> Result<BigRational> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::domain(format!("ζ({k}) is not an even zeta value")));
    }
    let sign = if (k / 2) % 2 == 1 { 1 } else { -1 };
    let two = BigRational::from_integer(BigInt::from(2).pow(k - 1));
    Ok(bernoulli(k) * two * rat_int(sign) / BigRational::from_integer(factorial(k as u64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LValueMode {
    /// value = rational · π^k
    ExactPiPower,
    Numeric,
}

/// A special value L(k, ψ).
#[derive(Debug, Clone, PartialEq)]
pub struct LValue {
    pub k: u32,
    pub character: String,
    pub mode: LValueMode,
    /// (q, j) with value q·π^j when the mode is exact.
    pub exact: Option<(BigRational, u32)>,
    pub numeric: Complex,
}

/// ζ(k) for k ≥ 2.
pub fn zeta(k: u32, prec: Precision) -> Result<LValue> {
    if k < 2 {
        return Err(Error::domain(format!("ζ({k}) is outside k ≥ 2")));
    }
    let bits = prec.working_bits();
    if k.is_multiple_of(2) {
        let q = zeta_even_over_pi_power(k)?;
        let numeric = Complex::from_real(Fixed::pi(bits).powi(k as i64)?.mul_rational(&q));
        return Ok(LValue { k, character: "1:1".into(), mode: LValueMode::ExactPiPower, exact: Some((q, k)), numeric });
    }
    let v = hurwitz_zeta(k, &BigRational::one(), bits)?;
    Ok(LValue { k, character: "1:1".into(), mode: LValueMode::Numeric, exact: None, numeric: Complex::from_real(v) })
}

/// Σ_{n=1}^{terms} n^{−k} together with the bound terms^{1−k}/(k−1) on the omitted tail.
pub fn zeta_partial_sum(k: u32, terms: u64, bits: u32) -> Result<(Fixed, BigRational)> {
    if k < 2 || terms == 0 {
        return Err(Error::domain("partial zeta sums need k ≥ 2 and at least one term"));
    }
    let mut acc = Fixed::zero(bits);
    for n in 1..=terms {
        acc = &acc + &Fixed::from_ratio(&BigInt::one(), &BigInt::from(n).pow(k), bits);
    }
    let tail = BigRational::new(BigInt::one(), BigInt::from(terms).pow(k - 1) * BigInt::from(k - 1));
    Ok((acc, tail))
}

/// Euler–Maclaurin coefficient B_{2j}/(2j)! · s(s+1)…(s+2j−2), for j ≥ 1.
fn em_coefficient(s: u32, j: usize) -> BigRational {
    static MEMO: OnceLock<Mutex<HashMap<u32, Vec<BigRational>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = memo.lock().unwrap().get(&s).and_then(|v| v.get(j - 1)) {
        return c.clone();
    }
    let mut guard = memo.lock().unwrap();
    let list = guard.entry(s).or_default();
    while list.len() < j {
        let jj = list.len() as u64 + 1;
        let mut rising = BigInt::one();
        for t in 0..(2 * jj - 1) {
            rising *= BigInt::from(u64::from(s) + t);
        }
        let c = bernoulli(2 * jj as u32) * BigRational::from_integer(rising) / BigRational::from_integer(factorial(2 * jj));
        list.push(c);
    }
    list[j - 1].clone()
}

/// Hurwitz ζ(s, a) = Σ_{n≥0} (n+a)^{−s} for integer s ≥ 2 and rational 0 < a ≤ 1.
pub fn hurwitz_zeta(s: u32, a: &BigRational, bits: u32) -> Result<Fixed> {
    if s < 2 {
        return Err(Error::domain("Hurwitz zeta needs s ≥ 2"));
    }
    if !a.is_positive() || a > &BigRational::one() {
        return Err(Error::domain("Hurwitz zeta needs 0 < a ≤ 1"));
    }
    let work = bits + 32;
    let (b, c) = (a.numer().clone(), a.denom().clone());
    let m_terms = u64::from(bits / 3 + 10);
    let mut acc = Fixed::zero(work);
    let cs = c.pow(s);
    for n in 0..m_terms {
        let base = BigInt::from(n) * &c + &b;
        acc = &acc + &Fixed::from_ratio(&cs, &base.pow(s), work);
    }
    // x = M + a = (Mc + b)/c
    let x = BigRational::new(BigInt::from(m_terms) * &c + &b, c.clone());
    let x_inv = x.recip();
    let x_pow = |e: u32| -> BigRational {
        let num = x_inv.numer().pow(e);
        let den = x_inv.denom().pow(e);
        BigRational::new(num, den)
    };
    let head = x_pow(s - 1) / rat_int(i64::from(s) - 1) + x_pow(s) / rat_int(2);
    acc = &acc + &Fixed::from_rational(&head, work);
    let target = BigRational::new(BigInt::one(), BigInt::one() << (bits + 8));
    let max_terms = (m_terms as usize) * 3;
    let x_inv2 = &x_inv * &x_inv;
    let mut power = x_pow(s + 1);
    for j in 1..=max_terms {
        let term = em_coefficient(s, j) * &power;
        if term.abs() < target {
            return Ok(acc.with_bits(bits));
        }
        acc = &acc + &Fixed::from_rational(&term, work);
        power *= &x_inv2;
    }
    Err(Error::Uncertified(format!("Euler–Maclaurin did not converge for ζ({s}, {a})")))
}

fn l_cache() -> &'static Mutex<HashMap<(u32, String, u32), Complex>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, String, u32), Complex>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// L(k, ψ) for a primitive character, by the Hurwitz decomposition.
fn primitive_l(k: u32, psi: &DirichletCharacter, bits: u32) -> Result<Complex> {
    let key = (k, psi.label(), bits);
    if let Some(v) = l_cache().lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let c = psi.modulus();
    let ord = psi.order();
    let mut buckets: Vec<Fixed> = vec![Fixed::zero(bits); ord as usize];
    for a in 1..=c {
        if let Some(v) = psi.eval(a as i64) {
            let idx = (v.num() * (ord / v.den())) as usize;
            let h = hurwitz_zeta(k, &rat(a as i64, c as i64), bits)?;
            buckets[idx] = &buckets[idx] + &h;
        }
    }
    let mut acc = Complex::zero(bits);
    for (j, s) in buckets.iter().enumerate() {
        if !s.is_zero() {
            acc = &acc + &RootOfUnity::new(j as i64, ord).to_complex(bits).scale(s);
        }
    }
    let scale = BigRational::new(BigInt::one(), BigInt::from(c).pow(k));
    let out = acc.scale_rational(&scale);
    l_cache().lock().unwrap().insert(key, out.clone());
    Ok(out)
}

/// L(k, ψ) for a possibly imprimitive character: the primitive value times the
/// Euler factors (1 − ψ_prim(p) p^{−k}) at the primes lost from the modulus.
pub fn dirichlet_l(k: u32, psi: &DirichletCharacter, prec: Precision) -> Result<LValue> {
    if k < 2 {
        return Err(Error::domain(format!("L({k}, ψ) is outside k ≥ 2")));
    }
    let bits = prec.working_bits();
    let (core, lost) = psi.primitive_core();
    if core.modulus() == 1 && k.is_multiple_of(2) {
        let mut q = zeta_even_over_pi_power(k)?;
        for p in &lost {
            q *= BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(*p).pow(k));
        }
        let numeric = Complex::from_real(Fixed::pi(bits).powi(k as i64)?.mul_rational(&q));
        return Ok(LValue { k, character: psi.label(), mode: LValueMode::ExactPiPower, exact: Some((q, k)), numeric });
    }
    let mut value = primitive_l(k, &core, bits)?;
    for p in lost {
        let v = core.eval(p as i64).expect("lost primes do not divide the conductor");
        let factor = &Complex::one(bits) - &v.to_complex(bits).scale_rational(&BigRational::new(BigInt::one(), BigInt::from(p).pow(k)));
        value = &value * &factor;
    }
    Ok(LValue { k, character: psi.label(), mode: LValueMode::Numeric, exact: None, numeric: value })
}

/// The least common multiple of the denominators of B_0, …, B_n.
pub fn bernoulli_denominator_lcm(n: u32) -> BigInt {
    (0..=n).fold(BigInt::one(), |acc, j| acc.lcm(bernoulli(j).denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli(0), rat(1, 1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), rat(0, 1));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn even_zeta_values() {
        assert_eq!(zeta_even_over_pi_power(2).unwrap(), rat(1, 6));
        assert_eq!(zeta_even_over_pi_power(4).unwrap(), rat(1, 90));
        assert_eq!(zeta_even_over_pi_power(6).unwrap(), rat(1, 945));
    }

    #[test]
    fn hurwitz_matches_exact_even_values() {
        let prec = Precision::new(160);
        for k in (2..=20).step_by(2) {
            let exact = zeta(k, prec).unwrap().numeric.re;
            let h = hurwitz_zeta(k, &rat(1, 1), prec.working_bits()).unwrap();
            let err = (&exact - &h).abs().to_rational();
            assert!(err < prec.epsilon(), "k = {k}");
        }
    }

    #[test]
    fn catalan_constant() {
        let chi = DirichletCharacter::from_label("4:3").unwrap();
        let l = dirichlet_l(2, &chi, Precision::new(128)).unwrap();
        assert!(l.numeric.re.to_decimal(30).starts_with("0.915965594177219015054603514932"));
        assert!(l.numeric.im.abs().to_f64() < 1e-35);
    }

    #[test]
    fn imprimitive_euler_factor() {
        let prec = Precision::new(128);
        let t2 = DirichletCharacter::trivial(2);
        for k in [3u32, 4, 5] {
            let l = dirichlet_l(k, &t2, prec).unwrap().numeric;
            let z = zeta(k, prec).unwrap().numeric.scale_rational(&(rat(1, 1) - rat(1, 1 << k)));
            assert!(l.distance_bound(&z) < prec.epsilon(), "k = {k}");
        }
    }

    #[test]
    fn partial_sum_tail_bound_holds() {
        let bits = 128;
        let z3 = hurwitz_zeta(3, &rat(1, 1), bits).unwrap();
        for terms in [10u64, 100, 1000] {
            let (s, tail) = zeta_partial_sum(3, terms, bits).unwrap();
            let gap = (&z3 - &s).to_rational();
            assert!(gap.is_positive() && gap < tail, "terms = {terms}");
        }
    }

    #[test]
    fn generalized_bernoulli_of_minus_four() {
        let chi = DirichletCharacter::kronecker(-4).unwrap();
        assert_eq!(generalized_bernoulli(1, &chi).to_rational().unwrap(), rat(-1, 2));
        let chi = DirichletCharacter::kronecker(-3).unwrap();
        assert_eq!(generalized_bernoulli(1, &chi).to_rational().unwrap(), rat(-1, 3));
        assert_eq!(generalized_bernoulli(3, &chi).to_rational().unwrap(), rat(2, 3));
    }
}
