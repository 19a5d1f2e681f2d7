//! Elementary arithmetic: valuations, factorization, Kronecker symbols,
//! fundamental discriminants, level splittings and twisted divisor sums.
//!
//! Integer inputs are machine words; every intermediate product that could
//! leave the word range is either checked or carried out in big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::scalar::Cyclo;

/// The exact exponent of a prime in a nonzero rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeValuation {
    pub p: u64,
    pub v: i64,
}

/// A nonzero discriminant written as D·f² with D fundamental.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscriminantSplit {
    pub d: i64,
    pub f: u64,
}

/// r = r_N · r_N̂ with r_N supported on the primes of N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelSplit {
    pub r_n: u64,
    pub r_nhat: i64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse of a modulo m, if it exists.
pub fn inv_mod(a: i64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let a = a.rem_euclid(m as i64);
    let g = Integer::extended_gcd(&(a as i128), &(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Residue of a p-integral rational modulo m (m coprime to the denominator).
pub fn rational_mod(x: &BigRational, m: u64) -> Option<u64> {
    let mb = BigInt::from(m);
    let num = x.numer().mod_floor(&mb).to_u64()?;
    let den = x.denom().mod_floor(&mb).to_i64()?;
    Some(mul_mod(num, inv_mod(den, m)?, m))
}

/// Prime factorization by trial division, primes in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Writes n = a²·s with s squarefree, returning (a, s).
pub fn square_split(n: u64) -> (u64, u64) {
    let mut a = 1u64;
    let mut s = 1u64;
    for (p, e) in factorize(n) {
        a *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p;
        }
    }
    (a, s)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation_int(x: &BigInt, p: u64) -> Result<u32> {
    if x.is_zero() {
        return Err(Error::domain("valuation of zero"));
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return Ok(v);
        }
        y = q;
        v += 1;
    }
}

pub fn valuation_i64(x: i64, p: u64) -> Result<u32> {
    valuation_int(&BigInt::from(x), p)
}

/// Valuation of an integer, with `None` standing for +∞ at zero.
pub fn val_or_inf(x: i64, p: u64) -> Option<u32> {
    valuation_i64(x, p).ok()
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(x: &BigRational, p: u64) -> Result<PrimeValuation> {
    if x.is_zero() {
        return Err(Error::domain("valuation of zero"));
    }
    let v = valuation_int(x.numer(), p)? as i64 - valuation_int(x.denom(), p)? as i64;
    Ok(PrimeValuation { p, v })
}

/// Unit part x·p^{-v(x)}.
pub fn unit_part(x: &BigRational, p: u64) -> Result<BigRational> {
    let v = valuation(x, p)?.v;
    Ok(x * crate::scalar::rat_pow(p, -v))
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: i64, p: u64) -> i64 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (d/n) for arbitrary integers.
pub fn kronecker(d: i64, n: i64) -> i64 {
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1;
    if n < 0 && d < 0 {
        result = -1;
    }
    for (p, e) in factorize(n.unsigned_abs()) {
        let s = if p == 2 {
            if d % 2 == 0 {
                0
            } else {
                match d.rem_euclid(8) {
                    1 | 7 => 1,
                    _ => -1,
                }
            }
        } else {
            legendre(d, p)
        };
        if s == 0 {
            return 0;
        }
        if s == -1 && e % 2 == 1 {
            result = -result;
        }
    }
    result
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    let squarefree = |x: u64| factorize(x).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let q = d / 4;
            matches!(q.rem_euclid(4), 2 | 3) && squarefree(q.unsigned_abs())
        }
        _ => false,
    }
}

/// Writes M = D·f² with D a fundamental discriminant and f > 0.
pub fn fundamental_discriminant(m: i64) -> Result<DiscriminantSplit> {
    if m == 0 {
        return Err(Error::domain("fundamental discriminant of zero"));
    }
    if !matches!(m.rem_euclid(4), 0 | 1) {
        return Err(Error::domain(format!("{m} is not congruent to 0 or 1 mod 4")));
    }
    let (a, s) = square_split(m.unsigned_abs());
    let core = if m < 0 { -(s as i64) } else { s as i64 };
    let (d, f) = if core.rem_euclid(4) == 1 {
        (core, a)
    } else {
        if a % 2 != 0 {
            return Err(Error::domain(format!("{m} has no fundamental discriminant")));
        }
        (4 * core, a / 2)
    };
    debug_assert_eq!(d as i128 * (f as i128).pow(2), m as i128);
    Ok(DiscriminantSplit { d, f })
}

/// r = r_N·r_N̂ with r_N the part of r supported on primes dividing N.
pub fn split_by_level(r: i64, level: u64) -> Result<LevelSplit> {
    if r == 0 {
        return Err(Error::domain("split_by_level of zero"));
    }
    let mut r_n = 1u64;
    let mut rest = r.unsigned_abs();
    for p in prime_divisors(level) {
        while rest.is_multiple_of(p) {
            rest /= p;
            r_n *= p;
        }
    }
    let r_nhat = if r < 0 { -(rest as i64) } else { rest as i64 };
    Ok(LevelSplit { r_n, r_nhat })
}

/// σ_ℓ(a) = Σ_{d|a} d^ℓ.
pub fn sigma(a: u64, l: u32) -> BigInt {
    divisors(a).into_iter().map(|d| BigInt::from(d).pow(l)).sum()
}

/// σ_{ℓ,η}(a) = Σ_{d|a} η^{-1}(d) d^ℓ, with η^{-1}(d) = 0 for d not coprime to the modulus.
pub fn divisor_sum(a: i64, l: i64, eta: &DirichletCharacter) -> Result<Cyclo> {
    if a == 0 {
        return Err(Error::domain("divisor sum of zero"));
    }
    let mut acc = Cyclo::zero();
    for d in divisors(a.unsigned_abs()) {
        if let Some(val) = eta.eval(d as i64) {
            let w = crate::scalar::rat_pow(d, l);
            acc = &acc + &val.inv().to_cyclo().scale(&w);
        }
    }
    Ok(acc)
}

/// gcd of the three entries of a nonzero form.
pub fn content(n: i64, r: i64, m: i64) -> Result<u64> {
    let g = n.unsigned_abs().gcd(&r.unsigned_abs()).gcd(&m.unsigned_abs());
    if g == 0 {
        Err(Error::domain("content of the zero form"))
    } else {
        Ok(g)
    }
}

/// n! as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Smallest primitive root modulo p² for an odd prime p; it generates (Z/p^e)^× for every e.
pub fn primitive_root_p2(p: u64) -> u64 {
    let phi = p * (p - 1);
    let q = p * p;
    let primes = prime_divisors(phi);
    (2..q)
        .find(|&g| g % p != 0 && primes.iter().all(|&l| pow_mod(g, phi / l, q) != 1))
        .expect("a primitive root exists modulo p^2")
}

/// Chinese remainder for pairwise coprime moduli.
pub fn crt(residues: &[(u64, u64)]) -> u64 {
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for &(r, q) in residues {
        let q128 = q as u128;
        let inv = inv_mod((m % q128) as i64, q).expect("moduli are coprime") as u128;
        let diff = ((r as u128 + q128 - (x % q128)) % q128) * inv % q128;
        x += m * diff;
        m *= q128;
    }
    (x % m) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&rat(12, 1), 2).unwrap().v, 2);
        assert_eq!(valuation(&rat(1, 9), 3).unwrap().v, -2);
        assert_eq!(valuation(&rat(5, 1), 3).unwrap().v, 0);
        assert!(valuation(&rat(0, 1), 3).is_err());
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-4, 5), 1);
        for n in 1..30 {
            assert_eq!(kronecker(1, n), 1);
        }
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(8, 3), -1);
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(fundamental_discriminant(-4).unwrap(), DiscriminantSplit { d: -4, f: 1 });
        assert_eq!(fundamental_discriminant(5).unwrap(), DiscriminantSplit { d: 5, f: 1 });
        assert_eq!(fundamental_discriminant(-63).unwrap(), DiscriminantSplit { d: -7, f: 3 });
        assert_eq!(fundamental_discriminant(-16).unwrap(), DiscriminantSplit { d: -4, f: 2 });
        assert_eq!(fundamental_discriminant(-32).unwrap(), DiscriminantSplit { d: -8, f: 2 });
        assert_eq!(fundamental_discriminant(-12).unwrap(), DiscriminantSplit { d: -3, f: 2 });
        assert!(fundamental_discriminant(-5).is_err());
        assert!(fundamental_discriminant(6).is_err());
    }

    #[test]
    fn level_split_examples() {
        assert_eq!(split_by_level(12, 2).unwrap(), LevelSplit { r_n: 4, r_nhat: 3 });
        assert_eq!(split_by_level(-15, 3).unwrap(), LevelSplit { r_n: 3, r_nhat: -5 });
        assert_eq!(split_by_level(7, 4).unwrap(), LevelSplit { r_n: 1, r_nhat: 7 });
    }

    #[test]
    fn divisor_sum_examples() {
        let triv = DirichletCharacter::trivial(1);
        assert_eq!(divisor_sum(6, 3, &triv).unwrap(), Cyclo::from_int(252));
        let chi4 = DirichletCharacter::from_label("4:3").unwrap();
        assert_eq!(divisor_sum(1, 5, &chi4).unwrap(), Cyclo::one());
        assert_eq!(divisor_sum(4, 1, &chi4).unwrap(), Cyclo::one());
    }

    #[test]
    fn content_examples() {
        assert_eq!(content(2, 4, 6).unwrap(), 2);
        assert_eq!(content(1, 0, 9).unwrap(), 1);
        assert!(content(0, 0, 0).is_err());
    }

    #[test]
    fn primality_and_roots() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert_eq!(primitive_root_p2(3), 2);
        assert_eq!(primitive_root_p2(5), 2);
        assert_eq!(primitive_root_p2(7), 3);
        assert_eq!(crt(&[(2, 3), (3, 4)]), 11);
    }
}
