//! Exact and fixed-point scalars.
//!
//! [`Cyclo`] is an exact element of a cyclotomic field Q(ζ_n), stored as
//! rational coordinates in the power basis modulo the cyclotomic polynomial.
//! [`Fixed`] and [`Complex`] are binary fixed-point numbers backed by big
//! integers; they carry an explicit number of fractional bits.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u32 = 192;
pub const GUARD_BITS: u32 = 64;
pub const PRECISION_ENV: &str = "EIS_PRECISION_BITS";

/// Target precision of numeric results, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Precision {
    pub bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { bits: DEFAULT_PRECISION_BITS }
    }
}

impl Precision {
    pub fn new(bits: u32) -> Self {
        Precision { bits: bits.max(32) }
    }

    /// Reads `EIS_PRECISION_BITS`, falling back to the default.
    pub fn from_env() -> Self {
        std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u32>().ok())
            .map(Precision::new)
            .unwrap_or_default()
    }

    pub fn working_bits(self) -> u32 {
        self.bits + GUARD_BITS
    }

    /// 2^{-bits} as an exact rational.
    pub fn epsilon(self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::one() << self.bits)
    }

    /// Number of decimal digits that are meaningful at this precision.
    pub fn decimal_digits(self) -> usize {
        (f64::from(self.bits) * std::f64::consts::LOG10_2).floor() as usize
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// p^e for a possibly negative exponent.
pub fn rat_pow(p: u64, e: i64) -> BigRational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

/// Formats a rational as `num/den`, or as an integer when the denominator is one.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num.div_mod_floor(den);
    if (&r * &two).abs() >= den.abs() {
        q + 1
    } else {
        q
    }
}

/// Binary fixed-point real number `mant · 2^{-bits}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    mant: BigInt,
    bits: u32,
}

impl Fixed {
    pub fn zero(bits: u32) -> Self {
        Fixed { mant: BigInt::zero(), bits }
    }

    pub fn one(bits: u32) -> Self {
        Fixed { mant: BigInt::one() << bits, bits }
    }

    pub fn from_int(n: &BigInt, bits: u32) -> Self {
        Fixed { mant: n << bits, bits }
    }

    pub fn from_i64(n: i64, bits: u32) -> Self {
        Fixed::from_int(&BigInt::from(n), bits)
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        Fixed { mant: round_div(&(q.numer() << bits), q.denom()), bits }
    }

    /// Rounded quotient num/den.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32) -> Self {
        Fixed { mant: round_div(&(num << bits), den), bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        Fixed { mant: self.mant.abs(), bits: self.bits }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Fixed { mant: &self.mant * k, bits: self.bits }
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        Fixed { mant: round_div(&self.mant, k), bits: self.bits }
    }

    pub fn mul_rational(&self, q: &BigRational) -> Self {
        Fixed { mant: round_div(&(&self.mant * q.numer()), q.denom()), bits: self.bits }
    }

    /// Quotient; returns `None` on division by zero.
    pub fn checked_div(&self, other: &Fixed) -> Option<Self> {
        if other.mant.is_zero() {
            return None;
        }
        let bits = self.bits;
        Some(Fixed { mant: round_div(&(&self.mant << bits), &other.mant), bits })
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.mant.is_negative() {
            return Err(Error::domain("square root of a negative number"));
        }
        Ok(Fixed { mant: (&self.mant << self.bits).sqrt(), bits: self.bits })
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        let mut acc = Fixed::one(self.bits);
        let mut base = self.clone();
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        if e < 0 {
            Fixed::one(self.bits)
                .checked_div(&acc)
                .ok_or_else(|| Error::domain("negative power of zero"))
        } else {
            Ok(acc)
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mant.clone(), BigInt::one() << self.bits)
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.bits.saturating_sub(60);
        let m = (&self.mant >> shift).to_f64().unwrap_or(f64::NAN);
        m / 2f64.powi((self.bits - shift) as i32)
    }

    /// Re-expresses the number with a different number of fractional bits.
    pub fn with_bits(&self, bits: u32) -> Self {
        if bits >= self.bits {
            Fixed { mant: &self.mant << (bits - self.bits), bits }
        } else {
            let one = BigInt::one() << (self.bits - bits);
            Fixed { mant: round_div(&self.mant, &one), bits }
        }
    }

    /// Decimal expansion with `digits` digits after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scaled = round_div(&(&self.mant * BigInt::from(10).pow(digits as u32)), &(BigInt::one() << self.bits));
        let neg = scaled.is_negative();
        let s = scaled.abs().to_string();
        let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// π to `bits` fractional bits, by Machin's formula.
    pub fn pi(bits: u32) -> Self {
        static CACHE: OnceLock<Mutex<HashMap<u32, BigInt>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(m) = cache.lock().unwrap().get(&bits) {
            return Fixed { mant: m.clone(), bits };
        }
        let work = bits + 32;
        let one = BigInt::one() << work;
        let atan_inv = |x: u64| -> BigInt {
            let x = BigInt::from(x);
            let x2 = &x * &x;
            let mut power = &one / &x;
            let mut sum = BigInt::zero();
            let mut k = 0u64;
            while !power.is_zero() {
                let term = &power / BigInt::from(2 * k + 1);
                if k.is_multiple_of(2) {
                    sum += term;
                } else {
                    sum -= term;
                }
                power /= &x2;
                k += 1;
            }
            sum
        };
        let pi = atan_inv(5) * 16 - atan_inv(239) * 4;
        let mant = round_div(&pi, &(BigInt::one() << 32));
        cache.lock().unwrap().insert(bits, mant.clone());
        Fixed { mant, bits }
    }

    /// (cos 2πq, sin 2πq) for a rational number of turns q.
    pub fn cos_sin_turns(q: &BigRational, bits: u32) -> (Fixed, Fixed) {
        let frac = q - q.floor();
        let quarter = (&frac * BigInt::from(4)).round();
        let rem = &frac - &quarter / BigInt::from(4);
        let quadrant = quarter.to_integer().mod_floor(&BigInt::from(4)).to_u32().unwrap_or(0);
        let work = bits + 16;
        let two_pi = Fixed::pi(work).mul_int(&BigInt::from(2));
        let theta = two_pi.mul_rational(&rem);
        let mut c = Fixed::zero(work);
        let mut s = Fixed::zero(work);
        let mut term = Fixed::one(work);
        let mut k: u64 = 0;
        loop {
            if term.is_zero() {
                break;
            }
            // term = θ^k / k!
            let signed = if (k / 2).is_multiple_of(2) { term.clone() } else { -&term };
            if k.is_multiple_of(2) {
                c = &c + &signed;
            } else {
                s = &s + &signed;
            }
            k += 1;
            term = (&term * &theta).div_int(&BigInt::from(k));
            if k > 4 * u64::from(bits) {
                break;
            }
        }
        let (c, s) = match quadrant {
            0 => (c, s),
            1 => (-&s, c),
            2 => (-&c, -&s),
            _ => (s, -&c),
        };
        (c.with_bits(bits), s.with_bits(bits))
    }
}

macro_rules! fixed_binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&Fixed> for &Fixed {
            type Output = Fixed;
            fn $f(self, o: &Fixed) -> Fixed {
                debug_assert_eq!(self.bits, o.bits);
                let g: fn(&Fixed, &Fixed) -> Fixed = $body;
                g(self, o)
            }
        }
        impl $tr<Fixed> for Fixed {
            type Output = Fixed;
            fn $f(self, o: Fixed) -> Fixed {
                (&self).$f(&o)
            }
        }
    };
}

fixed_binop!(Add, add, |a, b| Fixed { mant: &a.mant + &b.mant, bits: a.bits });
fixed_binop!(Sub, sub, |a, b| Fixed { mant: &a.mant - &b.mant, bits: a.bits });
fixed_binop!(Mul, mul, |a, b| Fixed { mant: (&a.mant * &b.mant) >> a.bits, bits: a.bits });

impl Neg for &Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed { mant: -&self.mant, bits: self.bits }
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        -&self
    }
}

/// Fixed-point complex number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: Fixed,
    pub im: Fixed,
}

impl Complex {
    pub fn zero(bits: u32) -> Self {
        Complex { re: Fixed::zero(bits), im: Fixed::zero(bits) }
    }

    pub fn one(bits: u32) -> Self {
        Complex { re: Fixed::one(bits), im: Fixed::zero(bits) }
    }

    pub fn from_real(re: Fixed) -> Self {
        let bits = re.bits();
        Complex { re, im: Fixed::zero(bits) }
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        Complex::from_real(Fixed::from_rational(q, bits))
    }

    /// e(q) = exp(2πiq).
    pub fn e(q: &BigRational, bits: u32) -> Self {
        let (re, im) = Fixed::cos_sin_turns(q, bits);
        Complex { re, im }
    }

    pub fn i(bits: u32) -> Self {
        Complex { re: Fixed::zero(bits), im: Fixed::one(bits) }
    }

    pub fn bits(&self) -> u32 {
        self.re.bits()
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn abs2(&self) -> Fixed {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn scale(&self, x: &Fixed) -> Self {
        Complex { re: &self.re * x, im: &self.im * x }
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        Complex { re: self.re.mul_rational(q), im: self.im.mul_rational(q) }
    }

    pub fn checked_div(&self, o: &Complex) -> Option<Self> {
        let d = o.abs2();
        let num = self * &o.conj();
        Some(Complex { re: num.re.checked_div(&d)?, im: num.im.checked_div(&d)? })
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        let mut acc = Complex::one(self.bits());
        let mut base = self.clone();
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        if e < 0 {
            Complex::one(self.bits()).checked_div(&acc).ok_or_else(|| Error::domain("negative power of zero"))
        } else {
            Ok(acc)
        }
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        Complex { re: self.re.with_bits(bits), im: self.im.with_bits(bits) }
    }

    /// Upper bound |Δre| + |Δim| for the distance |self - other|.
    pub fn distance_bound(&self, other: &Complex) -> BigRational {
        let dr = (&self.re - &other.re).abs().to_rational();
        let di = (&self.im - &other.im).abs().to_rational();
        dr + di
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, o: &Complex) -> Complex {
        Complex { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, o: &Complex) -> Complex {
        Complex { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, o: &Complex) -> Complex {
        Complex {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -&self.re, im: -&self.im }
    }
}

/// The root of unity e(num/den), kept in lowest terms with 0 ≤ num < den.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let n = num.rem_euclid(den as i64) as u64;
        let g = n.gcd(&den);
        RootOfUnity { num: n / g, den: den / g }
    }

    pub fn one() -> Self {
        RootOfUnity { num: 0, den: 1 }
    }

    pub fn minus_one() -> Self {
        RootOfUnity { num: 1, den: 2 }
    }

    pub fn from_sign(s: i64) -> Self {
        if s < 0 {
            Self::minus_one()
        } else {
            Self::one()
        }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    /// Multiplicative order.
    pub fn order(self) -> u64 {
        self.den
    }

    pub fn is_one(self) -> bool {
        self.num == 0
    }

    /// ±1 as an integer when the root is real.
    pub fn as_sign(self) -> Option<i64> {
        match self.den {
            1 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn mul(self, o: RootOfUnity) -> Self {
        let den = self.den.lcm(&o.den);
        let num = self.num * (den / self.den) + o.num * (den / o.den);
        RootOfUnity::new((num % den) as i64, den)
    }

    pub fn inv(self) -> Self {
        RootOfUnity::new(-(self.num as i64), self.den)
    }

    pub fn pow(self, e: i64) -> Self {
        let m = ((self.num as i128 * e as i128).rem_euclid(self.den as i128)) as i64;
        RootOfUnity::new(m, self.den)
    }

    pub fn turns(self) -> BigRational {
        rat(self.num as i64, self.den as i64)
    }

    pub fn to_cyclo(self) -> Cyclo {
        Cyclo::root(self.num, self.den)
    }

    pub fn to_complex(self, bits: u32) -> Complex {
        Complex::e(&self.turns(), bits)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.den {
            1 => write!(f, "1"),
            2 => write!(f, "-1"),
            4 if self.num == 1 => write!(f, "i"),
            4 => write!(f, "-i"),
            _ => write!(f, "e({}/{})", self.num, self.den),
        }
    }
}

/// Integer coefficients of the n-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&n) {
        return v.clone();
    }
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_polynomial(d);
            poly = exact_divide_monic(&poly, &phi_d);
        }
    }
    let arc = Arc::new(poly);
    cache.lock().unwrap().insert(n, arc.clone());
    arc
}

fn exact_divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    quot
}

/// Reduces an integer polynomial modulo Φ_n in place and truncates it to degree < φ(n).
fn reduce_int(mut dense: Vec<BigInt>, n: u64) -> Vec<BigInt> {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    if dense.len() > deg {
        for top in (deg..dense.len()).rev() {
            let c = std::mem::take(&mut dense[top]);
            if c.is_zero() {
                continue;
            }
            let base = top - deg;
            for (j, &pj) in phi[..deg].iter().enumerate() {
                if pj != 0 {
                    dense[base + j] -= &c * pj;
                }
            }
        }
    }
    dense.resize(deg, BigInt::zero());
    dense
}

/// Splits rational coefficients into integer numerators over a common denominator.
fn to_common_denominator(coeffs: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let mut den = BigInt::one();
    for c in coeffs {
        den = den.lcm(c.denom());
    }
    let nums = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    (nums, den)
}

fn from_common_denominator(nums: Vec<BigInt>, den: &BigInt) -> Vec<BigRational> {
    nums.into_iter().map(|x| BigRational::new(x, den.clone())).collect()
}

/// Exact element of Q(ζ_n), ζ_n = e(1/n).
#[derive(Clone, Debug)]
pub struct Cyclo {
    n: u64,
    coeffs: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo { n: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Cyclo::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Cyclo { n: 1, coeffs: vec![q] }
    }

    pub fn from_int(k: i64) -> Self {
        Cyclo::from_rational(rat_int(k))
    }

    /// ζ_den^num.
    pub fn root(num: u64, den: u64) -> Self {
        let r = RootOfUnity::new(num as i64, den);
        let mut acc = CycloAccumulator::new(r.den());
        acc.add_int(r.num(), &BigInt::one());
        acc.finish()
    }

    pub fn from_root(r: RootOfUnity) -> Self {
        Cyclo::root(r.num(), r.den())
    }

    /// Builds Σ c_j ζ_n^j from dense rational coefficients of any length.
    pub fn from_dense(n: u64, dense: &[BigRational]) -> Self {
        let mut folded = vec![BigRational::zero(); n as usize];
        for (j, c) in dense.iter().enumerate() {
            folded[j % n as usize] += c;
        }
        let (nums, den) = to_common_denominator(&folded);
        Cyclo { n, coeffs: from_common_denominator(reduce_int(nums, n), &den) }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// The same element expressed in Q(ζ_m); requires n | m.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m.is_multiple_of(self.n), "cannot lift Q(zeta_{}) into Q(zeta_{})", self.n, m);
        if m == self.n {
            return self.clone();
        }
        let step = (m / self.n) as usize;
        let (nums, den) = to_common_denominator(&self.coeffs);
        let mut dense = vec![BigInt::zero(); m as usize];
        for (j, c) in nums.into_iter().enumerate() {
            dense[j * step] = c;
        }
        Cyclo { n: m, coeffs: from_common_denominator(reduce_int(dense, m), &den) }
    }

    fn unify(&self, o: &Cyclo) -> (Cyclo, Cyclo) {
        let m = self.n.lcm(&o.n);
        (self.lift(m), o.lift(m))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Cyclo { n: self.n, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn conj(&self) -> Self {
        let n = self.n as usize;
        let mut dense = vec![BigRational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            dense[(n - j) % n] += c;
        }
        Cyclo::from_dense(self.n, &dense)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Cyclo::one();
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, computed as the product of the nontrivial Galois conjugates
    /// divided by the norm.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.to_rational() {
            return Some(Cyclo::from_rational(q.recip()));
        }
        let mut others = Cyclo::one();
        for a in 2..self.n {
            if a.gcd(&self.n) == 1 {
                others = &others * &self.galois(a);
            }
        }
        let norm = (&others * self).to_rational()?;
        Some(others.scale(&norm.recip()))
    }

    /// The Galois automorphism ζ_n ↦ ζ_n^a.
    pub fn galois(&self, a: u64) -> Self {
        let n = self.n as usize;
        let mut dense = vec![BigRational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            dense[(j * a as usize) % n] += c;
        }
        Cyclo::from_dense(self.n, &dense)
    }

    pub fn to_complex(&self, bits: u32) -> Complex {
        let mut acc = Complex::zero(bits);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = Complex::e(&rat(j as i64, self.n as i64), bits);
            acc = &acc + &z.scale_rational(c);
        }
        acc
    }

    /// Exact √q for a rational q, as an element of a cyclotomic field.
    pub fn sqrt_rational(q: &BigRational) -> Result<Self> {
        if q.is_zero() {
            return Ok(Cyclo::zero());
        }
        let negative = q.is_negative();
        let q = q.abs();
        // √(a/b) = √(ab)/b
        let prod = q.numer() * q.denom();
        let prod = prod.to_u64().ok_or(Error::Overflow("sqrt_rational"))?;
        let (square, free) = crate::arith::square_split(prod);
        let mut acc = Cyclo::from_rational(BigRational::new(BigInt::from(square), q.denom().clone()));
        for (p, _) in crate::arith::factorize(free) {
            acc = &acc * &Cyclo::sqrt_prime(p);
        }
        if negative {
            acc = &acc * &Cyclo::root(1, 4);
        }
        Ok(acc)
    }

    /// √p for a prime p, via the quadratic Gauss sum.
    pub fn sqrt_prime(p: u64) -> Self {
        if p == 2 {
            return &Cyclo::root(1, 8) + &Cyclo::root(7, 8);
        }
        let mut acc = CycloAccumulator::new(p);
        for a in 1..p {
            acc.add_int(a, &BigInt::from(crate::arith::legendre(a as i64, p)));
        }
        let g = acc.finish();
        if p % 4 == 1 {
            g
        } else {
            &g * &Cyclo::root(3, 4)
        }
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Cyclo) -> bool {
        let (a, b) = self.unify(o);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclo {}

impl Add<&Cyclo> for &Cyclo {
    type Output = Cyclo;
    fn add(self, o: &Cyclo) -> Cyclo {
        let (a, b) = self.unify(o);
        Cyclo { n: a.n, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }
}

impl Sub<&Cyclo> for &Cyclo {
    type Output = Cyclo;
    fn sub(self, o: &Cyclo) -> Cyclo {
        let (a, b) = self.unify(o);
        Cyclo { n: a.n, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect() }
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo { n: self.n, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul<&Cyclo> for &Cyclo {
    type Output = Cyclo;
    fn mul(self, o: &Cyclo) -> Cyclo {
        if self.is_rational() {
            return o.scale(&self.coeffs[0]);
        }
        if o.is_rational() {
            return self.scale(&o.coeffs[0]);
        }
        let (a, b) = self.unify(o);
        let (na, da) = to_common_denominator(&a.coeffs);
        let (nb, db) = to_common_denominator(&b.coeffs);
        let mut dense = vec![BigInt::zero(); na.len() + nb.len() - 1];
        for (i, x) in na.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in nb.iter().enumerate() {
                if !y.is_zero() {
                    dense[i + j] += x * y;
                }
            }
        }
        let den = da * db;
        Cyclo { n: a.n, coeffs: from_common_denominator(reduce_int(dense, a.n), &den) }
    }
}

macro_rules! cyclo_owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<Cyclo> for Cyclo {
            type Output = Cyclo;
            fn $f(self, o: Cyclo) -> Cyclo {
                (&self).$f(&o)
            }
        }
    };
}

cyclo_owned_ops!(Add, add);
cyclo_owned_ops!(Sub, sub);
cyclo_owned_ops!(Mul, mul);

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{}", format_rational(&q));
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            if j == 0 {
                write!(f, "{}", format_rational(&a))?;
            } else if a.is_one() {
                write!(f, "z{}^{}", self.n, j)?;
            } else {
                write!(f, "{}*z{}^{}", format_rational(&a), self.n, j)?;
            }
        }
        Ok(())
    }
}

/// Accumulates Σ c_j ζ_n^j with integer or rational weights, reducing once at the end.
#[derive(Clone, Debug)]
pub struct CycloAccumulator {
    n: u64,
    dense: Vec<BigRational>,
}

impl CycloAccumulator {
    pub fn new(n: u64) -> Self {
        CycloAccumulator { n, dense: vec![BigRational::zero(); n as usize] }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn add_int(&mut self, j: u64, c: &BigInt) {
        let idx = (j % self.n) as usize;
        self.dense[idx] += BigRational::from_integer(c.clone());
    }

    pub fn add(&mut self, j: u64, c: &BigRational) {
        let idx = (j % self.n) as usize;
        self.dense[idx] += c;
    }

    /// Adds c·r for a root of unity r whose order divides n.
    pub fn add_root(&mut self, r: RootOfUnity, c: &BigRational) {
        assert!(self.n.is_multiple_of(r.den()), "root of order {} does not lie in Q(zeta_{})", r.den(), self.n);
        self.add(r.num() * (self.n / r.den()), c);
    }

    pub fn finish(self) -> Cyclo {
        Cyclo::from_dense(self.n, &self.dense)
    }
}

/// A value that is either exact or a fixed-point numeric approximation.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Cyclo),
    Numeric(Complex),
}

impl Scalar {
    pub fn to_complex(&self, bits: u32) -> Complex {
        match self {
            Scalar::Exact(c) => c.to_complex(bits),
            Scalar::Numeric(z) => z.with_bits(bits),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Cyclo> {
        match self {
            Scalar::Exact(c) => Some(c),
            Scalar::Numeric(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.as_exact().and_then(Cyclo::to_rational)
    }

    /// Short tag describing how the value is represented.
    pub fn mode(&self) -> &'static str {
        match self {
            Scalar::Exact(c) if c.is_rational() => "exact",
            Scalar::Exact(_) => "exact-cyclotomic",
            Scalar::Numeric(_) => "numeric",
        }
    }

    /// Renders the value: `num/den` when rational, the cyclotomic expansion otherwise,
    /// and `(re, im)` with `digits` decimals when numeric.
    pub fn render(&self, digits: usize) -> String {
        match self {
            Scalar::Exact(c) => c.to_string(),
            Scalar::Numeric(z) => format!("({}, {})", z.re.to_decimal(digits), z.im.to_decimal(digits)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let pi = Fixed::pi(200);
        assert_eq!(&pi.to_decimal(30), "3.141592653589793238462643383280");
    }

    #[test]
    fn cos_sin_of_eighth_turn() {
        let (c, s) = Fixed::cos_sin_turns(&rat(1, 8), 128);
        let half = Fixed::from_rational(&rat(1, 2), 128);
        assert!((&(&c * &c) - &half).abs().to_f64() < 1e-35);
        assert!((&c - &s).abs().to_f64() < 1e-35);
        let (c, s) = Fixed::cos_sin_turns(&rat(-5, 12), 128);
        assert!((c.to_f64() + 0.75f64.sqrt()).abs() < 1e-15);
        assert!((s.to_f64() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(105).len() - 1, 48);
    }

    #[test]
    fn roots_multiply() {
        let a = Cyclo::root(1, 3);
        let b = Cyclo::root(1, 4);
        assert_eq!(&a * &b, Cyclo::root(7, 12));
        assert_eq!(Cyclo::root(1, 4).pow(2), Cyclo::from_int(-1));
        let s = &(&Cyclo::one() + &Cyclo::root(1, 3)) + &Cyclo::root(2, 3);
        assert!(s.is_zero());
    }

    #[test]
    fn square_roots_are_exact() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let r = Cyclo::sqrt_prime(p);
            assert_eq!(&r * &r, Cyclo::from_int(p as i64), "p = {p}");
            assert!(r.to_complex(64).re.to_f64() > 0.0);
        }
        let r = Cyclo::sqrt_rational(&rat(-12, 25)).unwrap();
        assert_eq!(&r * &r, Cyclo::from_rational(rat(-12, 25)));
    }

    #[test]
    fn inverse() {
        let x = &Cyclo::root(1, 5) + &Cyclo::from_int(2);
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, Cyclo::one());
    }

    #[test]
    fn decimal_rendering() {
        let x = Fixed::from_rational(&rat(-1, 8), 64);
        assert_eq!(x.to_decimal(4), "-0.1250");
        assert_eq!(Fixed::from_i64(240, 64).to_decimal(0), "240");
    }
}
