//! Closed-form local quantities: the unramified local integral, the multiplicative
//! factor H̃, the ramified factor with its K table, ε-factors, elliptic-curve point
//! counts, and the volumes of the sets R(i, j) together with their generating series.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{divisors, kronecker, legendre, moebius, val_or_inf, valuation};
use crate::characters::{DirichletCharacter, LocalCharacterData};
use crate::error::{Error, Result};
use crate::form::HalfIntegralForm;
use crate::scalar::{rat, rat_int, rat_pow, Cyclo, CycloAccumulator, RootOfUnity};
use crate::series::Series2;

/// H̃_{D,s,η}(e, f) for e | f, with f coprime to the modulus of η.
pub fn h_tilde(d: i64, s: i64, eta: &DirichletCharacter, e: u64, f: u64) -> Result<Cyclo> {
    if e == 0 || f == 0 || !f.is_multiple_of(e) {
        return Err(Error::domain(format!("H̃ needs e | f with e, f ≥ 1, got e = {e}, f = {f}")));
    }
    if f.gcd(&eta.modulus()) != 1 {
        return Err(Error::domain(format!("H̃ needs f = {f} coprime to {}", eta.modulus())));
    }
    let inv = |x: u64| eta.eval(x as i64).expect("coprime to the modulus").inv();
    let mut acc = CycloAccumulator::new(eta.order());
    for dd in divisors(e) {
        for g in divisors(f / dd) {
            let mu = moebius(g) * kronecker(d, g as i64);
            if mu == 0 {
                continue;
            }
            for h in divisors(f / (dd * g)) {
                let root = inv(dd).mul(inv(g)).mul(inv(h).pow(2));
                let w = rat_pow(dd, s - 1) * rat_pow(g, s - 2) * rat_pow(h, 2 * s - 3) * rat_int(mu);
                acc.add_root(root, &w);
            }
        }
    }
    Ok(acc.finish())
}

/// Data at a prime p with n_p = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodPlaceInput {
    pub p: u64,
    /// χ_p(p).
    pub chi_at_p: RootOfUnity,
    /// χ_D(p) ∈ {−1, 0, 1}.
    pub l: i64,
    pub e_p: u32,
    pub f_p: u32,
    pub s: i64,
}

impl GoodPlaceInput {
    pub fn new(p: u64, chi_at_p: RootOfUnity, l: i64, e_p: u32, f_p: u32, s: i64) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if !(-1..=1).contains(&l) {
            return Err(Error::domain(format!("χ_D(p) must lie in {{-1, 0, 1}}, got {l}")));
        }
        if e_p > f_p {
            return Err(Error::domain(format!("need e_p ≤ f_p, got {e_p} > {f_p}")));
        }
        Ok(GoodPlaceInput { p, chi_at_p, l, e_p, f_p, s })
    }

    /// Reads (e_p, f_p, χ_D(p)) off a form with Δ ≠ 0.
    pub fn from_form(t: &HalfIntegralForm, p: u64, chi_at_p: RootOfUnity, s: i64) -> Result<Self> {
        let delta = t.delta()?;
        if delta == 0 {
            return Err(Error::domain("the unramified local integral needs Δ ≠ 0"));
        }
        let split = t.discriminant_split()?;
        let e_p = [t.n, t.r, t.m].iter().filter_map(|&x| val_or_inf(x, p)).min().expect("nonzero form");
        let f_p = val_or_inf(split.f as i64, p).expect("f > 0");
        let l = kronecker(split.d, p as i64);
        GoodPlaceInput::new(p, chi_at_p, l, e_p, f_p, s)
    }
}

/// The numerator polynomial N(x) with I = N(x)/(1 − L·p·x) and x = χ_p(p)·p^{−s}.
pub fn unramified_numerator(p: u64, e_p: u32, f_p: u32, l: i64) -> Vec<BigRational> {
    let (e, f) = (e_p as i64, f_p as i64);
    let mut inner = vec![BigRational::zero(); (2 * f + 1) as usize];
    for i in 0..=e {
        for j in 0..=(f - i) {
            inner[(2 * f - i - 2 * j) as usize] += rat_pow(p, -i - 3 * j);
        }
        for j in 0..(f - i) {
            inner[(2 * f - i - 1 - 2 * j) as usize] -= rat_pow(p, -i - 3 * j - 2) * rat_int(l);
        }
    }
    let scale = rat_pow(p, 3 * f);
    let mut poly: Vec<BigRational> = inner.into_iter().map(|c| c * &scale).collect();
    let p2 = rat_int(p * p);
    for factor in [vec![BigRational::one(), -BigRational::one()], vec![BigRational::one(), BigRational::zero(), -p2]] {
        let mut out = vec![BigRational::zero(); poly.len() + factor.len() - 1];
        for (a, ca) in poly.iter().enumerate() {
            for (b, cb) in factor.iter().enumerate() {
                out[a + b] += ca * cb;
            }
        }
        poly = out;
    }
    poly
}

/// Coefficients of x^0..=x^order of the unramified local integral as a power series in x.
pub fn unramified_series(p: u64, e_p: u32, f_p: u32, l: i64, order: usize) -> Vec<BigRational> {
    let num = unramified_numerator(p, e_p, f_p, l);
    let lp = rat_int(l * p as i64);
    let mut out = vec![BigRational::zero(); order + 1];
    for (t, slot) in out.iter_mut().enumerate() {
        let mut pw = BigRational::one();
        for k in 0..=t {
            if let Some(c) = num.get(t - k) {
                *slot += c * &pw;
            }
            pw *= &lp;
        }
    }
    out
}

/// The unramified local integral I_p(T) at an integer s.
pub fn unramified_local_factor(input: &GoodPlaceInput) -> Result<Cyclo> {
    let x = input.chi_at_p.to_cyclo().scale(&rat_pow(input.p, -input.s));
    let num = unramified_numerator(input.p, input.e_p, input.f_p, input.l);
    let mut value = Cyclo::zero();
    let mut pw = Cyclo::one();
    for c in &num {
        value = &value + &pw.scale(c);
        pw = &pw * &x;
    }
    let den = &Cyclo::one() - &x.scale(&rat_int(input.l * input.p as i64));
    let den_inv = den.inv().ok_or_else(|| Error::domain("pole of the unramified local factor"))?;
    Ok(&value * &den_inv)
}

fn ap_cache() -> &'static Mutex<HashMap<(i64, u64), i64>> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, u64), i64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// a_p = p − #{(x, y) ∈ F_p² : y² = x³ − D·x}, as −Σ_x (x³ − D·x / p).
pub fn curve_count_ap(d: i64, p: u64) -> i64 {
    if let Some(&v) = ap_cache().lock().expect("a_p cache").get(&(d, p)) {
        return v;
    }
    let pi = p as i64;
    let value = -(0..pi)
        .map(|x| {
            let x3 = (x * x % pi) * x % pi;
            legendre(x3 - d.rem_euclid(pi) * x % pi, p)
        })
        .sum::<i64>();
    ap_cache().lock().expect("a_p cache").insert((d, p), value);
    value
}

fn affine_count(p: u64, rhs: impl Fn(i64) -> i64) -> i64 {
    let pi = p as i64;
    let mut count = 0;
    for x in 0..pi {
        let target = rhs(x).rem_euclid(pi);
        count += (0..pi).filter(|y| y * y % pi == target).count() as i64;
    }
    count
}

/// a_p by enumerating all pairs (x, y) ∈ F_p².
pub fn curve_count_ap_naive(d: i64, p: u64) -> i64 {
    let pi = p as i64;
    let d = d.rem_euclid(pi);
    p as i64 - affine_count(p, |x| (x * x % pi * x - d * x) % pi)
}

/// ã_p attached to (r, f, D): a point count when v(f) = v(r), and χ(r/f) when v(f) > v(r).
pub fn curve_count_ap_tilde(r: i64, f: i64, d: i64, chi: &LocalCharacterData) -> Result<i64> {
    let p = chi.p;
    let ratio = rat(r, f);
    let v = valuation(&ratio, p)?.v;
    if v == 0 {
        let pi = p as i64;
        let b = crate::arith::rational_mod(&ratio, p).expect("unit") as i64;
        let d = d.rem_euclid(pi);
        let count = affine_count(p, |x| x * (((x - b) * (x - b) - d) % pi) % pi);
        Ok(pi - count)
    } else if v < 0 {
        chi.chi(&ratio)?.as_sign().ok_or_else(|| Error::domain("ã_p needs a quadratic character"))
    } else {
        Err(Error::domain("ã_p needs v(f) ≥ v(r)"))
    }
}

/// Data at a prime p dividing the conductor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamifiedPlaceInput {
    pub chi: LocalCharacterData,
    pub t: HalfIntegralForm,
    pub s: i64,
}

impl RamifiedPlaceInput {
    pub fn new(chi: LocalCharacterData, t: HalfIntegralForm, s: i64) -> Result<Self> {
        if chi.n_p == 0 {
            return Err(Error::domain(format!("χ_p is unramified at p = {}", chi.p)));
        }
        Ok(RamifiedPlaceInput { chi, t, s })
    }

    pub fn p(&self) -> u64 {
        self.chi.p
    }
}

/// The row of the K table selected by the valuations of (n, r, m).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KRow {
    /// r = 0 and χ(−1) = −1.
    R0Odd,
    /// r = 0, χ(−1) = 1, v(n) = v(m) − 2n_p.
    R0Equal,
    /// r = 0, χ(−1) = 1, v(n) ≠ v(m) − 2n_p.
    R0Unequal,
    A,
    B,
    C,
    AB,
    AC,
    BC,
    /// All three equal with p | D.
    ABCRamified,
    /// All three equal, p ∤ D, v(f) = v(r).
    ABCEqual,
    /// All three equal, p ∤ D, v(f) > v(r).
    ABCGreater,
}

impl KRow {
    pub const ALL: [KRow; 12] = [
        KRow::R0Odd,
        KRow::R0Equal,
        KRow::R0Unequal,
        KRow::A,
        KRow::B,
        KRow::C,
        KRow::AB,
        KRow::AC,
        KRow::BC,
        KRow::ABCRamified,
        KRow::ABCEqual,
        KRow::ABCGreater,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KRow::R0Odd => "r0-odd",
            KRow::R0Equal => "r0-equal",
            KRow::R0Unequal => "r0-unequal",
            KRow::A => "a",
            KRow::B => "b",
            KRow::C => "c",
            KRow::AB => "ab",
            KRow::AC => "ac",
            KRow::BC => "bc",
            KRow::ABCRamified => "abc-ramified",
            KRow::ABCEqual => "abc-equal",
            KRow::ABCGreater => "abc-greater",
        }
    }
}

impl fmt::Display for KRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a value of K was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KProvenance {
    ClosedForm(KRow),
    NeedsOracle,
    Oracle,
}

impl fmt::Display for KProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KProvenance::ClosedForm(row) => write!(f, "closed-form:{row}"),
            KProvenance::NeedsOracle => f.write_str("needs-oracle"),
            KProvenance::Oracle => f.write_str("oracle"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalFactorResult {
    pub value: Option<Cyclo>,
    pub provenance: KProvenance,
}

const INF: i64 = i64::MAX / 4;

fn v_inf(x: i64, p: u64) -> i64 {
    val_or_inf(x, p).map(i64::from).unwrap_or(INF)
}

/// The closed form is available for odd p and a character with values ±1.
pub fn k_has_closed_form(chi: &LocalCharacterData) -> bool {
    chi.p > 2 && chi.n_p == 1 && chi.is_quadratic()
}

/// Classifies T into a row of the K table.
pub fn k_row(input: &RamifiedPlaceInput) -> Result<KRow> {
    let (t, p, np) = (&input.t, input.p(), input.chi.n_p as i64);
    if t.delta()? == 0 {
        return Err(Error::domain("K needs Δ ≠ 0"));
    }
    if t.r == 0 {
        let odd = input.chi.chi_int(-1)? != RootOfUnity::one();
        return Ok(if odd {
            KRow::R0Odd
        } else if v_inf(t.n, p) == v_inf(t.m, p) - 2 * np {
            KRow::R0Equal
        } else {
            KRow::R0Unequal
        });
    }
    let (a, b, c) = (v_inf(t.n, p), v_inf(t.r, p) - np, v_inf(t.m, p) - 2 * np);
    Ok(if a < b.min(c) {
        KRow::A
    } else if b < a.min(c) {
        KRow::B
    } else if c < a.min(b) {
        KRow::C
    } else if a == b && b < c {
        KRow::AB
    } else if a == c && c < b {
        KRow::AC
    } else if b == c && c < a {
        KRow::BC
    } else {
        let split = t.discriminant_split()?;
        if v_inf(split.d, p) == 1 {
            KRow::ABCRamified
        } else if v_inf(split.f as i64, p) == v_inf(t.r, p) {
            KRow::ABCEqual
        } else {
            KRow::ABCGreater
        }
    })
}

/// K(s, T, χ_p) from the table, or a "needs-oracle" marker outside its range.
pub fn k_closed_form(input: &RamifiedPlaceInput) -> Result<LocalFactorResult> {
    let row = k_row(input)?;
    if !k_has_closed_form(&input.chi) {
        return Ok(LocalFactorResult { value: None, provenance: KProvenance::NeedsOracle });
    }
    let (t, p, s, np) = (&input.t, input.p(), input.s, input.chi.n_p as i64);
    let chi = |x: BigRational| -> Result<BigRational> {
        Ok(rat_int(input.chi.chi(&x)?.as_sign().expect("quadratic character")))
    };
    let chi_i = |x: i64| chi(rat_int(x));
    let pw = |e: i64| rat_pow(p, e);
    let split = t.discriminant_split()?;
    let (dd, ff) = (split.d, split.f as i64);
    let pi = p as i64;
    let e = v_inf(t.n, p).min(v_inf(t.r, p) - np).min(v_inf(t.m, p) - 2 * np);
    let zero = BigRational::zero();
    let value = match row {
        KRow::R0Odd | KRow::R0Unequal | KRow::A | KRow::C => zero,
        KRow::R0Equal | KRow::AC => {
            -rat_int(curve_count_ap(dd, p)) * pw(e * (2 - s) - 1) * chi_i(2 * pi * ff)?
        }
        KRow::B => pw(e * (2 - s)) * (BigRational::one() - pw(-1)) * chi_i(pi * t.r)?,
        KRow::AB | KRow::BC => -pw(e * (2 - s) - 1) * chi_i(pi * t.r)?,
        KRow::ABCRamified => {
            let vf = v_inf(ff, p);
            let xd = chi_i(-dd)?;
            let one = BigRational::one();
            let lead = chi_i(-2 * t.r * pi)? * (&one - &xd * pw(s - 2)) / (&one - pw(3 - 2 * s));
            let first = pw(e * (2 - s) + 3 - 2 * s) * (&one + &xd * pw(s - 2));
            let second = pw(e * (s - 1) + vf * (3 - 2 * s)) * (&one + &xd * pw(1 - s));
            lead * (first - second)
        }
        KRow::ABCEqual | KRow::ABCGreater => {
            let vf = v_inf(ff, p);
            let at = rat_int(curve_count_ap_tilde(t.r, ff, dd, &input.chi)?);
            let tail = pw(e * (s - 1) + 2 * s - 4 + vf * (3 - 2 * s)) * chi_i(-2 * pi * ff)? * at;
            if row == KRow::ABCEqual {
                -tail
            } else {
                let one = BigRational::one();
                let bracket = pw(3 - 2 * s) - pw(-1) - pw((vf - e - 1) * (3 - 2 * s)) * (&one - pw(-1));
                chi_i(-2 * t.r * pi)? * pw(e * (2 - s)) / (&one - pw(3 - 2 * s)) * bracket - tail
            }
        }
    };
    Ok(LocalFactorResult { value: Some(Cyclo::from_rational(value)), provenance: KProvenance::ClosedForm(row) })
}

/// ε(1/2, χ_p, ψ_p) with ψ_p(x) = e(−{x}_p), as a normalized Gauss sum over (Z/p^{n_p})^×.
pub fn epsilon_factor(chi: &LocalCharacterData) -> Result<Cyclo> {
    if chi.n_p == 0 {
        return Err(Error::domain(format!("ε-factor of an unramified character at p = {}", chi.p)));
    }
    let q = chi.unit_modulus();
    let order = num_integer::lcm(q, chi.value_order());
    let mut acc = CycloAccumulator::new(order);
    for u in 1..q {
        if u % chi.p == 0 {
            continue;
        }
        let root = chi.unit_value(u as i64).inv().mul(RootOfUnity::new(-(u as i64), q));
        acc.add_root(root, &BigRational::one());
    }
    let sum = acc.finish();
    let half = sqrt_p_power(chi.p, -(chi.n_p as i64));
    Ok(&(&sum * &half) * &chi.value_at_p.pow(chi.n_p as i64).to_cyclo())
}

/// p^{k/2} as an exact cyclotomic number.
pub fn sqrt_p_power(p: u64, k: i64) -> Cyclo {
    let whole = rat_pow(p, k.div_euclid(2));
    if k.rem_euclid(2) == 0 {
        Cyclo::from_rational(whole)
    } else {
        Cyclo::sqrt_prime(p).scale(&whole)
    }
}

/// The ramified local integral assembled from a value of K.
pub fn ramified_local_factor(input: &RamifiedPlaceInput, k: &Cyclo) -> Result<Cyclo> {
    let (t, p, s, np) = (&input.t, input.p(), input.s, input.chi.n_p as i64);
    if v_inf(t.m, p) < 2 * np {
        return Ok(Cyclo::zero());
    }
    let eps = epsilon_factor(&input.chi)?;
    let pre = &sqrt_p_power(p, np * (5 - 4 * s)) * &eps;
    let inner = if t.r != 0 && v_inf(t.r, p) == 0 {
        input.chi.chi_int(-t.r)?.to_cyclo()
    } else {
        let c = input.chi.chi(&-rat_pow(p, np))?.to_cyclo();
        &c * &k.scale(&rat_pow(p, np * (2 - s)))
    };
    Ok(&pre * &inner)
}

/// −nm is a nonzero square in Q_p.
fn minus_nm_is_square(n: i64, m: i64, p: u64) -> bool {
    let prod = -(n as i128) * (m as i128);
    let big = BigInt::from(prod);
    let q = BigRational::from_integer(big);
    let v = valuation(&q, p).map(|v| v.v).unwrap_or(1);
    if v % 2 != 0 {
        return false;
    }
    let u = &q * rat_pow(p, -v);
    let res = crate::arith::rational_mod(&u, p).expect("unit") as i64;
    legendre(res, p) == 1
}

fn check_volume_hypothesis(n: i64, m: i64, p: u64) -> Result<()> {
    if p == 2 || !crate::arith::is_prime(p) {
        return Err(Error::domain("volume closed forms need an odd prime"));
    }
    if n == 0 || m == 0 {
        return Err(Error::domain("volume closed forms need n, m ≠ 0"));
    }
    Ok(())
}

/// vol R(i, j) for T = (n, 0, m) from the closed-form table.
pub fn volume_r_closed_form(i: i64, j: i64, n: i64, m: i64, p: u64) -> Result<BigRational> {
    check_volume_hypothesis(n, m, p)?;
    let (vn, vm) = (v_inf(n, p), v_inf(m, p));
    let full = BigRational::one() - rat_pow(p, -1);
    let zero = BigRational::zero();
    Ok(match (2 * j).cmp(&(vm - vn)) {
        std::cmp::Ordering::Less => if i <= vn { full } else { zero },
        std::cmp::Ordering::Greater => if i + 2 * j <= vm { full } else { zero },
        std::cmp::Ordering::Equal => {
            if i <= vn {
                full
            } else if minus_nm_is_square(n, m, p) {
                rat_int(2) * rat_pow(p, vn - i)
            } else {
                zero
            }
        }
    })
}

/// Parameters of the generating series for T = (n, 0, m) at an odd prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesParams {
    pub p: u64,
    pub vn: i64,
    pub vm: i64,
    /// χ_D(p) for −4nm = D·f².
    pub l: i64,
}

impl SeriesParams {
    pub fn from_form(n: i64, m: i64, p: u64) -> Result<Self> {
        check_volume_hypothesis(n, m, p)?;
        let disc = -4i128 * n as i128 * m as i128;
        let disc = i64::try_from(disc).map_err(|_| Error::Overflow("discriminant of a form"))?;
        let split = crate::arith::fundamental_discriminant(disc)?;
        Ok(SeriesParams { p, vn: v_inf(n, p), vm: v_inf(m, p), l: kronecker(split.d, p as i64) })
    }

    fn ll(&self) -> BigRational {
        rat_int(self.l.abs() * (self.l + 1))
    }

    fn full(&self) -> BigRational {
        BigRational::one() - rat_pow(self.p, -1)
    }

    fn half_exponent(&self, diff: i64) -> Result<i64> {
        if diff % 2 != 0 {
            return Err(Error::domain("odd valuation gap with a nonzero square-class term"));
        }
        Ok(diff / 2)
    }
}

fn geom(c: BigRational, a: i64, b: i64, mx: i64, my: i64) -> Result<Series2> {
    Series2::geometric(&c, a, b, mx, my)
}

/// Σ_{j≥0} vol R(i, −j)·Y^j in closed form (A₁ + A₂), as a series in Y alone.
pub fn first_series_single(i: i64, sp: &SeriesParams, max_y: i64) -> Result<Series2> {
    let mut out = Series2::zero(0, max_y);
    if i <= sp.vn {
        let shift = ((i - sp.vm + 1).div_euclid(2)).max(0);
        let g = geom(BigRational::one(), 0, 1, 0, max_y)?;
        out = out.add(&g.shift(0, shift).scale(&sp.full()));
    }
    if sp.vm <= sp.vn && i > sp.vn && !sp.ll().is_zero() {
        let y = sp.half_exponent(sp.vn - sp.vm)?;
        out.add_term(0, y, sp.ll() * rat_pow(sp.p, sp.vn - i));
    }
    Ok(out)
}

/// Σ_{i≥1} Σ_{j≥0} vol R(i, −j)·X^i·Y^j in closed form (B₁ + B₂).
pub fn first_series_double(sp: &SeriesParams, mx: i64, my: i64) -> Result<Series2> {
    let one = BigRational::one();
    let gy = geom(one.clone(), 0, 1, mx, my)?;
    let e = sp.vn.min(sp.vm);
    let first = Series2::finite_geometric(1, 0, e, mx, my).shift(1, 0).mul(&gy)?.scale(&sp.full());
    let mut out = first;
    if sp.vm <= sp.vn {
        let a = (sp.vn - sp.vm + 1).div_euclid(2);
        let b = (sp.vn - sp.vm).div_euclid(2);
        let inner = Series2::finite_geometric(2, 1, a, mx, my)
            .add(&Series2::finite_geometric(2, 1, b, mx, my).shift(1, 0));
        let num = inner.shift(sp.vm + 1, 1);
        let term = num.mul(&gy)?.scale(&sp.full());
        out = out.add(&term);
        if !sp.ll().is_zero() {
            let y = sp.half_exponent(sp.vn - sp.vm)?;
            let g = geom(rat_pow(sp.p, -1), 1, 0, mx, my)?;
            out = out.add(&g.shift(sp.vn + 1, y).scale(&(sp.ll() * rat_pow(sp.p, -1))));
        }
    }
    Ok(out)
}

/// Σ_{j=1}^{⌊v(m)/2⌋} vol R(i, j)·Y^j in closed form (C₁ + C₂), for i ≥ 0.
pub fn second_series_single(i: i64, sp: &SeriesParams, max_y: i64) -> Result<Series2> {
    let e = sp.vn.min(sp.vm);
    let mut out = Series2::zero(0, max_y);
    if i <= e {
        let upper = (sp.vm - i + 2).div_euclid(2);
        out = Series2::finite_geometric(0, 1, upper - 1, 0, max_y).shift(0, 1).scale(&sp.full());
    }
    if sp.vm > sp.vn && i > sp.vn && !sp.ll().is_zero() {
        let y = sp.half_exponent(sp.vm - sp.vn)?;
        out.add_term(0, y, sp.ll() * rat_pow(sp.p, sp.vn - i));
    }
    Ok(out)
}

/// Σ_{i≥0} Σ_{j=1}^{⌊v(m)/2⌋} vol R(i, j)·X^i·Y^j in closed form (D₁ + D₂).
pub fn second_series_double(sp: &SeriesParams, mx: i64, my: i64) -> Result<Series2> {
    let e = sp.vn.min(sp.vm);
    let gy = geom(BigRational::one(), 0, 1, mx, my)?;
    let first = Series2::finite_geometric(1, 0, e + 1, mx, my).shift(0, 1).mul(&gy)?;
    let a = (e + 1).div_euclid(2);
    let b = (e + 2).div_euclid(2);
    let num = Series2::finite_geometric(2, -1, a, mx, my)
        .shift(1, (sp.vm + 1).div_euclid(2))
        .add(&Series2::finite_geometric(2, -1, b, mx, my).shift(0, (sp.vm + 2).div_euclid(2)));
    let second = num.mul(&gy)?;
    let mut out = first.sub(&second).scale(&sp.full());
    if sp.vm > sp.vn && !sp.ll().is_zero() {
        let y = sp.half_exponent(sp.vm - sp.vn)?;
        let g = geom(rat_pow(sp.p, -1), 1, 0, mx, my)?;
        out = out.add(&g.shift(sp.vn + 1, y).scale(&(sp.ll() * rat_pow(sp.p, -1))));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(p: u64, c: i64) -> LocalCharacterData {
        LocalCharacterData::quadratic(p, RootOfUnity::from_sign(c))
    }

    #[test]
    fn h_tilde_small_cases() {
        let eta = DirichletCharacter::trivial(1);
        assert_eq!(h_tilde(-4, 4, &eta, 1, 1).unwrap(), Cyclo::one());
        let p = 3u64;
        let d = -4;
        let s = 4;
        let expect = rat_int(1) + rat_pow(p, 2 * s - 3) - rat_int(kronecker(d, 3)) * rat_pow(p, s - 2);
        assert_eq!(h_tilde(d, s, &eta, 1, p).unwrap(), Cyclo::from_rational(expect));
        assert!(h_tilde(d, s, &eta, 2, 3).is_err());
    }

    #[test]
    fn unramified_trivial_prefactor() {
        let input = GoodPlaceInput::new(5, RootOfUnity::one(), 1, 0, 0, 4).unwrap();
        let x = rat(1, 625);
        let expect = (rat_int(1) - &x) * (rat_int(1) - rat_int(25) * &x * &x) / (rat_int(1) - rat_int(5) * &x);
        assert_eq!(unramified_local_factor(&input).unwrap(), Cyclo::from_rational(expect));
    }

    #[test]
    fn unramified_series_matches_value_for_polynomial_case() {
        let num = unramified_numerator(3, 1, 2, 0);
        let series = unramified_series(3, 1, 2, 0, num.len() + 3);
        for (t, c) in series.iter().enumerate() {
            assert_eq!(c, num.get(t).unwrap_or(&BigRational::zero()));
        }
    }

    #[test]
    fn point_count_examples() {
        assert_eq!(curve_count_ap(1, 3), 0);
        assert_eq!(curve_count_ap(-4, 5), -2);
        assert_eq!(curve_count_ap_naive(-4, 5), -2);
    }

    #[test]
    fn ap_tilde_second_case_is_character_value() {
        let chi = quad(3, -1);
        assert_eq!(curve_count_ap_tilde(3, 9, -4, &chi).unwrap(), chi.chi(&rat(1, 3)).unwrap().as_sign().unwrap());
    }

    #[test]
    fn epsilon_mod_three() {
        let eta = DirichletCharacter::from_label("3:2").unwrap();
        let chi = eta.local_component(3).unwrap();
        let eps = epsilon_factor(&chi).unwrap();
        assert_eq!(eps, Cyclo::root(3, 4));
    }

    #[test]
    fn epsilon_product_is_normalized_gauss_sum() {
        for n in [3u64, 4, 5, 7, 8, 12, 15, 20, 21, 24] {
            for eta in DirichletCharacter::primitive_characters(n) {
                let mut prod = Cyclo::one();
                for p in crate::arith::prime_divisors(n) {
                    prod = &prod * &epsilon_factor(&eta.local_component(p).unwrap()).unwrap();
                }
                let sign = if eta.parity() == 1 { -1 } else { 1 };
                let mut root_n = Cyclo::one();
                for (p, e) in crate::arith::factorize(n) {
                    root_n = &root_n * &sqrt_p_power(p, e as i64);
                }
                let rhs = &eta.gauss_sum().scale(&rat_int(sign)) * &root_n.inv().unwrap();
                assert_eq!(prod, rhs, "η = {}", eta.label());
            }
        }
    }

    #[test]
    fn k_rows_from_examples() {
        let chi = quad(3, 1);
        let row = |n, r, m| k_row(&RamifiedPlaceInput::new(chi.clone(), HalfIntegralForm::new(n, r, m), 4).unwrap()).unwrap();
        assert_eq!(row(1, 0, 9), KRow::R0Odd);
        assert_eq!(row(1, 3, 1), KRow::C);
        assert_eq!(row(9, 3, 9), KRow::BC);
        assert_eq!(row(9, 3, 27), KRow::B);
        assert_eq!(row(1, 3, 9), KRow::ABCRamified);
    }

    #[test]
    fn k_b_row_value() {
        let chi = quad(3, -1);
        let input = RamifiedPlaceInput::new(chi.clone(), HalfIntegralForm::new(9, 3, 27), 4).unwrap();
        let k = k_closed_form(&input).unwrap();
        assert_eq!(k.provenance, KProvenance::ClosedForm(KRow::B));
        let expect = rat(2, 3) * rat_int(chi.chi_int(9).unwrap().as_sign().unwrap());
        assert_eq!(k.value.unwrap(), Cyclo::from_rational(expect));
    }

    #[test]
    fn k_needs_oracle_for_non_quadratic() {
        let eta = DirichletCharacter::from_label("5:2").unwrap();
        let chi = eta.local_component(5).unwrap();
        let input = RamifiedPlaceInput::new(chi, HalfIntegralForm::new(1, 5, 25), 4).unwrap();
        assert_eq!(k_closed_form(&input).unwrap().provenance, KProvenance::NeedsOracle);
    }

    #[test]
    fn ramified_factor_vanishes_below_level() {
        let input = RamifiedPlaceInput::new(quad(3, 1), HalfIntegralForm::new(1, 1, 3), 4).unwrap();
        assert!(ramified_local_factor(&input, &Cyclo::one()).unwrap().is_zero());
    }

    #[test]
    fn volume_table_examples() {
        assert_eq!(volume_r_closed_form(0, 0, 1, 1, 3).unwrap(), rat(2, 3));
        assert_eq!(volume_r_closed_form(2, 0, 1, 2, 3).unwrap(), rat(2, 9));
        assert_eq!(volume_r_closed_form(2, 0, 1, 1, 3).unwrap(), rat(0, 1));
    }
}
