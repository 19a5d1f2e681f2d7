//! Global Fourier coefficients a(T) of E_{k,η}, the ordered expansion, and the classical
//! level-one comparator built from generalized Bernoulli numbers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{divisor_sum, divisors, factorial, kronecker, moebius, prime_divisors, sigma, split_by_level};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::form::HalfIntegralForm;
use crate::localfactors::{h_tilde, k_closed_form, KProvenance, RamifiedPlaceInput};
use crate::lvalues::{bernoulli, bernoulli_denominator_lcm, dirichlet_l, generalized_bernoulli, zeta_even_over_pi_power};
use crate::oracle::ramified::k_oracle;
use crate::scalar::{rat_int, rat_pow, Complex, Cyclo, Fixed, Precision, Scalar};

/// Weight and nebentypus of the Eisenstein series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisensteinSpec {
    pub k: u32,
    pub eta: DirichletCharacter,
}

impl EisensteinSpec {
    /// Requires η primitive, k ≥ 4 and η(−1) = (−1)^k.
    pub fn new(k: i64, eta: DirichletCharacter) -> Result<Self> {
        let n = eta.modulus();
        if n % 4 == 2 {
            return Err(Error::domain(format!(
                "no primitive character of conductor {n} exists (conductors are never 2 mod 4)"
            )));
        }
        if !eta.is_primitive() {
            return Err(Error::NotPrimitive { label: eta.label(), conductor: eta.conductor() });
        }
        if k < 4 {
            return Err(Error::domain(format!("weight {k} is below 4")));
        }
        let k_parity = (k % 2) as u8;
        if k_parity != eta.parity() {
            return Err(Error::Parity { k, k_parity, eta_parity: eta.parity() });
        }
        Ok(EisensteinSpec { k: k as u32, eta })
    }

    pub fn from_label(k: i64, label: &str) -> Result<Self> {
        EisensteinSpec::new(k, DirichletCharacter::from_label(label)?)
    }

    /// N, the conductor of η.
    pub fn level(&self) -> u64 {
        self.eta.modulus()
    }
}

impl fmt::Display for EisensteinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} eta={}", self.k, self.eta.label())
    }
}

/// When K(k, T, χ_p) may be taken from the j-sum oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OraclePolicy {
    /// Only the closed-form table.
    Forbid,
    /// The table where it applies, the oracle elsewhere.
    #[default]
    Allow,
    /// The oracle everywhere.
    Force,
}

impl FromStr for OraclePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forbid" => Ok(OraclePolicy::Forbid),
            "allow" => Ok(OraclePolicy::Allow),
            "force" => Ok(OraclePolicy::Force),
            _ => Err(Error::domain(format!("unknown oracle policy `{s}` (forbid, allow, force)"))),
        }
    }
}

impl fmt::Display for OraclePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OraclePolicy::Forbid => "forbid",
            OraclePolicy::Allow => "allow",
            OraclePolicy::Force => "force",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoefficientOptions {
    pub precision: Precision,
    pub oracle: OraclePolicy,
    /// Refinement depth of the K oracle.
    pub oracle_depth: u32,
}

impl Default for CoefficientOptions {
    fn default() -> Self {
        CoefficientOptions { precision: Precision::default(), oracle: OraclePolicy::Allow, oracle_depth: 24 }
    }
}

/// a(T) together with how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRecord {
    pub t: HalfIntegralForm,
    pub value: Scalar,
    pub notes: Vec<String>,
    pub k_provenance: Vec<(u64, KProvenance)>,
}

impl CoefficientRecord {
    fn exact(t: HalfIntegralForm, q: BigRational, note: &str) -> Self {
        CoefficientRecord {
            t,
            value: Scalar::Exact(Cyclo::from_rational(q)),
            notes: if note.is_empty() { vec![] } else { vec![note.to_string()] },
            k_provenance: vec![],
        }
    }

    pub fn mode(&self) -> &'static str {
        self.value.mode()
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.value, Scalar::Exact(c) if c.is_zero())
    }
}

/// T is positive semidefinite and N² | m.
pub fn in_support(spec: &EisensteinSpec, t: &HalfIntegralForm) -> Result<bool> {
    let n2 = (spec.level() as i64).checked_mul(spec.level() as i64).ok_or(Error::Overflow("N²"))?;
    Ok(t.is_positive_semidefinite()? && t.m % n2 == 0)
}

/// a(T) for the normalized E_{k,η}.
pub fn coefficient(spec: &EisensteinSpec, t: &HalfIntegralForm, opts: &CoefficientOptions) -> Result<CoefficientRecord> {
    if !in_support(spec, t)? {
        return Ok(CoefficientRecord::exact(*t, BigRational::zero(), "outside the support"));
    }
    match t.rank()? {
        0 => {
            let c = if spec.level() == 1 { BigRational::one() } else { BigRational::zero() };
            Ok(CoefficientRecord::exact(*t, c, "constant term"))
        }
        1 => rank_one(spec, t, opts),
        _ => rank_two(spec, t, opts),
    }
}

fn rank_one(spec: &EisensteinSpec, t: &HalfIntegralForm, opts: &CoefficientOptions) -> Result<CoefficientRecord> {
    let level = spec.level();
    let k = spec.k;
    if level == 1 {
        let e = t.content()?;
        let zk = zeta_even_over_pi_power(k)?;
        let lead = rat_int(BigInt::from(-4).pow(k / 2)) / (rat_int(factorial(u64::from(k) - 1)) * zk);
        return Ok(CoefficientRecord::exact(*t, lead * rat_int(sigma(e, k - 1)), "rank 1"));
    }
    if t.m == 0 || t.r == 0 {
        return Ok(CoefficientRecord::exact(*t, BigRational::zero(), "rank 1, level condition fails"));
    }
    let rs = split_by_level(t.r, level)?;
    let ms = split_by_level(2 * t.m, level)?;
    if rs.r_n.checked_mul(level) != Some(ms.r_n) {
        return Ok(CoefficientRecord::exact(*t, BigRational::zero(), "rank 1, level condition fails"));
    }
    let value = rank_one_numeric(spec, t, opts.precision)?;
    Ok(CoefficientRecord {
        t: *t,
        value: Scalar::Numeric(value),
        notes: vec!["rank 1; algebraicity for N > 1 is not established".into()],
        k_provenance: vec![],
    })
}

/// (−2πi)^k/(k−1)!·σ_{k−1,η}(e_N̂)/L(k, η)·η(r_N̂)/η(2_N̂)·e_N^{k−1}.
fn rank_one_numeric(spec: &EisensteinSpec, t: &HalfIntegralForm, prec: Precision) -> Result<Complex> {
    let bits = prec.working_bits();
    let (level, k, eta) = (spec.level(), spec.k, &spec.eta);
    let e = split_by_level(t.content()? as i64, level)?;
    let two = split_by_level(2, level)?;
    let r_hat = if t.r == 0 { 1 } else { split_by_level(t.r, level)?.r_nhat };
    let units = eta.eval(r_hat).expect("coprime to N").mul(eta.eval(two.r_nhat).expect("coprime to N").inv());
    let exact = &(&divisor_sum(e.r_nhat, i64::from(k) - 1, eta)? * &units.to_cyclo())
        .scale(&(rat_pow(e.r_n, i64::from(k) - 1) / rat_int(factorial(u64::from(k) - 1))));
    let two_pi_i = Complex { re: Fixed::zero(bits), im: Fixed::pi(bits).mul_int(&BigInt::from(-2)) };
    let lk = dirichlet_l(k, eta, prec)?.numeric;
    let num = &two_pi_i.powi(i64::from(k))? * &exact.to_complex(bits);
    num.checked_div(&lk).ok_or_else(|| Error::domain("L(k, η) vanished"))
}

fn rank_two(spec: &EisensteinSpec, t: &HalfIntegralForm, opts: &CoefficientOptions) -> Result<CoefficientRecord> {
    if !t.is_positive_definite()? {
        return Ok(CoefficientRecord::exact(*t, BigRational::zero(), "not positive definite"));
    }
    if spec.level() == 1 {
        let q = rank_two_level_one(spec.k, t, opts.precision)?;
        return Ok(CoefficientRecord::exact(*t, q, "rank 2"));
    }
    let (value, notes, prov) = rank_two_numeric(spec, t, opts)?;
    Ok(CoefficientRecord { t: *t, value: Scalar::Numeric(value), notes, k_provenance: prov })
}

/// Λ = L(k−1, χ_D)·√|D|/π^{k−1} for D < 0, recovered as a rational by certified rounding
/// against the denominator bound (k−1)!·lcm(den B_0, …, den B_{k−1})·|D|^k.
pub fn certified_class_l_value(d: i64, k: u32, prec: Precision) -> Result<BigRational> {
    if d >= 0 || k < 3 {
        return Err(Error::domain("Λ needs D < 0 and k ≥ 3"));
    }
    let bits = prec.working_bits();
    let chi = DirichletCharacter::kronecker(d)?;
    let l = dirichlet_l(k - 1, &chi, prec)?.numeric.re;
    let root = Fixed::from_int(&BigInt::from(d.unsigned_abs()), bits).sqrt()?;
    let pik = Fixed::pi(bits).powi(i64::from(k) - 1)?;
    let x = (&l * &root).checked_div(&pik).ok_or_else(|| Error::domain("π power vanished"))?;
    let q = factorial(u64::from(k) - 1) * bernoulli_denominator_lcm(k - 1) * BigInt::from(d.unsigned_abs()).pow(k);
    let scaled = x.mul_int(&q).to_rational();
    let nearest = scaled.round();
    let gap = (&scaled - &nearest).abs();
    if gap >= BigRational::new(BigInt::one(), BigInt::from(4)) {
        return Err(Error::Uncertified(format!("L({}, χ_{d}) is not within 1/4 of a lattice point", k - 1)));
    }
    Ok(nearest / rat_int(q))
}

/// The rank-two coefficient at level one as an exact rational, with π-powers cancelled symbolically.
fn rank_two_level_one(k: u32, t: &HalfIntegralForm, prec: Precision) -> Result<BigRational> {
    let split = t.discriminant_split()?;
    let (d, f) = (split.d, split.f);
    let e = t.content()?;
    let ki = i64::from(k);
    let trivial = DirichletCharacter::trivial(1);
    let h = h_tilde(d, ki, &trivial, e, f)?
        .to_rational()
        .ok_or_else(|| Error::domain("H̃ for the trivial character is rational"))?;
    let lambda = certified_class_l_value(d, k, prec)?;
    let zk = zeta_even_over_pi_power(k)?;
    let z2k = zeta_even_over_pi_power(2 * k - 2)?;
    let pi_exponent = (2 * ki - 1) + (ki - 1) - ki - (2 * ki - 2);
    debug_assert_eq!(pi_exponent, 0);
    if pi_exponent != 0 {
        return Err(Error::domain("π powers do not cancel"));
    }
    let det = rat_int(d.unsigned_abs() as i64) * rat_int(f as i64) * rat_int(f as i64) / rat_int(4);
    let pref = rat_pow(4, 2 * ki - 1) * num_traits::pow(det, (k - 2) as usize) * rat_int(f as i64) / rat_int(2)
        / (rat_int(2) * rat_int(factorial(2 * u64::from(k) - 2)));
    Ok(pref * rat_pow(f, 3 - 2 * ki) * h * lambda / (zk * z2k))
}

type RankTwoParts = (Complex, Vec<String>, Vec<(u64, KProvenance)>);

/// The rank-two product formula evaluated in fixed point; valid for every level.
fn rank_two_numeric(spec: &EisensteinSpec, t: &HalfIntegralForm, opts: &CoefficientOptions) -> Result<RankTwoParts> {
    let prec = opts.precision;
    let bits = prec.working_bits();
    let (level, k, eta) = (spec.level(), spec.k, &spec.eta);
    let ki = i64::from(k);
    let split = t.discriminant_split()?;
    let (d, f) = (split.d, split.f);
    let e = t.content()?;
    let fs = split_by_level(f as i64, level)?;
    let es = split_by_level(e as i64, level)?;
    let (f_hat, e_hat) = (fs.r_nhat as u64, es.r_nhat as u64);
    let mut notes = Vec::new();
    let mut prov = Vec::new();

    let mut exact = h_tilde(d, ki, eta, e_hat, f_hat)?;
    exact = &exact * &eta.eval((f_hat * f_hat) as i64).expect("coprime to N").to_cyclo();
    exact = exact.scale(&(rat_pow(level, 2 - 2 * ki) * rat_pow(f_hat, 3 - 2 * ki)));
    exact = &exact * &eta.gauss_sum();
    for p in prime_divisors(level) {
        let chi = eta.local_component(p)?;
        if t.r % p as i64 != 0 {
            exact = &exact * &chi.chi_int(t.r)?.to_cyclo();
            continue;
        }
        let input = RamifiedPlaceInput::new(chi.clone(), *t, ki)?;
        let (kval, how) = local_k(&input, opts, &mut notes)?;
        prov.push((p, how));
        let factor = chi.chi(&rat_pow(p, i64::from(chi.n_p)))?.to_cyclo().scale(&rat_pow(p, i64::from(chi.n_p) * (2 - ki)));
        exact = &(&exact * &factor) * &kval;
    }

    let det = rat_int(t.delta()?) / rat_int(4);
    let det_fixed = Fixed::from_rational(&det, bits);
    let four_pi = Fixed::pi(bits).mul_int(&BigInt::from(4));
    let pref = (&four_pi.powi(2 * ki - 1)? * &det_fixed.powi(ki - 2)?) * det_fixed.sqrt()?;
    let pref = pref.div_int(&(BigInt::from(2) * factorial(2 * u64::from(k) - 2)));
    let twist = eta.product_with_kronecker(d)?;
    let l_num = dirichlet_l(k - 1, &twist.character, prec)?.numeric;
    let l_den = &dirichlet_l(k, eta, prec)?.numeric * &dirichlet_l(2 * k - 2, &eta.square(), prec)?.numeric;
    let ratio = l_num.checked_div(&l_den).ok_or_else(|| Error::domain("L-value denominator vanished"))?;
    let value = &ratio.scale(&pref) * &exact.to_complex(bits);
    if level > 1 {
        notes.push("rank 2; algebraicity for N > 1 is not established".into());
    }
    Ok((value.with_bits(prec.bits), notes, prov))
}

fn local_k(input: &RamifiedPlaceInput, opts: &CoefficientOptions, notes: &mut Vec<String>) -> Result<(Cyclo, KProvenance)> {
    let p = input.p();
    if opts.oracle != OraclePolicy::Force {
        let closed = k_closed_form(input)?;
        if let Some(v) = closed.value {
            return Ok((v, closed.provenance));
        }
        if opts.oracle == OraclePolicy::Forbid {
            return Err(Error::UnsupportedPlace {
                p,
                reason: "K has no closed form for this local character and the oracle is forbidden".into(),
            });
        }
    }
    let est = k_oracle(input, opts.oracle_depth)?;
    notes.push(format!("K at p={p} from oracle, tail <= {:.3e}", est.tail.to_f64().unwrap_or(f64::INFINITY)));
    Ok((est.value, KProvenance::Oracle))
}

/// All T with n + m ≤ bound in the support, ordered by (n + m, n, r).
pub fn support_forms(spec: &EisensteinSpec, bound: u64) -> Vec<HalfIntegralForm> {
    let n2 = spec.level() * spec.level();
    let b = bound as i64;
    let mut out = Vec::new();
    for trace in 0..=b {
        for n in 0..=trace {
            let m = trace - n;
            if !(m as u64).is_multiple_of(n2) {
                continue;
            }
            let rmax = ((4 * n * m) as f64).sqrt() as i64 + 1;
            for r in -rmax..=rmax {
                if r * r <= 4 * n * m {
                    out.push(HalfIntegralForm::new(n, r, m));
                }
            }
        }
    }
    out
}

/// The expansion through n + m ≤ bound, evaluated in parallel and returned in (n + m, n, r) order.
pub fn expand(spec: &EisensteinSpec, bound: u64, opts: &CoefficientOptions, keep_zero: bool) -> Result<Vec<CoefficientRecord>> {
    let forms = support_forms(spec, bound);
    let records: Result<Vec<CoefficientRecord>> = forms.par_iter().map(|t| coefficient(spec, t, opts)).collect();
    Ok(records?.into_iter().filter(|r| keep_zero || !r.is_zero()).collect())
}

/// The classical level-one coefficient of the weight-k Siegel Eisenstein series,
/// through Cohen's function H(k−1, ·) and the divisor sum over d | e.
pub fn eichler_zagier_coefficient(t: &HalfIntegralForm, k: u32) -> Result<BigRational> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::domain(format!("the level-one comparator needs even k ≥ 4, got {k}")));
    }
    if !t.is_positive_semidefinite()? {
        return Ok(BigRational::zero());
    }
    let ki = i64::from(k);
    match t.rank()? {
        0 => Ok(BigRational::one()),
        1 => Ok(-rat_int(2 * ki) / bernoulli(k) * rat_int(sigma(t.content()?, k - 1))),
        _ => {
            let delta = t.delta()? as u64;
            let e = t.content()?;
            let zeta_1mk = -bernoulli(k) / rat_int(ki);
            let zeta_3m2k = -bernoulli(2 * k - 2) / rat_int(2 * ki - 2);
            let mut acc = BigRational::zero();
            for d in divisors(e) {
                acc += rat_pow(d, ki - 1) * cohen_h(k - 1, delta / (d * d))?;
            }
            Ok(rat_int(2) / (zeta_1mk * zeta_3m2k) * acc)
        }
    }
}

/// Cohen's H(r, N) for odd r ≥ 3 and N ≡ 0, 3 mod 4 positive.
pub fn cohen_h(r: u32, n: u64) -> Result<BigRational> {
    let split = crate::arith::fundamental_discriminant(-(n as i64))?;
    let (d, f) = (split.d, split.f);
    let chi = DirichletCharacter::kronecker(d)?;
    let b = generalized_bernoulli(r, &chi)
        .to_rational()
        .ok_or_else(|| Error::domain("B_{r,χ_D} of a real character is rational"))?;
    let l_value = -b / rat_int(i64::from(r));
    let mut acc = BigRational::zero();
    for g in divisors(f) {
        let c = moebius(g) * kronecker(d, g as i64);
        if c != 0 {
            acc += rat_int(c) * rat_pow(g, i64::from(r) - 1) * rat_int(sigma(f / g, 2 * r - 1));
        }
    }
    Ok(l_value * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn level_one(k: i64) -> EisensteinSpec {
        EisensteinSpec::from_label(k, "1:1").unwrap()
    }

    fn value(spec: &EisensteinSpec, n: i64, r: i64, m: i64) -> Scalar {
        coefficient(spec, &HalfIntegralForm::new(n, r, m), &CoefficientOptions::default()).unwrap().value
    }

    #[test]
    fn classical_examples() {
        let s = level_one(4);
        assert_eq!(value(&s, 0, 0, 0).as_rational(), Some(rat(1, 1)));
        assert_eq!(value(&s, 1, 0, 0).as_rational(), Some(rat(240, 1)));
        assert_eq!(value(&s, 1, 3, 1).as_rational(), Some(rat(0, 1)));
        assert_eq!(value(&s, 1, 1, 1).as_rational(), Some(rat(13440, 1)));
        assert_eq!(eichler_zagier_coefficient(&HalfIntegralForm::new(1, 1, 1), 4).unwrap(), rat(13440, 1));
        assert_eq!(eichler_zagier_coefficient(&HalfIntegralForm::new(1, 0, 0), 4).unwrap(), rat(240, 1));
    }

    #[test]
    fn level_one_exact_path_matches_numeric_path() {
        for k in [4i64, 6] {
            let s = level_one(k);
            for (n, r, m) in [(1, 1, 1), (1, 0, 1), (2, 1, 3), (2, 2, 2)] {
                let t = HalfIntegralForm::new(n, r, m);
                let exact = value(&s, n, r, m).as_rational().unwrap();
                let (num, _, _) = rank_two_numeric(&s, &t, &CoefficientOptions::default()).unwrap();
                let diff = &num.re.to_rational() - &exact;
                assert!(diff.abs() < rat(1, 1_000_000_000_000), "T={t} k={k}");
                assert!(num.im.abs().to_f64() < 1e-30);
            }
        }
    }

    #[test]
    fn rank_one_general_formula_at_level_one() {
        let s = level_one(6);
        let t = HalfIntegralForm::new(4, 4, 1);
        let exact = value(&s, 4, 4, 1).as_rational().unwrap();
        let num = rank_one_numeric(&s, &t, Precision::default()).unwrap();
        assert!((&num.re.to_rational() - &exact).abs() < rat(1, 1_000_000_000));
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(EisensteinSpec::from_label(5, "1:1"), Err(Error::Parity { .. })));
        assert!(matches!(EisensteinSpec::from_label(3, "1:1"), Err(Error::Domain(_))));
        let err = EisensteinSpec::from_label(4, "2:1").unwrap_err();
        assert!(err.to_string().contains("conductor 2"));
        assert!(EisensteinSpec::from_label(5, "3:2").is_ok());
        assert!(matches!(EisensteinSpec::from_label(5, "9:8"), Err(Error::NotPrimitive { .. })));
    }

    #[test]
    fn expansion_order_and_support() {
        let s = level_one(4);
        let recs = expand(&s, 1, &CoefficientOptions::default(), false).unwrap();
        let ts: Vec<_> = recs.iter().map(|r| (r.t.n, r.t.r, r.t.m)).collect();
        assert_eq!(ts, vec![(0, 0, 0), (0, 0, 1), (1, 0, 0)]);
        assert!(recs[1..].iter().all(|r| r.value.as_rational() == Some(rat(240, 1))));
        let s3 = EisensteinSpec::from_label(5, "3:2").unwrap();
        assert!(support_forms(&s3, 10).iter().all(|t| t.m % 9 == 0));
    }

    #[test]
    fn odd_quadratic_coefficients_lie_on_the_imaginary_axis() {
        let s = EisensteinSpec::from_label(5, "3:2").unwrap();
        for (n, r, m) in [(1, 1, 9), (1, 3, 9), (2, 3, 9), (1, 0, 9), (3, 3, 9)] {
            let v = value(&s, n, r, m);
            let z = v.to_complex(128);
            assert!(z.re.abs().to_f64() < 1e-30 * (1.0 + z.im.abs().to_f64()), "T=({n},{r},{m}) {z:?}");
        }
    }
}
