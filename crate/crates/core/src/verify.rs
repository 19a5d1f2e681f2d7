//! The acceptance criteria as runnable checks, each producing a one-line report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{is_fundamental_discriminant, is_prime, kronecker, legendre, sigma, val_or_inf};
use crate::characters::{DirichletCharacter, LocalCharacterData};
use crate::error::Result;
use crate::form::HalfIntegralForm;
use crate::fourier::{coefficient, eichler_zagier_coefficient, in_support, CoefficientOptions, EisensteinSpec};
use crate::localfactors::{
    curve_count_ap, curve_count_ap_naive, k_closed_form, k_row, unramified_local_factor, volume_r_closed_form,
    GoodPlaceInput, KRow, RamifiedPlaceInput,
};
use crate::oracle::random::bootstrap;
use crate::oracle::ramified::k_oracle;
use crate::oracle::series::generating_series_check;
use crate::oracle::unramified::{phi_bound, phi_coefficients, sum_phi_series, unramified_tail, window_for};
use crate::oracle::volume::{volume_r, volume_r_flat};
use crate::oracle::OracleEstimate;
use crate::scalar::{rat, rat_int, rat_pow, Cyclo, RootOfUnity};
use crate::tolerances as tol;

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<18} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Suite names, in criterion order.
pub const SUITES: [&str; 10] = [
    "rank-one",
    "n1-classical",
    "unramified",
    "volumes",
    "series",
    "k-table",
    "point-counts",
    "gauss-sums",
    "support",
    "bootstrap-oracle",
];

/// Runs the criterion with the given suite name.
pub fn run_suite(name: &str) -> Option<CriterionReport> {
    let id = SUITES.iter().position(|s| *s == name)? as u8 + 1;
    Some(run_criterion(id))
}

pub fn run_criterion(id: u8) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => rank_one(),
        2 => level_one_comparator(),
        3 => unramified(),
        4 => volumes(),
        5 => series(),
        6 => k_table(),
        7 => point_counts(),
        8 => gauss_sums(),
        9 => support(),
        10 => bootstrap_oracle(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    let budget = match id {
        1 => Some(tol::RANK_ONE_BUDGET),
        2 => Some(tol::LEVEL_ONE_BUDGET),
        3 => Some(tol::UNRAMIFIED_BUDGET),
        _ => None,
    };
    if let Some(b) = budget {
        if elapsed > b {
            passed = false;
            detail = format!("{detail}; over budget {:.0?}", b);
        }
    }
    let name = SUITES.get(id as usize - 1).copied().unwrap_or("unknown");
    CriterionReport { id, name, passed, detail, elapsed }
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=10).map(run_criterion).collect()
}

type Outcome = Result<(bool, String)>;

fn rank_one() -> Outcome {
    let spec = EisensteinSpec::from_label(4, "1:1")?;
    let opts = CoefficientOptions::default();
    for n in 1..=tol::RANK_ONE_MAX_N {
        let got = coefficient(&spec, &HalfIntegralForm::new(n, 0, 0), &opts)?.value.as_rational();
        let want = rat_int(240) * rat_int(sigma(n as u64, 3));
        if got.as_ref() != Some(&want) {
            return Ok((false, format!("a({n},0,0) = {got:?}, expected {want}")));
        }
    }
    Ok((true, format!("a(n,0,0) = 240·σ₃(n) for 1 ≤ n ≤ {}", tol::RANK_ONE_MAX_N)))
}

/// All psd T with Δ ≤ 100 and 0 ≤ n, m ≤ 25.
pub fn level_one_forms() -> Vec<HalfIntegralForm> {
    let b = tol::LEVEL_ONE_MAX_ENTRY;
    let mut out = Vec::new();
    for n in 0..=b {
        for m in 0..=b {
            for r in -2 * b..=2 * b {
                let t = HalfIntegralForm::new(n, r, m);
                let d = 4 * n * m - r * r;
                if (0..=tol::LEVEL_ONE_MAX_DELTA).contains(&d) && t.is_positive_semidefinite().unwrap_or(false) {
                    out.push(t);
                }
            }
        }
    }
    out
}

fn level_one_comparator() -> Outcome {
    let forms = level_one_forms();
    let opts = CoefficientOptions::default();
    for k in tol::LEVEL_ONE_WEIGHTS {
        let spec = EisensteinSpec::from_label(k, "1:1")?;
        let bad: Vec<String> = forms
            .par_iter()
            .filter_map(|t| {
                let a = coefficient(&spec, t, &opts).map(|r| r.value.as_rational());
                let b = eichler_zagier_coefficient(t, k as u32);
                match (a, b) {
                    (Ok(Some(a)), Ok(b)) if a == b => None,
                    (a, b) => Some(format!("k={k} T={t}: {a:?} vs {b:?}")),
                }
            })
            .collect();
        if let Some(first) = bad.first() {
            return Ok((false, format!("{} mismatches, first {first}", bad.len())));
        }
    }
    Ok((true, format!("{} forms at k ∈ {{4, 6}} agree exactly", forms.len())))
}

fn fundamental_with_symbol(p: u64, l: i64) -> i64 {
    (3..)
        .map(|a: i64| -a)
        .find(|&d| is_fundamental_discriminant(d) && kronecker(d, p as i64) == l)
        .expect("fundamental discriminants of every residue symbol exist")
}

/// A form with v_p(e) = e_p, v_p(f) = f_p and χ_D(p) = l.
pub fn unramified_sample_form(p: u64, e_p: u32, f_p: u32, l: i64) -> HalfIntegralForm {
    let d = fundamental_with_symbol(p, l);
    let f0 = (p as i64).pow(f_p - e_p);
    let disc = d * f0 * f0;
    let r = disc.rem_euclid(2);
    let m = (r * r - disc) / 4;
    let scale = (p as i64).pow(e_p);
    HalfIntegralForm::new(scale, scale * r, scale * m)
}

fn unramified() -> Outcome {
    let mut checked = 0usize;
    let mut worst_tail = BigRational::zero();
    for p in tol::UNRAMIFIED_PRIMES {
        let target = rat_pow(p, -tol::UNRAMIFIED_TAIL_EXPONENT);
        let s_min = *tol::UNRAMIFIED_S.iter().min().expect("nonempty");
        let window = window_for(p, s_min, &target)?;
        let mut cases = Vec::new();
        for f_p in 0..=tol::UNRAMIFIED_MAX_F {
            for e_p in 0..=f_p {
                for l in [-1, 0, 1] {
                    cases.push(unramified_sample_form(p, e_p, f_p, l));
                }
            }
        }
        let phis: Vec<Vec<BigRational>> = cases.par_iter().map(|t| phi_coefficients(t, p, window.a)).collect();
        for (t, phi) in cases.iter().zip(&phis) {
            for (deg, c) in phi.iter().enumerate() {
                if c.abs() > phi_bound(p, deg as u32) {
                    return Ok((false, format!("|Φ_{deg}| exceeds its bound at T={t}, p={p}")));
                }
            }
            for chi in [RootOfUnity::one(), RootOfUnity::minus_one()] {
                for s in tol::UNRAMIFIED_S {
                    let tail = unramified_tail(p, s, window.a)?;
                    if tail >= target {
                        return Ok((false, format!("tail {tail} not below p^-10 at p={p}, s={s}")));
                    }
                    let est = OracleEstimate { value: sum_phi_series(phi, p, chi, s), tail: tail.clone() };
                    let closed = unramified_local_factor(&GoodPlaceInput::from_form(t, p, chi, s)?)?;
                    if !est.contains(&closed) {
                        return Ok((false, format!("T={t} p={p} χ(p)={chi} s={s}: closed {closed}, oracle {}", est.value)));
                    }
                    worst_tail = worst_tail.max(tail * rat_pow(p, tol::UNRAMIFIED_TAIL_EXPONENT));
                    checked += 1;
                }
            }
        }
    }
    Ok((true, format!("{checked} cases agree; largest tail·p^10 = {:.3e}", to_f64(&worst_tail))))
}

fn to_f64(q: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

fn volume_row(i: i64, j: i64, n: i64, m: i64, p: u64) -> &'static str {
    let (vn, vm) = (val_or_inf(n, p).unwrap() as i64, val_or_inf(m, p).unwrap() as i64);
    match (2 * j).cmp(&(vm - vn)) {
        std::cmp::Ordering::Less => if i <= vn { "lt-full" } else { "lt-empty" },
        std::cmp::Ordering::Greater => if i + 2 * j <= vm { "gt-full" } else { "gt-empty" },
        std::cmp::Ordering::Equal => {
            if i <= vn {
                "eq-full"
            } else if volume_r_closed_form(i, j, n, m, p).map(|v| v.is_zero()).unwrap_or(true) {
                "eq-nonsquare"
            } else {
                "eq-square"
            }
        }
    }
}

fn volumes() -> Outcome {
    let mut rows = BTreeSet::new();
    let mut checked = 0usize;
    for p in [3u64, 5] {
        let pi = p as i64;
        let forms = [(1, 1), (1, 2), (1, pi * pi), (1, 2 * pi * pi), (pi, 1), (1, pi), (pi * pi, pi), (pi, pi * pi * pi)];
        let mut seen = BTreeSet::new();
        for (n, m) in forms {
            let t = HalfIntegralForm::new(n, 0, m);
            for i in 0..=tol::VOLUME_MAX_I {
                for j in -3..=2 {
                    if i + 2 * j.max(0) > tol::VOLUME_DEPTH as i64 {
                        continue;
                    }
                    let closed = volume_r_closed_form(i, j, n, m, p)?;
                    let flat = volume_r_flat(i, j, &t, p, tol::VOLUME_DEPTH)?;
                    let adaptive = volume_r(i, j, &t, p)?;
                    if flat != closed || adaptive != closed {
                        return Ok((false, format!("p={p} T={t} i={i} j={j}: table {closed}, count {flat}, refine {adaptive}")));
                    }
                    seen.insert(volume_row(i, j, n, m, p));
                    checked += 1;
                }
            }
        }
        if seen.len() < 7 {
            return Ok((false, format!("p={p}: only rows {seen:?} exercised")));
        }
        rows.extend(seen);
    }
    Ok((true, format!("{checked} entries, all {} rows at p ∈ {{3, 5}}, depth {}", rows.len(), tol::VOLUME_DEPTH)))
}

/// (p, v(n), v(m), −nm unit part a square) for the twelve series combinations.
pub fn series_combinations() -> Vec<(i64, i64, u64)> {
    let mut out = Vec::new();
    for p in [3u64, 5] {
        for (vn, vm) in [(0u32, 0u32), (1, 4), (3, 1)] {
            for square in [true, false] {
                let want = if square { 1 } else { -1 };
                let u = (1..p as i64).find(|&u| legendre(-u, p) == want).expect("both classes occur");
                out.push(((p as i64).pow(vn), (p as i64).pow(vm) * u, p));
            }
        }
    }
    out
}

fn series() -> Outcome {
    let combos = series_combinations();
    let d = tol::SERIES_BIDEGREE;
    let results: Vec<Result<Vec<_>>> = combos.par_iter().map(|&(n, m, p)| generating_series_check(n, m, p, d, d)).collect();
    let mut count = 0usize;
    for ((n, m, p), r) in combos.iter().zip(results) {
        for rep in r? {
            if !rep.ok() {
                return Ok((false, format!("T=({n},0,{m}) p={p}: {rep}")));
            }
            count += 1;
        }
    }
    Ok((true, format!("{} combinations, {count} series identities to bidegree ({d},{d})", combos.len())))
}

/// Up to `per_row` forms per row of the K table at p, smallest entries first.
pub fn k_table_forms(p: u64, per_row: usize) -> BTreeMap<&'static str, Vec<HalfIntegralForm>> {
    let pi = p as i64;
    let chi = LocalCharacterData::quadratic(p, RootOfUnity::one());
    let mut out: BTreeMap<&'static str, Vec<HalfIntegralForm>> = BTreeMap::new();
    for m in 1..=400i64 {
        for n in 1..=40i64 {
            for r in (0..=60i64).step_by(p as usize) {
                let t = HalfIntegralForm::new(n, r, m);
                if t.delta().map(|d| d == 0).unwrap_or(true) || (r != 0 && r % pi != 0) {
                    continue;
                }
                let Ok(input) = RamifiedPlaceInput::new(chi.clone(), t, 4) else { continue };
                let Ok(row) = k_row(&input) else { continue };
                let list = out.entry(row.name()).or_default();
                if list.len() < per_row {
                    list.push(t);
                }
            }
        }
    }
    out
}

fn k_table() -> Outcome {
    let tolerance = BigRational::new(BigInt::one(), BigInt::from(10).pow(tol::K_TOLERANCE_DIGITS));
    let mut rows = BTreeSet::new();
    let mut checked = 0usize;
    for p in [3u64, 5] {
        let depth = if p == 3 { tol::K_ORACLE_DEPTH_P3 } else { tol::K_ORACLE_DEPTH_P5 };
        let forms = k_table_forms(p, 2);
        let mut jobs = Vec::new();
        for ts in forms.values() {
            for t in ts {
                for c in [1, -1] {
                    for s in [4, 5] {
                        jobs.push((*t, c, s));
                    }
                }
            }
        }
        let results: Vec<Result<Option<String>>> = jobs
            .par_iter()
            .map(|&(t, c, s)| {
                let input = RamifiedPlaceInput::new(LocalCharacterData::quadratic(p, RootOfUnity::from_sign(c)), t, s)?;
                let table = k_closed_form(&input)?.value.expect("quadratic character at odd p");
                let est = k_oracle(&input, depth)?;
                let diff = (&est.value - &table).to_rational().map(|d| d.abs());
                let ok = est.tail <= tolerance && diff.is_some_and(|d| d <= tolerance && d <= est.tail);
                Ok((!ok).then(|| format!("p={p} T={t} χ(p)={c} s={s}: table {table}, oracle {} ± {}", est.value, to_f64(&est.tail))))
            })
            .collect();
        for r in results {
            if let Some(msg) = r? {
                return Ok((false, msg));
            }
        }
        checked += jobs.len();
        rows.extend(forms.keys().copied());
    }
    let all: BTreeSet<&str> = KRow::ALL.iter().map(|r| r.name()).collect();
    if rows != all {
        let missing: Vec<_> = all.difference(&rows).collect();
        return Ok((false, format!("rows not exercised: {missing:?}")));
    }
    Ok((true, format!("{checked} evaluations over all {} rows within 1e-{}", rows.len(), tol::K_TOLERANCE_DIGITS)))
}

fn point_counts() -> Outcome {
    let mut checked = 0usize;
    for p in (3..=tol::POINT_COUNT_MAX_P).filter(|&p| is_prime(p)) {
        for d in -tol::POINT_COUNT_MAX_D..=tol::POINT_COUNT_MAX_D {
            if d == 0 {
                continue;
            }
            let a = curve_count_ap(d, p);
            let b = curve_count_ap_naive(d, p);
            if a != b {
                return Ok((false, format!("a_{p}(D={d}): Legendre {a}, enumeration {b}")));
            }
            if (a * a) as u64 >= 4 * p {
                return Ok((false, format!("a_{p}(D={d}) = {a} violates |a_p| < 2√p")));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} pairs (p, D) agree and satisfy the Hasse bound")))
}

fn gauss_sums() -> Outcome {
    let tolerance = BigRational::new(BigInt::one(), BigInt::from(10).pow(tol::GAUSS_TOLERANCE_DIGITS));
    let mut checked = 0usize;
    for n in 1..=tol::GAUSS_MAX_N {
        for eta in DirichletCharacter::primitive_characters(n) {
            let g = eta.gauss_sum();
            if &g * &g.conj() != Cyclo::from_int(n as i64) {
                return Ok((false, format!("|G({})|² ≠ {n} exactly", eta.label())));
            }
            let z = eta.gauss_sum_numeric(128);
            let err = (z.abs2().to_rational() - rat(n as i64, 1)).abs();
            if err > tolerance {
                return Ok((false, format!("|G({})|² off by {}", eta.label(), to_f64(&err))));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} primitive characters with N ≤ {}, exact and numeric", tol::GAUSS_MAX_N)))
}

fn support() -> Outcome {
    let spec = EisensteinSpec::from_label(tol::SUPPORT_WEIGHT, tol::SUPPORT_CHARACTER)?;
    let opts = CoefficientOptions::default();
    let b = tol::SUPPORT_RADIUS;
    let mut checked = 0usize;
    for n in -b..=b {
        for r in -b..=b {
            for m in -b..=b {
                let t = HalfIntegralForm::new(n, r, m);
                if in_support(&spec, &t)? {
                    continue;
                }
                let rec = coefficient(&spec, &t, &opts)?;
                if !rec.is_zero() {
                    return Ok((false, format!("a{t} = {} outside the support", rec.value.render(10))));
                }
                checked += 1;
            }
        }
    }
    Ok((true, format!("{checked} forms outside the support vanish for {spec}")))
}

fn bootstrap_oracle() -> Outcome {
    for p in [3u64, 5] {
        let rep = bootstrap(p, tol::BOOTSTRAP_COUNT, tol::BOOTSTRAP_SEED)?;
        if !rep.ok() {
            return Ok((false, format!("p={p} seed={}: {}", rep.seed, rep.mismatches[0])));
        }
    }
    Ok((true, format!("{} elements each over Q_3 and Q_5, seed {}", tol::BOOTSTRAP_COUNT, tol::BOOTSTRAP_SEED)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::content;

    #[test]
    fn sample_forms_have_requested_invariants() {
        for p in [3u64, 5] {
            for f_p in 0..=2u32 {
                for e_p in 0..=f_p {
                    for l in [-1, 0, 1] {
                        let t = unramified_sample_form(p, e_p, f_p, l);
                        let inp = GoodPlaceInput::from_form(&t, p, RootOfUnity::one(), 4).unwrap();
                        assert_eq!((inp.e_p, inp.f_p, inp.l), (e_p, f_p, l), "{t}");
                        assert_eq!(val_or_inf(content(t.n, t.r, t.m).unwrap() as i64, p), Some(e_p));
                    }
                }
            }
        }
    }

    #[test]
    fn twelve_series_combinations() {
        let c = series_combinations();
        assert_eq!(c.len(), 12);
        let distinct: BTreeSet<_> = c.iter().collect();
        assert_eq!(distinct.len(), 12);
    }

    #[test]
    fn fast_criteria_pass() {
        for id in [1u8, 7, 8, 10] {
            let r = run_criterion(id);
            assert!(r.passed, "{r}");
        }
    }
}
