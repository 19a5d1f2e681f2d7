//! Values of the spherical and the ramified local sections on explicit group elements.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::{p_abs, Mat2, Mat4};
use crate::arith::valuation;
use crate::characters::LocalCharacterData;
use crate::error::{Error, Result};
use crate::scalar::{rat_pow, Cyclo, RootOfUnity};

fn v(x: &BigRational, p: u64) -> i64 {
    valuation(x, p).expect("nonzero").v
}

fn similitude(g: &Mat4) -> Result<BigRational> {
    g.similitude().ok_or_else(|| Error::domain(format!("{g} is not a symplectic similitude")))
}

/// v(det(A)/u) in g = [[A, *], [0, u·Â]]·k, read off the minors of the bottom two rows.
pub fn delta_exponent_minors(g: &Mat4, p: u64) -> Result<i64> {
    let lambda = similitude(g)?;
    let min_minor = g
        .bottom_minors()
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| v(x, p))
        .min()
        .ok_or_else(|| Error::domain("bottom rows of a similitude have rank two"))?;
    Ok(v(&lambda, p) - min_minor)
}

/// f°(g) for the normalized spherical vector with unramified χ_p.
pub fn spherical_section_value(g: &Mat4, chi_at_p: RootOfUnity, s: i64, p: u64) -> Result<Cyclo> {
    let e = delta_exponent_minors(g, p)?;
    Ok(chi_at_p.pow(e).to_cyclo().scale(&rat_pow(p, -e * s)))
}

/// g = P·k with P in the Siegel parabolic and k integral with unit similitude.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IwasawaDecomposition {
    pub parabolic: Mat4,
    pub compact: Mat4,
}

impl IwasawaDecomposition {
    /// v(det(A)/u) from the parabolic factor.
    pub fn delta_exponent(&self, p: u64) -> i64 {
        let a = self.parabolic.block(0, 0);
        let u = self.parabolic.similitude().expect("similitude");
        v(&a.det(), p) - v(&u, p)
    }
}

fn pair(i: usize) -> usize {
    3 - i
}

/// The symplectic elementary matrix whose right action adds t·(column i) to column j.
fn elementary(i: usize, j: usize, t: &BigRational) -> Mat4 {
    let mut base = Mat4::identity();
    base.0[i][j] += t;
    if j == pair(i) {
        return base;
    }
    for sigma in [BigRational::one(), -BigRational::one()] {
        let mut m = base.clone();
        m.0[pair(j)][pair(i)] += &sigma * t;
        if m.similitude() == Some(BigRational::one()) {
            return m;
        }
    }
    unreachable!("every transvection pairs with a companion")
}

/// Direct decomposition by symplectic column operations over Z_(p).
pub fn iwasawa_decompose(g: &Mat4, p: u64) -> Result<IwasawaDecomposition> {
    similitude(g)?;
    let mut h = g.clone();
    let mut acc = Mat4::identity();
    let mut apply = |h: &mut Mat4, m: Mat4| {
        *h = &*h * &m;
        acc = &acc * &m;
    };
    let pivot_col = (0..4)
        .filter(|&c| !h.0[3][c].is_zero())
        .min_by_key(|&c| (v(&h.0[3][c], p), std::cmp::Reverse(c)))
        .ok_or_else(|| Error::domain("singular element"))?;
    match pivot_col {
        3 => {}
        2 => apply(&mut h, Mat4::s1()),
        1 => {
            apply(&mut h, Mat4::s1());
            apply(&mut h, Mat4::j());
        }
        _ => apply(&mut h, Mat4::j()),
    }
    for col in [2usize, 1, 0] {
        if !h.0[3][col].is_zero() {
            let t = -&h.0[3][col] / &h.0[3][3];
            apply(&mut h, elementary(3, col, &t));
        }
    }
    if !h.0[2][0].is_zero() {
        return Err(Error::domain("bottom rows are not isotropic"));
    }
    if !h.0[2][1].is_zero() {
        if h.0[2][2].is_zero() || v(&h.0[2][1], p) < v(&h.0[2][2], p) {
            apply(&mut h, Mat4::s2());
        }
        let t = -&h.0[2][1] / &h.0[2][2];
        apply(&mut h, elementary(2, 1, &t));
    }
    if !h.block(1, 0).is_zero() {
        return Err(Error::domain("column reduction did not reach the parabolic"));
    }
    let compact = acc.similitude_inverse().expect("product of symplectic matrices");
    debug_assert_eq!(&h * &compact, *g);
    Ok(IwasawaDecomposition { parabolic: h, compact })
}

/// The element s₂s₁s₂ through which the integral over the unipotent radical runs.
pub fn weyl_s2s1s2() -> Mat4 {
    &(&Mat4::s2() * &Mat4::s1()) * &Mat4::s2()
}

/// k lies in the paramodular group K(p^level) with unit similitude.
pub fn in_paramodular(k: &Mat4, p: u64, level: i64) -> bool {
    let Some(lambda) = k.similitude() else { return false };
    if v(&lambda, p) != 0 {
        return false;
    }
    let bound = |i: usize, j: usize| -> i64 {
        match (i, j) {
            (0, 3) => -level,
            (1, 0) | (2, 0) | (3, 0) | (3, 1) | (3, 2) => level,
            _ => 0,
        }
    };
    (0..4).all(|i| (0..4).all(|j| k.0[i][j].is_zero() || v(&k.0[i][j], p) >= bound(i, j)))
}

/// One factorization g = P·C(x, y)·k used to evaluate the ramified section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamifiedDecomposition {
    pub parabolic: Mat4,
    pub x: BigRational,
    pub y: BigRational,
    pub compact: Mat4,
}

impl RamifiedDecomposition {
    pub fn product(&self) -> Mat4 {
        &(&self.parabolic * &Mat4::lower(&self.x, &self.y)) * &self.compact
    }
}

/// Explicit decomposition of s₂s₁s₂·n(λ, μ, κ) when it lies in the support, or `None`.
pub fn ramified_decomposition(
    lambda: &BigRational,
    mu: &BigRational,
    kappa: &BigRational,
    n: u32,
    p: u64,
) -> Option<RamifiedDecomposition> {
    let n = n as i64;
    if mu.is_zero() {
        return None;
    }
    let q = rat_pow(p, 2 * n);
    let qi = rat_pow(p, -2 * n);
    let zero = BigRational::zero;
    let one = BigRational::one;
    let w_a = Mat4([
        [zero(), zero(), zero(), qi.clone()],
        [zero(), zero(), one(), zero()],
        [zero(), -one(), zero(), zero()],
        [-q.clone(), zero(), zero(), zero()],
    ]);
    let vl = if lambda.is_zero() { i64::MAX } else { v(lambda, p) };
    if vl >= 0 && v(mu, p) == -n && (kappa.is_zero() || v(kappa, p) >= -2 * n) {
        let parabolic = Mat4([
            [zero(), one(), zero(), zero()],
            [q.clone(), zero(), zero(), zero()],
            [zero(), zero(), zero(), qi.clone()],
            [zero(), zero(), one(), zero()],
        ]);
        let mut u = Mat4::identity();
        u.0[0][3] = kappa.clone();
        u.0[1][2] = lambda.clone();
        let compact = &w_a * &u;
        return Some(RamifiedDecomposition { parabolic, x: -mu * &q, y: zero(), compact });
    }
    if vl < 0 && v(mu, p) == -n + vl {
        let shift = kappa - mu * mu / lambda;
        if !shift.is_zero() && v(&shift, p) < -2 * n {
            return None;
        }
        let parabolic = Mat4([
            [-&q * mu / lambda, one() / lambda, -one(), zero()],
            [q.clone(), zero(), zero(), zero()],
            [zero(), zero(), mu.clone(), qi.clone()],
            [zero(), zero(), lambda.clone(), zero()],
        ]);
        let compact = Mat4([
            [zero(), zero(), zero(), qi.clone()],
            [zero(), -one(), zero(), zero()],
            [zero(), -one() / lambda, -one(), zero()],
            [-q.clone(), zero(), zero(), zero()],
        ]);
        let x = -&q * mu / lambda;
        let y = -(&q * &q) * shift;
        return Some(RamifiedDecomposition { parabolic, x, y, compact });
    }
    None
}

/// χ(det(A)/u)·|det(A)/u|^s for P = [[A, *], [0, u·Â]].
fn induction_factor(parabolic: &Mat4, chi: &LocalCharacterData, s: i64) -> Result<Cyclo> {
    let u = similitude(parabolic)?;
    let ratio = parabolic.block(0, 0).det() / u;
    let abs = p_abs(&ratio, chi.p);
    let abs_s = if s >= 0 { num_traits::pow(abs, s as usize) } else { num_traits::pow(abs.recip(), (-s) as usize) };
    Ok(chi.chi(&ratio)?.to_cyclo().scale(&abs_s))
}

/// f(C(x, y)) for a lower unipotent element inside the support.
fn lower_value(x: &BigRational, y: &BigRational, chi: &LocalCharacterData) -> Result<Option<Cyclo>> {
    let n = chi.n_p as i64;
    if x.is_zero() && y.is_zero() {
        return Ok(Some(Cyclo::zero()));
    }
    if !x.is_zero() && v(x, chi.p) == n && (y.is_zero() || v(y, chi.p) >= 2 * n) {
        return Ok(Some(chi.chi(x)?.inv().to_cyclo()));
    }
    Ok(None)
}

fn as_lower(g: &Mat4) -> Option<(BigRational, BigRational)> {
    let c = g.block(1, 0);
    let id = Mat2::new(BigRational::one(), BigRational::zero(), BigRational::zero(), BigRational::one());
    if g.block(0, 0) != id || g.block(1, 1) != id || !g.block(0, 1).is_zero() {
        return None;
    }
    if !c.0[0][1].is_zero() || c.0[0][0] != c.0[1][1] {
        return None;
    }
    Some((c.0[0][0].clone(), c.0[1][0].clone()))
}

/// f(g) for the distinguished paramodular section with ramified χ_p.
///
/// Supported elements are the lower unipotents C(x, y) and products t·s₂s₁s₂·n(λ, μ, κ)
/// with t diagonal in the Siegel parabolic.
pub fn ramified_section_value(g: &Mat4, chi: &LocalCharacterData, s: i64) -> Result<Cyclo> {
    if chi.n_p == 0 {
        return Err(Error::domain("the ramified section needs n_p > 0"));
    }
    similitude(g)?;
    if let Some((x, y)) = as_lower(g) {
        return lower_value(&x, &y, chi)?.ok_or_else(|| Error::UnsupportedPlace {
            p: chi.p,
            reason: "lower unipotent element outside the classified family".into(),
        });
    }
    let w = weyl_s2s1s2();
    let h = &w.similitude_inverse().expect("Weyl element") * g;
    let (a, d) = (h.block(0, 0), h.block(1, 1));
    if !h.block(1, 0).is_zero() || !a.is_diagonal() || !d.is_diagonal() {
        return Err(Error::UnsupportedPlace { p: chi.p, reason: "element outside the classified families".into() });
    }
    let torus = Mat4::diag([a.0[0][0].clone(), a.0[1][1].clone(), d.0[0][0].clone(), d.0[1][1].clone()]);
    let unip = &torus.similitude_inverse().expect("torus") * &h;
    let (lambda, mu, kappa) = (unip.0[1][2].clone(), unip.0[0][2].clone(), unip.0[0][3].clone());
    if unip != Mat4::upper(&lambda, &mu, &kappa) {
        return Err(Error::UnsupportedPlace { p: chi.p, reason: "unipotent part is not symmetric".into() });
    }
    let conj = &(&w * &torus) * &w.similitude_inverse().expect("Weyl element");
    let outer = induction_factor(&conj, chi, s)?;
    let Some(dec) = ramified_decomposition(&lambda, &mu, &kappa, chi.n_p, chi.p) else {
        return Ok(Cyclo::zero());
    };
    let inner = induction_factor(&dec.parabolic, chi, s)?;
    let c = lower_value(&dec.x, &dec.y, chi)?.expect("decomposition lands in the support");
    Ok(&(&outer * &inner) * &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn spherical_examples() {
        let chi = RootOfUnity::minus_one();
        assert_eq!(spherical_section_value(&Mat4::identity(), chi, 4, 3).unwrap(), Cyclo::one());
        assert_eq!(spherical_section_value(&weyl_s2s1s2(), chi, 4, 3).unwrap(), Cyclo::one());
        let g = Mat4::diag([rat(3, 1), rat(3, 1), rat(1, 3), rat(1, 3)]);
        assert_eq!(spherical_section_value(&g, chi, 4, 3).unwrap(), Cyclo::from_rational(rat(1, 6561)));
    }

    #[test]
    fn direct_decomposition_reproduces_element() {
        let g = &weyl_s2s1s2() * &Mat4::upper(&rat(1, 9), &rat(2, 3), &rat(4, 27));
        let dec = iwasawa_decompose(&g, 3).unwrap();
        assert_eq!(&dec.parabolic * &dec.compact, g);
        assert!(dec.compact.is_integral(3));
        assert_eq!(dec.delta_exponent(3), delta_exponent_minors(&g, 3).unwrap());
    }

    #[test]
    fn ramified_normalization() {
        let chi = LocalCharacterData::quadratic(3, RootOfUnity::minus_one());
        assert!(ramified_section_value(&Mat4::identity(), &chi, 4).unwrap().is_zero());
        let c0 = Mat4::lower(&rat(3, 1), &rat(0, 1));
        let expect = chi.chi_int(3).unwrap().inv().to_cyclo();
        assert_eq!(ramified_section_value(&c0, &chi, 4).unwrap(), expect);
    }

    #[test]
    fn ramified_decompositions_replay() {
        let p = 3u64;
        for (lambda, mu, kappa) in [
            (rat(5, 1), rat(2, 3), rat(7, 9)),
            (rat(0, 1), rat(1, 3), rat(0, 1)),
            (rat(2, 9), rat(4, 27), rat(8, 81) + rat(5, 9)),
        ] {
            let dec = ramified_decomposition(&lambda, &mu, &kappa, 1, p).unwrap();
            let g = &weyl_s2s1s2() * &Mat4::upper(&lambda, &mu, &kappa);
            assert_eq!(dec.product(), g);
            assert!(in_paramodular(&dec.compact, p, 2));
        }
    }

    #[test]
    fn ramified_paramodular_invariance() {
        let p = 3u64;
        let chi = LocalCharacterData::quadratic(p, RootOfUnity::one());
        let g = &weyl_s2s1s2() * &Mat4::upper(&rat(2, 9), &rat(4, 27), &(rat(8, 81) + rat(1, 9)));
        let base = ramified_section_value(&g, &chi, 4).unwrap();
        assert!(!base.is_zero());
        for k in [
            Mat4::upper(&rat_int(4), &rat_int(-7), &rat(5, 9)),
            Mat4::diag([rat_int(2), rat_int(5), rat_int(2), rat_int(5)]),
            Mat4::diag([rat_int(-1), rat_int(1), rat_int(-1), rat_int(1)]),
        ] {
            assert!(in_paramodular(&k, p, 2));
            assert_eq!(ramified_section_value(&(&g * &k), &chi, 4).unwrap(), base);
        }
    }
}
