//! Truncated bivariate power series Σ c_{a,b} X^a Y^b with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::format_rational;

/// Series truncated to 0 ≤ a ≤ max_x and 0 ≤ b ≤ max_y.
///
/// Intermediate Laurent monomials with negative exponents are allowed while building
/// finite numerators; [`Series2::mul`] requires non-negative exponents on both sides so
/// that truncation is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series2 {
    max_x: i64,
    max_y: i64,
    terms: BTreeMap<(i64, i64), BigRational>,
}

impl Series2 {
    pub fn zero(max_x: i64, max_y: i64) -> Self {
        Series2 { max_x, max_y, terms: BTreeMap::new() }
    }

    pub fn monomial(c: BigRational, a: i64, b: i64, max_x: i64, max_y: i64) -> Self {
        let mut s = Series2::zero(max_x, max_y);
        s.add_term(a, b, c);
        s
    }

    pub fn one(max_x: i64, max_y: i64) -> Self {
        Series2::monomial(BigRational::one(), 0, 0, max_x, max_y)
    }

    pub fn max_x(&self) -> i64 {
        self.max_x
    }

    pub fn max_y(&self) -> i64 {
        self.max_y
    }

    /// Adds c·X^a·Y^b, dropping it if it lies above the truncation in a non-negative direction.
    pub fn add_term(&mut self, a: i64, b: i64, c: BigRational) {
        if c.is_zero() || a > self.max_x || b > self.max_y {
            return;
        }
        let entry = self.terms.entry((a, b)).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn coeff(&self, a: i64, b: i64) -> BigRational {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &BigRational)> {
        self.terms.iter()
    }

    pub fn is_proper(&self) -> bool {
        self.terms.keys().all(|&(a, b)| a >= 0 && b >= 0)
    }

    pub fn add(&self, o: &Series2) -> Series2 {
        let mut out = self.clone();
        for (&(a, b), c) in &o.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Series2) -> Series2 {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Series2 {
        let mut out = Series2::zero(self.max_x, self.max_y);
        for (&(a, b), v) in &self.terms {
            out.add_term(a, b, v * c);
        }
        out
    }

    /// Multiplies by X^a·Y^b.
    pub fn shift(&self, a: i64, b: i64) -> Series2 {
        let mut out = Series2::zero(self.max_x, self.max_y);
        for (&(x, y), v) in &self.terms {
            out.add_term(x + a, y + b, v.clone());
        }
        out
    }

    pub fn mul(&self, o: &Series2) -> Result<Series2> {
        if !self.is_proper() || !o.is_proper() {
            return Err(Error::domain("truncated product of a series with negative exponents"));
        }
        let mut out = Series2::zero(self.max_x.min(o.max_x), self.max_y.min(o.max_y));
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &o.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        Ok(out)
    }

    /// 1/(1 − c·X^a·Y^b) for a monomial with (a, b) ≠ (0, 0) and a, b ≥ 0.
    pub fn geometric(c: &BigRational, a: i64, b: i64, max_x: i64, max_y: i64) -> Result<Series2> {
        if a < 0 || b < 0 || (a == 0 && b == 0) {
            return Err(Error::domain("geometric series needs a monomial of positive degree"));
        }
        let mut out = Series2::zero(max_x, max_y);
        let mut coeff = BigRational::one();
        let mut k = 0i64;
        while k * a <= max_x && k * b <= max_y {
            out.add_term(k * a, k * b, coeff.clone());
            coeff *= c;
            k += 1;
        }
        Ok(out)
    }

    /// The finite sum Σ_{t<count} (X^a·Y^b)^t, exponents of any sign.
    pub fn finite_geometric(a: i64, b: i64, count: i64, max_x: i64, max_y: i64) -> Series2 {
        let mut out = Series2::zero(max_x, max_y);
        for t in 0..count.max(0) {
            out.terms.insert((t * a, t * b), BigRational::one());
        }
        out.terms.retain(|&(x, y), _| x <= max_x && y <= max_y);
        out
    }

    /// First monomial (in lexicographic order) where the two series differ.
    pub fn first_difference(&self, o: &Series2) -> Option<((i64, i64), BigRational, BigRational)> {
        let max_x = self.max_x.min(o.max_x);
        let max_y = self.max_y.min(o.max_y);
        let keys: std::collections::BTreeSet<_> = self.terms.keys().chain(o.terms.keys()).copied().collect();
        keys.into_iter()
            .filter(|&(a, b)| a <= max_x && b <= max_y)
            .map(|(a, b)| ((a, b), self.coeff(a, b), o.coeff(a, b)))
            .find(|(_, l, r)| l != r)
    }
}

impl fmt::Display for Series2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(a, b), c)| format!("{}*X^{}*Y^{}", format_rational(c), a, b))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn geometric_times_one_minus_is_one() {
        let g = Series2::geometric(&rat(1, 3), 1, 1, 6, 6).unwrap();
        let mut f = Series2::one(6, 6);
        f.add_term(1, 1, rat(-1, 3));
        assert_eq!(g.mul(&f).unwrap(), Series2::one(6, 6));
    }

    #[test]
    fn finite_geometric_with_negative_exponent() {
        let q = Series2::finite_geometric(2, -1, 3, 6, 6);
        assert_eq!(q.coeff(4, -2), rat(1, 1));
        assert!(!q.is_proper());
        assert!(q.shift(0, 2).is_proper());
    }
}
