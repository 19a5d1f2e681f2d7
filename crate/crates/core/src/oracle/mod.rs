//! Independent brute-force verifiers for the closed forms in [`crate::localfactors`].

use num_rational::BigRational;

use crate::scalar::Cyclo;

pub mod matrix;
pub mod ramified;
pub mod random;
pub mod section;
pub mod series;
pub mod unramified;
pub mod volume;

/// Truncation depths of a brute-force sum and the certified bound on what it omits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationWindow {
    /// Outer depth: the largest exponent summed exactly.
    pub a: u32,
    /// Residue depth of the enumeration.
    pub b: u32,
    pub tail: BigRational,
}

/// A truncated value whose distance to the true value is at most `tail`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleEstimate {
    pub value: Cyclo,
    pub tail: BigRational,
}

impl OracleEstimate {
    /// |value − x| ≤ tail, tested exactly on rational differences and numerically otherwise.
    pub fn contains(&self, x: &Cyclo) -> bool {
        let diff = &self.value - x;
        match diff.to_rational() {
            Some(q) => num_traits::Signed::abs(&q) <= self.tail,
            None => {
                let (re, im) = diff.to_complex(256).to_f64_pair();
                let tail = num_traits::ToPrimitive::to_f64(&self.tail).unwrap_or(f64::INFINITY);
                (re * re + im * im).sqrt() <= tail + 1e-40
            }
        }
    }

    pub fn tail_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.tail).unwrap_or(f64::INFINITY)
    }
}
