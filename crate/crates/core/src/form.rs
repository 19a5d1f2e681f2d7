//! Half-integral binary quadratic forms T = [[n, r/2], [r/2, m]].

use std::fmt;

use crate::arith::{content, fundamental_discriminant, DiscriminantSplit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfIntegralForm {
    pub n: i64,
    pub r: i64,
    pub m: i64,
}

impl HalfIntegralForm {
    pub fn new(n: i64, r: i64, m: i64) -> Self {
        HalfIntegralForm { n, r, m }
    }

    pub fn zero() -> Self {
        HalfIntegralForm::new(0, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0 && self.r == 0 && self.m == 0
    }

    /// Δ = 4nm − r² = 4·det(T).
    pub fn delta(&self) -> Result<i64> {
        let four_nm = (self.n as i128) * (self.m as i128) * 4;
        let d = four_nm - (self.r as i128) * (self.r as i128);
        i64::try_from(d).map_err(|_| Error::Overflow("discriminant of a form"))
    }

    pub fn rank(&self) -> Result<u8> {
        Ok(if self.is_zero() {
            0
        } else if self.delta()? == 0 {
            1
        } else {
            2
        })
    }

    pub fn is_positive_semidefinite(&self) -> Result<bool> {
        Ok(self.n >= 0 && self.m >= 0 && self.delta()? >= 0)
    }

    pub fn is_positive_definite(&self) -> Result<bool> {
        Ok(self.n > 0 && self.m > 0 && self.delta()? > 0)
    }

    /// e = gcd(n, r, m).
    pub fn content(&self) -> Result<u64> {
        content(self.n, self.r, self.m)
    }

    /// r² − 4nm = D·f² with D fundamental.
    pub fn discriminant_split(&self) -> Result<DiscriminantSplit> {
        fundamental_discriminant(-self.delta()?)
    }

    /// A·T·ᵗA for an integer matrix A = [[a, b], [c, d]].
    pub fn transform(&self, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let (n, r, m) = (self.n as i128, self.r as i128, self.m as i128);
        let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
        let conv = |x: i128| i64::try_from(x).map_err(|_| Error::Overflow("form transform"));
        Ok(HalfIntegralForm {
            n: conv(a * a * n + a * b * r + b * b * m)?,
            r: conv(2 * a * c * n + (a * d + b * c) * r + 2 * b * d * m)?,
            m: conv(c * c * n + c * d * r + d * d * m)?,
        })
    }
}

impl fmt::Display for HalfIntegralForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n, self.r, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_definiteness() {
        let t = HalfIntegralForm::new(1, 1, 1);
        assert_eq!(t.delta().unwrap(), 3);
        assert_eq!(t.rank().unwrap(), 2);
        assert!(t.is_positive_definite().unwrap());
        let t = HalfIntegralForm::new(1, 2, 1);
        assert_eq!(t.rank().unwrap(), 1);
        assert!(t.is_positive_semidefinite().unwrap());
        assert!(!t.is_positive_definite().unwrap());
        assert_eq!(HalfIntegralForm::zero().rank().unwrap(), 0);
        assert!(!HalfIntegralForm::new(1, 3, 1).is_positive_semidefinite().unwrap());
    }

    #[test]
    fn transform_preserves_delta() {
        let t = HalfIntegralForm::new(2, 3, 5);
        let u = t.transform(2, 1, 1, 1).unwrap();
        assert_eq!(u.delta().unwrap(), t.delta().unwrap());
    }
}
