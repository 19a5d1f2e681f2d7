//! 4×4 rational matrices and the symplectic similitude group attached to J.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::valuation;
use crate::scalar::{format_rational, rat_int};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat4(pub [[BigRational; 4]; 4]);

impl Mat4 {
    pub fn zero() -> Self {
        Mat4(std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero())))
    }

    pub fn identity() -> Self {
        let mut m = Mat4::zero();
        for i in 0..4 {
            m.0[i][i] = BigRational::one();
        }
        m
    }

    pub fn from_ints(rows: [[i64; 4]; 4]) -> Self {
        Mat4(rows.map(|r| r.map(rat_int)))
    }

    pub fn from_blocks(a: &Mat2, b: &Mat2, c: &Mat2, d: &Mat2) -> Self {
        let mut m = Mat4::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a.0[i][j].clone();
                m.0[i][j + 2] = b.0[i][j].clone();
                m.0[i + 2][j] = c.0[i][j].clone();
                m.0[i + 2][j + 2] = d.0[i][j].clone();
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.0[i][j]
    }

    /// The 2×2 block at block position (bi, bj).
    pub fn block(&self, bi: usize, bj: usize) -> Mat2 {
        Mat2(std::array::from_fn(|i| std::array::from_fn(|j| self.0[2 * bi + i][2 * bj + j].clone())))
    }

    pub fn transpose(&self) -> Self {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i].clone())))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| &self.0[i][j] * c)))
    }

    /// J = antidiag(1, 1, −1, −1).
    pub fn j() -> Self {
        Mat4::from_ints([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]])
    }

    pub fn s1() -> Self {
        Mat4::from_ints([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    }

    pub fn s2() -> Self {
        Mat4::from_ints([[1, 0, 0, 0], [0, 0, 1, 0], [0, -1, 0, 0], [0, 0, 0, 1]])
    }

    /// The upper unipotent element with top-right block [[μ, κ], [λ, μ]].
    pub fn upper(lambda: &BigRational, mu: &BigRational, kappa: &BigRational) -> Self {
        let mut m = Mat4::identity();
        m.0[0][2] = mu.clone();
        m.0[0][3] = kappa.clone();
        m.0[1][2] = lambda.clone();
        m.0[1][3] = mu.clone();
        m
    }

    /// The lower unipotent element with bottom-left block [[x, 0], [y, x]].
    pub fn lower(x: &BigRational, y: &BigRational) -> Self {
        let mut m = Mat4::identity();
        m.0[2][0] = x.clone();
        m.0[3][0] = y.clone();
        m.0[3][1] = x.clone();
        m
    }

    /// Levi element with top-left block A and similitude u.
    pub fn levi(a: &Mat2, u: &BigRational) -> Option<Self> {
        let d = a.dual()?.scale(u);
        Some(Mat4::from_blocks(a, &Mat2::zero(), &Mat2::zero(), &d))
    }

    pub fn diag(d: [BigRational; 4]) -> Self {
        let mut m = Mat4::zero();
        for (i, x) in d.into_iter().enumerate() {
            m.0[i][i] = x;
        }
        m
    }

    /// λ with ᵗg·J·g = λ·J, if g is a symplectic similitude.
    pub fn similitude(&self) -> Option<BigRational> {
        let j = Mat4::j();
        let form = &(&self.transpose() * &j) * self;
        let lambda = form.0[0][3].clone();
        if lambda.is_zero() || form != j.scale(&lambda) {
            return None;
        }
        Some(lambda)
    }

    pub fn det(&self) -> BigRational {
        let mut a = self.0.clone();
        let mut det = BigRational::one();
        for col in 0..4 {
            let Some(piv) = (col..4).find(|&r| !a[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= &a[col][col];
            for r in col + 1..4 {
                let f = &a[r][col] / &a[col][col];
                for c in col..4 {
                    let sub = &f * &a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
        det
    }

    /// Inverse of a symplectic similitude, λ⁻¹·J⁻¹·ᵗg·J.
    pub fn similitude_inverse(&self) -> Option<Self> {
        let lambda = self.similitude()?;
        let j = Mat4::j();
        let jinv = j.scale(&-BigRational::one());
        Some((&(&jinv * &self.transpose()) * &j).scale(&(BigRational::one() / lambda)))
    }

    /// The six 2×2 minors of the bottom two rows.
    pub fn bottom_minors(&self) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(6);
        for a in 0..4 {
            for b in a + 1..4 {
                out.push(&self.0[2][a] * &self.0[3][b] - &self.0[2][b] * &self.0[3][a]);
            }
        }
        out
    }

    /// Every entry lies in Z_(p).
    pub fn is_integral(&self, p: u64) -> bool {
        let pb = BigInt::from(p);
        self.0.iter().flatten().all(|x| !(x.denom() % &pb).is_zero())
    }

    /// Minimum p-adic valuation over the nonzero entries of a row.
    pub fn row_min_valuation(&self, row: usize, p: u64) -> Option<i64> {
        self.0[row].iter().filter(|x| !x.is_zero()).map(|x| valuation(x, p).expect("nonzero").v).min()
    }
}

impl Mul<&Mat4> for &Mat4 {
    type Output = Mat4;
    fn mul(self, o: &Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = BigRational::zero();
                for k in 0..4 {
                    if !self.0[i][k].is_zero() && !o.0[k][j].is_zero() {
                        acc += &self.0[i][k] * &o.0[k][j];
                    }
                }
                acc
            })
        }))
    }
}

impl fmt::Display for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.0.iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>().join(", ")).collect();
        write!(f, "[[{}]]", rows.join("], ["))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2(pub [[BigRational; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2(std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero())))
    }

    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn det(&self) -> BigRational {
        &self.0[0][0] * &self.0[1][1] - &self.0[0][1] * &self.0[1][0]
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Mat2(std::array::from_fn(|i| std::array::from_fn(|j| &self.0[i][j] * c)))
    }

    /// J'·ᵗA⁻¹·J' with J' = antidiag(1, 1), the block paired with A in the Levi.
    pub fn dual(&self) -> Option<Self> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let [[a, b], [c, d]] = &self.0;
        Some(Mat2::new(a.clone(), -b.clone(), -c.clone(), d.clone()).scale(&(BigRational::one() / det)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        self.0[0][1].is_zero() && self.0[1][0].is_zero()
    }
}

/// Absolute value |x|_p of a rational, as an exact rational.
pub fn p_abs(x: &BigRational, p: u64) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    crate::scalar::rat_pow(p, -valuation(x, p).expect("nonzero").v)
}

/// Sign-insensitive check that a rational is a p-adic unit.
pub fn is_unit(x: &BigRational, p: u64) -> bool {
    !x.is_zero() && valuation(&x.abs(), p).map(|v| v.v == 0).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn generators_are_symplectic() {
        for g in [Mat4::j(), Mat4::s1(), Mat4::s2(), Mat4::upper(&rat(1, 3), &rat(2, 9), &rat(5, 7))] {
            assert_eq!(g.similitude(), Some(BigRational::one()));
        }
        let a = Mat2::new(rat(1, 3), rat(2, 1), rat(0, 1), rat(5, 1));
        let l = Mat4::levi(&a, &rat(7, 1)).unwrap();
        assert_eq!(l.similitude(), Some(rat(7, 1)));
        let inv = l.similitude_inverse().unwrap();
        assert_eq!(&l * &inv, Mat4::identity());
    }

    #[test]
    fn determinant_of_similitude() {
        let a = Mat2::new(rat(3, 1), rat(1, 1), rat(1, 1), rat(1, 1));
        let l = Mat4::levi(&a, &rat(5, 1)).unwrap();
        assert_eq!(l.det(), rat(25, 1));
    }
}
