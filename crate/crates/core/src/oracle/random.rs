//! Seeded random symplectic similitudes over Q with p-power denominators, and the
//! bootstrap comparison of the two ways of reading off v(det(A)/u).

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::matrix::{Mat2, Mat4};
use super::section::{delta_exponent_minors, iwasawa_decompose};
use crate::error::Result;
use crate::scalar::{rat, rat_pow};

fn random_entry(rng: &mut ChaCha8Rng, p: u64) -> BigRational {
    let num: i64 = rng.gen_range(-40..=40);
    let k: i64 = rng.gen_range(0..=3);
    rat(num, 1) * rat_pow(p, -k)
}

fn random_nonzero(rng: &mut ChaCha8Rng, p: u64) -> BigRational {
    loop {
        let num: i64 = rng.gen_range(-12..=12);
        if num != 0 {
            return rat(num, 1) * rat_pow(p, rng.gen_range(-2..=2));
        }
    }
}

fn random_generator(rng: &mut ChaCha8Rng, p: u64) -> Mat4 {
    match rng.gen_range(0..6) {
        0 => loop {
            let a = Mat2::new(
                random_entry(rng, p),
                random_entry(rng, p),
                random_entry(rng, p),
                random_entry(rng, p),
            );
            if !a.det().is_zero() {
                break Mat4::levi(&a, &random_nonzero(rng, p)).expect("invertible block");
            }
        },
        1 => Mat4::upper(&random_entry(rng, p), &random_entry(rng, p), &random_entry(rng, p)),
        2 => Mat4::lower(&random_entry(rng, p), &random_entry(rng, p)),
        3 => Mat4::s1(),
        4 => Mat4::s2(),
        _ => Mat4::j(),
    }
}

/// A product of 1 to 8 random generators.
pub fn random_similitude(rng: &mut ChaCha8Rng, p: u64) -> Mat4 {
    let len = rng.gen_range(1..=8);
    let mut g = Mat4::identity();
    for _ in 0..len {
        g = &g * &random_generator(rng, p);
    }
    g
}

/// Result of comparing the minor formula with the column-reduction decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BootstrapReport {
    pub p: u64,
    pub seed: u64,
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl BootstrapReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks `count` random elements: the decomposition must reproduce g, have an integral
/// compact factor with unit similitude, and agree with the minor formula.
pub fn bootstrap(p: u64, count: usize, seed: u64) -> Result<BootstrapReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    for idx in 0..count {
        let g = random_similitude(&mut rng, p);
        let minors = delta_exponent_minors(&g, p)?;
        let dec = iwasawa_decompose(&g, p)?;
        let unit_sim = dec
            .compact
            .similitude()
            .map(|l| super::matrix::is_unit(&l, p))
            .unwrap_or(false);
        if &dec.parabolic * &dec.compact != g || !dec.compact.is_integral(p) || !unit_sim {
            mismatches.push(format!("element {idx}: invalid decomposition of {g}"));
        } else if dec.delta_exponent(p) != minors {
            mismatches.push(format!("element {idx}: minors {minors}, decomposition {}", dec.delta_exponent(p)));
        }
    }
    Ok(BootstrapReport { p, seed, checked: count, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bootstrap_small_batches() {
        for p in [3u64, 5] {
            let r = bootstrap(p, 40, 7).unwrap();
            assert!(r.ok(), "{:?}", r.mismatches);
        }
    }

    #[test]
    fn seeded_words_are_reproducible() {
        let a = random_similitude(&mut ChaCha8Rng::seed_from_u64(3), 3);
        let b = random_similitude(&mut ChaCha8Rng::seed_from_u64(3), 3);
        assert_eq!(a, b);
    }
}
