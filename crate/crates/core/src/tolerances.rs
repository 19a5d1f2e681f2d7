//! Pinned tolerances, budgets and parameter ranges of the acceptance criteria.

use std::time::Duration;

/// Criterion 1: n range and runtime budget.
pub const RANK_ONE_MAX_N: i64 = 10;
pub const RANK_ONE_BUDGET: Duration = Duration::from_secs(1);

/// Criterion 2: weights, discriminant bound, entry bound for the enumeration, and budget.
pub const LEVEL_ONE_WEIGHTS: [i64; 2] = [4, 6];
pub const LEVEL_ONE_MAX_DELTA: i64 = 100;
/// Every GL₂(Z)-class with 0 < Δ ≤ 100 has a reduced representative with n ≤ m ≤ 25.
pub const LEVEL_ONE_MAX_ENTRY: i64 = 25;
pub const LEVEL_ONE_BUDGET: Duration = Duration::from_secs(60);

/// Criterion 3: primes, weights s, and the certified tail bound p^{−10}.
pub const UNRAMIFIED_PRIMES: [u64; 2] = [3, 5];
pub const UNRAMIFIED_S: [i64; 2] = [4, 5];
pub const UNRAMIFIED_TAIL_EXPONENT: i64 = 10;
pub const UNRAMIFIED_MAX_F: u32 = 2;
pub const UNRAMIFIED_BUDGET: Duration = Duration::from_secs(600);

/// Criterion 4: residue depth B and the range of i.
pub const VOLUME_DEPTH: u32 = 8;
pub const VOLUME_MAX_I: i64 = 4;

/// Criterion 5: truncation bidegree.
pub const SERIES_BIDEGREE: i64 = 6;

/// Criterion 6: absolute tolerance 10^{−10}, and oracle depths at p = 3 and p = 5.
pub const K_TOLERANCE_DIGITS: u32 = 10;
pub const K_ORACLE_DEPTH_P3: u32 = 26;
pub const K_ORACLE_DEPTH_P5: u32 = 17;

/// Criterion 7: prime and |D| ranges.
pub const POINT_COUNT_MAX_P: u64 = 50;
pub const POINT_COUNT_MAX_D: i64 = 20;

/// Criterion 8: conductor range and numeric tolerance 10^{−25}.
pub const GAUSS_MAX_N: u64 = 50;
pub const GAUSS_TOLERANCE_DIGITS: u32 = 25;

/// Criterion 9: entry radius, weight and character.
pub const SUPPORT_RADIUS: i64 = 12;
pub const SUPPORT_WEIGHT: i64 = 5;
pub const SUPPORT_CHARACTER: &str = "3:2";

/// Criterion 10: sample size and seed.
pub const BOOTSTRAP_COUNT: usize = 200;
pub const BOOTSTRAP_SEED: u64 = 20_240_601;
