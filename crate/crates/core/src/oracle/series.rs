//! Direct summation of the volume generating series against their closed forms.

use std::fmt;

use num_rational::BigRational;

use super::volume::volume_r;
use crate::error::Result;
use crate::form::HalfIntegralForm;
use crate::localfactors::{
    first_series_double, first_series_single, second_series_double, second_series_single, SeriesParams,
};
use crate::series::Series2;

/// Outcome of comparing one generating series coefficientwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesReport {
    pub name: String,
    pub mismatch: Option<((i64, i64), BigRational, BigRational)>,
}

impl SeriesReport {
    pub fn ok(&self) -> bool {
        self.mismatch.is_none()
    }
}

impl fmt::Display for SeriesReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mismatch {
            None => write!(f, "{}: ok", self.name),
            Some(((a, b), l, r)) => write!(f, "{}: X^{a}Y^{b} direct {l} closed {r}", self.name),
        }
    }
}

fn report(name: String, direct: &Series2, closed: &Series2) -> SeriesReport {
    SeriesReport { name, mismatch: direct.first_difference(closed) }
}

/// Compares the four families of series for T = (n, 0, m) through X^mx·Y^my.
pub fn generating_series_check(n: i64, m: i64, p: u64, mx: i64, my: i64) -> Result<Vec<SeriesReport>> {
    let sp = SeriesParams::from_form(n, m, p)?;
    let t = HalfIntegralForm::new(n, 0, m);
    let half = sp.vm.div_euclid(2);
    let mut out = Vec::new();
    for i in 0..=mx {
        let mut direct = Series2::zero(0, my);
        for j in 0..=my {
            direct.add_term(0, j, volume_r(i, -j, &t, p)?);
        }
        out.push(report(format!("first-single(i={i})"), &direct, &first_series_single(i, &sp, my)?));
    }
    let mut direct = Series2::zero(mx, my);
    for i in 1..=mx {
        for j in 0..=my {
            direct.add_term(i, j, volume_r(i, -j, &t, p)?);
        }
    }
    out.push(report("first-double".into(), &direct, &first_series_double(&sp, mx, my)?));
    for i in 0..=mx {
        let mut direct = Series2::zero(0, my);
        for j in 1..=half.min(my) {
            direct.add_term(0, j, volume_r(i, j, &t, p)?);
        }
        out.push(report(format!("second-single(i={i})"), &direct, &second_series_single(i, &sp, my)?));
    }
    let mut direct = Series2::zero(mx, my);
    for i in 0..=mx {
        for j in 1..=half.min(my) {
            direct.add_term(i, j, volume_r(i, j, &t, p)?);
        }
    }
    out.push(report("second-double".into(), &direct, &second_series_double(&sp, mx, my)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_agree_for_small_forms() {
        for (n, m, p) in [(1, 1, 3), (1, 9, 3), (9, 1, 3), (3, 25, 5), (1, 2, 5)] {
            for r in generating_series_check(n, m, p, 6, 6).unwrap() {
                assert!(r.ok(), "T=({n},0,{m}) p={p}: {r}");
            }
        }
    }
}
