//! Browser bindings: single coefficients, the K factor with its oracle, and volumes.
//!
//! Every export returns a JSON object as a string, or an error message.

use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

use eis_core::characters::LocalCharacterData;
use eis_core::form::HalfIntegralForm;
use eis_core::fourier::{coefficient as core_coefficient, CoefficientOptions, EisensteinSpec};
use eis_core::localfactors::{k_closed_form, volume_r_closed_form, RamifiedPlaceInput};
use eis_core::oracle::ramified::k_oracle;
use eis_core::oracle::volume::volume_r;
use eis_core::scalar::{format_rational, Precision, RootOfUnity, Scalar};

const MAX_PRECISION_BITS: u32 = 1024;
const K_ORACLE_DEPTH: u32 = 18;

/// a(T) for weight `k` and nebentypus `label` ("N:index").
#[wasm_bindgen]
pub fn coefficient(k: i32, label: &str, n: i32, r: i32, m: i32, precision_bits: u32) -> Result<String, String> {
    let spec = EisensteinSpec::from_label(k.into(), label).map_err(|e| e.to_string())?;
    let precision = Precision::new(precision_bits.clamp(32, MAX_PRECISION_BITS));
    let opts = CoefficientOptions { precision, ..CoefficientOptions::default() };
    let t = HalfIntegralForm::new(n.into(), r.into(), m.into());
    let rec = core_coefficient(&spec, &t, &opts).map_err(|e| e.to_string())?;
    let value = match &rec.value {
        Scalar::Exact(c) => json!(c.to_string()),
        Scalar::Numeric(z) => {
            let digits = precision.decimal_digits().min(40);
            json!([z.re.to_decimal(digits), z.im.to_decimal(digits)])
        }
    };
    Ok(json!({"n": n, "r": r, "m": m, "value": value, "mode": rec.mode(), "notes": rec.notes}).to_string())
}

/// K(s, T, χ_p) for the Legendre character at odd p with χ_p(p) = `chip` (±1), from the
/// table and from the oracle.
#[wasm_bindgen]
pub fn k_factor(p: u32, chip: i32, n: i32, r: i32, m: i32, s: i32) -> Result<String, String> {
    let p = u64::from(p);
    if p == 2 || !eis_core::arith::is_prime(p) {
        return Err(format!("{p} is not an odd prime"));
    }
    let chi = LocalCharacterData::quadratic(p, RootOfUnity::from_sign(chip.signum().into()));
    let t = HalfIntegralForm::new(n.into(), r.into(), m.into());
    let input = RamifiedPlaceInput::new(chi, t, s.into()).map_err(|e| e.to_string())?;
    let table = k_closed_form(&input).map_err(|e| e.to_string())?;
    let est = k_oracle(&input, K_ORACLE_DEPTH).map_err(|e| e.to_string())?;
    let value = table.value.as_ref().map(|v| v.to_string());
    let agrees = table.value.as_ref().map(|v| est.contains(v));
    Ok(json!({
        "row": table.provenance.to_string(),
        "value": value,
        "oracle": est.value.to_string(),
        "tail": format!("{:.3e}", est.tail_f64()),
        "agrees": agrees,
    })
    .to_string())
}

/// vol R(i, j) for T = (n, 0, m), from the table and by residue refinement.
#[wasm_bindgen]
pub fn volume(p: u32, i: i32, j: i32, n: i32, m: i32) -> Result<String, String> {
    let p = u64::from(p);
    let (i, j, n, m) = (i64::from(i), i64::from(j), i64::from(n), i64::from(m));
    let closed = volume_r_closed_form(i, j, n, m, p).map_err(|e| e.to_string())?;
    let counted = volume_r(i, j, &HalfIntegralForm::new(n, 0, m), p).map_err(|e| e.to_string())?;
    Ok(json!({
        "value": format_rational(&closed),
        "oracle": format_rational(&counted),
        "agrees": closed == counted,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn classical_coefficient() {
        let v = parse(&coefficient(4, "1:1", 1, 0, 0, 128).unwrap());
        assert_eq!(v["value"], "240");
        assert_eq!(v["mode"], "exact");
    }

    #[test]
    fn numeric_coefficient_is_a_pair() {
        let v = parse(&coefficient(5, "3:2", 1, 1, 9, 96).unwrap());
        assert_eq!(v["value"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn invalid_specs_report_the_cause() {
        assert!(coefficient(4, "2:1", 1, 0, 0, 64).unwrap_err().contains("conductor 2"));
        assert!(coefficient(4, "3:2", 1, 0, 9, 64).unwrap_err().contains("parity"));
    }

    #[test]
    fn k_table_and_oracle_agree() {
        let v = parse(&k_factor(3, 1, 1, 3, 9, 4).unwrap());
        assert_eq!(v["agrees"], true);
        assert!(k_factor(2, 1, 1, 2, 4, 4).is_err());
    }

    #[test]
    fn volume_example() {
        let v = parse(&volume(3, 0, 0, 1, 1).unwrap());
        assert_eq!(v["value"], "2/3");
        assert_eq!(v["agrees"], true);
    }
}
