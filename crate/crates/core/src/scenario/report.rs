//! Report serialization with fixed 12-significant-digit floats, so reruns
//! of the same config and seed produce byte-identical files.

use serde::Serialize;
use serde_json::Value;

/// Float formatting used in CSVs.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

fn round_12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Round every float in a JSON tree to 12 significant digits and fold
/// `-0.0` into `0.0`. Integers are left alone.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_12(n.as_f64().expect("f64 number"));
            *value = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub results: Value,
}

impl RunReport {
    pub fn new(
        scenario: &str,
        command: &str,
        seed: u64,
        results: impl Serialize,
    ) -> serde_json::Result<Self> {
        let mut results = serde_json::to_value(results)?;
        round_json(&mut results);
        Ok(Self {
            scenario: scenario.to_string(),
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            results,
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_stable_and_signless_at_zero() {
        let mut v = serde_json::json!({ "a": [0.1 + 0.2, -0.0, 3, 1.0 / 3.0] });
        round_json(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[0.3,0.0,3,0.333333333333]}"#);
        let mut again = v.clone();
        round_json(&mut again);
        assert_eq!(v, again);
    }

    #[test]
    fn csv_floats_have_fixed_width_mantissa() {
        assert_eq!(format_float(0.5), "5.00000000000e-1");
        assert_eq!(format_float(-0.0), "0.00000000000e0");
        assert_eq!(format_float(std::f64::consts::LN_2), "6.93147180560e-1");
    }
}
