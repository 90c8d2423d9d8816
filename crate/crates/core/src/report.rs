//! Output helpers shared by the front ends: float rounding for stable diffs and
//! the run manifest.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

/// Significant digits kept in emitted floats.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to `digits` significant digits. Non-finite values pass through.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 || digits == 0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Rounds every float in a JSON tree in place.
pub fn round_value(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(|x| round_sig(x, digits)).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| round_value(x, digits)),
        Value::Object(m) => m.values_mut().for_each(|x| round_value(x, digits)),
        _ => {}
    }
}

/// Pretty JSON with floats at [`SIGNIFICANT_DIGITS`].
pub fn to_json<T: Serialize + ?Sized>(x: &T) -> Result<String> {
    let mut v = serde_json::to_value(x)?;
    round_value(&mut v, SIGNIFICANT_DIGITS);
    Ok(serde_json::to_string_pretty(&v)?)
}

/// A float formatted at [`SIGNIFICANT_DIGITS`], for tabular output.
pub fn fmt_f64(x: f64) -> String {
    let r = round_sig(x, SIGNIFICANT_DIGITS);
    if r != 0.0 && !(1e-4..1e15).contains(&r.abs()) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Everything needed to rerun a command and get the same output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub args: Vec<String>,
    /// Resolved configuration of the run.
    pub config: Value,
    pub seeds: Vec<u64>,
    pub threads: usize,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub exit_code: i32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.44298916534812345, 12), 0.442989165348);
        assert_eq!(round_sig(-1234.56789012345, 12), -1234.56789012);
        assert_eq!(round_sig(0.0, 12), 0.0);
        assert!(round_sig(f64::NAN, 12).is_nan());
        assert_eq!(fmt_f64(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_f64(2.0), "2");
        assert_eq!(fmt_f64(-2.6645352591003757e-15), "-2.6645352591e-15");
        assert_eq!(fmt_f64(0.0), "0");
    }

    #[test]
    fn json_floats_are_rounded_recursively() {
        let s = to_json(&serde_json::json!({"a": [std::f64::consts::PI, 1], "b": {"c": 1e-20 / 3.0}})).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert!(s.contains("3.14159265359,"));
        assert_ne!(v["a"][0].as_f64().unwrap(), std::f64::consts::PI);
        assert_eq!(v["a"][1].as_u64().unwrap(), 1);
        assert!(s.contains("3.33333333333e-21"));
    }
}
