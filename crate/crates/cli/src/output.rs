use std::io::Write;

use serde::Serialize;
use serde_json::{Number, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits. Non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(r) = n.as_f64().map(round_sig).and_then(Number::from_f64) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// JSON number for finite `x`, otherwise the strings `"inf"`, `"-inf"` or `"nan"`.
pub fn number(x: f64) -> Value {
    Number::from_f64(x).map(Value::Number).unwrap_or_else(|| {
        Value::String(
            if x.is_nan() {
                "nan"
            } else if x > 0.0 {
                "inf"
            } else {
                "-inf"
            }
            .into(),
        )
    })
}

pub fn to_rounded_value(payload: &impl Serialize) -> Value {
    let mut v = serde_json::to_value(payload).expect("payload serializes");
    round_value(&mut v);
    v
}

/// Prints `payload` to stdout as pretty JSON with rounded floats.
pub fn emit(payload: &impl Serialize) {
    let v = to_rounded_value(payload);
    let text = serde_json::to_string_pretty(&v).expect("value serializes");
    // A closed pipe downstream is not an error of ours.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-2.0f64.sqrt() * 1e-9), -1.41421356237e-9);
        assert_eq!(round_sig(0.0), 0.0);
        assert!(round_sig(f64::INFINITY).is_infinite());
    }

    #[test]
    fn rounds_nested_floats_only() {
        let v = to_rounded_value(&json!({"a": [0.1 + 0.2, 7], "b": {"c": 2.0f64.ln()}}));
        assert_eq!(v, json!({"a": [0.3, 7], "b": {"c": 0.69314718056}}));
    }

    #[test]
    fn non_finite_numbers_become_strings() {
        assert_eq!(number(f64::NEG_INFINITY), json!("-inf"));
        assert_eq!(number(1.5), json!(1.5));
    }
}
