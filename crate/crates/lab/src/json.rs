//! Deterministic JSON output: floats as `{:.16e}` (17 significant digits),
//! non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`, object keys
//! sorted.

use std::fmt::Write as _;

use serde_json::Value;

/// A float as a JSON value, non-finite values as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn pairs(v: &[(f64, f64)]) -> Value {
    Value::Array(v.iter().map(|(a, b)| Value::Array(vec![num(*a), num(*b)])).collect())
}

pub fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

/// Read back a float written by [`num`].
pub fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn string(out: &mut String, s: &str) {
    out.push_str(&serde_json::to_string(s).expect("strings serialize"));
}

fn write(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| {
        out.push('\n');
        for _ in 0..d {
            out.push_str("  ");
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&float(n.as_f64().expect("f64 number")));
            } else {
                write!(out, "{n}").expect("writing to a String");
            }
        }
        Value::String(s) => string(out, s),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short scalar arrays (pairs, points) stay on one line
            let flat = items.len() <= 4 && items.iter().all(|i| !i.is_array() && !i.is_object());
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                    if flat {
                        out.push(' ');
                    }
                }
                if !flat {
                    pad(out, depth + 1);
                }
                write(out, item, depth + 1);
            }
            if !flat {
                pad(out, depth);
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (k, (key, item)) in map.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                pad(out, depth + 1);
                string(out, key);
                out.push_str(": ");
                write(out, item, depth + 1);
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

pub fn to_string(v: &Value) -> String {
    let mut out = String::new();
    write(&mut out, v, 0);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_string(&json!({"x": num(0.1), "n": 3, "inf": num(f64::INFINITY)}));
        assert!(s.contains("\"x\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": 3"));
        assert!(s.contains("\"inf\": \"inf\""));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(as_f64(&back["x"]), Some(0.1));
        assert_eq!(as_f64(&back["inf"]), Some(f64::INFINITY));
    }

    #[test]
    fn pairs_are_inline() {
        let s = to_string(&pairs(&[(1.0, 2.0)]));
        assert_eq!(s, "[\n  [1.0000000000000000e0, 2.0000000000000000e0]\n]\n");
    }
}
