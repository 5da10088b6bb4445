//! Canonical JSON: object keys sorted, floats in scientific notation with 17
//! significant digits, integers verbatim, two-space indentation. Parsing a
//! canonical document and writing it again reproduces it byte for byte.

use serde_json::Value;

pub fn to_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

/// Parses `text` and writes it back canonically.
pub fn normalize(text: &str) -> serde_json::Result<String> {
    Ok(to_string(&serde_json::from_str(text)?))
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn indent(out: &mut String, depth: usize) {
    out.push('\n');
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let flat = items.iter().all(|v| !v.is_array() && !v.is_object());
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                    if flat {
                        out.push(' ');
                    }
                }
                if !flat {
                    indent(out, depth + 1);
                }
                write_value(out, item, depth + 1);
            }
            if !flat {
                indent(out, depth);
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                indent(out, depth + 1);
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*key], depth + 1);
            }
            indent(out, depth);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(5.0), "5.0000000000000000e0");
        assert_eq!(format_float(-2.5e-300), "-2.5000000000000000e-300");
    }

    #[test]
    fn keys_sorted_and_round_trip() {
        let v = json!({"z": 1, "a": [0.1, 2.0, {"y": true, "b": null}], "m": "x\"y", "e": []});
        let text = to_string(&v);
        assert!(text.find("\"a\"").unwrap() < text.find("\"z\"").unwrap());
        assert_eq!(normalize(&text).unwrap(), text);
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"][0].as_f64(), Some(0.1));
    }

    #[test]
    fn extreme_floats_round_trip() {
        for x in [f64::MIN_POSITIVE, f64::MAX, 5e-324, 1.0 / 3.0, -0.0, 123456789.12345679] {
            let text = to_string(&json!([x]));
            let back: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(back[0].as_f64().unwrap().to_bits(), x.to_bits(), "{text}");
            assert_eq!(normalize(&text).unwrap(), text);
        }
    }
}
