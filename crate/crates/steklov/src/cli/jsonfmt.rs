//! Deterministic JSON/CSV scalar formatting for result artifacts.
//!
//! Results are written by a small explicit serializer (not `serde_json`) so
//! that every float is rendered with 17 significant digits — enough to
//! round-trip any `f64` exactly — and the byte stream depends only on the
//! numeric content. Reruns with the same seed therefore produce
//! byte-identical payloads, which is the reproducibility contract.

use std::fmt::Write as _;

/// Render a float with 17 significant digits (lossless for `f64`).
///
/// Non-finite values have no JSON representation; they are rendered as
/// `null` so a malformed artifact is visible rather than unparseable.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

/// A JSON value with deterministic rendering order.
#[derive(Debug, Clone)]
pub enum Json {
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    /// Object fields render in insertion order.
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    /// Convenience constructor for an array of floats.
    pub fn floats(values: &[f64]) -> Json {
        Json::Arr(values.iter().map(|&v| Json::Num(v)).collect())
    }

    /// Render with two-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        match self {
            Json::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(v) => out.push_str(&fmt_float(*v)),
            Json::Str(s) => write_escaped(out, s),
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    indent(out, depth + 1);
                    item.write(out, depth + 1);
                }
                out.push('\n');
                indent(out, depth);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (k, (key, value)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    indent(out, depth + 1);
                    write_escaped(out, key);
                    out.push_str(": ");
                    value.write(out, depth + 1);
                }
                out.push('\n');
                indent(out, depth);
                out.push('}');
            }
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for &v in &[
            0.5,
            1.0 / 3.0,
            std::f64::consts::PI,
            1e-300,
            -2.2250738585072014e-308,
            6.02214076e23,
            -0.0,
        ] {
            let s = fmt_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} -> {s} -> {back}");
        }
        assert_eq!(fmt_float(f64::NAN), "null");
        assert_eq!(fmt_float(f64::INFINITY), "null");
    }

    #[test]
    fn rendering_is_valid_json_and_stable() {
        let doc = Json::Obj(vec![
            ("name", Json::Str("tilde \"quote\"\n".to_string())),
            ("count", Json::Int(3)),
            ("value", Json::Num(0.1)),
            ("flags", Json::Arr(vec![Json::Bool(true), Json::Bool(false)])),
            ("empty", Json::Arr(vec![])),
            ("nested", Json::Obj(vec![("xs", Json::floats(&[1.0, 2.5]))])),
        ]);
        let a = doc.render();
        let b = doc.render();
        assert_eq!(a, b);
        let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["count"], 3);
        assert_eq!(parsed["value"].as_f64().unwrap(), 0.1);
        assert_eq!(parsed["nested"]["xs"][1].as_f64().unwrap(), 2.5);
    }
}
