//! Deterministic JSON output: fixed key order, fixed significant digits.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj<K: Into<String>>(pairs: impl IntoIterator<Item = (K, Json)>) -> Json {
        Json::Obj(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn str(s: impl Into<String>) -> Json {
        Json::Str(s.into())
    }

    pub fn nums(xs: &[f64]) -> Json {
        Json::Arr(xs.iter().map(|x| Json::Num(*x)).collect())
    }

    pub fn ints(xs: &[i64]) -> Json {
        Json::Arr(xs.iter().map(|x| Json::Int(*x)).collect())
    }

    /// Complex numbers as `[re, im]`.
    pub fn complex(re: f64, im: f64) -> Json {
        Json::Arr(vec![Json::Num(re), Json::Num(im)])
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Json::Arr(_) | Json::Obj(_))
    }

    fn is_flat(&self) -> bool {
        match self {
            Json::Arr(v) => v.iter().all(|x| x.is_scalar() || (matches!(x, Json::Arr(_)) && x.is_flat())),
            _ => self.is_scalar(),
        }
    }

    /// Pretty form with two-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s.push('\n');
        s
    }

    fn write(&self, out: &mut String, depth: usize) {
        let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(x) => out.push_str(&format_json_number(*x)),
            Json::Str(s) => write_string(out, s),
            Json::Arr(v) if v.is_empty() => out.push_str("[]"),
            Json::Arr(v) if self.is_flat() => {
                out.push('[');
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    x.write(out, depth);
                }
                out.push(']');
            }
            Json::Arr(v) => {
                out.push_str("[\n");
                for (i, x) in v.iter().enumerate() {
                    pad(out, depth + 1);
                    x.write(out, depth + 1);
                    if i + 1 < v.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                pad(out, depth);
                out.push(']');
            }
            Json::Obj(kv) if kv.is_empty() => out.push_str("{}"),
            Json::Obj(kv) => {
                out.push_str("{\n");
                for (i, (k, v)) in kv.iter().enumerate() {
                    pad(out, depth + 1);
                    write_string(out, k);
                    out.push_str(": ");
                    v.write(out, depth + 1);
                    if i + 1 < kv.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                pad(out, depth);
                out.push('}');
            }
        }
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
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

/// Shortest `%g`-style rendering of `x` rounded to `digits` significant
/// digits (ties to even), trailing zeros stripped, `-0` printed as `0`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = strip_zeros(mantissa.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn format_json_number(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    format_significant(x, 17)
}

pub fn format_csv_number(x: f64) -> String {
    format_significant(x, 12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_json_number(0.0), "0");
        assert_eq!(format_json_number(-0.0), "0");
        assert_eq!(format_json_number(2.0), "2");
        assert_eq!(format_json_number(0.1), "0.10000000000000001");
        assert_eq!(format_json_number(-2.5), "-2.5");
        assert_eq!(format_json_number(1.054571817e-34), "1.054571817e-34");
        assert_eq!(format_json_number(1e20), "1e+20");
        assert_eq!(format_csv_number(0.1), "0.1");
        assert_eq!(format_csv_number(2.0f64.sqrt()), "1.41421356237");
        assert_eq!(format_csv_number(123456.0), "123456");
        assert_eq!(format_csv_number(1.5e-7), "1.5e-07");
    }

    #[test]
    fn ties_round_to_even() {
        // 0.125 and 0.375 are exact binary fractions, so these are true ties
        assert_eq!(format_significant(0.125, 2), "0.12");
        assert_eq!(format_significant(0.375, 2), "0.38");
        assert_eq!(format_significant(2.5, 1), "2");
    }

    #[test]
    fn layout() {
        let j = Json::obj([
            ("a", Json::Int(1)),
            ("b", Json::Arr(vec![Json::complex(1.0, 0.0), Json::complex(0.5, -1.0)])),
            ("c", Json::Arr(vec![Json::obj([("x", Json::Bool(true))])])),
            ("d", Json::str("q\"")),
        ]);
        assert_eq!(
            j.render(),
            "{\n  \"a\": 1,\n  \"b\": [[1, 0], [0.5, -1]],\n  \"c\": [\n    {\n      \"x\": true\n    }\n  ],\n  \"d\": \"q\\\"\"\n}\n"
        );
    }
}
