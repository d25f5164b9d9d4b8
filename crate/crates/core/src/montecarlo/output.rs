//! CSV and JSON emitters. Every table carries the configuration that made
//! it: a `# config: {...}` line heads the CSV, a `config` field the JSON.
//! Floats use shortest round-trip formatting.

use serde::Serialize;

use crate::error::Result;

pub trait Tabular: Serialize {
    /// The configuration block, as JSON.
    fn config(&self) -> serde_json::Value;
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

/// Shortest string that parses back to `x`; `inf`, `-inf`, `nan` otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn to_csv<T: Tabular>(t: &T) -> String {
    let mut s = format!("# config: {}\n", t.config());
    s.push_str(&t.header().join(","));
    s.push('\n');
    for row in t.rows() {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn to_json<T: Serialize>(t: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(t)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_formatting() {
        for x in [1.0, 0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.0), "1.0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_opt(None), "");
    }
}
