//! JSON and CSV output helpers. Non-finite numbers are written as the strings
//! "inf", "-inf" and "nan" since JSON has no literal for them.

use serde::Serializer;

pub const SCHEMA_VERSION: &str = "1.0";

pub fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&fmt_num(*v))
    }
}

pub fn ser_opt_f64<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_f64(x, s),
        None => s.serialize_none(),
    }
}

/// Shortest round-trip form for finite values, "inf"/"-inf"/"nan" otherwise.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Serialize;

    #[derive(Serialize)]
    struct T {
        #[serde(serialize_with = "ser_f64")]
        a: f64,
        #[serde(serialize_with = "ser_opt_f64")]
        b: Option<f64>,
    }

    #[test]
    fn infinity_as_string() {
        let s = serde_json::to_string(&T { a: f64::INFINITY, b: Some(1.5) }).unwrap();
        assert_eq!(s, r#"{"a":"inf","b":1.5}"#);
        let s = serde_json::to_string(&T { a: 2.0, b: None }).unwrap();
        assert_eq!(s, r#"{"a":2.0,"b":null}"#);
    }
}
