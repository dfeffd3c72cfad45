//! Canonical JSON: keys sorted, floats as 17 significant digits in
//! scientific notation, one trailing newline.

use std::io;

use quadmod_core::C64;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` canonically. `serde_json` maps keep keys sorted.
pub fn to_canonical_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// A finite float, or a numeric failure naming `what`.
pub fn num(x: f64, what: &str) -> Result<Value, CliError> {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .ok_or_else(|| CliError::Numeric(format!("{what} is not finite")))
}

/// `[re, im]`.
pub fn cpx(z: C64, what: &str) -> Result<Value, CliError> {
    Ok(Value::Array(vec![num(z.re, what)?, num(z.im, what)?]))
}

/// Builds an object from `(key, value)` pairs.
pub fn object<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_owned(), v);
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_seventeen_digits() {
        let v = object([("b", num(0.1, "x").unwrap()), ("a", Value::from(3u64))]);
        assert_eq!(to_canonical_string(&v), "{\"a\":3,\"b\":1.0000000000000001e-1}\n");
    }

    #[test]
    fn reparse_is_stable() {
        let v = object([
            ("z", cpx(C64::new(-1.0 / 3.0, 1e-300), "z").unwrap()),
            ("s", Value::from("text")),
            ("n", Value::Null),
        ]);
        let text = to_canonical_string(&v);
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(to_canonical_string(&back), text);
    }

    #[test]
    fn non_finite_is_a_numeric_error() {
        assert!(matches!(num(f64::NAN, "x"), Err(CliError::Numeric(_))));
    }
}
