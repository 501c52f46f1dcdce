use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::Formatter;

/// Compact JSON with every float written to 17 significant digits, so
/// equal runs give equal bytes and every value parses back exactly.
struct Fixed;

impl Formatter for Fixed {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization does not fail");
    let mut s = String::from_utf8(buf).expect("serde_json writes utf-8");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> io::Result<()> {
    std::fs::write(path, to_json(value))
}

/// Provenance block embedded in every JSON result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub flags: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: u64,
    pub version: &'static str,
}

impl RunManifest {
    pub fn new(command: &str, flags: &[String], seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            flags: flags.to_vec(),
            outputs: Vec::new(),
            seed,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_roundtrip_through_fixed_format() {
        let xs = [0.1f64, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, std::f64::consts::PI];
        let s = to_json(&xs);
        assert!(s.contains("1.0000000000000001e-1"));
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xs);
    }

    #[test]
    fn non_finite_is_null() {
        assert_eq!(to_json(&[f64::NAN]), "[null]\n");
    }
}
