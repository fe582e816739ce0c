//! Artifact writers. CSV tables start with one `# {json}` line carrying the
//! config hash and scalar results, then a header row; JSON reports carry the
//! same header fields at top level.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

/// SHA-256 of the canonical JSON form of the resolved configuration.
pub fn config_hash<T: Serialize>(command: &str, config: &T) -> String {
    let canonical = serde_json::json!({ "command": command, "config": config });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// C-style `%.12e`: twelve mantissa digits and an exponent of at least two
/// digits with explicit sign.
pub fn fmt_e(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

pub struct Artifact {
    header: Map<String, Value>,
}

impl Artifact {
    pub fn new<T: Serialize>(command: &str, config: &T) -> Self {
        let mut header = Map::new();
        header.insert("command".into(), command.into());
        header.insert("config_hash".into(), config_hash(command, config).into());
        header.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
        Self { header }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.header.insert(key.into(), serde_json::to_value(value).expect("value serializes"));
        self
    }

    pub fn write_csv(&self, path: &str, columns: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> std::io::Result<()> {
        let mut out = String::new();
        out.push_str("# ");
        out.push_str(&Value::Object(self.header.clone()).to_string());
        out.push('\n');
        out.push_str(&columns.join(","));
        out.push('\n');
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            let cells: Vec<String> = row.iter().map(|&x| fmt_e(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        emit(path, &out)
    }

    pub fn write_json(&self, path: &str, report: impl Serialize) -> std::io::Result<()> {
        let mut obj = self.header.clone();
        obj.insert("result".into(), serde_json::to_value(report).expect("report serializes"));
        let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("json");
        text.push('\n');
        emit(path, &text)
    }
}

/// Writes to `path`, or to stdout when `path` is `-`.
pub fn emit(path: &str, text: &str) -> std::io::Result<()> {
    if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        return out.flush();
    }
    if let Some(dir) = Path::new(path).parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(fmt_e(0.583189495860378), "5.831894958604e-01");
        assert_eq!(fmt_e(-1234.5), "-1.234500000000e+03");
        assert_eq!(fmt_e(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e(1e-300), "1.000000000000e-300");
    }

    #[test]
    fn hash_depends_on_config_only() {
        let a = config_hash("vortex", &serde_json::json!({ "degree": 1 }));
        assert_eq!(a, config_hash("vortex", &serde_json::json!({ "degree": 1 })));
        assert_ne!(a, config_hash("vortex", &serde_json::json!({ "degree": 2 })));
        assert_ne!(a, config_hash("lt-bound", &serde_json::json!({ "degree": 1 })));
        assert_eq!(a.len(), 64);
    }
}
