//! Run reports shared by the command-line front end and the self-check.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Exit code for a run whose checks all passed.
pub const EXIT_OK: i32 = 0;
/// Exit code for a run where some check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for unreadable or malformed input.
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of each input file, keyed by the path as given.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Value,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub passed: bool,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for (path, hash) in &self.inputs {
            out.push_str(&format!("input: {path} sha256={hash}\n"));
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        if let Value::Object(map) = &self.outputs {
            for (k, v) in map {
                render(&mut out, k, v);
            }
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out.push_str(if self.passed {
            "result: ok\n"
        } else {
            "result: FAILED\n"
        });
        out
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render(out: &mut String, key: &str, v: &Value) {
    match v {
        Value::Array(rows) if rows.iter().all(Value::is_array) && !rows.is_empty() => {
            out.push_str(&format!("{key}:\n"));
            for row in rows {
                let cells: Vec<String> = row
                    .as_array()
                    .expect("array")
                    .iter()
                    .map(scalar_text)
                    .collect();
                out.push_str(&format!("  {}\n", cells.join(" ")));
            }
        }
        Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
            out.push_str(&format!("{key}:\n"));
            for item in items {
                let fields: Vec<String> = item
                    .as_object()
                    .expect("object")
                    .iter()
                    .map(|(k, v)| format!("{k}={}", scalar_text(v)))
                    .collect();
                out.push_str(&format!("  {}\n", fields.join(" ")));
            }
        }
        Value::Array(items) => {
            let cells: Vec<String> = items.iter().map(scalar_text).collect();
            out.push_str(&format!("{key}: [{}]\n", cells.join(", ")));
        }
        Value::Object(map) => {
            for (k, v) in map {
                render(out, &format!("{key}.{k}"), v);
            }
        }
        other => out.push_str(&format!("{key}: {}\n", scalar_text(other))),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sha256_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn text_rendering() {
        let r = RunReport {
            command: "gram".into(),
            inputs: BTreeMap::new(),
            outputs: json!({"gram": [["0", "1"], ["-1", "0"]], "rank": 2}),
            warnings: vec!["w".into()],
            seed: Some(3),
            passed: true,
        };
        let text = r.to_text();
        assert!(text.contains("gram:\n  0 1\n  -1 0\n"));
        assert!(text.contains("rank: 2\n"));
        assert!(text.contains("seed: 3\n"));
        assert!(text.ends_with("result: ok\n"));
        assert_eq!(r.exit_code(), EXIT_OK);
    }
}
