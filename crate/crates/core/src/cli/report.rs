use std::time::Duration;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use super::{CliError, Outcome};

pub const REPORT_TYPE: &str = "bellctx-report";

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// JSON report of one command.
///
/// Field order: `type`, `tool`, `version`, `command`, `input_sha256`,
/// `verdict`, command-specific fields, `report_sha256`, `timing_ms`. The
/// report digest covers everything before it, so it is stable across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    command: String,
    inputs: Vec<String>,
    verdict: String,
    fields: Map<String, Value>,
    /// Canonical text written by `--output`.
    pub(crate) document_text: Option<String>,
    summary: Vec<String>,
    code: i32,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: Vec::new(),
            verdict: "ok".into(),
            fields: Map::new(),
            document_text: None,
            summary: Vec::new(),
            code: 0,
        }
    }

    pub fn failure(command: &str, err: &CliError) -> Self {
        let mut r = Report::new(command);
        r.verdict = "error".into();
        r.code = err.exit_code();
        let mut e = Map::new();
        e.insert("kind".into(), err.kind().into());
        e.insert("message".into(), err.to_string().into());
        r.fields.insert("error".into(), Value::Object(e));
        r.summary.push(format!("{} error: {err}", err.kind()));
        r
    }

    pub fn add_input(&mut self, text: &str) {
        self.inputs.push(sha256_hex(text.as_bytes()));
    }

    pub fn verdict(&mut self, v: &str) {
        self.verdict = v.to_string();
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.to_string(), value);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    /// Attaches the produced document inline and as canonical text.
    pub fn document(&mut self, text: String) {
        let value: Value = serde_json::from_str(&text).expect("emitted documents are valid JSON");
        self.fields.insert("document".into(), value);
        self.document_text = Some(text);
    }

    /// Sets the text written by `--output` without adding a report field.
    pub fn output_text(&mut self, text: String) {
        self.document_text = Some(text);
    }

    pub fn code(&self) -> i32 {
        self.code
    }

    pub(crate) fn set_code(&mut self, code: i32) {
        self.code = code;
    }

    pub(crate) fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub(crate) fn push_input_digest(&mut self, digest: String) {
        self.inputs.push(digest);
    }

    pub fn verdict_str(&self) -> &str {
        &self.verdict
    }

    pub fn fields(&self) -> &Map<String, Value> {
        &self.fields
    }

    pub fn to_value(&self) -> Value {
        let mut root = Map::new();
        root.insert("type".into(), REPORT_TYPE.into());
        root.insert("tool".into(), "bellctx".into());
        root.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        root.insert("command".into(), self.command.clone().into());
        root.insert("input_sha256".into(), self.inputs.clone().into());
        root.insert("verdict".into(), self.verdict.clone().into());
        root.extend(self.fields.clone());
        let digest = sha256_hex(serde_json::to_string(&root).expect("serialisable").as_bytes());
        root.insert("report_sha256".into(), digest.into());
        Value::Object(root)
    }

    pub fn finish(self, elapsed: Duration) -> Outcome {
        let mut v = self.to_value();
        v.as_object_mut()
            .expect("report is an object")
            .insert("timing_ms".into(), (elapsed.as_secs_f64() * 1e3).into());
        let mut stdout = serde_json::to_string_pretty(&v).expect("serialisable");
        stdout.push('\n');
        let mut stderr = format!("bellctx {}: {}\n", self.command, self.verdict);
        for line in &self.summary {
            stderr += "  ";
            stderr += line;
            stderr.push('\n');
        }
        Outcome {
            code: self.code,
            stdout,
            stderr,
        }
    }
}

/// The produced document if `v` is a report, else `v` itself.
pub(crate) fn unwrap_report(v: Value) -> Value {
    match v.get("type").and_then(Value::as_str) {
        Some(REPORT_TYPE) => v.get("document").cloned().unwrap_or(Value::Null),
        _ => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_timing() {
        let mut r = Report::new("validate");
        r.add_input("abc");
        r.verdict("valid");
        let a = r.clone().finish(Duration::from_millis(3));
        let b = r.finish(Duration::from_millis(900));
        let va: Value = serde_json::from_str(&a.stdout).unwrap();
        let vb: Value = serde_json::from_str(&b.stdout).unwrap();
        assert_eq!(va["report_sha256"], vb["report_sha256"]);
        assert_ne!(va["timing_ms"], vb["timing_ms"]);
        assert_eq!(
            va["input_sha256"][0],
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn failure_carries_exit_code() {
        let r = Report::failure("facets", &CliError::Budget("too many".into()));
        assert_eq!(r.code(), 2);
        assert_eq!(r.to_value()["error"]["kind"], "budget");
    }
}
