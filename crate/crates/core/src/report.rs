//! Deterministic JSON reports: named checks with residual, threshold and
//! verdict, plus a digest of the inputs.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Check {
    /// Passes iff `residual < threshold`; NaN fails.
    pub fn new(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        let verdict = if residual < threshold { Verdict::Pass } else { Verdict::Fail };
        Self { name: name.into(), residual, threshold, verdict }
    }

    /// Boolean condition recorded as residual 0 or 1.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 0.0 } else { 1.0 }, 0.5)
    }

    /// Integer equality recorded as the absolute difference.
    pub fn count(name: impl Into<String>, got: usize, expected: usize) -> Self {
        Self::new(name, (got as f64 - expected as f64).abs(), 0.5)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub digest: String,
    pub checks: Vec<Check>,
    pub data: Value,
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn new(command: &str, inputs: &[&[u8]]) -> Self {
        Self { command: command.to_string(), digest: digest(inputs), checks: Vec::new(), data: Value::Null, wall_time_s: None }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// JSON with keys sorted at every level.
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("inputs_digest".into(), Value::String(self.digest.clone()));
        m.insert("checks".into(), serde_json::to_value(&self.checks).expect("checks serialize"));
        m.insert("data".into(), self.data.clone());
        m.insert("verdict".into(), Value::String(if self.passed() { "pass" } else { "fail" }.into()));
        if let Some(t) = self.wall_time_s {
            m.insert("wall_time_s".into(), Value::from(t));
        }
        sort_keys(Value::Object(m))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("report serializes") + "\n"
    }
}

/// SHA-256 over the length-prefixed inputs, hex encoded.
pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for part in inputs {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sort_keys(v))).collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert!(Check::new("a", 1e-12, 1e-10).passed());
        assert!(!Check::new("a", 1e-9, 1e-10).passed());
        assert!(!Check::new("a", f64::NAN, 1e-10).passed());
        assert!(Check::count("c", 3, 3).passed());
        assert!(!Check::flag("f", false).passed());
    }

    #[test]
    fn keys_are_sorted_and_output_is_stable() {
        let mut r = Report::new("x", &[b"abc"]);
        r.data = serde_json::json!({"zeta": 1, "alpha": {"y": 2, "b": 3}});
        r.push(Check::new("n", 0.0, 1.0));
        let s = r.to_json();
        assert_eq!(s, r.to_json());
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.find("\"b\"").unwrap() < s.find("\"y\"").unwrap());
        assert!(!s.contains("wall_time"));
    }

    #[test]
    fn digest_separates_inputs() {
        assert_ne!(digest(&[b"ab", b"c"]), digest(&[b"a", b"bc"]));
        assert_eq!(digest(&[b"x"]).len(), 64);
    }
}
