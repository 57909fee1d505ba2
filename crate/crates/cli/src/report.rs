use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One verdict with the tolerance it was judged against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: Value,
    pub tolerance: Option<f64>,
}

impl Check {
    pub fn exact(name: impl Into<String>, passed: bool, value: impl Serialize) -> Self {
        Self { name: name.into(), passed, value: to_value(value), tolerance: None }
    }

    pub fn within(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: value.abs() <= tolerance, value: to_value(value), tolerance: Some(tolerance) }
    }
}

pub(crate) fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Machine-readable result of one command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub spec: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub notices: Vec<String>,
    pub data: Value,
}

impl Report {
    pub fn new(command: &str, spec: &str, checks: Vec<Check>, notices: Vec<String>, data: Value) -> Self {
        Self {
            command: command.into(),
            spec: spec.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            notices,
            data,
        }
    }

    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_machine(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// The check block shared by every text rendering.
    pub fn text_footer(&self) -> String {
        let mut out = String::new();
        for n in &self.notices {
            out.push_str(&format!("note: {n}\n"));
        }
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            match c.tolerance {
                Some(t) => out.push_str(&format!("[{verdict}] {} = {} (tolerance {t:e})\n", c.name, c.value)),
                None => out.push_str(&format!("[{verdict}] {} = {}\n", c.name, c.value)),
            }
        }
        out.push_str(if self.passed { "all checks passed\n" } else { "some checks failed\n" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn machine_round_trip_is_byte_identical() {
        let r = Report::new(
            "kms",
            "x",
            vec![Check::within("residual", 0.1 + 0.2 - 0.3, 1e-12), Check::exact("k0", true, "Z ⊕ Z/4")],
            vec!["note".into()],
            json!({"beta": std::f64::consts::LN_2 / 2.0, "z": [1, 2], "a": {"b": null}}),
        );
        let text = r.to_machine();
        let back = Report::from_machine(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_machine(), text);
    }

    #[test]
    fn verdicts() {
        assert!(Check::within("x", -1e-13, 1e-12).passed);
        assert!(!Check::within("x", 2e-12, 1e-12).passed);
        assert!(!Report::new("c", "s", vec![Check::exact("x", false, 0)], vec![], Value::Null).passed);
    }
}
