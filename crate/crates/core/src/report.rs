//! Machine-readable outcome rows shared by every verification routine.

use serde::ser::Serializer;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

/// `pass` column: a hard assertion result, or a row that is only reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Informational,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Assertion when `asserted`, otherwise informational regardless of `ok`.
    pub fn graded(asserted: bool, ok: bool) -> Self {
        if asserted {
            Self::from_bool(ok)
        } else {
            Verdict::Informational
        }
    }

    pub fn is_failure(self) -> bool {
        self == Verdict::Fail
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Pass => s.serialize_bool(true),
            Verdict::Fail => s.serialize_bool(false),
            Verdict::Informational => s.serialize_str("informational"),
        }
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Bool(true) => Ok(Verdict::Pass),
            Value::Bool(false) => Ok(Verdict::Fail),
            Value::String(s) if s == "informational" => Ok(Verdict::Informational),
            other => Err(serde::de::Error::custom(format!("bad verdict {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub instance: Value,
    pub claim: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub pass: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn new(suite: &str, claim: &str, instance: Value) -> Self {
        Self {
            suite: suite.to_string(),
            instance,
            claim: claim.to_string(),
            lhs: None,
            rhs: None,
            pass: Verdict::Informational,
            witness: None,
            runtime_ms: 0,
        }
    }

    pub fn sides(mut self, lhs: f64, rhs: f64) -> Self {
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self
    }

    pub fn verdict(mut self, v: Verdict) -> Self {
        self.pass = v;
        self
    }

    pub fn witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn failed(&self) -> bool {
        self.pass.is_failure()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report rows always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn verdict_wire_format() {
        let r = VerificationReport::new("weil", "K bound", json!({"q": 5}))
            .sides(1.0, 2.0)
            .verdict(Verdict::Informational);
        let line = r.to_json_line();
        assert!(line.contains(r#""pass":"informational""#));
        let back: VerificationReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        let failed = r.verdict(Verdict::Fail);
        assert!(failed.to_json_line().contains(r#""pass":false"#));
        assert!(failed.failed());
    }
}
