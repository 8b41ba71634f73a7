//! Serializable verification reports.

use serde::{Deserialize, Serialize};

use crate::duality::Regime;
use crate::field::{Field, ParameterPoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseDescriptor {
    pub n: usize,
    pub r: usize,
    pub d: u32,
    pub l: i64,
    pub regime: Regime,
}

/// A sample point printed exactly (`"p/q"` or `"v mod p"`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointWitness {
    pub q: String,
    pub x: Vec<String>,
}

impl PointWitness {
    pub fn of<F: Field>(point: &ParameterPoint<F>) -> Self {
        PointWitness {
            q: point.q().to_string(),
            x: point.x().iter().map(|v| v.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub point: PointWitness,
    /// Which comparison failed, when a trial makes more than one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    pub lhs: String,
    pub rhs: String,
}

/// Quadrature against the exact assembly, in complex floats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericSummary {
    pub q: f64,
    pub x: Vec<f64>,
    pub rho: f64,
    pub grid: usize,
    pub relative_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case: CaseDescriptor,
    pub field: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<FailureWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl VerificationReport {
    /// All trials passed and the numeric check, if any, is within tolerance.
    pub fn ok(&self) -> bool {
        self.passed == self.trials
            && self.failures.is_empty()
            && self.numeric.as_ref().is_none_or(|n| n.passed)
    }
}

pub fn all_ok(reports: &[VerificationReport]) -> bool {
    reports.iter().all(VerificationReport::ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VerificationReport {
        VerificationReport {
            case: CaseDescriptor {
                n: 3,
                r: 2,
                d: 1,
                l: 0,
                regime: Regime::Interior,
            },
            field: "fp61".into(),
            seed: 42,
            trials: 2,
            passed: 2,
            failures: vec![],
            numeric: None,
            elapsed_ms: Some(3),
        }
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(sample()).unwrap();
        assert_eq!(v["case"]["regime"], "interior");
        assert_eq!(v["field"], "fp61");
        assert_eq!(v["elapsed_ms"], 3);
        assert!(v.get("numeric").is_none());
        assert!(v["failures"].as_array().unwrap().is_empty());
    }

    #[test]
    fn ok_requires_all_trials() {
        let mut r = sample();
        assert!(r.ok());
        r.passed = 1;
        assert!(!r.ok());
    }

    #[test]
    fn timing_can_be_omitted() {
        let mut r = sample();
        r.elapsed_ms = None;
        let text = serde_json::to_string(&r).unwrap();
        assert!(!text.contains("elapsed_ms"));
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
