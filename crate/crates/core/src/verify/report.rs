use std::fmt;

use serde::Serialize;

use crate::numerics::{format_fixed, round_decimal, serialize_rational, Enclosure, ExactRational, RoundingMode};

/// Outcome of one check. `lhs` is the computed side (with any truncation
/// tail already folded in), `rhs` the target; `residual` is the largest
/// distance between a point of `lhs` and a point of `rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: serde_json::Map<String, serde_json::Value>,
    pub lhs: Enclosure,
    pub rhs: Enclosure,
    #[serde(serialize_with = "serialize_rational")]
    pub residual: ExactRational,
    #[serde(serialize_with = "serialize_rational")]
    pub tolerance: ExactRational,
    #[serde(serialize_with = "serialize_rational")]
    pub tail: ExactRational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Builds a report and decides `pass`: the residual is within tolerance
    /// and the two sides overlap.
    pub fn judge(
        check: impl Into<String>,
        params: serde_json::Value,
        lhs: Enclosure,
        rhs: Enclosure,
        tolerance: ExactRational,
        tail: ExactRational,
        truncation: Option<u32>,
    ) -> Self {
        let residual = lhs.max_distance(&rhs);
        let pass = residual <= tolerance && lhs.overlaps(&rhs);
        let params = match params {
            serde_json::Value::Object(m) => m,
            other => {
                let mut m = serde_json::Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        let mut r = VerificationReport {
            check: check.into(),
            params,
            lhs,
            rhs,
            residual,
            tolerance,
            tail,
            truncation,
            pass,
            notes: Vec::new(),
        };
        if !r.pass && truncation.is_some() && r.tail > r.tolerance {
            r.notes.push("tail bound exceeds the tolerance: increase R".into());
        }
        r
    }

    /// For limit checks: passes when every point of `lhs` is strictly
    /// within `tolerance` of every point of `rhs`; no overlap is expected.
    pub fn judge_distance(
        check: impl Into<String>,
        params: serde_json::Value,
        lhs: Enclosure,
        rhs: Enclosure,
        tolerance: ExactRational,
    ) -> Self {
        let zero = ExactRational::from_integer(0.into());
        let mut r = Self::judge(check, params, lhs, rhs, tolerance, zero, None);
        r.pass = r.residual < r.tolerance;
        r
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    /// One-line human summary at `digits` decimals.
    pub fn text_line(&self, digits: u32) -> String {
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect();
        let mut line = format!(
            "{:<4} {} [{}] lhs={} rhs={} residual={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check,
            params.join(" "),
            round_decimal(&self.lhs, digits),
            round_decimal(&self.rhs, digits),
            sci(&self.residual),
        );
        for n in &self.notes {
            line.push_str(&format!(" ; {n}"));
        }
        line
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text_line(8))
    }
}

/// Short scientific rendering of a nonnegative rational, for residuals.
pub fn sci(x: &ExactRational) -> String {
    let v = crate::numerics::to_f64(x);
    if v == 0.0 {
        "0".into()
    } else if v >= 1e-4 {
        format_fixed(x, 6, RoundingMode::HalfEven)
    } else {
        format!("{v:.2e}")
    }
}
