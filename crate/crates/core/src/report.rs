//! Outcome records for identity checks.

use std::fmt;

use serde::Serialize;

use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// An oracle could not produce a value (e.g. a p-adic count did not
    /// stabilize); never treated as a pass.
    Inconclusive,
}

/// One comparison between two independently computed quantities.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub left: f64,
    pub right: f64,
    /// Exact renderings when both sides are rationals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<(String, String)>,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_residual(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

impl CheckReport {
    /// Floating comparison passing when the relative residual is within `tol`.
    pub fn float(name: impl Into<String>, params: Params, left: f64, right: f64, tol: f64) -> Self {
        let abs = (left - right).abs();
        let rel = relative_residual(left, right);
        let ok = left.is_finite() && right.is_finite() && rel <= tol;
        CheckReport {
            name: name.into(),
            params: params.0,
            left,
            right,
            exact: None,
            abs_residual: abs,
            rel_residual: rel,
            tolerance: tol,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            note: None,
        }
    }

    /// Floating comparison on the absolute residual only.
    pub fn float_abs(name: impl Into<String>, params: Params, left: f64, right: f64, tol: f64) -> Self {
        let mut r = Self::float(name, params, left, right, tol);
        let ok = left.is_finite() && right.is_finite() && r.abs_residual <= tol;
        r.status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        r
    }

    /// Exact rational equality.
    pub fn exact(name: impl Into<String>, params: Params, left: &Rational, right: &Rational) -> Self {
        let l = crate::rat_to_f64(left);
        let r = crate::rat_to_f64(right);
        CheckReport {
            name: name.into(),
            params: params.0,
            left: l,
            right: r,
            exact: Some((left.to_string(), right.to_string())),
            abs_residual: (l - r).abs(),
            rel_residual: relative_residual(l, r),
            tolerance: 0.0,
            status: if left == right {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: None,
        }
    }

    pub fn inconclusive(name: impl Into<String>, params: Params, note: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            params: params.0,
            left: f64::NAN,
            right: f64::NAN,
            exact: None,
            abs_residual: f64::NAN,
            rel_residual: f64::NAN,
            tolerance: 0.0,
            status: CheckStatus::Inconclusive,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inconclusive => "INCONCLUSIVE",
        };
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{status} {} [{}]", self.name, params.join(", "))?;
        match &self.exact {
            Some((l, r)) => write!(f, " left={l} right={r}")?,
            None => write!(
                f,
                " left={:.14e} right={:.14e} rel={:.3e}",
                self.left, self.right, self.rel_residual
            )?,
        }
        if let Some(n) = &self.note {
            write!(f, " ({n})")?;
        }
        Ok(())
    }
}

/// Ordered parameter list for a report.
#[derive(Debug, Clone, Default)]
pub struct Params(pub Vec<(String, String)>);

impl Params {
    pub fn new() -> Self {
        Params(Vec::new())
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }
}

/// Summary status of a batch: any failure dominates, then inconclusive.
pub fn batch_status(reports: &[CheckReport]) -> CheckStatus {
    if reports.iter().any(|r| r.status == CheckStatus::Fail) {
        CheckStatus::Fail
    } else if reports.iter().any(|r| r.status == CheckStatus::Inconclusive) {
        CheckStatus::Inconclusive
    } else {
        CheckStatus::Pass
    }
}
