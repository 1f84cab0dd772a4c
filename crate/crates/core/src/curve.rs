//! Sampled summary functions `r ↦ value` and their CSV/JSON encodings.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SummaryKind {
    F,
    G,
    J,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Laplace,
    MonteCarlo,
    Empirical,
    Theoretical,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Laplace => "laplace",
            Method::MonteCarlo => "montecarlo",
            Method::Empirical => "empirical",
            Method::Theoretical => "theoretical",
        }
    }
}

/// One summary function evaluated on an ascending radius grid. Values that
/// could not be computed at a radius are `None`; `notes` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCurve {
    pub kind: SummaryKind,
    pub method: Method,
    pub radii: Vec<f64>,
    pub values: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default)]
    pub provenance: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SummaryCurve {
    pub fn new(kind: SummaryKind, method: Method, radii: Vec<f64>, values: Vec<Option<f64>>) -> Self {
        assert_eq!(radii.len(), values.len(), "one value per radius");
        Self { kind, method, radii, values, q: None, provenance: serde_json::Value::Null, notes: Vec::new() }
    }

    pub fn with_q(mut self, q: usize) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_provenance(mut self, provenance: serde_json::Value) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn value(&self, i: usize) -> Option<f64> {
        self.values[i]
    }

    /// Pairs `(r, value)` with the missing entries dropped.
    pub fn defined(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.radii.iter().zip(&self.values).filter_map(|(r, v)| v.map(|v| (*r, v)))
    }

    /// `max_r |self(r) − other(r)|` over radii where both are defined. The
    /// radius grids must match exactly.
    pub fn max_abs_difference(&self, other: &SummaryCurve) -> Result<f64> {
        if self.radii != other.radii {
            return domain("curves are sampled on different radii");
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .filter_map(|(a, b)| Some((a.as_ref()? - b.as_ref()?).abs()))
            .fold(0.0, f64::max))
    }

    /// CSV with columns `r,value,method,q`; the provenance JSON goes on a
    /// leading `#` comment line. Numbers carry 17 significant digits and
    /// missing values are written as `NA`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let kind = format!("{:?}", self.kind);
        let _ = writeln!(out, "# kind: {kind}");
        if !self.provenance.is_null() {
            let _ = writeln!(out, "# provenance: {}", self.provenance);
        }
        out.push_str("r,value,method,q\n");
        let q = self.q.map(|q| q.to_string()).unwrap_or_default();
        for (r, v) in self.radii.iter().zip(&self.values) {
            let v = v.map(format_number).unwrap_or_else(|| "NA".to_string());
            let _ = writeln!(out, "{},{},{},{}", format_number(*r), v, self.method.as_str(), q);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serializes")
    }
}

/// 17 significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// `count` equally spaced values on `[min, max]`.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..count).map(|i| min + (max - min) * i as f64 / (count - 1) as f64).collect(),
    }
}

pub(crate) fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return domain("at least one radius is required");
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return domain("radii must be finite and strictly positive");
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return domain("radii must be strictly increasing");
    }
    Ok(())
}
