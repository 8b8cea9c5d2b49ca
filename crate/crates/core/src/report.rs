//! Interval certificates for sup-type quantities.

use serde::Serialize;

use crate::linalg::ComplexMatrix;

/// How a reported number was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    ClosedForm,
    AscentLower,
    TheoryUpper,
    SampleMax,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::ClosedForm => "closed-form",
            Method::AscentLower => "ascent-lower",
            Method::TheoryUpper => "theory-upper",
            Method::SampleMax => "sample-max",
        }
    }
}

/// Certificate for a supremum: a witness attaining `lower`, an `upper` bound
/// (possibly `+∞`), and the heuristic relative `gap` reported by the optimizer.
///
/// `upper` is `f64::INFINITY` when no bound is available; it serializes as `null`.
#[derive(Clone, Debug, Serialize)]
pub struct CostReport {
    pub lower: f64,
    pub lower_method: Method,
    #[serde(serialize_with = "finite_or_null")]
    pub upper: f64,
    pub upper_method: Method,
    pub gap: f64,
    pub witness: Option<ComplexMatrix>,
    pub seed: u64,
    pub restarts: usize,
    pub iterations: usize,
    pub amplification: usize,
    pub diagnostics: Vec<String>,
}

fn finite_or_null<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

impl CostReport {
    /// Report for a value known exactly.
    pub fn exact(value: f64, method: Method) -> Self {
        CostReport {
            lower: value,
            lower_method: method,
            upper: value,
            upper_method: method,
            gap: 0.0,
            witness: None,
            seed: 0,
            restarts: 0,
            iterations: 0,
            amplification: 1,
            diagnostics: Vec::new(),
        }
    }

    /// `lower·(1 + gap)`, the optimizer's own heuristic ceiling.
    pub fn heuristic_upper(&self) -> f64 {
        self.lower * (1.0 + self.gap)
    }

    pub fn is_consistent(&self) -> bool {
        self.lower >= 0.0 && (!self.upper.is_finite() || self.lower <= self.upper * (1.0 + 1e-9) + 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_upper_serializes_as_null() {
        let mut r = CostReport::exact(1.0, Method::Exact);
        r.upper = f64::INFINITY;
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains(r#""upper":null"#), "{s}");
        assert!(s.contains(r#""lower_method":"exact""#));
        assert!(r.is_consistent());
    }
}
