//! Flat `(name, value, pass)` diagnostic records.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub pass: bool,
}

impl Diagnostic {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound: Some(bound), pass: value <= bound }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound: Some(bound), pass: value >= bound }
    }

    /// Recorded for information only; always passes.
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, bound: None, pass: true }
    }

    pub fn flag(name: impl Into<String>, value: f64, pass: bool) -> Self {
        Self { name: name.into(), value, bound: None, pass }
    }
}

/// A named group of diagnostics; passes when every record does.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suite {
    pub name: String,
    pub pass: bool,
    pub records: Vec<Diagnostic>,
}

impl Suite {
    pub fn new(name: impl Into<String>, records: Vec<Diagnostic>) -> Self {
        let pass = records.iter().all(|r| r.pass);
        Self { name: name.into(), pass, records }
    }

    pub fn failed(name: impl Into<String>, message: &str) -> Self {
        Self {
            name: name.into(),
            pass: false,
            records: vec![Diagnostic { name: format!("error: {message}"), value: f64::NAN, bound: None, pass: false }],
        }
    }

    pub fn first_failure(&self) -> Option<&Diagnostic> {
        self.records.iter().find(|r| !r.pass)
    }
}
