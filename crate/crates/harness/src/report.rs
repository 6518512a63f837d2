//! Check records, suite reports and their JSON/CSV forms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// A fitted or observed constant with no pass criterion.
    Empirical,
    /// The check's hypothesis does not hold for this scenario.
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The statement being exercised, as a formula label.
    pub anchor: String,
    pub values: BTreeMap<String, f64>,
    pub tolerance: Option<f64>,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(name: &str, anchor: &str) -> Self {
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            values: BTreeMap::new(),
            tolerance: None,
            outcome: Outcome::Empirical,
            note: None,
        }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.into(), v);
        self
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn pass_if(mut self, ok: bool) -> Self {
        self.outcome = if ok { Outcome::Pass } else { Outcome::Fail };
        self
    }

    pub fn inapplicable(mut self, why: impl Into<String>) -> Self {
        self.outcome = Outcome::Inapplicable;
        self.note = Some(why.into());
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.note = Some(s.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub title: String,
    pub coefficient: String,
    pub checks: Vec<CheckRecord>,
    /// Grids, radii and tolerances the suite ran with.
    pub environment: BTreeMap<String, String>,
}

impl SuiteReport {
    pub fn new(suite: &str, title: &str, coefficient: &str) -> Self {
        SuiteReport {
            suite: suite.into(),
            title: title.into(),
            coefficient: coefficient.into(),
            checks: Vec::new(),
            environment: BTreeMap::new(),
        }
    }

    pub fn env(&mut self, key: &str, v: impl ToString) {
        self.environment.insert(key.into(), v.to_string());
    }

    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != Outcome::Fail)
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| c.outcome == Outcome::Fail).collect()
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `suite,check,outcome,key,value`, one row per recorded value.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("suite,check,outcome,key,value\n");
        for c in &self.checks {
            let outcome = serde_json::to_value(c.outcome).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            if c.values.is_empty() {
                s.push_str(&format!("{},{},{},,\n", self.suite, csv_field(&c.name), outcome));
            }
            for (k, v) in &c.values {
                s.push_str(&format!("{},{},{},{},{:e}\n", self.suite, csv_field(&c.name), outcome, csv_field(k), v));
            }
        }
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Names of checks whose anchor is blank.
pub fn lint(reports: &[SuiteReport]) -> std::result::Result<(), Vec<String>> {
    let bad: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| c.anchor.trim().is_empty()).map(move |c| format!("{}/{}", r.suite, c.name)))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}
