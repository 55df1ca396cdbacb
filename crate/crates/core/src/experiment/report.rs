//! Per-trial records, aggregation and CSV output.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Numerical slack allowed on each inequality, relative to `max(1, |rhs|)`.
pub const INEQUALITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    pub fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            holds: lhs <= rhs + INEQUALITY_SLACK * rhs.abs().max(1.0),
        }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// `||X^T z||_inf`
    pub xtz_inf: f64,
    /// `||X^T z||_inf <= Lambda`
    pub event: bool,
    /// False when any solve of this trial failed or did not converge; such
    /// trials are excluded from pass statistics.
    pub solver_ok: bool,
    /// `||X beta* - X beta_hat||_2`
    pub prediction_error: f64,
    /// `||beta_hat_{S^c} - beta*_{S^c}||_1`
    pub off_support_error: f64,
    pub checks: Vec<InequalityCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    /// Trials (with a successful solve) on which the check was evaluated.
    pub evaluated: u64,
    pub held: u64,
    pub fraction_held: f64,
    pub event_trials: u64,
    pub event_violations: u64,
    /// Smallest `rhs - lhs` over event trials.
    pub min_event_slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub sigma: f64,
    pub lambda_multiple: f64,
    pub lambda: f64,
    /// `Lambda = 2 sigma sqrt(ln n)`
    pub big_lambda: f64,
    pub eta: f64,
    pub trials: u64,
    pub event_frequency: f64,
    /// `1 - eta`
    pub event_bound: f64,
    pub event_standard_error: f64,
    pub event_ok: bool,
    pub solver_failures: u64,
    pub checks: Vec<CheckSummary>,
    pub pass: bool,
    pub records: Vec<TrialRecord>,
}

const CSV_COLUMNS: [&str; 12] = [
    "experiment",
    "trial",
    "lambda",
    "event",
    "solver_ok",
    "xtz_inf",
    "prediction_error",
    "off_support_error",
    "check",
    "lhs",
    "rhs",
    "holds",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    experiment: &'a str,
    trial: u64,
    lambda: f64,
    event: bool,
    solver_ok: bool,
    xtz_inf: f64,
    prediction_error: f64,
    off_support_error: f64,
    check: &'a str,
    lhs: Option<f64>,
    rhs: Option<f64>,
    holds: Option<bool>,
}

impl ExperimentReport {
    /// Builds the aggregate fields from the records.
    pub(crate) fn assemble(mut self) -> Self {
        let trials = self.records.len() as u64;
        self.trials = trials;
        let events = self.records.iter().filter(|r| r.event).count() as u64;
        self.event_frequency = if trials == 0 {
            1.0
        } else {
            events as f64 / trials as f64
        };
        self.event_bound = 1.0 - self.eta;
        self.event_standard_error = if trials == 0 {
            0.0
        } else {
            (self.event_bound * (1.0 - self.event_bound) / trials as f64).sqrt()
        };
        self.event_ok = self.event_frequency >= self.event_bound - 3.0 * self.event_standard_error;
        self.solver_failures = self.records.iter().filter(|r| !r.solver_ok).count() as u64;

        let mut names: Vec<String> = Vec::new();
        for r in &self.records {
            for c in &r.checks {
                if !names.contains(&c.name) {
                    names.push(c.name.clone());
                }
            }
        }
        self.checks = names
            .into_iter()
            .map(|name| {
                let mut s = CheckSummary {
                    name,
                    evaluated: 0,
                    held: 0,
                    fraction_held: 0.0,
                    event_trials: 0,
                    event_violations: 0,
                    min_event_slack: None,
                };
                for r in self.records.iter().filter(|r| r.solver_ok) {
                    for c in r.checks.iter().filter(|c| c.name == s.name) {
                        s.evaluated += 1;
                        s.held += c.holds as u64;
                        if r.event {
                            s.event_trials += 1;
                            s.event_violations += !c.holds as u64;
                            let slack = c.slack();
                            s.min_event_slack = Some(s.min_event_slack.map_or(slack, |m| m.min(slack)));
                        }
                    }
                }
                s.fraction_held = if s.evaluated == 0 {
                    0.0
                } else {
                    s.held as f64 / s.evaluated as f64
                };
                s
            })
            .collect();
        self.pass = self.event_ok && self.checks.iter().all(|c| c.event_violations == 0);
        self
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Long format: one row per (trial, check); a trial without checks
    /// still gets one row with empty check columns.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        if self.records.is_empty() {
            out.write_record(CSV_COLUMNS)?;
        }
        for r in &self.records {
            if r.checks.is_empty() {
                out.serialize(self.csv_row(r, None))?;
            }
            for c in &r.checks {
                out.serialize(self.csv_row(r, Some(c)))?;
            }
        }
        out.flush()?;
        Ok(())
    }

    fn csv_row<'a>(&'a self, r: &'a TrialRecord, c: Option<&'a InequalityCheck>) -> CsvRow<'a> {
        CsvRow {
            experiment: &self.experiment,
            trial: r.trial,
            lambda: self.lambda,
            event: r.event,
            solver_ok: r.solver_ok,
            xtz_inf: r.xtz_inf,
            prediction_error: r.prediction_error,
            off_support_error: r.off_support_error,
            check: c.map_or("", |c| c.name.as_str()),
            lhs: c.map(|c| c.lhs),
            rhs: c.map(|c| c.rhs),
            holds: c.map(|c| c.holds),
        }
    }
}
