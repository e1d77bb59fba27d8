//! Report values and their two renderings.
//!
//! Every command produces a [`ScenarioReport`]: a hypothesis checklist, a
//! conclusion checklist, named witness values, and an overall verdict.
//! The verdict is `pass` unless some conclusion implied by passing
//! hypotheses fails exactly. Text output is tabular; structured output is
//! JSON with fixed field order, so identical inputs give byte-identical
//! documents.

use prplab_core::rational::{format_rat, Rat};
use prplab_core::space::{Integrand, Measure, Process, RandomVariable};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueLine {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub model: String,
    pub hypotheses: Vec<CheckLine>,
    pub conclusions: Vec<CheckLine>,
    pub witnesses: Vec<ValueLine>,
    pub verdict: String,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario: {}  (model: {})\n", self.scenario, self.model));
        if !self.hypotheses.is_empty() {
            out.push_str("hypotheses:\n");
            for line in &self.hypotheses {
                out.push_str(&format!(
                    "  [{}] {}\n",
                    if line.pass { "ok" } else { "FAIL" },
                    line.name
                ));
            }
        }
        if !self.conclusions.is_empty() {
            out.push_str("conclusions:\n");
            for line in &self.conclusions {
                out.push_str(&format!(
                    "  [{}] {}\n",
                    if line.pass { "ok" } else { "FAIL" },
                    line.name
                ));
            }
        }
        if !self.witnesses.is_empty() {
            out.push_str("values:\n");
            for line in &self.witnesses {
                out.push_str(&format!("  {} = {}\n", line.name, line.value));
            }
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }

    pub fn render_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Accumulates checklist lines and computes the verdict.
pub struct ReportBuilder {
    scenario: String,
    model: String,
    hypotheses: Vec<CheckLine>,
    conclusions: Vec<CheckLine>,
    witnesses: Vec<ValueLine>,
}

impl ReportBuilder {
    pub fn new(scenario: &str, model: &str) -> Self {
        ReportBuilder {
            scenario: scenario.to_string(),
            model: model.to_string(),
            hypotheses: Vec::new(),
            conclusions: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn hypothesis(&mut self, name: &str, pass: bool) -> &mut Self {
        self.hypotheses.push(CheckLine { name: name.to_string(), pass });
        self
    }

    pub fn conclusion(&mut self, name: &str, pass: bool) -> &mut Self {
        self.conclusions.push(CheckLine { name: name.to_string(), pass });
        self
    }

    pub fn witness(&mut self, name: &str, value: impl Into<String>) -> &mut Self {
        self.witnesses.push(ValueLine { name: name.to_string(), value: value.into() });
        self
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.pass)
    }

    /// Verdict rule: failed hypotheses make the conclusions vacuous (the
    /// report still shows which hypothesis broke); with all hypotheses
    /// passing, every conclusion must hold.
    pub fn finish(self) -> ScenarioReport {
        let conclusions_hold = self.conclusions.iter().all(|c| c.pass);
        let verdict = if self.hypotheses_hold() && !conclusions_hold { "fail" } else { "pass" };
        ScenarioReport {
            scenario: self.scenario,
            model: self.model,
            hypotheses: self.hypotheses,
            conclusions: self.conclusions,
            witnesses: self.witnesses,
            verdict: verdict.to_string(),
        }
    }
}

pub fn fmt_rv(rv: &RandomVariable) -> String {
    let cells: Vec<String> = rv.values().iter().map(format_rat).collect();
    format!("({})", cells.join(", "))
}

pub fn fmt_measure(m: &Measure) -> String {
    let cells: Vec<String> = m.weights().iter().map(format_rat).collect();
    format!("({})", cells.join(", "))
}

pub fn fmt_process(p: &Process) -> String {
    let rows: Vec<String> = p
        .rows()
        .iter()
        .map(|r| r.iter().map(format_rat).collect::<Vec<_>>().join(", "))
        .collect();
    format!("[{}]", rows.join(" ; "))
}

pub fn fmt_integrand(xi: &Integrand) -> String {
    let rows: Vec<String> = xi
        .rows()
        .iter()
        .map(|r| r.iter().map(format_rat).collect::<Vec<_>>().join(", "))
        .collect();
    format!("[{}]", rows.join(" ; "))
}

pub fn fmt_rat_value(r: &Rat) -> String {
    format_rat(r)
}
