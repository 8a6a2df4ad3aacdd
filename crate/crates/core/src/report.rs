//! Command reports in JSON and plain-text form.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::cutoff::{CertifiedVerdict, CutoffResult};
use crate::engine::{Decision, ParamVerdict};
use crate::explicit::{FixedVerdict, SweepResult, Trace};
use crate::protocol::Protocol;
use crate::wellbehaved::{ActionVerdict, GuardCompatReport};

/// Size summary of the analysed protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Digest {
    pub states: usize,
    pub actions: usize,
    pub guards: usize,
}

impl Digest {
    pub fn of(p: &Protocol) -> Self {
        Digest {
            states: p.n_states(),
            actions: p.actions().len(),
            guards: p
                .guards()
                .iter()
                .filter(|g| g.members != p.all_states())
                .count(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digest: Option<Digest>,
    pub result: Value,
    pub duration_ms: f64,
}

impl Report {
    pub fn new(command: String, digest: Option<Digest>, result: Value, elapsed: Duration) -> Self {
        Report {
            command,
            digest,
            result,
            duration_ms: elapsed.as_secs_f64() * 1000.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn trace_text(out: &mut String, trace: &Trace) {
    let _ = writeln!(out, "  {}", trace.initial);
    for step in &trace.steps {
        let _ = writeln!(out, "  --{}--> {}", step.action, step.state);
    }
}

pub fn certify_text(p: &Protocol, report: &GuardCompatReport) -> String {
    let mut out = String::new();
    for r in &report.actions {
        let line = match &r.verdict {
            ActionVerdict::StronglyCompatible { condition } => {
                format!("strongly guard-compatible ({condition})")
            }
            ActionVerdict::WeaklyCompatible { condition, note } => match note {
                Some(note) => format!("weakly guard-compatible ({condition}); {note}"),
                None => format!("weakly guard-compatible ({condition})"),
            },
            ActionVerdict::Violation { failures } => {
                let f = &failures[0];
                let mut line = format!(
                    "VIOLATION of {} on {} at {}: {}",
                    f.condition, f.guard, f.transition, f.failed
                );
                for other in &failures[1..] {
                    let _ = write!(line, "; also fails {}", other.condition);
                }
                line
            }
        };
        let _ = writeln!(out, "{}: {line}", r.action);
    }
    let verdict = if report.well_behaved { "yes" } else { "no" };
    let _ = writeln!(
        out,
        "well-behaved: {verdict} ({} actions, {} states)",
        report.actions.len(),
        p.n_states()
    );
    out
}

pub fn cutoff_text(
    result: &CutoffResult,
    lifted: Option<&CertifiedVerdict>,
    property: &str,
) -> String {
    let mut out = String::new();
    for check in &result.checks {
        match &check.witness {
            None => {
                let _ = writeln!(out, "{:?}: holds", check.lemma);
            }
            Some(w) => {
                let _ = writeln!(out, "{:?}: fails, {w}", check.lemma);
            }
        }
    }
    match lifted {
        Some(CertifiedVerdict::Lifted {
            lemma,
            cutoff,
            reachable,
            ..
        }) => {
            let answer = if *reachable { "holds" } else { "does not hold" };
            let _ = writeln!(
                out,
                "{lemma:?} gives cutoff {cutoff}: {property} {answer} in M({cutoff}), hence for every n"
            );
        }
        _ => {
            let _ = writeln!(out, "not cutoff-amenable for {property}");
        }
    }
    out
}

pub fn fixed_text(verdict: &FixedVerdict, property: &str, n: u32) -> String {
    let mut out = String::new();
    match verdict {
        FixedVerdict::Reachable { trace } => {
            let _ = writeln!(out, "M({n}) reaches {property} in {} steps:", trace.len());
            trace_text(&mut out, trace);
        }
        FixedVerdict::Unreachable { explored } => {
            let _ = writeln!(
                out,
                "M({n}) never reaches {property} ({explored} global states explored)"
            );
        }
    }
    out
}

pub fn decision_text(decision: &Decision, property: &str) -> String {
    let mut out = String::new();
    if decision.unsound {
        let _ = writeln!(
            out,
            "UNSOUND: the protocol is not well-behaved, this result is not trustworthy"
        );
    }
    match &decision.verdict {
        ParamVerdict::Reachable {
            min_n,
            witness,
            trace,
        } => {
            let _ = writeln!(
                out,
                "{property} is reachable; smallest system size {min_n} ({} steps: {})",
                witness.len(),
                witness.join(" ")
            );
            trace_text(&mut out, trace);
        }
        ParamVerdict::Unreachable { basis } => {
            let _ = writeln!(out, "{property} is unreachable for every system size");
            let _ = writeln!(out, "  fixpoint basis ({} elements):", basis.len());
            for b in basis {
                let _ = writeln!(out, "    {b}");
            }
        }
    }
    let _ = writeln!(
        out,
        "{} order, {} iterations, basis size {}",
        decision.order, decision.iterations, decision.basis_size
    );
    out
}

pub fn sweep_text(result: &SweepResult, property: &str) -> String {
    let mut out = String::new();
    match result {
        SweepResult::Found { n, trace } => {
            let _ = writeln!(out, "smallest n with M(n) reaching {property}: {n}");
            trace_text(&mut out, trace);
        }
        SweepResult::NoneUpTo { n_max } => {
            let _ = writeln!(out, "no M(n) with n <= {n_max} reaches {property}");
        }
    }
    out
}
