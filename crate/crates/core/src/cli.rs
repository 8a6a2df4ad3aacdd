//! The `gsp` command line.
//!
//! Exit codes: 0 when the property is refuted or the analysis passed, 1 when
//! the property is witnessed or the analysis came out negative, 2 on errors.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::cutoff::{
    certified_cutoff_check, cutoff_check, CertifiedVerdict, CutoffError, DEFAULT_PATH_BUDGET,
};
use crate::engine::{decide_with, DecideOptions, EngineError};
use crate::explicit::{
    check_fixed, min_witness_size, ExplicitError, ReachQuery, SweepResult, DEFAULT_STATE_BUDGET,
};
use crate::fixtures;
use crate::model::{parse_model, ModelFile, ModelFileError};
use crate::protocol::{validate, ModelError, Protocol, StateId};
use crate::report::{self, Digest, Report};
use crate::wellbehaved::certify;

pub const EXIT_NEGATIVE: i32 = 0;
pub const EXIT_POSITIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("model file: {0}")]
    ModelFile(#[from] ModelFileError),
    #[error("protocol-model: {0}")]
    Model(#[from] ModelError),
    #[error("explicit-checker: {0}")]
    Explicit(#[from] ExplicitError),
    #[error("wsts-engine: {0}")]
    Engine(#[from] EngineError),
    #[error("cutoff-checker: {0}")]
    Cutoff(#[from] CutoffError),
    #[error("unknown fixture `{0}`, expected one of: {list}", list = fixtures::NAMES.join(", "))]
    UnknownFixture(String),
    #[error("no --target given and the model has no property block")]
    MissingTarget,
    #[error("unknown target state `{0}`")]
    UnknownTarget(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "gsp",
    version,
    about = "Parameterized model checking for global synchronization protocols"
)]
struct Cli {
    /// Print a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct PropertyArgs {
    /// Target local state; defaults to the model's property block.
    #[arg(long)]
    target: Option<String>,
    /// Number of processes that must be in the target at once.
    #[arg(long)]
    count: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a model.
    Validate { model: String },
    /// Print the model with all sugar expanded into core actions.
    Desugar { model: String },
    /// Check that every action is guard-compatible.
    Certify { model: String },
    /// Check the small-cutoff lemmas and, when one applies, decide at the cutoff.
    Cutoff {
        model: String,
        #[command(flatten)]
        property: PropertyArgs,
        #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
        path_budget: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        state_budget: usize,
    },
    /// Explicit-state search of the system with exactly N processes.
    Mc {
        model: String,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        property: PropertyArgs,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        state_budget: usize,
    },
    /// Decide the property for every system size by backward reachability.
    Verify {
        model: String,
        #[command(flatten)]
        property: PropertyArgs,
        /// Run even if the protocol is not well-behaved; the report is marked UNSOUND.
        #[arg(long)]
        force_unsound: bool,
        /// Worker threads (0 = all cores); defaults to GSP_THREADS.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Smallest N up to --max whose system reaches the property.
    Sweep {
        model: String,
        #[command(flatten)]
        property: PropertyArgs,
        #[arg(long)]
        max: u32,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        state_budget: usize,
    },
}

/// Loads a model from a path, or a bundled one from `builtin:<name>`.
pub fn load_model(spec: &str) -> Result<ModelFile, CliError> {
    match spec.strip_prefix("builtin:") {
        Some(name) => fixtures::model(name).ok_or_else(|| CliError::UnknownFixture(name.into())),
        None => Ok(parse_model(spec)?),
    }
}

struct Property {
    target: StateId,
    count: u32,
    text: String,
}

fn property(p: &Protocol, model: &ModelFile, args: &PropertyArgs) -> Result<Property, CliError> {
    let declared = model.property.as_ref();
    let name = args
        .target
        .clone()
        .or_else(|| declared.map(|d| d.target.clone()))
        .ok_or(CliError::MissingTarget)?;
    let target = p
        .state_id(&name)
        .ok_or_else(|| CliError::UnknownTarget(name.clone()))?;
    let count = args
        .count
        .or_else(|| declared.filter(|d| d.target == name).map(|d| d.count))
        .unwrap_or(1);
    Ok(Property {
        target,
        count,
        text: format!("phi_{count}({name})"),
    })
}

struct Outcome {
    code: i32,
    digest: Option<Digest>,
    result: Value,
    text: String,
}

fn outcome(code: i32, p: &Protocol, result: Value, text: String) -> Outcome {
    Outcome {
        code,
        digest: Some(Digest::of(p)),
        result,
        text,
    }
}

fn to_value<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("results serialize")
}

fn execute(command: &Command) -> Result<Outcome, CliError> {
    let model_spec = match command {
        Command::Validate { model }
        | Command::Desugar { model }
        | Command::Certify { model }
        | Command::Cutoff { model, .. }
        | Command::Mc { model, .. }
        | Command::Verify { model, .. }
        | Command::Sweep { model, .. } => model,
    };
    let model = load_model(model_spec)?;
    let p = validate(&model)?;

    Ok(match command {
        Command::Validate { .. } => {
            let d = Digest::of(&p);
            let text = format!(
                "valid: {} states, {} core actions, {} non-trivial guards\n",
                d.states, d.actions, d.guards
            );
            outcome(EXIT_NEGATIVE, &p, json!({ "valid": true }), text)
        }
        Command::Desugar { .. } => {
            let core = p.to_model();
            let text = core.render();
            outcome(EXIT_NEGATIVE, &p, to_value(&core), text)
        }
        Command::Certify { .. } => {
            let report = certify(&p);
            let code = if report.well_behaved {
                EXIT_NEGATIVE
            } else {
                EXIT_POSITIVE
            };
            let text = report::certify_text(&p, &report);
            outcome(code, &p, to_value(&report), text)
        }
        Command::Cutoff {
            property: args,
            path_budget,
            state_budget,
            ..
        } => {
            let prop = property(&p, &model, args)?;
            let result = cutoff_check(&p, prop.target, prop.count, *path_budget)?;
            let lifted = if result.applicable.is_some() {
                Some(certified_cutoff_check(
                    &p,
                    prop.target,
                    prop.count,
                    *path_budget,
                    *state_budget,
                )?)
            } else {
                None
            };
            let code = match &lifted {
                Some(CertifiedVerdict::Lifted {
                    reachable: false, ..
                }) => EXIT_NEGATIVE,
                _ => EXIT_POSITIVE,
            };
            let text = report::cutoff_text(&result, lifted.as_ref(), &prop.text);
            let value = json!({
                "property": prop.text,
                "lemmas": to_value(&result),
                "verdict": lifted.as_ref().map(to_value),
            });
            outcome(code, &p, value, text)
        }
        Command::Mc {
            n,
            property: args,
            state_budget,
            ..
        } => {
            let prop = property(&p, &model, args)?;
            let query = ReachQuery::new(prop.target, prop.count, *n)?;
            let verdict = check_fixed(&p, query, *state_budget)?;
            let code = if verdict.is_reachable() {
                EXIT_POSITIVE
            } else {
                EXIT_NEGATIVE
            };
            let text = report::fixed_text(&verdict, &prop.text, *n);
            let value = json!({ "property": prop.text, "n": n, "outcome": to_value(&verdict) });
            outcome(code, &p, value, text)
        }
        Command::Verify {
            property: args,
            force_unsound,
            threads,
            ..
        } => {
            let prop = property(&p, &model, args)?;
            let mut opts = DecideOptions {
                force_unsound: *force_unsound,
                ..DecideOptions::default()
            };
            if let Some(t) = threads {
                opts.threads = *t;
            }
            let decision = decide_with(&p, prop.target, prop.count, &opts)?;
            let code = if decision.verdict.is_reachable() {
                EXIT_POSITIVE
            } else {
                EXIT_NEGATIVE
            };
            let text = report::decision_text(&decision, &prop.text);
            let mut value = json!({ "property": prop.text, "outcome": to_value(&decision) });
            if decision.unsound {
                value["stamp"] = json!("UNSOUND");
            }
            outcome(code, &p, value, text)
        }
        Command::Sweep {
            property: args,
            max,
            state_budget,
            ..
        } => {
            let prop = property(&p, &model, args)?;
            let result = min_witness_size(&p, prop.target, prop.count, *max, *state_budget)?;
            let code = match result {
                SweepResult::Found { .. } => EXIT_POSITIVE,
                SweepResult::NoneUpTo { .. } => EXIT_NEGATIVE,
            };
            let text = report::sweep_text(&result, &prop.text);
            let value = json!({ "property": prop.text, "outcome": to_value(&result) });
            outcome(code, &p, value, text)
        }
    })
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let echo = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    let started = Instant::now();
    match execute(&cli.command) {
        Ok(o) => {
            if cli.json {
                let report = Report::new(echo, o.digest, o.result, started.elapsed());
                let _ = writeln!(out, "{}", report.to_json());
            } else {
                let _ = write!(out, "{}", o.text);
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gsp(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("gsp").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn validate_builtin() {
        let (code, out, _) = gsp(&["validate", "builtin:smoke-detector"]);
        assert_eq!(code, 0);
        assert!(
            out.contains("5 states, 5 core actions, 3 non-trivial guards"),
            "{out}"
        );
    }

    #[test]
    fn unknown_fixture_is_an_error() {
        let (code, _, err) = gsp(&["validate", "builtin:nope"]);
        assert_eq!(code, 2);
        assert!(err.contains("unknown fixture"));
    }

    #[test]
    fn property_defaults_come_from_model() {
        let (code, out, _) = gsp(&["verify", "builtin:smoke-detector"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("phi_3(Report) is unreachable"));
        let (code, _, _) = gsp(&["verify", "builtin:smoke-detector", "--count", "2"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn json_report_shape() {
        let (code, out, _) = gsp(&["--json", "certify", "builtin:smoke-detector-mutant"]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["command"], "--json certify builtin:smoke-detector-mutant");
        assert_eq!(v["digest"]["states"], 5);
        assert_eq!(v["result"]["well_behaved"], false);
        assert!(v["duration_ms"].is_number());
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = gsp(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"));
        let (code, _, err) = gsp(&["frobnicate"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }
}
