// Breadth-first search of a fixed-size system, printing a shortest trace.

use gsp::explicit::{check_fixed, FixedVerdict, ReachQuery, DEFAULT_STATE_BUDGET};
use gsp::fixtures;

fn main() {
    let p = fixtures::smoke_detector_sender();
    let report = p.state_id("Report").unwrap();
    let query = ReachQuery::new(report, 2, 3).unwrap();
    match check_fixed(&p, query, DEFAULT_STATE_BUDGET).unwrap() {
        FixedVerdict::Reachable { trace } => {
            println!("M(3) puts two processes in Report:");
            println!("  {}", trace.initial);
            for step in &trace.steps {
                println!("  --{}--> {}", step.action, step.state);
            }
        }
        FixedVerdict::Unreachable { explored } => println!("unreachable ({explored} states)"),
    }
}
