// Guard-compatibility certificates, and the witness for a broken protocol.

use gsp::fixtures;
use gsp::wellbehaved::{certify, ActionVerdict};

fn main() {
    let good = certify(&fixtures::smoke_detector());
    for r in &good.actions {
        println!("{:>8}: {:?}", r.action, r.verdict);
    }
    println!("smoke detector well-behaved: {}", good.well_behaved);

    let bad = certify(&fixtures::smoke_detector_mutant());
    for r in &bad.actions {
        if let ActionVerdict::Violation { failures } = &r.verdict {
            let f = &failures[0];
            println!(
                "mutant {}: {} fails on {} at {} ({})",
                r.action, f.condition, f.guard, f.transition, f.failed
            );
        }
    }
}
