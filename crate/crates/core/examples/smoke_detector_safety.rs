// Proves that at most two detectors ever report a fire, for every number
// of detectors, and shows that two reporters are possible.

use gsp::engine::{decide, ParamVerdict};
use gsp::fixtures;

fn main() {
    for (name, p) in [
        ("2-maximal Choose", fixtures::smoke_detector()),
        ("2-sender Choose", fixtures::smoke_detector_sender()),
    ] {
        let report = p.state_id("Report").unwrap();
        let three = decide(&p, report, 3).expect("smoke detector is well-behaved");
        assert!(!three.verdict.is_reachable());
        println!(
            "{name}: three reporters unreachable for all n ({} iterations, basis size {})",
            three.iterations, three.basis_size
        );

        let two = decide(&p, report, 2).unwrap();
        if let ParamVerdict::Reachable { min_n, witness, .. } = &two.verdict {
            println!(
                "{name}: two reporters need {min_n} processes: {}",
                witness.join(" ")
            );
        }
    }
}
