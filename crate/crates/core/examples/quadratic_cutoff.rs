// The two-cycle protocol whose target needs 16 processes: backward
// reachability finds the bound and explicit search confirms it is tight.

use gsp::engine::{decide, ParamVerdict};
use gsp::explicit::{check_fixed, ReachQuery, DEFAULT_STATE_BUDGET};
use gsp::fixtures;

fn main() {
    let p = fixtures::quadratic_cutoff();
    let target = p.state_id("s_E").unwrap();

    let decision = decide(&p, target, 1).unwrap();
    let ParamVerdict::Reachable { min_n, witness, .. } = &decision.verdict else {
        panic!("s_E should be reachable");
    };
    println!("s_E reachable with {min_n} processes");
    for action in ["i", "a", "b"] {
        let count = witness.iter().filter(|a| *a == action).count();
        println!("  {action} fires {count} times");
    }

    for n in [*min_n - 1, *min_n] {
        let query = ReachQuery::new(target, 1, n).unwrap();
        let verdict = check_fixed(&p, query, DEFAULT_STATE_BUDGET).unwrap();
        println!("M({n}) reaches s_E: {}", verdict.is_reachable());
    }
}
