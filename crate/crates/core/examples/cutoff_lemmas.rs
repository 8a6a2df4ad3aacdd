// Small-cutoff lemmas: they apply to the smoke detector, where checking
// three processes settles the question, but not to the two-cycle protocol.

use gsp::cutoff::{certified_cutoff_check, classify_free, CertifiedVerdict, DEFAULT_PATH_BUDGET};
use gsp::explicit::DEFAULT_STATE_BUDGET;
use gsp::fixtures;

fn main() {
    let p = fixtures::smoke_detector();
    for edge in classify_free(&p) {
        println!("{:<28} free: {:?}", edge.label, edge.free);
    }

    let cases = [
        (fixtures::smoke_detector(), "Report", 3),
        (fixtures::smoke_detector(), "Report", 2),
        (fixtures::quadratic_cutoff(), "s_E", 1),
    ];
    for (p, target, m) in cases {
        let s = p.state_id(target).unwrap();
        match certified_cutoff_check(&p, s, m, DEFAULT_PATH_BUDGET, DEFAULT_STATE_BUDGET).unwrap() {
            CertifiedVerdict::Lifted {
                lemma,
                cutoff,
                reachable,
                ..
            } => println!("{m} in {target}: {lemma:?}, cutoff {cutoff}, reachable {reachable}"),
            CertifiedVerdict::NotAmenable { checks } => {
                let last = checks.last().and_then(|c| c.witness.clone());
                println!(
                    "{m} in {target}: not amenable ({})",
                    last.unwrap_or_default()
                );
            }
        }
    }
}
