// Differential testing: random small protocols, parameterized verdicts
// compared against explicit search for every n up to 6.

use gsp::engine::{decide, ParamVerdict};
use gsp::explicit::{check_fixed, ReachQuery, DEFAULT_STATE_BUDGET};
use gsp::protocol::StateId;
use gsp::random::{random_protocol, GenConfig};
use gsp::wellbehaved::certify;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn main() {
    let mut rng = StdRng::seed_from_u64(42);
    let (mut reachable, mut unreachable) = (0, 0);
    let mut tried = 0;
    while reachable + unreachable < 50 {
        tried += 1;
        let p = random_protocol(&mut rng, &GenConfig::default());
        if !certify(&p).well_behaved {
            continue;
        }
        let target = StateId(rng.gen_range(0..p.n_states()));
        let m = rng.gen_range(1..=2);
        let bfs = |n| {
            let query = ReachQuery::new(target, m, n).unwrap();
            check_fixed(&p, query, DEFAULT_STATE_BUDGET)
                .unwrap()
                .is_reachable()
        };
        match decide(&p, target, m).unwrap().verdict {
            ParamVerdict::Reachable { min_n, .. } => {
                assert!(bfs(min_n));
                assert!(min_n == m || !bfs(min_n - 1));
                reachable += 1;
            }
            ParamVerdict::Unreachable { .. } => {
                assert!((m..=6).all(|n| !bfs(n)));
                unreachable += 1;
            }
        }
    }
    println!("{tried} generated, {reachable} reachable and {unreachable} unreachable verdicts agree with search");
}
