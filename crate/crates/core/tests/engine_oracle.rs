mod common;

use gsp::engine::pred_action;
use gsp::random::{random_protocol, GenConfig};
use gsp::semantics::GlobalState;
use gsp::wellbehaved::certify;
use gsp::wqo::WqoKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn decide_agrees_with_bfs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 60 {
        let p = random_protocol(&mut rng, &GenConfig::default());
        if !certify(&p).well_behaved {
            continue;
        }
        let target = gsp::protocol::StateId(rng.gen_range(0..p.n_states()));
        let m = rng.gen_range(1..=2);
        if let Err(e) = common::check_against_bfs(&p, target, m, 6) {
            panic!("{e}\n{}", p.to_model().render());
        }
        checked += 1;
    }
}

#[test]
fn pred_matches_brute_force_on_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cfg = GenConfig {
        max_states: 4,
        ..GenConfig::default()
    };
    for _ in 0..40 {
        let p = random_protocol(&mut rng, &cfg);
        let wqo = WqoKind::for_protocol(&p);
        let b = GlobalState((0..p.n_states()).map(|_| rng.gen_range(0..=2)).collect());
        if b.total() == 0 {
            continue;
        }
        let bound = 5;
        for a in p.action_ids() {
            let fast: Vec<_> = pred_action(&p, &wqo, a, &b)
                .into_iter()
                .filter(|q| q.0.iter().all(|&c| c <= bound))
                .collect();
            let slow = common::brute_pred(&p, &wqo, a, &b, bound);
            assert_eq!(
                fast,
                slow,
                "action {} b {b}\n{}",
                p.action(a).name,
                p.to_model().render()
            );
        }
    }
}
