#![allow(dead_code)]

use gsp::engine::{decide, ParamVerdict};
use gsp::explicit::{check_fixed, ReachQuery, DEFAULT_STATE_BUDGET};
use gsp::protocol::{ActionId, Protocol, StateId};
use gsp::semantics::{enabled, fire, GlobalState};
use gsp::wqo::{antichain_minimize, WqoKind};

pub fn reachable_at(p: &Protocol, target: StateId, m: u32, n: u32) -> bool {
    let query = ReachQuery::new(target, m, n).expect("valid query");
    check_fixed(p, query, DEFAULT_STATE_BUDGET)
        .expect("within budget")
        .is_reachable()
}

/// Compares the parameterized verdict with explicit search up to `n_max`.
pub fn check_against_bfs(p: &Protocol, target: StateId, m: u32, n_max: u32) -> Result<(), String> {
    let decision = decide(p, target, m).map_err(|e| e.to_string())?;
    match decision.verdict {
        ParamVerdict::Reachable { min_n, trace, .. } => {
            if min_n < m {
                return Err(format!("min_n {min_n} below threshold {m}"));
            }
            if trace.last().get(target) < m {
                return Err("witness does not reach the target".into());
            }
            if !reachable_at(p, target, m, min_n) {
                return Err(format!("BFS refutes at min_n = {min_n}"));
            }
            if min_n > m && reachable_at(p, target, m, min_n - 1) {
                return Err(format!("BFS confirms at {} below min_n", min_n - 1));
            }
        }
        ParamVerdict::Unreachable { .. } => {
            if let Some(n) = (m..=n_max).find(|&n| reachable_at(p, target, m, n)) {
                return Err(format!("claimed unreachable but BFS reaches at n = {n}"));
            }
        }
    }
    Ok(())
}

/// All vectors in `{0..=bound}^dim`.
pub fn grid(dim: usize, bound: u32) -> impl Iterator<Item = GlobalState> {
    let mut next = Some(vec![0u32; dim]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for c in succ.iter_mut() {
            if *c < bound {
                *c += 1;
                next = Some(succ);
                break;
            }
            *c = 0;
        }
        Some(GlobalState(current))
    })
}

/// Minimal grid states that fire `a` into the upward closure of `b`,
/// computed with forward firing only.
pub fn brute_pred(
    p: &Protocol,
    wqo: &WqoKind,
    a: ActionId,
    b: &GlobalState,
    bound: u32,
) -> Vec<GlobalState> {
    let hits = grid(p.n_states(), bound)
        .filter(|q| q.total() > 0 && enabled(p, q, a).unwrap())
        .filter(|q| {
            let next = fire(p, q, a).unwrap().successor;
            gsp::wqo::leq(wqo, b, &next).unwrap()
        })
        .collect();
    antichain_minimize(wqo, hits)
}
