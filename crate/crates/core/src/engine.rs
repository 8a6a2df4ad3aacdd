//! Backward reachability over upward-closed sets of global states.
//!
//! Unguarded protocols use the component-wise order; guarded ones use the
//! guard-refined order, which is only sound when the protocol is certified
//! well-behaved.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::explicit::{Trace, TraceStep};
use crate::protocol::{ActionId, ActionKind, Protocol, StateId, StateSet};
use crate::semantics::{is_enabled, successor_counts, support_of, GlobalState};
use crate::wellbehaved::certify;
use crate::wqo::{antichain_minimize, Ucs, WqoKind};

/// Guard-refined bases enumerate supports, so the state count is bounded.
pub const MAX_REFINED_STATES: usize = 16;
pub const DEFAULT_BASIS_BUDGET: usize = 1_000_000;
pub const THREADS_ENV: &str = "GSP_THREADS";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("threshold must be at least 1")]
    InvalidThreshold,
    #[error(
        "protocol is not well-behaved ({violations}); the guard-refined analysis would be \
         unsound, pass --force-unsound to run it anyway"
    )]
    NotCertifiedWellBehaved { violations: String },
    #[error("guarded protocols are limited to {limit} local states, this one has {got}")]
    TooManyStates { limit: usize, got: usize },
    #[error("backward search exceeded {budget} basis elements")]
    BasisBudgetExceeded { budget: usize },
    #[error("witness replay failed at step {step}: action `{action}` is not enabled")]
    WitnessReplay { step: usize, action: String },
    #[error("could not start worker threads: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone)]
pub struct DecideOptions {
    /// Run the guard-refined analysis even without a certificate.
    pub force_unsound: bool,
    /// Worker threads; 0 picks the number of cores.
    pub threads: usize,
    pub basis_budget: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            force_unsound: false,
            threads: std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(0),
            basis_budget: DEFAULT_BASIS_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ParamVerdict {
    /// `min_n` is the smallest system size that reaches the target.
    Reachable {
        min_n: u32,
        witness: Vec<String>,
        trace: Trace,
    },
    /// The fixpoint basis of all states that can reach the target.
    Unreachable { basis: Vec<GlobalState> },
}

impl ParamVerdict {
    pub fn is_reachable(&self) -> bool {
        matches!(self, ParamVerdict::Reachable { .. })
    }

    pub fn min_n(&self) -> Option<u32> {
        match self {
            ParamVerdict::Reachable { min_n, .. } => Some(*min_n),
            ParamVerdict::Unreachable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub order: &'static str,
    /// Set when the guard-refined order ran without a certificate.
    pub unsound: bool,
    pub iterations: usize,
    pub basis_size: usize,
    #[serde(flatten)]
    pub verdict: ParamVerdict,
}

/// Minimal states with at least `m` processes in `target`.
pub fn target_basis(p: &Protocol, wqo: &WqoKind, target: StateId, m: u32) -> Ucs {
    let n = p.n_states();
    let peak = GlobalState::unit(n, target, m);
    let candidates = match wqo {
        WqoKind::ComponentWise => vec![peak],
        WqoKind::GuardRefined(_) => {
            let others = StateSet(p.all_states().0 & !StateSet::singleton(target).0);
            submasks(others)
                .map(|extra| {
                    let mut q = peak.clone();
                    for s in extra.iter() {
                        q.0[s.0] = 1;
                    }
                    q
                })
                .collect()
        }
    };
    Ucs::new(wqo.clone(), candidates)
}

/// All subsets of `mask`, including the empty one.
fn submasks(mask: StateSet) -> impl Iterator<Item = StateSet> {
    let mut next = Some(mask.0);
    std::iter::from_fn(move || {
        let sub = next?;
        next = if sub == 0 {
            None
        } else {
            Some((sub - 1) & mask.0)
        };
        Some(StateSet(sub))
    })
}

/// Which senders participate: `c` senders per source state, with their
/// destinations `u_to`. States with fewer senders than requested are pinned.
struct Pattern {
    c: Vec<u32>,
    u_to: Vec<u32>,
    pinned: StateSet,
}

fn patterns(p: &Protocol, a: ActionId) -> Vec<Pattern> {
    let action = p.action(a);
    let sync = p.sync(a);
    let n = p.n_states();
    match action.kind {
        ActionKind::Sender => vec![Pattern {
            c: sync.senders_from.clone(),
            u_to: sync.senders_to.clone(),
            pinned: StateSet::default(),
        }],
        ActionKind::Maximal => {
            let sources: Vec<usize> = (0..n).filter(|&s| sync.senders_from[s] > 0).collect();
            let mut out = Vec::new();
            let mut c = vec![0u32; n];
            loop {
                if c.iter().any(|&x| x > 0) {
                    let mut u_to = vec![0u32; n];
                    let mut taken = vec![0u32; n];
                    for send in &action.sends {
                        let s = send.from.0;
                        if taken[s] < c[s] {
                            taken[s] += 1;
                            u_to[send.to.0] += 1;
                        }
                    }
                    let pinned = sources
                        .iter()
                        .filter(|&&s| c[s] < sync.senders_from[s])
                        .map(|&s| StateId(s))
                        .collect();
                    out.push(Pattern {
                        c: c.clone(),
                        u_to,
                        pinned,
                    });
                }
                // odometer over c(s) in 0..=v(s)
                let mut i = 0;
                loop {
                    if i == sources.len() {
                        return out;
                    }
                    let s = sources[i];
                    if c[s] < sync.senders_from[s] {
                        c[s] += 1;
                        break;
                    }
                    c[s] = 0;
                    i += 1;
                }
            }
        }
    }
}

/// Adds every way of spreading each demand over its preimage states.
fn distribute(q: &mut Vec<u32>, demands: &[(u32, Vec<usize>)], out: &mut Vec<Vec<u32>>) {
    let Some(((d, pre), rest)) = demands.split_first() else {
        out.push(q.clone());
        return;
    };
    fn place(
        q: &mut Vec<u32>,
        left: u32,
        pre: &[usize],
        rest: &[(u32, Vec<usize>)],
        out: &mut Vec<Vec<u32>>,
    ) {
        let (&s, tail) = pre.split_first().expect("non-empty preimage");
        if tail.is_empty() {
            q[s] += left;
            distribute(q, rest, out);
            q[s] -= left;
            return;
        }
        for k in 0..=left {
            q[s] += k;
            place(q, left - k, tail, rest, out);
            q[s] -= k;
        }
    }
    place(q, *d, pre, rest, out);
}

/// Every candidate predecessor of `b` under `a`, before minimization.
fn candidates(p: &Protocol, wqo: &WqoKind, a: ActionId, b: &[u32]) -> Vec<Vec<u32>> {
    let guard = p.guard_of(a);
    let target = &p.sync(a).target;
    let n = p.n_states();
    let mut out = Vec::new();
    let mut raw = Vec::new();
    for pat in patterns(p, a) {
        if !support_of(&pat.c).is_subset(guard) {
            continue;
        }
        let pool = StateSet(guard.0 & !pat.pinned.0);
        let splits: Vec<(StateSet, StateSet)> = match wqo {
            WqoKind::ComponentWise => vec![(StateSet::default(), pool)],
            WqoKind::GuardRefined(_) => submasks(pool).map(|y| (y, y)).collect(),
        };
        'split: for (ones, free) in splits {
            let mut q = pat.c.clone();
            let mut succ = pat.u_to.clone();
            for s in ones.iter() {
                q[s.0] += 1;
                succ[target[s.0].0] += 1;
            }
            let mut demands = Vec::new();
            for t in 0..n {
                let d = b[t].saturating_sub(succ[t]);
                if d == 0 {
                    continue;
                }
                let pre: Vec<usize> = free
                    .iter()
                    .filter(|s| target[s.0].0 == t)
                    .map(|s| s.0)
                    .collect();
                if pre.is_empty() {
                    continue 'split;
                }
                demands.push((d, pre));
            }
            raw.clear();
            distribute(&mut q, &demands, &mut raw);
            for q in raw.drain(..) {
                if is_enabled(p, &q, a) && wqo.le(b, &successor_counts(p, &q, a).0) {
                    out.push(q);
                }
            }
        }
    }
    out
}

/// Minimal states that enable `a` and move into the upward closure of `b`.
pub fn pred_action(p: &Protocol, wqo: &WqoKind, a: ActionId, b: &GlobalState) -> Vec<GlobalState> {
    let cands = candidates(p, wqo, a, &b.0)
        .into_iter()
        .map(GlobalState)
        .collect();
    antichain_minimize(wqo, cands)
}

/// Basis of `Pred(↑c) ∪ ↑c`.
pub fn pred_basis(p: &Protocol, c: &Ucs) -> Ucs {
    let wqo = c.wqo();
    let mut all: Vec<GlobalState> = c.basis().to_vec();
    for b in c.basis() {
        for a in p.action_ids() {
            all.extend(pred_action(p, wqo, a, b));
        }
    }
    Ucs::new(wqo.clone(), all)
}

pub fn decide(p: &Protocol, target: StateId, m: u32) -> Result<Decision, EngineError> {
    decide_with(p, target, m, &DecideOptions::default())
}

struct Node {
    state: GlobalState,
    /// Firing this action moves `state` above the parent's state.
    parent: Option<(usize, ActionId)>,
}

pub fn decide_with(
    p: &Protocol,
    target: StateId,
    m: u32,
    opts: &DecideOptions,
) -> Result<Decision, EngineError> {
    if m == 0 {
        return Err(EngineError::InvalidThreshold);
    }
    let wqo = WqoKind::for_protocol(p);
    let mut unsound = false;
    if let WqoKind::GuardRefined(_) = wqo {
        if p.n_states() > MAX_REFINED_STATES {
            return Err(EngineError::TooManyStates {
                limit: MAX_REFINED_STATES,
                got: p.n_states(),
            });
        }
        let report = certify(p);
        if !report.well_behaved {
            if !opts.force_unsound {
                let violations = report
                    .violations()
                    .map(|(action, f)| format!("{action} fails {} on {}", f.condition, f.guard))
                    .collect::<Vec<_>>()
                    .join(", ");
                return Err(EngineError::NotCertifiedWellBehaved { violations });
            }
            unsound = true;
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| EngineError::ThreadPool(e.to_string()))?;

    let mut ucs = target_basis(p, &wqo, target, m);
    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashMap<GlobalState, usize> = HashMap::new();
    let mut frontier = Vec::new();
    for b in ucs.basis() {
        index.insert(b.clone(), nodes.len());
        frontier.push(nodes.len());
        nodes.push(Node {
            state: b.clone(),
            parent: None,
        });
    }

    let actions: Vec<ActionId> = p.action_ids().collect();
    let mut iterations = 0;
    while !frontier.is_empty() {
        iterations += 1;
        let live: Vec<usize> = frontier
            .into_iter()
            .filter(|&id| ucs.basis().binary_search(&nodes[id].state).is_ok())
            .collect();
        let work: Vec<(usize, ActionId)> = live
            .iter()
            .flat_map(|&id| actions.iter().map(move |&a| (id, a)))
            .collect();
        let results: Vec<Vec<GlobalState>> = pool.install(|| {
            work.par_iter()
                .map(|&(id, a)| pred_action(p, &wqo, a, &nodes[id].state))
                .collect()
        });
        frontier = Vec::new();
        for (&(id, a), preds) in work.iter().zip(results) {
            for q in preds {
                if !ucs.insert(q.clone()) {
                    continue;
                }
                if ucs.len() > opts.basis_budget {
                    return Err(EngineError::BasisBudgetExceeded {
                        budget: opts.basis_budget,
                    });
                }
                index.insert(q.clone(), nodes.len());
                frontier.push(nodes.len());
                nodes.push(Node {
                    state: q,
                    parent: Some((id, a)),
                });
            }
        }
    }

    let init = StateSet::singleton(p.init());
    let start = ucs
        .basis()
        .iter()
        .filter(|b| b.support().is_subset(init))
        .min_by_key(|b| b.get(p.init()));
    let verdict = match start {
        None => ParamVerdict::Unreachable {
            basis: ucs.basis().to_vec(),
        },
        Some(b) => {
            let mut actions = Vec::new();
            let mut at = index[b];
            while let Some((parent, a)) = nodes[at].parent {
                actions.push(a);
                at = parent;
            }
            let min_n = b.get(p.init());
            let trace = replay(p, min_n, &actions)?;
            ParamVerdict::Reachable {
                min_n,
                witness: actions.iter().map(|&a| p.action(a).name.clone()).collect(),
                trace,
            }
        }
    };
    Ok(Decision {
        order: wqo.label(),
        unsound,
        iterations,
        basis_size: ucs.len(),
        verdict,
    })
}

fn replay(p: &Protocol, n: u32, actions: &[ActionId]) -> Result<Trace, EngineError> {
    let initial = GlobalState::initial(p.n_states(), p.init(), n);
    let mut current = initial.0.clone();
    let mut steps = Vec::with_capacity(actions.len());
    for (step, &a) in actions.iter().enumerate() {
        if !is_enabled(p, &current, a) {
            return Err(EngineError::WitnessReplay {
                step,
                action: p.action(a).name.clone(),
            });
        }
        current = successor_counts(p, &current, a).0;
        steps.push(TraceStep {
            action: p.action(a).name.clone(),
            state: GlobalState(current.clone()),
        });
    }
    Ok(Trace { initial, steps })
}
