//! Breadth-first model checking of `M(n)` for a fixed number of processes.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::protocol::{Protocol, StateId};
use crate::semantics::{is_enabled, successor_counts, GlobalState};

pub const DEFAULT_STATE_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplicitError {
    #[error("threshold {threshold} must be between 1 and the system size {size}")]
    InvalidQuery { threshold: u32, size: u32 },
    #[error("explored more than {budget} global states at n = {size}; lower n or raise the state budget")]
    StateBudgetExceeded { budget: usize, size: u32 },
}

/// Does `M(size)` reach a global state with at least `threshold` processes in `target`?
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReachQuery {
    pub target: StateId,
    pub threshold: u32,
    pub size: u32,
}

impl ReachQuery {
    pub fn new(target: StateId, threshold: u32, size: u32) -> Result<Self, ExplicitError> {
        if threshold == 0 || size == 0 || threshold > size {
            return Err(ExplicitError::InvalidQuery { threshold, size });
        }
        Ok(ReachQuery {
            target,
            threshold,
            size,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub action: String,
    pub state: GlobalState,
}

/// A run from the initial state; the last state satisfies the query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub initial: GlobalState,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// All states on the run, initial state first.
    pub fn states(&self) -> Vec<&GlobalState> {
        std::iter::once(&self.initial)
            .chain(self.steps.iter().map(|s| &s.state))
            .collect()
    }

    pub fn last(&self) -> &GlobalState {
        self.steps.last().map_or(&self.initial, |s| &s.state)
    }

    pub fn actions(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.action.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FixedVerdict {
    Reachable { trace: Trace },
    Unreachable { explored: usize },
}

impl FixedVerdict {
    pub fn is_reachable(&self) -> bool {
        matches!(self, FixedVerdict::Reachable { .. })
    }
}

/// A discovered state with its `(parent, action)` back-pointer.
type Node = (Vec<u32>, Option<(usize, usize)>);

/// Decides `M(n) ⊨ φ_m(s)`, returning a shortest witness when reachable.
pub fn check_fixed(
    p: &Protocol,
    query: ReachQuery,
    budget: usize,
) -> Result<FixedVerdict, ExplicitError> {
    let goal = |q: &[u32]| q[query.target.0] >= query.threshold;
    let initial = GlobalState::initial(p.n_states(), p.init(), query.size);

    // arena of discovered states with (parent, action) back-pointers
    let mut arena: Vec<Node> = vec![(initial.0.clone(), None)];
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    index.insert(initial.0.clone(), 0);
    let mut queue = VecDeque::from([0usize]);

    let rebuild = |arena: &[Node], mut at: usize| {
        let mut steps = Vec::new();
        while let Some((parent, action)) = arena[at].1 {
            steps.push(TraceStep {
                action: p.actions()[action].name.clone(),
                state: GlobalState(arena[at].0.clone()),
            });
            at = parent;
        }
        steps.reverse();
        Trace {
            initial: initial.clone(),
            steps,
        }
    };

    if goal(&initial.0) {
        return Ok(FixedVerdict::Reachable {
            trace: rebuild(&arena, 0),
        });
    }

    while let Some(at) = queue.pop_front() {
        for a in p.action_ids() {
            let current = &arena[at].0;
            if !is_enabled(p, current, a) {
                continue;
            }
            let (next, _) = successor_counts(p, current, a);
            if index.contains_key(&next) {
                continue;
            }
            if arena.len() >= budget {
                return Err(ExplicitError::StateBudgetExceeded {
                    budget,
                    size: query.size,
                });
            }
            let id = arena.len();
            let reached = goal(&next);
            index.insert(next.clone(), id);
            arena.push((next, Some((at, a.0))));
            if reached {
                return Ok(FixedVerdict::Reachable {
                    trace: rebuild(&arena, id),
                });
            }
            queue.push_back(id);
        }
    }
    Ok(FixedVerdict::Unreachable {
        explored: arena.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SweepResult {
    Found { n: u32, trace: Trace },
    NoneUpTo { n_max: u32 },
}

/// Smallest `n` in `[m, n_max]` with `M(n) ⊨ φ_m(target)`.
pub fn min_witness_size(
    p: &Protocol,
    target: StateId,
    threshold: u32,
    n_max: u32,
    budget: usize,
) -> Result<SweepResult, ExplicitError> {
    if threshold == 0 || n_max < threshold {
        return Err(ExplicitError::InvalidQuery {
            threshold,
            size: n_max,
        });
    }
    for n in threshold..=n_max {
        let query = ReachQuery::new(target, threshold, n)?;
        if let FixedVerdict::Reachable { trace } = check_fixed(p, query, budget)? {
            return Ok(SweepResult::Found { n, trace });
        }
    }
    Ok(SweepResult::NoneUpTo { n_max })
}
