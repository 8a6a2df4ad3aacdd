//! Forward semantics over counter-abstracted global states.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::protocol::{ActionId, ActionKind, Protocol, StateId, StateSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("global state has no processes")]
    ZeroProcesses,
    #[error("unknown action #{0}")]
    UnknownAction(usize),
    #[error("global state has {got} counters but the protocol has {expected} states")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("action `{0}` is not enabled")]
    NotEnabled(String),
}

/// Number of processes in each local state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct GlobalState(pub Vec<u32>);

impl GlobalState {
    pub fn zero(n_states: usize) -> Self {
        GlobalState(vec![0; n_states])
    }

    /// `n` processes, all in `init`.
    pub fn initial(n_states: usize, init: StateId, n: u32) -> Self {
        let mut q = Self::zero(n_states);
        q.0[init.0] = n;
        q
    }

    pub fn unit(n_states: usize, s: StateId, count: u32) -> Self {
        Self::initial(n_states, s, count)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, s: StateId) -> u32 {
        self.0[s.0]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn support(&self) -> StateSet {
        support_of(&self.0)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for GlobalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(">")
    }
}

impl From<Vec<u32>> for GlobalState {
    fn from(v: Vec<u32>) -> Self {
        GlobalState(v)
    }
}

pub(crate) fn support_of(counts: &[u32]) -> StateSet {
    let mut bits = 0u64;
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            bits |= 1u64 << i;
        }
    }
    StateSet(bits)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiringOutcome {
    pub action: String,
    pub successor: GlobalState,
    /// Actual senders per source state (`u_a`).
    pub participation: Vec<u32>,
}

fn check(p: &Protocol, q: &GlobalState, a: ActionId) -> Result<(), SemanticsError> {
    if a.0 >= p.actions().len() {
        return Err(SemanticsError::UnknownAction(a.0));
    }
    if q.dim() != p.n_states() {
        return Err(SemanticsError::DimensionMismatch {
            expected: p.n_states(),
            got: q.dim(),
        });
    }
    if q.total() == 0 {
        return Err(SemanticsError::ZeroProcesses);
    }
    Ok(())
}

/// Enabledness on raw counters; the caller guarantees dimensions match.
pub(crate) fn is_enabled(p: &Protocol, q: &[u32], a: ActionId) -> bool {
    if !support_of(q).is_subset(p.guard_of(a)) {
        return false;
    }
    let from = &p.sync(a).senders_from;
    match p.action(a).kind {
        ActionKind::Sender => q.iter().zip(from).all(|(&c, &v)| c >= v),
        ActionKind::Maximal => q.iter().zip(from).any(|(&c, &v)| c > 0 && v > 0),
    }
}

/// Participation vectors `(u, u')` for firing `a` from `q`. For k-maximal
/// actions each source state contributes `min(q(s), v_a(s))` senders, taking
/// its send indices in ascending order.
pub(crate) fn participation(p: &Protocol, q: &[u32], a: ActionId) -> (Vec<u32>, Vec<u32>) {
    let action = p.action(a);
    let sync = p.sync(a);
    match action.kind {
        ActionKind::Sender => (sync.senders_from.clone(), sync.senders_to.clone()),
        ActionKind::Maximal => {
            let n = q.len();
            let mut u = vec![0u32; n];
            let mut u_to = vec![0u32; n];
            for send in &action.sends {
                let s = send.from.0;
                if u[s] < q[s] {
                    u[s] += 1;
                    u_to[send.to.0] += 1;
                }
            }
            (u, u_to)
        }
    }
}

/// `M_a · (q − u) + u'` on raw counters; `q` must enable `a`.
pub(crate) fn successor_counts(p: &Protocol, q: &[u32], a: ActionId) -> (Vec<u32>, Vec<u32>) {
    let (u, u_to) = participation(p, q, a);
    let rest: Vec<u32> = q.iter().zip(&u).map(|(&c, &x)| c - x).collect();
    let mut next = p.sync(a).apply(&rest);
    for (n, x) in next.iter_mut().zip(&u_to) {
        *n += x;
    }
    (next, u)
}

pub fn enabled(p: &Protocol, q: &GlobalState, a: ActionId) -> Result<bool, SemanticsError> {
    check(p, q, a)?;
    Ok(is_enabled(p, &q.0, a))
}

pub fn fire(p: &Protocol, q: &GlobalState, a: ActionId) -> Result<FiringOutcome, SemanticsError> {
    if !enabled(p, q, a)? {
        return Err(SemanticsError::NotEnabled(p.action(a).name.clone()));
    }
    let (next, participation) = successor_counts(p, &q.0, a);
    Ok(FiringOutcome {
        action: p.action(a).name.clone(),
        successor: GlobalState(next),
        participation,
    })
}

/// One outcome per enabled action, in action declaration order.
pub fn successors(p: &Protocol, q: &GlobalState) -> Result<Vec<FiringOutcome>, SemanticsError> {
    let mut out = Vec::new();
    for a in p.action_ids() {
        if enabled(p, q, a)? {
            out.push(fire(p, q, a)?);
        }
    }
    Ok(out)
}
