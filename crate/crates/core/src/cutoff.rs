//! Sufficient conditions for the cutoff `c = m` on `φ_m(s)` queries.
//!
//! Three lemmas are checked in order: every action is internal or a
//! negotiation (L1), every local path from the initial state to the target
//! is free (L2), or the simple free paths to the target are robust against
//! the receives their sends trigger (L3). When one applies, checking `M(m)`
//! decides the property for every system size.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::explicit::{check_fixed, ExplicitError, FixedVerdict, ReachQuery};
use crate::protocol::{ActionId, ActionKind, Protocol, StateId, StateSet};
use crate::wellbehaved::certify;

pub const DEFAULT_PATH_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutoffError {
    #[error("cutoff lemmas require a well-behaved protocol ({0})")]
    NotCertifiedWellBehaved(String),
    #[error(transparent)]
    Explicit(#[from] ExplicitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeReason {
    Internal,
    Send,
    MatchedReceive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Send { index: usize },
    Receive,
}

/// A local transition of one process.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalEdge {
    #[serde(skip)]
    pub action: ActionId,
    pub kind: EdgeKind,
    #[serde(skip)]
    pub from: StateId,
    #[serde(skip)]
    pub to: StateId,
    /// `None` when the transition is not free.
    pub free: Option<FreeReason>,
    pub label: String,
}

impl LocalEdge {
    pub fn is_free(&self) -> bool {
        self.free.is_some()
    }

    pub fn is_send(&self) -> bool {
        matches!(self.kind, EdgeKind::Send { .. })
    }
}

/// 1-sender actions that share `a`'s receive map and guard, `a` included.
fn siblings(p: &Protocol, a: ActionId) -> impl Iterator<Item = ActionId> + '_ {
    let action = p.action(a);
    p.action_ids().filter(move |&b| {
        let other = p.action(b);
        other.kind == ActionKind::Sender
            && other.arity() == 1
            && other.receive == action.receive
            && other.guard == action.guard
    })
}

fn one_sender(p: &Protocol, a: ActionId) -> bool {
    let action = p.action(a);
    action.kind == ActionKind::Sender && action.arity() == 1
}

fn matched_by_sibling(p: &Protocol, a: ActionId, from: StateId, to: StateId) -> bool {
    one_sender(p, a)
        && siblings(p, a).any(|b| {
            let send = p.action(b).sends[0];
            send.from == from && send.to == to
        })
}

/// Every send edge, and every receive edge that moves the receiver.
pub fn classify_free(p: &Protocol) -> Vec<LocalEdge> {
    let mut edges = Vec::new();
    for a in p.action_ids() {
        let action = p.action(a);
        for (index, send) in action.sends.iter().enumerate() {
            let free = if action.is_internal() {
                Some(FreeReason::Internal)
            } else if action.kind == ActionKind::Maximal || action.arity() == 1 {
                Some(FreeReason::Send)
            } else {
                None
            };
            edges.push(LocalEdge {
                action: a,
                kind: EdgeKind::Send { index },
                from: send.from,
                to: send.to,
                free,
                label: format!(
                    "{}!! {} -> {}",
                    action.name,
                    p.state_name(send.from),
                    p.state_name(send.to)
                ),
            });
        }
        for s in p.states() {
            let t = action.receive_of(s);
            if s == t {
                continue;
            }
            edges.push(LocalEdge {
                action: a,
                kind: EdgeKind::Receive,
                from: s,
                to: t,
                free: matched_by_sibling(p, a, s, t).then_some(FreeReason::MatchedReceive),
                label: format!(
                    "{}?? {} -> {}",
                    action.name,
                    p.state_name(s),
                    p.state_name(t)
                ),
            });
        }
    }
    edges
}

/// A 1-sender action whose sender moves like a receiver would and whose
/// moving receives are all matched by sibling sends.
pub fn is_negotiation(p: &Protocol, a: ActionId) -> bool {
    if !one_sender(p, a) {
        return false;
    }
    let action = p.action(a);
    let send = action.sends[0];
    action.receive_of(send.from) == send.to
        && p.states().all(|s| {
            let t = action.receive_of(s);
            s == t || matched_by_sibling(p, a, s, t)
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Lemma {
    L1,
    L2,
    L3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub lemma: Lemma,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl LemmaCheck {
    fn pass(lemma: Lemma) -> Self {
        LemmaCheck {
            lemma,
            holds: true,
            witness: None,
        }
    }

    fn fail(lemma: Lemma, witness: String) -> Self {
        LemmaCheck {
            lemma,
            holds: false,
            witness: Some(witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutoffResult {
    /// Checks in the order they ran; evaluation stops at the first success.
    pub checks: Vec<LemmaCheck>,
    pub applicable: Option<Lemma>,
    pub cutoff: Option<u32>,
}

fn require_well_behaved(p: &Protocol) -> Result<(), CutoffError> {
    let report = certify(p);
    if report.well_behaved {
        return Ok(());
    }
    let names: Vec<String> = report
        .violations()
        .map(|(action, f)| format!("{action} fails {} on {}", f.condition, f.guard))
        .collect();
    Err(CutoffError::NotCertifiedWellBehaved(names.join(", ")))
}

pub fn check_lemma1(p: &Protocol) -> Result<LemmaCheck, CutoffError> {
    require_well_behaved(p)?;
    Ok(lemma1(p))
}

fn lemma1(p: &Protocol) -> LemmaCheck {
    match p
        .action_ids()
        .find(|&a| !p.action(a).is_internal() && !is_negotiation(p, a))
    {
        None => LemmaCheck::pass(Lemma::L1),
        Some(a) => LemmaCheck::fail(
            Lemma::L1,
            format!(
                "`{}` is neither internal nor a negotiation",
                p.action(a).name
            ),
        ),
    }
}

fn forward(edges: &[LocalEdge], from: StateId, usable: impl Fn(&LocalEdge) -> bool) -> StateSet {
    let mut seen = StateSet::singleton(from);
    let mut stack = vec![from];
    while let Some(s) = stack.pop() {
        for e in edges.iter().filter(|e| e.from == s && usable(e)) {
            if !seen.contains(e.to) {
                seen.insert(e.to);
                stack.push(e.to);
            }
        }
    }
    seen
}

fn backward(edges: &[LocalEdge], to: StateSet) -> StateSet {
    let mut seen = to;
    let mut stack: Vec<StateId> = to.iter().collect();
    while let Some(s) = stack.pop() {
        for e in edges.iter().filter(|e| e.to == s) {
            if !seen.contains(e.from) {
                seen.insert(e.from);
                stack.push(e.from);
            }
        }
    }
    seen
}

pub fn check_lemma2(p: &Protocol, target: StateId) -> Result<LemmaCheck, CutoffError> {
    require_well_behaved(p)?;
    Ok(lemma2(p, &classify_free(p), target))
}

fn lemma2(p: &Protocol, edges: &[LocalEdge], target: StateId) -> LemmaCheck {
    let from_init = forward(edges, p.init(), |_| true);
    let to_target = backward(edges, StateSet::singleton(target));
    match edges
        .iter()
        .find(|e| !e.is_free() && from_init.contains(e.from) && to_target.contains(e.to))
    {
        None => LemmaCheck::pass(Lemma::L2),
        Some(e) => LemmaCheck::fail(
            Lemma::L2,
            format!(
                "non-free transition {} lies on a path to the target",
                e.label
            ),
        ),
    }
}

/// Simple free paths from the initial state to `target`, as edge indices.
/// `None` when more than `budget` paths exist.
pub fn simple_free_paths(
    p: &Protocol,
    edges: &[LocalEdge],
    target: StateId,
    budget: usize,
) -> Option<Vec<Vec<usize>>> {
    fn walk(
        edges: &[LocalEdge],
        at: StateId,
        target: StateId,
        visited: StateSet,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        budget: usize,
    ) -> bool {
        if at == target {
            out.push(path.clone());
            return out.len() <= budget;
        }
        for (i, e) in edges.iter().enumerate() {
            if e.from != at || !e.is_free() || visited.contains(e.to) {
                continue;
            }
            path.push(i);
            let ok = walk(
                edges,
                e.to,
                target,
                visited.union(StateSet::singleton(e.to)),
                path,
                out,
                budget,
            );
            path.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    let mut out = Vec::new();
    let init = p.init();
    walk(
        edges,
        init,
        target,
        StateSet::singleton(init),
        &mut Vec::new(),
        &mut out,
        budget,
    )
    .then_some(out)
}

pub fn check_lemma3(
    p: &Protocol,
    target: StateId,
    budget: usize,
) -> Result<LemmaCheck, CutoffError> {
    require_well_behaved(p)?;
    Ok(lemma3(p, &classify_free(p), target, budget))
}

fn lemma3(p: &Protocol, edges: &[LocalEdge], target: StateId, budget: usize) -> LemmaCheck {
    let Some(paths) = simple_free_paths(p, edges, target, budget) else {
        return LemmaCheck::fail(
            Lemma::L3,
            format!("more than {budget} simple free paths; raise the path budget"),
        );
    };
    if paths.is_empty() {
        return LemmaCheck::fail(Lemma::L3, "no simple free path to the target".into());
    }
    let on_edges: BTreeSet<usize> = paths.iter().flatten().copied().collect();
    let mut on_states = StateSet::singleton(p.init());
    for &i in &on_edges {
        on_states.insert(edges[i].from);
        on_states.insert(edges[i].to);
    }

    for (i, send) in edges.iter().enumerate().filter(|(_, e)| e.is_send()) {
        let a = send.action;
        if p.action(a).is_internal() || is_negotiation(p, a) {
            continue;
        }
        let leaving = edges
            .iter()
            .filter(|e| e.action == a && !e.is_send() && on_states.contains(e.from));
        if !on_edges.contains(&i) {
            if let Some(r) = leaving.clone().next() {
                return LemmaCheck::fail(
                    Lemma::L3,
                    format!(
                        "{} is on no free path but {} moves a process off its state",
                        send.label, r.label
                    ),
                );
            }
            continue;
        }
        for r in leaving.filter(|r| !on_states.contains(r.to)) {
            let back_internal = edges.iter().any(|e| {
                e.free == Some(FreeReason::Internal) && e.from == r.from && on_states.contains(e.to)
            });
            if back_internal {
                continue;
            }
            if let Err(why) = returns_freely(p, edges, r.to, on_states) {
                return LemmaCheck::fail(
                    Lemma::L3,
                    format!("receive {} triggered by {}: {why}", r.label, send.label),
                );
            }
        }
    }
    LemmaCheck::pass(Lemma::L3)
}

/// Every path out of `start` is free until it re-enters `on`, and none can
/// get stuck or wander off for good.
fn returns_freely(
    p: &Protocol,
    edges: &[LocalEdge],
    start: StateId,
    on: StateSet,
) -> Result<(), String> {
    let region = forward(edges, start, |e| !on.contains(e.from));
    let off = StateSet(region.0 & !on.0);
    let internal: Vec<LocalEdge> = edges
        .iter()
        .filter(|e| off.contains(e.from))
        .cloned()
        .collect();
    if let Some(e) = internal.iter().find(|e| !e.is_free()) {
        return Err(format!("non-free transition {} before returning", e.label));
    }
    let can_return = backward(&internal, StateSet(region.0 & on.0));
    if let Some(s) = off.iter().find(|&s| !can_return.contains(s)) {
        return Err(format!("{} cannot return to a free path", p.state_name(s)));
    }
    Ok(())
}

/// Evaluates the lemmas in order and stops at the first that applies.
pub fn cutoff_check(
    p: &Protocol,
    target: StateId,
    m: u32,
    path_budget: usize,
) -> Result<CutoffResult, CutoffError> {
    require_well_behaved(p)?;
    let edges = classify_free(p);
    let mut checks = Vec::new();
    let runs: [&dyn Fn() -> LemmaCheck; 3] =
        [&|| lemma1(p), &|| lemma2(p, &edges, target), &|| {
            lemma3(p, &edges, target, path_budget)
        }];
    for run in runs {
        let check = run();
        let holds = check.holds.then_some(check.lemma);
        checks.push(check);
        if let Some(lemma) = holds {
            return Ok(CutoffResult {
                checks,
                applicable: Some(lemma),
                cutoff: Some(m),
            });
        }
    }
    Ok(CutoffResult {
        checks,
        applicable: None,
        cutoff: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CertifiedVerdict {
    /// `M(cutoff)` was checked and the verdict holds for every size.
    Lifted {
        lemma: Lemma,
        cutoff: u32,
        reachable: bool,
        fixed: FixedVerdict,
    },
    NotAmenable {
        checks: Vec<LemmaCheck>,
    },
}

pub fn certified_cutoff_check(
    p: &Protocol,
    target: StateId,
    m: u32,
    path_budget: usize,
    state_budget: usize,
) -> Result<CertifiedVerdict, CutoffError> {
    let result = cutoff_check(p, target, m, path_budget)?;
    let (Some(lemma), Some(cutoff)) = (result.applicable, result.cutoff) else {
        return Ok(CertifiedVerdict::NotAmenable {
            checks: result.checks,
        });
    };
    let fixed = check_fixed(p, ReachQuery::new(target, m, cutoff)?, state_budget)?;
    Ok(CertifiedVerdict::Lifted {
        lemma,
        cutoff,
        reachable: fixed.is_reachable(),
        fixed,
    })
}
