//! Syntactic certification of guard compatibility.
//!
//! An action is strongly guard-compatible if it satisfies C1 (senders) or
//! C2.1 and C2.2 (maximal actions), weakly guard-compatible under C1w or
//! C2.1w and C2.2w, and internal actions may additionally pass C3w. A
//! protocol is well-behaved when every action is compatible in one of these
//! ways.

use serde::Serialize;

use crate::protocol::{ActionId, ActionKind, CoreAction, Protocol, Send, StateId, StateSet};

/// The relation `t ◁ s`: every guard containing `s` also contains `t`.
#[derive(Debug, Clone)]
pub struct StateOrder {
    family: Vec<StateSet>,
    all: StateSet,
    below: Vec<StateSet>,
}

impl StateOrder {
    pub fn new(p: &Protocol) -> Self {
        let family = p.guard_family();
        let all = p.all_states();
        let mut order = StateOrder {
            family,
            all,
            below: Vec::new(),
        };
        order.below = p
            .states()
            .map(|s| order.below_set(StateSet::singleton(s)))
            .collect();
        order
    }

    /// `{t : t ◁ s}`.
    pub fn below(&self, s: StateId) -> StateSet {
        self.below[s.0]
    }

    pub fn lt(&self, t: StateId, s: StateId) -> bool {
        self.below[s.0].contains(t)
    }

    /// `{t : t ◁ H}`, the intersection of all guards containing `H`.
    pub fn below_set(&self, h: StateSet) -> StateSet {
        self.family
            .iter()
            .filter(|g| h.is_subset(**g))
            .fold(self.all, |acc, g| StateSet(acc.0 & g.0))
    }

    pub fn family(&self) -> &[StateSet] {
        &self.family
    }
}

/// Reachability along internal transitions.
#[derive(Debug, Clone)]
pub struct InternalReach {
    edges: Vec<(StateId, StateId, StateSet)>,
    unguarded: Vec<StateSet>,
    n_states: usize,
}

impl InternalReach {
    pub fn new(p: &Protocol) -> Self {
        let all = p.all_states();
        let edges: Vec<_> = p
            .action_ids()
            .filter(|&a| p.action(a).is_internal())
            .map(|a| {
                let send = p.action(a).sends[0];
                (send.from, send.to, p.guard_of(a))
            })
            .collect();
        let mut reach = InternalReach {
            edges,
            unguarded: Vec::new(),
            n_states: p.n_states(),
        };
        reach.unguarded = p.states().map(|s| reach.closure(s, all)).collect();
        reach
    }

    /// States reachable from `from` using internal edges whose guard
    /// contains `lower`; reflexive.
    pub fn closure(&self, from: StateId, lower: StateSet) -> StateSet {
        let mut seen = StateSet::singleton(from);
        let mut stack = vec![from];
        while let Some(s) = stack.pop() {
            for &(u, v, g) in &self.edges {
                if u == s && lower.is_subset(g) && !seen.contains(v) {
                    seen.insert(v);
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// `{s' : s ⤳ s'}` over unguarded internal edges.
    pub fn unguarded(&self, s: StateId) -> StateSet {
        self.unguarded[s.0]
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }
}

/// One failed instance of a condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub condition: &'static str,
    pub guard: String,
    pub transition: String,
    pub failed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ActionVerdict {
    StronglyCompatible {
        condition: &'static str,
    },
    WeaklyCompatible {
        condition: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    /// The strongest applicable condition's failure comes first.
    Violation {
        failures: Vec<Failure>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionReport {
    pub action: String,
    pub verdict: ActionVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuardCompatReport {
    pub well_behaved: bool,
    pub actions: Vec<ActionReport>,
}

impl GuardCompatReport {
    pub fn violations(&self) -> impl Iterator<Item = (&str, &Failure)> {
        self.actions.iter().filter_map(|r| match &r.verdict {
            ActionVerdict::Violation { failures } => Some((r.action.as_str(), &failures[0])),
            _ => None,
        })
    }

    pub fn verdict_of(&self, action: &str) -> Option<&ActionVerdict> {
        self.actions
            .iter()
            .find(|r| r.action == action)
            .map(|r| &r.verdict)
    }
}

struct Ctx<'a> {
    p: &'a Protocol,
    order: StateOrder,
    reach: InternalReach,
}

impl<'a> Ctx<'a> {
    fn new(p: &'a Protocol) -> Self {
        Ctx {
            p,
            order: StateOrder::new(p),
            reach: InternalReach::new(p),
        }
    }

    fn guard_name(&self, g: StateSet) -> String {
        self.p
            .guards()
            .iter()
            .find(|guard| guard.members == g)
            .map_or_else(|| self.p.format_set(g), |guard| guard.name.clone())
    }

    fn edge(&self, from: StateId, to: StateId) -> String {
        format!("{} -> {}", self.p.state_name(from), self.p.state_name(to))
    }

    fn name(&self, s: StateId) -> &str {
        self.p.state_name(s)
    }

    fn fail(
        &self,
        condition: &'static str,
        g: StateSet,
        from: StateId,
        to: StateId,
        failed: String,
    ) -> Failure {
        Failure {
            condition,
            guard: self.guard_name(g),
            transition: self.edge(from, to),
            failed,
        }
    }

    /// Does `s` reach, by unguarded internal steps, a state in `targets`?
    fn escapes(&self, s: StateId, targets: StateSet) -> bool {
        !StateSet(self.reach.unguarded(s).0 & targets.0).is_empty()
    }
}

fn receive_fail(ctx: &Ctx, cond: &'static str, g: StateSet, s: StateId, t: StateId) -> Failure {
    ctx.fail(
        cond,
        g,
        s,
        t,
        format!(
            "receiver from {} lands in {}, outside {}",
            ctx.name(s),
            ctx.name(t),
            ctx.guard_name(g)
        ),
    )
}

fn c1(ctx: &Ctx, a: &CoreAction, guard: StateSet, weak: bool) -> Result<(), Failure> {
    let dests = a.destinations();
    let cond = if weak { "C1w" } else { "C1" };
    let escape = ctx.order.below_set(dests);
    for &g in ctx.order.family() {
        if !dests.is_subset(g) {
            continue;
        }
        for s in guard.iter() {
            let t = a.receive_of(s);
            if g.contains(t) || (weak && ctx.escapes(t, escape)) {
                continue;
            }
            return Err(receive_fail(ctx, cond, g, s, t));
        }
    }
    Ok(())
}

/// C2.1 and C2.2, or their weak variants.
fn c2(ctx: &Ctx, a: &CoreAction, guard: StateSet, weak: bool) -> Result<(), Failure> {
    let (c21, c22) = if weak {
        ("C2.1w", "C2.2w")
    } else {
        ("C2.1", "C2.2")
    };
    let rest = StateSet(guard.0 & !a.sources().0);
    let all_dests = meet_below(ctx, a.sends.iter());
    for &g in ctx.order.family() {
        if a.sends.iter().any(|send| g.contains(send.to)) {
            for s in rest.iter() {
                let t = a.receive_of(s);
                if g.contains(t) || (weak && ctx.escapes(t, all_dests)) {
                    continue;
                }
                return Err(receive_fail(ctx, c21, g, s, t));
            }
        }
        for si in &a.sends {
            for sj in &a.sends {
                if !(ctx.order.lt(si.from, sj.from) && g.contains(sj.to)) {
                    continue;
                }
                if !g.contains(si.to) {
                    return Err(ctx.fail(
                        c22,
                        g,
                        si.from,
                        si.to,
                        format!(
                            "sender from {} lands in {}, outside {}",
                            ctx.name(si.from),
                            ctx.name(si.to),
                            ctx.guard_name(g)
                        ),
                    ));
                }
                let t = a.receive_of(si.from);
                let escape = ctx.order.below(si.to);
                if !(g.contains(t) || (weak && ctx.escapes(t, escape))) {
                    return Err(receive_fail(ctx, c22, g, si.from, t));
                }
            }
        }
    }
    Ok(())
}

/// States below every destination of the given sends.
fn meet_below<'s>(ctx: &Ctx, sends: impl Iterator<Item = &'s Send>) -> StateSet {
    sends.fold(ctx.p.all_states(), |acc, send| {
        StateSet(acc.0 & ctx.order.below(send.to).0)
    })
}

fn c3w(ctx: &Ctx, a: &CoreAction, guard: StateSet) -> Result<(), Failure> {
    let send = a.sends[0];
    let (s, s2) = (send.from, send.to);
    let below = ctx.order.below(s2);
    let lower = guard.union(below);
    for &g in ctx.order.family() {
        if g.contains(s) || !g.contains(s2) {
            continue;
        }
        for t in guard.iter() {
            let reach = ctx.reach.closure(t, lower);
            if StateSet(reach.0 & below.0).is_empty() {
                return Err(Failure {
                    condition: "C3w",
                    guard: ctx.guard_name(g),
                    transition: ctx.edge(s, s2),
                    failed: format!(
                        "{} has no internal path guarded by a superset of {} into {}",
                        ctx.name(t),
                        ctx.p.format_set(lower),
                        ctx.p.format_set(below)
                    ),
                });
            }
        }
    }
    Ok(())
}

fn strong(ctx: &Ctx, a: &CoreAction, guard: StateSet) -> Result<&'static str, Failure> {
    match a.kind {
        ActionKind::Sender => c1(ctx, a, guard, false).map(|()| "C1"),
        ActionKind::Maximal => c2(ctx, a, guard, false).map(|()| "C2.1+C2.2"),
    }
}

type WeakOutcome = Result<(&'static str, Option<String>), (Failure, Option<String>)>;

fn weak(ctx: &Ctx, a: &CoreAction, guard: StateSet) -> WeakOutcome {
    match a.kind {
        ActionKind::Sender => c1(ctx, a, guard, true)
            .map(|()| ("C1w", None))
            .map_err(|f| (f, None)),
        ActionKind::Maximal => c2(ctx, a, guard, true)
            .map(|()| ("C2.1w+C2.2w", None))
            .map_err(|f| (f, c2_note(ctx, a, guard))),
    }
}

/// Explains a C2.1w failure that would pass if the escape target only had
/// to lie below the destinations inside the triggered guard.
fn c2_note(ctx: &Ctx, a: &CoreAction, guard: StateSet) -> Option<String> {
    let rest = StateSet(guard.0 & !a.sources().0);
    let all_dests = meet_below(ctx, a.sends.iter());
    for &g in ctx.order.family() {
        if !a.sends.iter().any(|send| g.contains(send.to)) {
            continue;
        }
        let in_g = meet_below(ctx, a.sends.iter().filter(|send| g.contains(send.to)));
        for s in rest.iter() {
            let t = a.receive_of(s);
            if !g.contains(t) && !ctx.escapes(t, all_dests) && ctx.escapes(t, in_g) {
                return Some(format!(
                    "C2.1w fails for receiver {} -> {} on {} only because the escape \
                     target must lie below every sender destination",
                    ctx.name(s),
                    ctx.name(t),
                    ctx.guard_name(g)
                ));
            }
        }
    }
    None
}

fn classify(ctx: &Ctx, a: ActionId) -> ActionVerdict {
    let action = ctx.p.action(a);
    let guard = ctx.p.guard_of(a);
    let strong_failure = match strong(ctx, action, guard) {
        Ok(condition) => return ActionVerdict::StronglyCompatible { condition },
        Err(f) => f,
    };
    let weak_failure = match weak(ctx, action, guard) {
        Ok((condition, note)) => return ActionVerdict::WeaklyCompatible { condition, note },
        Err((f, note)) => (f, note),
    };
    let mut failures = vec![strong_failure, weak_failure.0];
    if action.is_internal() {
        match c3w(ctx, action, guard) {
            Ok(()) => {
                return ActionVerdict::WeaklyCompatible {
                    condition: "C3w",
                    note: None,
                }
            }
            Err(f) => failures.push(f),
        }
    }
    if let Some(note) = weak_failure.1 {
        failures[1].failed.push_str(&format!(" ({note})"));
    }
    ActionVerdict::Violation { failures }
}

pub fn check_c1(p: &Protocol, a: ActionId) -> Result<(), Failure> {
    let ctx = Ctx::new(p);
    c1(&ctx, p.action(a), p.guard_of(a), false)
}

pub fn check_c2(p: &Protocol, a: ActionId) -> Result<(), Failure> {
    let ctx = Ctx::new(p);
    c2(&ctx, p.action(a), p.guard_of(a), false)
}

/// C1w for senders, C2.1w and C2.2w for maximal actions.
pub fn check_weak(p: &Protocol, a: ActionId) -> Result<(), Failure> {
    let ctx = Ctx::new(p);
    weak(&ctx, p.action(a), p.guard_of(a))
        .map(|_| ())
        .map_err(|(f, _)| f)
}

/// C3w; only meaningful for internal actions, others fail with a witness.
pub fn check_c3w(p: &Protocol, a: ActionId) -> Result<(), Failure> {
    let action = p.action(a);
    let ctx = Ctx::new(p);
    if !action.is_internal() {
        return Err(Failure {
            condition: "C3w",
            guard: String::new(),
            transition: action.name.clone(),
            failed: "not an internal transition".into(),
        });
    }
    c3w(&ctx, action, p.guard_of(a))
}

pub fn certify(p: &Protocol) -> GuardCompatReport {
    let ctx = Ctx::new(p);
    let actions: Vec<ActionReport> = p
        .action_ids()
        .map(|a| ActionReport {
            action: p.action(a).name.clone(),
            verdict: classify(&ctx, a),
        })
        .collect();
    let well_behaved = actions
        .iter()
        .all(|r| !matches!(r.verdict, ActionVerdict::Violation { .. }));
    GuardCompatReport {
        well_behaved,
        actions,
    }
}
