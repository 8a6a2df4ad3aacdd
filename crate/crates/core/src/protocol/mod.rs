//! Validated process definitions.
//!
//! A [`Protocol`] is a finite set of local states, an initial state, a family of
//! guards and a list of core actions. Every core action is either a k-sender or
//! a k-maximal action with `k` unique sending transitions and a total,
//! deterministic receive map. Derived primitives (internal transitions,
//! rendezvous, negotiations, disjunctive guards) are expanded into core actions
//! by [`sugar::desugar`] during [`validate`].

pub mod sugar;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{ActionDecl, GuardTable, KindDecl, ModelFile, StateList};
pub use sugar::{desugar, SugarDecl};

/// Largest number of local states a protocol may declare.
pub const MAX_STATES: usize = 64;

/// Name of the always-registered trivial guard (all states).
pub const TRIVIAL_GUARD: &str = "all";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("protocol declares no states")]
    NoStates,
    #[error("protocol declares {0} states; at most {MAX_STATES} are supported")]
    TooManyStates(usize),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{name}` in {context}")]
    UnknownState { name: String, context: String },
    #[error("duplicate guard `{0}`")]
    DuplicateGuard(String),
    #[error("unknown guard `{name}` in {context}")]
    UnknownGuard { name: String, context: String },
    #[error("guard `{0}` is empty")]
    EmptyGuard(String),
    #[error("duplicate action name `{0}`")]
    DuplicateActionName(String),
    #[error("action `{action}` declares arity {declared} but has {sends} sending transitions")]
    ArityMismatch {
        action: String,
        declared: usize,
        sends: usize,
    },
    #[error(
        "action `{action}` receive map sends `{source_state}` to both `{first}` and `{second}`"
    )]
    NonFunctionalReceiveMap {
        action: String,
        source_state: String,
        first: String,
        second: String,
    },
    #[error("negotiation `{0}` has an empty map")]
    EmptyNegotiation(String),
    #[error("invalid sugar declaration `{name}`: {reason}")]
    InvalidSugar { name: String, reason: String },
}

/// Ordinal of a local state in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Ordinal of a guard in the protocol's guard table; `GuardId(0)` is trivial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GuardId(pub usize);

/// Ordinal of a core action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ActionId(pub usize);

/// A set of local states as a bitmask over state ordinals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet(pub u64);

impl StateSet {
    pub const EMPTY: StateSet = StateSet(0);

    pub fn full(n_states: usize) -> Self {
        if n_states >= 64 {
            StateSet(u64::MAX)
        } else {
            StateSet((1u64 << n_states) - 1)
        }
    }

    pub fn singleton(s: StateId) -> Self {
        StateSet(1u64 << s.0)
    }

    pub fn contains(self, s: StateId) -> bool {
        self.0 & (1u64 << s.0) != 0
    }

    pub fn insert(&mut self, s: StateId) {
        self.0 |= 1u64 << s.0;
    }

    pub fn is_subset(self, other: StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: StateSet) -> StateSet {
        StateSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = StateId> {
        let bits = self.0;
        (0..64usize)
            .filter(move |i| bits & (1u64 << i) != 0)
            .map(StateId)
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let mut set = StateSet::EMPTY;
        for s in iter {
            set.insert(s);
        }
        set
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guard {
    pub name: String,
    pub members: StateSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Sender,
    Maximal,
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionKind::Sender => f.write_str("sender"),
            ActionKind::Maximal => f.write_str("maximal"),
        }
    }
}

/// One sending transition `from --a_i!!--> to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Send {
    pub from: StateId,
    pub to: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreAction {
    pub name: String,
    pub kind: ActionKind,
    /// Send index `i` (0-based) owns exactly one transition.
    pub sends: Vec<Send>,
    /// Total receive map, indexed by source state.
    pub receive: Vec<StateId>,
    pub guard: GuardId,
}

impl CoreAction {
    pub fn arity(&self) -> usize {
        self.sends.len()
    }

    pub fn receive_of(&self, s: StateId) -> StateId {
        self.receive[s.0]
    }

    pub fn has_identity_receive(&self) -> bool {
        self.receive.iter().enumerate().all(|(i, t)| t.0 == i)
    }

    /// An internal transition is a 1-sender action whose receivers never move.
    pub fn is_internal(&self) -> bool {
        self.kind == ActionKind::Sender && self.arity() == 1 && self.has_identity_receive()
    }

    pub fn sources(&self) -> StateSet {
        self.sends.iter().map(|s| s.from).collect()
    }

    pub fn destinations(&self) -> StateSet {
        self.sends.iter().map(|s| s.to).collect()
    }
}

/// Synchronization matrix `M_a` (stored column-wise as the receive target of
/// every state) and the sender vectors `v_a`, `v_a'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncMatrix {
    pub target: Vec<StateId>,
    pub senders_from: Vec<u32>,
    pub senders_to: Vec<u32>,
}

impl SyncMatrix {
    /// Entry `M_a(row, col)`: 1 iff the receive map sends `col` to `row`.
    pub fn entry(&self, row: StateId, col: StateId) -> u8 {
        u8::from(self.target[col.0] == row)
    }

    pub fn dense(&self) -> Vec<Vec<u8>> {
        let n = self.target.len();
        (0..n)
            .map(|row| {
                (0..n)
                    .map(|col| self.entry(StateId(row), StateId(col)))
                    .collect()
            })
            .collect()
    }

    /// `M_a · x` for a counter vector `x`.
    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; x.len()];
        for (s, &count) in x.iter().enumerate() {
            out[self.target[s].0] += count;
        }
        out
    }
}

/// Builds `M_a`, `v_a` and `v_a'` for a validated action.
pub fn build_sync(action: &CoreAction, n_states: usize) -> SyncMatrix {
    let mut senders_from = vec![0u32; n_states];
    let mut senders_to = vec![0u32; n_states];
    for send in &action.sends {
        senders_from[send.from.0] += 1;
        senders_to[send.to.0] += 1;
    }
    SyncMatrix {
        target: action.receive.clone(),
        senders_from,
        senders_to,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protocol {
    states: Vec<String>,
    init: StateId,
    guards: Vec<Guard>,
    actions: Vec<CoreAction>,
    sync: Vec<SyncMatrix>,
}

impl Protocol {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId)
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.states.len())
    }

    pub fn init(&self) -> StateId {
        self.init
    }

    /// Registered guards; index 0 is the trivial guard.
    pub fn guards(&self) -> &[Guard] {
        &self.guards
    }

    pub fn guard(&self, g: GuardId) -> &Guard {
        &self.guards[g.0]
    }

    pub fn guard_of(&self, a: ActionId) -> StateSet {
        self.guards[self.actions[a.0].guard.0].members
    }

    pub fn actions(&self) -> &[CoreAction] {
        &self.actions
    }

    pub fn action(&self, a: ActionId) -> &CoreAction {
        &self.actions[a.0]
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len()).map(ActionId)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions
            .iter()
            .position(|a| a.name == name)
            .map(ActionId)
    }

    pub fn sync(&self, a: ActionId) -> &SyncMatrix {
        &self.sync[a.0]
    }

    /// Distinct non-trivial guard sets that label at least one action, in
    /// order of first registration.
    pub fn guard_family(&self) -> Vec<StateSet> {
        let full = self.all_states();
        let mut family: Vec<StateSet> = Vec::new();
        for guard in &self.guards {
            let used = self
                .actions
                .iter()
                .any(|a| self.guards[a.guard.0].members == guard.members);
            if used && guard.members != full && !family.contains(&guard.members) {
                family.push(guard.members);
            }
        }
        family
    }

    pub fn is_unguarded(&self) -> bool {
        self.guard_family().is_empty()
    }

    pub fn format_set(&self, set: StateSet) -> String {
        let names: Vec<&str> = set.iter().map(|s| self.state_name(s)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Renders the protocol as a model file with core actions only. Receive
    /// self-loops are omitted, since validation completes them.
    pub fn to_model(&self) -> ModelFile {
        let guards = GuardTable(
            self.guards
                .iter()
                .skip(1)
                .map(|g| {
                    (
                        g.name.clone(),
                        g.members
                            .iter()
                            .map(|s| self.state_name(s).to_string())
                            .collect(),
                    )
                })
                .collect(),
        );
        let actions = self
            .actions
            .iter()
            .map(|a| ActionDecl {
                name: a.name.clone(),
                kind: match a.kind {
                    ActionKind::Sender => KindDecl::Sender,
                    ActionKind::Maximal => KindDecl::Maximal,
                },
                arity: None,
                sends: a
                    .sends
                    .iter()
                    .map(|s| {
                        (
                            self.state_name(s.from).to_string(),
                            self.state_name(s.to).to_string(),
                        )
                    })
                    .collect(),
                receives: a
                    .receive
                    .iter()
                    .enumerate()
                    .filter(|(i, t)| t.0 != *i)
                    .map(|(i, t)| (self.states[i].clone(), self.state_name(*t).to_string()))
                    .collect(),
                guard: (a.guard.0 != 0).then(|| self.guards[a.guard.0].name.clone()),
            })
            .collect();
        ModelFile {
            states: StateList(self.states.clone()),
            init: self.state_name(self.init).to_string(),
            guards,
            actions,
            sugar: Vec::new(),
            property: None,
        }
    }
}

/// Name resolution shared by validation and desugaring.
pub(crate) struct Names<'a> {
    states: &'a [String],
    guards: &'a [Guard],
}

impl<'a> Names<'a> {
    pub(crate) fn state(&self, name: &str, context: &str) -> Result<StateId, ModelError> {
        self.states
            .iter()
            .position(|n| n == name)
            .map(StateId)
            .ok_or_else(|| ModelError::UnknownState {
                name: name.to_string(),
                context: context.to_string(),
            })
    }

    pub(crate) fn guard(&self, name: Option<&str>, context: &str) -> Result<GuardId, ModelError> {
        match name {
            None => Ok(GuardId(0)),
            Some(name) => self
                .guards
                .iter()
                .position(|g| g.name == name)
                .map(GuardId)
                .ok_or_else(|| ModelError::UnknownGuard {
                    name: name.to_string(),
                    context: context.to_string(),
                }),
        }
    }

    pub(crate) fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }
}

/// Builds a total receive map from declared `(source, target)` pairs,
/// completing missing sources with self-loops.
pub(crate) fn receive_map(
    names: &Names<'_>,
    action: &str,
    pairs: &[(StateId, StateId)],
) -> Result<Vec<StateId>, ModelError> {
    let n = names.states.len();
    let mut map: Vec<Option<StateId>> = vec![None; n];
    for &(from, to) in pairs {
        match map[from.0] {
            Some(existing) if existing != to => {
                return Err(ModelError::NonFunctionalReceiveMap {
                    action: action.to_string(),
                    source_state: names.state_name(from).to_string(),
                    first: names.state_name(existing).to_string(),
                    second: names.state_name(to).to_string(),
                })
            }
            _ => map[from.0] = Some(to),
        }
    }
    Ok(map
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.unwrap_or(StateId(i)))
        .collect())
}

/// Validates a parsed description and expands its sugar declarations.
pub fn validate(model: &ModelFile) -> Result<Protocol, ModelError> {
    let states = &model.states.0;
    if states.is_empty() {
        return Err(ModelError::NoStates);
    }
    if states.len() > MAX_STATES {
        return Err(ModelError::TooManyStates(states.len()));
    }
    for (i, name) in states.iter().enumerate() {
        if states[..i].contains(name) {
            return Err(ModelError::DuplicateState(name.clone()));
        }
    }

    let mut guards = vec![Guard {
        name: TRIVIAL_GUARD.to_string(),
        members: StateSet::full(states.len()),
    }];
    for (name, members) in &model.guards.0 {
        if guards.iter().any(|g| g.name == *name) {
            return Err(ModelError::DuplicateGuard(name.clone()));
        }
        let names = Names {
            states,
            guards: &[],
        };
        let mut set = StateSet::EMPTY;
        for member in members {
            set.insert(names.state(member, &format!("guard `{name}`"))?);
        }
        if set.is_empty() {
            return Err(ModelError::EmptyGuard(name.clone()));
        }
        guards.push(Guard {
            name: name.clone(),
            members: set,
        });
    }

    let names = Names {
        states,
        guards: &guards,
    };
    let init = names.state(&model.init, "init")?;

    let mut actions: Vec<CoreAction> = Vec::new();
    for decl in &model.actions {
        let context = format!("action `{}`", decl.name);
        if let Some(declared) = decl.arity {
            if declared != decl.sends.len() {
                return Err(ModelError::ArityMismatch {
                    action: decl.name.clone(),
                    declared,
                    sends: decl.sends.len(),
                });
            }
        }
        if decl.sends.is_empty() {
            return Err(ModelError::ArityMismatch {
                action: decl.name.clone(),
                declared: decl.arity.unwrap_or(0),
                sends: 0,
            });
        }
        let sends = decl
            .sends
            .iter()
            .map(|(from, to)| {
                Ok(Send {
                    from: names.state(from, &context)?,
                    to: names.state(to, &context)?,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        let pairs = decl
            .receives
            .iter()
            .map(|(from, to)| Ok((names.state(from, &context)?, names.state(to, &context)?)))
            .collect::<Result<Vec<_>, ModelError>>()?;
        let receive = receive_map(&names, &decl.name, &pairs)?;
        let guard = names.guard(decl.guard.as_deref(), &context)?;
        actions.push(CoreAction {
            name: decl.name.clone(),
            kind: match decl.kind {
                KindDecl::Sender => ActionKind::Sender,
                KindDecl::Maximal => ActionKind::Maximal,
            },
            sends,
            receive,
            guard,
        });
    }

    for entry in &model.sugar {
        let decl = SugarDecl::resolve(entry, &names)?;
        let expanded = desugar(&decl, states.len(), &actions)?;
        if let SugarDecl::DisjunctiveGuard { action, .. } = &decl {
            let pos = actions
                .iter()
                .position(|a| a.name == *action)
                .expect("resolved disjunctive guard target");
            actions.splice(pos..=pos, expanded);
        } else {
            actions.extend(expanded);
        }
    }

    for (i, action) in actions.iter().enumerate() {
        if actions[..i].iter().any(|a| a.name == action.name) {
            return Err(ModelError::DuplicateActionName(action.name.clone()));
        }
    }

    let sync = actions
        .iter()
        .map(|a| build_sync(a, states.len()))
        .collect();
    Ok(Protocol {
        states: states.clone(),
        init,
        guards,
        actions,
        sync,
    })
}
