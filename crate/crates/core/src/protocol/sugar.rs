//! Expansion of derived communication primitives into core actions.

use super::{receive_map, ActionKind, CoreAction, GuardId, ModelError, Names, Send, StateId};
use crate::model::SugarEntry;

/// A resolved sugar declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SugarDecl {
    Internal {
        name: String,
        from: StateId,
        to: StateId,
        guard: GuardId,
    },
    PairwiseRendezvous {
        name: String,
        send: (StateId, StateId),
        recv: (StateId, StateId),
        guard: GuardId,
    },
    AsyncRendezvous {
        name: String,
        send: (StateId, StateId),
        recv: (StateId, StateId),
        guard: GuardId,
    },
    /// Synchronous move of all processes with no distinguished sender.
    Negotiation {
        name: String,
        map: Vec<(StateId, StateId)>,
        guard: GuardId,
    },
    /// Requires some process in one of `witnesses` for `action` to fire.
    DisjunctiveGuard {
        action: String,
        witnesses: Vec<StateId>,
    },
}

impl SugarDecl {
    pub(crate) fn resolve(entry: &SugarEntry, names: &Names<'_>) -> Result<Self, ModelError> {
        let pair = |(from, to): &(String, String), ctx: &str| -> Result<_, ModelError> {
            Ok((names.state(from, ctx)?, names.state(to, ctx)?))
        };
        Ok(match entry {
            SugarEntry::Internal(d) => {
                let ctx = format!("internal `{}`", d.name);
                SugarDecl::Internal {
                    name: d.name.clone(),
                    from: names.state(&d.from, &ctx)?,
                    to: names.state(&d.to, &ctx)?,
                    guard: names.guard(d.guard.as_deref(), &ctx)?,
                }
            }
            SugarEntry::PairwiseRendezvous(d) | SugarEntry::AsyncRendezvous(d) => {
                let ctx = format!("rendezvous `{}`", d.name);
                let send = pair(&d.send, &ctx)?;
                let recv = pair(&d.recv, &ctx)?;
                let guard = names.guard(d.guard.as_deref(), &ctx)?;
                if matches!(entry, SugarEntry::PairwiseRendezvous(_)) {
                    SugarDecl::PairwiseRendezvous {
                        name: d.name.clone(),
                        send,
                        recv,
                        guard,
                    }
                } else {
                    SugarDecl::AsyncRendezvous {
                        name: d.name.clone(),
                        send,
                        recv,
                        guard,
                    }
                }
            }
            SugarEntry::Negotiation(d) => {
                let ctx = format!("negotiation `{}`", d.name);
                if d.map.is_empty() {
                    return Err(ModelError::EmptyNegotiation(d.name.clone()));
                }
                let map = d
                    .map
                    .iter()
                    .map(|p| pair(p, &ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                // reject non-functional maps before expansion
                receive_map(names, &d.name, &map)?;
                SugarDecl::Negotiation {
                    name: d.name.clone(),
                    map,
                    guard: names.guard(d.guard.as_deref(), &ctx)?,
                }
            }
            SugarEntry::DisjunctiveGuard(d) => {
                let ctx = format!("disjunctive guard on `{}`", d.action);
                if d.witnesses.is_empty() {
                    return Err(ModelError::InvalidSugar {
                        name: d.action.clone(),
                        reason: "empty witness set".into(),
                    });
                }
                SugarDecl::DisjunctiveGuard {
                    action: d.action.clone(),
                    witnesses: d
                        .witnesses
                        .iter()
                        .map(|w| names.state(w, &ctx))
                        .collect::<Result<Vec<_>, _>>()?,
                }
            }
        })
    }
}

fn identity(n_states: usize) -> Vec<StateId> {
    (0..n_states).map(StateId).collect()
}

/// Expands one declaration into core actions.
///
/// For [`SugarDecl::DisjunctiveGuard`] the result replaces the referenced
/// action in `existing`: one copy per witness state `w`, each with an extra
/// send `w -> M_a(w)`, named `action#i`.
pub fn desugar(
    decl: &SugarDecl,
    n_states: usize,
    existing: &[CoreAction],
) -> Result<Vec<CoreAction>, ModelError> {
    Ok(match decl {
        SugarDecl::Internal {
            name,
            from,
            to,
            guard,
        } => vec![CoreAction {
            name: name.clone(),
            kind: ActionKind::Sender,
            sends: vec![Send {
                from: *from,
                to: *to,
            }],
            receive: identity(n_states),
            guard: *guard,
        }],
        SugarDecl::PairwiseRendezvous {
            name,
            send,
            recv,
            guard,
        }
        | SugarDecl::AsyncRendezvous {
            name,
            send,
            recv,
            guard,
        } => {
            let kind = if matches!(decl, SugarDecl::PairwiseRendezvous { .. }) {
                ActionKind::Sender
            } else {
                ActionKind::Maximal
            };
            vec![CoreAction {
                name: name.clone(),
                kind,
                sends: vec![
                    Send {
                        from: send.0,
                        to: send.1,
                    },
                    Send {
                        from: recv.0,
                        to: recv.1,
                    },
                ],
                receive: identity(n_states),
                guard: *guard,
            }]
        }
        SugarDecl::Negotiation { name, map, guard } => {
            let mut receive = identity(n_states);
            for &(from, to) in map {
                receive[from.0] = to;
            }
            map.iter()
                .enumerate()
                .map(|(i, &(from, to))| CoreAction {
                    name: format!("{name}#{}", i + 1),
                    kind: ActionKind::Sender,
                    sends: vec![Send { from, to }],
                    receive: receive.clone(),
                    guard: *guard,
                })
                .collect()
        }
        SugarDecl::DisjunctiveGuard { action, witnesses } => {
            let base = existing.iter().find(|a| a.name == *action).ok_or_else(|| {
                ModelError::InvalidSugar {
                    name: action.clone(),
                    reason: "no such action declared before this entry".into(),
                }
            })?;
            if base.kind != ActionKind::Sender {
                return Err(ModelError::InvalidSugar {
                    name: action.clone(),
                    reason: "disjunctive guards apply to k-sender actions only".into(),
                });
            }
            witnesses
                .iter()
                .enumerate()
                .map(|(i, &w)| {
                    let mut copy = base.clone();
                    copy.name = format!("{action}#{}", i + 1);
                    copy.sends.push(Send {
                        from: w,
                        to: base.receive_of(w),
                    });
                    copy
                })
                .collect()
        }
    })
}
