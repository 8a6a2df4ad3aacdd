//! Well-quasi-orders on global states and upward-closed sets.
//!
//! Two orders are used: the component-wise order (`q ≼ p`), and its guard
//! refinement (`q ⊴ p`) which additionally requires that `q` and `p` satisfy
//! exactly the same guards of the protocol.

use serde::Serialize;
use thiserror::Error;

use crate::protocol::{Protocol, StateSet};
use crate::semantics::{support_of, GlobalState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WqoError {
    #[error("cannot compare states of dimension {left} and {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// The non-trivial guards a guard-refined order distinguishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardFamily {
    guards: Vec<StateSet>,
}

impl GuardFamily {
    pub fn new(guards: Vec<StateSet>) -> Self {
        assert!(
            guards.len() <= 64,
            "at most 64 distinct guards are supported"
        );
        GuardFamily { guards }
    }

    pub fn of(p: &Protocol) -> Self {
        GuardFamily::new(p.guard_family())
    }

    pub fn guards(&self) -> &[StateSet] {
        &self.guards
    }

    /// Bit `i` is set iff a state with this support satisfies guard `i`.
    pub fn profile(&self, support: StateSet) -> u64 {
        self.guards
            .iter()
            .enumerate()
            .filter(|(_, g)| support.is_subset(**g))
            .fold(0u64, |acc, (i, _)| acc | (1u64 << i))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WqoKind {
    ComponentWise,
    GuardRefined(GuardFamily),
}

impl WqoKind {
    /// `≼` for unguarded protocols, `⊴` over the protocol's guards otherwise.
    pub fn for_protocol(p: &Protocol) -> Self {
        if p.is_unguarded() {
            WqoKind::ComponentWise
        } else {
            WqoKind::GuardRefined(GuardFamily::of(p))
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            WqoKind::ComponentWise => "component-wise",
            WqoKind::GuardRefined(_) => "guard-refined",
        }
    }

    /// Guard profile of a state; constant for the component-wise order.
    pub fn profile(&self, q: &[u32]) -> u64 {
        match self {
            WqoKind::ComponentWise => 0,
            WqoKind::GuardRefined(family) => family.profile(support_of(q)),
        }
    }

    pub(crate) fn le(&self, q: &[u32], p: &[u32]) -> bool {
        if !q.iter().zip(p).all(|(a, b)| a <= b) {
            return false;
        }
        match self {
            WqoKind::ComponentWise => true,
            WqoKind::GuardRefined(family) => {
                family.profile(support_of(q)) == family.profile(support_of(p))
            }
        }
    }
}

pub fn leq(wqo: &WqoKind, q: &GlobalState, p: &GlobalState) -> Result<bool, WqoError> {
    if q.dim() != p.dim() {
        return Err(WqoError::DimensionMismatch {
            left: q.dim(),
            right: p.dim(),
        });
    }
    Ok(wqo.le(&q.0, &p.0))
}

/// Reduces a set of states to its minimal elements, sorted lexicographically.
pub fn antichain_minimize(wqo: &WqoKind, mut states: Vec<GlobalState>) -> Vec<GlobalState> {
    // a strictly smaller element always has a strictly smaller total
    states.sort_by(|a, b| a.total().cmp(&b.total()).then_with(|| a.cmp(b)));
    states.dedup();
    let mut kept: Vec<GlobalState> = Vec::new();
    for q in states {
        if !kept.iter().any(|b| wqo.le(&b.0, &q.0)) {
            kept.push(q);
        }
    }
    kept.sort();
    kept
}

/// An upward-closed set, represented by its finite basis of minimal elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ucs {
    wqo: WqoKind,
    basis: Vec<GlobalState>,
}

impl Ucs {
    pub fn new(wqo: WqoKind, candidates: Vec<GlobalState>) -> Self {
        let basis = antichain_minimize(&wqo, candidates);
        Ucs { wqo, basis }
    }

    pub fn wqo(&self) -> &WqoKind {
        &self.wqo
    }

    pub fn basis(&self) -> &[GlobalState] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Membership in the upward closure.
    pub fn contains(&self, q: &GlobalState) -> bool {
        self.basis.iter().any(|b| self.wqo.le(&b.0, &q.0))
    }

    /// Adds `q` unless already covered, dropping basis elements above it.
    /// Returns whether the set grew.
    pub fn insert(&mut self, q: GlobalState) -> bool {
        if self.contains(&q) {
            return false;
        }
        let wqo = &self.wqo;
        self.basis.retain(|b| !wqo.le(&q.0, &b.0));
        let pos = self.basis.binary_search(&q).unwrap_or_else(|e| e);
        self.basis.insert(pos, q);
        true
    }

    pub fn is_antichain(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !self.wqo.le(&a.0, &b.0))
        })
    }
}

impl Serialize for Ucs {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.basis.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn q(v: &[u32]) -> GlobalState {
        GlobalState(v.to_vec())
    }

    #[test]
    fn componentwise_examples() {
        let w = WqoKind::ComponentWise;
        assert!(leq(&w, &q(&[0, 1, 0, 0, 0]), &q(&[2, 1, 0, 0, 0])).unwrap());
        assert!(!leq(&w, &q(&[0, 2, 0, 0, 0]), &q(&[2, 1, 0, 0, 0])).unwrap());
        assert!(leq(&w, &q(&[1, 2]), &q(&[1, 2])).unwrap());
        assert!(leq(&w, &q(&[1]), &q(&[1, 2])).is_err());
    }

    #[test]
    fn guard_refined_separates_profiles() {
        let p = fixtures::smoke_detector();
        let w = WqoKind::for_protocol(&p);
        assert!(matches!(w, WqoKind::GuardRefined(_)));
        // {Idle} satisfies G2 and G3, {Env, Idle} satisfies none
        assert!(!leq(&w, &q(&[0, 0, 1, 0, 0]), &q(&[1, 0, 1, 0, 0])).unwrap());
        assert!(leq(&w, &q(&[0, 0, 1, 0, 0]), &q(&[0, 0, 5, 0, 0])).unwrap());
        assert!(leq(
            &WqoKind::ComponentWise,
            &q(&[0, 0, 1, 0, 0]),
            &q(&[1, 0, 1, 0, 0])
        )
        .unwrap());
    }

    #[test]
    fn ucs_insert_keeps_antichain() {
        let mut u = Ucs::new(WqoKind::ComponentWise, vec![q(&[2, 0]), q(&[0, 2])]);
        assert!(!u.insert(q(&[3, 1])));
        assert!(u.insert(q(&[1, 1])));
        assert_eq!(u.basis(), [q(&[0, 2]), q(&[1, 1]), q(&[2, 0])]);
        assert!(u.insert(q(&[1, 0])));
        assert_eq!(u.basis(), [q(&[0, 2]), q(&[1, 0])]);
        assert!(u.is_antichain());
        assert!(u.contains(&q(&[0, 5])));
        assert!(!u.contains(&q(&[0, 1])));
    }

    fn family() -> WqoKind {
        WqoKind::GuardRefined(GuardFamily::new(vec![StateSet(0b0011), StateSet(0b0110)]))
    }

    fn state() -> impl Strategy<Value = GlobalState> {
        prop::collection::vec(0u32..3, 4).prop_map(GlobalState)
    }

    proptest! {
        #[test]
        fn orders_are_reflexive(a in state()) {
            prop_assert!(WqoKind::ComponentWise.le(&a.0, &a.0));
            prop_assert!(family().le(&a.0, &a.0));
        }

        #[test]
        fn orders_are_transitive(a in state(), b in state(), c in state()) {
            for w in [WqoKind::ComponentWise, family()] {
                if w.le(&a.0, &b.0) && w.le(&b.0, &c.0) {
                    prop_assert!(w.le(&a.0, &c.0));
                }
            }
        }

        #[test]
        fn minimize_is_idempotent(xs in prop::collection::vec(state(), 0..12)) {
            for w in [WqoKind::ComponentWise, family()] {
                let once = antichain_minimize(&w, xs.clone());
                let twice = antichain_minimize(&w, once.clone());
                prop_assert_eq!(&once, &twice);
                let u = Ucs::new(w.clone(), xs.clone());
                prop_assert!(u.is_antichain());
                for x in &xs {
                    prop_assert!(u.contains(x));
                }
            }
        }
    }
}
