//! Random small protocols for differential testing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    ActionDecl, GuardTable, InternalDecl, KindDecl, ModelFile, NegotiationDecl, StateList,
    SugarEntry,
};
use crate::protocol::{validate, Protocol};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_states: usize,
    pub max_actions: usize,
    pub max_arity: usize,
    /// Upper bound on declared non-trivial guards.
    pub max_guards: usize,
    /// Chance that an action carries a non-trivial guard (when any exist).
    pub guard_prob: f64,
    /// Chance that a generated action is an internal transition.
    pub internal_prob: f64,
    /// Chance that a generated action is a negotiation.
    pub negotiation_prob: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_states: 5,
            max_actions: 4,
            max_arity: 2,
            max_guards: 2,
            guard_prob: 0.5,
            internal_prob: 0.25,
            negotiation_prob: 0.1,
        }
    }
}

impl GenConfig {
    pub fn unguarded() -> Self {
        GenConfig {
            max_guards: 0,
            ..GenConfig::default()
        }
    }
}

/// Generates a random model file; it always validates.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> ModelFile {
    let n = rng.gen_range(2..=cfg.max_states.max(2));
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let pick = |rng: &mut R| states[rng.gen_range(0..n)].clone();

    let n_guards = if cfg.max_guards == 0 {
        0
    } else {
        rng.gen_range(0..=cfg.max_guards)
    };
    let mut guards = Vec::new();
    for g in 0..n_guards {
        let mut members: Vec<String> = states
            .iter()
            .filter(|_| rng.gen_bool(0.6))
            .cloned()
            .collect();
        if members.is_empty() {
            members.push(pick(rng));
        }
        guards.push((format!("G{}", g + 1), members));
    }
    let guard_for = |rng: &mut R| -> Option<String> {
        if guards.is_empty() || !rng.gen_bool(cfg.guard_prob) {
            None
        } else {
            guards.choose(rng).map(|(name, _)| name.clone())
        }
    };

    let n_actions = rng.gen_range(1..=cfg.max_actions.max(1));
    let mut actions = Vec::new();
    let mut sugar = Vec::new();
    let mut produced = 0;
    let mut i = 0;
    while produced < n_actions {
        let name = format!("a{i}");
        i += 1;
        let roll: f64 = rng.gen();
        if roll < cfg.internal_prob {
            sugar.push(SugarEntry::Internal(InternalDecl {
                name,
                from: pick(rng),
                to: pick(rng),
                guard: guard_for(rng),
            }));
            produced += 1;
        } else if roll < cfg.internal_prob + cfg.negotiation_prob {
            let mut sources = states.clone();
            sources.shuffle(rng);
            let len = rng.gen_range(1..=2.min(n).min(n_actions - produced));
            produced += len;
            let map = sources[..len]
                .iter()
                .map(|s| (s.clone(), pick(rng)))
                .collect();
            sugar.push(SugarEntry::Negotiation(NegotiationDecl {
                name,
                map,
                guard: guard_for(rng),
            }));
        } else {
            let arity = rng.gen_range(1..=cfg.max_arity.max(1));
            let sends = (0..arity).map(|_| (pick(rng), pick(rng))).collect();
            let mut receives = Vec::new();
            for s in &states {
                if rng.gen_bool(0.4) {
                    receives.push((s.clone(), pick(rng)));
                }
            }
            actions.push(ActionDecl {
                name,
                kind: if rng.gen_bool(0.5) {
                    KindDecl::Sender
                } else {
                    KindDecl::Maximal
                },
                arity: None,
                sends,
                receives,
                guard: guard_for(rng),
            });
            produced += 1;
        }
    }

    ModelFile {
        init: states[0].clone(),
        states: StateList(states),
        guards: GuardTable(guards),
        actions,
        sugar,
        property: None,
    }
}

pub fn random_protocol<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Protocol {
    validate(&random_model(rng, cfg)).expect("generated models validate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = GenConfig::default();
        for _ in 0..300 {
            let p = random_protocol(&mut rng, &cfg);
            assert!(p.n_states() <= cfg.max_states);
            assert!(p.guard_family().len() <= cfg.max_guards);
            assert!(p.actions().iter().all(|a| a.arity() <= cfg.max_arity));
            assert!(p.actions().len() <= cfg.max_actions);
        }
        let p = random_protocol(&mut rng, &GenConfig::unguarded());
        assert!(p.is_unguarded());
    }
}
