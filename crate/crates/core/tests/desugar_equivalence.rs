//! Sugar declarations checked against a direct per-process reading of each
//! primitive, and desugared output checked against the original model.

mod common;

use std::collections::BTreeSet;

use gsp::model::{ModelFile, SugarEntry};
use gsp::protocol::{validate, Protocol};
use gsp::random::{random_model, GenConfig};
use gsp::semantics::{successors, GlobalState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODEL: &str = r#"{
    "states": ["a", "b", "c"],
    "init": "a",
    "guards": {"G": ["a", "b"], "H": ["b", "c"]},
    "actions": [
        {"name": "x", "kind": "sender", "sends": [["a", "b"]], "receives": [["b", "c"]], "guard": "G"}
    ],
    "sugar": [
        {"internal": {"name": "i", "from": "b", "to": "c", "guard": "H"}},
        {"pairwise_rendezvous": {"name": "pr", "send": ["a", "b"], "recv": ["b", "a"]}},
        {"async_rendezvous": {"name": "ar", "send": ["c", "a"], "recv": ["a", "b"]}},
        {"negotiation": {"name": "ng", "map": [["c", "a"], ["b", "a"]], "guard": "H"}},
        {"disjunctive_guard": {"action": "x", "witnesses": ["b", "a"]}}
    ]
}"#;

fn idx(model: &ModelFile, name: &str) -> usize {
    model.states.0.iter().position(|s| s == name).unwrap()
}

fn guard_ok(model: &ModelFile, guard: &Option<String>, q: &[u32]) -> bool {
    let Some(g) = guard else { return true };
    let members = &model.guards.0.iter().find(|(n, _)| n == g).unwrap().1;
    q.iter()
        .enumerate()
        .all(|(s, &c)| c == 0 || members.contains(&model.states.0[s]))
}

/// Successors of `q` under one sugar declaration, from its plain meaning.
fn oracle(model: &ModelFile, entry: &SugarEntry, q: &[u32]) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    let mv = |q: &mut Vec<u32>, from: usize, to: usize| {
        q[from] -= 1;
        q[to] += 1;
    };
    match entry {
        SugarEntry::Internal(d) => {
            let (f, t) = (idx(model, &d.from), idx(model, &d.to));
            if q[f] > 0 && guard_ok(model, &d.guard, q) {
                let mut n = q.to_vec();
                mv(&mut n, f, t);
                out.insert(n);
            }
        }
        SugarEntry::PairwiseRendezvous(d) => {
            let (sf, st) = (idx(model, &d.send.0), idx(model, &d.send.1));
            let (rf, rt) = (idx(model, &d.recv.0), idx(model, &d.recv.1));
            if guard_ok(model, &d.guard, q) && q[sf] > 0 {
                let mut n = q.to_vec();
                n[sf] -= 1;
                if n[rf] > 0 {
                    n[rf] -= 1;
                    n[st] += 1;
                    n[rt] += 1;
                    out.insert(n);
                }
            }
        }
        SugarEntry::AsyncRendezvous(d) => {
            let (sf, st) = (idx(model, &d.send.0), idx(model, &d.send.1));
            let (rf, rt) = (idx(model, &d.recv.0), idx(model, &d.recv.1));
            if guard_ok(model, &d.guard, q) && (q[sf] > 0 || q[rf] > 0) {
                // each role is taken by a distinct process when one is available
                let mut n = q.to_vec();
                let mut moved = Vec::new();
                if n[sf] > 0 {
                    n[sf] -= 1;
                    moved.push(st);
                }
                if n[rf] > 0 {
                    n[rf] -= 1;
                    moved.push(rt);
                }
                for t in moved {
                    n[t] += 1;
                }
                out.insert(n);
            }
        }
        SugarEntry::Negotiation(d) => {
            let map: Vec<(usize, usize)> = d
                .map
                .iter()
                .map(|(s, t)| (idx(model, s), idx(model, t)))
                .collect();
            if guard_ok(model, &d.guard, q) && map.iter().any(|&(s, _)| q[s] > 0) {
                let mut n = vec![0; q.len()];
                for (s, &c) in q.iter().enumerate() {
                    let t = map.iter().find(|&&(f, _)| f == s).map_or(s, |&(_, t)| t);
                    n[t] += c;
                }
                out.insert(n);
            }
        }
        SugarEntry::DisjunctiveGuard(d) => {
            // only `x` is referenced here: a sends a -> b, b receives to c
            assert_eq!(d.action, "x");
            let (a, b, c) = (idx(model, "a"), idx(model, "b"), idx(model, "c"));
            if q[a] == 0 || !guard_ok(model, &Some("G".into()), q) {
                return out;
            }
            let witness = d.witnesses.iter().any(|w| {
                let w = idx(model, w);
                q[w] > u32::from(w == a)
            });
            if witness {
                let mut n = q.to_vec();
                n[a] -= 1;
                let moving = n[b];
                n[b] = 0;
                n[c] += moving;
                n[b] += 1;
                out.insert(n);
            }
        }
    }
    out
}

fn engine_successors(p: &Protocol, q: &GlobalState, prefix: &str) -> BTreeSet<Vec<u32>> {
    successors(p, q)
        .unwrap()
        .into_iter()
        .filter(|o| o.action == prefix || o.action.starts_with(&format!("{prefix}#")))
        .map(|o| o.successor.0)
        .collect()
}

#[test]
fn sugar_matches_direct_semantics() {
    let model = ModelFile::from_json(MODEL).unwrap();
    let p = validate(&model).unwrap();
    let mut checked = 0;
    for q in common::grid(3, 4).filter(|q| q.total() > 0) {
        for entry in &model.sugar {
            let name = match entry {
                SugarEntry::Internal(d) => d.name.clone(),
                SugarEntry::PairwiseRendezvous(d) | SugarEntry::AsyncRendezvous(d) => {
                    d.name.clone()
                }
                SugarEntry::Negotiation(d) => d.name.clone(),
                SugarEntry::DisjunctiveGuard(d) => d.action.clone(),
            };
            assert_eq!(
                engine_successors(&p, &q, &name),
                oracle(&model, entry, &q.0),
                "{name} from {q}"
            );
            checked += 1;
        }
    }
    assert!(checked > 300);
}

/// Labelled transitions of every state reachable with `n` processes.
fn transitions(p: &Protocol, n: u32) -> BTreeSet<(Vec<u32>, String, Vec<u32>)> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![GlobalState::initial(p.n_states(), p.init(), n)];
    let mut visited = BTreeSet::new();
    while let Some(q) = stack.pop() {
        if !visited.insert(q.clone()) {
            continue;
        }
        for o in successors(p, &q).unwrap() {
            seen.insert((q.0.clone(), o.action.clone(), o.successor.0.clone()));
            stack.push(o.successor);
        }
    }
    seen
}

#[test]
fn desugared_models_have_the_same_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut models = vec![ModelFile::from_json(MODEL).unwrap()];
    models.extend((0..40).map(|_| random_model(&mut rng, &GenConfig::default())));
    for model in models {
        let p = validate(&model).unwrap();
        let core = ModelFile::from_json(&p.to_model().render()).unwrap();
        assert!(core.sugar.is_empty());
        let q = validate(&core).unwrap();
        for n in 1..=4 {
            assert_eq!(transitions(&p, n), transitions(&q, n));
        }
    }
}
