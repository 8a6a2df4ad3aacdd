//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use gsp::engine::{pred_basis, Decision};
use gsp::fixtures;
use gsp::protocol::{Protocol, StateId};
use gsp::random::{random_protocol, GenConfig};
use gsp::semantics::{enabled, fire, GlobalState};
use gsp::wellbehaved::certify;
use gsp::wqo::{antichain_minimize, leq, Ucs, WqoKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn gsp_json(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_gsp"))
        .arg("--json")
        .args(args)
        .output()
        .expect("binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), json)
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:?}, limit {limit:?}"))
}

fn quadratic_witness() -> Outcome {
    let start = Instant::now();
    let fig = "builtin:quadratic-cutoff";
    let prop = ["--target", "s_E", "--count", "1"];
    let (_, sweep) = gsp_json(&[&["sweep", fig, "--max", "20"][..], &prop].concat());
    ensure(
        sweep["result"]["outcome"]["n"] == 16,
        format!("sweep: {}", sweep["result"]),
    )?;
    let (code15, mc15) = gsp_json(&[&["mc", fig, "--n", "15"][..], &prop].concat());
    ensure(
        code15 == 0 && mc15["result"]["outcome"]["verdict"] == "unreachable",
        "mc --n 15 did not refute",
    )?;
    let (code16, mc16) = gsp_json(&[&["mc", fig, "--n", "16"][..], &prop].concat());
    ensure(code16 == 1, "mc --n 16 did not confirm")?;
    let steps = mc16["result"]["outcome"]["trace"]["steps"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    let count = |name: &str| steps.iter().filter(|s| s["action"] == name).count();
    let shape = (steps.len(), count("i"), count("a"), count("b"));
    ensure(shape == (16, 1, 14, 1), format!("trace shape {shape:?}"))?;
    within(Duration::from_secs(10), start)?;
    Ok(format!(
        "min n = 16, trace 1 x i, 14 x a, 1 x b ({:?})",
        start.elapsed()
    ))
}

fn smoke_safety() -> Outcome {
    let start = Instant::now();
    for fixture in ["builtin:smoke-detector", "builtin:smoke-detector-sender"] {
        let (code, v) = gsp_json(&["verify", fixture, "--target", "Report", "--count", "3"]);
        ensure(
            code == 0 && v["result"]["outcome"]["verdict"] == "unreachable",
            format!("{fixture}: verify did not prove safety"),
        )?;
        let (code, _) = gsp_json(&[
            "mc", fixture, "--n", "3", "--target", "Report", "--count", "3",
        ]);
        ensure(code == 0, format!("{fixture}: mc --n 3 did not refute"))?;
        let (code, _) = gsp_json(&[
            "mc", fixture, "--n", "2", "--target", "Report", "--count", "2",
        ]);
        ensure(
            code == 1,
            format!("{fixture}: mc --n 2 --count 2 did not confirm"),
        )?;
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("both Choose variants safe ({:?})", start.elapsed()))
}

fn well_behavedness() -> Outcome {
    let start = Instant::now();
    let good = certify(&fixtures::smoke_detector());
    ensure(
        good.well_behaved && good.actions.len() == 5,
        "smoke detector not certified",
    )?;
    let bad = certify(&fixtures::smoke_detector_mutant());
    let first = bad
        .violations()
        .next()
        .map(|(a, f)| (a.to_string(), f.clone()));
    match first {
        Some((action, f)) if action == "Choose" && f.condition == "C1" && f.guard == "G3" => {}
        other => return Err(format!("unexpected mutant verdict {other:?}")),
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!(
        "5/5 actions certified, mutant fails C1 on G3 ({:?})",
        start.elapsed()
    ))
}

fn cutoff_regression() -> Outcome {
    let start = Instant::now();
    let (_, smoke) = gsp_json(&[
        "cutoff",
        "builtin:smoke-detector",
        "--target",
        "Report",
        "--count",
        "3",
    ]);
    let lemmas = &smoke["result"]["lemmas"];
    ensure(
        lemmas["applicable"] == "L3" && lemmas["cutoff"] == 3,
        format!("smoke detector: {lemmas}"),
    )?;
    let (code, fig) = gsp_json(&["cutoff", "builtin:quadratic-cutoff"]);
    ensure(
        code == 1 && fig["result"]["lemmas"]["applicable"].is_null(),
        "quadratic fixture was deemed amenable",
    )?;
    within(Duration::from_secs(1), start)?;
    Ok(format!(
        "L3 cutoff 3, quadratic fixture not amenable ({:?})",
        start.elapsed()
    ))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut guarded, mut unguarded) = (0, 0);
    let mut reachable = 0;
    while guarded + unguarded < 240 {
        let cfg = if rng.gen_bool(0.5) {
            GenConfig::default()
        } else {
            GenConfig::unguarded()
        };
        let p = random_protocol(&mut rng, &cfg);
        if !p.is_unguarded() && !certify(&p).well_behaved {
            continue;
        }
        let target = StateId(rng.gen_range(0..p.n_states()));
        let m = rng.gen_range(1..=3);
        common::check_against_bfs(&p, target, m, 8)
            .map_err(|e| format!("{e}\n{}", p.to_model().render()))?;
        if gsp::engine::decide(&p, target, m).is_ok_and(|d: Decision| d.verdict.is_reachable()) {
            reachable += 1;
        }
        if p.is_unguarded() {
            unguarded += 1;
        } else {
            guarded += 1;
        }
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!(
        "{} protocols ({guarded} certified guarded, {unguarded} unguarded, {reachable} reachable), 0 inconsistencies ({:?})",
        guarded + unguarded,
        start.elapsed()
    ))
}

/// Grid states in `↑c` or with a successor in it, via forward firing only.
fn brute_pred_basis(p: &Protocol, c: &Ucs, bound: u32) -> Vec<GlobalState> {
    let hits = common::grid(p.n_states(), bound)
        .filter(|q| q.total() > 0)
        .filter(|q| {
            c.contains(q)
                || p.action_ids().any(|a| {
                    enabled(p, q, a).unwrap() && c.contains(&fire(p, q, a).unwrap().successor)
                })
        })
        .collect();
    antichain_minimize(c.wqo(), hits)
}

fn pred_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = GenConfig {
        max_states: 4,
        ..GenConfig::default()
    };
    let bound = 6;
    let mut instances = 0;
    while instances < 120 {
        let p = random_protocol(&mut rng, &cfg);
        let wqo = WqoKind::for_protocol(&p);
        let basis: Vec<GlobalState> = (0..rng.gen_range(1..=2))
            .map(|_| GlobalState((0..p.n_states()).map(|_| rng.gen_range(0..=2)).collect()))
            .filter(|b| b.total() > 0)
            .collect();
        if basis.is_empty() {
            continue;
        }
        let c = Ucs::new(wqo, basis);
        let fast: Vec<GlobalState> = pred_basis(&p, &c)
            .basis()
            .iter()
            .filter(|q| q.0.iter().all(|&x| x <= bound))
            .cloned()
            .collect();
        let slow = brute_pred_basis(&p, &c, bound);
        ensure(
            fast == slow,
            format!(
                "basis {:?}: {fast:?} vs {slow:?}\n{}",
                c.basis(),
                p.to_model().render()
            ),
        )?;
        instances += 1;
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "{instances} instances, 0 discrepancies ({:?})",
        start.elapsed()
    ))
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize, max: u32) -> GlobalState {
    GlobalState((0..dim).map(|_| rng.gen_range(0..=max)).collect())
}

fn wqo_properties() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let smoke = fixtures::smoke_detector();
    let orders = [WqoKind::ComponentWise, WqoKind::for_protocol(&smoke)];
    for i in 0..CASES {
        let w = &orders[i % 2];
        let a = random_state(&mut rng, 5, 2);
        ensure(leq(w, &a, &a).unwrap(), format!("reflexivity fails at {a}"))?;
    }
    let mut transitive = 0;
    while transitive < CASES {
        let w = &orders[transitive % 2];
        let a = random_state(&mut rng, 5, 2);
        let b = GlobalState(a.0.iter().map(|&x| x + rng.gen_range(0..=1)).collect());
        let c = GlobalState(b.0.iter().map(|&x| x + rng.gen_range(0..=1)).collect());
        if leq(w, &a, &b).unwrap() && leq(w, &b, &c).unwrap() {
            ensure(
                leq(w, &a, &c).unwrap(),
                format!("transitivity fails at {a} {b} {c}"),
            )?;
            transitive += 1;
        }
    }
    for i in 0..CASES {
        let w = &orders[i % 2];
        let xs: Vec<GlobalState> = (0..rng.gen_range(0..10))
            .map(|_| random_state(&mut rng, 5, 2))
            .collect();
        let once = antichain_minimize(w, xs);
        ensure(
            antichain_minimize(w, once.clone()) == once,
            "minimization is not idempotent",
        )?;
    }
    // q ⊴ p and q -a-> q' imply p -a-> p' with q' ≼ p'
    let mut compat = 0;
    while compat < CASES {
        let p = random_protocol(&mut rng, &GenConfig::default());
        if !certify(&p).well_behaved {
            continue;
        }
        let w = WqoKind::for_protocol(&p);
        for _ in 0..20 {
            let q = random_state(&mut rng, p.n_states(), 2);
            let bigger = GlobalState(q.0.iter().map(|&x| x + rng.gen_range(0..=2)).collect());
            if q.total() == 0 || !leq(&w, &q, &bigger).unwrap() {
                continue;
            }
            for a in p.action_ids() {
                if !enabled(&p, &q, a).unwrap() {
                    continue;
                }
                ensure(
                    enabled(&p, &bigger, a).unwrap(),
                    "action disabled in larger state",
                )?;
                let q1 = fire(&p, &q, a).unwrap().successor;
                let p1 = fire(&p, &bigger, a).unwrap().successor;
                ensure(
                    leq(&WqoKind::ComponentWise, &q1, &p1).unwrap(),
                    format!("compatibility fails: {q} -> {q1}, {bigger} -> {p1}"),
                )?;
                compat += 1;
            }
        }
    }
    Ok(format!(
        "{CASES} reflexivity, {CASES} transitivity, {CASES} idempotence, {compat} compatibility cases"
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 quadratic-cutoff witness", quadratic_witness),
        ("2 smoke detector safety", smoke_safety),
        ("3 well-behavedness regression", well_behavedness),
        ("4 cutoff regression", cutoff_regression),
        ("5 oracle equivalence vs BFS", oracle_equivalence),
        ("6 pred-basis oracle", pred_oracle),
        ("7 wqo and antichain properties", wqo_properties),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!(
        "NOTE 8 further benchmark cutoffs: out of scope, the benchmark models are not defined; covered by 5-7"
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
