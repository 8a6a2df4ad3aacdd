// Writing a model with syntactic sugar and expanding it into core actions.

use gsp::model::ModelFile;
use gsp::protocol::validate;

const MODEL: &str = r#"{
    "states": ["idle", "want", "crit"],
    "init": "idle",
    "guards": {"free": ["idle", "want"]},
    "sugar": [
        {"internal": {"name": "request", "from": "idle", "to": "want"}},
        {"internal": {"name": "enter", "from": "want", "to": "crit", "guard": "free"}},
        {"pairwise_rendezvous": {"name": "handoff", "send": ["crit", "idle"], "recv": ["want", "crit"]}},
        {"negotiation": {"name": "reset", "map": [["crit", "idle"], ["want", "idle"]]}}
    ],
    "property": {"target": "crit", "count": 2}
}"#;

fn main() {
    let model = ModelFile::from_json(MODEL).expect("model parses");
    let p = validate(&model).expect("model is well-formed");
    for a in p.actions() {
        println!(
            "{:<10} {:<7} arity {} internal {}",
            a.name,
            a.kind.to_string(),
            a.arity(),
            a.is_internal()
        );
    }
    print!("{}", p.to_model().render());
}
