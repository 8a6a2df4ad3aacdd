//! Bundled benchmark protocols.
//!
//! - `smoke-detector`: the five-state smoke detector with `Choose` as a
//!   2-maximal action.
//! - `smoke-detector-sender`: the same process with `Choose` as a 2-sender action.
//! - `smoke-detector-mutant`: the 2-sender variant with the `Choose` receive
//!   `Pick -> Env`, which breaks guard compatibility.
//! - `quadratic-cutoff`: an unguarded process whose inner (3-state) and outer
//!   (5-state) cycles force 16 processes before one reaches `s_E`.

use crate::model::ModelFile;
use crate::protocol::{validate, Protocol};

const SMOKE_DETECTOR: &str = include_str!("../fixtures/smoke_detector.json");
const SMOKE_DETECTOR_SENDER: &str = include_str!("../fixtures/smoke_detector_sender.json");
const SMOKE_DETECTOR_MUTANT: &str = include_str!("../fixtures/smoke_detector_mutant.json");
const QUADRATIC_CUTOFF: &str = include_str!("../fixtures/quadratic_cutoff.json");

pub const NAMES: [&str; 4] = [
    "smoke-detector",
    "smoke-detector-sender",
    "smoke-detector-mutant",
    "quadratic-cutoff",
];

/// Source text of a bundled fixture.
pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "smoke-detector" => Some(SMOKE_DETECTOR),
        "smoke-detector-sender" => Some(SMOKE_DETECTOR_SENDER),
        "smoke-detector-mutant" => Some(SMOKE_DETECTOR_MUTANT),
        "quadratic-cutoff" => Some(QUADRATIC_CUTOFF),
        _ => None,
    }
}

pub fn model(name: &str) -> Option<ModelFile> {
    source(name).map(|text| ModelFile::from_json(text).expect("bundled fixture parses"))
}

fn load(name: &str) -> Protocol {
    validate(&model(name).expect("known fixture")).expect("bundled fixture validates")
}

pub fn smoke_detector() -> Protocol {
    load("smoke-detector")
}

pub fn smoke_detector_sender() -> Protocol {
    load("smoke-detector-sender")
}

pub fn smoke_detector_mutant() -> Protocol {
    load("smoke-detector-mutant")
}

pub fn quadratic_cutoff() -> Protocol {
    load("quadratic-cutoff")
}
