//! The textual model format.
//!
//! A model file is a single JSON document:
//!
//! ```json
//! {
//!   "states": ["Env", "Ask", "Idle", "Pick", "Report"],
//!   "init": "Env",
//!   "guards": { "G1": ["Env", "Ask"] },
//!   "actions": [
//!     { "name": "Smoke", "kind": "sender", "sends": [["Ask", "Pick"]],
//!       "receives": [["Env", "Idle"], ["Ask", "Pick"]], "guard": "G1" }
//!   ],
//!   "sugar": [
//!     { "internal": { "name": "detect", "from": "Env", "to": "Ask", "guard": "G1" } },
//!     { "negotiation": { "name": "Reset", "map": [["Report", "Env"], ["Idle", "Env"]] } }
//!   ],
//!   "property": { "target": "Report", "count": 3 }
//! }
//! ```
//!
//! Unknown keys are rejected. State names and guard names must be unique; a
//! duplicate is reported at its position in the file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl From<serde_json::Error> for ModelFileError {
    fn from(err: serde_json::Error) -> Self {
        let message = err.to_string();
        // serde_json appends " at line L column C"; keep just the message.
        let message = match message.rfind(" at line ") {
            Some(pos) => message[..pos].to_string(),
            None => message,
        };
        ModelFileError::Parse {
            line: err.line(),
            column: err.column(),
            message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub states: StateList,
    pub init: String,
    #[serde(default, skip_serializing_if = "GuardTable::is_empty")]
    pub guards: GuardTable,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actions: Vec<ActionDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sugar: Vec<SugarEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<PropertyDecl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindDecl {
    Sender,
    Maximal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDecl {
    pub name: String,
    pub kind: KindDecl,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    pub sends: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub receives: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<String>,
}

/// Derived communication primitives, expanded into core actions on validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SugarEntry {
    Internal(InternalDecl),
    PairwiseRendezvous(RendezvousDecl),
    AsyncRendezvous(RendezvousDecl),
    Negotiation(NegotiationDecl),
    DisjunctiveGuard(DisjunctiveDecl),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InternalDecl {
    pub name: String,
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RendezvousDecl {
    pub name: String,
    pub send: (String, String),
    pub recv: (String, String),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegotiationDecl {
    pub name: String,
    pub map: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisjunctiveDecl {
    pub action: String,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyDecl {
    pub target: String,
    pub count: u32,
}

/// Ordered list of state names, rejecting duplicates while parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateList(pub Vec<String>);

impl Serialize for StateList {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for name in &self.0 {
            seq.serialize_element(name)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for StateList {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct StateListVisitor;

        impl<'de> Visitor<'de> for StateListVisitor {
            type Value = StateList;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of unique state names")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<StateList, A::Error> {
                let mut names: Vec<String> = Vec::new();
                while let Some(name) = seq.next_element::<String>()? {
                    if names.contains(&name) {
                        return Err(de::Error::custom(format!("duplicate state `{name}`")));
                    }
                    names.push(name);
                }
                Ok(StateList(names))
            }
        }

        deserializer.deserialize_seq(StateListVisitor)
    }
}

/// Named guards in declaration order, rejecting duplicate names while parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GuardTable(pub Vec<(String, Vec<String>)>);

impl GuardTable {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for GuardTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (name, members) in &self.0 {
            map.serialize_entry(name, members)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for GuardTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct GuardTableVisitor;

        impl<'de> Visitor<'de> for GuardTableVisitor {
            type Value = GuardTable;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from guard names to state lists")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<GuardTable, A::Error> {
                let mut entries: Vec<(String, Vec<String>)> = Vec::new();
                while let Some(name) = map.next_key::<String>()? {
                    if entries.iter().any(|(n, _)| *n == name) {
                        return Err(de::Error::custom(format!("duplicate guard `{name}`")));
                    }
                    let members = map.next_value::<Vec<String>>()?;
                    entries.push((name, members));
                }
                Ok(GuardTable(entries))
            }
        }

        deserializer.deserialize_map(GuardTableVisitor)
    }
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, ModelFileError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Pretty-printed JSON; `from_json(render())` returns an equal model.
    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("model serializes");
        out.push('\n');
        out
    }
}

/// Reads and parses a model file from disk.
pub fn parse_model(path: impl AsRef<Path>) -> Result<ModelFile, ModelFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ModelFile::from_json(&text)
}
