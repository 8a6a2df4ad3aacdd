//! Parameterized verification of global synchronization protocols.
//!
//! Systems of `n` identical processes that synchronize globally: every
//! transition has `k` senders while all other processes react as receivers,
//! optionally restricted by conjunctive guards. The crate decides whether a
//! local state can be populated by at least `m` processes for *some* `n`
//! (backward reachability over upward-closed sets), certifies the guard
//! conditions that make this sound, checks small-cutoff conditions, and
//! cross-checks everything with an explicit-state search at fixed `n`.

pub mod cli;
pub mod cutoff;
pub mod engine;
pub mod explicit;
pub mod fixtures;
pub mod model;
pub mod protocol;
pub mod random;
pub mod report;
pub mod semantics;
pub mod wellbehaved;
pub mod wqo;
