//! Recoverable supervisory control: finite automata with controllable,
//! uncontrollable and recovery events, synchronizing words, supervisor
//! synthesis and closed-loop simulation of lost observations.

pub mod automaton;
pub mod cli;
pub mod closed_loop;
pub mod compose;
pub mod error;
pub mod event;
pub mod fixtures;
pub mod format;
pub mod language;
pub mod recovery;
pub mod reproduce;
pub mod sync;
pub mod synthesis;

pub use automaton::{Automaton, AutomatonBuilder, StateId};
pub use error::{Error, Result};
pub use event::{EventClass, EventId, EventTable, Word, WordSet};
