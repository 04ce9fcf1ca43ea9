//! Recovery transform: a fresh recovery event per component that resets it
//! to its initial state from everywhere.

use std::collections::HashSet;
use std::fmt;

use crate::automaton::{Automaton, AutomatonBuilder};
use crate::error::{Error, Result};
use crate::event::{EventClass, EventId, EventTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Plant,
    Specification,
}

impl ComponentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::Plant => "plant",
            ComponentKind::Specification => "spec",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "plant" => Some(ComponentKind::Plant),
            "spec" | "specification" => Some(ComponentKind::Specification),
            _ => None,
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryBinding {
    pub automaton: String,
    pub event: EventId,
    pub kind: ComponentKind,
}

impl RecoveryBinding {
    /// One manifest line: `<automaton> <event> <kind>`.
    pub fn manifest_line(&self, table: &EventTable) -> String {
        format!("{} {} {}", self.automaton, table.name(self.event), self.kind)
    }
}

/// Adds `r` with a transition to the initial state from every state.
pub fn make_recoverable(a: &Automaton, r: EventId, table: &EventTable) -> Result<Automaton> {
    if !table.contains(r) {
        return Err(Error::input(format!("unknown event id {}", r.0)));
    }
    if table.class(r) != EventClass::Recovery {
        return Err(Error::input(format!(
            "{} is {}, not a recovery event",
            table.name(r),
            table.class(r)
        )));
    }
    if a.has_event(r) {
        return Err(Error::input(format!(
            "{} already in the alphabet of {}",
            table.name(r),
            a.name()
        )));
    }
    if a.is_empty() {
        let mut alphabet = a.alphabet().to_vec();
        alphabet.push(r);
        alphabet.sort();
        return Ok(Automaton::empty(a.name(), alphabet));
    }
    let mut b = AutomatonBuilder::new(a.name());
    b.events(a.alphabet().iter().copied()).event(r);
    for q in a.states() {
        b.add_state(a.state_name(q))?;
        if a.is_marked(q) {
            b.set_marked(q);
        }
    }
    b.set_initial(a.initial())?;
    for (q, e, t) in a.transitions() {
        b.add_transition(q, e, t);
    }
    for q in a.states() {
        b.add_transition(q, r, a.initial());
    }
    b.build()
}

/// Transforms every plant and specification. Recovery events are named
/// `r_<automaton>` unless `overrides` supplies a name for that automaton.
pub fn make_recoverable_set(
    plants: &[Automaton],
    specs: &[Automaton],
    overrides: &[(String, String)],
    table: &mut EventTable,
) -> Result<(Vec<Automaton>, Vec<RecoveryBinding>)> {
    let mut seen = HashSet::new();
    for a in plants.iter().chain(specs) {
        if !seen.insert(a.name()) {
            return Err(Error::input(format!("duplicate automaton name {}", a.name())));
        }
    }
    let mut used_events = HashSet::new();
    let mut out = Vec::with_capacity(plants.len() + specs.len());
    let mut bindings = Vec::with_capacity(plants.len() + specs.len());
    let tagged = plants
        .iter()
        .map(|a| (a, ComponentKind::Plant))
        .chain(specs.iter().map(|a| (a, ComponentKind::Specification)));
    for (a, kind) in tagged {
        let name = overrides
            .iter()
            .find(|(n, _)| n == a.name())
            .map(|(_, e)| e.clone())
            .unwrap_or_else(|| format!("r_{}", a.name()));
        if !used_events.insert(name.clone()) {
            return Err(Error::input(format!("recovery event {name} bound twice")));
        }
        let r = table.register(&name, EventClass::Recovery)?;
        out.push(make_recoverable(a, r, table)?);
        bindings.push(RecoveryBinding {
            automaton: a.name().to_string(),
            event: r,
            kind,
        });
    }
    Ok((out, bindings))
}
