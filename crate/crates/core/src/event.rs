//! Event registry shared by every automaton of a model.
//!
//! Events are interned into an [`EventTable`] and referred to by [`EventId`]
//! everywhere else. The registration order of the table is the total order
//! used for tie-breaking (shortest words, serialization, enumeration).

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Index of an event inside its [`EventTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

impl EventId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Control class of an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventClass {
    Controllable,
    Uncontrollable,
    Recovery,
}

impl EventClass {
    /// Single-letter tag used by the `.aut` format.
    pub fn tag(self) -> char {
        match self {
            EventClass::Controllable => 'c',
            EventClass::Uncontrollable => 'u',
            EventClass::Recovery => 'r',
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "c" => Some(EventClass::Controllable),
            "u" => Some(EventClass::Uncontrollable),
            "r" => Some(EventClass::Recovery),
            _ => None,
        }
    }

    /// Events the supervisor may never disable.
    pub fn is_uncontrollable_like(self) -> bool {
        !matches!(self, EventClass::Controllable)
    }
}

impl fmt::Display for EventClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventClass::Controllable => "controllable",
            EventClass::Uncontrollable => "uncontrollable",
            EventClass::Recovery => "recovery",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub name: String,
    pub class: EventClass,
}

/// Append-only registry of events. The three classes partition the table by
/// construction since every event carries exactly one class.
#[derive(Debug, Clone, Default)]
pub struct EventTable {
    events: Vec<Event>,
    by_name: HashMap<String, EventId>,
}

pub(crate) fn is_symbol(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c == '#')
}

impl EventTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `name` with `class`, or returns the existing id when the
    /// event is already known with the same class.
    pub fn register(&mut self, name: &str, class: EventClass) -> Result<EventId> {
        if !is_symbol(name) {
            return Err(Error::input(format!("invalid event name {name:?}")));
        }
        if let Some(&id) = self.by_name.get(name) {
            let known = self.events[id.index()].class;
            if known != class {
                return Err(Error::input(format!(
                    "event {name} registered as {known} and as {class}"
                )));
            }
            return Ok(id);
        }
        let id = EventId(self.events.len() as u32);
        self.events.push(Event { name: name.to_string(), class });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn id(&self, name: &str) -> Option<EventId> {
        self.by_name.get(name).copied()
    }

    /// Like [`EventTable::id`] but reports unknown names as input errors.
    pub fn resolve(&self, name: &str) -> Result<EventId> {
        self.id(name)
            .ok_or_else(|| Error::input(format!("unknown event {name}")))
    }

    pub fn name(&self, id: EventId) -> &str {
        &self.events[id.index()].name
    }

    pub fn class(&self, id: EventId) -> EventClass {
        self.events[id.index()].class
    }

    pub fn contains(&self, id: EventId) -> bool {
        id.index() < self.events.len()
    }

    pub fn is_recovery(&self, id: EventId) -> bool {
        self.class(id) == EventClass::Recovery
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.events.len() as u32).map(EventId)
    }

    pub fn events(&self) -> impl Iterator<Item = (EventId, &Event)> + '_ {
        self.events
            .iter()
            .enumerate()
            .map(|(i, e)| (EventId(i as u32), e))
    }

    pub fn of_class(&self, class: EventClass) -> Vec<EventId> {
        self.events()
            .filter(|(_, e)| e.class == class)
            .map(|(id, _)| id)
            .collect()
    }

    /// Parses a whitespace-separated list of event names.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.split_whitespace()
            .map(|tok| self.resolve(tok))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn format_word(&self, word: &[EventId]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter()
            .map(|&e| self.name(e))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Finite sequence of events.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<EventId>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn concat(&self, other: &[EventId]) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Word(v)
    }
}

impl Deref for Word {
    type Target = [EventId];
    fn deref(&self) -> &[EventId] {
        &self.0
    }
}

impl From<Vec<EventId>> for Word {
    fn from(v: Vec<EventId>) -> Self {
        Word(v)
    }
}

impl FromIterator<EventId> for Word {
    fn from_iter<I: IntoIterator<Item = EventId>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Finite set of words, kept in enumeration order.
pub type WordSet = Vec<Word>;

/// Erases every event outside `alphabet`, preserving order.
pub fn project_word(word: &[EventId], alphabet: &[EventId]) -> Word {
    word.iter()
        .copied()
        .filter(|e| alphabet.binary_search(e).is_ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> EventTable {
        let mut t = EventTable::new();
        for (n, c) in [
            ("a1", EventClass::Controllable),
            ("b1", EventClass::Uncontrollable),
            ("a2", EventClass::Controllable),
            ("b2", EventClass::Uncontrollable),
            ("a3", EventClass::Controllable),
            ("b3", EventClass::Uncontrollable),
            ("r1", EventClass::Recovery),
            ("r2", EventClass::Recovery),
            ("r3", EventClass::Recovery),
            ("rB1", EventClass::Recovery),
            ("rB2", EventClass::Recovery),
        ] {
            t.register(n, c).unwrap();
        }
        t
    }

    fn alpha(t: &EventTable, names: &str) -> Vec<EventId> {
        let mut v: Vec<_> = names.split_whitespace().map(|n| t.id(n).unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn conflicting_class_is_rejected() {
        let mut t = table();
        assert!(t.register("a1", EventClass::Uncontrollable).is_err());
        assert_eq!(t.register("a1", EventClass::Controllable).unwrap(), EventId(0));
        assert!(t.register("has space", EventClass::Controllable).is_err());
        assert!(t.register("", EventClass::Controllable).is_err());
    }

    #[test]
    fn projection_onto_second_cell() {
        let t = table();
        let w = t.parse_word("a1 b1 a2 a1 b2 a3").unwrap();
        let g2 = alpha(&t, "a2 b2 a3 b3 r2 r3 rB2");
        assert_eq!(t.format_word(&project_word(&w, &g2)), "a2 b2 a3");
    }

    #[test]
    fn projection_of_recovery_word_seen_by_second_supervisor() {
        let t = table();
        let w = t.parse_word("r1 r2 rB1").unwrap();
        let s2 = alpha(&t, "a2 b2 a3 b3 r2 r3 rB2");
        assert_eq!(t.format_word(&project_word(&w, &s2)), "r2");
    }

    #[test]
    fn projection_of_empty_word() {
        let t = table();
        let all: Vec<_> = t.ids().collect();
        assert!(project_word(&[], &all).is_empty());
    }

    #[test]
    fn projection_is_idempotent() {
        let t = table();
        let w = t.parse_word("a1 r1 b1 a2 rB1 b2").unwrap();
        let s = alpha(&t, "a1 b1 rB1");
        let once = project_word(&w, &s);
        assert_eq!(project_word(&once, &s), once);
    }
}
