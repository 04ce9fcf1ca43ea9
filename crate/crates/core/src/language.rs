//! Language comparison by joint breadth-first search over the accessible
//! parts of two automata.

use std::collections::{HashMap, VecDeque};

use crate::automaton::{Automaton, StateId};
use crate::event::{EventId, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanguageMode {
    Generated,
    Marked,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    /// Shortest distinguishing word, least in event-table order among the
    /// shortest ones.
    Differ(Word),
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal)
    }

    pub fn counterexample(&self) -> Option<&Word> {
        match self {
            Equivalence::Equal => None,
            Equivalence::Differ(w) => Some(w),
        }
    }
}

type Pair = (Option<StateId>, Option<StateId>);

pub fn language_equal(a: &Automaton, b: &Automaton, mode: LanguageMode) -> Equivalence {
    let start: Pair = (
        (!a.is_empty()).then(|| a.initial()),
        (!b.is_empty()).then(|| b.initial()),
    );
    if start == (None, None) {
        return Equivalence::Equal;
    }
    let mut alphabet: Vec<EventId> = a.alphabet().iter().chain(b.alphabet()).copied().collect();
    alphabet.sort();
    alphabet.dedup();

    let differs = |p: &Pair| match mode {
        LanguageMode::Generated => p.0.is_some() != p.1.is_some(),
        LanguageMode::Marked => {
            p.0.is_some_and(|q| a.is_marked(q)) != p.1.is_some_and(|q| b.is_marked(q))
        }
    };

    let mut parent: HashMap<Pair, Option<(Pair, EventId)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        if differs(&p) {
            let mut word = Vec::new();
            let mut cur = p;
            while let Some(Some((prev, e))) = parent.get(&cur) {
                word.push(*e);
                cur = *prev;
            }
            word.reverse();
            return Equivalence::Differ(Word(word));
        }
        for &e in &alphabet {
            let next: Pair = (
                p.0.and_then(|q| a.successor(q, e)),
                p.1.and_then(|q| b.successor(q, e)),
            );
            if next == (None, None) || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next, Some((p, e)));
            queue.push_back(next);
        }
    }
    Equivalence::Equal
}
