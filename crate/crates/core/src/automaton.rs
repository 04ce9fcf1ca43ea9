//! Deterministic finite automata over an [`EventTable`](crate::EventTable).
//!
//! Transition functions are partial. Transitions are stored in compressed
//! sparse rows: the out-edges of each state are contiguous and sorted by
//! event id, so lookup is a binary search over a handful of entries.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::event::EventId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    name: String,
    alphabet: Vec<EventId>,
    state_names: Vec<String>,
    initial: StateId,
    marked: Vec<bool>,
    offsets: Vec<usize>,
    edges: Vec<(EventId, StateId)>,
}

impl Automaton {
    /// Automaton with no states. Its generated language is empty.
    pub fn empty(name: impl Into<String>, alphabet: Vec<EventId>) -> Self {
        let mut alphabet = alphabet;
        alphabet.sort();
        alphabet.dedup();
        Automaton {
            name: name.into(),
            alphabet,
            state_names: Vec::new(),
            initial: StateId(0),
            marked: Vec::new(),
            offsets: vec![0],
            edges: Vec::new(),
        }
    }

    /// Assembles an automaton from rows that are already in CSR order.
    /// `rows[i]` must be sorted by event and free of duplicate events.
    pub(crate) fn from_csr(
        name: String,
        alphabet: Vec<EventId>,
        state_names: Vec<String>,
        initial: StateId,
        marked: Vec<bool>,
        offsets: Vec<usize>,
        edges: Vec<(EventId, StateId)>,
    ) -> Self {
        debug_assert_eq!(offsets.len(), state_names.len() + 1);
        debug_assert_eq!(marked.len(), state_names.len());
        debug_assert!(alphabet.windows(2).all(|w| w[0] < w[1]));
        let a = Automaton {
            name,
            alphabet,
            state_names,
            initial,
            marked,
            offsets,
            edges,
        };
        debug_assert!(a.is_deterministic());
        a
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Sorted, duplicate-free alphabet.
    pub fn alphabet(&self) -> &[EventId] {
        &self.alphabet
    }

    pub fn has_event(&self, e: EventId) -> bool {
        self.alphabet.binary_search(&e).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.state_names.is_empty()
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn transition_count(&self) -> usize {
        self.edges.len()
    }

    /// Initial state. Meaningless for an empty automaton.
    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.state_names.len() as u32).map(StateId)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.state_names[q.index()]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn find_state(&self, name: &str) -> Option<StateId> {
        self.state_names
            .iter()
            .position(|n| n == name)
            .map(|i| StateId(i as u32))
    }

    pub fn is_marked(&self, q: StateId) -> bool {
        self.marked[q.index()]
    }

    pub fn marked_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(move |&q| self.is_marked(q))
    }

    pub fn contains_state(&self, q: StateId) -> bool {
        q.index() < self.state_names.len()
    }

    #[inline]
    pub fn edges_from(&self, q: StateId) -> &[(EventId, StateId)] {
        &self.edges[self.offsets[q.index()]..self.offsets[q.index() + 1]]
    }

    #[inline]
    pub fn successor(&self, q: StateId, e: EventId) -> Option<StateId> {
        let row = self.edges_from(q);
        row.binary_search_by_key(&e, |&(ev, _)| ev)
            .ok()
            .map(|i| row[i].1)
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.states()
            .flat_map(move |q| self.edges_from(q).iter().map(move |&(e, t)| (q, e, t)))
    }

    fn is_deterministic(&self) -> bool {
        self.states().all(|q| {
            self.edges_from(q).windows(2).all(|w| w[0].0 < w[1].0)
        })
    }

    fn check_state(&self, q: StateId) -> Result<()> {
        if self.contains_state(q) {
            Ok(())
        } else {
            Err(Error::input(format!(
                "state index {} not in automaton {}",
                q.0, self.name
            )))
        }
    }

    fn check_word(&self, w: &[EventId]) -> Result<()> {
        match w.iter().find(|e| !self.has_event(**e)) {
            Some(e) => Err(Error::input(format!(
                "event #{} is not in the alphabet of {}",
                e.0, self.name
            ))),
            None => Ok(()),
        }
    }

    /// Extended transition function. `None` when some step is undefined.
    pub fn step(&self, q: StateId, w: &[EventId]) -> Result<Option<StateId>> {
        self.check_state(q)?;
        self.check_word(w)?;
        Ok(self.run(q, w))
    }

    /// Unchecked variant of [`Automaton::step`].
    #[inline]
    pub fn run(&self, q: StateId, w: &[EventId]) -> Option<StateId> {
        w.iter().try_fold(q, |q, &e| self.successor(q, e))
    }

    /// Image of a set of states under `w`; undefined branches are dropped.
    pub fn step_set(&self, set: &BTreeSet<StateId>, w: &[EventId]) -> Result<BTreeSet<StateId>> {
        for &q in set {
            self.check_state(q)?;
        }
        self.check_word(w)?;
        Ok(set.iter().filter_map(|&q| self.run(q, w)).collect())
    }

    pub fn active_events(&self, q: StateId) -> Result<Vec<EventId>> {
        self.check_state(q)?;
        Ok(self.edges_from(q).iter().map(|&(e, _)| e).collect())
    }

    /// Forward reachability from the initial state using events accepted by
    /// `allowed`, staying within `within` when given.
    pub fn reachable_mask(
        &self,
        allowed: impl Fn(EventId) -> bool,
        within: Option<&[bool]>,
    ) -> Vec<bool> {
        let n = self.state_count();
        let mut seen = vec![false; n];
        if n == 0 || within.is_some_and(|m| !m[self.initial.index()]) {
            return seen;
        }
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial.index()] = true;
        while let Some(q) = queue.pop_front() {
            for &(e, t) in self.edges_from(q) {
                if seen[t.index()] || !allowed(e) || within.is_some_and(|m| !m[t.index()]) {
                    continue;
                }
                seen[t.index()] = true;
                queue.push_back(t);
            }
        }
        seen
    }

    /// States that reach a marked state through events accepted by
    /// `allowed`, staying within `within` when given.
    pub fn coaccessible_mask(
        &self,
        allowed: impl Fn(EventId) -> bool,
        within: Option<&[bool]>,
    ) -> Vec<bool> {
        let n = self.state_count();
        let inside = |q: usize| within.is_none_or(|m| m[q]);
        let mut rev_offsets = vec![0usize; n + 1];
        for (_, e, t) in self.transitions() {
            if allowed(e) {
                rev_offsets[t.index() + 1] += 1;
            }
        }
        for i in 0..n {
            rev_offsets[i + 1] += rev_offsets[i];
        }
        let mut fill = rev_offsets.clone();
        let mut rev = vec![0u32; rev_offsets[n]];
        for (q, e, t) in self.transitions() {
            if allowed(e) {
                rev[fill[t.index()]] = q.0;
                fill[t.index()] += 1;
            }
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&q| self.marked[q] && inside(q)).collect();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(t) = stack.pop() {
            for &p in &rev[rev_offsets[t]..rev_offsets[t + 1]] {
                let p = p as usize;
                if !seen[p] && inside(p) {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// States from which a marked state is reachable using only
    /// transitions labelled in `allowed_events`.
    pub fn coaccessible_states(&self, allowed_events: &[EventId]) -> BTreeSet<StateId> {
        let mut allowed = allowed_events.to_vec();
        allowed.sort();
        let mask = self.coaccessible_mask(|e| allowed.binary_search(&e).is_ok(), None);
        mask_to_set(&mask)
    }

    /// Sub-automaton induced by `keep`. States are renumbered in the order
    /// of a breadth-first search from the initial state, so the result is
    /// also accessible. Empty when the initial state is dropped.
    pub fn restrict(&self, keep: &[bool]) -> Automaton {
        if self.is_empty() || !keep[self.initial.index()] {
            return Automaton::empty(self.name.clone(), self.alphabet.clone());
        }
        let n = self.state_count();
        let mut new_index = vec![u32::MAX; n];
        let mut order = vec![self.initial];
        new_index[self.initial.index()] = 0;
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            for &(_, t) in self.edges_from(q) {
                if keep[t.index()] && new_index[t.index()] == u32::MAX {
                    new_index[t.index()] = order.len() as u32;
                    order.push(t);
                }
            }
        }
        let mut offsets = Vec::with_capacity(order.len() + 1);
        offsets.push(0);
        let mut edges = Vec::new();
        for &q in &order {
            for &(e, t) in self.edges_from(q) {
                if keep[t.index()] {
                    edges.push((e, StateId(new_index[t.index()])));
                }
            }
            offsets.push(edges.len());
        }
        Automaton::from_csr(
            self.name.clone(),
            self.alphabet.clone(),
            order.iter().map(|&q| self.state_names[q.index()].clone()).collect(),
            StateId(0),
            order.iter().map(|&q| self.marked[q.index()]).collect(),
            offsets,
            edges,
        )
    }

    /// Reachable part.
    pub fn accessible(&self) -> Automaton {
        if self.is_empty() {
            return self.clone();
        }
        self.restrict(&vec![true; self.state_count()])
    }

    /// Accessible part of the coaccessible part over the full alphabet.
    pub fn trim(&self) -> Automaton {
        let co = self.coaccessible_mask(|_| true, None);
        self.restrict(&co)
    }

    pub fn is_accessible(&self) -> bool {
        self.reachable_mask(|_| true, None).iter().all(|&b| b)
    }

    pub fn is_coaccessible(&self) -> bool {
        self.coaccessible_mask(|_| true, None).iter().all(|&b| b)
    }

    /// Adds a selfloop at every state for each event of `target_alphabet`
    /// outside the current alphabet.
    pub fn inverse_project(&self, target_alphabet: &[EventId]) -> Result<Automaton> {
        let mut target = target_alphabet.to_vec();
        target.sort();
        target.dedup();
        if let Some(e) = self.alphabet.iter().find(|e| target.binary_search(e).is_err()) {
            return Err(Error::input(format!(
                "target alphabet misses event #{} of {}",
                e.0, self.name
            )));
        }
        let extra: Vec<EventId> = target
            .iter()
            .copied()
            .filter(|e| !self.has_event(*e))
            .collect();
        if extra.is_empty() {
            return Ok(self.clone());
        }
        let mut offsets = vec![0];
        let mut edges = Vec::with_capacity(self.edges.len() + extra.len() * self.state_count());
        for q in self.states() {
            let mut row: Vec<(EventId, StateId)> = self.edges_from(q).to_vec();
            row.extend(extra.iter().map(|&e| (e, q)));
            row.sort_by_key(|&(e, _)| e);
            edges.extend(row);
            offsets.push(edges.len());
        }
        Ok(Automaton::from_csr(
            self.name.clone(),
            target,
            self.state_names.clone(),
            self.initial,
            self.marked.clone(),
            offsets,
            edges,
        ))
    }

    /// Deletes every transition labelled in `events` and drops them from the
    /// alphabet. States are kept as they are.
    pub fn remove_events(&self, events: &[EventId]) -> Automaton {
        let drop = |e: EventId| events.contains(&e);
        let alphabet = self.alphabet.iter().copied().filter(|&e| !drop(e)).collect();
        let mut offsets = vec![0];
        let mut edges = Vec::with_capacity(self.edges.len());
        for q in self.states() {
            edges.extend(self.edges_from(q).iter().copied().filter(|&(e, _)| !drop(e)));
            offsets.push(edges.len());
        }
        Automaton::from_csr(
            self.name.clone(),
            alphabet,
            self.state_names.clone(),
            self.initial,
            self.marked.clone(),
            offsets,
            edges,
        )
    }

    /// Same automaton with every state marked.
    pub fn mark_all(&self) -> Automaton {
        let mut a = self.clone();
        a.marked = vec![true; a.state_count()];
        a
    }
}

pub(crate) fn mask_to_set(mask: &[bool]) -> BTreeSet<StateId> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| StateId(i as u32))
        .collect()
}

/// Incremental constructor that validates names, determinism and labels.
#[derive(Debug, Clone)]
pub struct AutomatonBuilder {
    name: String,
    alphabet: BTreeSet<EventId>,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    initial: Option<StateId>,
    marked: Vec<bool>,
    transitions: Vec<(StateId, EventId, StateId)>,
}

impl AutomatonBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        AutomatonBuilder {
            name: name.into(),
            alphabet: BTreeSet::new(),
            names: Vec::new(),
            index: HashMap::new(),
            initial: None,
            marked: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn event(&mut self, e: EventId) -> &mut Self {
        self.alphabet.insert(e);
        self
    }

    pub fn events(&mut self, es: impl IntoIterator<Item = EventId>) -> &mut Self {
        self.alphabet.extend(es);
        self
    }

    /// Adds a state, failing on duplicate names.
    pub fn add_state(&mut self, name: &str) -> Result<StateId> {
        if !crate::event::is_symbol(name) {
            return Err(Error::input(format!("invalid state name {name:?}")));
        }
        if self.index.contains_key(name) {
            return Err(Error::input(format!(
                "duplicate state {name} in {}",
                self.name
            )));
        }
        let id = StateId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.marked.push(false);
        Ok(id)
    }

    /// Returns the state called `name`, creating it if needed.
    pub fn state(&mut self, name: &str) -> Result<StateId> {
        match self.index.get(name) {
            Some(&id) => Ok(id),
            None => self.add_state(name),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn set_initial(&mut self, q: StateId) -> Result<&mut Self> {
        if let Some(prev) = self.initial {
            if prev != q {
                return Err(Error::input(format!(
                    "{} declares more than one initial state",
                    self.name
                )));
            }
        }
        self.initial = Some(q);
        Ok(self)
    }

    pub fn set_marked(&mut self, q: StateId) -> &mut Self {
        self.marked[q.index()] = true;
        self
    }

    pub fn add_transition(&mut self, src: StateId, e: EventId, dst: StateId) -> &mut Self {
        self.transitions.push((src, e, dst));
        self
    }

    pub fn build(mut self) -> Result<Automaton> {
        let initial = self
            .initial
            .ok_or_else(|| Error::input(format!("{} has no initial state", self.name)))?;
        let alphabet: Vec<EventId> = self.alphabet.iter().copied().collect();
        self.transitions.sort();
        self.transitions.dedup();
        let n = self.names.len();
        let mut offsets = vec![0usize; n + 1];
        let mut edges = Vec::with_capacity(self.transitions.len());
        for w in self.transitions.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::input(format!(
                    "{} is nondeterministic at state {}",
                    self.name,
                    self.names[w[0].0.index()]
                )));
            }
        }
        for &(src, e, dst) in &self.transitions {
            if !self.alphabet.contains(&e) {
                return Err(Error::input(format!(
                    "{}: transition label #{} outside the alphabet",
                    self.name, e.0
                )));
            }
            offsets[src.index() + 1] += 1;
            edges.push((e, dst));
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok(Automaton::from_csr(
            self.name,
            alphabet,
            self.names,
            initial,
            self.marked,
            offsets,
            edges,
        ))
    }
}
