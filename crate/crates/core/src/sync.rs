//! Synchronizing words: membership test, exact shortest search by subset
//! BFS, the greedy pair-merging heuristic, recovery-event permutations and
//! a brute-force check of the language inclusions of synchronizing
//! automata w.r.t. the initial state.
//!
//! A word only counts as synchronizing when it is runnable from every
//! state; partial transitions disqualify it.

use std::collections::{HashMap, HashSet, VecDeque};

use itertools::Itertools;

use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Result};
use crate::event::{EventClass, EventId, EventTable, Word, WordSet};

/// Default state bound for exact subset search.
pub const DEFAULT_EXACT_BOUND: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncTarget {
    /// Any singleton.
    Any,
    Initial,
    State(StateId),
}

impl SyncTarget {
    fn resolve(self, a: &Automaton) -> Option<StateId> {
        match self {
            SyncTarget::Any => None,
            SyncTarget::Initial => Some(a.initial()),
            SyncTarget::State(q) => Some(q),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncMethod {
    ExactSubsetBfs,
    GreedyPairwise,
    RecoveryPermutation,
}

impl std::fmt::Display for SyncMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SyncMethod::ExactSubsetBfs => "exact-subset-bfs",
            SyncMethod::GreedyPairwise => "greedy-pairwise",
            SyncMethod::RecoveryPermutation => "recovery-permutation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncAnalysis {
    pub synchronizing: bool,
    pub wrt_initial: bool,
    /// Shortest word to any singleton (exact) or a valid one (heuristic).
    pub shortest_word: Option<Word>,
    pub method: SyncMethod,
}

/// True when `w` runs from every state and all runs end in one state
/// (the given target, when there is one).
pub fn is_sync_word(a: &Automaton, w: &[EventId], target: SyncTarget) -> bool {
    if a.is_empty() {
        return false;
    }
    let goal = target.resolve(a);
    let mut landing: Option<StateId> = goal;
    for q in a.states() {
        let Some(end) = a.run(q, w) else {
            return false;
        };
        match landing {
            None => landing = Some(end),
            Some(l) if l != end => return false,
            _ => {}
        }
    }
    true
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Subset(Box<[u64]>);

impl Subset {
    fn full(n: usize) -> Self {
        let mut bits = vec![0u64; n.div_ceil(64).max(1)];
        for i in 0..n {
            bits[i / 64] |= 1 << (i % 64);
        }
        Subset(bits.into_boxed_slice())
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits & (1 << b) != 0).map(move |b| w * 64 + b)
        })
    }

    fn singleton(&self) -> Option<usize> {
        let mut it = self.iter();
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    /// Image under `e`, or `None` when `e` is undefined somewhere in the set.
    fn image(&self, a: &Automaton, e: EventId) -> Option<Subset> {
        let mut bits = vec![0u64; self.0.len()];
        for q in self.iter() {
            let t = a.successor(StateId(q as u32), e)?.index();
            bits[t / 64] |= 1 << (t % 64);
        }
        Some(Subset(bits.into_boxed_slice()))
    }
}

/// Shortest synchronizing word by breadth-first search over subsets,
/// starting from the full state set. Among the shortest words the least in
/// event-table order is returned.
pub fn shortest_sync_word(a: &Automaton, target: SyncTarget, bound: usize) -> Result<Option<Word>> {
    if a.state_count() > bound {
        return Err(Error::TooManyStates {
            states: a.state_count(),
            bound,
        });
    }
    if a.is_empty() {
        return Ok(None);
    }
    let goal = target.resolve(a).map(StateId::index);
    let is_goal = |s: &Subset| match (s.singleton(), goal) {
        (Some(q), Some(g)) => q == g,
        (Some(_), None) => true,
        (None, _) => false,
    };
    let start = Subset::full(a.state_count());
    let mut parent: HashMap<Subset, Option<(Subset, EventId)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        if is_goal(&s) {
            let mut word = Vec::new();
            let mut cur = s;
            while let Some(Some((prev, e))) = parent.get(&cur) {
                word.push(*e);
                cur = prev.clone();
            }
            word.reverse();
            return Ok(Some(Word(word)));
        }
        for &e in a.alphabet() {
            if let Some(next) = s.image(a, e) {
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((s.clone(), e)));
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(None)
}

type Pair = (StateId, StateId);

/// Shortest word merging `p` and `q` over `events`, by BFS on pairs.
fn merge_pair(a: &Automaton, p: StateId, q: StateId, events: &[EventId]) -> Option<Vec<EventId>> {
    let key = |x: StateId, y: StateId| if x <= y { (x, y) } else { (y, x) };
    let start = key(p, q);
    let mut parent: HashMap<Pair, Option<(Pair, EventId)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some((x, y)) = queue.pop_front() {
        if x == y {
            let mut word = Vec::new();
            let mut cur = (x, y);
            while let Some(Some((prev, e))) = parent.get(&cur) {
                word.push(*e);
                cur = *prev;
            }
            word.reverse();
            return Some(word);
        }
        for &e in events {
            let (Some(nx), Some(ny)) = (a.successor(x, e), a.successor(y, e)) else {
                continue;
            };
            let next = key(nx, ny);
            if let std::collections::hash_map::Entry::Vacant(v) = parent.entry(next) {
                v.insert(Some(((x, y), e)));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Shortest path between two states, used to steer a singleton to a target.
fn path_between(a: &Automaton, from: StateId, to: StateId) -> Option<Vec<EventId>> {
    let mut parent: HashMap<StateId, Option<(StateId, EventId)>> = HashMap::new();
    parent.insert(from, None);
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        if q == to {
            let mut word = Vec::new();
            let mut cur = q;
            while let Some(Some((prev, e))) = parent.get(&cur) {
                word.push(*e);
                cur = *prev;
            }
            word.reverse();
            return Some(word);
        }
        for &(e, t) in a.edges_from(q) {
            parent.entry(t).or_insert_with(|| {
                queue.push_back(t);
                Some((q, e))
            });
        }
    }
    None
}

/// Greedy pair-merging heuristic. Repeatedly merges the two least states of
/// the current set with a shortest merging word over the events defined at
/// every state, so every intermediate word stays runnable from all of Q.
/// The result is valid but not necessarily shortest.
pub fn greedy_sync_word(a: &Automaton, target: SyncTarget) -> Option<Word> {
    if a.is_empty() {
        return None;
    }
    let total: Vec<EventId> = a
        .alphabet()
        .iter()
        .copied()
        .filter(|&e| a.states().all(|q| a.successor(q, e).is_some()))
        .collect();
    let mut current: Vec<StateId> = a.states().collect();
    let mut word: Vec<EventId> = Vec::new();
    while current.len() > 1 {
        let merge = merge_pair(a, current[0], current[1], &total)?;
        let mut next: Vec<StateId> = current
            .iter()
            .map(|&q| a.run(q, &merge).expect("total events"))
            .collect();
        next.sort();
        next.dedup();
        word.extend(merge);
        current = next;
    }
    if let Some(goal) = target.resolve(a) {
        word.extend(path_between(a, current[0], goal)?);
    }
    Some(Word(word))
}

/// Every ordering of `restrict_to`, in lexicographic event-table order.
pub fn recovery_permutations(table: &EventTable, restrict_to: &[EventId]) -> Result<WordSet> {
    Ok(recovery_permutations_iter(table, restrict_to)?.collect())
}

/// Lazy form of [`recovery_permutations`], for alphabets too large to
/// enumerate in full.
pub fn recovery_permutations_iter(
    table: &EventTable,
    restrict_to: &[EventId],
) -> Result<impl Iterator<Item = Word>> {
    let mut events = restrict_to.to_vec();
    events.sort();
    events.dedup();
    if let Some(&e) = events.iter().find(|&&e| table.class(e) != EventClass::Recovery) {
        return Err(Error::input(format!(
            "{} is not a recovery event",
            table.name(e)
        )));
    }
    let n = events.len();
    Ok(events.into_iter().permutations(n).map(Word))
}

/// First recovery permutation over the automaton's recovery events that
/// synchronizes it to `target`.
pub fn verified_recovery_word(a: &Automaton, table: &EventTable, target: SyncTarget) -> Option<Word> {
    let rec: Vec<EventId> = a
        .alphabet()
        .iter()
        .copied()
        .filter(|&e| table.is_recovery(e))
        .collect();
    recovery_permutations_iter(table, &rec)
        .ok()?
        .find(|w| is_sync_word(a, w, target))
}

/// Synchronizability summary. Uses exact search within `bound`, the
/// greedy heuristic beyond it.
pub fn analyze(a: &Automaton, bound: usize) -> SyncAnalysis {
    if a.state_count() <= bound {
        let any = shortest_sync_word(a, SyncTarget::Any, bound).ok().flatten();
        let init = shortest_sync_word(a, SyncTarget::Initial, bound).ok().flatten();
        SyncAnalysis {
            synchronizing: any.is_some(),
            wrt_initial: init.is_some(),
            shortest_word: any,
            method: SyncMethod::ExactSubsetBfs,
        }
    } else {
        let any = greedy_sync_word(a, SyncTarget::Any);
        let init = greedy_sync_word(a, SyncTarget::Initial);
        SyncAnalysis {
            synchronizing: any.is_some(),
            wrt_initial: init.is_some(),
            shortest_word: any,
            method: SyncMethod::GreedyPairwise,
        }
    }
}

/// A synchronizing word to `target`: exact within `bound`, otherwise the
/// greedy heuristic.
pub fn sync_word_to(a: &Automaton, target: SyncTarget, bound: usize) -> Option<(Word, SyncMethod)> {
    if a.state_count() <= bound {
        shortest_sync_word(a, target, bound)
            .ok()
            .flatten()
            .map(|w| (w, SyncMethod::ExactSubsetBfs))
    } else {
        greedy_sync_word(a, target).map(|w| (w, SyncMethod::GreedyPairwise))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inclusion {
    /// L(G) I L(G) ⊆ L(G)
    GeneratedGenerated,
    /// L(G) I Lm(G) ⊆ Lm(G)
    GeneratedMarked,
    /// Lm(G) I Lm(G) ⊆ Lm(G)
    MarkedMarked,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionViolation {
    pub inclusion: Inclusion,
    pub prefix: Word,
    pub sync_word: Word,
    pub suffix: Word,
}

/// Every word of L(a) up to `max_len`, shortlex ordered.
pub(crate) fn words_up_to(a: &Automaton, max_len: usize) -> Vec<(Word, StateId)> {
    let mut out = vec![(Word::empty(), a.initial())];
    let mut frontier = 0;
    for _ in 0..max_len {
        let end = out.len();
        for i in frontier..end {
            let (w, q) = out[i].clone();
            for &(e, t) in a.edges_from(q) {
                out.push((w.concat(&[e]), t));
            }
        }
        frontier = end;
    }
    out
}

/// Brute-force check of the three inclusions over all words up to
/// `max_len`, with one witness synchronizing word w.r.t. the initial state.
/// `Ok(None)` when no violation exists.
pub fn check_sync_inclusions(a: &Automaton, max_len: usize, bound: usize) -> Result<Option<InclusionViolation>> {
    if a.is_empty() {
        return Err(Error::input("not synchronizing: automaton is empty"));
    }
    let (witness, _) = sync_word_to(a, SyncTarget::Initial, bound)
        .ok_or_else(|| Error::input(format!("{} is not synchronizing w.r.t. its initial state", a.name())))?;
    let words = words_up_to(a, max_len);
    let marked: Vec<&(Word, StateId)> = words.iter().filter(|(_, q)| a.is_marked(*q)).collect();

    // Each prefix s lands in one state after s·w; check every suffix there.
    let mut landing: HashMap<StateId, Word> = HashMap::new();
    let mut landing_marked: HashMap<StateId, Word> = HashMap::new();
    for (s, q) in &words {
        let Some(end) = a.run(*q, &witness) else {
            return Ok(Some(InclusionViolation {
                inclusion: Inclusion::GeneratedGenerated,
                prefix: s.clone(),
                sync_word: witness.clone(),
                suffix: Word::empty(),
            }));
        };
        landing.entry(end).or_insert_with(|| s.clone());
        if a.is_marked(*q) {
            landing_marked.entry(end).or_insert_with(|| s.clone());
        }
    }
    let all: Vec<&(Word, StateId)> = words.iter().collect();
    let checks = [
        (Inclusion::GeneratedGenerated, &landing, all),
        (Inclusion::GeneratedMarked, &landing, marked.clone()),
        (Inclusion::MarkedMarked, &landing_marked, marked.clone()),
    ];
    for (inclusion, starts, suffixes) in checks {
        let mut order: Vec<_> = starts.iter().collect();
        order.sort_by_key(|(q, _)| **q);
        for (&q, s) in order {
            for (t, _) in &suffixes {
                let ok = match a.run(q, t) {
                    None => false,
                    Some(end) => inclusion == Inclusion::GeneratedGenerated || a.is_marked(end),
                };
                if !ok {
                    return Ok(Some(InclusionViolation {
                        inclusion,
                        prefix: s.clone(),
                        sync_word: witness,
                        suffix: t.clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// States reachable under `w` from every state, for diagnostics.
pub fn image_of_all(a: &Automaton, w: &[EventId]) -> HashSet<StateId> {
    a.states().filter_map(|q| a.run(q, w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::AutomatonBuilder;

    fn cerny(t: &mut EventTable) -> Automaton {
        let a = t.register("a", EventClass::Controllable).unwrap();
        let b = t.register("b", EventClass::Controllable).unwrap();
        let mut bld = AutomatonBuilder::new("cerny4");
        bld.events([a, b]);
        let q: Vec<_> = (0..4).map(|i| bld.add_state(&i.to_string()).unwrap()).collect();
        bld.set_initial(q[0]).unwrap();
        for (s, e, d) in [(0, a, 1), (0, b, 1), (1, b, 2), (2, b, 3), (3, b, 0), (1, a, 1), (2, a, 2), (3, a, 3)] {
            bld.add_transition(q[s], e, q[d]);
        }
        bld.build().unwrap()
    }

    fn machine_a(t: &mut EventTable) -> Automaton {
        let a = t.register("a", EventClass::Controllable).unwrap();
        let b = t.register("b", EventClass::Uncontrollable).unwrap();
        let c = t.register("c", EventClass::Uncontrollable).unwrap();
        let mut bld = AutomatonBuilder::new("A");
        bld.events([a, b, c]);
        let q0 = bld.add_state("0").unwrap();
        let q1 = bld.add_state("1").unwrap();
        bld.set_initial(q0).unwrap();
        bld.set_marked(q0);
        bld.add_transition(q0, a, q1)
            .add_transition(q1, b, q0)
            .add_transition(q1, c, q0)
            .add_transition(q0, c, q0);
        bld.build().unwrap()
    }

    /// Independent oracle: enumerate every word in shortlex order and
    /// return the first synchronizing one.
    fn brute_force_shortest(a: &Automaton, target: SyncTarget, max_len: usize) -> Option<Word> {
        let mut layer = vec![Word::empty()];
        for _ in 0..=max_len {
            if let Some(w) = layer.iter().find(|w| is_sync_word(a, w, target)) {
                return Some(w.clone());
            }
            layer = layer
                .iter()
                .flat_map(|w| a.alphabet().iter().map(move |&e| w.concat(&[e])))
                .collect();
        }
        None
    }

    #[test]
    fn cerny_word_is_synchronizing_to_state_one() {
        let mut t = EventTable::new();
        let a = cerny(&mut t);
        let w = t.parse_word("a b b b a b b b a").unwrap();
        assert!(is_sync_word(&a, &w, SyncTarget::State(StateId(1))));
        assert!(!is_sync_word(&a, &w, SyncTarget::State(StateId(0))));
    }

    #[test]
    fn cerny_shortest_has_length_nine() {
        let mut t = EventTable::new();
        let a = cerny(&mut t);
        let w = shortest_sync_word(&a, SyncTarget::Any, DEFAULT_EXACT_BOUND).unwrap().unwrap();
        assert_eq!(w.len(), 9);
        assert_eq!(brute_force_shortest(&a, SyncTarget::Any, 9).unwrap().len(), 9);
        assert_eq!(t.format_word(&w), "a b b b a b b b a");
    }

    #[test]
    fn machine_a_shortest_is_c() {
        let mut t = EventTable::new();
        let a = machine_a(&mut t);
        let w = shortest_sync_word(&a, SyncTarget::Initial, DEFAULT_EXACT_BOUND).unwrap().unwrap();
        assert_eq!(t.format_word(&w), "c");
        assert!(is_sync_word(&a, &w, SyncTarget::State(StateId(0))));
        let not = t.parse_word("a").unwrap();
        assert!(!is_sync_word(&a, &not, SyncTarget::State(StateId(0))));
    }

    #[test]
    fn exact_search_respects_bound() {
        let mut t = EventTable::new();
        let a = cerny(&mut t);
        assert!(matches!(
            shortest_sync_word(&a, SyncTarget::Any, 3),
            Err(Error::TooManyStates { states: 4, bound: 3 })
        ));
    }

    #[test]
    fn greedy_is_valid() {
        let mut t = EventTable::new();
        let a = machine_a(&mut t);
        let w = greedy_sync_word(&a, SyncTarget::Any).unwrap();
        assert!(is_sync_word(&a, &w, SyncTarget::Any));
        let mut t = EventTable::new();
        let c = cerny(&mut t);
        let w = greedy_sync_word(&c, SyncTarget::Any).unwrap();
        assert!(is_sync_word(&c, &w, SyncTarget::Any));
        assert!(w.len() >= 9);
        let w = greedy_sync_word(&c, SyncTarget::Initial).unwrap();
        assert!(is_sync_word(&c, &w, SyncTarget::Initial));
    }

    #[test]
    fn greedy_on_single_state_is_empty() {
        let mut t = EventTable::new();
        let e = t.register("e", EventClass::Controllable).unwrap();
        let mut b = AutomatonBuilder::new("one");
        b.event(e);
        let q = b.add_state("q").unwrap();
        b.set_initial(q).unwrap();
        b.add_transition(q, e, q);
        let a = b.build().unwrap();
        assert_eq!(greedy_sync_word(&a, SyncTarget::Any), Some(Word::empty()));
    }

    #[test]
    fn permutations_in_table_order() {
        let mut t = EventTable::new();
        let r1 = t.register("r1", EventClass::Recovery).unwrap();
        let r2 = t.register("r2", EventClass::Recovery).unwrap();
        let a = t.register("a", EventClass::Controllable).unwrap();
        let ps = recovery_permutations(&t, &[r2, r1]).unwrap();
        let shown: Vec<_> = ps.iter().map(|w| t.format_word(w)).collect();
        assert_eq!(shown, ["r1 r2", "r2 r1"]);
        assert_eq!(recovery_permutations(&t, &[]).unwrap(), vec![Word::empty()]);
        assert!(recovery_permutations(&t, &[a]).is_err());
    }

    #[test]
    fn sync_inclusions_holds_on_machine_a() {
        let mut t = EventTable::new();
        let a = machine_a(&mut t);
        assert_eq!(check_sync_inclusions(&a, 4, DEFAULT_EXACT_BOUND).unwrap(), None);
    }

    #[test]
    fn sync_inclusions_vacuous_without_marking() {
        let mut t = EventTable::new();
        let a = cerny(&mut t);
        assert_eq!(check_sync_inclusions(&a, 4, DEFAULT_EXACT_BOUND).unwrap(), None);
    }

    #[test]
    fn sync_inclusions_reports_non_synchronizing() {
        let mut t = EventTable::new();
        let e = t.register("e", EventClass::Controllable).unwrap();
        let mut b = AutomatonBuilder::new("chain");
        b.event(e);
        let p = b.add_state("p").unwrap();
        let q = b.add_state("q").unwrap();
        b.set_initial(p).unwrap();
        b.add_transition(p, e, q);
        let a = b.build().unwrap();
        assert!(check_sync_inclusions(&a, 3, DEFAULT_EXACT_BOUND).is_err());
    }

    #[test]
    fn analysis_summary() {
        let mut t = EventTable::new();
        let a = machine_a(&mut t);
        let s = analyze(&a, DEFAULT_EXACT_BOUND);
        assert!(s.synchronizing && s.wrt_initial);
        assert_eq!(s.method, SyncMethod::ExactSubsetBfs);
        assert_eq!(s.shortest_word.unwrap().len(), 1);
    }
}
