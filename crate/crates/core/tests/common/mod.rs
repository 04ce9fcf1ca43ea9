//! Random small automata for property tests.
#![allow(dead_code)]

use proptest::prelude::*;
use recosync::recovery::make_recoverable_set;
use recosync::{Automaton, AutomatonBuilder, EventClass, EventTable, StateId};

/// Event pool: the first half controllable, the rest uncontrollable.
pub const POOL: [&str; 6] = ["c0", "c1", "c2", "u0", "u1", "u2"];
pub const MAX_STATES: usize = 4;

#[derive(Debug, Clone)]
pub struct Shape {
    pub states: usize,
    /// Bit i set when POOL[i] is in the alphabet.
    pub events: u8,
    pub marked: Vec<bool>,
    /// Target for (state, event) at `state * POOL.len() + event`.
    pub delta: Vec<Option<usize>>,
}

impl Shape {
    pub fn alphabet(&self) -> impl Iterator<Item = usize> + '_ {
        (0..POOL.len()).filter(|i| self.events & (1 << i) != 0)
    }
}

/// One automaton with up to `max_states` states; `total` forces every
/// (state, event) pair to have a target.
pub fn shape(max_states: usize, total: bool) -> impl Strategy<Value = Shape> {
    (1..=max_states, 1u8..64).prop_flat_map(move |(n, events)| {
        let edge = if total {
            (0..n).prop_map(Some).boxed()
        } else {
            prop::option::weighted(0.75, 0..n).boxed()
        };
        (
            Just(n),
            Just(events),
            prop::collection::vec(prop::bool::weighted(0.6), n),
            prop::collection::vec(edge, n * POOL.len()),
        )
            .prop_map(|(states, events, mut marked, delta)| {
                // At least one marked state per component.
                marked[0] |= marked.iter().all(|&m| !m);
                Shape {
                    states,
                    events,
                    marked,
                    delta,
                }
            })
    })
}

pub fn register_pool(table: &mut EventTable) {
    for (i, name) in POOL.iter().enumerate() {
        let class = if i < POOL.len() / 2 {
            EventClass::Controllable
        } else {
            EventClass::Uncontrollable
        };
        table.register(name, class).unwrap();
    }
}

pub fn build(name: &str, s: &Shape, table: &EventTable) -> Automaton {
    let mut b = AutomatonBuilder::new(name);
    let ids: Vec<_> = POOL.iter().map(|n| table.id(n).unwrap()).collect();
    b.events(s.alphabet().map(|i| ids[i]));
    let q: Vec<StateId> = (0..s.states).map(|i| b.add_state(&i.to_string()).unwrap()).collect();
    b.set_initial(q[0]).unwrap();
    for (i, &m) in s.marked.iter().enumerate() {
        if m {
            b.set_marked(q[i]);
        }
    }
    for i in 0..s.states {
        for e in s.alphabet() {
            if let Some(t) = s.delta[i * POOL.len() + e] {
                b.add_transition(q[i], ids[e], q[t]);
            }
        }
    }
    b.build().unwrap()
}

/// A plant/specification model before the recovery transformation.
#[derive(Debug, Clone)]
pub struct ModelShape {
    pub plants: Vec<Shape>,
    pub specs: Vec<Shape>,
}

/// At most five components, at least one plant and one specification.
/// Every specification keeps at least one event some plant also has.
pub fn model_shape() -> impl Strategy<Value = ModelShape> {
    (1..=3usize, 1..=2usize)
        .prop_flat_map(|(p, s)| {
            (
                prop::collection::vec(shape(MAX_STATES, false), p),
                prop::collection::vec(shape(MAX_STATES, false), s),
            )
        })
        .prop_map(|(plants, mut specs)| {
            let covered = plants.iter().fold(0u8, |m, p| m | p.events);
            for s in &mut specs {
                s.events &= covered;
                if s.events == 0 {
                    s.events = covered & covered.wrapping_neg();
                }
            }
            ModelShape { plants, specs }
        })
}

pub struct Model {
    pub table: EventTable,
    pub plants: Vec<Automaton>,
    pub specs: Vec<Automaton>,
}

impl Model {
    pub fn plant_refs(&self) -> Vec<&Automaton> {
        self.plants.iter().collect()
    }

    pub fn spec_refs(&self) -> Vec<&Automaton> {
        self.specs.iter().collect()
    }
}

/// Builds the model and adds one recovery event per component.
pub fn recoverable(m: &ModelShape) -> Model {
    let mut table = EventTable::new();
    register_pool(&mut table);
    let plants: Vec<Automaton> = m
        .plants
        .iter()
        .enumerate()
        .map(|(i, s)| build(&format!("P{i}"), s, &table))
        .collect();
    let specs: Vec<Automaton> = m
        .specs
        .iter()
        .enumerate()
        .map(|(i, s)| build(&format!("K{i}"), s, &table))
        .collect();
    let (mut all, _) = make_recoverable_set(&plants, &specs, &[], &mut table).unwrap();
    let specs = all.split_off(plants.len());
    Model {
        table,
        plants: all,
        specs,
    }
}

/// Every word of length at most `max_len` over `alphabet` accepted by all
/// `components` (each reading its own events), with the component states
/// reached. A word outside a component's alphabet leaves it in place.
pub fn joint_words(
    components: &[&Automaton],
    alphabet: &[recosync::EventId],
    max_len: usize,
) -> Vec<(Vec<recosync::EventId>, Vec<StateId>)> {
    let start: Vec<StateId> = components.iter().map(|a| a.initial()).collect();
    let mut out = vec![(Vec::new(), start)];
    let mut frontier = 0;
    for _ in 0..max_len {
        let end = out.len();
        for i in frontier..end {
            for &e in alphabet {
                let (w, qs) = &out[i];
                let next: Option<Vec<StateId>> = components
                    .iter()
                    .zip(qs)
                    .map(|(a, &q)| if a.has_event(e) { a.successor(q, e) } else { Some(q) })
                    .collect();
                if let Some(next) = next {
                    let mut w = w.clone();
                    w.push(e);
                    out.push((w, next));
                }
            }
        }
        frontier = end;
    }
    out
}
