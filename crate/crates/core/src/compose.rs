//! Synchronous product of any number of automata.
//!
//! Components synchronize on shared events and interleave on private ones.
//! Only the accessible part is built. Composite state names are the
//! component names joined with `|`, left to right, so a product of products
//! has the same names as the flat product of all components.

use std::collections::HashMap;
use std::hash::Hash;

use crate::automaton::{Automaton, StateId};
use crate::event::EventId;

const NONE: u32 = u32::MAX;

/// A product automaton together with the component state tuple of every
/// composite state.
#[derive(Debug, Clone)]
pub struct Product {
    pub automaton: Automaton,
    arity: usize,
    tuples: Vec<u32>,
}

impl Product {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Component states of composite state `q`.
    pub fn tuple(&self, q: StateId) -> &[u32] {
        &self.tuples[q.index() * self.arity..(q.index() + 1) * self.arity]
    }
}

/// Dense successor table of one component, indexed by position in the
/// product alphabet.
struct Dense {
    width: usize,
    next: Vec<u32>,
}

impl Dense {
    fn new(a: &Automaton, alphabet: &[EventId]) -> Self {
        let width = alphabet.len();
        let mut next = vec![NONE; a.state_count() * width];
        for (q, e, t) in a.transitions() {
            let k = alphabet.binary_search(&e).expect("component event in union");
            next[q.index() * width + k] = t.0;
        }
        Dense { width, next }
    }

    #[inline]
    fn get(&self, q: u32, k: usize) -> u32 {
        self.next[q as usize * self.width + k]
    }
}

/// Binary parallel composition.
pub fn parallel(a: &Automaton, b: &Automaton) -> Automaton {
    parallel_all(&[a, b])
}

/// N-ary parallel composition computed as one synchronous product.
pub fn parallel_all(components: &[&Automaton]) -> Automaton {
    product(components).automaton
}

/// N-ary composition as a left fold of binary products. Language-equal to
/// [`parallel_all`]; kept for cross-checking.
pub fn parallel_fold(components: &[&Automaton]) -> Automaton {
    let mut iter = components.iter();
    let Some(first) = iter.next() else {
        return product(&[]).automaton;
    };
    iter.fold((*first).clone(), |acc, c| parallel(&acc, c))
}

/// Product of `components` keeping the component tuples.
pub fn product(components: &[&Automaton]) -> Product {
    product_filtered(components, |_| true)
}

/// Product restricted to events accepted by `allowed`. Rejected events are
/// still part of the alphabet but never fire.
pub fn product_filtered(components: &[&Automaton], allowed: impl Fn(EventId) -> bool) -> Product {
    let arity = components.len();
    let name = components
        .iter()
        .map(|c| c.name())
        .collect::<Vec<_>>()
        .join("||");
    let mut alphabet: Vec<EventId> = components
        .iter()
        .flat_map(|c| c.alphabet().iter().copied())
        .collect();
    alphabet.sort();
    alphabet.dedup();

    if components.iter().any(|c| c.is_empty()) {
        return Product {
            automaton: Automaton::empty(name, alphabet),
            arity,
            tuples: Vec::new(),
        };
    }

    let dense: Vec<Dense> = components.iter().map(|c| Dense::new(c, &alphabet)).collect();
    let participants: Vec<Vec<usize>> = alphabet
        .iter()
        .map(|e| (0..arity).filter(|&i| components[i].has_event(*e)).collect())
        .collect();
    let active: Vec<usize> = (0..alphabet.len()).filter(|&k| allowed(alphabet[k])).collect();

    let sizes: Vec<u128> = components.iter().map(|c| c.state_count() as u128).collect();
    let fits = sizes
        .iter()
        .try_fold(1u128, |acc, &s| acc.checked_mul(s.max(1)))
        .is_some();
    let (tuples, offsets, edges) = if fits {
        explore(components, &dense, &participants, &active, &alphabet, |t: &[u32]| {
            t.iter()
                .zip(&sizes)
                .fold(0u128, |acc, (&q, &s)| acc * s + q as u128)
        })
    } else {
        explore(components, &dense, &participants, &active, &alphabet, |t: &[u32]| {
            t.to_vec()
        })
    };

    let count = offsets.len() - 1;
    let mut names = Vec::with_capacity(count);
    let mut marked = Vec::with_capacity(count);
    for i in 0..count {
        let t = &tuples[i * arity..(i + 1) * arity];
        let mut s = String::new();
        for (k, (&q, c)) in t.iter().zip(components).enumerate() {
            if k > 0 {
                s.push('|');
            }
            s.push_str(c.state_name(StateId(q)));
        }
        names.push(s);
        marked.push(t.iter().zip(components).all(|(&q, c)| c.is_marked(StateId(q))));
    }
    Product {
        automaton: Automaton::from_csr(name, alphabet, names, StateId(0), marked, offsets, edges),
        arity,
        tuples,
    }
}

type Explored = (Vec<u32>, Vec<usize>, Vec<(EventId, StateId)>);

fn explore<K: Hash + Eq>(
    components: &[&Automaton],
    dense: &[Dense],
    participants: &[Vec<usize>],
    active: &[usize],
    alphabet: &[EventId],
    key: impl Fn(&[u32]) -> K,
) -> Explored {
    let arity = components.len();
    let init: Vec<u32> = components.iter().map(|c| c.initial().0).collect();
    let mut index: HashMap<K, u32> = HashMap::new();
    index.insert(key(&init), 0);
    let mut tuples = init;
    let mut offsets = vec![0usize];
    let mut edges = Vec::new();
    let mut next = vec![0u32; arity];
    let mut head = 0usize;
    while head * arity < tuples.len() {
        let base = head * arity;
        'events: for &k in active {
            next.copy_from_slice(&tuples[base..base + arity]);
            for &c in &participants[k] {
                let t = dense[c].get(next[c], k);
                if t == NONE {
                    continue 'events;
                }
                next[c] = t;
            }
            let fresh = (tuples.len() / arity) as u32;
            let id = *index.entry(key(&next)).or_insert(fresh);
            if id == fresh {
                tuples.extend_from_slice(&next);
            }
            edges.push((alphabet[k], StateId(id)));
        }
        offsets.push(edges.len());
        head += 1;
    }
    (tuples, offsets, edges)
}
