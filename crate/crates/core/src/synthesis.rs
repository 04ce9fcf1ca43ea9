//! Supremal controllable and nonblocking supervisors with recovery events.
//!
//! Recovery events are never disabled, so for controllability they count
//! as uncontrollable. Nonblocking is judged either on recovery-free paths
//! ([`BlockingRule::RecoveryFree`], the default) or on all paths
//! ([`BlockingRule::Classical`]).

use std::fmt;

use crate::automaton::{Automaton, StateId};
use crate::compose::{parallel_all, product, product_filtered, Product};
use crate::error::{Error, Result};
use crate::event::{EventId, EventTable, Word};
use crate::language::{language_equal, LanguageMode};
use crate::sync::{self, SyncMethod, SyncTarget, DEFAULT_EXACT_BOUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockingRule {
    /// Every accessible state must reach a marked state without recovery
    /// events.
    #[default]
    RecoveryFree,
    /// Every accessible state must reach a marked state over any events.
    Classical,
}

impl BlockingRule {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "recovery-free" => Some(BlockingRule::RecoveryFree),
            "classical" => Some(BlockingRule::Classical),
            _ => None,
        }
    }
}

impl fmt::Display for BlockingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockingRule::RecoveryFree => "recovery-free",
            BlockingRule::Classical => "classical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Monolithic,
    Modular,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "monolithic" => Some(Mode::Monolithic),
            "modular" | "local-modular" => Some(Mode::Modular),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BadReason {
    /// An uncontrollable or recovery event leaves the target or leads to a
    /// bad state.
    UncontrollableExit,
    /// No marked state is reachable at all.
    Blocking,
    /// A marked state is reachable only through recovery events.
    BlockingViaRecovery,
}

impl fmt::Display for BadReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BadReason::UncontrollableExit => "uncontrollable-exit",
            BadReason::Blocking => "blocking",
            BadReason::BlockingViaRecovery => "blocking-via-recovery",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadState {
    pub state: String,
    pub reason: BadReason,
    /// Fixpoint round in which the state was removed, from 0.
    pub round: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SynthesisOptions {
    pub blocking: BlockingRule,
    /// State bound for exact synchronizing-word search.
    pub exact_bound: usize,
    /// Skip the per-supervisor trim on the left side of the nonconflict
    /// check.
    pub nonconflict_no_left_trim: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            blocking: BlockingRule::default(),
            exact_bound: DEFAULT_EXACT_BOUND,
            nonconflict_no_left_trim: false,
        }
    }
}

/// Product of plants and specifications. The first `plants` tuple entries
/// of every composite state are plant component states.
#[derive(Debug, Clone)]
pub struct Target {
    pub product: Product,
    components: Vec<Automaton>,
    plants: usize,
}

impl Target {
    pub fn automaton(&self) -> &Automaton {
        &self.product.automaton
    }

    pub fn plant_components(&self) -> &[Automaton] {
        &self.components[..self.plants]
    }

    /// Plant component states of target state `q`.
    pub fn plant_tuple(&self, q: StateId) -> &[u32] {
        &self.product.tuple(q)[..self.plants]
    }
}

pub fn build_target(plants: &[&Automaton], specs: &[&Automaton]) -> Target {
    let all: Vec<&Automaton> = plants.iter().chain(specs).copied().collect();
    Target {
        product: product(&all),
        components: all.into_iter().cloned().collect(),
        plants: plants.len(),
    }
}

#[derive(Debug, Clone)]
pub struct SupcOutcome {
    /// Trim supervisor; no states when the initial state is bad.
    pub supervisor: Automaton,
    pub bad_states: Vec<BadState>,
    pub rounds: usize,
}

impl SupcOutcome {
    pub fn is_empty(&self) -> bool {
        self.supervisor.is_empty()
    }
}

/// Supremal controllable and nonblocking sub-automaton of `target`.
pub fn supc(target: &Target, table: &EventTable, rule: BlockingRule) -> SupcOutcome {
    let k = target.automaton();
    let plants = target.plant_components();
    // participants[e] lists the plant components that have event e.
    let mut participants: Vec<Vec<usize>> = vec![Vec::new(); table.len()];
    for (i, p) in plants.iter().enumerate() {
        for &e in p.alphabet() {
            participants[e.index()].push(i);
        }
    }
    let plant_enables = |q: StateId, e: EventId| {
        let t = target.plant_tuple(q);
        participants[e.index()]
            .iter()
            .all(|&i| plants[i].successor(StateId(t[i]), e).is_some())
    };
    supc_core(k, plant_enables, table, rule)
}

/// Supremal sub-automaton of `target` against an arbitrary `plant`; states
/// are paired by composing the two.
pub fn supc_against(
    target: &Automaton,
    plant: &Automaton,
    table: &EventTable,
    rule: BlockingRule,
) -> SupcOutcome {
    let t = build_target(&[plant], &[target]);
    let mut out = supc(&t, table, rule);
    out.supervisor = out.supervisor.with_name(target.name());
    out
}

fn supc_core(
    k: &Automaton,
    plant_enables: impl Fn(StateId, EventId) -> bool,
    table: &EventTable,
    rule: BlockingRule,
) -> SupcOutcome {
    let n = k.state_count();
    let name = k.name().to_string();
    if n == 0 {
        return SupcOutcome {
            supervisor: k.clone(),
            bad_states: Vec::new(),
            rounds: 0,
        };
    }
    let unc: Vec<EventId> = k
        .alphabet()
        .iter()
        .copied()
        .filter(|&e| table.class(e).is_uncontrollable_like())
        .collect();
    let is_unc = |e: EventId| table.class(e).is_uncontrollable_like();

    // Reverse adjacency over uncontrollable-like edges.
    let mut rev_off = vec![0usize; n + 1];
    for (_, e, t) in k.transitions() {
        if is_unc(e) {
            rev_off[t.index() + 1] += 1;
        }
    }
    for i in 0..n {
        rev_off[i + 1] += rev_off[i];
    }
    let mut fill = rev_off.clone();
    let mut rev = vec![0u32; rev_off[n]];
    for (q, e, t) in k.transitions() {
        if is_unc(e) {
            rev[fill[t.index()]] = q.0;
            fill[t.index()] += 1;
        }
    }

    let mut good = vec![true; n];
    let mut log = Vec::new();
    let mut stack = Vec::new();
    for q in k.states() {
        let exits = unc
            .iter()
            .any(|&e| k.successor(q, e).is_none() && plant_enables(q, e));
        if exits {
            good[q.index()] = false;
            log.push((q, BadReason::UncontrollableExit, 0));
            stack.push(q.index());
        }
    }
    let propagate = |good: &mut Vec<bool>,
                     stack: &mut Vec<usize>,
                     log: &mut Vec<(StateId, BadReason, usize)>,
                     round: usize| {
        while let Some(t) = stack.pop() {
            for &p in &rev[rev_off[t]..rev_off[t + 1]] {
                if good[p as usize] {
                    good[p as usize] = false;
                    log.push((StateId(p), BadReason::UncontrollableExit, round));
                    stack.push(p as usize);
                }
            }
        }
    };
    propagate(&mut good, &mut stack, &mut log, 0);

    let mut round = 0;
    let keep = loop {
        if !good[k.initial().index()] {
            break None;
        }
        let acc = k.reachable_mask(|_| true, Some(&good));
        let co = match rule {
            BlockingRule::RecoveryFree => {
                k.coaccessible_mask(|e| !table.is_recovery(e), Some(&acc))
            }
            BlockingRule::Classical => k.coaccessible_mask(|_| true, Some(&acc)),
        };
        let blocking: Vec<usize> = (0..n).filter(|&q| acc[q] && !co[q]).collect();
        if blocking.is_empty() {
            break Some(acc);
        }
        round += 1;
        let full = match rule {
            BlockingRule::RecoveryFree => Some(k.coaccessible_mask(|_| true, Some(&acc))),
            BlockingRule::Classical => None,
        };
        for q in blocking {
            let reason = if full.as_ref().is_some_and(|f| f[q]) {
                BadReason::BlockingViaRecovery
            } else {
                BadReason::Blocking
            };
            good[q] = false;
            log.push((StateId(q as u32), reason, round));
            stack.push(q);
        }
        propagate(&mut good, &mut stack, &mut log, round);
    };

    let supervisor = match keep {
        Some(mask) => k.restrict(&mask),
        None => Automaton::empty(name, k.alphabet().to_vec()),
    };
    SupcOutcome {
        supervisor,
        bad_states: log
            .into_iter()
            .map(|(q, reason, round)| BadState {
                state: k.state_name(q).to_string(),
                reason,
                round,
            })
            .collect(),
        rounds: round,
    }
}

/// For each specification, the indices of plants sharing a non-recovery
/// event with it.
pub fn local_plants(
    plants: &[&Automaton],
    specs: &[&Automaton],
    table: &EventTable,
) -> Result<Vec<Vec<usize>>> {
    specs
        .iter()
        .map(|s| {
            let shared: Vec<usize> = plants
                .iter()
                .enumerate()
                .filter(|(_, p)| {
                    s.alphabet()
                        .iter()
                        .any(|&e| !table.is_recovery(e) && p.has_event(e))
                })
                .map(|(i, _)| i)
                .collect();
            if shared.is_empty() {
                Err(Error::input(format!("{} shares no event with any plant", s.name())))
            } else {
                Ok(shared)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stats {
    pub states: usize,
    pub transitions: usize,
    pub recovery_transitions: usize,
}

impl Stats {
    pub fn of(a: &Automaton, table: &EventTable) -> Self {
        Stats {
            states: a.state_count(),
            transitions: a.transition_count(),
            recovery_transitions: a.transitions().filter(|&(_, e, _)| table.is_recovery(e)).count(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Supervisor {
    pub name: String,
    pub automaton: Automaton,
    pub local_plant: Automaton,
    pub plant_names: Vec<String>,
    pub spec_names: Vec<String>,
    pub bad_states: Vec<BadState>,
    pub sync_word: Option<Word>,
    pub sync_method: Option<SyncMethod>,
}

impl Supervisor {
    pub fn is_empty(&self) -> bool {
        self.automaton.is_empty()
    }

    pub fn stats(&self, table: &EventTable) -> Stats {
        Stats::of(&self.automaton, table)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nonconflict {
    pub nonconflicting: bool,
    /// Shortest word in the symmetric difference of the two sides.
    pub counterexample: Option<Word>,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub supervisors: Vec<Supervisor>,
    pub nonconflict: Nonconflict,
}

impl SynthesisResult {
    pub fn empty_supervisors(&self) -> impl Iterator<Item = &Supervisor> {
        self.supervisors.iter().filter(|s| s.is_empty())
    }

    pub fn supervisor(&self, name: &str) -> Option<&Supervisor> {
        self.supervisors.iter().find(|s| s.name == name)
    }

    /// `stats.tsv` body with a header line.
    pub fn stats_tsv(&self, table: &EventTable) -> String {
        let mut out =
            String::from("name\tstates\ttransitions\trecovery-transitions\tsync-word-length\tsync-word\n");
        for s in &self.supervisors {
            let st = s.stats(table);
            let (len, word) = match &s.sync_word {
                Some(w) => (w.len().to_string(), table.format_word(w)),
                None => ("-".to_string(), "-".to_string()),
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                s.name, st.states, st.transitions, st.recovery_transitions, len, word
            ));
        }
        out
    }
}

/// Synchronizing word to the initial state: exact within the bound, then
/// the first verified recovery permutation, then the greedy heuristic.
pub fn supervisor_sync_word(
    a: &Automaton,
    table: &EventTable,
    bound: usize,
) -> Option<(Word, SyncMethod)> {
    if a.is_empty() {
        return None;
    }
    if a.state_count() <= bound {
        return sync::shortest_sync_word(a, SyncTarget::Initial, bound)
            .ok()
            .flatten()
            .map(|w| (w, SyncMethod::ExactSubsetBfs));
    }
    if let Some(w) = sync::verified_recovery_word(a, table, SyncTarget::Initial) {
        return Some((w, SyncMethod::RecoveryPermutation));
    }
    sync::greedy_sync_word(a, SyncTarget::Initial).map(|w| (w, SyncMethod::GreedyPairwise))
}

fn finish(
    name: String,
    plant_name: String,
    plants: &[&Automaton],
    specs: &[&Automaton],
    table: &EventTable,
    opts: &SynthesisOptions,
) -> Supervisor {
    let target = build_target(plants, specs);
    let out = supc(&target, table, opts.blocking);
    let automaton = out.supervisor.with_name(name.clone());
    let local_plant = parallel_all(plants).with_name(plant_name);
    let sync = supervisor_sync_word(&automaton, table, opts.exact_bound);
    Supervisor {
        name,
        automaton,
        local_plant,
        plant_names: plants.iter().map(|p| p.name().to_string()).collect(),
        spec_names: specs.iter().map(|s| s.name().to_string()).collect(),
        bad_states: out.bad_states,
        sync_word: sync.as_ref().map(|(w, _)| w.clone()),
        sync_method: sync.map(|(_, m)| m),
    }
}

/// One supervisor per specification group over its local plant. A group
/// of several specifications is synthesized against their composition.
/// Supervisors are named `S<j>` after the 1-based positions of their
/// specifications, local plants `G<j>`.
pub fn synthesize_modular(
    plants: &[&Automaton],
    specs: &[&Automaton],
    groups: &[Vec<usize>],
    table: &EventTable,
    opts: &SynthesisOptions,
) -> Result<SynthesisResult> {
    let locals = local_plants(plants, specs, table)?;
    let mut supervisors = Vec::with_capacity(groups.len());
    for group in groups {
        if group.is_empty() || group.iter().any(|&j| j >= specs.len()) {
            return Err(Error::input(format!("bad specification group {group:?}")));
        }
        let mut plant_idx: Vec<usize> = group.iter().flat_map(|&j| locals[j].clone()).collect();
        plant_idx.sort();
        plant_idx.dedup();
        let ps: Vec<&Automaton> = plant_idx.iter().map(|&i| plants[i]).collect();
        let ss: Vec<&Automaton> = group.iter().map(|&j| specs[j]).collect();
        let suffix = group
            .iter()
            .map(|j| (j + 1).to_string())
            .collect::<Vec<_>>()
            .join(",");
        supervisors.push(finish(
            format!("S{suffix}"),
            format!("G{suffix}"),
            &ps,
            &ss,
            table,
            opts,
        ));
    }
    let autos: Vec<&Automaton> = supervisors.iter().map(|s| &s.automaton).collect();
    let nonconflict = check_nonconflict(&autos, table, opts.nonconflict_no_left_trim);
    Ok(SynthesisResult {
        supervisors,
        nonconflict,
    })
}

/// Every specification on its own.
pub fn singleton_groups(specs: usize) -> Vec<Vec<usize>> {
    (0..specs).map(|j| vec![j]).collect()
}

/// Single supervisor `S` over the full plant `G`.
pub fn synthesize_monolithic(
    plants: &[&Automaton],
    specs: &[&Automaton],
    table: &EventTable,
    opts: &SynthesisOptions,
) -> SynthesisResult {
    let s = finish("S".into(), "G".into(), plants, specs, table, opts);
    SynthesisResult {
        supervisors: vec![s],
        nonconflict: Nonconflict {
            nonconflicting: true,
            counterexample: None,
        },
    }
}

/// Recovery-aware nonconflict test. The left side strips recovery events
/// from each supervisor, trims each and composes the results; the right
/// side composes without recovery events and trims. The generated
/// languages must agree.
pub fn check_nonconflict(supervisors: &[&Automaton], table: &EventTable, no_left_trim: bool) -> Nonconflict {
    let strip = |a: &Automaton| {
        let rec: Vec<EventId> = a
            .alphabet()
            .iter()
            .copied()
            .filter(|&e| table.is_recovery(e))
            .collect();
        a.remove_events(&rec)
    };
    let parts: Vec<Automaton> = supervisors
        .iter()
        .map(|s| {
            let r = strip(s);
            if no_left_trim {
                r.accessible()
            } else {
                r.trim()
            }
        })
        .collect();
    let refs: Vec<&Automaton> = parts.iter().collect();
    let left = parallel_all(&refs);
    let right = strip(&product_filtered(supervisors, |e| !table.is_recovery(e)).automaton).trim();
    let eq = language_equal(&left, &right, LanguageMode::Generated);
    Nonconflict {
        nonconflicting: eq.is_equal(),
        counterexample: eq.counterexample().cloned(),
    }
}

/// Controllability audit against `plant`: every uncontrollable or recovery
/// event possible in the plant is possible in the supervisor. Events the
/// plant does not know are treated as always possible there. Returns the
/// first violating (supervisor state, event).
pub fn audit_controllable(
    sup: &Automaton,
    plant: &Automaton,
    table: &EventTable,
) -> Option<(StateId, EventId)> {
    if sup.is_empty() {
        return None;
    }
    let pair = product(&[sup, plant]);
    let a = &pair.automaton;
    for q in a.states() {
        let t = pair.tuple(q);
        let (s, g) = (StateId(t[0]), StateId(t[1]));
        for &e in sup.alphabet() {
            if !table.class(e).is_uncontrollable_like() {
                continue;
            }
            let possible = !plant.has_event(e) || plant.successor(g, e).is_some();
            if possible && sup.successor(s, e).is_none() {
                return Some((s, e));
            }
        }
    }
    None
}

/// Nonblocking audit: every state reachable without recovery events
/// reaches a marked state without recovery events.
pub fn audit_nonblocking(sup: &Automaton, table: &EventTable) -> Option<StateId> {
    if sup.is_empty() {
        return None;
    }
    let reach = sup.reachable_mask(|e| !table.is_recovery(e), None);
    let co = sup.coaccessible_mask(|e| !table.is_recovery(e), None);
    (0..sup.state_count())
        .find(|&q| reach[q] && !co[q])
        .map(|q| StateId(q as u32))
}
