//! Scripted closed-loop simulation: plants are ground truth, supervisors
//! keep estimates that go stale when an observation is hidden from them,
//! and synchronizing words put them back in step.

use std::fmt::Write as _;

use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Result};
use crate::event::{EventClass, EventId, EventTable, Word};
use crate::synthesis::SynthesisResult;

pub const SCN_GRAMMAR: &str = "\
exec <event> [hide <sup>,...|all]
recover <sup>|all
assert-plant <name> <state>
assert-sup <name> <state>
assert-enabled <event> true|false
assert-deadlock [<sup>]";

#[derive(Debug, Clone)]
pub struct LoopSupervisor {
    pub automaton: Automaton,
    pub sync_word: Option<Word>,
    /// Indices of the plants this supervisor watches.
    pub plants: Vec<usize>,
    /// Name of the local plant view, `G<x>` for a supervisor `S<x>`.
    pub view: String,
}

impl LoopSupervisor {
    pub fn new(automaton: Automaton, sync_word: Option<Word>, plants: &[Automaton], table: &EventTable) -> Self {
        let local = plants
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                p.alphabet()
                    .iter()
                    .any(|&e| !table.is_recovery(e) && automaton.has_event(e))
            })
            .map(|(i, _)| i)
            .collect();
        let view = match automaton.name().strip_prefix('S') {
            Some(rest) if !rest.is_empty() => format!("G{rest}"),
            Some(_) => "G".to_string(),
            None => format!("G_{}", automaton.name()),
        };
        LoopSupervisor {
            automaton,
            sync_word,
            plants: local,
            view,
        }
    }

    pub fn name(&self) -> &str {
        self.automaton.name()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedLoopState {
    pub plant_states: Vec<StateId>,
    pub supervisor_states: Vec<StateId>,
    pub history: Word,
    /// Executed events together with the supervisors that missed them.
    pub hidden: Vec<(EventId, Vec<usize>)>,
}

#[derive(Debug, Clone)]
pub struct ClosedLoop {
    table: EventTable,
    plants: Vec<Automaton>,
    supervisors: Vec<LoopSupervisor>,
    global_word: Word,
    state: ClosedLoopState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Supervisor(usize),
    All,
}

impl ClosedLoop {
    pub fn new(table: EventTable, plants: Vec<Automaton>, supervisors: Vec<LoopSupervisor>) -> Result<Self> {
        if let Some(a) = plants.iter().chain(supervisors.iter().map(|s| &s.automaton)).find(|a| a.is_empty()) {
            return Err(Error::Config(format!("{} has no states", a.name())));
        }
        let mut rec: Vec<EventId> = plants
            .iter()
            .chain(supervisors.iter().map(|s| &s.automaton))
            .flat_map(|a| a.alphabet().iter().copied())
            .filter(|&e| table.is_recovery(e))
            .collect();
        rec.sort();
        rec.dedup();
        let state = ClosedLoopState {
            plant_states: plants.iter().map(|p| p.initial()).collect(),
            supervisor_states: supervisors.iter().map(|s| s.automaton.initial()).collect(),
            history: Word::empty(),
            hidden: Vec::new(),
        };
        Ok(ClosedLoop {
            table,
            plants,
            supervisors,
            global_word: Word(rec),
            state,
        })
    }

    /// Loop over `plants` under every nonempty supervisor of `result`.
    pub fn from_synthesis(table: EventTable, plants: Vec<Automaton>, result: &SynthesisResult) -> Result<Self> {
        let sups = result
            .supervisors
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| LoopSupervisor::new(s.automaton.clone(), s.sync_word.clone(), &plants, &table))
            .collect();
        ClosedLoop::new(table, plants, sups)
    }

    pub fn table(&self) -> &EventTable {
        &self.table
    }

    pub fn plants(&self) -> &[Automaton] {
        &self.plants
    }

    pub fn supervisors(&self) -> &[LoopSupervisor] {
        &self.supervisors
    }

    pub fn state(&self) -> &ClosedLoopState {
        &self.state
    }

    pub fn supervisor_index(&self, name: &str) -> Option<usize> {
        self.supervisors.iter().position(|s| s.name() == name)
    }

    pub fn plant_index(&self, name: &str) -> Option<usize> {
        self.plants.iter().position(|p| p.name() == name)
    }

    pub fn plant_state_name(&self, i: usize) -> &str {
        self.plants[i].state_name(self.state.plant_states[i])
    }

    pub fn supervisor_state_name(&self, j: usize) -> &str {
        self.supervisors[j].automaton.state_name(self.state.supervisor_states[j])
    }

    /// State of the local plant of supervisor `j`: its plants' states
    /// joined with `|`.
    pub fn view_state_name(&self, j: usize) -> String {
        self.supervisors[j]
            .plants
            .iter()
            .map(|&i| self.plant_state_name(i))
            .collect::<Vec<_>>()
            .join("|")
    }

    /// Ground-truth state of a plant or plant view, by name.
    pub fn plant_or_view_state(&self, name: &str) -> Option<String> {
        if let Some(i) = self.plant_index(name) {
            return Some(self.plant_state_name(i).to_string());
        }
        self.supervisors
            .iter()
            .position(|s| s.view == name)
            .map(|j| self.view_state_name(j))
    }

    fn physically_possible(&self, e: EventId) -> Option<String> {
        self.plants
            .iter()
            .zip(&self.state.plant_states)
            .find(|(p, &q)| p.has_event(e) && p.successor(q, e).is_none())
            .map(|(p, &q)| format!("undefined in {} at {}", p.name(), p.state_name(q)))
    }

    fn supervisor_allows(&self, j: usize, e: EventId) -> bool {
        let s = &self.supervisors[j].automaton;
        !s.has_event(e) || s.successor(self.state.supervisor_states[j], e).is_some()
    }

    /// Events possible in every plant that has them and, when controllable,
    /// allowed by the current estimate of every supervisor that has them.
    pub fn enabled_now(&self) -> Vec<EventId> {
        self.table
            .ids()
            .filter(|&e| self.in_loop(e))
            .filter(|&e| self.physically_possible(e).is_none())
            .filter(|&e| {
                self.table.class(e) != EventClass::Controllable
                    || (0..self.supervisors.len()).all(|j| self.supervisor_allows(j, e))
            })
            .filter(|&e| self.plants.iter().any(|p| p.has_event(e)) || self.table.is_recovery(e))
            .collect()
    }

    fn in_loop(&self, e: EventId) -> bool {
        self.plants.iter().any(|p| p.has_event(e))
            || self.supervisors.iter().any(|s| s.automaton.has_event(e))
    }

    /// No non-recovery event is enabled; with a scope, only events of that
    /// supervisor's alphabet count.
    pub fn deadlocked(&self, scope: Option<usize>) -> bool {
        self.enabled_now().into_iter().all(|e| {
            self.table.is_recovery(e)
                || scope.is_some_and(|j| !self.supervisors[j].automaton.has_event(e))
        })
    }

    /// Executes `e`. Supervisors listed in `hidden_from` do not observe it
    /// and are not consulted for its enablement. The state is unchanged on
    /// error.
    pub fn exec_event(&mut self, e: EventId, hidden_from: &[usize]) -> Result<()> {
        if !self.table.contains(e) || !self.in_loop(e) {
            return Err(Error::input(format!("event #{} is not part of the loop", e.0)));
        }
        let name = self.table.name(e).to_string();
        if !hidden_from.is_empty() && self.table.is_recovery(e) {
            return Err(Error::input(format!("recovery event {name} cannot be hidden")));
        }
        if let Some(&j) = hidden_from.iter().find(|&&j| j >= self.supervisors.len()) {
            return Err(Error::input(format!("no supervisor #{j}")));
        }
        if let Some(reason) = self.physically_possible(e) {
            return Err(Error::PhysicallyImpossible { event: name, reason });
        }
        let observers: Vec<usize> = (0..self.supervisors.len())
            .filter(|j| !hidden_from.contains(j) && self.supervisors[*j].automaton.has_event(e))
            .collect();
        let mut next_sup = self.state.supervisor_states.clone();
        for &j in &observers {
            let s = &self.supervisors[j].automaton;
            match s.successor(next_sup[j], e) {
                Some(t) => next_sup[j] = t,
                None if self.table.class(e) == EventClass::Controllable => {
                    return Err(Error::ControlViolation {
                        event: name,
                        supervisor: s.name().to_string(),
                    })
                }
                None => {
                    return Err(Error::EstimateLost {
                        event: name,
                        supervisor: s.name().to_string(),
                        state: s.state_name(next_sup[j]).to_string(),
                    })
                }
            }
        }
        for (p, q) in self.plants.iter().zip(self.state.plant_states.iter_mut()) {
            if let Some(t) = p.successor(*q, e) {
                *q = t;
            }
        }
        self.state.supervisor_states = next_sup;
        self.state.history.0.push(e);
        let missed: Vec<usize> = hidden_from
            .iter()
            .copied()
            .filter(|&j| self.supervisors[j].automaton.has_event(e))
            .collect();
        if !missed.is_empty() {
            self.state.hidden.push((e, missed));
        }
        Ok(())
    }

    /// Replays the synchronizing word of the scoped supervisor, or the
    /// word of all recovery events for [`Scope::All`], as observed events.
    pub fn recover(&mut self, scope: Scope) -> Result<Word> {
        let word = match scope {
            Scope::All => self.global_word.clone(),
            Scope::Supervisor(j) => {
                let s = self
                    .supervisors
                    .get(j)
                    .ok_or_else(|| Error::Config(format!("no supervisor #{j}")))?;
                s.sync_word
                    .clone()
                    .ok_or_else(|| Error::Config(format!("{} has no synchronizing word", s.name())))?
            }
        };
        let saved = self.state.clone();
        for &e in word.iter() {
            if let Err(err) = self.exec_event(e, &[]) {
                self.state = saved;
                return Err(err);
            }
        }
        Ok(word)
    }

    /// Human-readable snapshot used in transcripts.
    pub fn describe(&self) -> String {
        let mut s = String::from("  plants:");
        for i in 0..self.plants.len() {
            let _ = write!(s, " {}={}", self.plants[i].name(), self.plant_state_name(i));
        }
        s.push_str("\n  supervisors:");
        for j in 0..self.supervisors.len() {
            let _ = write!(s, " {}={}", self.supervisors[j].name(), self.supervisor_state_name(j));
        }
        s.push_str("\n  enabled: ");
        s.push_str(&self.table.format_word(&self.enabled_now()));
        s.push('\n');
        s
    }
}

/// State names match exactly or with the `|` separators left out.
pub fn state_matches(actual: &str, expected: &str) -> bool {
    actual == expected || actual.replace('|', "") == expected
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hide {
    Nobody,
    All,
    Only(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Exec { event: String, hide: Hide },
    Recover(Option<String>),
    AssertPlant { name: String, state: String },
    AssertSup { name: String, state: String },
    AssertEnabled { event: String, enabled: bool },
    AssertDeadlock(Option<String>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scenario {
    /// Directives with their 1-based line numbers.
    pub directives: Vec<(usize, Directive)>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut directives = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let d = match toks.as_slice() {
            ["exec", ev] => Directive::Exec {
                event: ev.to_string(),
                hide: Hide::Nobody,
            },
            ["exec", ev, "hide", "all"] => Directive::Exec {
                event: ev.to_string(),
                hide: Hide::All,
            },
            ["exec", ev, "hide", list] => {
                let names: Vec<String> = list.split(',').map(str::to_string).collect();
                if names.iter().any(|n| n.is_empty()) {
                    return Err(Error::parse(line, "empty supervisor name in hide list"));
                }
                Directive::Exec {
                    event: ev.to_string(),
                    hide: Hide::Only(names),
                }
            }
            ["recover", "all"] => Directive::Recover(None),
            ["recover", sup] => Directive::Recover(Some(sup.to_string())),
            ["assert-plant", name, state] => Directive::AssertPlant {
                name: name.to_string(),
                state: state.to_string(),
            },
            ["assert-sup", name, state] => Directive::AssertSup {
                name: name.to_string(),
                state: state.to_string(),
            },
            ["assert-enabled", ev, flag @ ("true" | "false")] => Directive::AssertEnabled {
                event: ev.to_string(),
                enabled: *flag == "true",
            },
            ["assert-deadlock"] => Directive::AssertDeadlock(None),
            ["assert-deadlock", sup] => Directive::AssertDeadlock(Some(sup.to_string())),
            _ => return Err(Error::parse(line, format!("unrecognized directive {content:?}"))),
        };
        directives.push((line, d));
    }
    Ok(Scenario { directives })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioReport {
    pub transcript: String,
    pub checks: usize,
    /// Line and message of every failed assertion or rejected step.
    pub failures: Vec<(usize, String)>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn resolve_sup(lp: &ClosedLoop, line: usize, name: &str) -> Result<usize> {
    lp.supervisor_index(name)
        .ok_or_else(|| Error::parse(line, format!("unknown supervisor {name}")))
}

fn resolve_event(lp: &ClosedLoop, line: usize, name: &str) -> Result<EventId> {
    lp.table()
        .id(name)
        .ok_or_else(|| Error::parse(line, format!("unknown event {name}")))
}

/// Runs every directive in order. Failed assertions and rejected steps are
/// recorded and the run continues; unresolvable names abort it.
pub fn run_scenario(sc: &Scenario, lp: &mut ClosedLoop) -> Result<ScenarioReport> {
    let mut out = String::new();
    let mut failures = Vec::new();
    let mut checks = 0;
    for (line, d) in &sc.directives {
        let line = *line;
        let mut verdict = |ok: bool, what: String, out: &mut String| {
            checks += 1;
            let _ = writeln!(out, "[{line}] {what}: {}", if ok { "pass" } else { "FAIL" });
            if !ok {
                failures.push((line, what));
            }
        };
        match d {
            Directive::Exec { event, hide } => {
                let e = resolve_event(lp, line, event)?;
                let hidden: Vec<usize> = match hide {
                    Hide::Nobody => Vec::new(),
                    Hide::All => (0..lp.supervisors().len()).collect(),
                    Hide::Only(names) => names
                        .iter()
                        .map(|n| resolve_sup(lp, line, n))
                        .collect::<Result<_>>()?,
                };
                if !hidden.is_empty() && lp.table().is_recovery(e) {
                    return Err(Error::parse(line, format!("recovery event {event} cannot be hidden")));
                }
                let label = match hide {
                    Hide::Nobody => format!("exec {event}"),
                    Hide::All => format!("exec {event} hide all"),
                    Hide::Only(n) => format!("exec {event} hide {}", n.join(",")),
                };
                match lp.exec_event(e, &hidden) {
                    Ok(()) => {
                        let _ = writeln!(out, "[{line}] {label}");
                        out.push_str(&lp.describe());
                    }
                    Err(err) => {
                        let msg = format!("{label} rejected: {err}");
                        let _ = writeln!(out, "[{line}] {msg}");
                        failures.push((line, msg));
                    }
                }
            }
            Directive::Recover(scope) => {
                let sc = match scope {
                    None => Scope::All,
                    Some(n) => Scope::Supervisor(resolve_sup(lp, line, n)?),
                };
                let label = format!("recover {}", scope.as_deref().unwrap_or("all"));
                match lp.recover(sc) {
                    Ok(w) => {
                        let _ = writeln!(out, "[{line}] {label} with {}", lp.table().format_word(&w));
                        out.push_str(&lp.describe());
                    }
                    Err(err) => {
                        let msg = format!("{label} rejected: {err}");
                        let _ = writeln!(out, "[{line}] {msg}");
                        failures.push((line, msg));
                    }
                }
            }
            Directive::AssertPlant { name, state } => {
                let actual = lp
                    .plant_or_view_state(name)
                    .ok_or_else(|| Error::parse(line, format!("unknown plant {name}")))?;
                let ok = state_matches(&actual, state);
                verdict(ok, format!("assert-plant {name} {state} (is {actual})"), &mut out);
            }
            Directive::AssertSup { name, state } => {
                let j = resolve_sup(lp, line, name)?;
                let actual = lp.supervisor_state_name(j).to_string();
                let ok = state_matches(&actual, state);
                verdict(ok, format!("assert-sup {name} {state} (is {actual})"), &mut out);
            }
            Directive::AssertEnabled { event, enabled } => {
                let e = resolve_event(lp, line, event)?;
                let actual = lp.enabled_now().contains(&e);
                verdict(actual == *enabled, format!("assert-enabled {event} {enabled} (is {actual})"), &mut out);
            }
            Directive::AssertDeadlock(scope) => {
                let j = scope.as_deref().map(|n| resolve_sup(lp, line, n)).transpose()?;
                let actual = lp.deadlocked(j);
                let label = match scope {
                    Some(n) => format!("assert-deadlock {n}"),
                    None => "assert-deadlock".to_string(),
                };
                verdict(actual, label, &mut out);
            }
        }
    }
    Ok(ScenarioReport {
        transcript: out,
        checks,
        failures,
    })
}
