//! Bundled case-study models.

use crate::automaton::Automaton;
use crate::error::Result;
use crate::event::EventTable;
use crate::format::{parse_aut, parse_single};
use crate::recovery::{make_recoverable_set, RecoveryBinding};

pub const CERNY4: &str = include_str!("../fixtures/cerny4.aut");
pub const MACHINE_A: &str = include_str!("../fixtures/machine_a.aut");

pub const SMALL_FACTORY_PLANTS: [&str; 3] = [
    include_str!("../fixtures/small_factory/original/M1.aut"),
    include_str!("../fixtures/small_factory/original/M2.aut"),
    include_str!("../fixtures/small_factory/original/M3.aut"),
];
pub const SMALL_FACTORY_SPECS: [&str; 2] = [
    include_str!("../fixtures/small_factory/original/B1.aut"),
    include_str!("../fixtures/small_factory/original/B2.aut"),
];
pub const SMALL_FACTORY_SCENARIO: &str = include_str!("../fixtures/small_factory/attack.scn");

pub const FMS_PLANTS: &str = include_str!("../fixtures/fms/plants.aut");
pub const FMS_SPECS: &str = include_str!("../fixtures/fms/specs.aut");

/// Recovery event names used for the small factory.
pub const SMALL_FACTORY_RECOVERY: [(&str, &str); 5] = [
    ("M1", "r1"),
    ("M2", "r2"),
    ("M3", "r3"),
    ("B1", "rB1"),
    ("B2", "rB2"),
];

pub struct Models {
    pub plants: Vec<Automaton>,
    pub specs: Vec<Automaton>,
}

impl Models {
    pub fn plant_refs(&self) -> Vec<&Automaton> {
        self.plants.iter().collect()
    }

    pub fn spec_refs(&self) -> Vec<&Automaton> {
        self.specs.iter().collect()
    }
}

/// Machines M1..M3 and buffers B1, B2 without recovery events.
pub fn small_factory_original(table: &mut EventTable) -> Result<Models> {
    let plants = SMALL_FACTORY_PLANTS
        .iter()
        .map(|t| parse_single(t, table))
        .collect::<Result<Vec<_>>>()?;
    let specs = SMALL_FACTORY_SPECS
        .iter()
        .map(|t| parse_single(t, table))
        .collect::<Result<Vec<_>>>()?;
    Ok(Models { plants, specs })
}

/// Small factory with recovery events r1..r3, rB1, rB2.
pub fn small_factory(table: &mut EventTable) -> Result<(Models, Vec<RecoveryBinding>)> {
    let orig = small_factory_original(table)?;
    let overrides: Vec<(String, String)> = SMALL_FACTORY_RECOVERY
        .iter()
        .map(|(a, r)| (a.to_string(), r.to_string()))
        .collect();
    let (mut all, bindings) = make_recoverable_set(&orig.plants, &orig.specs, &overrides, table)?;
    let specs = all.split_off(orig.plants.len());
    Ok((Models { plants: all, specs }, bindings))
}

/// Flexible manufacturing system: eight machines and eight buffer
/// specifications, already carrying their recovery events.
pub fn fms(table: &mut EventTable) -> Result<Models> {
    let plants = parse_aut(FMS_PLANTS, table)?;
    let specs = parse_aut(FMS_SPECS, table)?;
    Ok(Models { plants, specs })
}

/// Reference figures for one supervisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expected {
    pub name: &'static str,
    pub states: usize,
    pub transitions: usize,
    pub recovery_transitions: usize,
    pub word_len: usize,
}

const fn row(
    name: &'static str,
    states: usize,
    transitions: usize,
    recovery_transitions: usize,
    word_len: usize,
) -> Expected {
    Expected {
        name,
        states,
        transitions,
        recovery_transitions,
        word_len,
    }
}

/// FMS local modular supervisors, E7 and E8 merged.
pub const FMS_MODULAR: [Expected; 7] = [
    row("S1", 18, 94, 36, 3),
    row("S2", 18, 94, 54, 3),
    row("S3", 18, 90, 54, 3),
    row("S4", 21, 105, 63, 3),
    row("S5", 44, 253, 132, 3),
    row("S6", 44, 253, 132, 3),
    row("S7,8", 260, 2441, 1560, 6),
];

pub const FMS_MONOLITHIC: Expected = row("S", 70_272, 1_434_804, 1_054_080, 16);

/// Specification groups for the FMS with E7 and E8 merged.
pub fn fms_merged_groups() -> Vec<Vec<usize>> {
    vec![vec![0], vec![1], vec![2], vec![3], vec![4], vec![5], vec![6, 7]]
}

pub const SMALL_FACTORY_S1_STATES: [&str; 6] = ["0|0|E", "0|0|F", "0|1|E", "0|1|F", "1|0|E", "1|1|E"];
