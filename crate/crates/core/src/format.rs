//! Plain-text `.aut` automaton format.
//!
//! ```text
//! automaton <name>
//! events
//!   <event-id> <c|u|r>        # controllable|uncontrollable|recovery
//! states
//!   <state-id> [initial] [marked]
//! transitions
//!   <src> <event-id> <dst>
//! end
//! ```
//!
//! A file may hold several `automaton ... end` blocks. Serialization lists
//! events in table order, states in lexicographic order, and transitions by
//! source name then event-table order, so output is byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use crate::automaton::{Automaton, AutomatonBuilder, StateId};
use crate::error::{Error, Result};
use crate::event::{EventClass, EventTable};

pub const AUT_GRAMMAR: &str = "\
automaton <name>
events
  <event-id> <c|u|r>        # controllable|uncontrollable|recovery
states
  <state-id> [initial] [marked]
transitions
  <src> <event-id> <dst>
end";

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    Events,
    States,
    Transitions,
}

/// Parses every automaton block in `text`, registering events in `table`.
pub fn parse_aut(text: &str, table: &mut EventTable) -> Result<Vec<Automaton>> {
    let mut out = Vec::new();
    let mut current: Option<(AutomatonBuilder, Section, usize)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some((builder, section, _)) = current.as_mut() else {
            match toks.as_slice() {
                ["automaton", name] => {
                    if !crate::event::is_symbol(name) {
                        return Err(Error::parse(line, format!("invalid automaton name {name:?}")));
                    }
                    current = Some((AutomatonBuilder::new(*name), Section::Header, line));
                }
                _ => return Err(Error::parse(line, "expected `automaton <name>`")),
            }
            continue;
        };
        match toks.as_slice() {
            ["events"] => *section = Section::Events,
            ["states"] => *section = Section::States,
            ["transitions"] => *section = Section::Transitions,
            ["end"] => {
                let (builder, _, start) = current.take().expect("open block");
                out.push(builder.build().map_err(|e| Error::parse(start, e.to_string()))?);
            }
            _ => match *section {
                Section::Header => {
                    return Err(Error::parse(line, "expected a section keyword"));
                }
                Section::Events => {
                    let [name, tag] = toks.as_slice() else {
                        return Err(Error::parse(line, "expected `<event-id> <c|u|r>`"));
                    };
                    let class = EventClass::from_tag(tag)
                        .ok_or_else(|| Error::parse(line, format!("unknown event class {tag:?}")))?;
                    let id = table
                        .register(name, class)
                        .map_err(|e| Error::parse(line, e.to_string()))?;
                    builder.event(id);
                }
                Section::States => {
                    let q = builder
                        .add_state(toks[0])
                        .map_err(|e| Error::parse(line, e.to_string()))?;
                    for flag in &toks[1..] {
                        match *flag {
                            "initial" => {
                                builder
                                    .set_initial(q)
                                    .map_err(|e| Error::parse(line, e.to_string()))?;
                            }
                            "marked" => {
                                builder.set_marked(q);
                            }
                            other => {
                                return Err(Error::parse(line, format!("unknown state flag {other:?}")))
                            }
                        }
                    }
                }
                Section::Transitions => {
                    let [src, ev, dst] = toks.as_slice() else {
                        return Err(Error::parse(line, "expected `<src> <event-id> <dst>`"));
                    };
                    let lookup = |name: &str| {
                        builder
                            .lookup(name)
                            .ok_or_else(|| Error::parse(line, format!("undeclared state {name}")))
                    };
                    let s = lookup(src)?;
                    let d = lookup(dst)?;
                    let e = table
                        .id(ev)
                        .ok_or_else(|| Error::parse(line, format!("undeclared event {ev}")))?;
                    builder.add_transition(s, e, d);
                }
            },
        }
    }
    if let Some((_, _, start)) = current {
        return Err(Error::parse(start, "automaton block without `end`"));
    }
    Ok(out)
}

/// Parses a block that must contain exactly one automaton.
pub fn parse_single(text: &str, table: &mut EventTable) -> Result<Automaton> {
    let mut all = parse_aut(text, table)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        n => Err(Error::input(format!("expected one automaton, found {n}"))),
    }
}

pub fn load_aut(path: &Path, table: &mut EventTable) -> Result<Vec<Automaton>> {
    let text = std::fs::read_to_string(path)?;
    parse_aut(&text, table).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

pub fn write_aut(a: &Automaton, table: &EventTable) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "automaton {}", a.name());
    s.push_str("events\n");
    for &e in a.alphabet() {
        let _ = writeln!(s, "  {} {}", table.name(e), table.class(e).tag());
    }
    s.push_str("states\n");
    let mut order: Vec<StateId> = a.states().collect();
    order.sort_by(|x, y| a.state_name(*x).cmp(a.state_name(*y)));
    for &q in &order {
        s.push_str("  ");
        s.push_str(a.state_name(q));
        if q == a.initial() {
            s.push_str(" initial");
        }
        if a.is_marked(q) {
            s.push_str(" marked");
        }
        s.push('\n');
    }
    s.push_str("transitions\n");
    for &q in &order {
        for &(e, t) in a.edges_from(q) {
            let _ = writeln!(
                s,
                "  {} {} {}",
                a.state_name(q),
                table.name(e),
                a.state_name(t)
            );
        }
    }
    s.push_str("end\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MACHINE: &str = "\
# two-state machine
automaton M1
events
  a1 c
  b1 u
  r1 r
states
  0 initial marked
  1
transitions
  0 a1 1
  1 b1 0   # finish
  0 r1 0
  1 r1 0
end
";

    #[test]
    fn parse_and_write_round_trip() {
        let mut t = EventTable::new();
        let a = parse_single(MACHINE, &mut t).unwrap();
        assert_eq!(a.state_count(), 2);
        assert_eq!(a.transition_count(), 4);
        assert_eq!(t.class(t.id("r1").unwrap()), EventClass::Recovery);
        let text = write_aut(&a, &t);
        let mut t2 = EventTable::new();
        let b = parse_single(&text, &mut t2).unwrap();
        assert_eq!(write_aut(&b, &t2), text);
    }

    #[test]
    fn serialization_is_canonical() {
        let mut t = EventTable::new();
        let a = parse_single(MACHINE, &mut t).unwrap();
        let expected = "\
automaton M1
events
  a1 c
  b1 u
  r1 r
states
  0 initial marked
  1
transitions
  0 a1 1
  0 r1 0
  1 b1 0
  1 r1 0
end
";
        assert_eq!(write_aut(&a, &t), expected);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let mut t = EventTable::new();
        let bad = MACHINE.replace("1 b1 0", "1 zz 0");
        match parse_aut(&bad, &mut t) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 12),
            other => panic!("unexpected {other:?}"),
        }
        let mut t = EventTable::new();
        let two_init = MACHINE.replace("  1\n", "  1 initial\n");
        assert!(parse_aut(&two_init, &mut t).is_err());
        let mut t = EventTable::new();
        assert!(parse_aut("automaton X\nevents\n", &mut t).is_err());
    }

    #[test]
    fn class_conflict_across_files_is_rejected() {
        let mut t = EventTable::new();
        parse_single(MACHINE, &mut t).unwrap();
        let other = MACHINE.replace("M1", "M9").replace("b1 u", "b1 c");
        assert!(parse_aut(&other, &mut t).is_err());
    }
}
