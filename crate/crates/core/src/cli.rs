//! Command-line front end. Exit codes: 0 success, 1 usage or parse error,
//! 2 conflict, 3 empty supervisor, 4 failed scenario assertion or failed
//! reproduction check.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::automaton::Automaton;
use crate::closed_loop::{self, ClosedLoop, LoopSupervisor};
use crate::compose::parallel_all;
use crate::error::{Error, Result};
use crate::event::{EventClass, EventTable};
use crate::format::{load_aut, write_aut, AUT_GRAMMAR};
use crate::recovery::{make_recoverable, ComponentKind, RecoveryBinding};
use crate::reproduce;
use crate::sync::{self, SyncTarget, DEFAULT_EXACT_BOUND};
use crate::synthesis::{
    check_nonconflict, supervisor_sync_word, synthesize_modular, synthesize_monolithic, BlockingRule,
    SynthesisOptions, SynthesisResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFLICT: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;
pub const EXIT_ASSERT: i32 = 4;

fn grammar_help() -> String {
    format!(
        "Automaton file (.aut):\n{AUT_GRAMMAR}\n\nScenario file (.scn):\n{}\n\n\
         Exit codes: 0 ok, 1 usage/parse, 2 conflict, 3 empty supervisor, 4 assertion failure.",
        closed_loop::SCN_GRAMMAR
    )
}

#[derive(Parser, Debug)]
#[command(name = "recosync", version, about = "Recoverable supervisor synthesis with synchronizing words")]
#[command(after_help = grammar_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Monolithic,
    Modular,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BlockingArg {
    RecoveryFree,
    Classical,
}

impl From<BlockingArg> for BlockingRule {
    fn from(b: BlockingArg) -> Self {
        match b {
            BlockingArg::RecoveryFree => BlockingRule::RecoveryFree,
            BlockingArg::Classical => BlockingRule::Classical,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Plant,
    Spec,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CaseStudy {
    SmallFactory,
    Fms,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReproMode {
    Modular,
    Monolithic,
    All,
}

#[derive(clap::Args, Debug)]
struct SynthArgs {
    /// Plant automata files
    #[arg(long, num_args = 1.., required = true)]
    plants: Vec<PathBuf>,
    /// Specification automata files
    #[arg(long, num_args = 1.., required = true)]
    specs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "modular")]
    mode: ModeArg,
    /// Specifications synthesized together, comma separated; repeatable
    #[arg(long)]
    merge: Vec<String>,
    #[arg(long, value_enum, default_value = "recovery-free")]
    blocking: BlockingArg,
    /// State bound for exact synchronizing-word search
    #[arg(long, default_value_t = DEFAULT_EXACT_BOUND)]
    bound: usize,
    /// Do not trim supervisors before composing them in the nonconflict check
    #[arg(long)]
    no_left_trim: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synchronous product of all automata in the given files
    Compose {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Output file; standard output when absent
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Add a recovery event resetting each automaton to its initial state
    MakeRecoverable {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Recovery event names, one per automaton in order; default r_<name>
        #[arg(long)]
        event: Vec<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Synchronizing word of an automaton
    Syncword {
        file: PathBuf,
        /// Automaton to use when the file holds several
        #[arg(long)]
        automaton: Option<String>,
        /// Target state; any singleton when absent
        #[arg(long, conflicts_with = "initial")]
        target: Option<String>,
        /// Synchronize to the initial state
        #[arg(long)]
        initial: bool,
        #[arg(long, default_value_t = DEFAULT_EXACT_BOUND)]
        bound: usize,
        /// Use the greedy heuristic
        #[arg(long)]
        greedy: bool,
        /// Only check whether this word synchronizes
        #[arg(long)]
        check: Option<String>,
    },
    /// Synthesize supervisors
    Synth {
        #[command(flatten)]
        args: SynthArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recovery-aware nonconflict test of supervisors
    CheckNonconflict {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        no_left_trim: bool,
    },
    /// Run a scenario against synthesized supervisors
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        args: SynthArgs,
        /// Also write the transcript to this file
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Run a bundled case study and compare with the reference figures
    Reproduce {
        #[arg(value_enum)]
        case: CaseStudy,
        #[arg(long, value_enum, default_value = "all")]
        mode: ReproMode,
        #[arg(long, value_enum, default_value = "classical")]
        blocking: BlockingArg,
        /// Write supervisors and stats here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "recosync: {e}");
            EXIT_USAGE
        }
    }
}

fn load_all(files: &[PathBuf], table: &mut EventTable) -> Result<Vec<Automaton>> {
    let mut all = Vec::new();
    for f in files {
        all.extend(load_aut(f, table)?);
    }
    Ok(all)
}

fn groups_for(specs: &[Automaton], merge: &[String]) -> Result<Vec<Vec<usize>>> {
    let mut merged: Vec<Vec<usize>> = Vec::new();
    for m in merge {
        let idx = m
            .split(',')
            .map(|n| {
                specs
                    .iter()
                    .position(|s| s.name() == n)
                    .ok_or_else(|| Error::input(format!("--merge names unknown specification {n}")))
            })
            .collect::<Result<Vec<_>>>()?;
        merged.push(idx);
    }
    let mut groups = Vec::new();
    for j in 0..specs.len() {
        match merged.iter().find(|g| g.contains(&j)) {
            Some(g) if g.iter().min() == Some(&j) => {
                let mut g = g.clone();
                g.sort();
                groups.push(g);
            }
            Some(_) => {}
            None => groups.push(vec![j]),
        }
    }
    Ok(groups)
}

fn synthesize(args: &SynthArgs) -> Result<(EventTable, Vec<Automaton>, SynthesisResult)> {
    let mut table = EventTable::new();
    let plants = load_all(&args.plants, &mut table)?;
    let specs = load_all(&args.specs, &mut table)?;
    let opts = SynthesisOptions {
        blocking: args.blocking.into(),
        exact_bound: args.bound,
        nonconflict_no_left_trim: args.no_left_trim,
    };
    let pr: Vec<&Automaton> = plants.iter().collect();
    let sr: Vec<&Automaton> = specs.iter().collect();
    let res = match args.mode {
        ModeArg::Monolithic => synthesize_monolithic(&pr, &sr, &table, &opts),
        ModeArg::Modular => synthesize_modular(&pr, &sr, &groups_for(&specs, &args.merge)?, &table, &opts)?,
    };
    Ok((table, plants, res))
}

fn write_result(dir: &Path, res: &SynthesisResult, table: &EventTable) -> Result<()> {
    fs::create_dir_all(dir)?;
    for s in &res.supervisors {
        fs::write(dir.join(format!("{}.aut", s.name)), write_aut(&s.automaton, table))?;
    }
    fs::write(dir.join("stats.tsv"), res.stats_tsv(table))?;
    fs::write(dir.join("nonconflict.txt"), verdict_text(res, table))?;
    Ok(())
}

fn verdict_text(res: &SynthesisResult, table: &EventTable) -> String {
    match &res.nonconflict.counterexample {
        None => "nonconflicting\n".to_string(),
        Some(w) => format!("conflicting\ncounterexample: {}\n", table.format_word(w)),
    }
}

fn synth_exit(res: &SynthesisResult) -> i32 {
    if res.empty_supervisors().next().is_some() {
        EXIT_EMPTY
    } else if !res.nonconflict.nonconflicting {
        EXIT_CONFLICT
    } else {
        EXIT_OK
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Compose { files, out: dest } => {
            let mut table = EventTable::new();
            let all = load_all(&files, &mut table)?;
            let refs: Vec<&Automaton> = all.iter().collect();
            let text = write_aut(&parallel_all(&refs), &table);
            match dest {
                Some(p) => fs::write(p, text)?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Command::MakeRecoverable {
            files,
            kind,
            event,
            out: dir,
        } => {
            let mut table = EventTable::new();
            let all = load_all(&files, &mut table)?;
            if !event.is_empty() && event.len() != all.len() {
                return Err(Error::input(format!(
                    "{} --event names for {} automata",
                    event.len(),
                    all.len()
                )));
            }
            let kind = match kind {
                KindArg::Plant => ComponentKind::Plant,
                KindArg::Spec => ComponentKind::Specification,
            };
            let mut seen = std::collections::HashSet::new();
            fs::create_dir_all(&dir)?;
            let mut manifest = String::new();
            for (i, a) in all.iter().enumerate() {
                if !seen.insert(a.name().to_string()) {
                    return Err(Error::input(format!("duplicate automaton name {}", a.name())));
                }
                let name = event.get(i).cloned().unwrap_or_else(|| format!("r_{}", a.name()));
                if table.id(&name).is_some() {
                    return Err(Error::input(format!("recovery event {name} is already in use")));
                }
                let r = table.register(&name, EventClass::Recovery)?;
                let t = make_recoverable(a, r, &table)?;
                fs::write(dir.join(format!("{}.aut", a.name())), write_aut(&t, &table))?;
                let b = RecoveryBinding {
                    automaton: a.name().to_string(),
                    event: r,
                    kind,
                };
                manifest.push_str(&b.manifest_line(&table));
                manifest.push('\n');
            }
            fs::write(dir.join("bindings.txt"), &manifest)?;
            out.write_all(manifest.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Syncword {
            file,
            automaton,
            target,
            initial,
            bound,
            greedy,
            check,
        } => {
            let mut table = EventTable::new();
            let all = load_aut(&file, &mut table)?;
            let a = match &automaton {
                Some(n) => all
                    .iter()
                    .find(|a| a.name() == n)
                    .ok_or_else(|| Error::input(format!("no automaton {n} in {}", file.display())))?,
                None => all
                    .first()
                    .ok_or_else(|| Error::input(format!("{} holds no automaton", file.display())))?,
            };
            let target = match (&target, initial) {
                (Some(s), _) => SyncTarget::State(
                    a.find_state(s)
                        .ok_or_else(|| Error::input(format!("no state {s} in {}", a.name())))?,
                ),
                (None, true) => SyncTarget::Initial,
                (None, false) => SyncTarget::Any,
            };
            if let Some(w) = check {
                let w = table.parse_word(&w)?;
                let ok = sync::is_sync_word(a, &w, target);
                writeln!(out, "{}", if ok { "synchronizing" } else { "not synchronizing" })?;
                return Ok(EXIT_OK);
            }
            let found = if greedy {
                sync::greedy_sync_word(a, target).map(|w| (w, sync::SyncMethod::GreedyPairwise))
            } else {
                match sync::shortest_sync_word(a, target, bound) {
                    Ok(w) => w.map(|w| (w, sync::SyncMethod::ExactSubsetBfs)),
                    Err(Error::TooManyStates { .. }) => {
                        writeln!(err, "above the exact bound of {bound} states; using the greedy heuristic")?;
                        sync::greedy_sync_word(a, target).map(|w| (w, sync::SyncMethod::GreedyPairwise))
                    }
                    Err(e) => return Err(e),
                }
            };
            match found {
                Some((w, method)) => {
                    let end = a.states().next().and_then(|q| a.run(q, &w));
                    writeln!(out, "word: {}", table.format_word(&w))?;
                    writeln!(out, "length: {}", w.len())?;
                    writeln!(out, "method: {method}")?;
                    if let Some(q) = end {
                        writeln!(out, "state: {}", a.state_name(q))?;
                    }
                }
                None => writeln!(out, "not synchronizing")?,
            }
            Ok(EXIT_OK)
        }
        Command::Synth { args, out: dir } => {
            let (table, _, res) = synthesize(&args)?;
            write_result(&dir, &res, &table)?;
            out.write_all(res.stats_tsv(&table).as_bytes())?;
            out.write_all(verdict_text(&res, &table).as_bytes())?;
            for s in res.empty_supervisors() {
                writeln!(err, "{} is empty", s.name)?;
            }
            Ok(synth_exit(&res))
        }
        Command::CheckNonconflict { files, no_left_trim } => {
            let mut table = EventTable::new();
            let all = load_all(&files, &mut table)?;
            let refs: Vec<&Automaton> = all.iter().collect();
            let nc = check_nonconflict(&refs, &table, no_left_trim);
            match &nc.counterexample {
                None => writeln!(out, "nonconflicting")?,
                Some(w) => writeln!(out, "conflicting\ncounterexample: {}", table.format_word(w))?,
            }
            Ok(if nc.nonconflicting { EXIT_OK } else { EXIT_CONFLICT })
        }
        Command::Simulate {
            scenario,
            args,
            transcript,
        } => {
            let text = fs::read_to_string(&scenario)?;
            let sc = closed_loop::parse_scenario(&text)?;
            let (table, plants, res) = synthesize(&args)?;
            if res.empty_supervisors().next().is_some() {
                writeln!(err, "empty supervisor, nothing to simulate")?;
                return Ok(EXIT_EMPTY);
            }
            let sups = res
                .supervisors
                .iter()
                .map(|s| {
                    let word = s
                        .sync_word
                        .clone()
                        .or_else(|| supervisor_sync_word(&s.automaton, &table, args.bound).map(|(w, _)| w));
                    LoopSupervisor::new(s.automaton.clone(), word, &plants, &table)
                })
                .collect();
            let mut lp = ClosedLoop::new(table, plants, sups)?;
            let rep = closed_loop::run_scenario(&sc, &mut lp)?;
            out.write_all(rep.transcript.as_bytes())?;
            if let Some(p) = transcript {
                fs::write(p, &rep.transcript)?;
            }
            writeln!(out, "{} checks, {} failures", rep.checks, rep.failures.len())?;
            Ok(if rep.passed() { EXIT_OK } else { EXIT_ASSERT })
        }
        Command::Reproduce {
            case,
            mode,
            blocking,
            out: dir,
        } => {
            let opts = SynthesisOptions {
                blocking: blocking.into(),
                ..SynthesisOptions::default()
            };
            let reports = match case {
                CaseStudy::SmallFactory => vec![("small-factory", reproduce::small_factory(&opts)?)],
                CaseStudy::Fms => {
                    let mut v = Vec::new();
                    if matches!(mode, ReproMode::Modular | ReproMode::All) {
                        v.push(("fms-modular", reproduce::fms_modular(&opts)?));
                    }
                    if matches!(mode, ReproMode::Monolithic | ReproMode::All) {
                        v.push(("fms-monolithic", reproduce::fms_monolithic(&opts)?));
                    }
                    v
                }
            };
            let mut ok = true;
            for (name, rep) in &reports {
                out.write_all(rep.text.as_bytes())?;
                out.write_all(reproduce::summary(rep).as_bytes())?;
                ok &= rep.ok();
                if let (Some(dir), Some(res)) = (&dir, &rep.result) {
                    write_result(&dir.join(name), res, &rep.table)?;
                }
            }
            Ok(if ok { EXIT_OK } else { EXIT_ASSERT })
        }
    }
}
