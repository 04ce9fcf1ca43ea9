//! C interface to recosync.
//!
//! A model handle owns one event table and a growing list of automata.
//! Automata are addressed by their index in that list; every operation that
//! produces an automaton appends it and reports the new index. Strings
//! returned through out-pointers are owned by the caller and released with
//! `rs_string_free`. After a non-zero status, `rs_last_error` describes the
//! failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::slice;

use recosync::closed_loop::{parse_scenario, run_scenario, ClosedLoop};
use recosync::compose::parallel_all;
use recosync::format::{parse_aut, write_aut};
use recosync::recovery::make_recoverable;
use recosync::sync::{greedy_sync_word, shortest_sync_word, SyncTarget};
use recosync::synthesis::{
    singleton_groups, synthesize_modular, synthesize_monolithic, BlockingRule, SynthesisOptions,
};
use recosync::{Automaton, Error, EventClass, EventTable};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Input = 4,
    OutOfRange = 5,
    TooManyStates = 6,
    NoWord = 7,
    Simulation = 8,
    Io = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsBlocking {
    RecoveryFree = 0,
    Classical = 1,
}

/// Opaque model handle.
pub struct RsModel {
    table: EventTable,
    automata: Vec<Automaton>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: RsStatus, msg: impl Into<String>) -> RsStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> RsStatus {
    let status = match &err {
        Error::Parse { .. } => RsStatus::Parse,
        Error::TooManyStates { .. } => RsStatus::TooManyStates,
        Error::Io(_) => RsStatus::Io,
        Error::PhysicallyImpossible { .. }
        | Error::ControlViolation { .. }
        | Error::EstimateLost { .. } => RsStatus::Simulation,
        Error::Input(_) | Error::Config(_) => RsStatus::Input,
    };
    fail(status, err.to_string())
}

macro_rules! check {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

unsafe fn model<'a>(m: *mut RsModel) -> Result<&'a mut RsModel, RsStatus> {
    m.as_mut()
        .ok_or_else(|| fail(RsStatus::NullArgument, "null model handle"))
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, RsStatus> {
    if s.is_null() {
        return Err(fail(RsStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(RsStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn indices<'a>(idx: *const usize, n: usize) -> Result<&'a [usize], RsStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if idx.is_null() {
        return Err(fail(RsStatus::NullArgument, "null index array"));
    }
    Ok(slice::from_raw_parts(idx, n))
}

impl RsModel {
    fn get(&self, i: usize) -> Result<&Automaton, RsStatus> {
        self.automata.get(i).ok_or_else(|| {
            fail(
                RsStatus::OutOfRange,
                format!("automaton index {i} out of range ({} loaded)", self.automata.len()),
            )
        })
    }

    fn pick(&self, idx: &[usize]) -> Result<Vec<&Automaton>, RsStatus> {
        idx.iter().map(|&i| self.get(i)).collect()
    }

    fn push(&mut self, a: Automaton) -> usize {
        self.automata.push(a);
        self.automata.len() - 1
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> RsStatus {
    if out.is_null() {
        return fail(RsStatus::NullArgument, "null output pointer");
    }
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            RsStatus::Ok
        }
        Err(_) => fail(RsStatus::Input, "output contains a NUL byte"),
    }
}

unsafe fn put<T>(out: *mut T, v: T) {
    if !out.is_null() {
        *out = v;
    }
}

/// Message for the last failed call on this thread. Valid until the next
/// call that fails.
#[no_mangle]
pub extern "C" fn rs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn rs_model_new() -> *mut RsModel {
    Box::into_raw(Box::new(RsModel {
        table: EventTable::new(),
        automata: Vec::new(),
    }))
}

/// # Safety
/// `m` must come from `rs_model_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rs_model_free(m: *mut RsModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Parses `.aut` text and appends its automata. `first` receives the index
/// of the first one and `count` how many were read.
///
/// # Safety
/// `m` is a live handle, `aut` a NUL-terminated string, out-pointers null
/// or writable.
#[no_mangle]
pub unsafe extern "C" fn rs_model_load(
    m: *mut RsModel,
    aut: *const c_char,
    first: *mut usize,
    count: *mut usize,
) -> RsStatus {
    let m = check!(model(m));
    let aut = check!(text(aut));
    let parsed = match parse_aut(aut, &mut m.table) {
        Ok(v) => v,
        Err(e) => return from_error(e),
    };
    put(first, m.automata.len());
    put(count, parsed.len());
    m.automata.extend(parsed);
    RsStatus::Ok
}

/// # Safety
/// `m` is a live handle.
#[no_mangle]
pub unsafe extern "C" fn rs_model_len(m: *const RsModel) -> usize {
    m.as_ref().map_or(0, |m| m.automata.len())
}

/// Index of the last automaton called `name`, or -1.
///
/// # Safety
/// `m` is a live handle, `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rs_model_find(m: *const RsModel, name: *const c_char) -> isize {
    let (Some(m), Ok(name)) = (m.as_ref(), text(name)) else {
        return -1;
    };
    m.automata
        .iter()
        .rposition(|a| a.name() == name)
        .map_or(-1, |i| i as isize)
}

/// Registers an event. `class` is one of 'c', 'u', 'r'.
///
/// # Safety
/// `m` is a live handle, `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rs_model_register_event(
    m: *mut RsModel,
    name: *const c_char,
    class: c_char,
) -> RsStatus {
    let m = check!(model(m));
    let name = check!(text(name));
    let class = match class as u8 {
        b'c' => EventClass::Controllable,
        b'u' => EventClass::Uncontrollable,
        b'r' => EventClass::Recovery,
        other => return fail(RsStatus::Input, format!("unknown event class {:?}", other as char)),
    };
    match m.table.register(name, class) {
        Ok(_) => RsStatus::Ok,
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `m` is a live handle, out-pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn rs_model_size(
    m: *const RsModel,
    index: usize,
    states: *mut usize,
    transitions: *mut usize,
) -> RsStatus {
    let Some(m) = m.as_ref() else {
        return fail(RsStatus::NullArgument, "null model handle");
    };
    let a = check!(m.get(index));
    put(states, a.state_count());
    put(transitions, a.transition_count());
    RsStatus::Ok
}

/// Serializes one automaton in `.aut` form, event table first.
///
/// # Safety
/// `m` is a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_model_serialize(
    m: *const RsModel,
    index: usize,
    out: *mut *mut c_char,
) -> RsStatus {
    let Some(m) = m.as_ref() else {
        return fail(RsStatus::NullArgument, "null model handle");
    };
    let a = check!(m.get(index));
    put_string(out, write_aut(a, &m.table))
}

/// Synchronous product of the listed automata.
///
/// # Safety
/// `m` is a live handle, `idx` points to `n` indices, `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rs_model_parallel(
    m: *mut RsModel,
    idx: *const usize,
    n: usize,
    out: *mut usize,
) -> RsStatus {
    let m = check!(model(m));
    let idx = check!(indices(idx, n));
    if idx.is_empty() {
        return fail(RsStatus::Input, "product of zero automata");
    }
    let p = parallel_all(&check!(m.pick(idx)));
    put(out, m.push(p));
    RsStatus::Ok
}

/// Adds recovery event `event` to automaton `index`. The event is
/// registered as a recovery event when unknown.
///
/// # Safety
/// `m` is a live handle, `event` a NUL-terminated string, `out` null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rs_model_make_recoverable(
    m: *mut RsModel,
    index: usize,
    event: *const c_char,
    out: *mut usize,
) -> RsStatus {
    let m = check!(model(m));
    let event = check!(text(event));
    check!(m.get(index));
    let r = match m.table.register(event, EventClass::Recovery) {
        Ok(r) => r,
        Err(e) => return from_error(e),
    };
    match make_recoverable(&m.automata[index], r, &m.table) {
        Ok(a) => {
            put(out, m.push(a));
            RsStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Shortest synchronizing word of automaton `index` (exact search up to
/// `bound` states), or a greedy one when `greedy` is non-zero. With
/// `to_initial` non-zero the word must end in the initial state. Returns
/// `NoWord` when none exists.
///
/// # Safety
/// `m` is a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_model_syncword(
    m: *const RsModel,
    index: usize,
    to_initial: i32,
    greedy: i32,
    bound: usize,
    out: *mut *mut c_char,
) -> RsStatus {
    let Some(m) = m.as_ref() else {
        return fail(RsStatus::NullArgument, "null model handle");
    };
    let a = check!(m.get(index));
    let target = if to_initial != 0 {
        SyncTarget::Initial
    } else {
        SyncTarget::Any
    };
    let word = if greedy != 0 {
        greedy_sync_word(a, target)
    } else {
        match shortest_sync_word(a, target, bound) {
            Ok(w) => w,
            Err(e) => return from_error(e),
        }
    };
    match word {
        Some(w) => put_string(out, m.table.format_word(&w)),
        None => fail(RsStatus::NoWord, format!("{} has no synchronizing word", a.name())),
    }
}

/// Local modular synthesis, one supervisor per specification (monolithic
/// when `monolithic` is non-zero). Supervisors are appended; `first` and
/// `count` locate them and `nonconflicting` receives the verdict (1 or 0).
///
/// # Safety
/// `m` is a live handle, index arrays hold the stated number of entries,
/// out-pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn rs_model_synth(
    m: *mut RsModel,
    plants: *const usize,
    n_plants: usize,
    specs: *const usize,
    n_specs: usize,
    monolithic: i32,
    blocking: RsBlocking,
    first: *mut usize,
    count: *mut usize,
    nonconflicting: *mut i32,
) -> RsStatus {
    let m = check!(model(m));
    let p = check!(indices(plants, n_plants));
    let s = check!(indices(specs, n_specs));
    let opts = SynthesisOptions {
        blocking: match blocking {
            RsBlocking::RecoveryFree => BlockingRule::RecoveryFree,
            RsBlocking::Classical => BlockingRule::Classical,
        },
        ..SynthesisOptions::default()
    };
    let pa = check!(m.pick(p));
    let sa = check!(m.pick(s));
    let res = if monolithic != 0 {
        synthesize_monolithic(&pa, &sa, &m.table, &opts)
    } else {
        match synthesize_modular(&pa, &sa, &singleton_groups(sa.len()), &m.table, &opts) {
            Ok(r) => r,
            Err(e) => return from_error(e),
        }
    };
    put(first, m.automata.len());
    put(count, res.supervisors.len());
    put(nonconflicting, res.nonconflict.nonconflicting as i32);
    for sup in res.supervisors {
        m.automata.push(sup.automaton);
    }
    RsStatus::Ok
}

/// Synthesizes local modular supervisors for the given plants and
/// specifications and runs a `.scn` scenario against them. `checks` and
/// `failures` receive the counts; `transcript` (optional) the run log.
///
/// # Safety
/// `m` is a live handle, index arrays hold the stated number of entries,
/// `scenario` a NUL-terminated string, out-pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn rs_model_simulate(
    m: *const RsModel,
    plants: *const usize,
    n_plants: usize,
    specs: *const usize,
    n_specs: usize,
    blocking: RsBlocking,
    scenario: *const c_char,
    checks: *mut usize,
    failures: *mut usize,
    transcript: *mut *mut c_char,
) -> RsStatus {
    let Some(m) = m.as_ref() else {
        return fail(RsStatus::NullArgument, "null model handle");
    };
    let p = check!(indices(plants, n_plants));
    let s = check!(indices(specs, n_specs));
    let sc = check!(text(scenario));
    let opts = SynthesisOptions {
        blocking: match blocking {
            RsBlocking::RecoveryFree => BlockingRule::RecoveryFree,
            RsBlocking::Classical => BlockingRule::Classical,
        },
        ..SynthesisOptions::default()
    };
    let pa = check!(m.pick(p));
    let sa = check!(m.pick(s));
    let run = (|| {
        let sc = parse_scenario(sc)?;
        let res = synthesize_modular(&pa, &sa, &singleton_groups(sa.len()), &m.table, &opts)?;
        let owned: Vec<Automaton> = pa.iter().map(|a| (*a).clone()).collect();
        let mut lp = ClosedLoop::from_synthesis(m.table.clone(), owned, &res)?;
        run_scenario(&sc, &mut lp)
    })();
    let rep = match run {
        Ok(r) => r,
        Err(e) => return from_error(e),
    };
    put(checks, rep.checks);
    put(failures, rep.failures.len());
    if !transcript.is_null() {
        return put_string(transcript, rep.transcript);
    }
    RsStatus::Ok
}
