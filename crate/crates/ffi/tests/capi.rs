use std::ffi::{c_char, CStr, CString};
use std::ptr;

use recosync_ffi::*;

const FACTORY: [&str; 5] = [
    include_str!("../../core/fixtures/small_factory/original/M1.aut"),
    include_str!("../../core/fixtures/small_factory/original/M2.aut"),
    include_str!("../../core/fixtures/small_factory/original/M3.aut"),
    include_str!("../../core/fixtures/small_factory/original/B1.aut"),
    include_str!("../../core/fixtures/small_factory/original/B2.aut"),
];
const RECOVERY: [&str; 5] = ["r1", "r2", "r3", "rB1", "rB2"];
const SCENARIO: &str = include_str!("../../core/fixtures/small_factory/attack.scn");
const CERNY: &str = include_str!("../../core/fixtures/cerny4.aut");

struct Model(*mut RsModel);

impl Drop for Model {
    fn drop(&mut self) {
        unsafe { rs_model_free(self.0) }
    }
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rs_last_error()) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    rs_string_free(s);
    out
}

/// Loads the small factory and makes every component recoverable. Returns
/// the model and the indices of the recoverable plants and specs.
fn factory() -> (Model, Vec<usize>, Vec<usize>) {
    let m = Model(rs_model_new());
    let mut rec = Vec::new();
    unsafe {
        for (text, r) in FACTORY.iter().zip(RECOVERY) {
            let (mut first, mut count) = (0, 0);
            assert_eq!(rs_model_load(m.0, c(text).as_ptr(), &mut first, &mut count), RsStatus::Ok);
            assert_eq!(count, 1);
            let mut out = 0;
            assert_eq!(rs_model_make_recoverable(m.0, first, c(r).as_ptr(), &mut out), RsStatus::Ok);
            rec.push(out);
        }
    }
    let specs = rec.split_off(3);
    (m, rec, specs)
}

#[test]
fn small_factory_through_the_c_api() {
    let (m, plants, specs) = factory();
    unsafe {
        let (mut first, mut count, mut nc) = (0, 0, -1);
        let st = rs_model_synth(
            m.0,
            plants.as_ptr(),
            plants.len(),
            specs.as_ptr(),
            specs.len(),
            0,
            RsBlocking::RecoveryFree,
            &mut first,
            &mut count,
            &mut nc,
        );
        assert_eq!(st, RsStatus::Ok, "{}", last_error());
        assert_eq!((count, nc), (2, 1));
        let (mut states, mut trans) = (0, 0);
        assert_eq!(rs_model_size(m.0, first, &mut states, &mut trans), RsStatus::Ok);
        assert_eq!((states, trans), (6, 26));
        assert_eq!(rs_model_find(m.0, c("S1").as_ptr()), first as isize);

        let mut w = ptr::null_mut();
        assert_eq!(rs_model_syncword(m.0, first, 1, 0, 20, &mut w), RsStatus::Ok);
        assert_eq!(take(w), "r1 r2 rB1");

        let mut text = ptr::null_mut();
        assert_eq!(rs_model_serialize(m.0, first, &mut text), RsStatus::Ok);
        let golden = include_str!("../../core/fixtures/small_factory/golden/S1.aut");
        assert_eq!(take(text), golden);
    }
}

#[test]
fn scenario_runs_through_the_c_api() {
    let (m, plants, specs) = factory();
    unsafe {
        let (mut checks, mut failures) = (0, 0);
        let mut transcript = ptr::null_mut();
        let st = rs_model_simulate(
            m.0,
            plants.as_ptr(),
            plants.len(),
            specs.as_ptr(),
            specs.len(),
            RsBlocking::RecoveryFree,
            c(SCENARIO).as_ptr(),
            &mut checks,
            &mut failures,
            &mut transcript,
        );
        assert_eq!(st, RsStatus::Ok, "{}", last_error());
        assert_eq!((checks, failures), (14, 0));
        assert!(take(transcript).contains("recover"));
    }
}

#[test]
fn parallel_and_roundtrip() {
    let (m, plants, _) = factory();
    unsafe {
        let mut out = 0;
        assert_eq!(rs_model_parallel(m.0, plants[..2].as_ptr(), 2, &mut out), RsStatus::Ok);
        let (mut states, mut trans) = (0, 0);
        rs_model_size(m.0, out, &mut states, &mut trans);
        assert_eq!(states, 4);
        let mut text = ptr::null_mut();
        rs_model_serialize(m.0, out, &mut text);
        let text = take(text);
        let (mut first, mut count) = (0, 0);
        assert_eq!(rs_model_load(m.0, c(&text).as_ptr(), &mut first, &mut count), RsStatus::Ok);
        let mut again = ptr::null_mut();
        rs_model_serialize(m.0, first, &mut again);
        assert_eq!(take(again), text);
    }
}

#[test]
fn cerny_word_and_bounds() {
    let m = Model(rs_model_new());
    unsafe {
        let mut first = 0;
        assert_eq!(rs_model_load(m.0, c(CERNY).as_ptr(), &mut first, ptr::null_mut()), RsStatus::Ok);
        let mut w = ptr::null_mut();
        assert_eq!(rs_model_syncword(m.0, first, 0, 0, 20, &mut w), RsStatus::Ok);
        assert_eq!(take(w).split(' ').count(), 9);
        assert_eq!(rs_model_syncword(m.0, first, 0, 0, 2, &mut w), RsStatus::TooManyStates);
        assert!(last_error().contains("bound"));
        assert_eq!(rs_model_syncword(m.0, first, 0, 1, 0, &mut w), RsStatus::Ok);
        rs_string_free(w);
    }
}

#[test]
fn error_statuses() {
    let m = Model(rs_model_new());
    unsafe {
        let st = rs_model_load(m.0, c("automaton X\nevents\n  a q\n").as_ptr(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(st, RsStatus::Parse);
        assert!(last_error().contains("line 3"), "{}", last_error());
        assert_eq!(rs_model_len(m.0), 0);

        let mut out = 0;
        assert_eq!(rs_model_parallel(m.0, [7usize].as_ptr(), 1, &mut out), RsStatus::OutOfRange);
        assert_eq!(rs_model_parallel(m.0, ptr::null(), 1, &mut out), RsStatus::NullArgument);
        assert_eq!(rs_model_load(ptr::null_mut(), c("").as_ptr(), ptr::null_mut(), ptr::null_mut()), RsStatus::NullArgument);
        assert_eq!(rs_model_register_event(m.0, c("x").as_ptr(), b'z' as c_char), RsStatus::Input);
        assert_eq!(rs_model_register_event(m.0, c("x").as_ptr(), b'c' as c_char), RsStatus::Ok);
        assert_eq!(rs_model_register_event(m.0, c("x").as_ptr(), b'u' as c_char), RsStatus::Input);
        assert_eq!(rs_model_find(m.0, c("nope").as_ptr()), -1);

        let bad = [0xffu8, 0];
        assert_eq!(rs_model_find(m.0, bad.as_ptr().cast()), -1);
        assert_eq!(
            rs_model_load(m.0, bad.as_ptr().cast(), ptr::null_mut(), ptr::null_mut()),
            RsStatus::InvalidUtf8
        );
    }
}

#[test]
fn make_recoverable_rejects_non_recovery_event() {
    let (m, plants, _) = factory();
    unsafe {
        let mut out = 0;
        // a1 is already controllable, and r1 is already in M1's alphabet.
        assert_eq!(rs_model_make_recoverable(m.0, plants[0], c("a1").as_ptr(), &mut out), RsStatus::Input);
        assert_eq!(rs_model_make_recoverable(m.0, plants[0], c("r1").as_ptr(), &mut out), RsStatus::Input);
    }
}

#[test]
fn no_word_status() {
    let m = Model(rs_model_new());
    let text = "automaton P\nevents\n  a c\nstates\n  0 initial\n  1\ntransitions\n  0 a 0\n  1 a 1\nend\n";
    unsafe {
        let mut first = 0;
        assert_eq!(rs_model_load(m.0, c(text).as_ptr(), &mut first, ptr::null_mut()), RsStatus::Ok, "{}", last_error());
        let mut w = ptr::null_mut();
        assert_eq!(rs_model_syncword(m.0, first, 0, 0, 20, &mut w), RsStatus::NoWord);
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/recosync.h");
    let src = include_str!("../src/lib.rs");
    let mut n = 0;
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
            n += 1;
        }
    }
    assert!(n >= 12);
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/recosync.h");
    match std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output() {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(e) => eprintln!("cc unavailable, header not compiled: {e}"),
    }
}
