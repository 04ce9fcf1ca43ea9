use std::fs;
use std::path::{Path, PathBuf};

use recosync::cli::{run, EXIT_ASSERT, EXIT_CONFLICT, EXIT_EMPTY, EXIT_OK, EXIT_USAGE};
use recosync::closed_loop::SCN_GRAMMAR;
use recosync::format::{parse_aut, AUT_GRAMMAR};
use recosync::EventTable;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn recosync(args: &[&str]) -> Out {
    let mut o = Vec::new();
    let mut e = Vec::new();
    let mut argv = vec!["recosync"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut o, &mut e);
    Out {
        code,
        stdout: String::from_utf8(o).unwrap(),
        stderr: String::from_utf8(e).unwrap(),
    }
}

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn fx(rel: &str) -> String {
    fixture(rel).to_string_lossy().into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn read(p: impl AsRef<Path>) -> String {
    fs::read_to_string(p).unwrap()
}

const PLANTS: [&str; 3] = ["M1", "M2", "M3"];
const SPECS: [&str; 2] = ["B1", "B2"];

fn recoverable_args(v: &mut Vec<String>) {
    v.push("--plants".into());
    v.extend(PLANTS.iter().map(|n| fx(&format!("small_factory/recoverable/{n}.aut"))));
    v.push("--specs".into());
    v.extend(SPECS.iter().map(|n| fx(&format!("small_factory/recoverable/{n}.aut"))));
}

fn call(v: &[String]) -> Out {
    let refs: Vec<&str> = v.iter().map(String::as_str).collect();
    recosync(&refs)
}

#[test]
fn help_carries_both_grammars() {
    let o = recosync(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains(AUT_GRAMMAR));
    assert!(o.stdout.contains(SCN_GRAMMAR));
    assert!(o.stdout.contains("4 assertion failure"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(recosync(&[]).code, EXIT_USAGE);
    assert_eq!(recosync(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(recosync(&["syncword"]).code, EXIT_USAGE);
    let o = recosync(&["syncword", "/nonexistent/x.aut"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.starts_with("recosync:"));
}

#[test]
fn parse_error_exits_1_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.aut");
    fs::write(&f, "automaton X\nevents\n  a c\nstates\n  0 initial\ntransitions\n  0 b 0\nend\n").unwrap();
    let o = recosync(&["compose", &s(&f)]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("line 7"), "{}", o.stderr);
}

#[test]
fn make_recoverable_reproduces_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let pdir = dir.path().join("p");
    let sdir = dir.path().join("s");
    let mut v: Vec<String> = vec!["make-recoverable".into(), "--kind".into(), "plant".into()];
    for (n, r) in PLANTS.iter().zip(["r1", "r2", "r3"]) {
        v.push(fx(&format!("small_factory/original/{n}.aut")));
        v.extend(["--event".into(), r.into()]);
    }
    v.extend(["--out".into(), s(&pdir)]);
    assert_eq!(call(&v).code, EXIT_OK);
    let mut v: Vec<String> = vec!["make-recoverable".into(), "--kind".into(), "spec".into()];
    for (n, r) in SPECS.iter().zip(["rB1", "rB2"]) {
        v.push(fx(&format!("small_factory/original/{n}.aut")));
        v.extend(["--event".into(), r.into()]);
    }
    v.extend(["--out".into(), s(&sdir)]);
    let o = call(&v);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout, "B1 rB1 spec\nB2 rB2 spec\n");

    for n in PLANTS {
        assert_eq!(read(pdir.join(format!("{n}.aut"))), read(fixture(&format!("small_factory/recoverable/{n}.aut"))));
    }
    for n in SPECS {
        assert_eq!(read(sdir.join(format!("{n}.aut"))), read(fixture(&format!("small_factory/recoverable/{n}.aut"))));
    }
    let bindings = read(pdir.join("bindings.txt")) + &read(sdir.join("bindings.txt"));
    assert_eq!(bindings, read(fixture("small_factory/recoverable/bindings.txt")));
}

#[test]
fn make_recoverable_default_names_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = recosync(&["make-recoverable", &fx("machine_a.aut"), "--kind", "plant", "--out", &s(dir.path())]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout, "A r_A plant\n");
    assert!(read(dir.path().join("A.aut")).contains("  r_A r\n"));
    let o = recosync(&["make-recoverable", &fx("machine_a.aut"), "--kind", "plant", "--event", "a", "--out", &s(dir.path())]);
    assert_eq!(o.code, EXIT_USAGE);
    let o = recosync(&["make-recoverable", &fx("machine_a.aut"), "--kind", "plant", "--event", "x", "--event", "y"]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn synth_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = vec!["synth".to_string()];
    recoverable_args(&mut v);
    v.extend(["--out".into(), s(dir.path())]);
    let o = call(&v);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    for f in ["S1.aut", "S2.aut", "stats.tsv"] {
        assert_eq!(read(dir.path().join(f)), read(fixture(&format!("small_factory/golden/{f}"))), "{f}");
    }
    assert_eq!(read(dir.path().join("nonconflict.txt")), "nonconflicting\n");
    assert!(o.stdout.starts_with("name\tstates\ttransitions\trecovery-transitions\tsync-word-length\tsync-word\n"));
}

#[test]
fn synth_monolithic_small_factory() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = vec!["synth".to_string(), "--mode".into(), "monolithic".into()];
    recoverable_args(&mut v);
    v.extend(["--out".into(), s(dir.path())]);
    assert_eq!(call(&v).code, EXIT_OK);
    let mut t = EventTable::new();
    let sup = parse_aut(&read(dir.path().join("S.aut")), &mut t).unwrap();
    assert_eq!(sup.len(), 1);
    assert!(sup[0].state_count() > 0);
}

const BAD_PLANT: &str = "\
automaton P
events
  go c
  crash u
states
  0 initial marked
  1
transitions
  0 crash 1
  0 go 0
end
";

const NO_CRASH: &str = "\
automaton K
events
  crash u
states
  0 initial marked
transitions
end
";

#[test]
fn empty_supervisor_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("P.aut"), BAD_PLANT).unwrap();
    fs::write(dir.path().join("K.aut"), NO_CRASH).unwrap();
    let out = dir.path().join("out");
    let o = recosync(&[
        "synth",
        "--plants",
        &s(&dir.path().join("P.aut")),
        "--specs",
        &s(&dir.path().join("K.aut")),
        "--out",
        &s(&out),
    ]);
    assert_eq!(o.code, EXIT_EMPTY);
    assert!(o.stderr.contains("S1 is empty"));
    assert!(out.join("S1.aut").exists());
}

const A_THEN_B: &str = "\
automaton X
events
  a c
  b c
states
  0 initial
  1
  2 marked
transitions
  0 a 1
  1 b 2
end
";

const B_THEN_A: &str = "\
automaton Y
events
  a c
  b c
states
  0 initial
  1
  2 marked
transitions
  0 b 1
  1 a 2
end
";

#[test]
fn conflict_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("X.aut");
    let y = dir.path().join("Y.aut");
    fs::write(&x, A_THEN_B).unwrap();
    fs::write(&y, B_THEN_A).unwrap();
    let o = recosync(&["check-nonconflict", &s(&x), &s(&y)]);
    assert_eq!(o.code, EXIT_CONFLICT);
    assert!(o.stdout.starts_with("conflicting"));
    let o = recosync(&["check-nonconflict", &s(&x)]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout, "nonconflicting\n");
}

#[test]
fn golden_supervisors_are_nonconflicting() {
    let o = recosync(&["check-nonconflict", &fx("small_factory/golden/S1.aut"), &fx("small_factory/golden/S2.aut")]);
    assert_eq!(o.code, EXIT_OK);
}

#[test]
fn syncword_outputs() {
    let o = recosync(&["syncword", &fx("machine_a.aut")]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout, "word: c\nlength: 1\nmethod: exact-subset-bfs\nstate: 0\n");

    let o = recosync(&["syncword", &fx("cerny4.aut")]);
    assert!(o.stdout.contains("length: 9\n"), "{}", o.stdout);

    let o = recosync(&["syncword", &fx("cerny4.aut"), "--bound", "3"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stderr.contains("greedy"));
    assert!(o.stdout.contains("method: greedy"), "{}", o.stdout);

    let o = recosync(&["syncword", &fx("machine_a.aut"), "--check", "a b"]);
    assert_eq!(o.stdout, "not synchronizing\n");
    let o = recosync(&["syncword", &fx("machine_a.aut"), "--check", "c", "--initial"]);
    assert_eq!(o.stdout, "synchronizing\n");
    let o = recosync(&["syncword", &fx("machine_a.aut"), "--target", "9"]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn compose_writes_product() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("g.aut");
    let o = recosync(&[
        "compose",
        &fx("small_factory/original/M1.aut"),
        &fx("small_factory/original/M2.aut"),
        "-o",
        &s(&dest),
    ]);
    assert_eq!(o.code, EXIT_OK);
    let mut t = EventTable::new();
    let g = parse_aut(&read(&dest), &mut t).unwrap();
    assert_eq!(g[0].name(), "M1||M2");
    assert_eq!((g[0].state_count(), g[0].transition_count()), (4, 8));
    let o = recosync(&["compose", &fx("small_factory/original/M1.aut"), &fx("small_factory/original/M2.aut")]);
    assert_eq!(o.stdout, read(&dest));
}

#[test]
fn simulate_bundled_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.txt");
    let mut v = vec!["simulate".to_string(), fx("small_factory/attack.scn")];
    recoverable_args(&mut v);
    v.extend(["--transcript".into(), s(&log)]);
    let o = call(&v);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    assert!(o.stdout.ends_with("14 checks, 0 failures\n"));
    assert!(o.stdout.starts_with(&read(&log)));
}

#[test]
fn simulate_failed_assertion_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("wrong.scn");
    fs::write(&f, "exec a1\nassert-sup S1 00E\nexec a2\n").unwrap();
    let mut v = vec!["simulate".to_string(), s(&f)];
    recoverable_args(&mut v);
    let o = call(&v);
    assert_eq!(o.code, EXIT_ASSERT);
    assert!(o.stdout.ends_with("1 checks, 2 failures\n"), "{}", o.stdout);
}

#[test]
fn simulate_unknown_name_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.scn");
    fs::write(&f, "exec a1\nexec zz\n").unwrap();
    let mut v = vec!["simulate".to_string(), s(&f)];
    recoverable_args(&mut v);
    let o = call(&v);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("line 2"));
}

#[test]
fn reproduce_small_factory() {
    let dir = tempfile::tempdir().unwrap();
    let o = recosync(&["reproduce", "small-factory", "--out", &s(dir.path())]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    assert!(o.stdout.contains("0 flagged, 0 failed"));
    assert_eq!(
        read(dir.path().join("small-factory/stats.tsv")),
        read(fixture("small_factory/golden/stats.tsv"))
    );
}
