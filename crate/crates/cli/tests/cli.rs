use std::path::Path;
use std::process::{Command, Output};

fn skyrme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skyrme")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn identical_seeds_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (path(dir.path(), "a"), path(dir.path(), "b"), path(dir.path(), "c"));
    for (out, seed, workers) in [(&a, "7", "1"), (&b, "7", "3"), (&c, "8", "2")] {
        let o = skyrme(&["gen", "--group", "su(3)", "--n", "6", "--kind", "random", "--seed", seed, "--workers", workers, "--out", out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let read = |p: &str| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn hedgehog_reports_unit_charge() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "h.skyf");
    assert!(skyrme(&["gen", "--group", "su2", "--n", "24", "--kind", "hedgehog", "--out", &f]).status.success());
    let o = skyrme(&["invariants", "--input", &f]);
    assert!(o.status.success());
    let line = stdout(&o);
    assert!(line.starts_with("alpha=(0,0,0) "), "{line}");
    assert!(line.contains(" c=(1) "), "{line}");
}

#[test]
fn zero_winding_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "w.skyf");
    assert!(skyrme(&["gen", "--group", "su2", "--n", "8", "--kind", "winding", "--winding", "0,0,0", "--out", &f]).status.success());
    let o = skyrme(&["energy", "--input", &f]);
    assert_eq!(stdout(&o).trim(), "energy=0.000000000000000e0");
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.cfg");
    let f = path(dir.path(), "w.skyf");
    std::fs::write(&cfg, format!("# so(3) loop\ngroup = so3\nn = 8\nkind = winding\nwinding = 1,0,0\nout = {f}\n")).unwrap();
    assert!(skyrme(&["--config", &cfg, "gen"]).status.success());
    let o = skyrme(&["invariants", "--input", &f]);
    assert!(stdout(&o).starts_with("alpha=(1,0,0) "), "{}", stdout(&o));
    // A flag beats the file.
    assert!(skyrme(&["--config", &cfg, "gen", "--winding", "2,0,0", "--n", "16"]).status.success());
    let o = skyrme(&["invariants", "--input", &f]);
    assert!(stdout(&o).starts_with("alpha=(0,0,0) "), "{}", stdout(&o));
}

#[test]
fn potential_round_trip_through_holonomy_and_develop() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "h.skya");
    let d = path(dir.path(), "d.skyf");
    assert!(skyrme(&["gen", "--group", "su2", "--n", "16", "--kind", "hedgehog", "--potential", "--out", &a]).status.success());
    let h = skyrme(&["holonomy", "--input", &a]);
    assert!(h.status.success());
    assert_eq!(stdout(&h).lines().filter(|l| l.contains("trace=2.000000000000+")).count(), 3);
    assert!(skyrme(&["develop", "--input", &a, "--out", &d]).status.success());
    let from_form = stdout(&skyrme(&["invariants", "--input", &a]));
    let from_map = stdout(&skyrme(&["invariants", "--input", &d]));
    assert!(from_form.contains(" c=(1) "), "{from_form}");
    assert_eq!(from_form, from_map);
}

#[test]
fn minimize_writes_field_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "r.skyf");
    let m = path(dir.path(), "m.skyf");
    let t = path(dir.path(), "m.csv");
    assert!(skyrme(&["gen", "--group", "su2", "--n", "6", "--kind", "random", "--amplitude", "0.3", "--out", &f]).status.success());
    let o = skyrme(&["minimize", "--input", &f, "--max-iters", "15", "--out", &m, "--trace", &t]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("iterations=15 "));
    let csv = std::fs::read_to_string(&t).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "iter,energy,grad_norm,step,alpha,c_rounded,c_residual");
    assert_eq!(csv.lines().count(), 17);
    assert!(skyrme(&["energy", "--input", &m]).status.success());
}

#[test]
fn exit_codes_follow_the_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(dir.path(), "x");
    let code = |o: Output| o.status.code().unwrap();
    assert_eq!(code(skyrme(&["frobnicate"])), 2);
    assert_eq!(code(skyrme(&["gen", "--group", "su2", "--kind", "hedgehog", "--out", &f])), 3);
    assert_eq!(code(skyrme(&["--config", &path(dir.path(), "missing.cfg"), "constants"])), 3);
    assert_eq!(code(skyrme(&["constants", "--group", "e9"])), 10);
    assert_eq!(code(skyrme(&["gen", "--group", "su2", "--n", "2", "--kind", "hedgehog", "--out", &f])), 17);
    assert_eq!(code(skyrme(&["energy", "--input", &path(dir.path(), "none")])), 30);
    std::fs::write(&f, b"not a field").unwrap();
    let o = skyrme(&["energy", "--input", &f]);
    assert_eq!(String::from_utf8_lossy(&o.stderr).lines().count(), 1);
    assert_eq!(code(o), 29);
    assert_eq!(code(skyrme(&["gen", "--group", "f4", "--n", "4", "--kind", "winding", "--out", &f])), 10);
    let w = path(dir.path(), "w.skyf");
    assert!(skyrme(&["gen", "--group", "su2", "--n", "4", "--kind", "winding", "--winding", "1,0,0", "--out", &w]).status.success());
    assert_eq!(code(skyrme(&["invariants", "--input", &w])), 15);
    let help = stdout(&skyrme(&["--help"]));
    assert!(help.contains("Exit codes:") && help.contains("30  io error"));
}
