use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use glyphwarp::cds::read_cds;

fn glyphwarp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glyphwarp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = glyphwarp(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--preset", "raw", "--n", "10", "--seed", "1", "--out", "a.cds"]);
    ok(d, &["gen", "--preset", "raw", "--n", "10", "--seed", "1", "--out", "b.cds"]);
    assert_eq!(fs::read(d.join("a.cds")).unwrap(), fs::read(d.join("b.cds")).unwrap());
    assert_eq!(fs::metadata(d.join("a.cds")).unwrap().len(), 16 + 10 * 1025);
    let meta = fs::read_to_string(d.join("a.cds.meta")).unwrap();
    assert!(meta.contains("seed=1\n") && meta.contains("preset=raw\n"), "{meta}");

    ok(d, &["gen", "--preset", "p07", "--n", "40", "--seed", "7", "--out", "p.cds"]);
    ok(d, &["gen", "--preset", "p07", "--n", "40", "--seed", "7", "--serial", "--out", "s.cds"]);
    assert_eq!(fs::read(d.join("p.cds")).unwrap(), fs::read(d.join("s.cds")).unwrap());
}

#[test]
fn show_writes_a_contact_sheet() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--n", "4", "--mix", "nist", "--out", "a.cds"]);
    ok(d, &["show", "--data", "a.cds", "--rows", "2", "--cols", "2", "--out", "a.pgm"]);
    let pgm = fs::read(d.join("a.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n66 66\n255\n"));
    assert_eq!(pgm.len(), 13 + 66 * 66);
    let out = glyphwarp(d, &["show", "--data", "a.cds", "--rows", "3", "--cols", "2"]);
    assert!(!out.status.success());
}

#[test]
fn train_then_eval_on_a_subset() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--n", "200", "--seed", "1", "--mix", "nist", "--out", "train.cds"]);
    ok(d, &["gen", "--n", "60", "--seed", "2", "--mix", "nist", "--out", "valid.cds"]);
    fs::write(d.join("model.cfg"), "hidden = 16\nepochs = 3\nlearning_rate = 0.1\n").unwrap();
    let out = ok(d, &["train", "--model", "mlp", "--train", "train.cds", "--valid", "valid.cds", "--config", "model.cfg", "--out", "m.cnm"]);
    assert!(out.contains("best validation error"), "{out}");
    assert_eq!(&fs::read(d.join("m.cnm")).unwrap()[..4], b"CNM1");

    let digits = read_cds(&d.join("valid.cds")).unwrap().items.iter().filter(|s| s.label < 10).count();
    let out = ok(d, &["eval", "--model-file", "m.cnm", "--data", "valid.cds", "--classes", "digits"]);
    assert!(out.contains(&format!("on {digits} items (digits)")), "{out}");
}

#[test]
fn usage_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for args in [
        &["gen", "--out", "x.cds"][..],
        &["gen", "--n", "3", "--preset", "p09", "--out", "x.cds"],
        &["gen", "--n", "3", "--mix", "fonts=0.3", "--out", "x.cds"],
        &["eval", "--model-file", "missing.cnm", "--data", "missing.cds"],
        &["frobnicate"],
    ] {
        let out = glyphwarp(d, args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn experiment_and_report_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = "train = 80\nvalid = 20\ntest = 40\nhidden = 8\nsda_width = 8\nepochs = 2\npretrain_epochs = 1\n\
               learning_rates = 0.1\nmodels = MLP0, SDA1\ntasks = all, digits\nsingle_task = false\n";
    fs::write(d.join("grid.cfg"), cfg).unwrap();
    let printed = ok(d, &["experiment", "--grid-config", "grid.cfg", "--out-dir", "out"]);
    let tsv = fs::read_to_string(d.join("out/results.tsv")).unwrap();
    assert!(tsv.starts_with("model\teval\ttask\tn\terror\tstderr\tstatus\n"));
    // 2 models × 3 eval sets × 2 tasks
    assert_eq!(tsv.lines().count(), 1 + 12);
    let report = ok(d, &["report", "--results", "out/results.tsv"]);
    assert_eq!(report, fs::read_to_string(d.join("out/report.txt")).unwrap());
    assert!(printed.ends_with(&report));
}
