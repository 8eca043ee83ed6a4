//! End-to-end runs of the `stsk` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use stsk_core::dmfile;

fn stsk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stsk")).args(args).output().expect("spawn stsk")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ser_csv_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ser.cfg", "constellation = psk:2\ndm_family = CDA\ndetector = ssml\n");
    let run = |threads: &str| {
        let o = stsk(&["ser", "--config", &cfg, "--snr", "0,4", "--max-trials", "20000", "--min-errors", "300", "--threads", threads]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let a = run("1");
    assert_eq!(a, run("3"));
    let lines: Vec<&str> = a.lines().collect();
    assert!(lines[0].starts_with("# config_sha256="));
    assert_eq!(lines[1], "# seed=1");
    assert!(lines[2].starts_with("# git_rev="));
    assert_eq!(lines[3], "snr_db,ser,trials,errors,ci95_low,ci95_high");
    assert_eq!(lines.len(), 6);
    for row in &lines[4..] {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        // stopping rule
        assert!(f[3] >= 300.0 || f[2] == 20000.0);
        assert!(f[4] <= f[1] && f[1] <= f[5]);
    }
}

#[test]
fn seed_flag_changes_the_run() {
    let a = stsk(&["ser", "--snr", "3", "--max-trials", "2000", "--seed", "5"]);
    let b = stsk(&["ser", "--snr", "3", "--max-trials", "2000", "--seed", "6"]);
    assert!(stdout(&a).contains("# seed=5"));
    assert_ne!(stdout(&a).lines().last(), stdout(&b).lines().last());
}

#[test]
fn capacity_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cap.csv");
    let o = stsk(&["capacity", "--snr", "30", "--samples", "500", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let last = text.lines().last().unwrap();
    assert!(text.contains("snr_db,capacity_bpcu,ci_low,ci_high,samples"));
    assert!(last.starts_with("30,2.000000"), "{last}");
    assert!(last.ends_with(",500"));
}

#[test]
fn gains_table_lists_reference_rows() {
    let o = stsk(&["gains"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("1.000000e0"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn export_then_verify_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let dm = dir.path().join("ex2.dm");
    let cfg = write(dir.path(), "cda.cfg", "constellation = psk:2\ndm_family = CDA\n");
    let o = stsk(&["export-dms", "--config", &cfg, "--out", dm.to_str().unwrap()]);
    assert!(o.status.success());
    let set = dmfile::read_dm_file::<f64>(&dm).unwrap();
    assert_eq!(set.q(), 8);

    let ok = write(
        dir.path(),
        "file.cfg",
        &format!("constellation = psk:2\ndm_family = file\ndm_file = {}\n", dm.display()),
    );
    let o = stsk(&["verify", "--config", &ok]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    // duplicate one matrix: injectivity must fail with exit code 1
    let text = fs::read_to_string(&dm).unwrap();
    // header line, then M rows per matrix
    let mut lines: Vec<&str> = text.lines().collect();
    let n = lines.len();
    lines[n - 2] = lines[1];
    lines[n - 1] = lines[2];
    let bad = dir.path().join("bad.dm");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    let cfg = write(
        dir.path(),
        "bad.cfg",
        &format!("constellation = psk:2\ndm_family = file\ndm_file = {}\n", bad.display()),
    );
    let o = stsk(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("codeword_injectivity"));
    assert!(stdout(&o).contains("# overall: FAIL"));
}

#[test]
fn verify_reports_star_qam_rotation_set() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "star.cfg", "constellation = star:16\n");
    let o = stsk(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("|E| = 32"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "M = 2\nbogus = 1\n");
    let o = stsk(&["ser", "--config", &cfg, "--snr", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("bogus"), "{err}");

    assert_eq!(stsk(&["ser"]).status.code(), Some(2), "missing SNR list");
    assert_eq!(stsk(&["verify", "--config", "/nonexistent/x.cfg"]).status.code(), Some(2));
}
