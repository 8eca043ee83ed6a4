//! CSV and text rendering.
//!
//! Every CSV starts with `#` provenance comments (config hash, seed, source
//! revision) followed by a header row. Nothing in the output depends on the
//! worker count or the wall clock.

use std::fmt::Write as _;
use std::process::Command;

use super::campaign::{CapacityPoint, GainRow, SerPoint, VerifyReport};
use super::config::SimConfig;

pub const SER_HEADER: &str = "snr_db,ser,trials,errors,ci95_low,ci95_high";
pub const CAPACITY_HEADER: &str = "snr_db,capacity_bpcu,ci_low,ci_high,samples";
pub const GAIN_HEADER: &str = "label,family,Q,L,coding_gain,diversity_order";
pub const VERIFY_HEADER: &str = "check,domain_size,image_size,collisions,pass";

/// `git rev-parse --short HEAD` of the working directory, or `unknown`.
pub fn source_revision() -> String {
    Command::new("git")
        .args(["rev-parse", "--short", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

pub fn provenance(cfg: &SimConfig, rev: &str) -> String {
    format!("# config_sha256={}\n# seed={}\n# git_rev={rev}\n", cfg.hash(), cfg.seed)
}

pub fn ser_csv(cfg: &SimConfig, rev: &str, points: &[SerPoint]) -> String {
    let mut s = provenance(cfg, rev);
    s.push_str(SER_HEADER);
    s.push('\n');
    for p in points {
        let _ = writeln!(
            s,
            "{},{:e},{},{},{:e},{:e}",
            p.snr_db, p.ser, p.trials, p.errors, p.ci95_low, p.ci95_high
        );
    }
    s
}

pub fn capacity_csv(cfg: &SimConfig, rev: &str, points: &[CapacityPoint]) -> String {
    let mut s = provenance(cfg, rev);
    s.push_str(CAPACITY_HEADER);
    s.push('\n');
    for p in points {
        let e = &p.estimate;
        let _ = writeln!(s, "{},{:.6},{:.6},{:.6},{}", p.snr_db, e.bpcu, e.ci_low, e.ci_high, e.samples);
    }
    s
}

fn gain_cell(g: Option<f64>) -> String {
    g.map_or_else(|| "n/a".into(), |g| format!("{g:.6e}"))
}

pub fn gain_csv(rows: &[GainRow]) -> String {
    let mut s = String::from(GAIN_HEADER);
    s.push('\n');
    for r in rows {
        let div = r.diversity_order.map_or_else(|| "n/a".into(), |d| d.to_string());
        let _ = writeln!(s, "{},{},{},{},{},{}", r.label, r.family, r.q, r.l, gain_cell(r.coding_gain), div);
    }
    s
}

/// Aligned human-readable table; failed rows show their error.
pub fn gain_table_text(rows: &[GainRow]) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(5).max(5);
    let mut s = format!("{:<width$}  {:<7}  {:>4}  {:>3}  {:>13}  {}\n", "entry", "family", "Q", "L", "G", "div");
    for r in rows {
        match &r.error {
            Some(e) => {
                let _ = writeln!(s, "{:<width$}  error: {e}", r.label);
            }
            None => {
                let div = r.diversity_order.map_or_else(|| "n/a".into(), |d| d.to_string());
                let _ = writeln!(
                    s,
                    "{:<width$}  {:<7}  {:>4}  {:>3}  {:>13}  {div}",
                    r.label,
                    r.family,
                    r.q,
                    r.l,
                    gain_cell(r.coding_gain)
                );
            }
        }
    }
    s
}

pub fn verify_text(report: &VerifyReport) -> String {
    let mut s = String::new();
    for n in &report.notes {
        let _ = writeln!(s, "# {n}");
    }
    s.push_str(VERIFY_HEADER);
    s.push('\n');
    for c in &report.checks {
        let _ = writeln!(s, "{}", c.csv_line());
    }
    let _ = writeln!(s, "# overall: {}", if report.passed() { "PASS" } else { "FAIL" });
    s
}
