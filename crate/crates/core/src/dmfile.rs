//! Plain-text DM set files.
//!
//! ```text
//! Q M T family
//! <M rows of T entries "re+imj">   (repeated Q times)
//! ```
//!
//! Entries are written with the shortest representation that parses back to
//! the same float, so a write/read cycle is bit-exact (signed zeros included).
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex;

use crate::dispersion::{ConstructionParams, DispersionMatrixSet, DmFamily, FIXTURE_POWER_TOL, POWER_TOL};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::Real;

pub fn format_complex<T: Real>(z: Complex<T>) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}j", z.re, sign, z.im.abs())
}

pub fn parse_complex<T: Real>(s: &str) -> Option<Complex<T>> {
    let body = s.strip_suffix('j')?;
    let bytes = body.as_bytes();
    // the real/imaginary split is the last sign that is neither leading nor
    // part of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = body[..split].parse::<T>().ok()?;
    let im_abs = body[split + 1..].parse::<T>().ok()?;
    let im = if bytes[split] == b'-' { -im_abs } else { im_abs };
    Some(Complex::new(re, im))
}

pub fn to_string<T: Real>(set: &DispersionMatrixSet<T>) -> String {
    let mut out = format!("{} {} {} {}\n", set.q(), set.m(), set.t(), set.family());
    for a in set.matrices() {
        for i in 0..a.rows() {
            let row: Vec<String> = (0..a.cols()).map(|j| format_complex(a[(i, j)])).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}

fn parse_raw<T: Real>(text: &str) -> Result<(DmFamily, Vec<CMat<T>>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let perr = |line, msg: String| Error::Parse { line, msg };
    if fields.len() != 4 {
        return Err(perr(hline, format!("header needs `Q M T family`, got `{header}`")));
    }
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| perr(hline, format!("{what} `{s}` is not a non-negative integer")))
    };
    let (q, m, t) = (num(fields[0], "Q")?, num(fields[1], "M")?, num(fields[2], "T")?);
    let family: DmFamily = fields[3].parse().map_err(|e: Error| perr(hline, e.to_string()))?;
    let mut mats = Vec::with_capacity(q);
    for _ in 0..q {
        let mut data = Vec::with_capacity(m * t);
        for _ in 0..m {
            let (ln, row) = lines.next().ok_or_else(|| perr(hline, format!("expected {q} blocks of {m} rows")))?;
            let entries: Vec<&str> = row.split_whitespace().collect();
            if entries.len() != t {
                return Err(perr(ln, format!("expected {t} entries, found {}", entries.len())));
            }
            for e in entries {
                data.push(parse_complex(e).ok_or_else(|| perr(ln, format!("bad complex entry `{e}`")))?);
            }
        }
        mats.push(CMat::from_row_major(m, t, data));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(perr(ln, "trailing content after the last matrix".into()));
    }
    Ok((family, mats))
}

/// Parses and fully validates (power constraint, distinctness). Fixture
/// sets get the relaxed printed-precision power tolerance.
pub fn from_str<T: Real>(text: &str) -> Result<DispersionMatrixSet<T>> {
    let (family, mats) = parse_raw(text)?;
    let tol = match family {
        DmFamily::Fixture => T::lit(FIXTURE_POWER_TOL),
        _ => T::tolerance(POWER_TOL),
    };
    DispersionMatrixSet::new(family, ConstructionParams::Loaded, mats, tol)
}

/// Parses with shape checks only, so invalid sets can be inspected.
pub fn from_str_unchecked<T: Real>(text: &str) -> Result<DispersionMatrixSet<T>> {
    let (family, mats) = parse_raw(text)?;
    DispersionMatrixSet::new_unchecked(family, ConstructionParams::Loaded, mats)
}

pub fn write_dm_file<T: Real>(path: impl AsRef<Path>, set: &DispersionMatrixSet<T>) -> Result<()> {
    fs::write(path, to_string(set))?;
    Ok(())
}

pub fn read_dm_file<T: Real>(path: impl AsRef<Path>) -> Result<DispersionMatrixSet<T>> {
    from_str(&fs::read_to_string(path)?)
}

pub fn read_dm_file_unchecked<T: Real>(path: impl AsRef<Path>) -> Result<DispersionMatrixSet<T>> {
    from_str_unchecked(&fs::read_to_string(path)?)
}
