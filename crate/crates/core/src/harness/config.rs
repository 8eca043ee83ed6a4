//! `key = value` simulation configs.
//!
//! ```text
//! # CSTSK(2,2,2,4), QPSK, FEC dispersion matrices
//! M = 2
//! N = 2
//! T = 2
//! constellation = psk:4
//! dm_family = FEC
//! detector = ml
//! snr_db = 0, 5, 10, 15, 20
//! ```
//!
//! Unknown keys, repeated keys and malformed values are errors that carry
//! the line number and the key.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::constellation::ConstellationSpec;
use crate::dmfile::{format_complex, parse_complex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DmFamilySpec {
    Fec,
    Cda,
    Co,
    Fixture,
    File,
}

impl FromStr for DmFamilySpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fec" => Ok(Self::Fec),
            "cda" => Ok(Self::Cda),
            "co" => Ok(Self::Co),
            "fixture" => Ok(Self::Fixture),
            "file" => Ok(Self::File),
            _ => Err(format!("expected FEC, CDA, CO, Fixture or file, got `{s}`")),
        }
    }
}

impl std::fmt::Display for DmFamilySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Fec => "FEC",
            Self::Cda => "CDA",
            Self::Co => "CO",
            Self::Fixture => "Fixture",
            Self::File => "file",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectorSpec {
    Ml,
    SingleStream,
    /// Matched filter with the given shortlist size.
    Mf(usize),
    /// Semi-blind decision-directed estimation with the given iteration count.
    SemiBlind(usize),
}

impl FromStr for DetectorSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("expected ml, ssml, mf:k or semiblind:iters, got `{s}`");
        match s.split_once(':') {
            None if s == "ml" => Ok(Self::Ml),
            None if s == "ssml" => Ok(Self::SingleStream),
            None if s == "mf" => Ok(Self::Mf(1)),
            Some(("mf", k)) => k.trim().parse().map(Self::Mf).map_err(|_| bad()),
            Some(("semiblind", i)) => i.trim().parse().map(Self::SemiBlind).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for DetectorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Ml => write!(f, "ml"),
            Self::SingleStream => write!(f, "ssml"),
            Self::Mf(k) => write!(f, "mf:{k}"),
            Self::SemiBlind(i) => write!(f, "semiblind:{i}"),
        }
    }
}

/// `full` or a subset selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetSpec {
    Full,
    Fec(usize),
    Cda(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub m: usize,
    pub n: usize,
    pub t: usize,
    /// Truncate the DM set to its first `Q` matrices (required for CO).
    pub q: Option<usize>,
    pub constellation: ConstellationSpec,
    pub dm_family: DmFamilySpec,
    /// `a_0 … a_{M-1}` of the monic FEC polynomial; default `x^M - exp(j2π/L')`.
    pub fec_poly: Option<Vec<Complex64>>,
    pub fec_pivot: usize,
    pub fec_subset: SubsetSpec,
    /// Order `L'` of the PSK alphabet the FEC/CDA code is built over.
    /// Defaults to the signalling PSK order.
    pub code_psk: Option<usize>,
    /// CDA `t_M` and `δ` angles in units of π.
    pub cda_t_pi: f64,
    pub cda_delta_pi: f64,
    pub cda_epsilon: f64,
    pub cda_pivot: usize,
    pub cda_subset: SubsetSpec,
    pub co_candidates: usize,
    pub co_mi_samples: usize,
    pub co_seed: Option<u64>,
    pub co_reference_snr_db: f64,
    pub dm_file: Option<PathBuf>,
    pub detector: DetectorSpec,
    pub snr_db: Vec<f64>,
    pub max_trials: u64,
    pub min_errors: u64,
    pub csir_sigma: f64,
    pub seed: u64,
    pub capacity_samples: usize,
    pub training_blocks: usize,
    pub data_blocks: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            m: 2,
            n: 2,
            t: 2,
            q: None,
            constellation: ConstellationSpec::Psk(4),
            dm_family: DmFamilySpec::Fec,
            fec_poly: None,
            fec_pivot: 1,
            fec_subset: SubsetSpec::Full,
            code_psk: None,
            cda_t_pi: 0.5,
            cda_delta_pi: 0.375,
            cda_epsilon: 0.0,
            cda_pivot: 0,
            cda_subset: SubsetSpec::Full,
            co_candidates: 1000,
            co_mi_samples: 10_000,
            co_seed: None,
            co_reference_snr_db: 10.0,
            dm_file: None,
            detector: DetectorSpec::Ml,
            snr_db: Vec::new(),
            max_trials: 10_000_000,
            min_errors: 100,
            csir_sigma: 0.0,
            seed: 1,
            capacity_samples: 10_000,
            training_blocks: 2,
            data_blocks: 100,
        }
    }
}

fn cfg_err(line: Option<usize>, field: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        field: field.to_string(),
        msg: msg.into(),
    }
}

fn parse_list<T: FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("cannot parse list element `{s}`")))
        .collect()
}

fn parse_subset(v: &str) -> std::result::Result<SubsetSpec, String> {
    if v == "full" {
        return Ok(SubsetSpec::Full);
    }
    let parts: Vec<usize> = parse_list(v)?;
    match parts.as_slice() {
        [r] => Ok(SubsetSpec::Fec(*r)),
        [m, r] => Ok(SubsetSpec::Cda(*m, *r)),
        _ => Err(format!("expected `full`, `r` or `m,r`, got `{v}`")),
    }
}

fn subset_to_string(s: SubsetSpec) -> String {
    match s {
        SubsetSpec::Full => "full".into(),
        SubsetSpec::Fec(r) => r.to_string(),
        SubsetSpec::Cda(m, r) => format!("{m},{r}"),
    }
}

pub const KEYS: &[&str] = &[
    "M",
    "N",
    "T",
    "Q",
    "constellation",
    "dm_family",
    "fec_poly",
    "fec_pivot",
    "fec_subset",
    "code_psk",
    "cda_t_pi",
    "cda_delta_pi",
    "cda_epsilon",
    "cda_pivot",
    "cda_subset",
    "co_candidates",
    "co_mi_samples",
    "co_seed",
    "co_reference_snr_db",
    "dm_file",
    "detector",
    "snr_db",
    "max_trials",
    "min_errors",
    "csir_sigma",
    "seed",
    "capacity_samples",
    "training_blocks",
    "data_blocks",
];

impl SimConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| cfg_err(Some(line), content, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(cfg_err(Some(line), key, "unknown key"));
            }
            if !seen.insert(key.to_string()) {
                return Err(cfg_err(Some(line), key, "key given twice"));
            }
            cfg.set(key, value).map_err(|msg| cfg_err(Some(line), key, msg))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        fn num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("cannot parse `{v}`"))
        }
        match key {
            "M" => self.m = num(v)?,
            "N" => self.n = num(v)?,
            "T" => self.t = num(v)?,
            "Q" => self.q = Some(num(v)?),
            "constellation" => self.constellation = v.parse().map_err(|e: Error| e.to_string())?,
            "dm_family" => self.dm_family = v.parse()?,
            "fec_poly" => {
                let coeffs = v
                    .split(',')
                    .map(str::trim)
                    .map(|s| parse_complex::<f64>(s).ok_or_else(|| format!("bad complex coefficient `{s}`")))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                self.fec_poly = Some(coeffs);
            }
            "fec_pivot" => self.fec_pivot = num(v)?,
            "fec_subset" => self.fec_subset = parse_subset(v)?,
            "code_psk" => self.code_psk = Some(num(v)?),
            "cda_t_pi" => self.cda_t_pi = num(v)?,
            "cda_delta_pi" => self.cda_delta_pi = num(v)?,
            "cda_epsilon" => self.cda_epsilon = num(v)?,
            "cda_pivot" => self.cda_pivot = num(v)?,
            "cda_subset" => self.cda_subset = parse_subset(v)?,
            "co_candidates" => self.co_candidates = num(v)?,
            "co_mi_samples" => self.co_mi_samples = num(v)?,
            "co_seed" => self.co_seed = Some(num(v)?),
            "co_reference_snr_db" => self.co_reference_snr_db = num(v)?,
            "dm_file" => self.dm_file = Some(PathBuf::from(v)),
            "detector" => self.detector = v.parse()?,
            "snr_db" => self.snr_db = parse_list(v)?,
            "max_trials" => self.max_trials = num(v)?,
            "min_errors" => self.min_errors = num(v)?,
            "csir_sigma" => self.csir_sigma = num(v)?,
            "seed" => self.seed = num(v)?,
            "capacity_samples" => self.capacity_samples = num(v)?,
            "training_blocks" => self.training_blocks = num(v)?,
            "data_blocks" => self.data_blocks = num(v)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Cross-field checks. Construction-specific ranges are checked when the
    /// DM set is built.
    pub fn validate(&self) -> Result<()> {
        let e = |field: &str, msg: String| Err(cfg_err(None, field, msg));
        if self.m == 0 || self.n == 0 {
            return e("M", format!("need M >= 1 and N >= 1 (got M={}, N={})", self.m, self.n));
        }
        if self.m != self.t {
            return e("T", format!("M = T is required (got M={}, T={})", self.m, self.t));
        }
        if self.q == Some(0) {
            return e("Q", "Q must be >= 1".into());
        }
        if self.dm_family == DmFamilySpec::Co && self.q.is_none() {
            return e("Q", "CO dispersion matrices need an explicit Q".into());
        }
        if self.dm_family == DmFamilySpec::File && self.dm_file.is_none() {
            return e("dm_file", "dm_family = file needs dm_file".into());
        }
        if self.max_trials == 0 {
            return e("max_trials", "must be >= 1".into());
        }
        if !(self.csir_sigma >= 0.0 && self.csir_sigma.is_finite()) {
            return e("csir_sigma", format!("must be a finite value >= 0, got {}", self.csir_sigma));
        }
        if let Some(bad) = self.snr_db.iter().find(|x| !x.is_finite()) {
            return e("snr_db", format!("non-finite SNR {bad}"));
        }
        if let DetectorSpec::SemiBlind(_) = self.detector {
            if self.training_blocks * self.t < self.m || self.data_blocks == 0 {
                return e(
                    "training_blocks",
                    "semi-blind detection needs training_blocks·T >= M and data_blocks >= 1".into(),
                );
            }
        }
        if let DetectorSpec::Mf(0) = self.detector {
            return e("detector", "MF shortlist must be >= 1".into());
        }
        Ok(())
    }

    /// Canonical `key = value` rendering of the config, in [`KEYS`] order.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let opt = |o: Option<String>| o.unwrap_or_else(|| "-".into());
        let fields: Vec<(&str, String)> = vec![
            ("M", self.m.to_string()),
            ("N", self.n.to_string()),
            ("T", self.t.to_string()),
            ("Q", opt(self.q.map(|q| q.to_string()))),
            ("constellation", self.constellation.to_string()),
            ("dm_family", self.dm_family.to_string()),
            (
                "fec_poly",
                opt(self
                    .fec_poly
                    .as_ref()
                    .map(|p| p.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(","))),
            ),
            ("fec_pivot", self.fec_pivot.to_string()),
            ("fec_subset", subset_to_string(self.fec_subset)),
            ("code_psk", opt(self.code_psk.map(|x| x.to_string()))),
            ("cda_t_pi", self.cda_t_pi.to_string()),
            ("cda_delta_pi", self.cda_delta_pi.to_string()),
            ("cda_epsilon", self.cda_epsilon.to_string()),
            ("cda_pivot", self.cda_pivot.to_string()),
            ("cda_subset", subset_to_string(self.cda_subset)),
            ("co_candidates", self.co_candidates.to_string()),
            ("co_mi_samples", self.co_mi_samples.to_string()),
            ("co_seed", opt(self.co_seed.map(|x| x.to_string()))),
            ("co_reference_snr_db", self.co_reference_snr_db.to_string()),
            ("dm_file", opt(self.dm_file.as_ref().map(|p| p.display().to_string()))),
            ("detector", self.detector.to_string()),
            (
                "snr_db",
                self.snr_db.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            ),
            ("max_trials", self.max_trials.to_string()),
            ("min_errors", self.min_errors.to_string()),
            ("csir_sigma", self.csir_sigma.to_string()),
            ("seed", self.seed.to_string()),
            ("capacity_samples", self.capacity_samples.to_string()),
            ("training_blocks", self.training_blocks.to_string()),
            ("data_blocks", self.data_blocks.to_string()),
        ];
        // unset optional fields are left out so the rendering parses back
        for (k, v) in fields.into_iter().filter(|(_, v)| v != "-") {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// SHA-256 of [`canonical`](Self::canonical), lowercase hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .fold(String::new(), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }

    /// Seed used by the CO search: `co_seed` if given, else the master seed.
    pub fn co_search_seed(&self) -> u64 {
        self.co_seed.unwrap_or(self.seed)
    }
}
