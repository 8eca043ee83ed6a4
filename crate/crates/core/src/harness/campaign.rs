//! Monte-Carlo campaigns, gain tables and verification runs.

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{db_to_linear, perturb_csir, sample_channel, transmit_with_noise, ChannelBlock};
use crate::codebook::{self, verify_decomposition, DecompositionReport, StskCodebook};
use crate::constellation::{make_psk, Constellation, ConstellationKind, ConstellationSpec};
use crate::detect::{iterative_semiblind, mf_detect, ml_detect, single_stream_ml};
use crate::dispersion::{
    self, cda_code, cda_dm_set, co_dm_search, companion_powers, fec_code, fec_dm_set, CdaParams, CdaSubset,
    CoSearchParams, DispersionMatrixSet, DmFamily, FecParams, FecSubset, FIXTURE_POWER_TOL, POWER_TOL,
};
use crate::dmfile;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::matset::duplicate_pairs;
use crate::metrics::{self, CapacityEstimate};
use crate::rng::{complex_normal_matrix, derive_seed, stream};
use crate::scalar::root_of_unity;

use super::config::{DetectorSpec, DmFamilySpec, SimConfig, SubsetSpec};

const SER_TAG: u64 = 0x5E5E_0001;
const CAPACITY_TAG: u64 = 0xCA9A_0001;
/// Trials per random-stream work unit of an SER point.
const TRIALS_PER_CHUNK: u64 = 1024;
/// Chunks evaluated between two checks of the stopping rule.
const CHUNKS_PER_ROUND: u64 = 32;
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_964;

/// Runs `f` on a dedicated pool with `threads` workers (or the global pool).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn code_psk(cfg: &SimConfig, s: &Constellation<f64>) -> Result<Constellation<f64>> {
    match cfg.code_psk {
        Some(l) => make_psk(l),
        None if s.is_psk() => Ok(s.clone()),
        None => Err(Error::Config {
            line: None,
            field: "code_psk".into(),
            msg: "FEC/CDA dispersion matrices need a PSK code alphabet; set code_psk".into(),
        }),
    }
}

pub fn fec_params(cfg: &SimConfig, code: &Constellation<f64>) -> Result<FecParams<f64>> {
    let coeffs = match &cfg.fec_poly {
        Some(c) => c.clone(),
        None => FecParams::<f64>::root_of_unity_poly(code.order(), cfg.m).coeffs,
    };
    let subset = match cfg.fec_subset {
        SubsetSpec::Full => FecSubset::Full,
        SubsetSpec::Fec(r) => FecSubset::Leading(r),
        SubsetSpec::Cda(..) => return Err(Error::param("fec_subset takes `full` or a single r")),
    };
    Ok(FecParams {
        code_order: code.order(),
        coeffs,
        pivot: cfg.fec_pivot,
        subset,
    })
}

pub fn cda_params(cfg: &SimConfig, code: &Constellation<f64>) -> Result<CdaParams<f64>> {
    let pi = std::f64::consts::PI;
    let mut p = CdaParams::from_angles(code.order(), cfg.m, cfg.cda_t_pi * pi, cfg.cda_delta_pi * pi, cfg.cda_epsilon);
    p.pivots = vec![cfg.cda_pivot; cfg.m];
    p.subset = match cfg.cda_subset {
        SubsetSpec::Full => CdaSubset::Full,
        SubsetSpec::Cda(m, r) => CdaSubset::Truncated { m, r },
        SubsetSpec::Fec(_) => return Err(Error::param("cda_subset takes `full` or `m,r`")),
    };
    Ok(p)
}

pub fn co_params(cfg: &SimConfig) -> CoSearchParams {
    CoSearchParams {
        m: cfg.m,
        t: cfg.t,
        q: cfg.q.unwrap_or(1),
        candidates: cfg.co_candidates,
        mi_samples: cfg.co_mi_samples,
        n_rx: cfg.n,
        reference_snr_db: cfg.co_reference_snr_db,
        seed: cfg.co_search_seed(),
    }
}

fn truncate(cfg: &SimConfig, set: DispersionMatrixSet<f64>) -> Result<DispersionMatrixSet<f64>> {
    match cfg.q {
        Some(q) if q != set.q() => set.truncated(q),
        _ => Ok(set),
    }
}

fn check_shape(cfg: &SimConfig, set: &DispersionMatrixSet<f64>) -> Result<()> {
    if set.m() != cfg.m {
        return Err(Error::dims(format!("{}×{} dispersion matrices", cfg.m, cfg.t), format!("{}×{}", set.m(), set.t())));
    }
    Ok(())
}

/// Builds (and validates) the DM set a config describes.
pub fn build_dms(cfg: &SimConfig) -> Result<DispersionMatrixSet<f64>> {
    let s = cfg.constellation.build::<f64>()?;
    let set = match cfg.dm_family {
        DmFamilySpec::Fec => {
            let code = code_psk(cfg, &s)?;
            fec_dm_set(&code, &fec_params(cfg, &code)?)?
        }
        DmFamilySpec::Cda => {
            let code = code_psk(cfg, &s)?;
            cda_dm_set(&code, &cda_params(cfg, &code)?)?
        }
        DmFamilySpec::Co => co_dm_search(&co_params(cfg), &s)?,
        DmFamilySpec::Fixture => dispersion::fixture_co_bpsk8(),
        DmFamilySpec::File => dmfile::read_dm_file(cfg.dm_file.as_ref().expect("validated"))?,
    };
    check_shape(cfg, &set)?;
    truncate(cfg, set)
}

pub fn build_codebook(cfg: &SimConfig) -> Result<StskCodebook<f64>> {
    let s = cfg.constellation.build::<f64>()?;
    codebook::expand(&s, &build_dms(cfg)?)
}

/// One SER grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SerPoint {
    pub snr_db: f64,
    pub ser: f64,
    pub trials: u64,
    pub errors: u64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

/// Wilson score interval for `errors` out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Training block `b`: identity for even `b`, the unitary DFT for odd `b`.
/// Both satisfy `trace(XᴴX) = M` and together they are far from collinear.
pub fn training_block(b: usize, m: usize) -> CMat<f64> {
    if b.is_multiple_of(2) {
        CMat::identity(m)
    } else {
        CMat::from_fn(m, m, |i, k| root_of_unity::<f64>((i * k) % m, m)).scale_real((m as f64).sqrt().recip())
    }
}

/// Error flags of unit `unit` (one trial, or one frame of `data_blocks`).
///
/// Per trial the stream yields, in order: `H`, noise `N`, CSIR error `E`
/// and the transmitted codeword index. Campaigns that share a seed and a
/// codebook size therefore see identical channels, noise and messages.
fn run_unit(book: &StskCodebook<f64>, cfg: &SimConfig, rho: f64, seed: u64, unit: u64) -> Result<Vec<bool>> {
    let mut r = stream(seed, unit);
    let (n, m, t) = (cfg.n, cfg.m, cfg.t);
    let block: ChannelBlock<f64> = sample_channel(n, m, rho, &mut r);
    match cfg.detector {
        DetectorSpec::SemiBlind(iters) => {
            let train_x: Vec<CMat<f64>> = (0..cfg.training_blocks).map(|b| training_block(b, m)).collect();
            let mut train_y = Vec::with_capacity(train_x.len());
            for x in &train_x {
                let noise = complex_normal_matrix(&mut r, n, t, 1.0);
                train_y.push(transmit_with_noise(&block, x, &noise)?.y);
            }
            let mut sent = Vec::with_capacity(cfg.data_blocks);
            let mut data_y = Vec::with_capacity(cfg.data_blocks);
            for _ in 0..cfg.data_blocks {
                let noise = complex_normal_matrix(&mut r, n, t, 1.0);
                let idx = r.random_range(0..book.len());
                data_y.push(transmit_with_noise(&block, &book.codeword(idx), &noise)?.y);
                sent.push(book.split(idx));
            }
            let frame = iterative_semiblind(&train_y, &train_x, &data_y, book, rho, iters)?;
            Ok(frame.decisions.iter().zip(&sent).map(|(d, &s)| (d.p, d.q) != s).collect())
        }
        det => {
            let noise = complex_normal_matrix(&mut r, n, t, 1.0);
            let h_est = perturb_csir(&block.h, cfg.csir_sigma, &mut r);
            let idx = r.random_range(0..book.len());
            let obs = transmit_with_noise(&block, &book.codeword(idx), &noise)?;
            let pts = book.constellation().points();
            let d = match det {
                DetectorSpec::Ml => ml_detect(&obs.y, &h_est, book, rho)?,
                DetectorSpec::SingleStream => {
                    let h_bar = CMat::identity(t).kron(&h_est);
                    single_stream_ml(&obs.y_bar, &h_bar, book.chi(), pts, rho)?
                }
                DetectorSpec::Mf(k) => {
                    let h_bar = CMat::identity(t).kron(&h_est);
                    mf_detect(&obs.y_bar, &h_bar, book.chi(), pts, rho, k)?
                }
                DetectorSpec::SemiBlind(_) => unreachable!(),
            };
            Ok(vec![(d.p, d.q) != book.split(idx)])
        }
    }
}

/// Simulates one SNR point until `min_errors` errors or `max_trials`
/// decisions, whichever comes first.
///
/// Work is cut into fixed chunks of units with one stream per unit; rounds
/// of chunks run in parallel and their error flags are merged in unit order,
/// and the stopping rule is applied to that ordered sequence flag by flag.
/// The result is therefore independent of the worker count.
pub fn run_ser_point(book: &StskCodebook<f64>, cfg: &SimConfig, snr_db: f64) -> Result<SerPoint> {
    let rho = db_to_linear(snr_db);
    let seed = derive_seed(derive_seed(cfg.seed, SER_TAG), snr_db.to_bits());
    let per_unit = match cfg.detector {
        DetectorSpec::SemiBlind(_) => cfg.data_blocks as u64,
        _ => 1,
    };
    let units_per_chunk = (TRIALS_PER_CHUNK / per_unit).max(1);
    let (mut trials, mut errors) = (0u64, 0u64);
    let mut next_unit = 0u64;
    'outer: while trials < cfg.max_trials && errors < cfg.min_errors {
        let needed_units = (cfg.max_trials - trials).div_ceil(per_unit);
        let round_units = (units_per_chunk * CHUNKS_PER_ROUND).min(needed_units);
        let chunks: Vec<(u64, u64)> = (0..round_units.div_ceil(units_per_chunk))
            .map(|c| {
                let start = next_unit + c * units_per_chunk;
                (start, (start + units_per_chunk).min(next_unit + round_units))
            })
            .collect();
        let flags: Vec<Vec<bool>> = chunks
            .par_iter()
            .map(|&(a, b)| -> Result<Vec<bool>> {
                let mut out = Vec::with_capacity(((b - a) * per_unit) as usize);
                for u in a..b {
                    out.extend(run_unit(book, cfg, rho, seed, u)?);
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        next_unit += round_units;
        for f in flags.iter().flatten() {
            trials += 1;
            errors += u64::from(*f);
            if trials >= cfg.max_trials || errors >= cfg.min_errors {
                break 'outer;
            }
        }
    }
    let (lo, hi) = wilson_interval(errors, trials, Z95);
    Ok(SerPoint {
        snr_db,
        ser: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
        trials,
        errors,
        ci95_low: lo,
        ci95_high: hi,
    })
}

pub fn run_ser_campaign(cfg: &SimConfig) -> Result<Vec<SerPoint>> {
    let book = build_codebook(cfg)?;
    run_ser_with_codebook(&book, cfg)
}

pub fn run_ser_with_codebook(book: &StskCodebook<f64>, cfg: &SimConfig) -> Result<Vec<SerPoint>> {
    if let DetectorSpec::Mf(k) = cfg.detector {
        if k > book.q() {
            return Err(Error::Config {
                line: None,
                field: "detector".into(),
                msg: format!("MF shortlist {k} exceeds Q = {}", book.q()),
            });
        }
    }
    cfg.snr_db.iter().map(|&snr| run_ser_point(book, cfg, snr)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityPoint {
    pub snr_db: f64,
    pub estimate: CapacityEstimate,
}

/// Capacity per grid point. The sampling seed depends only on the master
/// seed and the SNR, so codebooks of equal size are compared on common
/// random numbers.
pub fn run_capacity_with_codebook(book: &StskCodebook<f64>, cfg: &SimConfig) -> Vec<CapacityPoint> {
    cfg.snr_db
        .iter()
        .map(|&snr| CapacityPoint {
            snr_db: snr,
            estimate: metrics::dcmc_capacity(
                book,
                snr,
                cfg.n,
                cfg.capacity_samples,
                derive_seed(derive_seed(cfg.seed, CAPACITY_TAG), snr.to_bits()),
            ),
        })
        .collect()
}

pub fn run_capacity_campaign(cfg: &SimConfig) -> Result<Vec<CapacityPoint>> {
    Ok(run_capacity_with_codebook(&build_codebook(cfg)?, cfg))
}

/// How a gain-table row obtains its DM set.
#[derive(Clone, Debug)]
pub enum DmRecipe {
    Fec(FecParams<f64>),
    Cda(CdaParams<f64>),
    Fixture,
    Set(DispersionMatrixSet<f64>),
}

#[derive(Clone, Debug)]
pub struct GainEntry {
    pub label: String,
    pub signal: ConstellationSpec,
    pub recipe: DmRecipe,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GainRow {
    pub label: String,
    pub family: String,
    pub q: usize,
    pub l: usize,
    pub coding_gain: Option<f64>,
    pub diversity_order: Option<usize>,
    pub error: Option<String>,
}

fn entry(label: &str, signal: ConstellationSpec, recipe: DmRecipe) -> GainEntry {
    GainEntry {
        label: label.into(),
        signal,
        recipe,
    }
}

fn cda_row(code_order: usize, t_pi: f64, delta_pi: f64, subset: CdaSubset) -> DmRecipe {
    let pi = std::f64::consts::PI;
    let mut p = CdaParams::from_angles(code_order, 2, t_pi * pi, delta_pi * pi, 0.0);
    p.subset = subset;
    DmRecipe::Cda(p)
}

/// The example constructions plus the rate-scaling rows for CSTSK(2,2,2,Q).
///
/// The larger-Q rows keep QPSK signalling and take their DMs from codes over
/// a larger PSK alphabet `L'`: FEC with `x² - exp(j2π/L')`, CDA with the
/// listed `(t_2, δ)` pairs.
pub fn default_gain_entries() -> Vec<GainEntry> {
    use ConstellationSpec::Psk;
    vec![
        entry("example FEC QPSK Q=4", Psk(4), DmRecipe::Fec(FecParams::example1())),
        entry("example CDA BPSK Q=8", Psk(2), DmRecipe::Cda(CdaParams::example2())),
        entry("printed CO BPSK Q=8", Psk(2), DmRecipe::Fixture),
        entry("FEC QPSK Q=16 (16-PSK code)", Psk(4), DmRecipe::Fec(FecParams::root_of_unity_poly(16, 2))),
        entry("FEC QPSK Q=64 (64-PSK code)", Psk(4), DmRecipe::Fec(FecParams::root_of_unity_poly(64, 2))),
        entry(
            "CDA QPSK Q=4 (BPSK code, m=2 r=1)",
            Psk(4),
            cda_row(2, 3.0 / 16.0, 0.5, CdaSubset::Truncated { m: 2, r: 1 }),
        ),
        entry(
            "CDA QPSK Q=16 (QPSK code, m=2 r=1)",
            Psk(4),
            cda_row(4, 3.0 / 8.0, 0.75, CdaSubset::Truncated { m: 2, r: 1 }),
        ),
        entry("CDA QPSK Q=64 (QPSK code, full)", Psk(4), cda_row(4, 0.25, 27.0 / 16.0, CdaSubset::Full)),
    ]
}

fn gain_row(e: &GainEntry) -> GainRow {
    let mut row = GainRow {
        label: e.label.clone(),
        family: String::new(),
        q: 0,
        l: e.signal.order(),
        coding_gain: None,
        diversity_order: None,
        error: None,
    };
    let built = (|| -> Result<(DispersionMatrixSet<f64>, Constellation<f64>)> {
        let s = e.signal.build::<f64>()?;
        let set = match &e.recipe {
            DmRecipe::Fec(p) => fec_dm_set(&make_psk(p.code_order)?, p)?,
            DmRecipe::Cda(p) => cda_dm_set(&make_psk(p.code_order)?, p)?,
            DmRecipe::Fixture => dispersion::fixture_co_bpsk8(),
            DmRecipe::Set(set) => set.clone(),
        };
        Ok((set, s))
    })();
    let (set, s) = match built {
        Ok(x) => x,
        Err(err) => {
            row.error = Some(err.to_string());
            return row;
        }
    };
    row.family = set.family().to_string();
    row.q = set.q();
    match codebook::expand(&s, &set) {
        Ok(book) => {
            let m = metrics::code_metrics(&book);
            row.coding_gain = m.coding_gain;
            row.diversity_order = Some(m.diversity_order);
        }
        Err(err) => row.error = Some(err.to_string()),
    }
    row
}

/// Evaluates every entry; a failing entry is reported in its row.
pub fn run_gain_table(entries: &[GainEntry]) -> Vec<GainRow> {
    entries.iter().map(gain_row).collect()
}

/// Single-row table for the construction a config describes.
pub fn gain_entry_from_config(cfg: &SimConfig) -> Result<GainEntry> {
    Ok(entry(
        &format!("{} {}", cfg.dm_family, cfg.constellation),
        cfg.constellation.clone(),
        DmRecipe::Set(build_dms(cfg)?),
    ))
}

/// Outcome of one verification check, in the decomposition CSV schema.
///
/// For invariant checks `domain_size` counts the items examined,
/// `image_size` those that pass and `collisions` those that fail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub check: String,
    pub domain_size: usize,
    pub image_size: usize,
    pub collisions: usize,
    pub pass: bool,
}

impl CheckLine {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.check, self.domain_size, self.image_size, self.collisions, self.pass
        )
    }
}

impl From<&DecompositionReport> for CheckLine {
    fn from(r: &DecompositionReport) -> Self {
        Self {
            check: r.check.clone(),
            domain_size: r.domain_size,
            image_size: r.image_size,
            collisions: r.collisions,
            pass: r.is_bijection(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckLine>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, check: &str, total: usize, failing: usize) {
        self.checks.push(CheckLine {
            check: check.into(),
            domain_size: total,
            image_size: total - failing,
            collisions: failing,
            pass: failing == 0,
        });
    }
}

fn verify_qam(cfg: &SimConfig, s: &Constellation<f64>, report: &mut VerifyReport) -> Result<()> {
    let coeffs = match &cfg.fec_poly {
        Some(c) => c.clone(),
        None => FecParams::<f64>::root_of_unity_poly(4, cfg.m).coeffs,
    };
    let basis = companion_powers(&coeffs)?;
    let (sym, e) = codebook::qam_decompose(s, &basis, cfg.fec_pivot)?;
    let target = codebook::ldc_code(s, &basis);
    let r = verify_decomposition(&format!("rotation_decomposition_{}", cfg.constellation), &sym, &e, &target);
    report.notes.push(format!(
        "{}: |S_sym| = {}, |E| = {}, |C| = {}",
        cfg.constellation,
        sym.len(),
        e.len(),
        r.target_size
    ));
    let expected_e = (s.order() / sym.len()) * s.order().pow(basis.len() as u32 - 1);
    report.push("rotation_set_size", 1, usize::from(e.len() != expected_e));
    report.checks.push((&r).into());
    Ok(())
}

/// Runs the invariant and decomposition checks for the configured construction.
///
/// DM files are loaded without validation so that a corrupted set produces
/// failing checks rather than a load error.
pub fn run_verify(cfg: &SimConfig) -> Result<VerifyReport> {
    let s = cfg.constellation.build::<f64>()?;
    let mut report = VerifyReport::default();
    if s.kind() != ConstellationKind::Psk {
        verify_qam(cfg, &s, &mut report)?;
        return Ok(report);
    }
    let set = match cfg.dm_family {
        DmFamilySpec::File => dmfile::read_dm_file_unchecked(cfg.dm_file.as_ref().expect("validated"))?,
        _ => build_dms(cfg)?,
    };
    check_shape(cfg, &set)?;
    let power_tol = if set.family() == DmFamily::Fixture { FIXTURE_POWER_TOL } else { POWER_TOL };
    report.push("power_constraint", set.q(), set.power_violations(power_tol).len());
    report.push("distinct_dms", set.q(), set.duplicate_pairs().len());

    let words: Vec<CMat<f64>> = set
        .matrices()
        .iter()
        .flat_map(|a| s.points().iter().map(move |&z| a.scale(z)))
        .collect();
    let dup = duplicate_pairs(&words, dispersion::MATRIX_EQ_TOL).len();
    report.push("codeword_injectivity", words.len(), dup);
    report.notes.push(format!(
        "Q = {}, L = {}, |C| = {} distinct of {}",
        set.q(),
        s.order(),
        words.len() - dup,
        words.len()
    ));

    if dup == 0 && words.len() >= 2 {
        let book = codebook::expand(&s, &set)?;
        let div = metrics::diversity_order(&book)?;
        report.notes.push(format!("diversity order {div} (M = {})", cfg.m));
        if matches!(cfg.dm_family, DmFamilySpec::Fec | DmFamilySpec::Cda) {
            report.push("full_diversity", 1, usize::from(div != cfg.m));
        }
        // χ·K = vec(s·A_p) for every codeword
        let mut bad = 0;
        for i in 0..book.len() {
            let (p, q) = book.split(i);
            let k = codebook::k_vector(book.q(), p, s.points()[q])?;
            let lhs = book.chi().mul_vec(&k.k);
            let rhs = book.codeword(i).vec();
            if lhs.iter().zip(&rhs).any(|(a, b)| (a - b).norm() > 1e-12) {
                bad += 1;
            }
        }
        report.push("equivalent_input_model", book.len(), bad);
    }

    // S × E → C holds for the full decomposed set over its own code alphabet
    let decomposition_applies = cfg.q.is_none() && cfg.code_psk.is_none_or(|l| l == s.order());
    match cfg.dm_family {
        DmFamilySpec::Fec if decomposition_applies && cfg.fec_subset == SubsetSpec::Full => {
            let target = fec_code(&s, &fec_params(cfg, &s)?)?;
            report.checks.push((&verify_decomposition("fec_decomposition", s.points(), set.matrices(), &target)).into());
        }
        DmFamilySpec::Cda if decomposition_applies && cfg.cda_subset == SubsetSpec::Full => {
            let target = cda_code(&s, &cda_params(cfg, &s)?)?;
            report.checks.push((&verify_decomposition("cda_decomposition", s.points(), set.matrices(), &target)).into());
        }
        _ => report
            .notes
            .push("decomposition check skipped: needs a full FEC/CDA set over the signalling alphabet".into()),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> SimConfig {
        SimConfig::parse(text).unwrap()
    }

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(0, 100, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.03 && hi < 0.04);
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
    }

    #[test]
    fn training_blocks_are_unitary_scaled() {
        for b in 0..4 {
            let x = training_block(b, 2);
            let g = x.matmul(&x.adjoint());
            assert!(g.approx_eq(&CMat::identity(2), 1e-12));
            assert!((x.norm_sqr() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_trial_point() {
        let c = cfg("snr_db = 10\nmax_trials = 1\n");
        let pts = run_ser_campaign(&c).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].trials, 1);
    }

    #[test]
    fn stopping_rule() {
        let c = cfg("snr_db = 0\nmin_errors = 7\nmax_trials = 100000\n");
        let p = &run_ser_campaign(&c).unwrap()[0];
        assert_eq!(p.errors, 7);
        assert!(p.trials < 100_000);
        let c = cfg("snr_db = 30\nmin_errors = 1000\nmax_trials = 3000\n");
        let p = &run_ser_campaign(&c).unwrap()[0];
        assert_eq!(p.trials, 3000);
    }

    #[test]
    fn semiblind_frames_truncate_exactly() {
        let c = cfg("constellation = psk:2\ndm_family = CDA\ndetector = semiblind:1\nsnr_db = 5\nmax_trials = 250\nmin_errors = 100000\n");
        let p = &run_ser_campaign(&c).unwrap()[0];
        assert_eq!(p.trials, 250);
    }

    #[test]
    fn gain_table_defaults() {
        let rows = run_gain_table(&default_gain_entries());
        assert!((rows[0].coding_gain.unwrap() - 1.0).abs() < 1e-9);
        assert!((rows[1].coding_gain.unwrap() - 1.0).abs() < 1e-9);
        assert!((rows[2].coding_gain.unwrap() - 0.0455).abs() < 5e-3);
        assert_eq!(rows[3].q, 16);
        assert_eq!(rows[4].q, 64);
        assert!((rows[3].coding_gain.unwrap() / 0.0058 - 1.0).abs() < 0.1);
        assert!((rows[4].coding_gain.unwrap() / 0.00002318 - 1.0).abs() < 0.1);
        assert_eq!((rows[5].q, rows[6].q, rows[7].q), (4, 16, 64));
    }

    #[test]
    fn gain_row_errors_are_isolated() {
        let bad = entry("bad", ConstellationSpec::Psk(3), DmRecipe::Fixture);
        let rows = run_gain_table(&[bad, default_gain_entries().remove(0)]);
        assert!(rows[0].error.is_some());
        assert!(rows[1].error.is_none());
    }

    #[test]
    fn verify_examples() {
        let r = run_verify(&cfg("")).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.checks.iter().any(|c| c.check == "fec_decomposition"));
        let r = run_verify(&cfg("constellation = psk:2\ndm_family = CDA\n")).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = run_verify(&cfg("constellation = star:16\n")).unwrap();
        assert!(r.passed());
        assert!(r.notes[0].contains("|E| = 32"));
    }

    #[test]
    fn config_and_construction_errors() {
        assert!(build_dms(&cfg("constellation = sqam:16\n")).is_err());
        assert!(build_dms(&cfg("Q = 5\n")).is_err());
        assert_eq!(build_dms(&cfg("Q = 3\n")).unwrap().q(), 3);
        let c = cfg("constellation = psk:2\ndm_family = CDA\ndetector = mf:9\nsnr_db = 1\n");
        assert!(run_ser_campaign(&c).is_err());
    }
}
