//! Receivers.
//!
//! All detectors score a candidate `(p, q)` by the squared residual
//! `‖y − s_q·h_p‖²` of the vectorized model, where `h_p = √(ρ/M)·vec(H·A_p)`
//! is the effective column of DM `p`. Candidates are visited in `(p, q)`
//! lexicographic order and a later candidate only wins if it is better by
//! more than a relative `1e-12`, so exact and numerical ties both resolve to
//! the smallest `(p, q)`.

use num_complex::Complex;

use crate::channel::ls_estimate;
use crate::codebook::StskCodebook;
use crate::error::{Error, Result};
use crate::linalg::{inner, vec_norm_sqr, CMat};
use crate::scalar::Real;

const TIE_REL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decision<T> {
    pub p: usize,
    pub q: usize,
    pub metric: T,
}

fn residual<T: Real>(y: &[Complex<T>], s: Complex<T>, h: &[Complex<T>]) -> T {
    y.iter().zip(h).fold(T::zero(), |acc, (a, b)| acc + (a - s * b).norm_sqr())
}

/// Lexicographic search over `columns × points`; `columns` must be sorted by `p`.
fn search<T: Real>(y: &[Complex<T>], columns: &[(usize, Vec<Complex<T>>)], points: &[Complex<T>]) -> Result<Decision<T>> {
    let tie = T::lit(TIE_REL);
    let mut best: Option<Decision<T>> = None;
    for (p, h) in columns {
        for (q, &s) in points.iter().enumerate() {
            let metric = residual(y, s, h);
            let better = match &best {
                None => true,
                Some(b) => metric < b.metric - tie * b.metric.abs().max(T::one()),
            };
            if better {
                best = Some(Decision { p: *p, q, metric });
            }
        }
    }
    best.ok_or(Error::EmptyCodebook)
}

fn amplitude<T: Real>(rho: T, m: usize) -> T {
    (rho / T::lit(m as f64)).sqrt()
}

/// `M` from an `M² × Q` stacking matrix (`M = T` throughout).
fn antennas_from_chi<T: Real>(chi: &CMat<T>) -> Result<usize> {
    let mt = chi.rows();
    let m = (mt as f64).sqrt().round() as usize;
    if m * m != mt {
        return Err(Error::dims("χ with M·T = M² rows", mt.to_string()));
    }
    Ok(m)
}

fn vectorized_columns<T: Real>(h_bar: &CMat<T>, chi: &CMat<T>, rho: T, subset: &[usize]) -> Result<Vec<(usize, Vec<Complex<T>>)>> {
    if h_bar.cols() != chi.rows() {
        return Err(Error::dims(format!("H̄ with {} columns", chi.rows()), h_bar.cols().to_string()));
    }
    let amp = amplitude(rho, antennas_from_chi(chi)?);
    Ok(subset
        .iter()
        .map(|&p| {
            let col = h_bar.mul_vec(&chi.column(p));
            (p, col.into_iter().map(|z| z * amp).collect())
        })
        .collect())
}

/// Exhaustive ML over the codebook with channel `h` (true or estimated).
pub fn ml_detect<T: Real>(y: &CMat<T>, h: &CMat<T>, book: &StskCodebook<T>, rho: T) -> Result<Decision<T>> {
    if book.is_empty() {
        return Err(Error::EmptyCodebook);
    }
    if h.cols() != book.m() || y.rows() != h.rows() || y.cols() != book.t() {
        return Err(Error::dims(
            format!("Y: N×{} and H: N×{}", book.t(), book.m()),
            format!("Y: {}×{}, H: {}×{}", y.rows(), y.cols(), h.rows(), h.cols()),
        ));
    }
    let amp = amplitude(rho, book.m());
    let columns: Vec<(usize, Vec<Complex<T>>)> = book
        .dms()
        .matrices()
        .iter()
        .enumerate()
        .map(|(p, a)| (p, h.matmul(a).vec().into_iter().map(|z| z * amp).collect()))
        .collect();
    search(&y.vec(), &columns, book.constellation().points())
}

/// Single-stream ML on `ȳ = √(ρ/M)·H̄·χ·K + n`: one effective column per DM,
/// then a scalar symbol search per column.
pub fn single_stream_ml<T: Real>(
    y_bar: &[Complex<T>],
    h_bar: &CMat<T>,
    chi: &CMat<T>,
    points: &[Complex<T>],
    rho: T,
) -> Result<Decision<T>> {
    if y_bar.len() != h_bar.rows() {
        return Err(Error::dims(format!("ȳ of length {}", h_bar.rows()), y_bar.len().to_string()));
    }
    let all: Vec<usize> = (0..chi.cols()).collect();
    search(y_bar, &vectorized_columns(h_bar, chi, rho, &all)?, points)
}

/// Matched-filter shortlist followed by ML over the shortlisted DMs.
///
/// DMs are ranked by `|h_pᴴ·ȳ| / ‖h_p‖` (stable, so equal scores keep index
/// order); the best `shortlist` of them are searched exhaustively.
pub fn mf_detect<T: Real>(
    y_bar: &[Complex<T>],
    h_bar: &CMat<T>,
    chi: &CMat<T>,
    points: &[Complex<T>],
    rho: T,
    shortlist: usize,
) -> Result<Decision<T>> {
    let q = chi.cols();
    if shortlist == 0 || shortlist > q {
        return Err(Error::param(format!("MF shortlist {shortlist} outside 1..={q}")));
    }
    if y_bar.len() != h_bar.rows() {
        return Err(Error::dims(format!("ȳ of length {}", h_bar.rows()), y_bar.len().to_string()));
    }
    let all: Vec<usize> = (0..q).collect();
    let columns = vectorized_columns(h_bar, chi, rho, &all)?;
    let score = |h: &[Complex<T>]| {
        let norm = vec_norm_sqr(h).sqrt();
        if norm.is_zero() {
            T::zero()
        } else {
            inner(h, y_bar).norm() / norm
        }
    };
    let mut ranked: Vec<(usize, T)> = columns.iter().map(|(p, h)| (*p, score(h))).collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let mut keep: Vec<usize> = ranked[..shortlist].iter().map(|(p, _)| *p).collect();
    keep.sort_unstable();
    let short: Vec<(usize, Vec<Complex<T>>)> = keep.into_iter().map(|p| columns[p].clone()).collect();
    search(y_bar, &short, points)
}

#[derive(Clone, Debug)]
pub struct FrameResult<T> {
    pub decisions: Vec<Decision<T>>,
    pub channel_estimate: CMat<T>,
    pub iterations_run: usize,
}

/// Decision-directed channel estimation over one frame.
///
/// Iteration 0 estimates `H` from the training blocks alone and detects all
/// data blocks. Each further iteration re-estimates from training plus the
/// detected data blocks (weighted equally) and detects again.
pub fn iterative_semiblind<T: Real>(
    train_y: &[CMat<T>],
    train_x: &[CMat<T>],
    data_y: &[CMat<T>],
    book: &StskCodebook<T>,
    rho: T,
    iters: usize,
) -> Result<FrameResult<T>> {
    let detect_all = |h: &CMat<T>| -> Result<Vec<Decision<T>>> {
        data_y.iter().map(|y| ml_detect(y, h, book, rho)).collect()
    };
    let mut h = ls_estimate(train_y, train_x, rho)?;
    let mut decisions = detect_all(&h)?;
    let ys: Vec<CMat<T>> = train_y.iter().chain(data_y).cloned().collect();
    for _ in 0..iters {
        let xs: Vec<CMat<T>> = train_x
            .iter()
            .cloned()
            .chain(decisions.iter().map(|d| book.codeword(book.index(d.p, d.q)).into_owned()))
            .collect();
        h = ls_estimate(&ys, &xs, rho)?;
        decisions = detect_all(&h)?;
    }
    Ok(FrameResult {
        decisions,
        channel_estimate: h,
        iterations_run: iters,
    })
}
