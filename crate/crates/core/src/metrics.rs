//! Code quality figures and rate bookkeeping.

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;

use crate::codebook::StskCodebook;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::rng;
use crate::scalar::Real;

/// `min_{X≠X'} |det(ΔΔᴴ)|` with `Δ = X - X'`.
///
/// This is the figure tabulated for the example constructions. The
/// determinant-criterion form with the `1/M` root is
/// [`coding_gain_normalized`]; the two agree whenever the minimum is 0 or 1.
pub fn coding_gain<T: Real>(book: &StskCodebook<T>) -> Result<T> {
    let n = book.len();
    if n < 2 {
        return Err(Error::TooFewCodewords(n));
    }
    let gain = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let x = book.codeword(i);
            (i + 1..n).fold(T::infinity(), |best, j| {
                let d = x.as_ref() - book.codeword(j).as_ref();
                best.min(d.matmul(&d.adjoint()).det().norm())
            })
        })
        .reduce(T::infinity, T::min);
    Ok(gain)
}

/// `min |det(ΔΔᴴ)|^(1/M)`.
pub fn coding_gain_normalized<T: Real>(book: &StskCodebook<T>) -> Result<T> {
    Ok(coding_gain(book)?.powf(T::lit(book.m() as f64).recip()))
}

/// Minimum rank of a codeword difference.
pub fn diversity_order<T: Real>(book: &StskCodebook<T>) -> Result<usize> {
    let n = book.len();
    if n < 2 {
        return Err(Error::TooFewCodewords(n));
    }
    let div = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let x = book.codeword(i);
            (i + 1..n)
                .map(|j| (x.as_ref() - book.codeword(j).as_ref()).rank())
                .min()
                .unwrap_or(usize::MAX)
        })
        .min()
        .unwrap_or(usize::MAX);
    Ok(div)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodeMetrics {
    /// `None` for codebooks with a single codeword.
    pub coding_gain: Option<f64>,
    /// Rank of the lone DM when there is only one codeword.
    pub diversity_order: usize,
    pub rate_bpcu: f64,
}

pub fn code_metrics<T: Real>(book: &StskCodebook<T>) -> CodeMetrics {
    match (coding_gain(book), diversity_order(book)) {
        (Ok(g), Ok(d)) => CodeMetrics {
            coding_gain: Some(g.to_f64_lossy()),
            diversity_order: d,
            rate_bpcu: book.rate(),
        },
        _ => CodeMetrics {
            coding_gain: None,
            diversity_order: book.codeword(0).rank(),
            rate_bpcu: book.rate(),
        },
    }
}

/// `log2(QL)/T`.
pub fn rate_stsk(q: usize, l: usize, t: usize) -> f64 {
    ((q * l) as f64).log2() / t as f64
}

/// `(V - r + 1)·log2(L)/T` for an LDC-derived set with `r` pinned coefficients.
pub fn rate_ldc(v: usize, r: usize, l: usize, t: usize) -> f64 {
    (v + 1 - r) as f64 * (l as f64).log2() / t as f64
}

/// `(M² - mr + 1)·log2(L)/T` for the CDA subset `(m, r)`.
pub fn rate_cda(m: usize, mm: usize, r: usize, l: usize, t: usize) -> f64 {
    (m * m + 1 - mm * r) as f64 * (l as f64).log2() / t as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConfigOption {
    pub q: usize,
    pub l: usize,
}

/// Every `(Q, L) = (2^k, 2^(RT-k))`, `k = 0..=RT`.
pub fn enumerate_configs(rate: f64, t: usize) -> Result<Vec<ConfigOption>> {
    let bits = rate * t as f64;
    let rounded = bits.round();
    if !bits.is_finite() || bits < 0.0 || (bits - rounded).abs() > 1e-9 || rounded > 62.0 {
        return Err(Error::param(format!("R·T = {bits} is not a small non-negative integer")));
    }
    let bits = rounded as u32;
    Ok((0..=bits)
        .map(|k| ConfigOption {
            q: 1 << k,
            l: 1 << (bits - k),
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityEstimate {
    pub bpcu: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
}

/// Samples per random stream in the capacity estimator. Fixed so that the
/// estimate does not depend on the worker count.
const CAPACITY_CHUNK: usize = 256;

/// Monte-Carlo DCMC capacity (bits per channel use) with `N0 = 1`.
///
/// Each sample draws `H` (`N×M`), noise `N` (`N×T`) and a uniform codeword
/// from its own stream in that order. Chunk `c` uses stream `c` of `seed`,
/// so different codebooks of the same size see identical channel draws.
/// The point estimate and the normal-approximation 95% interval are clamped
/// to `[0, log2|C|/T]`.
pub fn dcmc_capacity<T: Real>(book: &StskCodebook<T>, snr_db: f64, n_rx: usize, samples: usize, seed: u64) -> CapacityEstimate {
    let size = book.len();
    let rmax = book.rate();
    if samples == 0 || size == 0 {
        return CapacityEstimate {
            bpcu: 0.0,
            ci_low: 0.0,
            ci_high: 0.0,
            samples: 0,
        };
    }
    let (m, t) = (book.m(), book.t());
    let amp = T::lit((10f64.powf(snr_db / 10.0) / m as f64).sqrt());
    let log2_size = (size as f64).log2();
    let words: Vec<CMat<T>> = (0..size).map(|i| book.codeword(i).scale_real(amp)).collect();
    let chunks = samples.div_ceil(CAPACITY_CHUNK);

    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, c as u64);
            let count = CAPACITY_CHUNK.min(samples - c * CAPACITY_CHUNK);
            let mut hx: Vec<CMat<T>> = Vec::with_capacity(size);
            let (mut sum, mut sumsq) = (0.0, 0.0);
            for _ in 0..count {
                let h = rng::complex_normal_matrix(&mut r, n_rx, m, T::one());
                let noise = rng::complex_normal_matrix(&mut r, n_rx, t, T::one());
                let tx = r.random_range(0..size);
                hx.clear();
                hx.extend(words.iter().map(|w| h.matmul(w)));
                let noise_energy = noise.norm_sqr().to_f64_lossy();
                // exponent_j = -(‖H(X - X_j) + N‖² - ‖N‖²)
                let exps: Vec<f64> = hx
                    .iter()
                    .map(|hj| {
                        let d = hx[tx].as_slice().iter().zip(hj.as_slice()).zip(noise.as_slice()).fold(
                            T::zero(),
                            |acc, ((a, b), n): ((&Complex<T>, &Complex<T>), &Complex<T>)| acc + (a - b + n).norm_sqr(),
                        );
                        noise_energy - d.to_f64_lossy()
                    })
                    .collect();
                let peak = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = peak + exps.iter().map(|e| (e - peak).exp()).sum::<f64>().ln();
                let v = (log2_size - lse / std::f64::consts::LN_2) / t as f64;
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq)
        })
        .collect();

    let (sum, sumsq) = partial.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let half = 1.959_964 * (var / n).sqrt();
    let clamp = |x: f64| x.clamp(0.0, rmax);
    CapacityEstimate {
        bpcu: clamp(mean),
        ci_low: clamp(mean - half),
        ci_high: clamp(mean + half),
        samples,
    }
}
