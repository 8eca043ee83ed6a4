//! Block-fading MIMO channel: `Y = √(ρ/M)·H·X + N` with `N0 = 1`.
//!
//! `H` is constant over the `T` slots of a block. The vectorized form
//! `vec(Y) = √(ρ/M)·(I_T⊗H)·vec(X) + vec(N)` is carried alongside `Y` for
//! the single-stream receivers.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::rng::complex_normal_matrix;
use crate::scalar::Real;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Clone, Debug)]
pub struct ChannelBlock<T> {
    pub h: CMat<T>,
    pub n0: T,
    pub rho: T,
}

impl<T: Real> ChannelBlock<T> {
    pub fn n_rx(&self) -> usize {
        self.h.rows()
    }

    pub fn m(&self) -> usize {
        self.h.cols()
    }

    /// `√(ρ/M)`.
    pub fn amplitude(&self) -> T {
        (self.rho / T::lit(self.m() as f64)).sqrt()
    }
}

/// Draws `H` with i.i.d. CN(0,1) entries; `N0 = 1`.
pub fn sample_channel<T: Real, R: Rng + ?Sized>(n_rx: usize, m: usize, rho: T, rng: &mut R) -> ChannelBlock<T> {
    ChannelBlock {
        h: complex_normal_matrix(rng, n_rx, m, T::one()),
        n0: T::one(),
        rho,
    }
}

#[derive(Clone, Debug)]
pub struct Observation<T> {
    pub y: CMat<T>,
    pub y_bar: Vec<Complex<T>>,
    /// `I_T ⊗ H`.
    pub h_bar: CMat<T>,
}

/// Draws `N` with CN(0, N0) entries and transmits `x`.
pub fn transmit<T: Real, R: Rng + ?Sized>(block: &ChannelBlock<T>, x: &CMat<T>, rng: &mut R) -> Result<Observation<T>> {
    let noise = complex_normal_matrix(rng, block.n_rx(), x.cols(), block.n0);
    transmit_with_noise(block, x, &noise)
}

pub fn transmit_with_noise<T: Real>(block: &ChannelBlock<T>, x: &CMat<T>, noise: &CMat<T>) -> Result<Observation<T>> {
    if x.rows() != block.m() {
        return Err(Error::dims(format!("{} transmit rows", block.m()), x.rows().to_string()));
    }
    if noise.shape() != (block.n_rx(), x.cols()) {
        return Err(Error::dims(
            format!("{}×{} noise", block.n_rx(), x.cols()),
            format!("{}×{}", noise.rows(), noise.cols()),
        ));
    }
    let y = &block.h.matmul(x).scale_real(block.amplitude()) + noise;
    Ok(Observation {
        y_bar: y.vec(),
        h_bar: CMat::identity(x.cols()).kron(&block.h),
        y,
    })
}

/// `Ĥ = H + E` with `E` i.i.d. CN(0, σ). The perturbation is drawn even
/// when `σ = 0` so that the stream position does not depend on `σ`.
pub fn perturb_csir<T: Real, R: Rng + ?Sized>(h: &CMat<T>, sigma: T, rng: &mut R) -> CMat<T> {
    let e = complex_normal_matrix(rng, h.rows(), h.cols(), sigma);
    h + &e
}

/// Least-squares channel estimate from known blocks:
/// `Ĥ = √(M/ρ)·Y·Xᴴ·(X·Xᴴ)⁻¹` over the stacked `[X_1 … X_k]`.
pub fn ls_estimate<T: Real>(y_blocks: &[CMat<T>], x_blocks: &[CMat<T>], rho: T) -> Result<CMat<T>> {
    if y_blocks.is_empty() || y_blocks.len() != x_blocks.len() {
        return Err(Error::dims(
            format!("{} observation blocks", x_blocks.len()),
            y_blocks.len().to_string(),
        ));
    }
    let x = CMat::hstack(x_blocks);
    let y = CMat::hstack(y_blocks);
    if x.cols() != y.cols() {
        return Err(Error::dims(format!("{} stacked columns", x.cols()), y.cols().to_string()));
    }
    let m = x.rows();
    if x.rank() < m {
        return Err(Error::RankDeficient(format!(
            "stacked training has rank {} < M = {m}",
            x.rank()
        )));
    }
    let xh = x.adjoint();
    let gram_inv = x
        .matmul(&xh)
        .inverse()
        .ok_or_else(|| Error::RankDeficient("singular training Gram matrix".into()))?;
    let scale = (T::lit(m as f64) / rho).sqrt();
    Ok(y.matmul(&xh).matmul(&gram_inv).scale_real(scale))
}
