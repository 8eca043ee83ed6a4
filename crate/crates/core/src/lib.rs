//! Structured dispersion matrices for Coherent Space-Time Shift Keying (CSTSK).
//!
//! The crate builds dispersion-matrix (DM) sets from Field-Extension codes
//! (companion-matrix powers) and Cyclic-Division-Algebra codes, checks that
//! the resulting space-time codes decompose as `constellation × DM set`,
//! and evaluates them over a simulated block-fading MIMO channel: coding
//! gain, DCMC capacity and Monte-Carlo symbol error rate under several
//! receivers.
//!
//! All numerical code is generic over the real scalar ([`Real`], implemented
//! for `f32` and `f64`). The `*64` aliases below are what the simulator and
//! CLI use.
//!
//! ```
//! use stsk_core::{constellation, dispersion, codebook, metrics};
//!
//! let qpsk = constellation::make_psk::<f64>(4).unwrap();
//! let dms = dispersion::fec_dm_set(&qpsk, &dispersion::FecParams::example1()).unwrap();
//! let book = codebook::expand(&qpsk, &dms).unwrap();
//! assert_eq!(book.len(), 16);
//! assert!((metrics::coding_gain(&book).unwrap() - 1.0).abs() < 1e-9);
//! ```

pub mod channel;
pub mod codebook;
pub mod constellation;
pub mod detect;
pub mod dispersion;
pub mod dmfile;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod matset;
pub mod metrics;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::CMat;
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

pub type CMat64 = linalg::CMat<f64>;
pub type CMat32 = linalg::CMat<f32>;

pub type Constellation64 = constellation::Constellation<f64>;
pub type Constellation32 = constellation::Constellation<f32>;

pub type DispersionMatrixSet64 = dispersion::DispersionMatrixSet<f64>;
pub type DispersionMatrixSet32 = dispersion::DispersionMatrixSet<f32>;

pub type StskCodebook64 = codebook::StskCodebook<f64>;
pub type StskCodebook32 = codebook::StskCodebook<f32>;

pub type ChannelBlock64 = channel::ChannelBlock<f64>;
pub type ChannelBlock32 = channel::ChannelBlock<f32>;

pub type Decision64 = detect::Decision<f64>;
