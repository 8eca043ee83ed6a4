use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the whole crate is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for finite inputs on f32/f64.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Widening conversion used for statistics and reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `tol` for f64, floored at a few thousand ulps for narrower types.
    fn tolerance(tol: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(4096.0);
        Self::lit(tol).max(floor)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `exp(j·theta)`.
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// `exp(j·2π·k/n)`.
pub fn root_of_unity<T: Real>(k: usize, n: usize) -> Complex<T> {
    let theta = T::TAU() * T::lit(k as f64) / T::lit(n as f64);
    cis(theta)
}

pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Returns `a` when `n == 4^a` with `a >= 1`.
pub fn log4_exact(n: usize) -> Option<u32> {
    if n < 4 || !is_power_of_two(n) {
        return None;
    }
    let bits = n.trailing_zeros();
    bits.is_multiple_of(2).then_some(bits / 2)
}
