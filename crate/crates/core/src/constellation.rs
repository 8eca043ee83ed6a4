//! PSK, square-QAM and star-QAM signal sets with their multiplicative
//! symmetry structure.
//!
//! A constellation `S` decomposes as `S_sym × S'`: `S_sym` is the cyclic
//! group of rotations `{g^k}` the set is invariant under and `S'` holds one
//! representative per rotation orbit. For PSK the whole set is the group and
//! `S' = {1}`; for square QAM `g = j` and `S'` is the first quadrant; for
//! star QAM `g = exp(jπ/2^a)` and `S'` is the set of ring radii.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::{cis, is_power_of_two, log4_exact, root_of_unity, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstellationKind {
    Psk,
    SquareQam,
    StarQam,
}

#[derive(Clone, Debug)]
pub struct Constellation<T> {
    kind: ConstellationKind,
    points: Vec<Complex<T>>,
    generator: Complex<T>,
    /// Ring radii of star QAM, innermost first; empty for other kinds.
    radii: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct SymmetryDecomposition<T> {
    /// Rotation subgroup `{g^k}`.
    pub s_sym: Vec<Complex<T>>,
    /// One representative per rotation orbit.
    pub s_prime: Vec<Complex<T>>,
    /// First-quadrant points (square QAM), ring radii (star QAM), `{1}` (PSK).
    pub quadrant_set: Vec<Complex<T>>,
}

/// Unrotated L-PSK, `exp(j2πk/L)` for `k = 0..L`. `L = 1` gives `{1}`.
pub fn make_psk<T: Real>(order: usize) -> Result<Constellation<T>> {
    if !is_power_of_two(order) {
        return Err(Error::InvalidConstellation(format!("PSK order {order} is not a power of two")));
    }
    let mut points: Vec<Complex<T>> = (0..order).map(|k| root_of_unity(k, order)).collect();
    points[0] = Complex::one();
    Ok(Constellation {
        kind: ConstellationKind::Psk,
        points,
        generator: root_of_unity(1 % order.max(1), order),
        radii: Vec::new(),
    })
}

/// Square `L = 4^a` QAM with unit average energy. Points run row by row from
/// the top (largest imaginary part), left to right.
pub fn make_square_qam<T: Real>(order: usize) -> Result<Constellation<T>> {
    let a = log4_exact(order)
        .ok_or_else(|| Error::InvalidConstellation(format!("square QAM order {order} is not 4^a with a >= 1")))?;
    let side = 1usize << a;
    // levels ±1, ±3, …; mean energy of the unnormalized grid is 2(L-1)/3
    let scale = (T::lit(2.0) * T::lit((order - 1) as f64) / T::lit(3.0)).sqrt().recip();
    let level = |k: usize| T::lit(2.0 * k as f64 - (side as f64 - 1.0)) * scale;
    let mut points = Vec::with_capacity(order);
    for row in 0..side {
        for col in 0..side {
            points.push(Complex::new(level(col), level(side - 1 - row)));
        }
    }
    Ok(Constellation {
        kind: ConstellationKind::SquareQam,
        points,
        generator: Complex::new(T::zero(), T::one()),
        radii: Vec::new(),
    })
}

/// Star QAM: `2^(a-1)` rings with geometrically spaced radii (`ring_ratio`)
/// and `2^(a+1)` equally spaced phases per ring starting on the positive real
/// axis; unit average energy. Ring-major ordering.
pub fn make_star_qam<T: Real>(order: usize, ring_ratio: T) -> Result<Constellation<T>> {
    let a = log4_exact(order)
        .ok_or_else(|| Error::InvalidConstellation(format!("star QAM order {order} is not 4^a with a >= 1")))?;
    if !ring_ratio.is_finite() || ring_ratio <= T::one() {
        return Err(Error::InvalidConstellation(format!("star QAM ring ratio must be > 1, got {ring_ratio}")));
    }
    let rings = 1usize << (a - 1);
    let phases = 1usize << (a + 1);
    let raw: Vec<T> = (0..rings).map(|k| ring_ratio.powi(k as i32)).collect();
    let mean = raw.iter().fold(T::zero(), |s, r| s + *r * *r) / T::lit(rings as f64);
    let norm = mean.sqrt().recip();
    let radii: Vec<T> = raw.iter().map(|r| *r * norm).collect();
    let mut points = Vec::with_capacity(order);
    for r in &radii {
        for k in 0..phases {
            let z = if k == 0 { Complex::one() } else { root_of_unity(k, phases) };
            points.push(z * *r);
        }
    }
    Ok(Constellation {
        kind: ConstellationKind::StarQam,
        points,
        generator: cis(T::PI() / T::lit(f64::from(1u32 << a))),
        radii,
    })
}

impl<T: Real> Constellation<T> {
    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn generator(&self) -> Complex<T> {
        self.generator
    }

    pub fn is_psk(&self) -> bool {
        self.kind == ConstellationKind::Psk
    }

    pub fn average_energy(&self) -> T {
        self.points.iter().fold(T::zero(), |s, z| s + z.norm_sqr()) / T::lit(self.points.len() as f64)
    }

    /// Index of the point within `tol` of `z`.
    pub fn index_of(&self, z: Complex<T>, tol: T) -> Option<usize> {
        self.points.iter().position(|p| (p - z).norm() <= tol)
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        self.index_of(z, T::tolerance(1e-12)).is_some()
    }

    /// Splits the set into its rotation group and orbit representatives.
    pub fn symmetry_decompose(&self) -> SymmetryDecomposition<T> {
        match self.kind {
            ConstellationKind::Psk => SymmetryDecomposition {
                s_sym: self.points.clone(),
                s_prime: vec![Complex::one()],
                quadrant_set: vec![Complex::one()],
            },
            ConstellationKind::SquareQam => {
                let s_sym = powers(self.generator, 4);
                let first: Vec<Complex<T>> = self
                    .points
                    .iter()
                    .copied()
                    .filter(|z| z.re > T::zero() && z.im > T::zero())
                    .collect();
                SymmetryDecomposition {
                    s_sym,
                    s_prime: first.clone(),
                    quadrant_set: first,
                }
            }
            ConstellationKind::StarQam => {
                let phases = self.points.len() / self.radii.len();
                let amps: Vec<Complex<T>> = self.radii.iter().map(|r| Complex::new(*r, T::zero())).collect();
                SymmetryDecomposition {
                    s_sym: powers(self.generator, phases),
                    s_prime: amps.clone(),
                    quadrant_set: amps,
                }
            }
        }
    }
}

fn powers<T: Real>(g: Complex<T>, n: usize) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(n);
    let mut z = Complex::one();
    for _ in 0..n {
        out.push(z);
        z *= g;
    }
    out
}

impl<T: Real> SymmetryDecomposition<T> {
    /// For every point of `c`, the number of `(s_sym, s')` pairs whose
    /// product lands on it. Unique factorization means all ones.
    pub fn factorization_counts(&self, c: &Constellation<T>) -> Vec<usize> {
        let tol = T::tolerance(1e-12);
        let mut counts = vec![0usize; c.order()];
        for g in &self.s_sym {
            for s in &self.s_prime {
                if let Some(idx) = c.index_of(g * s, tol) {
                    counts[idx] += 1;
                }
            }
        }
        counts
    }

    /// `(s_sym, s') ↦ s_sym·s'` is a bijection onto the constellation.
    pub fn is_unique_factorization(&self, c: &Constellation<T>) -> bool {
        self.s_sym.len() * self.s_prime.len() == c.order() && self.factorization_counts(c).iter().all(|&n| n == 1)
    }
}

/// Textual constellation spec: `psk:L`, `sqam:L`, `star:L[:ratio]`.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstellationSpec {
    Psk(usize),
    SquareQam(usize),
    StarQam(usize, f64),
}

pub const DEFAULT_RING_RATIO: f64 = 2.0;

impl ConstellationSpec {
    pub fn build<T: Real>(&self) -> Result<Constellation<T>> {
        match *self {
            ConstellationSpec::Psk(l) => make_psk(l),
            ConstellationSpec::SquareQam(l) => make_square_qam(l),
            ConstellationSpec::StarQam(l, r) => make_star_qam(l, T::lit(r)),
        }
    }

    pub fn order(&self) -> usize {
        match *self {
            ConstellationSpec::Psk(l) | ConstellationSpec::SquareQam(l) | ConstellationSpec::StarQam(l, _) => l,
        }
    }
}

impl FromStr for ConstellationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let bad = || Error::InvalidConstellation(format!("cannot parse constellation spec `{s}`"));
        let order = |t: &str| t.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            ["psk", l] => Ok(ConstellationSpec::Psk(order(l)?)),
            ["sqam", l] => Ok(ConstellationSpec::SquareQam(order(l)?)),
            ["star", l] => Ok(ConstellationSpec::StarQam(order(l)?, DEFAULT_RING_RATIO)),
            ["star", l, r] => Ok(ConstellationSpec::StarQam(order(l)?, r.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ConstellationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstellationSpec::Psk(l) => write!(f, "psk:{l}"),
            ConstellationSpec::SquareQam(l) => write!(f, "sqam:{l}"),
            ConstellationSpec::StarQam(l, r) => write!(f, "star:{l}:{r}"),
        }
    }
}
