//! STSK codebooks and decomposition checks.
//!
//! A codebook is the image of the product map `(s_q, A_p) ↦ s_q·A_p`. The
//! flat codeword index is `p·L + q`, so DM index is the outer loop. The
//! stacking matrix `χ` holds `vec(A_p)` in column `p`, which turns the
//! receive model into `y = √(ρ/M)·(I_T⊗H)·χ·K + n` with a one-hot `K`.

use std::borrow::Cow;

use num_complex::Complex;
use num_traits::Zero;

use crate::constellation::{Constellation, ConstellationKind};
use crate::dispersion::{linear_combinations, DispersionMatrixSet, MATRIX_EQ_TOL};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::matset::{duplicate_pairs, MatrixIndex};
use crate::scalar::Real;

/// Codebooks up to this many codewords are kept in memory.
pub const MATERIALIZE_LIMIT: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct StskCodebook<T> {
    constellation: Constellation<T>,
    dms: DispersionMatrixSet<T>,
    chi: CMat<T>,
    codewords: Option<Vec<CMat<T>>>,
}

/// Builds the codebook and checks that the product map is injective.
pub fn expand<T: Real>(s: &Constellation<T>, dms: &DispersionMatrixSet<T>) -> Result<StskCodebook<T>> {
    let all: Vec<CMat<T>> = dms
        .matrices()
        .iter()
        .flat_map(|a| s.points().iter().map(move |&z| a.scale(z)))
        .collect();
    if let Some(&(first, second)) = duplicate_pairs(&all, T::tolerance(MATRIX_EQ_TOL)).first() {
        return Err(Error::DuplicateCodeword { first, second });
    }
    let cols: Vec<Vec<Complex<T>>> = dms.matrices().iter().map(CMat::vec).collect();
    let chi = CMat::from_fn(dms.m() * dms.t(), dms.q(), |r, p| cols[p][r]);
    Ok(StskCodebook {
        constellation: s.clone(),
        dms: dms.clone(),
        chi,
        codewords: (all.len() <= MATERIALIZE_LIMIT).then_some(all),
    })
}

impl<T: Real> StskCodebook<T> {
    pub fn constellation(&self) -> &Constellation<T> {
        &self.constellation
    }

    pub fn dms(&self) -> &DispersionMatrixSet<T> {
        &self.dms
    }

    /// `MT × Q` stacking matrix.
    pub fn chi(&self) -> &CMat<T> {
        &self.chi
    }

    pub fn l(&self) -> usize {
        self.constellation.order()
    }

    pub fn q(&self) -> usize {
        self.dms.q()
    }

    pub fn m(&self) -> usize {
        self.dms.m()
    }

    pub fn t(&self) -> usize {
        self.dms.t()
    }

    pub fn len(&self) -> usize {
        self.l() * self.q()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `log2(QL)/T`.
    pub fn rate(&self) -> f64 {
        (self.len() as f64).log2() / self.t() as f64
    }

    pub fn index(&self, p: usize, q: usize) -> usize {
        p * self.l() + q
    }

    /// Inverse of [`index`](Self::index): `(p, q)`.
    pub fn split(&self, i: usize) -> (usize, usize) {
        (i / self.l(), i % self.l())
    }

    pub fn is_materialized(&self) -> bool {
        self.codewords.is_some()
    }

    /// Codeword `i = p·L + q`, borrowed when materialized.
    pub fn codeword(&self, i: usize) -> Cow<'_, CMat<T>> {
        match &self.codewords {
            Some(v) => Cow::Borrowed(&v[i]),
            None => {
                let (p, q) = self.split(i);
                Cow::Owned(self.dms.matrices()[p].scale(self.constellation.points()[q]))
            }
        }
    }

    pub fn k_vector(&self, p: usize, s: Complex<T>) -> Result<EquivalentInput<T>> {
        if !self.constellation.contains(s) {
            return Err(Error::param(format!("{s} is not a constellation point")));
        }
        k_vector(self.q(), p, s)
    }
}

/// The one-hot equivalent input `K` of the vectorized model.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalentInput<T> {
    pub k: Vec<Complex<T>>,
}

impl<T: Real> EquivalentInput<T> {
    /// Position and value of the single nonzero entry.
    pub fn active(&self) -> Option<(usize, Complex<T>)> {
        self.k.iter().position(|z| !z.is_zero()).map(|p| (p, self.k[p]))
    }
}

pub fn k_vector<T: Real>(q: usize, p: usize, s: Complex<T>) -> Result<EquivalentInput<T>> {
    if p >= q {
        return Err(Error::IndexOutOfRange { index: p, len: q });
    }
    let mut k = vec![Complex::zero(); q];
    k[p] = s;
    Ok(EquivalentInput { k })
}

/// Outcome of an exhaustive `S × E → C` check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionReport {
    pub check: String,
    /// `|S|·|E|`.
    pub domain_size: usize,
    /// Distinct products.
    pub image_size: usize,
    /// Distinct entries of the target set.
    pub target_size: usize,
    /// Products that repeat an earlier product.
    pub collisions: usize,
    /// Products missing from the target.
    pub outside: usize,
}

impl DecompositionReport {
    pub fn contained(&self) -> bool {
        self.outside == 0
    }

    /// Injective, lands in the target and hits all of it.
    pub fn is_bijection(&self) -> bool {
        self.collisions == 0 && self.outside == 0 && self.domain_size == self.target_size
    }

    pub const CSV_HEADER: &'static str = "check,domain_size,image_size,collisions,pass";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.check,
            self.domain_size,
            self.image_size,
            self.collisions,
            self.is_bijection()
        )
    }
}

/// Forms every `s·E_j` and compares against `target`.
pub fn verify_decomposition<T: Real>(
    check: &str,
    s_factor: &[Complex<T>],
    e: &[CMat<T>],
    target: &[CMat<T>],
) -> DecompositionReport {
    let tol = T::tolerance(MATRIX_EQ_TOL);
    let products: Vec<CMat<T>> = e.iter().flat_map(|a| s_factor.iter().map(move |&z| a.scale(z))).collect();
    let collisions = duplicate_pairs(&products, tol).len();
    let target_size = target.len() - duplicate_pairs(target, tol).len();
    let index = MatrixIndex::new(target, tol);
    let outside = products.iter().filter(|x| !index.contains(x)).count();
    DecompositionReport {
        check: check.to_string(),
        domain_size: products.len(),
        image_size: products.len() - collisions,
        target_size,
        collisions,
        outside,
    }
}

/// All `Σ f_i·B_i` with every `f_i ∈ S`: the LDC generated by `basis`.
pub fn ldc_code<T: Real>(s: &Constellation<T>, basis: &[CMat<T>]) -> Vec<CMat<T>> {
    linear_combinations(basis, &vec![s.points().to_vec(); basis.len()])
}

/// Symmetry symbols `S_sym` paired with the rotation-reduced matrix set `E`.
pub type QamSplit<T> = (Vec<Complex<T>>, Vec<CMat<T>>);

/// Splits a QAM-alphabet LDC into `(S_sym, E)` with
/// `E = { f_l·B_l + Σ_{i≠l} f_i·B_i : f_l ∈ S', f_i ∈ S }`.
pub fn qam_decompose<T: Real>(s: &Constellation<T>, basis: &[CMat<T>], pivot: usize) -> Result<QamSplit<T>> {
    if s.kind() == ConstellationKind::Psk {
        return Err(Error::InvalidConstellation(
            "rotation decomposition applies to square or star QAM".into(),
        ));
    }
    if pivot >= basis.len() {
        return Err(Error::IndexOutOfRange {
            index: pivot,
            len: basis.len(),
        });
    }
    let sym = s.symmetry_decompose();
    let coeffs: Vec<Vec<Complex<T>>> = (0..basis.len())
        .map(|i| if i == pivot { sym.s_prime.clone() } else { s.points().to_vec() })
        .collect();
    Ok((sym.s_sym, linear_combinations(basis, &coeffs)))
}
