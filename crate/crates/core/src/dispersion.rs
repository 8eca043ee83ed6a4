//! Dispersion-matrix (DM) sets.
//!
//! Two algebraic families are built here:
//!
//! * **FEC-DMs** from field-extension codes `{Σ f_i C^i}` where `C` is the
//!   companion matrix of a monic polynomial irreducible over `Q(S)`. Fixing
//!   one coefficient (the pivot) to 1 and letting the others range over the
//!   PSK set gives `E`, with `|S|·|E| = |code|`.
//! * **CDA-DMs** from cyclic-division-algebra codes. Every codeword entry is
//!   a polynomial in `ω_M^k t_M` with PSK coefficients, so the code is again
//!   a linear combination of `M²` fixed basis matrices and the same pivot
//!   trick applies.
//!
//! Both are special cases of [`linear_combinations`] with per-coefficient
//! alphabets. Random capacity-optimized (CO) sets and the printed 8-matrix
//! reference set are provided as baselines.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::codebook;
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::matset;
use crate::metrics;
use crate::rng;
use crate::scalar::{c, cis, root_of_unity, Real};

/// `|trace(AᴴA) - T|` bound for constructed sets.
pub const POWER_TOL: f64 = 1e-9;
/// Same bound for sets printed to four decimals.
pub const FIXTURE_POWER_TOL: f64 = 5e-3;
/// Entrywise tolerance for matrix equality and distinctness.
pub const MATRIX_EQ_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DmFamily {
    Fec,
    Cda,
    Co,
    Fixture,
}

impl fmt::Display for DmFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DmFamily::Fec => "FEC",
            DmFamily::Cda => "CDA",
            DmFamily::Co => "CO",
            DmFamily::Fixture => "Fixture",
        })
    }
}

impl FromStr for DmFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "FEC" => Ok(DmFamily::Fec),
            "CDA" => Ok(DmFamily::Cda),
            "CO" => Ok(DmFamily::Co),
            "Fixture" => Ok(DmFamily::Fixture),
            other => Err(Error::param(format!("unknown DM family `{other}`"))),
        }
    }
}

/// How a DM set was produced.
#[derive(Clone, Debug)]
pub enum ConstructionParams<T> {
    Fec(FecParams<T>),
    Cda(CdaParams<T>),
    Co { search: CoSearchParams, chosen: usize, capacity: f64 },
    Fixture,
    Loaded,
}

#[derive(Clone, Debug)]
pub struct DispersionMatrixSet<T> {
    matrices: Vec<CMat<T>>,
    m: usize,
    t: usize,
    family: DmFamily,
    params: ConstructionParams<T>,
}

impl<T: Real> DispersionMatrixSet<T> {
    /// Validates shape (`M = T`, common size), the power constraint
    /// `trace(AᴴA) = T` within `power_tol`, and pairwise distinctness.
    pub fn new(
        family: DmFamily,
        params: ConstructionParams<T>,
        matrices: Vec<CMat<T>>,
        power_tol: T,
    ) -> Result<Self> {
        let set = Self::new_unchecked(family, params, matrices)?;
        if let Some(&(index, trace)) = set.power_violations(power_tol).first() {
            return Err(Error::PowerConstraint {
                index,
                trace: trace.to_f64_lossy(),
                expected: set.t as f64,
            });
        }
        if let Some(&(first, second)) = set.duplicate_pairs().first() {
            return Err(Error::DuplicateMatrix { first, second });
        }
        Ok(set)
    }

    /// Shape checks only. Used to load deliberately broken sets so the
    /// verifier can report what is wrong with them.
    pub fn new_unchecked(family: DmFamily, params: ConstructionParams<T>, matrices: Vec<CMat<T>>) -> Result<Self> {
        let first = matrices.first().ok_or_else(|| Error::param("empty dispersion matrix set"))?;
        let (m, t) = first.shape();
        if m != t {
            return Err(Error::dims("square M×M dispersion matrices", format!("{m}×{t}")));
        }
        if let Some(bad) = matrices.iter().find(|a| a.shape() != (m, t)) {
            return Err(Error::dims(format!("{m}×{t}"), format!("{}×{}", bad.rows(), bad.cols())));
        }
        Ok(Self {
            matrices,
            m,
            t,
            family,
            params,
        })
    }

    /// `(index, trace(AᴴA))` for every matrix off the `T` target by more than `tol`.
    pub fn power_violations(&self, tol: T) -> Vec<(usize, T)> {
        let target = T::lit(self.t as f64);
        self.matrices
            .iter()
            .enumerate()
            .map(|(i, a)| (i, a.norm_sqr()))
            .filter(|(_, tr)| (*tr - target).abs() > tol || !tr.is_finite())
            .collect()
    }

    pub fn duplicate_pairs(&self) -> Vec<(usize, usize)> {
        matset::duplicate_pairs(&self.matrices, T::tolerance(MATRIX_EQ_TOL))
    }

    /// The first `q` matrices (any subset of `E` is a valid DM set).
    pub fn truncated(&self, q: usize) -> Result<Self> {
        if q == 0 || q > self.matrices.len() {
            return Err(Error::param(format!(
                "requested Q = {q} but the construction offers 1..={}",
                self.matrices.len()
            )));
        }
        let mut out = self.clone();
        out.matrices.truncate(q);
        Ok(out)
    }

    pub fn matrices(&self) -> &[CMat<T>] {
        &self.matrices
    }

    pub fn q(&self) -> usize {
        self.matrices.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn family(&self) -> DmFamily {
        self.family
    }

    pub fn params(&self) -> &ConstructionParams<T> {
        &self.params
    }
}

/// All `Σ_k coeffs[k][i_k] · basis[k]` over the Cartesian product of the
/// coefficient alphabets. The last coefficient varies fastest.
pub fn linear_combinations<T: Real>(basis: &[CMat<T>], coeffs: &[Vec<Complex<T>>]) -> Vec<CMat<T>> {
    assert_eq!(basis.len(), coeffs.len(), "one alphabet per basis matrix");
    assert!(!basis.is_empty(), "empty basis");
    let (r, cc) = basis[0].shape();
    let sizes: Vec<usize> = coeffs.iter().map(Vec::len).collect();
    if sizes.contains(&0) {
        return Vec::new();
    }
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; basis.len()];
    loop {
        let mut acc = CMat::zeros(r, cc);
        for (k, b) in basis.iter().enumerate() {
            acc.axpy(coeffs[k][idx[k]], b);
        }
        out.push(acc);
        let mut k = basis.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Companion matrix of the monic `x^n + a_{n-1}x^{n-1} + … + a_0` given
/// `[a_0, …, a_{n-1}]`: ones on the subdiagonal, `-a` in the last column.
pub fn companion_matrix<T: Real>(coeffs: &[Complex<T>]) -> Result<CMat<T>> {
    let n = coeffs.len();
    if n == 0 {
        return Err(Error::param("companion matrix needs a polynomial of degree >= 1"));
    }
    let mut m = CMat::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex::one();
    }
    for (i, a) in coeffs.iter().enumerate() {
        m[(i, n - 1)] = -a;
    }
    Ok(m)
}

/// Which coefficients are pinned to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FecSubset {
    /// Only the pivot is pinned: `Q = L^(M-1)`.
    Full,
    /// Coefficients `0..r` pinned: `Q = L^(M-r)`, `1 <= r <= M-1`.
    Leading(usize),
}

#[derive(Clone, Debug)]
pub struct FecParams<T> {
    /// Order of the PSK alphabet the code is built over.
    pub code_order: usize,
    /// `[a_0, …, a_{M-1}]` of the monic irreducible polynomial. Irreducibility
    /// over `Q(S)` is the caller's responsibility.
    pub coeffs: Vec<Complex<T>>,
    pub pivot: usize,
    pub subset: FecSubset,
}

impl<T: Real> FecParams<T> {
    /// QPSK, `p(x) = x² - j`, pivot 1, full set.
    pub fn example1() -> Self {
        Self {
            code_order: 4,
            coeffs: vec![c(0.0, -1.0), Complex::zero()],
            pivot: 1,
            subset: FecSubset::Full,
        }
    }

    /// `p(x) = x^M - exp(j2π/L)` over L-PSK, pivot 1 (0 when `M = 1`).
    pub fn root_of_unity_poly(code_order: usize, m: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); m];
        if m > 0 {
            coeffs[0] = -root_of_unity::<T>(1, code_order);
        }
        Self {
            code_order,
            coeffs,
            pivot: usize::from(m > 1),
            subset: FecSubset::Full,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    fn check(&self, code: &Constellation<T>) -> Result<()> {
        if !code.is_psk() {
            return Err(Error::param("FEC dispersion matrices require a PSK code alphabet"));
        }
        if code.order() != self.code_order {
            return Err(Error::param(format!(
                "code alphabet has {} points but FEC parameters say L = {}",
                code.order(),
                self.code_order
            )));
        }
        let m = self.degree();
        if m == 0 {
            return Err(Error::param("FEC polynomial degree must be >= 1"));
        }
        if self.pivot >= m {
            return Err(Error::param(format!("FEC pivot {} outside 0..{m}", self.pivot)));
        }
        if let FecSubset::Leading(r) = self.subset {
            if r < 1 || r + 1 > m {
                return Err(Error::param(format!("FEC subset r = {r} outside 1..={}", m.saturating_sub(1))));
            }
        }
        Ok(())
    }
}

/// `[I, C, C², …, C^{M-1}]`.
pub fn companion_powers<T: Real>(coeffs: &[Complex<T>]) -> Result<Vec<CMat<T>>> {
    let comp = companion_matrix(coeffs)?;
    let mut powers = vec![CMat::identity(coeffs.len())];
    for i in 1..coeffs.len() {
        powers.push(powers[i - 1].matmul(&comp));
    }
    Ok(powers)
}

/// FEC-DM set `E` (or `E_{L_r}`) scaled by `1/√M`.
pub fn fec_dm_set<T: Real>(code: &Constellation<T>, params: &FecParams<T>) -> Result<DispersionMatrixSet<T>> {
    params.check(code)?;
    let m = params.degree();
    let basis = companion_powers(&params.coeffs)?;
    let free = code.points().to_vec();
    let coeffs: Vec<Vec<Complex<T>>> = (0..m)
        .map(|i| {
            let pinned = match params.subset {
                FecSubset::Full => i == params.pivot,
                FecSubset::Leading(r) => i < r,
            };
            if pinned {
                vec![Complex::one()]
            } else {
                free.clone()
            }
        })
        .collect();
    let scale = T::lit(m as f64).sqrt().recip();
    let mats = linear_combinations(&basis, &coeffs).iter().map(|a| a.scale_real(scale)).collect();
    DispersionMatrixSet::new(
        DmFamily::Fec,
        ConstructionParams::Fec(params.clone()),
        mats,
        T::tolerance(POWER_TOL),
    )
}

/// Every codeword `Σ f_i C^i / √M`, `f_i ∈ S`, of the field-extension code.
pub fn fec_code<T: Real>(code: &Constellation<T>, params: &FecParams<T>) -> Result<Vec<CMat<T>>> {
    params.check(code)?;
    let m = params.degree();
    let basis = companion_powers(&params.coeffs)?;
    let coeffs = vec![code.points().to_vec(); m];
    let scale = T::lit(m as f64).sqrt().recip();
    Ok(linear_combinations(&basis, &coeffs).iter().map(|a| a.scale_real(scale)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdaSubset {
    /// Only the pivot coefficient of the diagonal polynomial is pinned:
    /// `Q = L^(M²-1)`.
    Full,
    /// Coefficients `f_{j,i}` with `j < m` and `i < r` pinned:
    /// `Q = L^(M²-mr)`, `1 <= m <= M`, `1 <= r <= M-1`.
    Truncated { m: usize, r: usize },
}

#[derive(Clone, Debug)]
pub struct CdaParams<T> {
    pub code_order: usize,
    /// Number of transmit antennas `M` (codewords are `M × M`).
    pub antennas: usize,
    /// `t_M`, the M-th root of the transcendental element; unit modulus.
    pub t_m: Complex<T>,
    /// Unit-modulus non-norm element multiplying the upper triangle.
    pub delta: Complex<T>,
    /// One pivot per diagonal block; zero-based index `i` of the pinned
    /// coefficient `f_{0,i}`. All diagonal blocks share the coefficients
    /// `f_{0,·}`, so the pivots must agree.
    pub pivots: Vec<usize>,
    pub subset: CdaSubset,
}

impl<T: Real> CdaParams<T> {
    /// Unit-circle parameters from angles in radians; `epsilon` is added to
    /// both angles.
    pub fn from_angles(code_order: usize, antennas: usize, t_angle: T, delta_angle: T, epsilon: T) -> Self {
        Self {
            code_order,
            antennas,
            t_m: cis(t_angle + epsilon),
            delta: cis(delta_angle + epsilon),
            pivots: vec![0; antennas],
            subset: CdaSubset::Full,
        }
    }

    /// BPSK, `M = 2`, `t_2 = exp(jπ/2)`, `δ = exp(j3π/8)`, constant term pinned.
    pub fn example2() -> Self {
        Self::from_angles(2, 2, T::FRAC_PI_2(), T::lit(3.0) * T::PI() / T::lit(8.0), T::zero())
    }

    /// `ω_M = exp(j2π/M)`.
    pub fn omega(&self) -> Complex<T> {
        root_of_unity(1, self.antennas)
    }

    fn check_shape(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::param("CDA code needs M >= 1"));
        }
        let tol = T::tolerance(1e-12);
        if (self.t_m.norm() - T::one()).abs() > tol || (self.delta.norm() - T::one()).abs() > tol {
            return Err(Error::param("CDA t_M and δ must lie on the unit circle"));
        }
        Ok(())
    }

    fn check(&self, code: &Constellation<T>) -> Result<()> {
        self.check_shape()?;
        if !code.is_psk() {
            return Err(Error::param("CDA dispersion matrices require a PSK code alphabet"));
        }
        if code.order() != self.code_order {
            return Err(Error::param(format!(
                "code alphabet has {} points but CDA parameters say L = {}",
                code.order(),
                self.code_order
            )));
        }
        let m = self.antennas;
        if self.pivots.len() != m {
            return Err(Error::param(format!("expected {m} CDA pivots, got {}", self.pivots.len())));
        }
        if let Some(&p) = self.pivots.iter().find(|&&p| p >= m) {
            return Err(Error::param(format!("CDA pivot {p} outside 0..{m}")));
        }
        if self.pivots.iter().any(|&p| p != self.pivots[0]) {
            return Err(Error::param("CDA pivots must agree: the diagonal blocks share f_{0,i}"));
        }
        if let CdaSubset::Truncated { m: mm, r } = self.subset {
            if mm < 1 || mm > m || r < 1 || r + 1 > m {
                return Err(Error::param(format!(
                    "CDA subset (m, r) = ({mm}, {r}) outside 1 <= m <= {m}, 1 <= r <= {}",
                    m.saturating_sub(1)
                )));
            }
        }
        Ok(())
    }

    fn pinned(&self, j: usize, i: usize) -> bool {
        match self.subset {
            CdaSubset::Full => j == 0 && i == self.pivots[0],
            CdaSubset::Truncated { m, r } => j < m && i < r,
        }
    }
}

/// One CDA codeword from the coefficient grid `grid[(j, i)] = f_{j,i}`.
///
/// Entry `(u, k)` is `Σ_i f_{(u-k) mod M, i} (ω_M^k t_M)^i`, multiplied by
/// `δ` above the diagonal.
pub fn cda_codeword<T: Real>(params: &CdaParams<T>, grid: &CMat<T>) -> Result<CMat<T>> {
    params.check_shape()?;
    let m = params.antennas;
    if grid.shape() != (m, m) {
        return Err(Error::dims(format!("{m}×{m} coefficient grid"), format!("{}×{}", grid.rows(), grid.cols())));
    }
    let omega = params.omega();
    let mut out = CMat::zeros(m, m);
    for k in 0..m {
        let x = omega.powu(k as u32) * params.t_m;
        let xp: Vec<Complex<T>> = (0..m).map(|i| x.powu(i as u32)).collect();
        for u in 0..m {
            let j = (u + m - k) % m;
            let mut v = Complex::zero();
            for (i, p) in xp.iter().enumerate() {
                v += grid[(j, i)] * p;
            }
            out[(u, k)] = if u < k { v * params.delta } else { v };
        }
    }
    Ok(out)
}

/// The `M²` basis matrices `B_{j,i}` (codeword with `f_{j,i} = 1`, rest 0),
/// ordered by `(j, i)` row-major. Every CDA codeword is `Σ f_{j,i} B_{j,i}`.
pub fn cda_basis<T: Real>(params: &CdaParams<T>) -> Result<Vec<CMat<T>>> {
    let m = params.antennas;
    let mut out = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            let mut grid = CMat::zeros(m, m);
            grid[(j, i)] = Complex::one();
            out.push(cda_codeword(params, &grid)?);
        }
    }
    Ok(out)
}

/// CDA-DM set `E` (or `E_(m,r)`) scaled by `1/M`.
pub fn cda_dm_set<T: Real>(code: &Constellation<T>, params: &CdaParams<T>) -> Result<DispersionMatrixSet<T>> {
    params.check(code)?;
    let m = params.antennas;
    let basis = cda_basis(params)?;
    let free = code.points().to_vec();
    let mut coeffs = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            coeffs.push(if params.pinned(j, i) { vec![Complex::one()] } else { free.clone() });
        }
    }
    let scale = T::lit(m as f64).recip();
    let mats = linear_combinations(&basis, &coeffs).iter().map(|a| a.scale_real(scale)).collect();
    DispersionMatrixSet::new(
        DmFamily::Cda,
        ConstructionParams::Cda(params.clone()),
        mats,
        T::tolerance(POWER_TOL),
    )
}

/// Every codeword of the CDA code over `S`, scaled by `1/M`.
pub fn cda_code<T: Real>(code: &Constellation<T>, params: &CdaParams<T>) -> Result<Vec<CMat<T>>> {
    params.check(code)?;
    let m = params.antennas;
    let basis = cda_basis(params)?;
    let coeffs = vec![code.points().to_vec(); m * m];
    let scale = T::lit(m as f64).recip();
    Ok(linear_combinations(&basis, &coeffs).iter().map(|a| a.scale_real(scale)).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoSearchParams {
    pub m: usize,
    pub t: usize,
    pub q: usize,
    pub candidates: usize,
    pub mi_samples: usize,
    pub n_rx: usize,
    pub reference_snr_db: f64,
    pub seed: u64,
}

impl CoSearchParams {
    pub const DEFAULT_CANDIDATES: usize = 1000;
    pub const DEFAULT_MI_SAMPLES: usize = 10_000;
    pub const DEFAULT_REFERENCE_SNR_DB: f64 = 10.0;

    pub fn new(m: usize, t: usize, q: usize) -> Self {
        Self {
            m,
            t,
            q,
            candidates: Self::DEFAULT_CANDIDATES,
            mi_samples: Self::DEFAULT_MI_SAMPLES,
            n_rx: 2,
            reference_snr_db: Self::DEFAULT_REFERENCE_SNR_DB,
            seed: 0,
        }
    }
}

const CO_CANDIDATE_TAG: u64 = 0xC0_0001;
const CO_MI_TAG: u64 = 0xC0_0002;

/// `q` matrices with i.i.d. CN(0,1) entries, each rescaled to `trace(AᴴA) = T`.
pub fn random_dm_matrices<T: Real, R: rand::Rng + ?Sized>(rng: &mut R, m: usize, t: usize, q: usize) -> Vec<CMat<T>> {
    (0..q)
        .map(|_| {
            let a = rng::complex_normal_matrix(rng, m, t, T::one());
            let s = (T::lit(t as f64) / a.norm_sqr()).sqrt();
            a.scale_real(s)
        })
        .collect()
}

/// Random search for capacity-optimized DMs: draws `candidates` Gaussian
/// sets and keeps the one with the largest estimated DCMC mutual
/// information at the reference SNR. Candidate `i` always comes from stream
/// `i` and every candidate is scored on the same channel samples, so the
/// result depends only on the seed.
pub fn co_dm_search<T: Real>(params: &CoSearchParams, s: &Constellation<T>) -> Result<DispersionMatrixSet<T>> {
    if params.candidates == 0 {
        return Err(Error::param("CO search needs at least one candidate"));
    }
    if params.m != params.t || params.m == 0 || params.q == 0 {
        return Err(Error::param(format!(
            "CO search needs M = T >= 1 and Q >= 1 (got M={}, T={}, Q={})",
            params.m, params.t, params.q
        )));
    }
    let cand_seed = rng::derive_seed(params.seed, CO_CANDIDATE_TAG);
    let mi_seed = rng::derive_seed(params.seed, CO_MI_TAG);
    let scored: Vec<(usize, f64)> = (0..params.candidates)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cand_seed, i as u64);
            let mats = random_dm_matrices::<T, _>(&mut r, params.m, params.t, params.q);
            let score = DispersionMatrixSet::new_unchecked(DmFamily::Co, ConstructionParams::Loaded, mats)
                .and_then(|set| codebook::expand(s, &set))
                .map(|book| metrics::dcmc_capacity(&book, params.reference_snr_db, params.n_rx, params.mi_samples, mi_seed).bpcu)
                .unwrap_or(f64::NEG_INFINITY);
            (i, score)
        })
        .collect();
    let (chosen, capacity) = scored
        .iter()
        .copied()
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    let mut r = rng::stream(cand_seed, chosen as u64);
    let mats = random_dm_matrices::<T, _>(&mut r, params.m, params.t, params.q);
    DispersionMatrixSet::new(
        DmFamily::Co,
        ConstructionParams::Co {
            search: params.clone(),
            chosen,
            capacity,
        },
        mats,
        T::tolerance(POWER_TOL),
    )
}

/// Reference CO-DMs for CSTSK(2,2,2,8) with BPSK, rounded to 4 decimals.
pub fn fixture_co_bpsk8<T: Real>() -> DispersionMatrixSet<T> {
    const A: [[(f64, f64); 4]; 8] = [
        [(-0.2609, -0.1663), (0.4274, 1.2471), (-0.3356, -0.1604), (0.0127, 0.1667)],
        [(-0.8256, 0.5391), (0.1502, 0.0534), (-0.0718, -0.4744), (0.3378, -0.8112)],
        [(-0.4371, -0.3679), (-0.5509, -0.3024), (-0.8711, 0.1085), (-0.4850, -0.5224)],
        [(-0.1173, -0.8969), (0.1467, 0.2945), (-0.2049, 0.4875), (0.8546, 0.2524)],
        [(-0.0852, -0.1935), (0.6287, 0.0950), (0.9992, -0.3717), (-0.5449, -0.3428)],
        [(-0.2352, 1.0560), (-0.6267, -0.1166), (0.1142, 0.4872), (-0.4154, 0.0112)],
        [(-0.1408, 0.0534), (-0.4832, 0.8613), (0.6937, 0.6212), (0.1325, -0.3425)],
        [(-0.4118, 0.0950), (0.6746, -0.0363), (-0.5485, 0.3372), (-0.9707, 0.0908)],
    ];
    let mats = A
        .iter()
        .map(|m| CMat::from_row_major(2, 2, m.iter().map(|&(re, im)| c(re, im)).collect()))
        .collect();
    DispersionMatrixSet::new(
        DmFamily::Fixture,
        ConstructionParams::Fixture,
        mats,
        T::lit(FIXTURE_POWER_TOL),
    )
    .expect("printed fixture satisfies the relaxed power constraint")
}
