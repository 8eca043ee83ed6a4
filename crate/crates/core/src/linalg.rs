//! Small dense complex matrices.
//!
//! Everything in this crate is at most a few tens of rows, so the storage is
//! a flat row-major `Vec` and the factorizations are the textbook ones:
//! LU with partial pivoting for determinants, Gauss-Jordan for inverses and
//! one-sided (Hestenes) Jacobi for singular values.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

#[derive(Clone, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Row-major constructor. Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Self { rows, cols, data }
    }

    /// Builds from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_row_major(r, c, rows.concat())
    }

    /// Inverse of [`CMat::vec`]: fills columns first.
    pub fn from_col_major(rows: usize, cols: usize, v: &[Complex<T>]) -> Self {
        assert_eq!(v.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| v[j * rows + i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Column-major vectorization, `vec(A)`.
    pub fn vec(&self) -> Vec<Complex<T>> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    /// `‖A‖_F²`, which equals `trace(AᴴA)` without forming the product.
    pub fn norm_sqr(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: Complex<T>, other: &Self) {
        assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {:?} x {:?}",
            self.shape(),
            rhs.shape()
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let (r1, c1) = self.shape();
        let (r2, c2) = rhs.shape();
        Self::from_fn(r1 * r2, c1 * c2, |i, j| self[(i / r2, j / c2)] * rhs[(i % r2, j % c2)])
    }

    pub fn powi(&self, k: usize) -> Self {
        assert!(self.is_square());
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.matmul(self);
        }
        out
    }

    /// Horizontal concatenation `[A_1 A_2 …]`.
    pub fn hstack(blocks: &[Self]) -> Self {
        assert!(!blocks.is_empty());
        let rows = blocks[0].rows;
        assert!(blocks.iter().all(|b| b.rows == rows), "hstack row mismatch");
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, off + j)] = b[(i, j)];
                }
            }
            off += b.cols;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    /// Entrywise equality within `tol` (complex modulus of each difference).
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.shape() == other.shape() && self.max_abs_diff(other) <= tol
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> Complex<T> {
        assert!(self.is_square(), "det of non-square matrix");
        let n = self.rows;
        match n {
            0 => return Complex::one(),
            1 => return self.data[0],
            2 => return self.data[0] * self.data[3] - self.data[1] * self.data[2],
            _ => {}
        }
        let mut a = self.data.clone();
        let mut det = Complex::<T>::one();
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&x, &y| a[x * n + k].norm_sqr().partial_cmp(&a[y * n + k].norm_sqr()).unwrap())
                .unwrap();
            if a[piv * n + k].is_zero() {
                return Complex::zero();
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let p = a[k * n + k];
            det *= p;
            for i in (k + 1)..n {
                let f = a[i * n + k] / p;
                if f.is_zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let v = a[k * n + j];
                    a[i * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse; `None` when a pivot underflows `n·ε·max|a|`.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of non-square matrix");
        let n = self.rows;
        let scale = self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if scale.is_zero() {
            return None;
        }
        let tiny = scale * T::epsilon() * T::lit(n.max(1) as f64);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&x, &y| a[(x, k)].norm().partial_cmp(&a[(y, k)].norm()).unwrap())
                .unwrap();
            if a[(piv, k)].norm() <= tiny {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    a.data.swap(k * n + j, piv * n + j);
                    inv.data.swap(k * n + j, piv * n + j);
                }
            }
            let p = a[(k, k)].inv();
            for j in 0..n {
                a[(k, j)] *= p;
                inv[(k, j)] *= p;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[(i, k)];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let (ak, ik) = (a[(k, j)], inv[(k, j)]);
                    a[(i, j)] -= f * ak;
                    inv[(i, j)] -= f * ik;
                }
            }
        }
        Some(inv)
    }

    /// Singular values in descending order (one-sided Jacobi).
    #[allow(clippy::needless_range_loop)] // rotates two columns in lockstep
    pub fn singular_values(&self) -> Vec<T> {
        // Hestenes orthogonalizes columns, so work on the orientation with
        // no more columns than rows.
        let work = if self.cols > self.rows { self.adjoint() } else { self.clone() };
        let (m, n) = work.shape();
        let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| work.column(j)).collect();
        let eps = T::epsilon();
        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha = cols[p].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                    let beta = cols[q].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                    let gamma = cols[p]
                        .iter()
                        .zip(&cols[q])
                        .fold(Complex::<T>::zero(), |s, (a, b)| s + a.conj() * b);
                    let g = gamma.norm();
                    if g <= eps * (alpha * beta).sqrt() || g.is_zero() {
                        continue;
                    }
                    rotated = true;
                    // Rotate column q by the phase of gamma so the inner
                    // product becomes real, then apply a real Jacobi rotation.
                    let phase = gamma.conj() / g;
                    let zeta = (beta - alpha) / (T::lit(2.0) * g);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let ap = cols[p][i];
                        let bq = cols[q][i] * phase;
                        cols[p][i] = ap * c - bq * s;
                        cols[q][i] = ap * s + bq * c;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv: Vec<T> = cols
            .iter()
            .map(|col| col.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt())
            .collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    /// Numerical rank with threshold `max(rows, cols)·ε·σ_max`.
    pub fn rank(&self) -> usize {
        let sv = self.singular_values();
        let Some(&smax) = sv.first() else { return 0 };
        if smax.is_zero() {
            return 0;
        }
        let tol = T::lit(self.rows.max(self.cols) as f64) * T::epsilon() * smax;
        sv.iter().filter(|&&s| s > tol).count()
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &CMat<T> {
    type Output = CMat<T>;

    fn add(self, rhs: Self) -> CMat<T> {
        assert_eq!(self.shape(), rhs.shape());
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMat<T> {
    type Output = CMat<T>;

    fn sub(self, rhs: Self) -> CMat<T> {
        assert_eq!(self.shape(), rhs.shape());
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &CMat<T> {
    type Output = CMat<T>;

    fn mul(self, rhs: Self) -> CMat<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Mul<Complex<T>> for &CMat<T> {
    type Output = CMat<T>;

    fn mul(self, rhs: Complex<T>) -> CMat<T> {
        self.scale(rhs)
    }
}

impl<T: Real> Neg for &CMat<T> {
    type Output = CMat<T>;

    fn neg(self) -> CMat<T> {
        self.scale_real(-T::one())
    }
}

impl<T: fmt::Debug> fmt::Debug for CMat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = &self.data[i * self.cols + j];
                write!(f, "{:>10.4?}{:+.4?}j ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn vec_norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |s, z| s + z.norm_sqr())
}

/// `aᴴb`.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Complex::zero(), |s, (x, y)| s + x.conj() * y)
}
