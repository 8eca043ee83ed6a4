//! Tolerant membership and duplicate search over sets of matrices.
//!
//! Each matrix is projected onto a fixed real linear functional of its
//! entries and the projections are sorted. Two matrices within `tol`
//! entrywise have projections within `tol·Σ|w|`, so a lookup only needs to
//! verify the candidates in that window. Rounding-based hash keys would
//! split near-equal matrices across bucket boundaries.

use crate::linalg::CMat;
use crate::scalar::Real;

fn weight(k: usize, a: f64, b: f64) -> f64 {
    (k as f64 * a + b).fract() + 0.5
}

fn projection<T: Real>(m: &CMat<T>) -> f64 {
    m.as_slice().iter().enumerate().fold(0.0, |s, (k, z)| {
        s + weight(k, 0.754_877_666_2, 0.569_840_291) * z.re.to_f64_lossy()
            + weight(k, 0.569_840_291, 0.754_877_666_2) * z.im.to_f64_lossy()
    })
}

fn window<T: Real>(m: &CMat<T>, tol: T) -> f64 {
    let n = m.as_slice().len();
    let wsum: f64 = (0..n)
        .map(|k| weight(k, 0.754_877_666_2, 0.569_840_291) + weight(k, 0.569_840_291, 0.754_877_666_2))
        .sum();
    // slack for the f64 rounding of the projection itself
    tol.to_f64_lossy() * wsum * (1.0 + 1e-6) + 1e-300
}

pub struct MatrixIndex<'a, T> {
    items: &'a [CMat<T>],
    sorted: Vec<(f64, usize)>,
    tol: T,
}

impl<'a, T: Real> MatrixIndex<'a, T> {
    pub fn new(items: &'a [CMat<T>], tol: T) -> Self {
        let mut sorted: Vec<(f64, usize)> = items.iter().enumerate().map(|(i, m)| (projection(m), i)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Self { items, sorted, tol }
    }

    /// Smallest index of a stored matrix equal to `x` within tolerance.
    pub fn find(&self, x: &CMat<T>) -> Option<usize> {
        if self.items.is_empty() || self.items[0].shape() != x.shape() {
            return None;
        }
        let p = projection(x);
        let w = window(x, self.tol);
        let start = self.sorted.partition_point(|(q, _)| *q < p - w);
        self.sorted[start..]
            .iter()
            .take_while(|(q, _)| *q <= p + w)
            .filter(|(_, i)| self.items[*i].approx_eq(x, self.tol))
            .map(|(_, i)| *i)
            .min()
    }

    pub fn contains(&self, x: &CMat<T>) -> bool {
        self.find(x).is_some()
    }
}

/// Pairs `(first, later)` where `items[later]` equals an earlier item. One
/// pair per duplicated index; `items.len() - pairs.len()` is the number of
/// distinct matrices.
pub fn duplicate_pairs<T: Real>(items: &[CMat<T>], tol: T) -> Vec<(usize, usize)> {
    let index = MatrixIndex::new(items, tol);
    let mut pairs = Vec::new();
    for (pos, &(p, i)) in index.sorted.iter().enumerate() {
        let w = window(&items[i], tol);
        let mut earliest: Option<usize> = None;
        // scan both directions inside the window
        for &(q, j) in index.sorted[..pos].iter().rev() {
            if q < p - w {
                break;
            }
            if j < i && items[j].approx_eq(&items[i], tol) {
                earliest = Some(earliest.map_or(j, |e: usize| e.min(j)));
            }
        }
        for &(q, j) in &index.sorted[pos + 1..] {
            if q > p + w {
                break;
            }
            if j < i && items[j].approx_eq(&items[i], tol) {
                earliest = Some(earliest.map_or(j, |e: usize| e.min(j)));
            }
        }
        if let Some(j) = earliest {
            pairs.push((j, i));
        }
    }
    pairs.sort_by_key(|&(_, i)| i);
    pairs
}
