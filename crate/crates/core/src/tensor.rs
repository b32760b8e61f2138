//! Dense component arrays over a chart of dimension `n`.
//!
//! Storage is row-major with the last index fastest. No symmetry compression:
//! dimensions stay at desk scale (n <= 6), so a rank-5 tensor is at most 7776
//! entries.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

/// Rank-`R` covariant component array.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<const R: usize> {
    dim: usize,
    data: Vec<f64>,
}

pub type Tensor3 = Tensor<3>;
pub type Tensor4 = Tensor<4>;
pub type Tensor5 = Tensor<5>;

impl<const R: usize> Tensor<R> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(R as u32)],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut([usize; R]) -> f64) -> Self {
        let mut t = Self::zeros(dim);
        for (flat, idx) in MultiIndex::<R>::new(dim).enumerate() {
            t.data[flat] = f(idx);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    fn offset(&self, idx: [usize; R]) -> usize {
        let mut off = 0;
        for &i in idx.iter() {
            debug_assert!(i < self.dim);
            off = off * self.dim + i;
        }
        off
    }

    pub fn indices(&self) -> MultiIndex<R> {
        MultiIndex::new(self.dim)
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    /// Max-norm of the componentwise difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Contracts slot `slot` with the matrix `m`: `out[.., a, ..] = sum_b m[a, b] t[.., b, ..]`.
    pub fn transform_slot(&self, slot: usize, m: &DMatrix<f64>) -> Self {
        assert!(slot < R);
        let n = self.dim;
        let stride = n.pow((R - 1 - slot) as u32);
        let mut out = Self::zeros(n);
        for (flat, idx) in self.indices().enumerate() {
            let a = idx[slot];
            let base = flat - a * stride;
            let mut s = 0.0;
            for b in 0..n {
                s += m[(a, b)] * self.data[base + b * stride];
            }
            out.data[flat] = s;
        }
        out
    }

    /// Applies `m` to every slot. With `m = g^{-1}` this raises all indices.
    pub fn transform_all(&self, m: &DMatrix<f64>) -> Self {
        let mut t = self.clone();
        for slot in 0..R {
            t = t.transform_slot(slot, m);
        }
        t
    }

    /// Full contraction with one vector per slot.
    pub fn eval(&self, vectors: [&[f64]; R]) -> f64 {
        let mut s = 0.0;
        for (flat, idx) in self.indices().enumerate() {
            let c = self.data[flat];
            if c == 0.0 {
                continue;
            }
            let mut w = c;
            for (slot, &i) in idx.iter().enumerate() {
                w *= vectors[slot][i];
            }
            s += w;
        }
        s
    }

    /// Inner product with all indices contracted through `ginv`.
    pub fn inner(&self, other: &Self, ginv: &DMatrix<f64>) -> f64 {
        let raised = other.transform_all(ginv);
        self.data.iter().zip(&raised.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, ginv: &DMatrix<f64>) -> f64 {
        self.inner(self, ginv).max(0.0).sqrt()
    }
}

impl<const R: usize> Index<[usize; R]> for Tensor<R> {
    type Output = f64;

    #[inline]
    fn index(&self, idx: [usize; R]) -> &f64 {
        &self.data[self.offset(idx)]
    }
}

impl<const R: usize> IndexMut<[usize; R]> for Tensor<R> {
    #[inline]
    fn index_mut(&mut self, idx: [usize; R]) -> &mut f64 {
        let off = self.offset(idx);
        &mut self.data[off]
    }
}

/// Row-major iterator over `[0, dim)^R`.
#[derive(Debug, Clone)]
pub struct MultiIndex<const R: usize> {
    dim: usize,
    next: Option<[usize; R]>,
}

impl<const R: usize> MultiIndex<R> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            next: if dim == 0 { None } else { Some([0; R]) },
        }
    }
}

impl<const R: usize> Iterator for MultiIndex<R> {
    type Item = [usize; R];

    fn next(&mut self) -> Option<[usize; R]> {
        let cur = self.next?;
        let mut nxt = cur;
        let mut slot = R;
        loop {
            if slot == 0 {
                self.next = None;
                break;
            }
            slot -= 1;
            nxt[slot] += 1;
            if nxt[slot] < self.dim {
                self.next = Some(nxt);
                break;
            }
            nxt[slot] = 0;
        }
        Some(cur)
    }
}

/// Covector components in the chart basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm(pub Vec<f64>);

impl OneForm {
    pub fn zeros(dim: usize) -> Self {
        OneForm(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `|w|_g = sqrt(g^{ij} w_i w_j)`.
    pub fn norm(&self, ginv: &DMatrix<f64>) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += ginv[(i, j)] * self.0[i] * self.0[j];
            }
        }
        s.max(0.0).sqrt()
    }

    /// The g-dual vector `g^{ij} w_j`.
    pub fn raise(&self, ginv: &DMatrix<f64>) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| ginv[(i, j)] * self.0[j]).sum())
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        OneForm(self.0.iter().map(|v| v * c).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `g(u, v)`.
pub fn g_dot(g: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += g[(i, j)] * u[i] * v[j];
        }
    }
    s
}

/// The g-dual covector `g_{ij} v^j`.
pub fn lower(g: &DMatrix<f64>, v: &[f64]) -> OneForm {
    let n = v.len();
    OneForm((0..n).map(|i| (0..n).map(|j| g[(i, j)] * v[j]).sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_is_row_major() {
        let idx: Vec<_> = MultiIndex::<2>::new(2).collect();
        assert_eq!(idx, vec![[0, 0], [0, 1], [1, 0], [1, 1]]);
        assert_eq!(MultiIndex::<5>::new(3).count(), 243);
    }

    #[test]
    fn index_matches_from_fn() {
        let t = Tensor::<3>::from_fn(3, |[a, b, c]| (100 * a + 10 * b + c) as f64);
        assert_eq!(t[[2, 0, 1]], 201.0);
        assert_eq!(t[[0, 2, 2]], 22.0);
    }

    #[test]
    fn transform_slot_with_identity_is_noop() {
        let t = Tensor::<4>::from_fn(2, |[a, b, c, d]| (a + 2 * b + 3 * c + 5 * d) as f64);
        let id = DMatrix::identity(2, 2);
        assert_eq!(t.transform_all(&id), t);
    }

    #[test]
    fn transform_slot_scales_one_slot() {
        let t = Tensor::<3>::from_fn(2, |_| 1.0);
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let s = t.transform_slot(1, &m);
        assert_eq!(s[[0, 0, 1]], 2.0);
        assert_eq!(s[[1, 1, 0]], 3.0);
    }

    #[test]
    fn eval_contracts_every_slot() {
        let t = Tensor::<2>::from_fn(2, |[a, b]| if a == b { 1.0 } else { 0.0 });
        assert_eq!(t.eval([&[1.0, 2.0], &[3.0, 4.0]]), 11.0);
    }
}
