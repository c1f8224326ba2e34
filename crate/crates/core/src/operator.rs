// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Complex matrices and N×N grids of them.
//!
//! A [`ComplexMatrix`] is an operator on the N-dimensional system space. A
//! [`BlockOperatorMatrix`] is an N×N grid of such operators, used for the
//! reduced transition operators and for the interaction operators. Blocks are
//! stored contiguously in `(m, n, row, col)` order, so a grid flattens into an
//! integrator state without copying.
//!
//! Indices are 0-based everywhere in this crate.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::{cone, czero, Real, C};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry at flat index {index}")]
    NonFinite { index: usize },
    #[error("dimension must be positive")]
    EmptyDimension,
}

fn check_dim(expected: usize, found: usize) -> Result<(), OperatorError> {
    if expected == found {
        Ok(())
    } else {
        Err(OperatorError::DimensionMismatch { expected, found })
    }
}

fn check_finite<R: Real>(data: &[C<R>]) -> Result<(), OperatorError> {
    match data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        Some(index) => Err(OperatorError::NonFinite { index }),
        None => Ok(()),
    }
}

/// Slice kernels used by the right-hand sides. All matrices are dense,
/// row-major, `n × n`.
pub(crate) mod kernel {
    use super::*;

    /// `out += alpha · a · b`
    #[inline]
    pub fn mat_mul_acc<R: Real>(n: usize, alpha: C<R>, a: &[C<R>], b: &[C<R>], out: &mut [C<R>]) {
        for r in 0..n {
            let out_row = &mut out[r * n..(r + 1) * n];
            for k in 0..n {
                let s = alpha * a[r * n + k];
                if s.re == R::zero() && s.im == R::zero() {
                    continue;
                }
                let b_row = &b[k * n..(k + 1) * n];
                for (o, &bv) in out_row.iter_mut().zip(b_row) {
                    *o += s * bv;
                }
            }
        }
    }

    /// `out = a†`
    #[inline]
    pub fn adjoint_into<R: Real>(n: usize, a: &[C<R>], out: &mut [C<R>]) {
        for r in 0..n {
            for col in 0..n {
                out[col * n + r] = a[r * n + col].conj();
            }
        }
    }

    /// `y += alpha · x`
    #[inline]
    pub fn axpy<R: Real>(alpha: C<R>, x: &[C<R>], y: &mut [C<R>]) {
        for (yv, &xv) in y.iter_mut().zip(x) {
            *yv += alpha * xv;
        }
    }

    /// `y += alpha · x` for a real coefficient.
    #[inline]
    pub fn axpy_real<R: Real>(alpha: R, x: &[C<R>], y: &mut [C<R>]) {
        for (yv, &xv) in y.iter_mut().zip(x) {
            *yv += xv * alpha;
        }
    }

    pub fn max_abs<R: Real>(x: &[C<R>]) -> R {
        x.iter().fold(R::zero(), |m, z| m.max(z.norm()))
    }
}

/// Dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<R> {
    dim: usize,
    data: Vec<C<R>>,
}

impl<R: Real> ComplexMatrix<R> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![czero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out[(i, i)] = cone();
        }
        out
    }

    /// The rank-one transition operator `|m⟩⟨n|`.
    pub fn unit(dim: usize, m: usize, n: usize) -> Self {
        let mut out = Self::zeros(dim);
        out[(m, n)] = cone();
        out
    }

    pub fn diagonal(entries: &[C<R>]) -> Self {
        let mut out = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            out[(i, i)] = z;
        }
        out
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<R>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for col in 0..dim {
                data.push(f(r, col));
            }
        }
        Self { dim, data }
    }

    pub fn from_row_major(dim: usize, data: Vec<C<R>>) -> Result<Self, OperatorError> {
        if dim == 0 {
            return Err(OperatorError::EmptyDimension);
        }
        check_dim(dim * dim, data.len())?;
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C<R>>]) -> Result<Self, OperatorError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(OperatorError::EmptyDimension);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            check_dim(dim, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Outer product `|ψ⟩⟨ψ|`.
    pub fn outer(psi: &[C<R>]) -> Self {
        Self::from_fn(psi.len(), |r, col| psi[r] * psi[col].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C<R>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C<R>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C<R>> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        kernel::adjoint_into(self.dim, &self.data, &mut out.data);
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, col| self[(col, r)])
    }

    pub fn conj(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, OperatorError> {
        check_dim(self.dim, other.dim)?;
        let mut out = Self::zeros(self.dim);
        kernel::mat_mul_acc(self.dim, cone(), &self.data, &other.data, &mut out.data);
        Ok(out)
    }

    pub fn trace(&self) -> C<R> {
        (0..self.dim).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: C<R>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn max_abs(&self) -> R {
        kernel::max_abs(&self.data)
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        check_finite(&self.data)
    }

    /// `max |A[r][c] − conj(A[c][r])|`
    pub fn hermitian_residual(&self) -> R {
        let mut worst = R::zero();
        for r in 0..self.dim {
            for col in 0..self.dim {
                worst = worst.max((self[(r, col)] - self[(col, r)].conj()).norm());
            }
        }
        worst
    }
}

impl<R> Index<(usize, usize)> for ComplexMatrix<R> {
    type Output = C<R>;

    #[inline]
    fn index(&self, (r, col): (usize, usize)) -> &C<R> {
        &self.data[r * self.dim + col]
    }
}

impl<R> IndexMut<(usize, usize)> for ComplexMatrix<R> {
    #[inline]
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C<R> {
        &mut self.data[r * self.dim + col]
    }
}

impl<R: Real> Add for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn add(self, rhs: Self) -> ComplexMatrix<R> {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<R: Real> Sub for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn sub(self, rhs: Self) -> ComplexMatrix<R> {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<R: Real> Mul for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn mul(self, rhs: Self) -> ComplexMatrix<R> {
        self.matmul(rhs).expect("matrix dimension mismatch")
    }
}

impl<R: Real> Neg for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn neg(self) -> ComplexMatrix<R> {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|&z| -z).collect() }
    }
}

/// N×N grid of N×N complex matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperatorMatrix<R> {
    dim: usize,
    data: Vec<C<R>>,
}

impl<R: Real> BlockOperatorMatrix<R> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![czero(); dim.pow(4)] }
    }

    /// The grid of transition operators, `block[m][n] = |m⟩⟨n|`.
    pub fn transition_operators(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for m in 0..dim {
            for n in 0..dim {
                out.block_mut(m, n)[m * dim + n] = cone();
            }
        }
        out
    }

    pub fn from_blocks(dim: usize, mut f: impl FnMut(usize, usize) -> ComplexMatrix<R>) -> Self {
        let mut out = Self::zeros(dim);
        for m in 0..dim {
            for n in 0..dim {
                let b = f(m, n);
                assert_eq!(b.dim(), dim, "block dimension mismatch");
                out.block_mut(m, n).copy_from_slice(b.as_slice());
            }
        }
        out
    }

    /// Wraps a flat `(m, n, row, col)` buffer of length `dim⁴`.
    pub fn from_flat(dim: usize, data: Vec<C<R>>) -> Result<Self, OperatorError> {
        if dim == 0 {
            return Err(OperatorError::EmptyDimension);
        }
        check_dim(dim.pow(4), data.len())?;
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn block_range(&self, m: usize, n: usize) -> std::ops::Range<usize> {
        let nn = self.dim * self.dim;
        let start = (m * self.dim + n) * nn;
        start..start + nn
    }

    #[inline]
    pub fn block(&self, m: usize, n: usize) -> &[C<R>] {
        let range = self.block_range(m, n);
        &self.data[range]
    }

    #[inline]
    pub fn block_mut(&mut self, m: usize, n: usize) -> &mut [C<R>] {
        let range = self.block_range(m, n);
        &mut self.data[range]
    }

    pub fn block_matrix(&self, m: usize, n: usize) -> ComplexMatrix<R> {
        ComplexMatrix { dim: self.dim, data: self.block(m, n).to_vec() }
    }

    pub fn set_block(&mut self, m: usize, n: usize, value: &ComplexMatrix<R>) -> Result<(), OperatorError> {
        check_dim(self.dim, value.dim())?;
        self.block_mut(m, n).copy_from_slice(value.as_slice());
        Ok(())
    }

    #[inline]
    pub fn as_slice(&self) -> &[C<R>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C<R>> {
        self.data
    }

    pub fn scale(&self, s: C<R>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn max_abs(&self) -> R {
        kernel::max_abs(&self.data)
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        check_finite(&self.data)
    }

    /// `max over (m, n) of ‖block[n][m] − block[m][n]†‖_max`
    pub fn hermitian_block_residual(&self) -> R {
        let n = self.dim;
        let mut worst = R::zero();
        for a in 0..n {
            for b in 0..n {
                let x = self.block(a, b);
                let y = self.block(b, a);
                for r in 0..n {
                    for col in 0..n {
                        worst = worst.max((y[r * n + col] - x[col * n + r].conj()).norm());
                    }
                }
            }
        }
        worst
    }

    /// Left-multiplies every block by `a`.
    pub fn left_multiply_blocks(&self, a: &ComplexMatrix<R>) -> Result<Self, OperatorError> {
        check_dim(self.dim, a.dim())?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for m in 0..n {
            for k in 0..n {
                let range = self.block_range(m, k);
                kernel::mat_mul_acc(n, cone(), a.as_slice(), &self.data[range.clone()], &mut out.data[range]);
            }
        }
        Ok(out)
    }

    /// Right-multiplies every block by `a`.
    pub fn right_multiply_blocks(&self, a: &ComplexMatrix<R>) -> Result<Self, OperatorError> {
        check_dim(self.dim, a.dim())?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for m in 0..n {
            for k in 0..n {
                let range = self.block_range(m, k);
                kernel::mat_mul_acc(n, cone(), &self.data[range.clone()], a.as_slice(), &mut out.data[range]);
            }
        }
        Ok(out)
    }
}

impl<R: Real> Add for &BlockOperatorMatrix<R> {
    type Output = BlockOperatorMatrix<R>;

    fn add(self, rhs: Self) -> BlockOperatorMatrix<R> {
        assert_eq!(self.dim, rhs.dim, "block dimension mismatch");
        BlockOperatorMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<R: Real> Sub for &BlockOperatorMatrix<R> {
    type Output = BlockOperatorMatrix<R>;

    fn sub(self, rhs: Self) -> BlockOperatorMatrix<R> {
        assert_eq!(self.dim, rhs.dim, "block dimension mismatch");
        BlockOperatorMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// `[A, T]` with `A` acting as a matrix of scalars on the grid indices:
/// `result[m][n] = Σ_k A[m][k]·T[k][n] − T[m][k]·A[k][n]`.
pub fn block_commutator<R: Real>(
    a: &ComplexMatrix<R>,
    t: &BlockOperatorMatrix<R>,
) -> Result<BlockOperatorMatrix<R>, OperatorError> {
    check_dim(t.dim(), a.dim())?;
    let n = t.dim();
    let mut out = BlockOperatorMatrix::zeros(n);
    for m in 0..n {
        for col in 0..n {
            let range = out.block_range(m, col);
            let dst = &mut out.data[range];
            for k in 0..n {
                let left = a[(m, k)];
                if left != czero() {
                    kernel::axpy(left, t.block(k, col), dst);
                }
                let right = a[(k, col)];
                if right != czero() {
                    kernel::axpy(-right, t.block(m, k), dst);
                }
            }
        }
    }
    Ok(out)
}

/// `[ĝ, X]` for a diagonal `ĝ = diag(g)`: `result[m][n] = (g[m] − g[n])·X[m][n]`.
pub fn diag_coupling_commutator<R: Real>(
    g: &[C<R>],
    x: &BlockOperatorMatrix<R>,
) -> Result<BlockOperatorMatrix<R>, OperatorError> {
    check_dim(x.dim(), g.len())?;
    let n = x.dim();
    let mut out = BlockOperatorMatrix::zeros(n);
    for m in 0..n {
        for col in 0..n {
            let w = g[m] - g[col];
            if w == czero() {
                continue;
            }
            let range = out.block_range(m, col);
            kernel::axpy(w, x.block(m, col), &mut out.data[range]);
        }
    }
    Ok(out)
}

/// `result[m][n] = T[m][n]·A + A·T[m][n]`
pub fn blockwise_anticommutator<R: Real>(
    t: &BlockOperatorMatrix<R>,
    a: &ComplexMatrix<R>,
) -> Result<BlockOperatorMatrix<R>, OperatorError> {
    check_dim(t.dim(), a.dim())?;
    let n = t.dim();
    let mut out = BlockOperatorMatrix::zeros(n);
    for m in 0..n {
        for col in 0..n {
            let range = out.block_range(m, col);
            let src = t.block(m, col);
            let dst = &mut out.data[range];
            kernel::mat_mul_acc(n, cone(), src, a.as_slice(), dst);
            kernel::mat_mul_acc(n, cone(), a.as_slice(), src, dst);
        }
    }
    Ok(out)
}

/// Grid product `T·T`: `result[m][n] = Σ_k T[m][k]·T[k][n]`.
pub fn block_square<R: Real>(t: &BlockOperatorMatrix<R>) -> BlockOperatorMatrix<R> {
    let n = t.dim();
    let mut out = BlockOperatorMatrix::zeros(n);
    for m in 0..n {
        for col in 0..n {
            let range = out.block_range(m, col);
            let dst = &mut out.data[range];
            for k in 0..n {
                kernel::mat_mul_acc(n, cone(), t.block(m, k), t.block(k, col), dst);
            }
        }
    }
    out
}

/// Sum of the diagonal blocks.
pub fn block_trace<R: Real>(t: &BlockOperatorMatrix<R>) -> ComplexMatrix<R> {
    let n = t.dim();
    let mut out = ComplexMatrix::zeros(n);
    for m in 0..n {
        kernel::axpy(cone(), t.block(m, m), out.as_mut_slice());
    }
    out
}

/// `result[m][n] = T[n][m]†`
pub fn block_adjoint<R: Real>(t: &BlockOperatorMatrix<R>) -> BlockOperatorMatrix<R> {
    let n = t.dim();
    let mut out = BlockOperatorMatrix::zeros(n);
    for m in 0..n {
        for col in 0..n {
            let range = out.block_range(m, col);
            kernel::adjoint_into(n, t.block(col, m), &mut out.data[range]);
        }
    }
    out
}

/// `‖block_trace(T) − 𝕀‖_max`
pub fn trace_residual<R: Real>(t: &BlockOperatorMatrix<R>) -> R {
    let tr = block_trace(t);
    (&tr - &ComplexMatrix::identity(t.dim())).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use proptest::prelude::*;

    type M = ComplexMatrix<f64>;
    type B = BlockOperatorMatrix<f64>;

    fn cz(re: f64, im: f64) -> C<f64> {
        c(re, im)
    }

    fn chain(n: usize) -> M {
        M::from_fn(n, |a, b| if a + 1 == b || b + 1 == a { cz(-1.0, 0.0) } else { czero() })
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    fn random_matrix(n: usize, seed: &mut u64) -> M {
        M::from_fn(n, |_, _| cz(lcg(seed), lcg(seed)))
    }

    fn random_blocks(n: usize, seed: &mut u64) -> B {
        B::from_blocks(n, |_, _| random_matrix(n, seed))
    }

    fn random_hermitian_blocks(n: usize, seed: &mut u64) -> B {
        let raw = random_blocks(n, seed);
        let adj = block_adjoint(&raw);
        (&raw + &adj).scale(cz(0.5, 0.0))
    }

    fn assert_close(a: &[C<f64>], b: &[C<f64>], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            assert!((x - y).norm() <= tol, "entry {i}: {x} vs {y}");
        }
    }

    #[test]
    fn commutator_with_identity_vanishes() {
        let mut seed = 7;
        let t = random_blocks(3, &mut seed);
        let out = block_commutator(&M::identity(3), &t).unwrap();
        assert!(out.max_abs() < 1e-15);
    }

    #[test]
    fn commutator_matches_index_form() {
        // Index form: Σ_k V[k][m] T[k][n] − V[n][k] T[m][k], with A = Vᵀ.
        let n = 3;
        let v = chain(n);
        let t = B::transition_operators(n);
        let out = block_commutator(&v.transpose(), &t).unwrap();
        for m in 0..n {
            for col in 0..n {
                let mut expected = M::zeros(n);
                for k in 0..n {
                    let lhs = t.block_matrix(k, col).scale(v[(k, m)]);
                    let rhs = t.block_matrix(m, k).scale(v[(col, k)]);
                    expected = &(&expected + &lhs) - &rhs;
                }
                assert_close(out.block(m, col), expected.as_slice(), 1e-15);
            }
        }
    }

    #[test]
    fn commutator_with_diagonal_scales_blocks() {
        let mut seed = 11;
        let t = random_blocks(3, &mut seed);
        let d = [cz(0.3, 0.0), cz(-1.2, 0.5), cz(2.0, -0.1)];
        let out = block_commutator(&M::diagonal(&d), &t).unwrap();
        for m in 0..3 {
            for n in 0..3 {
                let expected = t.block_matrix(m, n).scale(d[m] - d[n]);
                assert_close(out.block(m, n), expected.as_slice(), 1e-14);
            }
        }
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let t = B::zeros(3);
        assert_eq!(
            block_commutator(&M::identity(2), &t),
            Err(OperatorError::DimensionMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn diag_coupling_commutator_examples() {
        let ones = B::from_blocks(3, |_, _| M::from_fn(3, |_, _| cone()));
        assert!(diag_coupling_commutator(&[cz(0.7, 0.2); 3], &ones).unwrap().max_abs() == 0.0);

        let g = [cone(), czero(), czero()];
        let out = diag_coupling_commutator(&g, &ones).unwrap();
        assert_close(out.block(0, 1), ones.block(0, 1), 0.0);
        assert_close(out.block(1, 0), (-&ones.block_matrix(1, 0)).as_slice(), 0.0);
        assert!(out.block(1, 2).iter().all(|z| *z == czero()));

        let mut seed = 3;
        let x = random_blocks(3, &mut seed);
        let g = [cz(0.1, 0.4), cz(-0.3, 0.0), cz(0.0, 1.0)];
        let via_general = block_commutator(&M::diagonal(&g), &x).unwrap();
        let via_diag = diag_coupling_commutator(&g, &x).unwrap();
        assert_close(via_general.as_slice(), via_diag.as_slice(), 1e-15);
        assert!(diag_coupling_commutator(&g[..2], &x).is_err());
    }

    #[test]
    fn anticommutator_examples() {
        let mut seed = 5;
        let t = random_blocks(3, &mut seed);
        assert_eq!(blockwise_anticommutator(&t, &M::zeros(3)).unwrap().max_abs(), 0.0);
        let doubled = blockwise_anticommutator(&t, &M::identity(3)).unwrap();
        assert_close(doubled.as_slice(), t.scale(cz(2.0, 0.0)).as_slice(), 1e-15);

        let a = random_matrix(3, &mut seed);
        let out = blockwise_anticommutator(&t, &a).unwrap();
        for m in 0..3 {
            for n in 0..3 {
                let blk = t.block_matrix(m, n);
                let expected = &(&blk * &a) + &(&a * &blk);
                assert_close(out.block(m, n), expected.as_slice(), 1e-14);
            }
        }
        assert!(blockwise_anticommutator(&t, &M::zeros(2)).is_err());
    }

    #[test]
    fn block_square_of_transition_operators() {
        for n in 1..=4 {
            let t = B::transition_operators(n);
            let sq = block_square(&t);
            assert_eq!(sq, t.scale(cz(n as f64, 0.0)));
        }
        assert_eq!(block_square(&B::zeros(2)).max_abs(), 0.0);
    }

    #[test]
    fn block_square_preserves_hermitian_blocks() {
        let mut seed = 17;
        let t = random_hermitian_blocks(3, &mut seed);
        let sq = block_square(&t);
        assert_close(sq.as_slice(), block_adjoint(&sq).as_slice(), 1e-14);
    }

    #[test]
    fn block_trace_examples() {
        assert_eq!(block_trace(&B::transition_operators(3)), M::identity(3));
        assert_eq!(block_trace(&B::zeros(3)), M::zeros(3));
        let mut seed = 23;
        let t = random_blocks(3, &mut seed);
        let mut expected = M::zeros(3);
        for m in 0..3 {
            expected = &expected + &t.block_matrix(m, m);
        }
        assert_close(block_trace(&t).as_slice(), expected.as_slice(), 1e-15);
    }

    #[test]
    fn block_adjoint_examples() {
        let t = B::transition_operators(3);
        assert_eq!(block_adjoint(&t), t);
        let mut seed = 29;
        let x = random_blocks(3, &mut seed);
        let adj = block_adjoint(&x);
        for m in 0..3 {
            for n in 0..3 {
                for r in 0..3 {
                    for col in 0..3 {
                        assert_eq!(adj.block(m, n)[r * 3 + col], x.block(n, m)[col * 3 + r].conj());
                    }
                }
            }
        }
        assert_eq!(x.hermitian_block_residual() > 0.0, true);
        assert!(t.hermitian_block_residual() == 0.0);
    }

    fn arb_blocks(n: usize) -> impl Strategy<Value = B> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n.pow(4))
            .prop_map(move |v| B::from_flat(n, v.into_iter().map(|(a, b)| cz(a, b)).collect()).unwrap())
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = M> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
            .prop_map(move |v| M::from_row_major(n, v.into_iter().map(|(a, b)| cz(a, b)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn adjoint_is_an_involution(t in arb_blocks(3)) {
            prop_assert_eq!(block_adjoint(&block_adjoint(&t)), t);
        }

        #[test]
        fn trace_of_commutator_vanishes(a in arb_matrix(3), t in arb_blocks(3)) {
            let tr = block_trace(&block_commutator(&a, &t).unwrap());
            prop_assert!(tr.max_abs() < 1e-12);
        }

        #[test]
        fn anticommutator_commutes_with_adjoint(a in arb_matrix(3), t in arb_blocks(3)) {
            let lhs = blockwise_anticommutator(&t, &a).unwrap();
            let rhs = block_adjoint(&blockwise_anticommutator(&block_adjoint(&t), &a.adjoint()).unwrap());
            prop_assert!((&lhs - &rhs).max_abs() < 1e-13);
        }
    }
}
