// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Pseudomode reference: every Lorentzian peak becomes a damped bosonic mode
//! and the system plus modes evolve under a Lindblad equation in a truncated
//! Fock space.
//!
//! `H = H_s + Σ_p ω_p b_p†b_p + Σ_p √Γ_p t_{s_p s_p}(b_p + b_p†)` with jump
//! operators `√(2γ_p) b_p`. Composite index: `s·D_b + Σ_p n_p·stride_p`.

use num_complex::Complex64;
use thiserror::Error;

use crate::integrator::OdeSystem;
use crate::model::{SiteBath, SystemSpec};
use crate::operator::ComplexMatrix;
use crate::scalar::{c_from_f64, c_to_f64, Real, C};

pub const DEFAULT_DIM_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PmError {
    #[error("composite dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("Fock truncation must be at least 1")]
    ZeroTruncation,
    #[error("pseudomode site {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("initial density matrix has dimension {found}, expected {expected}")]
    RhoDimension { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pseudomode {
    pub site: usize,
    pub omega0: f64,
    pub gamma: f64,
    /// `√Γ`
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmModel {
    pub system: SystemSpec,
    pub modes: Vec<Pseudomode>,
    pub n_max: usize,
    pub dim_cap: usize,
}

impl PmModel {
    pub fn new(system: SystemSpec, modes: Vec<Pseudomode>, n_max: usize) -> Result<Self, PmError> {
        Self::with_cap(system, modes, n_max, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(system: SystemSpec, modes: Vec<Pseudomode>, n_max: usize, dim_cap: usize) -> Result<Self, PmError> {
        if n_max == 0 {
            return Err(PmError::ZeroTruncation);
        }
        for m in &modes {
            if m.site >= system.n_sites() {
                return Err(PmError::SiteOutOfRange { site: m.site, n_sites: system.n_sites() });
            }
        }
        let model = Self { system, modes, n_max, dim_cap };
        let dim = model.composite_dim();
        if dim > dim_cap {
            return Err(PmError::DimensionCap { dim, cap: dim_cap });
        }
        Ok(model)
    }

    /// One pseudomode per peak; peaks with `Γ = 0` are decoupled and dropped.
    pub fn from_baths(system: SystemSpec, baths: &[SiteBath], n_max: usize, dim_cap: usize) -> Result<Self, PmError> {
        let modes = baths
            .iter()
            .flat_map(|b| {
                b.peaks.iter().filter(|p| p.strength > 0.0).map(move |p| Pseudomode {
                    site: b.site,
                    omega0: p.omega0,
                    gamma: p.gamma,
                    coupling: p.strength.sqrt(),
                })
            })
            .collect();
        Self::with_cap(system, modes, n_max, dim_cap)
    }

    pub fn with_n_max(&self, n_max: usize) -> Result<Self, PmError> {
        Self::with_cap(self.system.clone(), self.modes.clone(), n_max, self.dim_cap)
    }

    pub fn bath_dim(&self) -> usize {
        (self.n_max + 1).saturating_pow(self.modes.len() as u32)
    }

    pub fn composite_dim(&self) -> usize {
        self.system.n_sites().saturating_mul(self.bath_dim())
    }

    fn strides(&self) -> Vec<usize> {
        let p = self.modes.len();
        (0..p).map(|i| (self.n_max + 1).pow((p - 1 - i) as u32)).collect()
    }

    /// Assembles the generator in scalar type `R`.
    pub fn generator<R: Real>(&self) -> LindbladGenerator<R> {
        let ns = self.system.n_sites();
        let db = self.bath_dim();
        let dim = ns * db;
        let strides = self.strides();
        let levels = self.n_max + 1;
        let fock = |beta: usize, p: usize| (beta / strides[p]) % levels;
        let v = self.system.couplings();

        let mut h = CsrBuilder::new(dim);
        let mut jumps: Vec<CsrBuilder> = self.modes.iter().map(|_| CsrBuilder::new(dim)).collect();
        for s in 0..ns {
            for beta in 0..db {
                let row = s * db + beta;
                let mut diag = Complex64::new(0.0, 0.0);
                for (p, m) in self.modes.iter().enumerate() {
                    let np = fock(beta, p) as f64;
                    diag += Complex64::new(m.omega0 * np, -m.gamma * np);
                }
                diag += v[(s, s)];
                if diag != Complex64::new(0.0, 0.0) {
                    h.push(row, row, diag);
                }
                for s2 in 0..ns {
                    if s2 != s && v[(s, s2)] != Complex64::new(0.0, 0.0) {
                        h.push(row, s2 * db + beta, v[(s, s2)]);
                    }
                }
                for (p, m) in self.modes.iter().enumerate() {
                    let np = fock(beta, p);
                    // b_p: ⟨n|b|n+1⟩ = √(n+1)
                    if np < self.n_max {
                        let amp = ((np + 1) as f64).sqrt();
                        if m.site == s && m.coupling != 0.0 {
                            h.push(row, row + strides[p], Complex64::new(m.coupling * amp, 0.0));
                        }
                        if m.gamma > 0.0 {
                            jumps[p].push(row, row + strides[p], Complex64::new((2.0 * m.gamma).sqrt() * amp, 0.0));
                        }
                    }
                    // b_p†
                    if np > 0 && m.site == s && m.coupling != 0.0 {
                        let amp = (np as f64).sqrt();
                        h.push(row, row - strides[p], Complex64::new(m.coupling * amp, 0.0));
                    }
                }
            }
        }
        LindbladGenerator::new(
            dim,
            h.build(),
            jumps.into_iter().map(CsrBuilder::build).filter(|j| !j.values.is_empty()).collect(),
        )
    }

    /// `ρ_s ⊗ |0⟩⟨0|` flattened row-major.
    pub fn initial_state<R: Real>(&self, rho_s: &ComplexMatrix<f64>) -> Result<Vec<C<R>>, PmError> {
        let ns = self.system.n_sites();
        if rho_s.dim() != ns {
            return Err(PmError::RhoDimension { expected: ns, found: rho_s.dim() });
        }
        let db = self.bath_dim();
        let dim = ns * db;
        let mut rho = vec![C::default(); dim * dim];
        for a in 0..ns {
            for b in 0..ns {
                rho[(a * db) * dim + b * db] = c_from_f64(rho_s[(a, b)]);
            }
        }
        Ok(rho)
    }

    /// Partial trace over every pseudomode.
    pub fn reduced_density<R: Real>(&self, rho: &[C<R>]) -> ComplexMatrix<f64> {
        let ns = self.system.n_sites();
        let db = self.bath_dim();
        let dim = ns * db;
        ComplexMatrix::from_fn(ns, |a, b| {
            let mut acc = Complex64::new(0.0, 0.0);
            for beta in 0..db {
                acc += c_to_f64(rho[(a * db + beta) * dim + b * db + beta]);
            }
            acc
        })
    }

    /// `⟨b_p⟩ = tr(b_p ρ)`
    pub fn mode_amplitude<R: Real>(&self, rho: &[C<R>], p: usize) -> Complex64 {
        let ns = self.system.n_sites();
        let db = self.bath_dim();
        let dim = ns * db;
        let stride = self.strides()[p];
        let levels = self.n_max + 1;
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..ns {
            for beta in 0..db {
                let np = (beta / stride) % levels;
                if np < self.n_max {
                    let row = s * db + beta;
                    acc += c_to_f64(rho[(row + stride) * dim + row]) * ((np + 1) as f64).sqrt();
                }
            }
        }
        acc
    }
}

/// Compressed sparse rows.
#[derive(Debug, Clone)]
pub struct Csr<R> {
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<C<R>>,
}

impl<R: Real> Csr<R> {
    #[inline]
    fn row(&self, r: usize) -> (&[usize], &[C<R>]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.cols[a..b], &self.values[a..b])
    }

    fn single_entries(&self) -> Option<Vec<Option<(usize, C<R>)>>> {
        (0..self.row_ptr.len() - 1)
            .map(|r| match self.row_ptr[r + 1] - self.row_ptr[r] {
                0 => Some(None),
                1 => Some(Some((self.cols[self.row_ptr[r]], self.values[self.row_ptr[r]]))),
                _ => None,
            })
            .collect()
    }
}

/// Row-ordered triplet collector.
pub struct CsrBuilder {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl CsrBuilder {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn push(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.dim && col < self.dim, "entry out of range");
        match self.rows[row].iter_mut().find(|(c, _)| *c == col) {
            Some(e) => e.1 += value,
            None => self.rows[row].push((col, value)),
        }
    }

    pub fn build<R: Real>(self) -> Csr<R> {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for mut row in self.rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                cols.push(c);
                values.push(c_from_f64(v));
            }
            row_ptr.push(cols.len());
        }
        Csr { row_ptr, cols, values }
    }
}

/// `ρ̇ = −i(H_eff ρ − ρ H_eff†) + Σ_j L_j ρ L_j†`, applied matrix-free to a dense
/// row-major `ρ`. With `hermitian` set, `ρ H_eff† = (H_eff ρ)†` is used.
#[derive(Debug, Clone)]
pub struct LindbladGenerator<R> {
    dim: usize,
    h_eff: Csr<R>,
    jumps: Vec<Csr<R>>,
    hermitian: bool,
    /// Per jump: the single `(col, value)` of each row, when no row has more.
    single_entry: Vec<Option<Vec<Option<(usize, C<R>)>>>>,
    x: Vec<C<R>>,
}

impl<R: Real> LindbladGenerator<R> {
    /// `h_eff` must already contain `−(i/2) Σ_j L_j†L_j`.
    pub fn new(dim: usize, h_eff: Csr<R>, jumps: Vec<Csr<R>>) -> Self {
        let single_entry = jumps.iter().map(|l| l.single_entries()).collect();
        Self { dim, h_eff, jumps, hermitian: true, single_entry, x: vec![C::default(); dim * dim] }
    }

    /// Disables the shortcut that assumes a Hermitian argument, for evolving
    /// general operators (e.g. two-time correlations).
    pub fn general(mut self) -> Self {
        self.hermitian = false;
        self
    }

    pub fn matrix_dim(&self) -> usize {
        self.dim
    }
}

impl<R: Real> OdeSystem<R> for LindbladGenerator<R> {
    fn dim(&self) -> usize {
        self.dim * self.dim
    }

    fn rhs(&mut self, _t: R, y: &[C<R>], dy: &mut [C<R>]) {
        let d = self.dim;
        let x = &mut self.x;
        // X = H_eff ρ
        for a in 0..d {
            let xa = &mut x[a * d..(a + 1) * d];
            xa.fill(C::default());
            let (cols, vals) = self.h_eff.row(a);
            for (&c, &h) in cols.iter().zip(vals) {
                let yc = &y[c * d..(c + 1) * d];
                for (o, &v) in xa.iter_mut().zip(yc) {
                    *o += h * v;
                }
            }
        }
        if self.hermitian {
            // dy[a][b] = −i·X[a][b] + i·conj(X[b][a]); tiles keep the transposed reads local.
            for a0 in (0..d).step_by(TILE) {
                for b0 in (a0..d).step_by(TILE) {
                    for a in a0..(a0 + TILE).min(d) {
                        for b in b0.max(a)..(b0 + TILE).min(d) {
                            let p = x[a * d + b];
                            let q = x[b * d + a];
                            let v = C::new(p.im + q.im, q.re - p.re);
                            dy[a * d + b] = v;
                            dy[b * d + a] = v.conj();
                        }
                    }
                }
            }
        } else {
            // ρ H_eff†: (ρH†)_{ab} = Σ_c ρ_{ac} conj(H_{bc})
            for a in 0..d {
                let ya = &y[a * d..(a + 1) * d];
                for b in 0..d {
                    let (cols, vals) = self.h_eff.row(b);
                    let mut acc = C::default();
                    for (&c, &h) in cols.iter().zip(vals) {
                        acc += ya[c] * h.conj();
                    }
                    let p = x[a * d + b];
                    let diff = p - acc;
                    dy[a * d + b] = C::new(diff.im, -diff.re);
                }
            }
        }
        for (l, single) in self.jumps.iter().zip(&self.single_entry) {
            match single {
                Some(entries) => {
                    for (a, ea) in entries.iter().enumerate() {
                        let Some((ia, la)) = *ea else { continue };
                        let yi = &y[ia * d..(ia + 1) * d];
                        let start = if self.hermitian { a } else { 0 };
                        for (b, eb) in entries.iter().enumerate().skip(start) {
                            let Some((jb, lb)) = *eb else { continue };
                            let v = la * yi[jb] * lb.conj();
                            dy[a * d + b] += v;
                            if self.hermitian && b != a {
                                dy[b * d + a] += v.conj();
                            }
                        }
                    }
                }
                None => {
                    for a in 0..d {
                        let (ca, va) = l.row(a);
                        if ca.is_empty() {
                            continue;
                        }
                        for b in 0..d {
                            let (cb, vb) = l.row(b);
                            let mut acc = C::default();
                            for (&i, &li) in ca.iter().zip(va) {
                                let yi = &y[i * d..(i + 1) * d];
                                for (&j, &lj) in cb.iter().zip(vb) {
                                    acc += li * yi[j] * lj.conj();
                                }
                            }
                            dy[a * d + b] += acc;
                        }
                    }
                }
            }
        }
    }
}

const TILE: usize = 32;
