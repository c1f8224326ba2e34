// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Reduced density matrix reconstruction and scalar diagnostics.
//!
//! Outputs use the standard convention: row index is the ket, so
//! `ρ[n][m] = ⟨n|ρ|m⟩ = tr(ρ₀ M[t_{mn}])`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::{BlockOperatorMatrix, ComplexMatrix};
use crate::scalar::{c_to_f64, Real, C};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error("density matrix normalization vanishes")]
    ZeroNormalization,
    #[error("grid has dimension {grid}, initial density matrix {rho}")]
    DimensionMismatch { grid: usize, rho: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoForm {
    /// `Σ_{m'} tr(ρ₀ T[m][m']T[m'][n])`, normalized; positive semidefinite.
    #[default]
    Positive,
    /// `tr(ρ₀ T[m][n])`; trace preserving, positivity not guaranteed.
    Trace,
}

impl RhoForm {
    pub fn name(self) -> &'static str {
        match self {
            RhoForm::Positive => "positive",
            RhoForm::Trace => "trace",
        }
    }
}

/// `tr(ρ₀ X)` for row-major `n × n` slices.
fn expect<R: Real>(n: usize, rho0: &[C<R>], x: &[C<R>]) -> C<R> {
    let mut acc = C::default();
    for a in 0..n {
        for b in 0..n {
            acc += rho0[a * n + b] * x[b * n + a];
        }
    }
    acc
}

/// Trace form from a flat `(m, n, row, col)` grid.
pub fn trace_form_flat<R: Real>(n: usize, t: &[C<R>], rho0: &ComplexMatrix<R>) -> ComplexMatrix<R> {
    let nn = n * n;
    let rho = rho0.as_slice();
    let mut out = ComplexMatrix::zeros(n);
    for m in 0..n {
        for col in 0..n {
            let b = (m * n + col) * nn;
            out[(col, m)] = expect(n, rho, &t[b..b + nn]);
        }
    }
    out
}

/// Positive form from a flat grid.
pub fn positive_form_flat<R: Real>(n: usize, t: &[C<R>], rho0: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>, ObservableError> {
    let nn = n * n;
    let rho = rho0.as_slice();
    // P[m][k] = ρ₀·T[m][k]; raw[m][n] = Σ_k tr(P[m][k]·T[k][n]).
    let mut p = vec![C::<R>::default(); nn * nn];
    for blk in 0..nn {
        let tb = &t[blk * nn..(blk + 1) * nn];
        let pb = &mut p[blk * nn..(blk + 1) * nn];
        for a in 0..n {
            for q in 0..n {
                let r = rho[a * n + q];
                if r == C::default() {
                    continue;
                }
                for b in 0..n {
                    pb[a * n + b] += r * tb[q * n + b];
                }
            }
        }
    }
    let mut raw = ComplexMatrix::<R>::zeros(n);
    for m in 0..n {
        for col in 0..n {
            let mut acc = C::default();
            for k in 0..n {
                let pb = &p[(m * n + k) * nn..(m * n + k + 1) * nn];
                let tb = &t[(k * n + col) * nn..(k * n + col + 1) * nn];
                for a in 0..n {
                    for b in 0..n {
                        acc += pb[a * n + b] * tb[b * n + a];
                    }
                }
            }
            raw[(col, m)] = acc;
        }
    }
    let norm = raw.trace();
    if !(norm.norm() > R::lit(1e-300)) || !norm.re.is_finite() {
        return Err(ObservableError::ZeroNormalization);
    }
    let inv = C::new(R::one(), R::zero()) / norm;
    Ok(raw.scale(inv))
}

pub fn density_matrix_positive<R: Real>(
    t: &BlockOperatorMatrix<R>,
    rho0: &ComplexMatrix<R>,
) -> Result<ComplexMatrix<R>, ObservableError> {
    if t.dim() != rho0.dim() {
        return Err(ObservableError::DimensionMismatch { grid: t.dim(), rho: rho0.dim() });
    }
    positive_form_flat(t.dim(), t.as_slice(), rho0)
}

pub fn density_matrix_trace_form<R: Real>(
    t: &BlockOperatorMatrix<R>,
    rho0: &ComplexMatrix<R>,
) -> Result<ComplexMatrix<R>, ObservableError> {
    if t.dim() != rho0.dim() {
        return Err(ObservableError::DimensionMismatch { grid: t.dim(), rho: rho0.dim() });
    }
    Ok(trace_form_flat(t.dim(), t.as_slice(), rho0))
}

/// `tr ρ²`, real part.
pub fn purity<R: Real>(rho: &ComplexMatrix<R>) -> R {
    let n = rho.dim();
    let mut acc = R::zero();
    for a in 0..n {
        for b in 0..n {
            acc += (rho[(a, b)] * rho[(b, a)]).re;
        }
    }
    acc
}

/// Eigenvalues of `(ρ + ρ†)/2`, ascending.
pub fn hermitian_eigenvalues<R: Real>(rho: &ComplexMatrix<R>) -> Vec<f64> {
    let n = rho.dim();
    let m = DMatrix::<Complex64>::from_fn(n, n, |a, b| (c_to_f64(rho[(a, b)]) + c_to_f64(rho[(b, a)]).conj()) * 0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue<R: Real>(rho: &ComplexMatrix<R>) -> f64 {
    hermitian_eigenvalues(rho).first().copied().unwrap_or(f64::NAN)
}

/// One sampled point of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableRecord {
    pub time: f64,
    /// Density matrix in the selected form.
    pub rho: ComplexMatrix<f64>,
    /// The other form, kept as a diagnostic; `None` for exact solvers.
    pub rho_alt: Option<ComplexMatrix<f64>>,
    pub purity: f64,
    pub energy: Option<f64>,
    /// `‖Σ_n T[n][n] − 𝕀‖_max`; zero for exact solvers.
    pub trace_residual: f64,
}

impl ObservableRecord {
    /// Builds a record from a flat transition grid.
    pub fn from_grid<R: Real>(
        time: f64,
        n: usize,
        t: &[C<R>],
        rho0: &ComplexMatrix<R>,
        form: RhoForm,
        energy: Option<f64>,
    ) -> Result<Self, ObservableError> {
        let trace = trace_form_flat(n, t, rho0);
        let positive = positive_form_flat(n, t, rho0)?;
        let to64 = |m: &ComplexMatrix<R>| ComplexMatrix::from_fn(n, |a, b| c_to_f64(m[(a, b)]));
        let (rho, alt) = match form {
            RhoForm::Positive => (to64(&positive), to64(&trace)),
            RhoForm::Trace => (to64(&trace), to64(&positive)),
        };
        let mut residual = 0.0f64;
        let nn = n * n;
        for a in 0..n {
            for b in 0..n {
                let mut s = Complex64::new(if a == b { -1.0 } else { 0.0 }, 0.0);
                for m in 0..n {
                    s += c_to_f64(t[(m * n + m) * nn + a * n + b]);
                }
                residual = residual.max(s.norm());
            }
        }
        if !residual.is_finite() {
            residual = f64::INFINITY;
        }
        Ok(Self { time, purity: purity(&rho), rho, rho_alt: Some(alt), energy, trace_residual: residual })
    }

    /// Record for a solver that yields `ρ_s` directly.
    pub fn from_rho(time: f64, rho: ComplexMatrix<f64>) -> Self {
        Self { time, purity: purity(&rho), rho, rho_alt: None, energy: None, trace_residual: 0.0 }
    }

    pub fn population(&self, site: usize) -> f64 {
        self.rho[(site, site)].re
    }
}
