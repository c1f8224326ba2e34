// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Right-hand sides of the four reduced operator flows.
//!
//! Every variant flattens its state as: the transition grid `T` (`N⁴` entries in
//! `(m, n, row, col)` order), then the bath operators (`N²` each), then the
//! interaction grids (`N⁴` each) if the variant carries them. Complex entries
//! are stored as interleaved `(re, im)` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::OdeSystem;
use crate::model::SystemSpec;
use crate::operator::{kernel, BlockOperatorMatrix, ComplexMatrix};
use crate::scalar::{c_from_f64, Real, C};

mod general;
mod lorentzian;

pub use general::{GeneralHigh, GeneralLow};
pub use lorentzian::{LorentzianHigh, LorentzianLow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("bath has {found} sites, system has {expected}")]
    SiteMismatch { expected: usize, found: usize },
    #[error("state has length {found}, expected {expected}")]
    StateLength { expected: usize, found: usize },
    #[error("initial density matrix has dimension {found}, expected {expected}")]
    RhoDimension { expected: usize, found: usize },
    #[error("bath site {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    GeneralLow,
    GeneralHigh,
    LorentzianLow,
    LorentzianHigh,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::GeneralLow, Variant::GeneralHigh, Variant::LorentzianLow, Variant::LorentzianHigh];

    pub fn name(self) -> &'static str {
        match self {
            Variant::GeneralLow => "general-low",
            Variant::GeneralHigh => "general-high",
            Variant::LorentzianLow => "lorentzian-low",
            Variant::LorentzianHigh => "lorentzian-high",
        }
    }

    pub fn is_lorentzian(self) -> bool {
        matches!(self, Variant::LorentzianLow | Variant::LorentzianHigh)
    }
}

/// Prefactor of the low-order interaction term in `M[H]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionPrefactor {
    /// `½{·, M[t̂]}`, the form consistent with the symmetrised product rule.
    Half,
    /// Bare anticommutator.
    One,
}

/// Operator ordering of the bath term `ω_k M[a_k†]M[a_k]` in `M[H]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BathOrdering {
    /// `½ω_k (M[a_k]†M[a_k] + M[a_k]M[a_k]†)`
    Symmetric,
    /// `ω_k M[a_k]†M[a_k]`
    NormalOrdered,
}

/// How the reduced total Hamiltonian is assembled for the energy diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyConvention {
    pub interaction: InteractionPrefactor,
    pub bath: BathOrdering,
}

impl Default for EnergyConvention {
    fn default() -> Self {
        Self { interaction: InteractionPrefactor::Half, bath: BathOrdering::Symmetric }
    }
}

/// A reduced operator flow ready for the integrator.
pub trait RoaSystem<R: Real>: OdeSystem<R> {
    fn variant(&self) -> Variant;
    fn n_sites(&self) -> usize;
    /// `T(0) = t̂` and every bath and interaction operator zero.
    fn initial_state(&self) -> Vec<C<R>>;
    /// Reduced total energy `Re tr(ρ₀ M[H])`, for variants that define one.
    fn energy(&self, y: &[C<R>], rho0: &ComplexMatrix<R>) -> Option<R>;

    /// The `T` grid at the head of a flat state.
    fn transition_slice<'a>(&self, y: &'a [C<R>]) -> &'a [C<R>] {
        &y[..self.n_sites().pow(4)]
    }

    fn transition_grid(&self, y: &[C<R>]) -> BlockOperatorMatrix<R> {
        BlockOperatorMatrix::from_flat(self.n_sites(), self.transition_slice(y).to_vec()).expect("state layout")
    }
}

/// Sparse action of `i[Vᵀ, X]` on a flat grid.
#[derive(Debug, Clone)]
pub(crate) struct VCommutator<R> {
    n: usize,
    /// For column index `m`: every `(m', V[m'][m])` with a nonzero entry.
    cols: Vec<Vec<(usize, C<R>)>>,
    /// For row index `n`: every `(m', V[n][m'])` with a nonzero entry.
    rows: Vec<Vec<(usize, C<R>)>>,
    v: ComplexMatrix<R>,
}

impl<R: Real> VCommutator<R> {
    pub fn new(system: &SystemSpec) -> Self {
        let n = system.n_sites();
        let v64 = system.couplings();
        let v = ComplexMatrix::from_fn(n, |a, b| c_from_f64(v64[(a, b)]));
        let nz = |z: Complex64| z.re != 0.0 || z.im != 0.0;
        let cols = (0..n)
            .map(|m| (0..n).filter(|&mp| nz(v64[(mp, m)])).map(|mp| (mp, v[(mp, m)])).collect())
            .collect();
        let rows = (0..n)
            .map(|row| (0..n).filter(|&mp| nz(v64[(row, mp)])).map(|mp| (mp, v[(row, mp)])).collect())
            .collect();
        Self { n, cols, rows, v }
    }

    pub fn matrix(&self) -> &ComplexMatrix<R> {
        &self.v
    }

    /// `out[m][n] += alpha · Σ_{m'} (V[m'][m]·x[m'][n] − V[n][m']·x[m][m'])`
    #[inline]
    pub fn apply(&self, alpha: C<R>, x: &[C<R>], out: &mut [C<R>]) {
        let n = self.n;
        let nn = n * n;
        for m in 0..n {
            for col in 0..n {
                let dst = (m * n + col) * nn;
                let dst = &mut out[dst..dst + nn];
                for &(mp, v) in &self.cols[m] {
                    let src = (mp * n + col) * nn;
                    kernel::axpy(alpha * v, &x[src..src + nn], dst);
                }
                for &(mp, v) in &self.rows[col] {
                    let src = (m * n + mp) * nn;
                    kernel::axpy(-(alpha * v), &x[src..src + nn], dst);
                }
            }
        }
    }
}

/// The initial transition grid followed by `extra` zeros.
pub(crate) fn initial_flat<R: Real>(n: usize, extra: usize) -> Vec<C<R>> {
    let mut y = BlockOperatorMatrix::<R>::transition_operators(n).into_vec();
    y.resize(y.len() + extra, C::default());
    y
}

/// `Re tr(ρ₀ X)` for row-major `n × n` slices.
#[inline]
pub(crate) fn expect<R: Real>(n: usize, rho0: &[C<R>], x: &[C<R>]) -> C<R> {
    let mut acc = C::default();
    for a in 0..n {
        for b in 0..n {
            acc += rho0[a * n + b] * x[b * n + a];
        }
    }
    acc
}

/// `Σ_{mn} V_{mn}·tr(ρ₀ T[m][n])`
pub(crate) fn system_energy<R: Real>(n: usize, v: &ComplexMatrix<R>, rho0: &[C<R>], t: &[C<R>]) -> C<R> {
    let nn = n * n;
    let mut acc = C::default();
    for m in 0..n {
        for col in 0..n {
            let vmn = v[(m, col)];
            if vmn != C::default() {
                let b = (m * n + col) * nn;
                acc += vmn * expect(n, rho0, &t[b..b + nn]);
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::block_commutator;
    use crate::scalar::c;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn sparse_commutator_matches_dense(
            v01 in (-2.0f64..2.0, -2.0f64..2.0),
            v12 in (-2.0f64..2.0, -2.0f64..2.0),
            d in proptest::collection::vec(-2.0f64..2.0, 3),
            x in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 81),
        ) {
            let mut v = ComplexMatrix::<f64>::zeros(3);
            for (i, &di) in d.iter().enumerate() {
                v[(i, i)] = c(di, 0.0);
            }
            v[(0, 1)] = c(v01.0, v01.1);
            v[(1, 0)] = c(v01.0, -v01.1);
            v[(1, 2)] = c(v12.0, v12.1);
            v[(2, 1)] = c(v12.0, -v12.1);
            let sys = SystemSpec::new(v.clone()).unwrap();
            let xs: Vec<C<f64>> = x.iter().map(|&(a, b)| c(a, b)).collect();
            let grid = BlockOperatorMatrix::from_flat(3, xs.clone()).unwrap();
            let dense = block_commutator(&v.transpose(), &grid).unwrap();
            let mut out = vec![C::default(); 81];
            VCommutator::new(&sys).apply(c(1.0, 0.0), &xs, &mut out);
            for (a, b) in out.iter().zip(dense.as_slice()) {
                prop_assert!((a - b).norm() < 1e-13);
            }
        }
    }
}
