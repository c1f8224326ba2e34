// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! System couplings, bath spectral densities and their discretization.
//!
//! Units: ħ = 1, energies and frequencies share one unit (the presets use the
//! Lorentzian centre ω₀ = 1).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::ComplexMatrix;

/// Tolerance for the Hermiticity check on the system couplings.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("couplings[{row}][{col}] is not the conjugate of couplings[{col}][{row}]")]
    NonHermitian { row: usize, col: usize },
    #[error("couplings must be a non-empty square matrix")]
    BadCouplingShape,
    #[error("peak half-width must be positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("peak strength must be non-negative, got {0}")]
    NegativeStrength(f64),
    #[error("non-finite parameter: {0}")]
    NonFinite(&'static str),
    #[error("site bath needs at least one peak")]
    NoPeaks,
    #[error("site index {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("discretization step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("empty frequency window [{0}, {1}]")]
    EmptyWindow(f64, f64),
    #[error("mode {mode} has {found} couplings, expected {expected}")]
    CouplingLength { mode: usize, expected: usize, found: usize },
}

/// The isolated system: N sites with Hermitian couplings `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    couplings: ComplexMatrix<f64>,
}

impl SystemSpec {
    pub fn new(couplings: ComplexMatrix<f64>) -> Result<Self, ModelError> {
        let n = couplings.dim();
        if n == 0 {
            return Err(ModelError::BadCouplingShape);
        }
        for row in 0..n {
            for col in 0..n {
                let z = couplings[(row, col)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(ModelError::NonFinite("couplings"));
                }
                if (z - couplings[(col, row)].conj()).norm() > HERMITIAN_TOL {
                    return Err(ModelError::NonHermitian { row, col });
                }
            }
        }
        Ok(Self { couplings })
    }

    /// Open chain with `V_{mn} = −(δ_{m,n+1} + δ_{m,n−1})`.
    pub fn chain(n_sites: usize) -> Self {
        let v = ComplexMatrix::from_fn(n_sites, |a, b| {
            if a + 1 == b || b + 1 == a {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { couplings: v }
    }

    /// Periodic nearest-neighbour ring with coupling −1.
    pub fn ring(n_sites: usize) -> Self {
        let mut v = Self::chain(n_sites).couplings;
        if n_sites > 2 {
            v[(0, n_sites - 1)] = Complex64::new(-1.0, 0.0);
            v[(n_sites - 1, 0)] = Complex64::new(-1.0, 0.0);
        }
        Self { couplings: v }
    }

    pub fn uncoupled(n_sites: usize) -> Self {
        Self { couplings: ComplexMatrix::zeros(n_sites) }
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.couplings.dim()
    }

    #[inline]
    pub fn couplings(&self) -> &ComplexMatrix<f64> {
        &self.couplings
    }
}

/// One Lorentzian peak `(Γ/π)·γ / ((ω − ω₀)² + γ²)` of a spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorentzianPeak {
    /// Half-width at half-maximum γ.
    pub gamma: f64,
    /// Integrated strength Γ = ∫J dω.
    #[serde(rename = "Gamma")]
    pub strength: f64,
    /// Centre frequency ω₀.
    pub omega0: f64,
}

impl LorentzianPeak {
    pub fn new(gamma: f64, strength: f64, omega0: f64) -> Result<Self, ModelError> {
        let peak = Self { gamma, strength, omega0 };
        peak.check()?;
        Ok(peak)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if !(self.gamma.is_finite() && self.strength.is_finite() && self.omega0.is_finite()) {
            return Err(ModelError::NonFinite("peak"));
        }
        if self.gamma <= 0.0 {
            return Err(ModelError::NonPositiveWidth(self.gamma));
        }
        if self.strength < 0.0 {
            return Err(ModelError::NegativeStrength(self.strength));
        }
        Ok(())
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        let d = omega - self.omega0;
        self.strength / PI * self.gamma / (d * d + self.gamma * self.gamma)
    }

    /// `Γ·exp(−iω₀τ − γ|τ|)`
    pub fn correlation(&self, tau: f64) -> Complex64 {
        Complex64::new(-self.gamma * tau.abs(), -self.omega0 * tau).exp() * self.strength
    }
}

/// Independent bath attached to one site, a sum of Lorentzian peaks.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteBath {
    pub site: usize,
    pub peaks: Vec<LorentzianPeak>,
}

impl SiteBath {
    pub fn new(site: usize, peaks: Vec<LorentzianPeak>) -> Result<Self, ModelError> {
        if peaks.is_empty() {
            return Err(ModelError::NoPeaks);
        }
        for p in &peaks {
            p.check()?;
        }
        Ok(Self { site, peaks })
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.peaks.iter().map(|p| p.spectral_density(omega)).sum()
    }

    pub fn correlation_function(&self, tau: f64) -> Complex64 {
        self.peaks.iter().map(|p| p.correlation(tau)).sum()
    }

    /// Total coupling weight `κ = ∫J dω = Σ_j Γ_j`.
    pub fn kappa(&self) -> f64 {
        self.peaks.iter().map(|p| p.strength).sum()
    }

    /// Default frequency window: every peak's `ω₀ ± 50γ`, step `min γ / 100`.
    pub fn default_discretization(&self) -> Discretization {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut width = f64::INFINITY;
        for p in &self.peaks {
            lo = lo.min(p.omega0 - DEFAULT_HALF_WINDOW * p.gamma);
            hi = hi.max(p.omega0 + DEFAULT_HALF_WINDOW * p.gamma);
            width = width.min(p.gamma);
        }
        Discretization { delta_omega: width / DEFAULT_STEPS_PER_WIDTH, omega_min: lo, omega_max: hi }
    }
}

/// Half-width of the default window, in units of γ.
pub const DEFAULT_HALF_WINDOW: f64 = 50.0;
/// Default number of grid points per γ.
pub const DEFAULT_STEPS_PER_WIDTH: f64 = 100.0;

pub fn spectral_density(bath: &SiteBath, omega: f64) -> f64 {
    bath.spectral_density(omega)
}

pub fn correlation_function(bath: &SiteBath, tau: f64) -> Complex64 {
    bath.correlation_function(tau)
}

pub fn kappa(bath: &SiteBath) -> f64 {
    bath.kappa()
}

/// Uniform frequency grid used to turn a continuous bath into discrete modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    pub delta_omega: f64,
    pub omega_min: f64,
    pub omega_max: f64,
}

impl Discretization {
    /// `K` modes at spacing `delta_omega` centred on `center` (grid `k·Δω`).
    pub fn centered(center: f64, delta_omega: f64, modes: usize) -> Self {
        let k0 = (center / delta_omega).round() as i64 - (modes as i64) / 2;
        let k1 = k0 + modes as i64 - 1;
        Self { delta_omega, omega_min: k0 as f64 * delta_omega, omega_max: k1 as f64 * delta_omega }
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if !(self.delta_omega.is_finite() && self.omega_min.is_finite() && self.omega_max.is_finite()) {
            return Err(ModelError::NonFinite("discretization"));
        }
        if self.delta_omega <= 0.0 {
            return Err(ModelError::NonPositiveStep(self.delta_omega));
        }
        if self.omega_min >= self.omega_max {
            return Err(ModelError::EmptyWindow(self.omega_min, self.omega_max));
        }
        Ok(())
    }

    /// Integer grid indices `k` with `k·Δω ∈ [ω_min, ω_max]`. Window edges that
    /// sit on the grid up to rounding are included.
    pub fn grid(&self) -> std::ops::RangeInclusive<i64> {
        let slack = 1e-9;
        let k0 = (self.omega_min / self.delta_omega - slack).ceil() as i64;
        let k1 = (self.omega_max / self.delta_omega + slack).floor() as i64;
        k0..=k1
    }
}

/// A single harmonic bath mode with frequency `omega` and the diagonal of its
/// coupling matrix, one entry per site.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMode {
    pub omega: f64,
    pub couplings: Vec<Complex64>,
}

/// A finite list of bath modes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath {
    n_sites: usize,
    modes: Vec<DiscreteMode>,
}

impl DiscreteBath {
    pub fn new(n_sites: usize, modes: Vec<DiscreteMode>) -> Result<Self, ModelError> {
        for (i, m) in modes.iter().enumerate() {
            if m.couplings.len() != n_sites {
                return Err(ModelError::CouplingLength { mode: i, expected: n_sites, found: m.couplings.len() });
            }
            if !m.omega.is_finite() || m.couplings.iter().any(|g| !(g.re.is_finite() && g.im.is_finite())) {
                return Err(ModelError::NonFinite("mode"));
            }
        }
        Ok(Self { n_sites, modes })
    }

    pub fn empty(n_sites: usize) -> Self {
        Self { n_sites, modes: Vec::new() }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn modes(&self) -> &[DiscreteMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn extend(&mut self, other: DiscreteBath) {
        assert_eq!(self.n_sites, other.n_sites, "site count mismatch");
        self.modes.extend(other.modes);
    }

    /// True when every mode couples to at most one site.
    pub fn is_independent(&self) -> bool {
        self.modes.iter().all(|m| m.couplings.iter().filter(|g| g.norm() != 0.0).count() <= 1)
    }

    /// `Σ_k |g_{km}|²` for one site.
    pub fn total_weight(&self, site: usize) -> f64 {
        self.modes.iter().map(|m| m.couplings[site].norm_sqr()).sum()
    }
}

/// Samples `J` on the grid `ω = k·Δω` inside the window and returns modes with
/// real couplings `g_k = sqrt(Δω·J(kΔω))` on the bath's own site.
pub fn discretize(bath: &SiteBath, n_sites: usize, grid: &Discretization) -> Result<DiscreteBath, ModelError> {
    grid.check()?;
    if bath.site >= n_sites {
        return Err(ModelError::SiteOutOfRange { site: bath.site, n_sites });
    }
    let range = grid.grid();
    if range.is_empty() {
        return Err(ModelError::EmptyWindow(grid.omega_min, grid.omega_max));
    }
    let modes = range
        .map(|k| {
            let omega = k as f64 * grid.delta_omega;
            let mut couplings = vec![Complex64::new(0.0, 0.0); n_sites];
            couplings[bath.site] = Complex64::new((grid.delta_omega * bath.spectral_density(omega)).sqrt(), 0.0);
            DiscreteMode { omega, couplings }
        })
        .collect();
    DiscreteBath::new(n_sites, modes)
}
