// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form references: the uncoupled-sites single-mode solution, unitary
//! evolution of the isolated system, and the damped single-excitation exchange.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::operator::{BlockOperatorMatrix, ComplexMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("mode frequency on site {0} must be nonzero")]
    ZeroFrequency(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// `V = 0` with at most one bath mode `(g_m, ω_m)` on each site.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeSpec {
    pub modes: Vec<Option<(Complex64, f64)>>,
}

impl SingleModeSpec {
    pub fn new(modes: Vec<Option<(Complex64, f64)>>) -> Result<Self, OracleError> {
        for (site, m) in modes.iter().enumerate() {
            if let Some((_, w)) = m {
                if *w == 0.0 {
                    return Err(OracleError::ZeroFrequency(site));
                }
            }
        }
        Ok(Self { modes })
    }

    pub fn n_sites(&self) -> usize {
        self.modes.len()
    }

    /// `∫₀ᵗ Re α_m(s) ds = −(|g_m|²/ω_m)(t − sin(ω_m t)/ω_m)`
    pub fn phase_integral(&self, site: usize, t: f64) -> f64 {
        match self.modes[site] {
            None => 0.0,
            Some((g, w)) => -(g.norm_sqr() / w) * (t - (w * t).sin() / w),
        }
    }

    /// `φ_{mn}(t)` of the off-diagonal block `M[t_{mn}](t) = e^{iφ_{mn}}·t_{mn}(0)`.
    pub fn phase(&self, m: usize, n: usize, t: f64) -> f64 {
        self.phase_integral(m, t) - self.phase_integral(n, t)
    }

    /// The transition grid at time `t`.
    pub fn solution(&self, t: f64) -> BlockOperatorMatrix<f64> {
        let n = self.n_sites();
        BlockOperatorMatrix::from_blocks(n, |m, col| {
            let phase = Complex64::new(0.0, self.phase(m, col, t)).exp();
            ComplexMatrix::unit(n, m, col).scale(phase)
        })
    }

    /// `M[a_m](t) = −(g_m/ω_m)(1 − e^{−iω_m t})·|m⟩⟨m|`, zero on uncoupled sites.
    pub fn mode_operator(&self, site: usize, t: f64) -> ComplexMatrix<f64> {
        let n = self.n_sites();
        match self.modes[site] {
            None => ComplexMatrix::zeros(n),
            Some((g, w)) => {
                let amp = -(g / w) * (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -w * t).exp());
                ComplexMatrix::unit(n, site, site).scale(amp)
            }
        }
    }
}

pub fn single_mode_solution(spec: &SingleModeSpec, t: f64) -> BlockOperatorMatrix<f64> {
    spec.solution(t)
}

/// `max_{m,n',n} ‖T[m][n']·T[n'][n] − T[m][n]‖_max` over a flat grid.
pub fn product_identity_residual(n: usize, t: &[Complex64]) -> f64 {
    let nn = n * n;
    let mut worst = 0.0f64;
    let mut prod = vec![Complex64::new(0.0, 0.0); nn];
    for m in 0..n {
        for k in 0..n {
            for col in 0..n {
                prod.fill(Complex64::new(0.0, 0.0));
                let a = &t[(m * n + k) * nn..(m * n + k + 1) * nn];
                let b = &t[(k * n + col) * nn..(k * n + col + 1) * nn];
                for r in 0..n {
                    for q in 0..n {
                        let s = a[r * n + q];
                        for x in 0..n {
                            prod[r * n + x] += s * b[q * n + x];
                        }
                    }
                }
                let target = &t[(m * n + col) * nn..(m * n + col + 1) * nn];
                for (p, z) in prod.iter().zip(target) {
                    worst = worst.max((p - z).norm());
                }
            }
        }
    }
    worst
}

fn to_dmatrix(m: &ComplexMatrix<f64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.dim(), m.dim(), |a, b| m[(a, b)])
}

/// `e^{−iHt}` for Hermitian `H` by eigendecomposition.
pub fn unitary(h: &ComplexMatrix<f64>, t: f64) -> ComplexMatrix<f64> {
    let eig = SymmetricEigen::new(to_dmatrix(h));
    let q = &eig.eigenvectors;
    let phases = DMatrix::from_fn(h.dim(), h.dim(), |a, b| {
        if a == b {
            Complex64::new(0.0, -eig.eigenvalues[a] * t).exp()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let u = q * phases * q.adjoint();
    ComplexMatrix::from_fn(h.dim(), |a, b| u[(a, b)])
}

/// `e^{−iH_s t}·ρ₀·e^{iH_s t}` with `H_s = V`.
pub fn closed_system_solution(v: &ComplexMatrix<f64>, rho0: &ComplexMatrix<f64>, t: f64) -> Result<ComplexMatrix<f64>, OracleError> {
    if v.dim() != rho0.dim() {
        return Err(OracleError::DimensionMismatch { expected: v.dim(), found: rho0.dim() });
    }
    let u = unitary(v, t);
    Ok(&(&u * rho0) * &u.adjoint())
}

/// Amplitudes `(c_s, c_b)` of `ċ_s = −i√Γ c_b`, `ċ_b = (−iω₀ − γ)c_b − i√Γ c_s`
/// from `(1, 0)`, via the closed-form 2×2 exponential.
pub fn single_excitation(sqrt_strength: f64, omega0: f64, gamma: f64, t: f64) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let g = Complex64::new(sqrt_strength, 0.0);
    // M = [[0, −ig], [−ig, d]], d = −iω₀ − γ.
    let d = Complex64::new(-gamma, -omega0);
    let mu = d / 2.0;
    let delta = (mu * mu - (g * g)).sqrt();
    let (ch, sh_over) = if delta.norm() * t.max(1.0) < 1e-6 {
        (Complex64::new(1.0, 0.0), Complex64::new(t, 0.0))
    } else {
        ((delta * t).cosh(), (delta * t).sinh() / delta)
    };
    let e = (mu * t).exp();
    // e^{Mt} = e^{μt}[cosh(δt)·𝕀 + sinh(δt)/δ·(M − μ𝕀)]; first column.
    let cs = e * (ch + sh_over * (-mu));
    let cb = e * (sh_over * (-i * g));
    (cs, cb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec_one_site() -> SingleModeSpec {
        SingleModeSpec::new(vec![Some((Complex64::new(1.0, 0.0), 1.0)), None, None]).unwrap()
    }

    #[test]
    fn zero_coupling_is_static() {
        let s = SingleModeSpec::new(vec![Some((Complex64::new(0.0, 0.0), 1.0)), None]).unwrap();
        assert_eq!(s.solution(3.7), BlockOperatorMatrix::transition_operators(2));
    }

    #[test]
    fn half_period_phase_flips_sign() {
        let s = spec_one_site();
        assert_relative_eq!(s.phase(0, 1, PI), -PI, epsilon = 1e-15);
        let t = s.solution(PI);
        let b = t.block_matrix(0, 1);
        assert!((b[(0, 1)] + Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(t.block_matrix(1, 1), ComplexMatrix::unit(3, 1, 1));
    }

    #[test]
    fn mode_operator_formula() {
        let s = SingleModeSpec::new(vec![Some((Complex64::new(0.5, 0.0), 2.0))]).unwrap();
        let a = s.mode_operator(0, PI / 2.0);
        // 1 − e^{−iπ} = 2
        assert!((a[(0, 0)] - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_zero_frequency() {
        assert_eq!(SingleModeSpec::new(vec![Some((Complex64::new(1.0, 0.0), 0.0))]), Err(OracleError::ZeroFrequency(0)));
    }

    #[test]
    fn product_identity_holds_exactly() {
        let s = SingleModeSpec::new(vec![
            Some((Complex64::new(1.0, 0.0), 1.0)),
            Some((Complex64::new(0.3, 0.4), 2.5)),
            None,
        ])
        .unwrap();
        for &t in &[0.0, 1.0, 7.3, 19.9] {
            assert!(product_identity_residual(3, s.solution(t).as_slice()) < 1e-14);
        }
    }

    #[test]
    fn closed_system_examples() {
        let v = crate::model::SystemSpec::chain(3).couplings().clone();
        let rho0 = ComplexMatrix::outer(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!((&closed_system_solution(&v, &rho0, 0.0).unwrap() - &rho0).max_abs() < 1e-14);
        // Chain N = 3: ρ₁₁(t) = ((1 + cos(√2 t))/2)².
        for &t in &[0.5, 2.0, 11.0] {
            let r = closed_system_solution(&v, &rho0, t).unwrap();
            let want = (0.5 * (1.0 + (2f64.sqrt() * t).cos())).powi(2);
            assert_relative_eq!(r[(0, 0)].re, want, epsilon = 1e-13);
        }
        // A stationary state stays put.
        let d = ComplexMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        let rho = ComplexMatrix::outer(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]);
        assert!((&closed_system_solution(&d, &rho, 4.2).unwrap() - &rho).max_abs() < 1e-14);
    }

    #[test]
    fn single_excitation_against_numerical_integration() {
        let (g, w, gam) = (0.8, 1.1, 0.2);
        let mut cs = Complex64::new(1.0, 0.0);
        let mut cb = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let dt = 1e-4;
        let f = |cs: Complex64, cb: Complex64| (-i * g * cb, Complex64::new(-gam, -w) * cb - i * g * cs);
        for _ in 0..30000 {
            let (a1, b1) = f(cs, cb);
            let (a2, b2) = f(cs + a1 * (dt / 2.0), cb + b1 * (dt / 2.0));
            let (a3, b3) = f(cs + a2 * (dt / 2.0), cb + b2 * (dt / 2.0));
            let (a4, b4) = f(cs + a3 * dt, cb + b3 * dt);
            cs += (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (dt / 6.0);
            cb += (b1 + b2 * 2.0 + b3 * 2.0 + b4) * (dt / 6.0);
        }
        let (xs, xb) = single_excitation(g, w, gam, 3.0);
        assert!((xs - cs).norm() < 1e-12);
        assert!((xb - cb).norm() < 1e-12);
        // Undamped resonance: vacuum Rabi oscillation cos(gt) when ω₀ = 0.
        let (xs, _) = single_excitation(0.5, 0.0, 0.0, 2.0);
        assert!((xs - Complex64::new(1.0f64.cos(), 0.0)).norm() < 1e-14);
    }
}
