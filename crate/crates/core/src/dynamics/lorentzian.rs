// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Low- and high-order flows for independent baths of Lorentzian peaks, with
//! one collective pseudomode operator `M[ã_{mj}]` per peak.

use super::{initial_flat, DynamicsError, RoaSystem, VCommutator, Variant};
use crate::integrator::OdeSystem;
use crate::model::{SiteBath, SystemSpec};
use crate::operator::{kernel, ComplexMatrix};
use crate::scalar::{c, Real, C};

#[derive(Debug, Clone)]
struct Peaks<R> {
    n: usize,
    site: Vec<usize>,
    /// `−iω₀ − γ` per peak.
    rate: Vec<C<R>>,
    sqrt_strength: Vec<R>,
}

impl<R: Real> Peaks<R> {
    fn new(system: &SystemSpec, baths: &[SiteBath]) -> Result<Self, DynamicsError> {
        let n = system.n_sites();
        let mut out = Self { n, site: Vec::new(), rate: Vec::new(), sqrt_strength: Vec::new() };
        for bath in baths {
            if bath.site >= n {
                return Err(DynamicsError::SiteOutOfRange { site: bath.site, n_sites: n });
            }
            for p in &bath.peaks {
                out.site.push(bath.site);
                out.rate.push(c(R::lit(-p.gamma), R::lit(-p.omega0)));
                out.sqrt_strength.push(R::lit(p.strength.sqrt()));
            }
        }
        Ok(out)
    }

    fn len(&self) -> usize {
        self.site.len()
    }

    /// `dÃ_p = (−iω_p − γ_p)Ã_p + √Γ_p T[s][s]` and `X_s = Σ_{p at s} √Γ_p Ã_p`.
    fn bath_step(&self, t: &[C<R>], a: &[C<R>], da: &mut [C<R>], x_sum: &mut [C<R>]) {
        let n = self.n;
        let nn = n * n;
        x_sum.fill(C::default());
        for p in 0..self.len() {
            let s = self.site[p];
            let ap = &a[p * nn..(p + 1) * nn];
            let dap = &mut da[p * nn..(p + 1) * nn];
            let rate = self.rate[p];
            for (d, &x) in dap.iter_mut().zip(ap) {
                *d = rate * x;
            }
            let tss = (s * n + s) * nn;
            kernel::axpy_real(self.sqrt_strength[p], &t[tss..tss + nn], dap);
            kernel::axpy_real(self.sqrt_strength[p], ap, &mut x_sum[s * nn..(s + 1) * nn]);
        }
    }
}

/// `D[m][n] = X_m − X_n` with its adjoint.
fn fill_d<R: Real>(n: usize, x_sum: &[C<R>], d: &mut [C<R>], dd: &mut [C<R>]) {
    let nn = n * n;
    for m in 0..n {
        for col in 0..n {
            let b = (m * n + col) * nn;
            for i in 0..nn {
                d[b + i] = x_sum[m * nn + i] - x_sum[col * nn + i];
            }
            kernel::adjoint_into(n, &d[b..b + nn], &mut dd[b..b + nn]);
        }
    }
}

/// Lower-order Lorentzian flow.
#[derive(Debug, Clone)]
pub struct LorentzianLow<R> {
    n: usize,
    v: VCommutator<R>,
    peaks: Peaks<R>,
    x_sum: Vec<C<R>>,
    d: Vec<C<R>>,
    dd: Vec<C<R>>,
}

impl<R: Real> LorentzianLow<R> {
    pub fn new(system: &SystemSpec, baths: &[SiteBath]) -> Result<Self, DynamicsError> {
        let n = system.n_sites();
        Ok(Self {
            n,
            v: VCommutator::new(system),
            peaks: Peaks::new(system, baths)?,
            x_sum: vec![C::default(); n * n * n],
            d: vec![C::default(); n.pow(4)],
            dd: vec![C::default(); n.pow(4)],
        })
    }

    pub fn n_peaks(&self) -> usize {
        self.peaks.len()
    }

    /// `M[ã_p]` inside a flat state, peaks ordered by bath then by peak.
    pub fn pseudomode_operator<'a>(&self, y: &'a [C<R>], p: usize) -> &'a [C<R>] {
        let nn = self.n * self.n;
        let start = self.n.pow(4) + p * nn;
        &y[start..start + nn]
    }
}

impl<R: Real> OdeSystem<R> for LorentzianLow<R> {
    fn dim(&self) -> usize {
        self.n.pow(4) + self.peaks.len() * self.n * self.n
    }

    fn rhs(&mut self, _t: R, y: &[C<R>], dy: &mut [C<R>]) {
        let n = self.n;
        let nn = n * n;
        let nb = nn * nn;
        let (t, a) = y.split_at(nb);
        let (dt, da) = dy.split_at_mut(nb);
        self.peaks.bath_step(t, a, da, &mut self.x_sum);
        fill_d(n, &self.x_sum, &mut self.d, &mut self.dd);

        dt.fill(C::default());
        self.v.apply(c(R::zero(), R::one()), t, dt);
        let half = c(R::lit(0.5), R::zero());
        let mut bm = vec![C::default(); nn];
        for m in 0..n {
            for col in 0..n {
                if m == col {
                    continue;
                }
                let b = (m * n + col) * nn;
                for q in 0..nn {
                    bm[q] = self.d[b + q] - self.dd[b + q];
                }
                let tb = &t[b..b + nn];
                let out = &mut dt[b..b + nn];
                kernel::mat_mul_acc(n, half, tb, &bm, out);
                kernel::mat_mul_acc(n, half, &bm, tb, out);
            }
        }
    }
}

impl<R: Real> RoaSystem<R> for LorentzianLow<R> {
    fn variant(&self) -> Variant {
        Variant::LorentzianLow
    }

    fn n_sites(&self) -> usize {
        self.n
    }

    fn initial_state(&self) -> Vec<C<R>> {
        initial_flat(self.n, self.peaks.len() * self.n * self.n)
    }

    fn energy(&self, _y: &[C<R>], _rho0: &ComplexMatrix<R>) -> Option<R> {
        None
    }
}

/// Higher-order Lorentzian flow: adds the interaction grids `M[s_{mn p}]`,
/// stored peak-major (one `N⁴` grid per peak `p`).
#[derive(Debug, Clone)]
pub struct LorentzianHigh<R> {
    n: usize,
    v: VCommutator<R>,
    peaks: Peaks<R>,
    x_sum: Vec<C<R>>,
    d: Vec<C<R>>,
    dd: Vec<C<R>>,
    r: Vec<C<R>>,
}

impl<R: Real> LorentzianHigh<R> {
    pub fn new(system: &SystemSpec, baths: &[SiteBath]) -> Result<Self, DynamicsError> {
        let n = system.n_sites();
        Ok(Self {
            n,
            v: VCommutator::new(system),
            peaks: Peaks::new(system, baths)?,
            x_sum: vec![C::default(); n * n * n],
            d: vec![C::default(); n.pow(4)],
            dd: vec![C::default(); n.pow(4)],
            r: vec![C::default(); n.pow(4)],
        })
    }

    pub fn n_peaks(&self) -> usize {
        self.peaks.len()
    }

    pub fn pseudomode_operator<'a>(&self, y: &'a [C<R>], p: usize) -> &'a [C<R>] {
        let nn = self.n * self.n;
        let start = self.n.pow(4) + p * nn;
        &y[start..start + nn]
    }

    pub fn interaction_grid<'a>(&self, y: &'a [C<R>], p: usize) -> &'a [C<R>] {
        let nb = self.n.pow(4);
        let start = nb + self.peaks.len() * self.n * self.n + p * nb;
        &y[start..start + nb]
    }
}

impl<R: Real> OdeSystem<R> for LorentzianHigh<R> {
    fn dim(&self) -> usize {
        let nb = self.n.pow(4);
        nb + self.peaks.len() * (self.n * self.n + nb)
    }

    fn rhs(&mut self, _t: R, y: &[C<R>], dy: &mut [C<R>]) {
        let n = self.n;
        let nn = n * n;
        let nb = nn * nn;
        let p_len = self.peaks.len();
        let (t, rest) = y.split_at(nb);
        let (a, s) = rest.split_at(p_len * nn);
        let (dt, drest) = dy.split_at_mut(nb);
        let (da, ds) = drest.split_at_mut(p_len * nn);

        self.peaks.bath_step(t, a, da, &mut self.x_sum);
        fill_d(n, &self.x_sum, &mut self.d, &mut self.dd);

        // R[m][n] = Σ_{p at m} √Γ_p (S_p[m][n] − S_p[n][m]†) + Σ_{p at n} √Γ_p (S_p[n][m]† − S_p[m][n])
        let r = &mut self.r;
        r.fill(C::default());
        let mut adj = vec![C::default(); nn];
        for p in 0..p_len {
            let sp = &s[p * nb..(p + 1) * nb];
            let site = self.peaks.site[p];
            let w = self.peaks.sqrt_strength[p];
            for other in 0..n {
                if other == site {
                    continue;
                }
                // block (site, other): +w (S[site][other] − S[other][site]†)
                let b = (site * n + other) * nn;
                let bt = (other * n + site) * nn;
                kernel::adjoint_into(n, &sp[bt..bt + nn], &mut adj);
                kernel::axpy_real(w, &sp[b..b + nn], &mut r[b..b + nn]);
                kernel::axpy_real(-w, &adj, &mut r[b..b + nn]);
                // block (other, site): +w (S[site][other]† − S[other][site])
                kernel::adjoint_into(n, &sp[b..b + nn], &mut adj);
                kernel::axpy_real(w, &adj, &mut r[bt..bt + nn]);
                kernel::axpy_real(-w, &sp[bt..bt + nn], &mut r[bt..bt + nn]);
            }
        }

        let i = c(R::zero(), R::one());
        dt.fill(C::default());
        self.v.apply(i, t, dt);
        kernel::axpy(c(R::one(), R::zero()), r, dt);

        let half = c(R::lit(0.5), R::zero());
        let neg_half = c(R::lit(-0.5), R::zero());
        for p in 0..p_len {
            let sp = &s[p * nb..(p + 1) * nb];
            let dsp = &mut ds[p * nb..(p + 1) * nb];
            let ap = &a[p * nn..(p + 1) * nn];
            let rate = self.peaks.rate[p];
            let site = self.peaks.site[p];
            for (d, &x) in dsp.iter_mut().zip(sp) {
                *d = rate * x;
            }
            self.v.apply(i, sp, dsp);
            for m in 0..n {
                for col in 0..n {
                    let b = (m * n + col) * nn;
                    let out = &mut dsp[b..b + nn];
                    if m != col {
                        let sb = &sp[b..b + nn];
                        kernel::mat_mul_acc(n, half, &r[b..b + nn], ap, out);
                        kernel::mat_mul_acc(n, half, sb, &self.d[b..b + nn], out);
                        kernel::mat_mul_acc(n, neg_half, &self.dd[b..b + nn], sb, out);
                    }
                    if col == site {
                        kernel::axpy_real(self.peaks.sqrt_strength[p], &t[b..b + nn], out);
                    }
                }
            }
        }
    }
}

impl<R: Real> RoaSystem<R> for LorentzianHigh<R> {
    fn variant(&self) -> Variant {
        Variant::LorentzianHigh
    }

    fn n_sites(&self) -> usize {
        self.n
    }

    fn initial_state(&self) -> Vec<C<R>> {
        initial_flat(self.n, self.dim() - self.n.pow(4))
    }

    fn energy(&self, _y: &[C<R>], _rho0: &ComplexMatrix<R>) -> Option<R> {
        None
    }
}
