// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Low- and high-order flows for an explicit list of bath modes.

use super::{expect, initial_flat, system_energy, BathOrdering, DynamicsError, EnergyConvention, InteractionPrefactor, RoaSystem, VCommutator, Variant};
use crate::integrator::OdeSystem;
use crate::model::{DiscreteBath, SystemSpec};
use crate::operator::{kernel, ComplexMatrix};
use crate::scalar::{c, c_from_f64, Real, C};

/// Mode data shared by both general variants.
#[derive(Debug, Clone)]
struct Modes<R> {
    n: usize,
    omega: Vec<R>,
    /// Dense coupling rows `g[k·N + m]`.
    g: Vec<C<R>>,
    /// Nonzero `(site, g)` pairs per mode.
    nonzero: Vec<Vec<(usize, C<R>)>>,
}

impl<R: Real> Modes<R> {
    fn new(system: &SystemSpec, bath: &DiscreteBath) -> Result<Self, DynamicsError> {
        let n = system.n_sites();
        if bath.n_sites() != n {
            return Err(DynamicsError::SiteMismatch { expected: n, found: bath.n_sites() });
        }
        let mut omega = Vec::with_capacity(bath.len());
        let mut g = Vec::with_capacity(bath.len() * n);
        let mut nonzero = Vec::with_capacity(bath.len());
        for mode in bath.modes() {
            omega.push(R::lit(mode.omega));
            let row: Vec<C<R>> = mode.couplings.iter().map(|&z| c_from_f64(z)).collect();
            nonzero.push(row.iter().enumerate().filter(|(_, z)| **z != C::default()).map(|(s, z)| (s, *z)).collect());
            g.extend(row);
        }
        Ok(Self { n, omega, g, nonzero })
    }

    fn len(&self) -> usize {
        self.omega.len()
    }

    /// `dA_k = −iω_k A_k − i Σ_s g_{ks} T[s][s]` and `Y_s = Σ_k ḡ_{ks} A_k`.
    fn bath_step(&self, t: &[C<R>], a: &[C<R>], da: &mut [C<R>], y_sum: &mut [C<R>]) {
        let n = self.n;
        let nn = n * n;
        y_sum.fill(C::default());
        for k in 0..self.len() {
            let ak = &a[k * nn..(k + 1) * nn];
            let dak = &mut da[k * nn..(k + 1) * nn];
            let w = c(R::zero(), -self.omega[k]);
            if let [(s, g)] = self.nonzero[k][..] {
                let tss = (s * n + s) * nn;
                let drive = c(g.im, -g.re);
                let gc = g.conj();
                let ys = &mut y_sum[s * nn..(s + 1) * nn];
                for (((d, &x), &ts), y) in dak.iter_mut().zip(ak).zip(&t[tss..tss + nn]).zip(ys) {
                    *d = w * x + drive * ts;
                    *y += gc * x;
                }
                continue;
            }
            for (d, &x) in dak.iter_mut().zip(ak) {
                *d = w * x;
            }
            for &(s, g) in &self.nonzero[k] {
                kernel::axpy(g.conj(), ak, &mut y_sum[s * nn..(s + 1) * nn]);
                let tss = (s * n + s) * nn;
                kernel::axpy(c(g.im, -g.re), &t[tss..tss + nn], dak);
            }
        }
    }

    /// Bath part of `M[H]` under the chosen ordering.
    fn bath_energy(&self, rho0: &[C<R>], a: &[C<R>], ordering: BathOrdering) -> C<R> {
        let n = self.n;
        let nn = n * n;
        let mut adj = vec![C::default(); nn];
        let mut prod = vec![C::default(); nn];
        let mut acc = C::default();
        let half = R::lit(0.5);
        for k in 0..self.len() {
            let ak = &a[k * nn..(k + 1) * nn];
            kernel::adjoint_into(n, ak, &mut adj);
            prod.fill(C::default());
            match ordering {
                BathOrdering::NormalOrdered => kernel::mat_mul_acc(n, c(R::one(), R::zero()), &adj, ak, &mut prod),
                BathOrdering::Symmetric => {
                    kernel::mat_mul_acc(n, c(half, R::zero()), &adj, ak, &mut prod);
                    kernel::mat_mul_acc(n, c(half, R::zero()), ak, &adj, &mut prod);
                }
            }
            acc += expect(n, rho0, &prod) * self.omega[k];
        }
        acc
    }
}

/// `Z[m][n] = Y_m − Y_n` for every block, with its adjoint.
fn fill_z<R: Real>(n: usize, y_sum: &[C<R>], z: &mut [C<R>], zd: &mut [C<R>]) {
    let nn = n * n;
    for m in 0..n {
        for col in 0..n {
            let b = (m * n + col) * nn;
            let zb = &mut z[b..b + nn];
            for i in 0..nn {
                zb[i] = y_sum[m * nn + i] - y_sum[col * nn + i];
            }
            kernel::adjoint_into(n, &z[b..b + nn], &mut zd[b..b + nn]);
        }
    }
}

fn check_rho<R: Real>(n: usize, rho0: &ComplexMatrix<R>) -> bool {
    rho0.dim() == n
}

/// Lower-order flow: `T` and one reduced operator per bath mode.
#[derive(Debug, Clone)]
pub struct GeneralLow<R> {
    n: usize,
    v: VCommutator<R>,
    modes: Modes<R>,
    theta: R,
    energy: EnergyConvention,
    y_sum: Vec<C<R>>,
    z: Vec<C<R>>,
    zd: Vec<C<R>>,
}

impl<R: Real> GeneralLow<R> {
    pub fn new(system: &SystemSpec, bath: &DiscreteBath) -> Result<Self, DynamicsError> {
        let n = system.n_sites();
        Ok(Self {
            n,
            v: VCommutator::new(system),
            modes: Modes::new(system, bath)?,
            theta: R::lit(0.5),
            energy: EnergyConvention::default(),
            y_sum: vec![C::default(); n * n * n],
            z: vec![C::default(); n.pow(4)],
            zd: vec![C::default(); n.pow(4)],
        })
    }

    /// Weight θ of the product ordering `θ·T A + (1−θ)·A T`. The flow is only
    /// consistent at ½; other values exist to study the failure.
    pub fn with_ordering_weight(mut self, theta: f64) -> Self {
        self.theta = R::lit(theta);
        self
    }

    pub fn with_energy_convention(mut self, convention: EnergyConvention) -> Self {
        self.energy = convention;
        self
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// `M[a_k]` inside a flat state.
    pub fn mode_operator<'a>(&self, y: &'a [C<R>], k: usize) -> &'a [C<R>] {
        let nn = self.n * self.n;
        let start = self.n.pow(4) + k * nn;
        &y[start..start + nn]
    }
}

impl<R: Real> OdeSystem<R> for GeneralLow<R> {
    fn dim(&self) -> usize {
        self.n.pow(4) + self.modes.len() * self.n * self.n
    }

    fn rhs(&mut self, _t: R, y: &[C<R>], dy: &mut [C<R>]) {
        let n = self.n;
        let nn = n * n;
        let nb = nn * nn;
        let (t, a) = y.split_at(nb);
        let (dt, da) = dy.split_at_mut(nb);
        self.modes.bath_step(t, a, da, &mut self.y_sum);
        fill_z(n, &self.y_sum, &mut self.z, &mut self.zd);

        dt.fill(C::default());
        let i = c(R::zero(), R::one());
        self.v.apply(i, t, dt);
        let half = R::lit(0.5);
        let symmetric = self.theta == half;
        let mut u = vec![C::default(); nn];
        for m in 0..n {
            for col in 0..n {
                if m == col {
                    continue;
                }
                let b = (m * n + col) * nn;
                let tb = &t[b..b + nn];
                let zb = &self.z[b..b + nn];
                let zdb = &self.zd[b..b + nn];
                let out = &mut dt[b..b + nn];
                if symmetric {
                    for q in 0..nn {
                        u[q] = zb[q] + zdb[q];
                    }
                    let w = c(R::zero(), half);
                    kernel::mat_mul_acc(n, w, &u, tb, out);
                    kernel::mat_mul_acc(n, w, tb, &u, out);
                } else {
                    let wt = c(R::zero(), self.theta);
                    let wr = c(R::zero(), R::one() - self.theta);
                    kernel::mat_mul_acc(n, wt, zdb, tb, out);
                    kernel::mat_mul_acc(n, wr, tb, zdb, out);
                    kernel::mat_mul_acc(n, wt, tb, zb, out);
                    kernel::mat_mul_acc(n, wr, zb, tb, out);
                }
            }
        }
    }
}

impl<R: Real> RoaSystem<R> for GeneralLow<R> {
    fn variant(&self) -> Variant {
        Variant::GeneralLow
    }

    fn n_sites(&self) -> usize {
        self.n
    }

    fn initial_state(&self) -> Vec<C<R>> {
        initial_flat(self.n, self.modes.len() * self.n * self.n)
    }

    fn energy(&self, y: &[C<R>], rho0: &ComplexMatrix<R>) -> Option<R> {
        let n = self.n;
        if !check_rho(n, rho0) {
            return None;
        }
        let nn = n * n;
        let nb = nn * nn;
        let rho = rho0.as_slice();
        let (t, a) = y.split_at(nb);
        let mut e = system_energy(n, self.v.matrix(), rho, t);
        e += self.modes.bath_energy(rho, a, self.energy.bath);

        // Σ_n {Y_n† + Y_n, T[n][n]}
        let mut y_sum = vec![C::default(); n * nn];
        for k in 0..self.modes.len() {
            for &(s, g) in &self.modes.nonzero[k] {
                kernel::axpy(g.conj(), &a[k * nn..(k + 1) * nn], &mut y_sum[s * nn..(s + 1) * nn]);
            }
        }
        let mut u = vec![C::default(); nn];
        let mut prod = vec![C::default(); nn];
        let one = c(R::one(), R::zero());
        let mut inter = C::default();
        for s in 0..n {
            let ys = &y_sum[s * nn..(s + 1) * nn];
            kernel::adjoint_into(n, ys, &mut u);
            for q in 0..nn {
                u[q] += ys[q];
            }
            let tss = (s * n + s) * nn;
            prod.fill(C::default());
            kernel::mat_mul_acc(n, one, &u, &t[tss..tss + nn], &mut prod);
            kernel::mat_mul_acc(n, one, &t[tss..tss + nn], &u, &mut prod);
            inter += expect(n, rho, &prod);
        }
        if self.energy.interaction == InteractionPrefactor::Half {
            inter = inter * R::lit(0.5);
        }
        Some((e + inter).re)
    }
}

/// Higher-order flow: adds one interaction grid `M[ŝ_k]` per mode.
#[derive(Debug, Clone)]
pub struct GeneralHigh<R> {
    n: usize,
    v: VCommutator<R>,
    modes: Modes<R>,
    energy: EnergyConvention,
    y_sum: Vec<C<R>>,
    z: Vec<C<R>>,
    zd: Vec<C<R>>,
    w: Vec<C<R>>,
}

impl<R: Real> GeneralHigh<R> {
    pub fn new(system: &SystemSpec, bath: &DiscreteBath) -> Result<Self, DynamicsError> {
        let n = system.n_sites();
        Ok(Self {
            n,
            v: VCommutator::new(system),
            modes: Modes::new(system, bath)?,
            energy: EnergyConvention::default(),
            y_sum: vec![C::default(); n * n * n],
            z: vec![C::default(); n.pow(4)],
            zd: vec![C::default(); n.pow(4)],
            w: vec![C::default(); n.pow(4)],
        })
    }

    pub fn with_energy_convention(mut self, convention: EnergyConvention) -> Self {
        self.energy = convention;
        self
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn mode_operator<'a>(&self, y: &'a [C<R>], k: usize) -> &'a [C<R>] {
        let nn = self.n * self.n;
        let start = self.n.pow(4) + k * nn;
        &y[start..start + nn]
    }

    /// The grid `M[ŝ_k]` inside a flat state.
    pub fn interaction_grid<'a>(&self, y: &'a [C<R>], k: usize) -> &'a [C<R>] {
        let nb = self.n.pow(4);
        let start = nb + self.modes.len() * self.n * self.n + k * nb;
        &y[start..start + nb]
    }
}

impl<R: Real> OdeSystem<R> for GeneralHigh<R> {
    fn dim(&self) -> usize {
        let nb = self.n.pow(4);
        nb + self.modes.len() * (self.n * self.n + nb)
    }

    fn rhs(&mut self, _t: R, y: &[C<R>], dy: &mut [C<R>]) {
        let n = self.n;
        let nn = n * n;
        let nb = nn * nn;
        let k_len = self.modes.len();
        let (t, rest) = y.split_at(nb);
        let (a, s) = rest.split_at(k_len * nn);
        let (dt, drest) = dy.split_at_mut(nb);
        let (da, ds) = drest.split_at_mut(k_len * nn);

        self.modes.bath_step(t, a, da, &mut self.y_sum);
        fill_z(n, &self.y_sum, &mut self.z, &mut self.zd);

        // W[m][n] = Σ_k (g_km − g_kn)·S_k[n][m]† + (ḡ_km − ḡ_kn)·S_k[m][n]
        let w = &mut self.w;
        w.fill(C::default());
        let mut adj = vec![C::default(); nn];
        for k in 0..k_len {
            let gk = &self.modes.g[k * n..(k + 1) * n];
            let sk = &s[k * nb..(k + 1) * nb];
            for m in 0..n {
                for col in 0..n {
                    let dg = gk[m] - gk[col];
                    if dg == C::default() {
                        continue;
                    }
                    let b = (m * n + col) * nn;
                    let bt = (col * n + m) * nn;
                    kernel::adjoint_into(n, &sk[bt..bt + nn], &mut adj);
                    let wb = &mut w[b..b + nn];
                    kernel::axpy(dg, &adj, wb);
                    kernel::axpy(dg.conj(), &sk[b..b + nn], wb);
                }
            }
        }

        let i = c(R::zero(), R::one());
        let half_i = c(R::zero(), R::lit(0.5));
        dt.fill(C::default());
        self.v.apply(i, t, dt);
        kernel::axpy(i, w, dt);

        for k in 0..k_len {
            let sk = &s[k * nb..(k + 1) * nb];
            let dsk = &mut ds[k * nb..(k + 1) * nb];
            let ak = &a[k * nn..(k + 1) * nn];
            let gk = &self.modes.g[k * n..(k + 1) * n];
            let decay = c(R::zero(), -self.modes.omega[k]);
            for (d, &x) in dsk.iter_mut().zip(sk) {
                *d = decay * x;
            }
            self.v.apply(i, sk, dsk);
            for m in 0..n {
                for col in 0..n {
                    let b = (m * n + col) * nn;
                    let sb = &sk[b..b + nn];
                    let out = &mut dsk[b..b + nn];
                    if m != col {
                        kernel::mat_mul_acc(n, half_i, &w[b..b + nn], ak, out);
                        kernel::mat_mul_acc(n, half_i, &self.zd[b..b + nn], sb, out);
                        kernel::mat_mul_acc(n, half_i, sb, &self.z[b..b + nn], out);
                    }
                    let g = gk[col];
                    if g != C::default() {
                        kernel::axpy(c(g.im, -g.re), &t[b..b + nn], out);
                    }
                }
            }
        }
    }
}

impl<R: Real> RoaSystem<R> for GeneralHigh<R> {
    fn variant(&self) -> Variant {
        Variant::GeneralHigh
    }

    fn n_sites(&self) -> usize {
        self.n
    }

    fn initial_state(&self) -> Vec<C<R>> {
        initial_flat(self.n, self.dim() - self.n.pow(4))
    }

    fn energy(&self, y: &[C<R>], rho0: &ComplexMatrix<R>) -> Option<R> {
        let n = self.n;
        if !check_rho(n, rho0) {
            return None;
        }
        let nn = n * n;
        let nb = nn * nn;
        let k_len = self.modes.len();
        let rho = rho0.as_slice();
        let (t, rest) = y.split_at(nb);
        let (a, s) = rest.split_at(k_len * nn);
        let mut e = system_energy(n, self.v.matrix(), rho, t);
        e += self.modes.bath_energy(rho, a, self.energy.bath);

        // Σ_k Σ_n g_kn·S_k[n][n]† + ḡ_kn·S_k[n][n]
        let mut adj = vec![C::default(); nn];
        let mut acc = vec![C::default(); nn];
        for k in 0..k_len {
            for &(site, g) in &self.modes.nonzero[k] {
                let b = k * nb + (site * n + site) * nn;
                let snn = &s[b..b + nn];
                kernel::adjoint_into(n, snn, &mut adj);
                kernel::axpy(g, &adj, &mut acc);
                kernel::axpy(g.conj(), snn, &mut acc);
            }
        }
        e += expect(n, rho, &acc);
        Some(e.re)
    }
}
