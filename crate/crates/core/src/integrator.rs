// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Explicit time stepping for flattened complex states.
//!
//! Fixed-step classical RK4 is the default; an embedded Dormand-Prince 5(4)
//! pair with PI step control is available when `adaptive` is set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::kernel;
use crate::scalar::{Real, C};

/// Right-hand side of `dy/dt = f(t, y)` on a flat complex state.
pub trait OdeSystem<R: Real> {
    fn dim(&self) -> usize;
    fn rhs(&mut self, t: R, y: &[C<R>], dy: &mut [C<R>]);
}

/// Adapts a closure into an [`OdeSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F> FnSystem<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<R: Real, F: FnMut(R, &[C<R>], &mut [C<R>])> OdeSystem<R> for FnSystem<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn rhs(&mut self, t: R, y: &[C<R>], dy: &mut [C<R>]) {
        (self.f)(t, y, dy)
    }
}

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_MAX: f64 = 30.0;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_BLOWUP: f64 = 1e6;

fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_t_max() -> f64 {
    DEFAULT_T_MAX
}
fn default_stride() -> usize {
    1
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_blowup() -> f64 {
    DEFAULT_BLOWUP
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
    #[serde(default)]
    pub adaptive: bool,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            t_max: DEFAULT_T_MAX,
            sample_stride: 1,
            adaptive: false,
            tol: DEFAULT_TOL,
            blowup_threshold: DEFAULT_BLOWUP,
        }
    }
}

impl IntegratorConfig {
    pub fn fixed(dt: f64, t_max: f64, sample_stride: usize) -> Self {
        Self { dt, t_max, sample_stride, ..Self::default() }
    }

    /// Returns every violated constraint as `(field, message)`.
    pub fn problems(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !(self.dt.is_finite() && self.dt > 0.0) {
            out.push(("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            out.push(("t_max", format!("must be positive, got {}", self.t_max)));
        } else if self.dt >= self.t_max {
            out.push(("dt", format!("must be smaller than t_max ({} >= {})", self.dt, self.t_max)));
        }
        if self.sample_stride == 0 {
            out.push(("sample_stride", "must be at least 1".to_string()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            out.push(("tol", format!("must lie in (0, 1), got {}", self.tol)));
        }
        if !(self.blowup_threshold > 0.0) {
            out.push(("blowup_threshold", format!("must be positive, got {}", self.blowup_threshold)));
        }
        out
    }

    pub fn check(&self) -> Result<(), IntegratorError> {
        match self.problems().into_iter().next() {
            None => Ok(()),
            Some((field, msg)) => Err(IntegratorError::InvalidConfig(format!("{field}: {msg}"))),
        }
    }

    /// Number of fixed steps; the last one is shortened if `t_max/dt` is not integral.
    pub fn n_steps(&self) -> usize {
        let r = self.t_max / self.dt;
        let k = r.round();
        if (r - k).abs() < 1e-9 * r.max(1.0) {
            k as usize
        } else {
            r.ceil() as usize
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("state has length {found}, system expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Completed,
    /// A state entry exceeded the blow-up threshold or became non-finite.
    Diverged { time: f64 },
    Error { time: f64, message: String },
}

#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub samples: Vec<S>,
    pub status: Status,
}

impl<S> Trajectory<S> {
    pub fn is_completed(&self) -> bool {
        self.status == Status::Completed
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn map<T>(self, f: impl FnMut(S) -> T) -> Trajectory<T> {
        Trajectory { times: self.times, samples: self.samples.into_iter().map(f).collect(), status: self.status }
    }
}

fn state_health<R: Real>(y: &[C<R>], threshold: R) -> bool {
    let m = kernel::max_abs(y);
    m.is_finite() && m <= threshold
}

/// Advances `y0` to `cfg.t_max`, calling `sampler` on accepted states only:
/// at `t = 0`, after every `sample_stride` accepted steps, and at `t_max`.
pub fn integrate<R, Sys, S, F>(
    sys: &mut Sys,
    y0: Vec<C<R>>,
    cfg: &IntegratorConfig,
    mut sampler: F,
) -> Result<Trajectory<S>, IntegratorError>
where
    R: Real,
    Sys: OdeSystem<R>,
    F: FnMut(f64, &[C<R>]) -> S,
{
    cfg.check()?;
    if y0.len() != sys.dim() {
        return Err(IntegratorError::DimensionMismatch { expected: sys.dim(), found: y0.len() });
    }
    let mut traj = Trajectory { times: Vec::new(), samples: Vec::new(), status: Status::Completed };
    traj.times.push(0.0);
    traj.samples.push(sampler(0.0, &y0));
    if !state_health(&y0, R::lit(cfg.blowup_threshold)) {
        traj.status = Status::Diverged { time: 0.0 };
        return Ok(traj);
    }
    if cfg.adaptive {
        dopri5(sys, y0, cfg, &mut sampler, &mut traj);
    } else {
        rk4(sys, y0, cfg, &mut sampler, &mut traj);
    }
    Ok(traj)
}

fn rk4<R, Sys, S, F>(sys: &mut Sys, mut y: Vec<C<R>>, cfg: &IntegratorConfig, sampler: &mut F, traj: &mut Trajectory<S>)
where
    R: Real,
    Sys: OdeSystem<R>,
    F: FnMut(f64, &[C<R>]) -> S,
{
    let n = y.len();
    let mut k = vec![C::<R>::default(); n];
    let mut tmp = vec![C::<R>::default(); n];
    let mut acc = vec![C::<R>::default(); n];
    let threshold = R::lit(cfg.blowup_threshold);
    let steps = cfg.n_steps();
    let two = R::lit(2.0);
    for step in 0..steps {
        let t0 = step as f64 * cfg.dt;
        let t1 = if step + 1 == steps { cfg.t_max } else { (step + 1) as f64 * cfg.dt };
        let h = R::lit(t1 - t0);
        let half = h / two;
        let t = R::lit(t0);

        sys.rhs(t, &y, &mut k);
        for i in 0..n {
            acc[i] = k[i];
            tmp[i] = y[i] + k[i] * half;
        }
        sys.rhs(t + half, &tmp, &mut k);
        for i in 0..n {
            acc[i] += k[i] * two;
            tmp[i] = y[i] + k[i] * half;
        }
        sys.rhs(t + half, &tmp, &mut k);
        for i in 0..n {
            acc[i] += k[i] * two;
            tmp[i] = y[i] + k[i] * h;
        }
        sys.rhs(t + h, &tmp, &mut k);
        let sixth = h / R::lit(6.0);
        for i in 0..n {
            y[i] += (acc[i] + k[i]) * sixth;
        }

        let last = step + 1 == steps;
        if !state_health(&y, threshold) {
            traj.times.push(t1);
            traj.samples.push(sampler(t1, &y));
            traj.status = Status::Diverged { time: t1 };
            return;
        }
        if last || (step + 1) % cfg.sample_stride == 0 {
            traj.times.push(t1);
            traj.samples.push(sampler(t1, &y));
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

fn combine<R: Real>(out: &mut [C<R>], y: &[C<R>], h: f64, terms: &[(f64, &[C<R>])]) {
    out.copy_from_slice(y);
    for &(a, k) in terms {
        kernel::axpy_real(R::lit(h * a), k, out);
    }
}

fn dopri5<R, Sys, S, F>(sys: &mut Sys, mut y: Vec<C<R>>, cfg: &IntegratorConfig, sampler: &mut F, traj: &mut Trajectory<S>)
where
    R: Real,
    Sys: OdeSystem<R>,
    F: FnMut(f64, &[C<R>]) -> S,
{
    let n = y.len();
    let z = C::<R>::default();
    let mut k: Vec<Vec<C<R>>> = (0..7).map(|_| vec![z; n]).collect();
    let mut tmp = vec![z; n];
    let mut y_new = vec![z; n];
    let threshold = R::lit(cfg.blowup_threshold);
    let h_max = 10.0 * cfg.dt;
    let h_min = 1e-12 * cfg.t_max;
    let (beta, alpha) = (0.04, 0.2 - 0.75 * 0.04);
    let mut err_prev: f64 = 1e-4;
    let mut h = cfg.dt.min(h_max);
    let mut t = 0.0f64;
    let mut accepted = 0usize;

    sys.rhs(R::lit(t), &y, &mut k[0]);
    while t < cfg.t_max {
        let last = t + h >= cfg.t_max * (1.0 - 1e-14);
        if last {
            h = cfg.t_max - t;
        }
        let tr = |x: f64| R::lit(x);
        {
            let (k0, rest) = k.split_at_mut(1);
            combine(&mut tmp, &y, h, &[(A21, &k0[0])]);
            sys.rhs(tr(t + C2 * h), &tmp, &mut rest[0]);
        }
        {
            let (done, rest) = k.split_at_mut(2);
            combine(&mut tmp, &y, h, &[(A31, &done[0]), (A32, &done[1])]);
            sys.rhs(tr(t + C3 * h), &tmp, &mut rest[0]);
        }
        {
            let (done, rest) = k.split_at_mut(3);
            combine(&mut tmp, &y, h, &[(A41, &done[0]), (A42, &done[1]), (A43, &done[2])]);
            sys.rhs(tr(t + C4 * h), &tmp, &mut rest[0]);
        }
        {
            let (done, rest) = k.split_at_mut(4);
            combine(&mut tmp, &y, h, &[(A51, &done[0]), (A52, &done[1]), (A53, &done[2]), (A54, &done[3])]);
            sys.rhs(tr(t + C5 * h), &tmp, &mut rest[0]);
        }
        {
            let (done, rest) = k.split_at_mut(5);
            combine(
                &mut tmp,
                &y,
                h,
                &[(A61, &done[0]), (A62, &done[1]), (A63, &done[2]), (A64, &done[3]), (A65, &done[4])],
            );
            sys.rhs(tr(t + h), &tmp, &mut rest[0]);
        }
        {
            let (done, rest) = k.split_at_mut(6);
            combine(
                &mut y_new,
                &y,
                h,
                &[(B1, &done[0]), (B3, &done[2]), (B4, &done[3]), (B5, &done[4]), (B6, &done[5])],
            );
            sys.rhs(tr(t + h), &y_new, &mut rest[0]);
        }

        let mut err_sq = 0.0f64;
        for i in 0..n {
            let e = k[0][i] * tr(E1) + k[2][i] * tr(E3) + k[3][i] * tr(E4) + k[4][i] * tr(E5) + k[5][i] * tr(E6)
                + k[6][i] * tr(E7);
            let e = e.norm().to_f64_lossy() * h;
            let scale = cfg.tol * (1.0 + y[i].norm().to_f64_lossy().max(y_new[i].norm().to_f64_lossy()));
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / n.max(1) as f64).sqrt();

        if !err.is_finite() {
            if !state_health(&y_new, threshold) && h <= h_min * 2.0 {
                traj.times.push(t + h);
                traj.samples.push(sampler(t + h, &y_new));
                traj.status = Status::Diverged { time: t + h };
                return;
            }
            h *= 0.2;
            if h < h_min {
                traj.status = Status::Diverged { time: t };
                return;
            }
            continue;
        }

        if err <= 1.0 {
            t = if last { cfg.t_max } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            accepted += 1;
            if !state_health(&y, threshold) {
                traj.times.push(t);
                traj.samples.push(sampler(t, &y));
                traj.status = Status::Diverged { time: t };
                return;
            }
            if last || accepted % cfg.sample_stride == 0 {
                traj.times.push(t);
                traj.samples.push(sampler(t, &y));
            }
            let fac = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-alpha) * err_prev.powf(beta) };
            h = (h * fac.clamp(0.2, 5.0)).min(h_max);
            err_prev = err.max(1e-4);
        } else {
            let fac = (0.9 * err.powf(-alpha)).clamp(0.2, 1.0);
            h *= fac;
            if h < h_min {
                traj.status = Status::Error { time: t, message: "step size underflow".to_string() };
                return;
            }
        }
    }
}
