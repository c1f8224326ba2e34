// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Runs a validated scenario with its selected method and samples observables.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::dynamics::{DynamicsError, EnergyConvention, GeneralHigh, GeneralLow, LorentzianHigh, LorentzianLow, RoaSystem};
use crate::integrator::{integrate, IntegratorConfig, IntegratorError, Status, Trajectory};
use crate::model::ModelError;
use crate::observables::{ObservableError, ObservableRecord, RhoForm};
use crate::operator::ComplexMatrix;
use crate::pm::{PmError, PmModel};
use crate::scenario::{Method, ValidatedScenario};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Pm(#[from] PmError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub rho_form: RhoForm,
    pub energy: EnergyConvention,
    /// Repeat a pseudomode run at `n_max + 1` and report the difference.
    pub pm_convergence_check: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { rho_form: RhoForm::Positive, energy: EnergyConvention::default(), pm_convergence_check: false }
    }
}

/// Difference between pseudomode runs at `n_max` and `n_max + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmConvergence {
    pub n_max: usize,
    pub max_delta_rho11: f64,
    pub max_delta: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub method: Method,
    pub n_sites: usize,
    pub integrator: IntegratorConfig,
    pub trajectory: Trajectory<ObservableRecord>,
    pub runtime: Duration,
    pub pm_convergence: Option<PmConvergence>,
}

impl RunOutput {
    pub fn status(&self) -> &Status {
        &self.trajectory.status
    }
}

pub fn run(sc: &ValidatedScenario) -> Result<RunOutput, RunError> {
    run_with(sc, &RunOptions::default())
}

pub fn run_with(sc: &ValidatedScenario, opts: &RunOptions) -> Result<RunOutput, RunError> {
    let start = Instant::now();
    let cfg = sc.integrator;
    let peaks = || sc.peaks().unwrap_or(&[]);
    let mut pm_convergence = None;
    let trajectory = match sc.method {
        Method::GeneralLow => {
            let sys = GeneralLow::new(&sc.system, &sc.discrete_bath()?)?.with_energy_convention(opts.energy);
            run_roa(sys, &sc.rho0, &cfg, opts.rho_form)?
        }
        Method::GeneralHigh => {
            let sys = GeneralHigh::new(&sc.system, &sc.discrete_bath()?)?.with_energy_convention(opts.energy);
            run_roa(sys, &sc.rho0, &cfg, opts.rho_form)?
        }
        Method::LorentzianLow => run_roa(LorentzianLow::new(&sc.system, peaks())?, &sc.rho0, &cfg, opts.rho_form)?,
        Method::LorentzianHigh => run_roa(LorentzianHigh::new(&sc.system, peaks())?, &sc.rho0, &cfg, opts.rho_form)?,
        Method::PmReference => {
            let model = PmModel::from_baths(sc.system.clone(), peaks(), sc.pm.n_max, sc.pm.dim_cap)?;
            let traj = run_pm(&model, &sc.rho0, &cfg)?;
            if opts.pm_convergence_check {
                let finer = run_pm(&model.with_n_max(sc.pm.n_max + 1)?, &sc.rho0, &cfg)?;
                pm_convergence = Some(compare_pm(sc.pm.n_max, &traj, &finer));
            }
            traj
        }
    };
    Ok(RunOutput { method: sc.method, n_sites: sc.n_sites(), integrator: cfg, trajectory, runtime: start.elapsed(), pm_convergence })
}

fn compare_pm(n_max: usize, a: &Trajectory<ObservableRecord>, b: &Trajectory<ObservableRecord>) -> PmConvergence {
    let mut out = PmConvergence { n_max, max_delta_rho11: 0.0, max_delta: 0.0 };
    for (x, y) in a.samples.iter().zip(&b.samples) {
        out.max_delta_rho11 = out.max_delta_rho11.max((x.population(0) - y.population(0)).abs());
        out.max_delta = out.max_delta.max((&x.rho - &y.rho).max_abs());
    }
    out
}

/// Integrates a reduced flow from `T(0) = t̂` and records `ρ_s`, purity,
/// energy and the trace residual at every sample.
pub fn run_roa<S>(
    mut sys: S,
    rho0: &ComplexMatrix<f64>,
    cfg: &IntegratorConfig,
    form: RhoForm,
) -> Result<Trajectory<ObservableRecord>, IntegratorError>
where
    S: RoaSystem<f64> + Clone,
{
    let probe = sys.clone();
    let n = sys.n_sites();
    let y0 = sys.initial_state();
    let raw = integrate(&mut sys, y0, cfg, |t, y| {
        let energy = probe.energy(y, rho0);
        ObservableRecord::from_grid(t, n, probe.transition_slice(y), rho0, form, energy)
    })?;
    Ok(settle(raw))
}

/// Truncates at the first sample whose observables could not be formed.
fn settle(raw: Trajectory<Result<ObservableRecord, ObservableError>>) -> Trajectory<ObservableRecord> {
    let mut out = Trajectory { times: Vec::new(), samples: Vec::new(), status: raw.status.clone() };
    let count = raw.len();
    for (i, (t, s)) in raw.times.into_iter().zip(raw.samples).enumerate() {
        match s {
            Ok(rec) => {
                out.times.push(t);
                out.samples.push(rec);
            }
            Err(e) => {
                let diverging_tail = i + 1 == count && matches!(raw.status, Status::Diverged { .. });
                if !diverging_tail {
                    out.status = Status::Error { time: t, message: e.to_string() };
                }
                break;
            }
        }
    }
    out
}

pub fn run_pm(model: &PmModel, rho0: &ComplexMatrix<f64>, cfg: &IntegratorConfig) -> Result<Trajectory<ObservableRecord>, RunError> {
    let mut generator = model.generator::<f64>();
    let y0 = model.initial_state::<f64>(rho0)?;
    let traj = integrate(&mut generator, y0, cfg, |t, y| ObservableRecord::from_rho(t, model.reduced_density(y)))?;
    Ok(traj)
}
