// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Built-in scenarios: the four single-peak baths on a three-site chain and
//! the fifteen-site ring.

use thiserror::Error;

use crate::integrator::IntegratorConfig;
use crate::model::{LorentzianPeak, SystemSpec};
use crate::scenario::{InitialState, Method, PmSettings, Scenario};

pub const PRESET_NAMES: [&str; 5] = ["bath-A", "bath-B", "bath-C", "bath-D", "ring-15"];

/// Step used for the pseudomode reference in presets.
pub const PM_DT: f64 = 0.02;
pub const ROA_DT: f64 = 1e-3;
/// Sampling interval shared by every preset.
pub const SAMPLE_INTERVAL: f64 = 0.02;
pub const T_MAX: f64 = 30.0;
pub const RING_SITES: usize = 15;
/// Initially excited ring site (0-based).
pub const RING_START: usize = 7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PresetError {
    #[error("unknown preset `{0}` (expected one of: bath-A, bath-B, bath-C, bath-D, ring-15)")]
    Unknown(String),
    #[error("ring-15 has no built-in bath; supply explicit Lorentzian peaks")]
    NeedsPeaks,
}

/// `(γ, Γ)` of a single-peak bath preset.
pub fn bath_parameters(name: &str) -> Option<(f64, f64)> {
    match name {
        "bath-A" => Some((0.1, 0.3)),
        "bath-B" => Some((0.1, 1.0)),
        "bath-C" => Some((0.5, 0.3)),
        "bath-D" => Some((0.5, 1.0)),
        _ => None,
    }
}

pub fn default_n_max(name: &str) -> usize {
    match name {
        "bath-B" | "bath-D" => 6,
        _ => 4,
    }
}

/// Integrator settings for `method`: RK4 at `1e-3` for the reduced flows, `2e-2`
/// for the pseudomode reference, both sampled every `0.02`.
pub fn integrator_for(method: Method, t_max: f64) -> IntegratorConfig {
    let dt = if method == Method::PmReference { PM_DT } else { ROA_DT };
    IntegratorConfig::fixed(dt, t_max, (SAMPLE_INTERVAL / dt).round() as usize)
}

fn pairs(v: &SystemSpec) -> Vec<Vec<[f64; 2]>> {
    let n = v.n_sites();
    (0..n).map(|r| (0..n).map(|c| [v.couplings()[(r, c)].re, v.couplings()[(r, c)].im]).collect()).collect()
}

fn basis_state(n: usize, site: usize) -> InitialState {
    InitialState::Vector((0..n).map(|k| [if k == site { 1.0 } else { 0.0 }, 0.0]).collect())
}

pub fn preset(name: &str) -> Result<Scenario, PresetError> {
    preset_with_method(name, Method::LorentzianLow)
}

pub fn preset_with_method(name: &str, method: Method) -> Result<Scenario, PresetError> {
    if name == "ring-15" {
        return Err(PresetError::NeedsPeaks);
    }
    let (gamma, strength) = bath_parameters(name).ok_or_else(|| PresetError::Unknown(name.to_string()))?;
    let system = SystemSpec::chain(3);
    let peak = LorentzianPeak { gamma, strength, omega0: 1.0 };
    Ok(Scenario {
        name: Some(name.to_string()),
        n_sites: 3,
        couplings: pairs(&system),
        baths: vec![vec![peak]; 3],
        modes: None,
        discretization: None,
        initial_state: basis_state(3, 0),
        method,
        integrator: integrator_for(method, T_MAX),
        pm: PmSettings { n_max: default_n_max(name), ..PmSettings::default() },
    })
}

/// The nearest-neighbour ring with site 8 (index 7) excited; every site gets
/// the same peak list.
pub fn ring15(peaks: &[LorentzianPeak], method: Method) -> Result<Scenario, PresetError> {
    if peaks.is_empty() {
        return Err(PresetError::NeedsPeaks);
    }
    let system = SystemSpec::ring(RING_SITES);
    Ok(Scenario {
        name: Some("ring-15".to_string()),
        n_sites: RING_SITES,
        couplings: pairs(&system),
        baths: vec![peaks.to_vec(); RING_SITES],
        modes: None,
        discretization: None,
        initial_state: basis_state(RING_SITES, RING_START),
        method,
        integrator: integrator_for(method, T_MAX),
        pm: PmSettings::default(),
    })
}
