// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Reduced operator dynamics for finite quantum systems coupled to harmonic
//! baths, with a pseudomode Lindblad reference solver.
//!
//! The numerical core is generic over the real scalar type ([`Real`], implemented
//! for `f32` and `f64`). Problem definitions ([`model`], [`scenario`]) are in
//! `f64`; the aliases below fix the common `f64` instantiations.

pub mod dynamics;
pub mod integrator;
pub mod model;
pub mod observables;
pub mod operator;
pub mod oracles;
pub mod pm;
pub mod presets;
pub mod report;
pub mod scalar;
pub mod scenario;
pub mod simulate;

pub use dynamics::{EnergyConvention, GeneralHigh, GeneralLow, LorentzianHigh, LorentzianLow, RoaSystem};
pub use integrator::{integrate, IntegratorConfig, IntegratorError, OdeSystem, Status, Trajectory};
pub use model::{DiscreteBath, DiscreteMode, Discretization, LorentzianPeak, ModelError, SiteBath, SystemSpec};
pub use observables::{ObservableRecord, RhoForm};
pub use operator::{BlockOperatorMatrix, ComplexMatrix, OperatorError};
pub use scalar::{Real, C};
pub use scenario::{BathInput, Method, Scenario, ValidatedScenario, ValidationError};
pub use simulate::{run, RunError, RunOutput};

pub type Complex64 = num_complex::Complex64;
pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type BlockOperatorMatrix64 = BlockOperatorMatrix<f64>;
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type BlockOperatorMatrix32 = BlockOperatorMatrix<f32>;
pub type GeneralLow64 = GeneralLow<f64>;
pub type GeneralHigh64 = GeneralHigh<f64>;
pub type LorentzianLow64 = LorentzianLow<f64>;
pub type LorentzianHigh64 = LorentzianHigh<f64>;
pub type Trajectory64 = Trajectory<ObservableRecord>;
