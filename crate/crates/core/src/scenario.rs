// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON scenario documents and their validation.
//!
//! Complex numbers are written as `[re, im]` pairs. Site indices are 0-based.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::Variant;
use crate::integrator::IntegratorConfig;
use crate::model::{discretize, DiscreteBath, DiscreteMode, Discretization, LorentzianPeak, ModelError, SiteBath, SystemSpec, HERMITIAN_TOL};
use crate::operator::ComplexMatrix;
use crate::pm::{PmModel, DEFAULT_DIM_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GeneralLow,
    GeneralHigh,
    LorentzianLow,
    LorentzianHigh,
    PmReference,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::GeneralLow, Method::GeneralHigh, Method::LorentzianLow, Method::LorentzianHigh, Method::PmReference];

    pub fn name(self) -> &'static str {
        match self {
            Method::GeneralLow => "general-low",
            Method::GeneralHigh => "general-high",
            Method::LorentzianLow => "lorentzian-low",
            Method::LorentzianHigh => "lorentzian-high",
            Method::PmReference => "pm-reference",
        }
    }

    pub fn variant(self) -> Option<Variant> {
        match self {
            Method::GeneralLow => Some(Variant::GeneralLow),
            Method::GeneralHigh => Some(Variant::GeneralHigh),
            Method::LorentzianLow => Some(Variant::LorentzianLow),
            Method::LorentzianHigh => Some(Variant::LorentzianHigh),
            Method::PmReference => None,
        }
    }

    pub fn needs_peaks(self) -> bool {
        matches!(self, Method::LorentzianLow | Method::LorentzianHigh | Method::PmReference)
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected one of: {})", Method::ALL.map(Method::name).join(", ")))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type Pair = [f64; 2];

/// An explicit bath mode: frequency and one coupling per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeInput {
    pub omega: f64,
    pub couplings: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Vector(Vec<Pair>),
    Matrix(Vec<Vec<Pair>>),
}

fn default_n_max() -> usize {
    4
}
fn default_cap() -> usize {
    DEFAULT_DIM_CAP
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmSettings {
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_cap")]
    pub dim_cap: usize,
}

impl Default for PmSettings {
    fn default() -> Self {
        Self { n_max: default_n_max(), dim_cap: default_cap() }
    }
}

/// A scenario document as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n_sites: usize,
    pub couplings: Vec<Vec<Pair>>,
    /// Peak list per site; `baths[m]` belongs to site `m`. Empty lists mean no bath.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub baths: Vec<Vec<LorentzianPeak>>,
    /// Explicit discrete modes, an alternative to `baths`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<ModeInput>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discretization: Option<Discretization>,
    pub initial_state: InitialState,
    pub method: Method,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub pm: PmSettings,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ValidationError> {
        serde_json::from_str(text).map_err(|e| ValidationError::single("", format!("{e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<ValidatedScenario, ValidationError> {
        validate(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub errors: Vec<FieldError>,
}

impl ValidationError {
    pub fn single(path: &str, message: impl Into<String>) -> Self {
        Self { errors: vec![FieldError { path: path.to_string(), message: message.into() }] }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationError {}

/// The bath in the form the scenario supplied it.
#[derive(Debug, Clone, PartialEq)]
pub enum BathInput {
    Peaks(Vec<SiteBath>),
    Modes(DiscreteBath),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedScenario {
    pub name: Option<String>,
    pub system: SystemSpec,
    pub bath: BathInput,
    pub discretization: Option<Discretization>,
    /// Normalized initial system state.
    pub rho0: ComplexMatrix<f64>,
    pub method: Method,
    pub integrator: IntegratorConfig,
    pub pm: PmSettings,
}

impl ValidatedScenario {
    pub fn n_sites(&self) -> usize {
        self.system.n_sites()
    }

    pub fn peaks(&self) -> Option<&[SiteBath]> {
        match &self.bath {
            BathInput::Peaks(p) => Some(p),
            BathInput::Modes(_) => None,
        }
    }

    /// The discrete bath used by the general variants: the explicit modes, or
    /// every site bath sampled on its grid.
    pub fn discrete_bath(&self) -> Result<DiscreteBath, ModelError> {
        match &self.bath {
            BathInput::Modes(m) => Ok(m.clone()),
            BathInput::Peaks(baths) => {
                let mut out = DiscreteBath::empty(self.n_sites());
                for b in baths {
                    let grid = self.discretization.unwrap_or_else(|| b.default_discretization());
                    out.extend(discretize(b, self.n_sites(), &grid)?);
                }
                Ok(out)
            }
        }
    }

    pub fn pm_model(&self) -> Option<Result<PmModel, crate::pm::PmError>> {
        self.peaks().map(|p| PmModel::from_baths(self.system.clone(), p, self.pm.n_max, self.pm.dim_cap))
    }

    pub fn with_method(&self, method: Method) -> Result<Self, ValidationError> {
        if method.needs_peaks() && self.peaks().is_none() {
            return Err(ValidationError::single("method", format!("{method} needs Lorentzian `baths`, not explicit `modes`")));
        }
        let mut out = self.clone();
        out.method = method;
        if method == Method::PmReference {
            if let Some(Err(e)) = out.pm_model() {
                return Err(ValidationError::single("pm", e.to_string()));
            }
        }
        Ok(out)
    }
}

fn pair(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn finite(p: &Pair) -> bool {
    p[0].is_finite() && p[1].is_finite()
}

pub fn validate(sc: &Scenario) -> Result<ValidatedScenario, ValidationError> {
    let mut errs: Vec<FieldError> = Vec::new();
    let mut err = |path: String, message: String| errs.push(FieldError { path, message });
    let n = sc.n_sites;
    if n == 0 {
        err("n_sites".into(), "must be at least 1".into());
    }

    // couplings
    let mut v = ComplexMatrix::<f64>::zeros(n);
    let mut v_ok = sc.couplings.len() == n;
    if !v_ok {
        err("couplings".into(), format!("expected {n} rows, found {}", sc.couplings.len()));
    }
    for (r, row) in sc.couplings.iter().enumerate() {
        if row.len() != n {
            err(format!("couplings[{r}]"), format!("expected {n} entries, found {}", row.len()));
            v_ok = false;
            continue;
        }
        for (q, z) in row.iter().enumerate() {
            if !finite(z) {
                err(format!("couplings[{r}][{q}]"), "must be finite".into());
                v_ok = false;
            } else if r < n {
                v[(r, q)] = pair(z);
            }
        }
    }
    if v_ok {
        for r in 0..n {
            for q in r..n {
                if (v[(r, q)] - v[(q, r)].conj()).norm() > HERMITIAN_TOL {
                    err(format!("couplings[{r}][{q}]"), format!("not the conjugate of couplings[{q}][{r}] (V must be Hermitian)"));
                }
            }
        }
    }

    // bath
    let mut bath = BathInput::Peaks(Vec::new());
    if sc.modes.is_some() && !sc.baths.is_empty() {
        err("modes".into(), "give either `baths` or `modes`, not both".into());
    }
    if let Some(modes) = &sc.modes {
        let mut list = Vec::new();
        for (k, m) in modes.iter().enumerate() {
            if !m.omega.is_finite() {
                err(format!("modes[{k}].omega"), "must be finite".into());
            }
            if m.couplings.len() != n {
                err(format!("modes[{k}].couplings"), format!("expected {n} entries, found {}", m.couplings.len()));
                continue;
            }
            if let Some(q) = m.couplings.iter().position(|z| !finite(z)) {
                err(format!("modes[{k}].couplings[{q}]"), "must be finite".into());
                continue;
            }
            list.push(DiscreteMode { omega: m.omega, couplings: m.couplings.iter().map(pair).collect() });
        }
        if let Ok(b) = DiscreteBath::new(n, list) {
            bath = BathInput::Modes(b);
        }
        if sc.method.needs_peaks() {
            err("method".into(), format!("{} needs Lorentzian `baths`, not explicit `modes`", sc.method));
        }
    } else {
        if !sc.baths.is_empty() && sc.baths.len() != n {
            err("baths".into(), format!("expected one peak list per site ({n}), found {}", sc.baths.len()));
        }
        let mut site_baths = Vec::new();
        for (s, peaks) in sc.baths.iter().enumerate() {
            let mut ok = true;
            for (j, p) in peaks.iter().enumerate() {
                if let Err(e) = p.check() {
                    err(format!("baths[{s}][{j}]"), e.to_string());
                    ok = false;
                }
            }
            if ok && !peaks.is_empty() && s < n {
                site_baths.push(SiteBath { site: s, peaks: peaks.clone() });
            }
        }
        bath = BathInput::Peaks(site_baths);
    }
    if let Some(d) = &sc.discretization {
        if let Err(e) = d.check() {
            err("discretization".into(), e.to_string());
        }
    }

    // initial state
    let mut rho0 = ComplexMatrix::<f64>::zeros(n);
    match &sc.initial_state {
        InitialState::Vector(psi) => {
            if psi.len() != n {
                err("initial_state".into(), format!("expected {n} amplitudes, found {}", psi.len()));
            } else if psi.iter().any(|z| !finite(z)) {
                err("initial_state".into(), "amplitudes must be finite".into());
            } else {
                let amps: Vec<Complex64> = psi.iter().map(pair).collect();
                let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    err("initial_state".into(), "state vector is zero".into());
                } else {
                    let amps: Vec<Complex64> = amps.iter().map(|z| z / norm).collect();
                    rho0 = ComplexMatrix::outer(&amps);
                }
            }
        }
        InitialState::Matrix(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                err("initial_state".into(), format!("expected a {n}×{n} density matrix"));
            } else if rows.iter().flatten().any(|z| !finite(z)) {
                err("initial_state".into(), "entries must be finite".into());
            } else {
                let m = ComplexMatrix::from_fn(n, |a, b| pair(&rows[a][b]));
                let tr = m.trace();
                if m.hermitian_residual() > HERMITIAN_TOL {
                    err("initial_state".into(), "density matrix must be Hermitian".into());
                } else if tr.re <= 0.0 {
                    err("initial_state".into(), "density matrix trace must be positive".into());
                } else {
                    let m = m.scale(Complex64::new(1.0 / tr.re, 0.0));
                    if crate::observables::min_eigenvalue(&m) < -HERMITIAN_TOL {
                        err("initial_state".into(), "density matrix must be positive semidefinite".into());
                    }
                    rho0 = m;
                }
            }
        }
    }

    for (field, msg) in sc.integrator.problems() {
        err(format!("integrator.{field}"), msg);
    }
    if sc.pm.n_max == 0 {
        err("pm.n_max".into(), "must be at least 1".into());
    }

    if !errs.is_empty() {
        return Err(ValidationError { errors: errs });
    }
    let system = SystemSpec::new(v).map_err(|e| ValidationError::single("couplings", e.to_string()))?;
    let out = ValidatedScenario {
        name: sc.name.clone(),
        system,
        bath,
        discretization: sc.discretization,
        rho0,
        method: sc.method,
        integrator: sc.integrator,
        pm: sc.pm,
    };
    if out.method == Method::PmReference {
        if let Some(Err(e)) = out.pm_model() {
            return Err(ValidationError::single("pm", e.to_string()));
        }
    }
    Ok(out)
}
