//! Junction description, solver options, configuration parsing and bias.
//!
//! The configuration document is JSON:
//!
//! ```json
//! {
//!   "molecule": { "n_levels": 1, "energy": [[0.0]] },
//!   "lead_a": { "gamma": [[0.5]], "mu": 0.0, "temperature": 0.0 },
//!   "lead_b": { "gamma": [[0.5]], "mu": 0.0 },
//!   "eta": 1e-6,
//!   "solver": { "omega_max": 20.0, "n_omega": 4001 }
//! }
//! ```
//!
//! Optional blocks are `phonons` and `bias`; every solver field has a default.
//! See `docs/config.md` for the full schema.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::RMatrix;

const SYMMETRY_TOL: f64 = 1e-12;

/// One wide-band lead.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadSpec {
    /// Level-width matrix `Γ`, symmetric PSD, `N_e × N_e`.
    pub gamma: RMatrix,
    pub mu: f64,
    pub temperature: f64,
}

/// Primary phonon modes, their coupling to the levels and their damping bath.
#[derive(Debug, Clone, PartialEq)]
pub struct PhononSpec {
    pub omegas: Vec<f64>,
    /// `λ_{li}`, shape `N_p × N_e`.
    pub coupling: RMatrix,
    /// `Γ̃`, symmetric PSD, `N_p × N_p`.
    pub bath_gamma: RMatrix,
    pub bath_temperature: f64,
}

impl PhononSpec {
    pub fn n_modes(&self) -> usize {
        self.omegas.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionSpec {
    pub n_levels: usize,
    /// Level matrix including any bias-induced diagonal shifts.
    pub energy: RMatrix,
    pub lead_a: LeadSpec,
    pub lead_b: LeadSpec,
    pub phonons: Option<PhononSpec>,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InteractionOrder {
    /// Leads and bath only.
    None,
    /// One pass with bare propagators inside the self-energies.
    Born,
    /// Self-consistent Born iteration.
    #[default]
    Scba,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PhononPropagator {
    /// Single-pole free propagator, `−1/(ω ∓ Ω + iη)` on the two branches.
    #[default]
    Paper,
    /// Two-pole displacement propagator `2Ω/((ω+iη)² − Ω²)` with Bose occupation.
    Symmetrized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(default = "defaults::omega_max")]
    pub omega_max: f64,
    #[serde(default = "defaults::n_omega")]
    pub n_omega: usize,
    #[serde(default = "defaults::max_iter")]
    pub max_iter: usize,
    #[serde(default = "defaults::tol")]
    pub tol: f64,
    #[serde(default = "defaults::mixing")]
    pub mixing: f64,
    #[serde(default)]
    pub interaction_order: InteractionOrder,
    #[serde(default)]
    pub phonon_propagator: PhononPropagator,
    #[serde(default = "defaults::include_hartree")]
    pub include_hartree: bool,
}

mod defaults {
    pub fn omega_max() -> f64 {
        20.0
    }
    pub fn n_omega() -> usize {
        4001
    }
    pub fn max_iter() -> usize {
        100
    }
    pub fn tol() -> f64 {
        1e-8
    }
    pub fn mixing() -> f64 {
        0.5
    }
    pub fn include_hartree() -> bool {
        true
    }
    pub fn eta() -> f64 {
        1e-6
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            omega_max: defaults::omega_max(),
            n_omega: defaults::n_omega(),
            max_iter: defaults::max_iter(),
            tol: defaults::tol(),
            mixing: defaults::mixing(),
            interaction_order: InteractionOrder::default(),
            phonon_propagator: PhononPropagator::default(),
            include_hartree: defaults::include_hartree(),
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.omega_max.is_finite() && self.omega_max > 0.0) {
            return Err(ModelError::invalid("solver.omega_max", "must be positive"));
        }
        if self.n_omega < 3 || self.n_omega.is_multiple_of(2) {
            return Err(ModelError::invalid(
                "solver.n_omega",
                format!(
                    "must be odd and at least 3 so that omega = 0 is a grid point, got {}",
                    self.n_omega
                ),
            ));
        }
        if self.max_iter == 0 {
            return Err(ModelError::invalid("solver.max_iter", "must be positive"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(ModelError::invalid("solver.tol", "must be positive"));
        }
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(ModelError::invalid(
                "solver.mixing",
                format!("must lie in (0, 1], got {}", self.mixing),
            ));
        }
        Ok(())
    }
}

/// How the bias drops across the molecule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BiasProfile {
    /// Levels are not shifted.
    #[default]
    None,
    /// Linear drop: level `i` (0-based) of `N` is shifted by `V·(1/2 − (i+1)/(N+1))`.
    SymmetricRamp,
    /// Shifts `V·s_i` for the given per-level fractions `s_i`.
    Explicit(Vec<f64>),
}

/// Bias block of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasSpec {
    pub voltage: f64,
    #[serde(default)]
    pub profile: BiasProfile,
}

/// Returns a copy of `spec` at bias `voltage`: `μ_a += V/2`, `μ_b −= V/2`, and
/// the diagonal of the level matrix shifted per `profile`.
///
/// For [`BiasProfile::Explicit`] the list entries are fractions of `V`, one per
/// level.
pub fn apply_bias(
    spec: &JunctionSpec,
    voltage: f64,
    profile: &BiasProfile,
) -> Result<JunctionSpec, ModelError> {
    let n = spec.n_levels;
    let shifts: Vec<f64> = match profile {
        BiasProfile::None => vec![0.0; n],
        BiasProfile::SymmetricRamp => (0..n)
            .map(|i| voltage * (0.5 - (i + 1) as f64 / (n + 1) as f64))
            .collect(),
        BiasProfile::Explicit(s) => {
            if s.len() != n {
                return Err(ModelError::dimension(
                    "bias.profile.explicit",
                    format!("{n} shifts"),
                    format!("{}", s.len()),
                ));
            }
            s.iter().map(|x| voltage * x).collect()
        }
    };
    let mut out = spec.clone();
    for (i, s) in shifts.iter().enumerate() {
        out.energy[(i, i)] += s;
    }
    out.lead_a.mu += 0.5 * voltage;
    out.lead_b.mu -= 0.5 * voltage;
    Ok(out)
}

fn check_symmetric(m: &RMatrix, path: &str) -> Result<(), ModelError> {
    let scale = 1.0 + m.amax();
    if (m - m.transpose()).amax() > SYMMETRY_TOL * scale {
        return Err(ModelError::invalid(path, "matrix is not symmetric"));
    }
    Ok(())
}

fn check_psd(m: &RMatrix, path: &str) -> Result<(), ModelError> {
    check_symmetric(m, path)?;
    if m.nrows() == 0 {
        return Ok(());
    }
    let min = SymmetricEigen::new(m.clone()).eigenvalues.min();
    if min < -SYMMETRY_TOL * (1.0 + m.amax()) {
        return Err(ModelError::invalid(
            path,
            format!("matrix is not positive semidefinite (eigenvalue {min:e})"),
        ));
    }
    Ok(())
}

fn check_shape(m: &RMatrix, rows: usize, cols: usize, path: &str) -> Result<(), ModelError> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(ModelError::dimension(
            path,
            format!("{rows}x{cols}"),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(())
}

fn check_finite(m: &RMatrix, path: &str) -> Result<(), ModelError> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(ModelError::invalid(path, "entries must be finite"))
    }
}

impl LeadSpec {
    fn validate(&self, n: usize, name: &str) -> Result<(), ModelError> {
        let gp = format!("{name}.gamma");
        check_shape(&self.gamma, n, n, &gp)?;
        check_finite(&self.gamma, &gp)?;
        check_psd(&self.gamma, &gp)?;
        if !self.mu.is_finite() {
            return Err(ModelError::invalid(format!("{name}.mu"), "must be finite"));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(ModelError::invalid(
                format!("{name}.temperature"),
                "must be non-negative",
            ));
        }
        Ok(())
    }
}

impl PhononSpec {
    fn validate(&self, n_levels: usize) -> Result<(), ModelError> {
        let np = self.omegas.len();
        if np == 0 {
            return Err(ModelError::invalid(
                "phonons.omegas",
                "at least one mode is required",
            ));
        }
        for (l, w) in self.omegas.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(ModelError::invalid(
                    format!("phonons.omegas[{l}]"),
                    "mode frequencies must be positive",
                ));
            }
        }
        check_shape(&self.coupling, np, n_levels, "phonons.coupling")?;
        check_finite(&self.coupling, "phonons.coupling")?;
        check_shape(&self.bath_gamma, np, np, "phonons.bath_gamma")?;
        check_finite(&self.bath_gamma, "phonons.bath_gamma")?;
        check_psd(&self.bath_gamma, "phonons.bath_gamma")?;
        if !(self.bath_temperature.is_finite() && self.bath_temperature >= 0.0) {
            return Err(ModelError::invalid(
                "phonons.bath_temperature",
                "must be non-negative",
            ));
        }
        Ok(())
    }
}

impl JunctionSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.n_levels;
        if n == 0 {
            return Err(ModelError::invalid("molecule.n_levels", "must be positive"));
        }
        check_shape(&self.energy, n, n, "molecule.energy")?;
        check_finite(&self.energy, "molecule.energy")?;
        check_symmetric(&self.energy, "molecule.energy")?;
        self.lead_a.validate(n, "lead_a")?;
        self.lead_b.validate(n, "lead_b")?;
        if let Some(ph) = &self.phonons {
            ph.validate(n)?;
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(ModelError::invalid("eta", "must be positive"));
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.phonons.as_ref().map_or(0, PhononSpec::n_modes)
    }

    /// True when there are phonons with at least one nonzero coupling.
    pub fn has_coupling(&self) -> bool {
        self.phonons
            .as_ref()
            .is_some_and(|p| p.coupling.iter().any(|&x| x != 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMolecule {
    n_levels: usize,
    energy: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLead {
    gamma: Vec<Vec<f64>>,
    mu: f64,
    #[serde(default)]
    temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhonons {
    omegas: Vec<f64>,
    coupling: Vec<Vec<f64>>,
    #[serde(default)]
    bath_gamma: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    bath_temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    molecule: RawMolecule,
    lead_a: RawLead,
    lead_b: RawLead,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phonons: Option<RawPhonons>,
    #[serde(default = "defaults::eta")]
    eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bias: Option<BiasSpec>,
    #[serde(default)]
    solver: SolverOptions,
}

fn to_matrix(rows: &[Vec<f64>], path: &str) -> Result<RMatrix, ModelError> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != nc) {
        return Err(ModelError::dimension(
            format!("{path}[{i}]"),
            format!("{nc} columns"),
            format!("{}", r.len()),
        ));
    }
    Ok(RMatrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

fn from_matrix(m: &RMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl RawLead {
    fn build(&self, path: &str) -> Result<LeadSpec, ModelError> {
        Ok(LeadSpec {
            gamma: to_matrix(&self.gamma, &format!("{path}.gamma"))?,
            mu: self.mu,
            temperature: self.temperature,
        })
    }

    fn from_spec(l: &LeadSpec) -> Self {
        Self {
            gamma: from_matrix(&l.gamma),
            mu: l.mu,
            temperature: l.temperature,
        }
    }
}

/// A parsed configuration: the unbiased junction, the solver options and the
/// optional bias block.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub spec: JunctionSpec,
    pub options: SolverOptions,
    pub bias: Option<BiasSpec>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ModelError::Parse {
                path: String::new(),
                message: e.to_string(),
            })?;
        Self::from_value(value)
    }

    /// Builds a configuration from an already parsed JSON value.
    pub fn from_value(value: serde_json::Value) -> Result<Self, ModelError> {
        let raw: RawConfig =
            serde_path_to_error::deserialize(value).map_err(|e| ModelError::Parse {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        let n = raw.molecule.n_levels;
        let phonons = match &raw.phonons {
            None => None,
            Some(p) => {
                let np = p.omegas.len();
                Some(PhononSpec {
                    omegas: p.omegas.clone(),
                    coupling: to_matrix(&p.coupling, "phonons.coupling")?,
                    bath_gamma: match &p.bath_gamma {
                        Some(b) => to_matrix(b, "phonons.bath_gamma")?,
                        None => RMatrix::zeros(np, np),
                    },
                    bath_temperature: p.bath_temperature,
                })
            }
        };
        let spec = JunctionSpec {
            n_levels: n,
            energy: to_matrix(&raw.molecule.energy, "molecule.energy")?,
            lead_a: raw.lead_a.build("lead_a")?,
            lead_b: raw.lead_b.build("lead_b")?,
            phonons,
            eta: raw.eta,
        };
        spec.validate()?;
        raw.solver.validate()?;
        if let Some(BiasSpec {
            voltage,
            profile: BiasProfile::Explicit(s),
        }) = &raw.bias
        {
            if !voltage.is_finite() {
                return Err(ModelError::invalid("bias.voltage", "must be finite"));
            }
            if s.len() != n {
                return Err(ModelError::dimension(
                    "bias.profile.explicit",
                    format!("{n} shifts"),
                    format!("{}", s.len()),
                ));
            }
        }
        Ok(Self {
            spec,
            options: raw.solver,
            bias: raw.bias,
        })
    }

    /// The junction with the configured bias applied (or unchanged if none).
    pub fn biased_spec(&self) -> Result<JunctionSpec, ModelError> {
        match &self.bias {
            Some(b) => apply_bias(&self.spec, b.voltage, &b.profile),
            None => Ok(self.spec.clone()),
        }
    }

    /// Bias profile from the configuration, `None` profile if absent.
    pub fn profile(&self) -> BiasProfile {
        self.bias
            .as_ref()
            .map(|b| b.profile.clone())
            .unwrap_or_default()
    }

    /// Serializes back to the configuration schema with all defaults filled in.
    pub fn to_json_value(&self) -> serde_json::Value {
        let s = &self.spec;
        let raw = RawConfig {
            molecule: RawMolecule {
                n_levels: s.n_levels,
                energy: from_matrix(&s.energy),
            },
            lead_a: RawLead::from_spec(&s.lead_a),
            lead_b: RawLead::from_spec(&s.lead_b),
            phonons: s.phonons.as_ref().map(|p| RawPhonons {
                omegas: p.omegas.clone(),
                coupling: from_matrix(&p.coupling),
                bath_gamma: Some(from_matrix(&p.bath_gamma)),
                bath_temperature: p.bath_temperature,
            }),
            eta: s.eta,
            bias: self.bias.clone(),
            solver: self.options.clone(),
        };
        serde_json::to_value(raw).expect("configuration is always serializable")
    }
}

/// Parses a configuration document and returns the (biased) junction and the
/// solver options.
pub fn parse_config(text: &str) -> Result<(JunctionSpec, SolverOptions), ModelError> {
    let cfg = Config::from_json(text)?;
    Ok((cfg.biased_spec()?, cfg.options))
}
