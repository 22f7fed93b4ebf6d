//! Currents, occupations, spectral function and the Landauer oracle.
//!
//! Currents are in units of `e·(energy)/ħ` and include the spin factor 2.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{GridError, SolverError};
use crate::green::{FieldKind, KeldyshGF};
use crate::grid::{fermi_occupation, integrate, FrequencyGrid, GridFunction};
use crate::model::{JunctionSpec, LeadSpec};
use crate::selfenergy::{lead_sigma, LeadSelection, SelfEnergySet};
use crate::{CMatrix, RMatrix, C64};

const IMAG_TOL: f64 = 1e-8;
const OCCUPATION_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurrentResult {
    /// Current flowing from lead a into the molecule.
    pub current_a: f64,
    /// Current flowing from lead b into the molecule.
    pub current_b: f64,
    /// `(current_a − current_b)/2`.
    pub net: f64,
    /// `current_a + current_b`; zero for an exact steady state.
    pub conservation_residual: f64,
}

/// Current through the contact described by `lead_se` (a single lead):
/// `2 ∫dω/2π Tr[σ_lr G_rl − σ_rl G_lr]`, trapezoid rule.
///
/// Fails if the integral has an imaginary part that is not negligible next to
/// the size of the integrand, which signals an inconsistent `g`.
pub fn lead_current(
    g: &KeldyshGF,
    lead_se: &SelfEnergySet,
    grid: &FrequencyGrid,
) -> Result<f64, SolverError> {
    let (total, scale) = lead_current_parts(g, lead_se, grid)?;
    if total.im.abs() > IMAG_TOL * (total.re.abs() + scale).max(f64::MIN_POSITIVE) {
        return Err(SolverError::ImaginaryCurrent {
            real: total.re,
            imag: total.im,
        });
    }
    Ok(total.re)
}

/// Complex current integral and the integral of the magnitudes of its two
/// terms, both with the `2/2π` prefactor.
fn lead_current_parts(
    g: &KeldyshGF,
    lead_se: &SelfEnergySet,
    grid: &FrequencyGrid,
) -> Result<(C64, f64), SolverError> {
    if g.grid() != grid || lead_se.grid() != grid {
        return Err(GridError::GridMismatch.into());
    }
    if g.dim() != lead_se.dim() {
        return Err(
            GridError::DimensionMismatch(format!("{} vs {}", g.dim(), lead_se.dim())).into(),
        );
    }
    let s = &lead_se.keldysh;
    let mut total = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    for k in 0..grid.len() {
        let inflow = (s.lr.at(k) * g.rl.at(k)).trace();
        let outflow = (s.rl.at(k) * g.lr.at(k)).trace();
        total += (inflow - outflow) * grid.weight(k);
        // the two terms cancel pointwise in equilibrium, so size the check by each
        scale += (inflow.norm() + outflow.norm()) * grid.weight(k);
    }
    let factor = 2.0 / (2.0 * PI);
    Ok((total * factor, scale * factor))
}

fn assemble_currents(a: f64, b: f64) -> CurrentResult {
    CurrentResult {
        current_a: a,
        current_b: b,
        net: 0.5 * (a - b),
        conservation_residual: a + b,
    }
}

/// Both contact currents of a solved junction.
pub fn currents(spec: &JunctionSpec, g: &KeldyshGF) -> Result<CurrentResult, SolverError> {
    let grid = *g.grid();
    let a = lead_current(g, &lead_sigma(spec, grid, LeadSelection::A), &grid)?;
    let b = lead_current(g, &lead_sigma(spec, grid, LeadSelection::B), &grid)?;
    Ok(assemble_currents(a, b))
}

/// Like [`currents`] but keeps the real parts without checking the imaginary
/// ones. Meant for reporting iterates that did not converge.
pub fn currents_real_part(
    spec: &JunctionSpec,
    g: &KeldyshGF,
) -> Result<CurrentResult, SolverError> {
    let grid = *g.grid();
    let (a, _) = lead_current_parts(g, &lead_sigma(spec, grid, LeadSelection::A), &grid)?;
    let (b, _) = lead_current_parts(g, &lead_sigma(spec, grid, LeadSelection::B), &grid)?;
    Ok(assemble_currents(a.re, b.re))
}

/// `n_i = −i ∫dω/2π G_lr^{ii}(ω)` without range checks.
pub fn raw_occupation(g: &KeldyshGF) -> Result<Vec<f64>, SolverError> {
    if g.kind != FieldKind::Electron {
        return Err(SolverError::NotElectron);
    }
    let total = integrate(&g.lr) * C64::new(0.0, -1.0 / (2.0 * PI));
    Ok((0..g.dim()).map(|i| total[(i, i)].re).collect())
}

/// Level occupations. Values within `1e−6` outside `[0, 1]` are clamped; larger
/// excursions are reported as errors.
pub fn occupation(g: &KeldyshGF, grid: &FrequencyGrid) -> Result<Vec<f64>, SolverError> {
    if g.grid() != grid {
        return Err(GridError::GridMismatch.into());
    }
    raw_occupation(g)?
        .into_iter()
        .enumerate()
        .map(|(level, n)| {
            if !(-OCCUPATION_SLACK..=1.0 + OCCUPATION_SLACK).contains(&n) {
                Err(SolverError::OccupationOutOfRange { level, value: n })
            } else {
                Ok(n.clamp(0.0, 1.0))
            }
        })
        .collect()
}

/// `A(ω) = i(G_r − G_a) = i(G_rl − G_lr)`.
pub fn spectral(g: &KeldyshGF) -> GridFunction {
    (&g.rl - &g.lr).scale(C64::new(0.0, 1.0))
}

/// `T(ω) = Re Tr[Γ_a G_r Γ_b G_a]` as a scalar grid function. Meaningful for
/// elastic (non-interacting) transport.
pub fn transmission(g: &KeldyshGF, gamma_a: &RMatrix, gamma_b: &RMatrix) -> GridFunction {
    let ga: CMatrix = gamma_a.map(C64::from);
    let gb: CMatrix = gamma_b.map(C64::from);
    let r = g.retarded();
    let values = r
        .values()
        .iter()
        .map(|gr| {
            let t = (&ga * gr * &gb * gr.adjoint()).trace();
            CMatrix::from_element(1, 1, C64::from(t.re))
        })
        .collect();
    GridFunction::new(*g.grid(), 1, values).expect("one value per grid point")
}

/// `2 ∫dω/2π T(ω)[f_a(ω) − f_b(ω)]`, trapezoid rule.
pub fn landauer_current(
    t: &GridFunction,
    lead_a: &LeadSpec,
    lead_b: &LeadSpec,
    grid: &FrequencyGrid,
) -> Result<f64, GridError> {
    if t.grid() != grid {
        return Err(GridError::GridMismatch);
    }
    if t.dim() != 1 {
        return Err(GridError::DimensionMismatch(format!(
            "transmission must be scalar, got {0}x{0}",
            t.dim()
        )));
    }
    let sum: f64 = (0..grid.len())
        .map(|k| {
            let w = grid.point(k);
            let df = fermi_occupation(w, lead_a.mu, lead_a.temperature)
                - fermi_occupation(w, lead_b.mu, lead_b.temperature);
            grid.weight(k) * t.scalar(k).re * df
        })
        .sum();
    Ok(2.0 * sum / (2.0 * PI))
}
