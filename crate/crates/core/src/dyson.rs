//! Dyson equations (two independent routes) and the self-consistent Born loop.

use rayon::prelude::*;

use crate::error::{GridError, SolverError};
use crate::green::{electron_g0, phonon_d0, FieldKind, KeldyshGF};
use crate::grid::{FrequencyGrid, GridFunction};
use crate::model::{InteractionOrder, JunctionSpec, PhononPropagator, SolverOptions};
use crate::observables::raw_occupation;
use crate::selfenergy::{
    assemble_electron_sigma, assemble_phonon_pi, bath_gamma_sigma, ep_sigma_electron,
    ep_sigma_phonon, lead_sigma, LeadSelection, SelfEnergySet,
};
use crate::{CMatrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct ScbaResult {
    pub g: KeldyshGF,
    pub d: Option<KeldyshGF>,
    /// Total electron self-energy used for the final `g`.
    pub sigma: SelfEnergySet,
    /// Total phonon self-energy used for the final `d`.
    pub pi: Option<SelfEnergySet>,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

impl ScbaResult {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }
}

/// Free retarded inverse `g_r⁻¹(ω)` and the overall sign `s` with which the
/// solved propagator is returned.
struct FreeProblem {
    dim: usize,
    kind: FieldKind,
    sign: f64,
    inverse: Box<dyn Fn(f64) -> CMatrix + Sync>,
}

impl FreeProblem {
    fn electron(spec: &JunctionSpec) -> Self {
        let n = spec.n_levels;
        let e = spec.energy.map(C64::from);
        let eta = spec.eta;
        Self {
            dim: n,
            kind: FieldKind::Electron,
            sign: 1.0,
            inverse: Box::new(move |w| CMatrix::identity(n, n) * C64::new(w, eta) - &e),
        }
    }

    /// The phonon Dyson equation is solved for `D̃ = s·D` with a standard
    /// resolvent: `(ω+iη) − Ω` and `s = −1` for `Paper`,
    /// `((ω+iη)² − Ω²)/2Ω` and `s = +1` for the symmetrized one.
    fn phonon(spec: &JunctionSpec, variant: PhononPropagator) -> Result<Self, SolverError> {
        let ph = spec.phonons.as_ref().ok_or(SolverError::NoPhonons)?;
        let omegas = ph.omegas.clone();
        let np = omegas.len();
        let eta = spec.eta;
        let (sign, inverse): (f64, Box<dyn Fn(f64) -> CMatrix + Sync>) = match variant {
            PhononPropagator::Paper => (
                -1.0,
                Box::new(move |w| {
                    CMatrix::from_fn(np, np, |i, j| {
                        if i == j {
                            C64::new(w - omegas[i], eta)
                        } else {
                            C64::from(0.0)
                        }
                    })
                }),
            ),
            PhononPropagator::Symmetrized => (
                1.0,
                Box::new(move |w| {
                    let z = C64::new(w, eta);
                    CMatrix::from_fn(np, np, |i, j| {
                        if i == j {
                            (z * z - omegas[i] * omegas[i]) / (2.0 * omegas[i])
                        } else {
                            C64::from(0.0)
                        }
                    })
                }),
            ),
        };
        Ok(Self {
            dim: np,
            kind: FieldKind::Phonon,
            sign,
            inverse,
        })
    }
}

fn check_sigma(
    problem: &FreeProblem,
    sigma: &SelfEnergySet,
    grid: &FrequencyGrid,
) -> Result<(), SolverError> {
    if sigma.grid() != grid {
        return Err(GridError::GridMismatch.into());
    }
    if sigma.dim() != problem.dim {
        return Err(GridError::DimensionMismatch(format!(
            "self-energy is {0}x{0}, propagator is {1}x{1}",
            sigma.dim(),
            problem.dim
        ))
        .into());
    }
    Ok(())
}

fn collect(grid: FrequencyGrid, problem: &FreeProblem, blocks: Vec<[CMatrix; 4]>) -> KeldyshGF {
    let s = C64::from(problem.sign);
    let mut comps: [Vec<CMatrix>; 4] = Default::default();
    for block in blocks {
        for (c, m) in comps.iter_mut().zip(block) {
            c.push(m * s);
        }
    }
    let [ll, lr, rl, rr] = comps.map(|v| {
        GridFunction::new(grid, problem.dim, v).expect("solver produces one block per grid point")
    });
    KeldyshGF {
        ll,
        lr,
        rl,
        rr,
        kind: problem.kind,
    }
}

fn rak_route(
    problem: &FreeProblem,
    sigma: &SelfEnergySet,
    grid: FrequencyGrid,
) -> Result<KeldyshGF, SolverError> {
    check_sigma(problem, sigma, &grid)?;
    let blocks = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let w = grid.point(k);
            let gr = ((problem.inverse)(w) - sigma.retarded_at(k))
                .try_inverse()
                .ok_or(SolverError::Singular { omega: w })?;
            let ga = gr.adjoint();
            let lesser = &gr * sigma.keldysh.lr.at(k) * &ga;
            let ll = &gr + &lesser;
            let rl = &ll - &ga;
            let rr = &lesser + &rl - &ll;
            Ok([ll, lesser, rl, rr])
        })
        .collect::<Result<Vec<_>, SolverError>>()?;
    Ok(collect(grid, problem, blocks))
}

fn block_sigma(sigma: &SelfEnergySet, k: usize, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(2 * d, 2 * d);
    let h = &sigma.hartree;
    let kk = &sigma.keldysh;
    out.view_mut((0, 0), (d, d)).copy_from(&(kk.ll.at(k) + h));
    out.view_mut((0, d), (d, d)).copy_from(&(-kk.lr.at(k)));
    out.view_mut((d, 0), (d, d)).copy_from(&(-kk.rl.at(k)));
    out.view_mut((d, d), (d, d)).copy_from(&(kk.rr.at(k) - h));
    out
}

/// Free block `[[g_r, 0], [g_r − g_a, −g_a]]`, i.e. the four components of a
/// free propagator with empty occupation.
fn block_free(problem: &FreeProblem, w: f64) -> Result<CMatrix, SolverError> {
    let d = problem.dim;
    let gr = (problem.inverse)(w)
        .try_inverse()
        .ok_or(SolverError::Singular { omega: w })?;
    let ga = gr.adjoint();
    let mut out = CMatrix::zeros(2 * d, 2 * d);
    out.view_mut((0, 0), (d, d)).copy_from(&gr);
    out.view_mut((d, 0), (d, d)).copy_from(&(&gr - &ga));
    out.view_mut((d, d), (d, d)).copy_from(&(-ga));
    Ok(out)
}

fn split(m: &CMatrix, d: usize) -> [CMatrix; 4] {
    [
        m.view((0, 0), (d, d)).into_owned(),
        m.view((0, d), (d, d)).into_owned(),
        m.view((d, 0), (d, d)).into_owned(),
        m.view((d, d), (d, d)).into_owned(),
    ]
}

fn coupled_route(
    problem: &FreeProblem,
    sigma: &SelfEnergySet,
    grid: FrequencyGrid,
) -> Result<KeldyshGF, SolverError> {
    check_sigma(problem, sigma, &grid)?;
    let d = problem.dim;
    let blocks = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let w = grid.point(k);
            let g0 = block_free(problem, w)?;
            let lhs = CMatrix::identity(2 * d, 2 * d) - &g0 * block_sigma(sigma, k, d);
            let g = lhs
                .lu()
                .solve(&g0)
                .ok_or(SolverError::Singular { omega: w })?;
            Ok(split(&g, d))
        })
        .collect::<Result<Vec<_>, SolverError>>()?;
    Ok(collect(grid, problem, blocks))
}

/// Electron Dyson equation in rotated form: `G_r = [ω + iη − E − Σ_r]⁻¹`,
/// `G_a = G_r†`, `G^< = G_r Σ^< G_a`, the rest from the Keldysh identity.
pub fn solve_rak(
    spec: &JunctionSpec,
    sigma: &SelfEnergySet,
    grid: FrequencyGrid,
) -> Result<KeldyshGF, SolverError> {
    rak_route(&FreeProblem::electron(spec), sigma, grid)
}

/// Electron Dyson equation as one `2N × 2N` linear system per frequency,
/// `(I − Ḡ⁰Σ̄)Ḡ = Ḡ⁰`, with the block self-energy carrying the `κ_α κ_β` signs.
pub fn solve_coupled(
    spec: &JunctionSpec,
    sigma: &SelfEnergySet,
    grid: FrequencyGrid,
) -> Result<KeldyshGF, SolverError> {
    coupled_route(&FreeProblem::electron(spec), sigma, grid)
}

/// Phonon counterpart of [`solve_rak`].
pub fn solve_rak_phonon(
    spec: &JunctionSpec,
    pi: &SelfEnergySet,
    grid: FrequencyGrid,
    variant: PhononPropagator,
) -> Result<KeldyshGF, SolverError> {
    rak_route(&FreeProblem::phonon(spec, variant)?, pi, grid)
}

/// Phonon counterpart of [`solve_coupled`].
pub fn solve_coupled_phonon(
    spec: &JunctionSpec,
    pi: &SelfEnergySet,
    grid: FrequencyGrid,
    variant: PhononPropagator,
) -> Result<KeldyshGF, SolverError> {
    coupled_route(&FreeProblem::phonon(spec, variant)?, pi, grid)
}

/// Residual of the electron Dyson equation in rotated form,
/// `max_ω max(‖(g_r⁻¹ − Σ_r)G_r − I‖, ‖G^< − G_r Σ^< G_a‖)`.
///
/// The block form `Ḡ − Ḡ⁰ − Ḡ⁰Σ̄Ḡ` is not used here: it multiplies errors by
/// `|g_r| ~ 1/η` near the bare levels and mixes in the part of `Σ` that violates
/// `ll + rr = lr + rl` on a finite grid, which the rotated solution never sees.
pub fn dyson_residual(
    spec: &JunctionSpec,
    sigma: &SelfEnergySet,
    g: &KeldyshGF,
) -> Result<f64, SolverError> {
    let problem = FreeProblem::electron(spec);
    let grid = *g.grid();
    check_sigma(&problem, sigma, &grid)?;
    let d = problem.dim;
    let max_abs = |m: CMatrix| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let worst = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let gr = g.ll.at(k) - g.lr.at(k);
            let ga = g.ll.at(k) - g.rl.at(k);
            let lhs = ((problem.inverse)(grid.point(k)) - sigma.retarded_at(k)) * &gr;
            let r1 = max_abs(lhs - CMatrix::identity(d, d));
            let r2 = max_abs(g.lr.at(k) - &gr * sigma.keldysh.lr.at(k) * &ga);
            r1.max(r2)
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// Largest imaginary part among the eigenvalues of `E + Σ_r(ω)` over the grid.
/// Negative values mean every pole of `G_r` lies in the lower half-plane.
pub fn max_pole_imag(spec: &JunctionSpec, sigma: &SelfEnergySet) -> f64 {
    let e = spec.energy.map(C64::from);
    (0..sigma.grid().len())
        .into_par_iter()
        .map(|k| {
            let m = &e + sigma.retarded_at(k);
            let (_, t) = m.schur().unpack();
            t.diagonal()
                .iter()
                .map(|z| z.im)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Lead and bath self-energies, which do not change during the iteration.
struct Fixed {
    grid: FrequencyGrid,
    lead: SelfEnergySet,
    bath: Option<SelfEnergySet>,
}

impl Fixed {
    fn new(spec: &JunctionSpec, options: &SolverOptions) -> Result<Self, SolverError> {
        let grid = FrequencyGrid::new(options.omega_max, options.n_omega)?;
        let lead = lead_sigma(spec, grid, LeadSelection::Both);
        let bath = match spec.phonons {
            Some(_) => Some(bath_gamma_sigma(spec, grid, options.phonon_propagator)?),
            None => None,
        };
        Ok(Self { grid, lead, bath })
    }
}

struct Step {
    g: KeldyshGF,
    d: Option<KeldyshGF>,
    sigma: SelfEnergySet,
    pi: Option<SelfEnergySet>,
}

/// Builds the interaction self-energies from `(g, d)` and solves both Dyson
/// equations once.
fn dyson_step(
    spec: &JunctionSpec,
    options: &SolverOptions,
    fixed: &Fixed,
    g: &KeldyshGF,
    d: Option<&KeldyshGF>,
    occupations: &[f64],
) -> Result<Step, SolverError> {
    let variant = options.phonon_propagator;
    let (sigma, pi) = match (d, &fixed.bath) {
        (Some(d), Some(bath)) => {
            let xi = ep_sigma_electron(g, d, spec, occupations, options.include_hartree)?;
            let lambda = ep_sigma_phonon(g, spec)?;
            (
                assemble_electron_sigma(&fixed.lead, &xi)?,
                Some(assemble_phonon_pi(bath, &lambda)?),
            )
        }
        _ => (fixed.lead.clone(), None),
    };
    let g_new = solve_rak(spec, &sigma, fixed.grid)?;
    let d_new = match &pi {
        Some(pi) => Some(solve_rak_phonon(spec, pi, fixed.grid, variant)?),
        None => None,
    };
    Ok(Step {
        g: g_new,
        d: d_new,
        sigma,
        pi,
    })
}

fn noninteracting(
    spec: &JunctionSpec,
    options: &SolverOptions,
    fixed: &Fixed,
) -> Result<Step, SolverError> {
    let g = solve_rak(spec, &fixed.lead, fixed.grid)?;
    let d = match &fixed.bath {
        Some(bath) => Some(solve_rak_phonon(
            spec,
            bath,
            fixed.grid,
            options.phonon_propagator,
        )?),
        None => None,
    };
    Ok(Step {
        g,
        d,
        sigma: fixed.lead.clone(),
        pi: fixed.bath.clone(),
    })
}

fn finished(step: Step, iterations: usize, history: Vec<f64>, converged: bool) -> ScbaResult {
    ScbaResult {
        g: step.g,
        d: step.d,
        sigma: step.sigma,
        pi: step.pi,
        iterations,
        residual_history: history,
        converged,
    }
}

/// Runs the solver at the order requested in `options`.
///
/// `none` and `born` are single Dyson solves and report zero iterations.
/// `scba` starts from the `none` solution and iterates with linear mixing until
/// the sup-norm change of `G` and `D` drops to `options.tol`.
pub fn scba_loop(spec: &JunctionSpec, options: &SolverOptions) -> Result<ScbaResult, SolverError> {
    scba_loop_from(spec, options, None)
}

/// Like [`scba_loop`], but a self-consistent run starts from the propagators of
/// `initial` (when they live on the same grid) instead of the `none` solution.
pub fn scba_loop_from(
    spec: &JunctionSpec,
    options: &SolverOptions,
    initial: Option<&ScbaResult>,
) -> Result<ScbaResult, SolverError> {
    spec.validate()?;
    options.validate()?;
    let fixed = Fixed::new(spec, options)?;

    match options.interaction_order {
        InteractionOrder::None => {
            let step = noninteracting(spec, options, &fixed)?;
            Ok(finished(step, 0, Vec::new(), true))
        }
        InteractionOrder::Born => {
            let bare = noninteracting(spec, options, &fixed)?;
            if spec.phonons.is_none() {
                return Ok(finished(bare, 0, Vec::new(), true));
            }
            let occ = raw_occupation(&bare.g)?;
            let g0 = electron_g0(spec, fixed.grid)?;
            let d0 = phonon_d0(spec, fixed.grid, options.phonon_propagator)?;
            let step = dyson_step(spec, options, &fixed, &g0, Some(&d0), &occ)?;
            if !(step.g.is_finite() && step.d.as_ref().is_none_or(KeldyshGF::is_finite)) {
                return Err(SolverError::NonFinite { iteration: 0 });
            }
            Ok(finished(step, 0, Vec::new(), true))
        }
        InteractionOrder::Scba => {
            let start = match initial {
                Some(r)
                    if r.g.grid() == &fixed.grid
                        && r.g.dim() == spec.n_levels
                        && r.d.as_ref().map(KeldyshGF::dim)
                            == spec.phonons.as_ref().map(|p| p.n_modes()) =>
                {
                    (r.g.clone(), r.d.clone())
                }
                _ => {
                    let s = noninteracting(spec, options, &fixed)?;
                    (s.g, s.d)
                }
            };
            iterate(spec, options, &fixed, start)
        }
    }
}

fn iterate(
    spec: &JunctionSpec,
    options: &SolverOptions,
    fixed: &Fixed,
    start: (KeldyshGF, Option<KeldyshGF>),
) -> Result<ScbaResult, SolverError> {
    let (mut g, mut d) = start;
    let mut history = Vec::new();
    let mut last = None;
    for it in 1..=options.max_iter {
        let occ = raw_occupation(&g)?;
        let step = dyson_step(spec, options, fixed, &g, d.as_ref(), &occ)?;
        let finite = step.g.is_finite() && step.d.as_ref().is_none_or(KeldyshGF::is_finite);
        if !finite {
            return Err(SolverError::NonFinite { iteration: it });
        }
        let mut residual = step.g.max_norm_diff(&g);
        if let (Some(new), Some(old)) = (&step.d, &d) {
            residual = residual.max(new.max_norm_diff(old));
        }
        if !residual.is_finite() {
            return Err(SolverError::NonFinite { iteration: it });
        }
        history.push(residual);
        if residual <= options.tol {
            return Ok(finished(step, it, history, true));
        }
        g = g.mix(&step.g, options.mixing);
        d = match (&d, &step.d) {
            (Some(old), Some(new)) => Some(old.mix(new, options.mixing)),
            _ => None,
        };
        last = Some(step);
    }
    let step = last.expect("max_iter is at least one");
    Ok(finished(step, options.max_iter, history, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::keldysh_residual;
    use crate::grid::fermi_occupation;
    use crate::model::{LeadSpec, PhononSpec};
    use crate::RMatrix;

    fn resonant(eps: f64, gamma: f64, mu: f64, eta: f64) -> JunctionSpec {
        let lead = LeadSpec {
            gamma: RMatrix::from_element(1, 1, gamma / 2.0),
            mu,
            temperature: 0.0,
        };
        JunctionSpec {
            n_levels: 1,
            energy: RMatrix::from_element(1, 1, eps),
            lead_a: lead.clone(),
            lead_b: lead,
            phonons: None,
            eta,
        }
    }

    #[test]
    fn empty_self_energy_reproduces_free_resolvent() {
        let grid = FrequencyGrid::new(4.0, 81).unwrap();
        let spec = resonant(0.3, 1.0, 0.0, 0.05);
        let zero = SelfEnergySet::zeros(grid, 1, FieldKind::Electron);
        let g = solve_rak(&spec, &zero, grid).unwrap();
        let g0 = electron_g0(&spec, grid).unwrap();
        assert!(g.ll.max_norm_diff(&g0.ll) < 1e-14);
        assert_eq!(g.lr.max_norm(), 0.0);
        let c = solve_coupled(&spec, &zero, grid).unwrap();
        assert!(c.max_norm_diff(&g) < 1e-14);
    }

    #[test]
    fn resonant_level_closed_forms() {
        let grid = FrequencyGrid::new(10.0, 201).unwrap();
        let (gamma, mu) = (1.0, 0.2);
        let spec = resonant(0.0, gamma, mu, 1e-12);
        let sigma = lead_sigma(&spec, grid, LeadSelection::Both);
        let g = solve_rak(&spec, &sigma, grid).unwrap();
        for k in 0..grid.len() {
            let w = grid.point(k);
            let gr = g.ll.scalar(k) - g.lr.scalar(k);
            assert!((gr - 1.0 / C64::new(w, gamma / 2.0)).norm() < 1e-10);
            let lorentz = gamma / (w * w + gamma * gamma / 4.0);
            let expect = C64::new(0.0, fermi_occupation(w, mu, 0.0) * lorentz);
            assert!((g.lr.scalar(k) - expect).norm() < 1e-10);
        }
        assert!(keldysh_residual(&g) < 1e-12);
    }

    #[test]
    fn routes_agree_for_phonons() {
        let grid = FrequencyGrid::new(5.0, 201).unwrap();
        let mut spec = resonant(0.0, 1.0, 0.0, 0.01);
        spec.phonons = Some(PhononSpec {
            omegas: vec![1.0, 1.7],
            coupling: RMatrix::from_row_slice(2, 1, &[0.2, 0.1]),
            bath_gamma: RMatrix::from_row_slice(2, 2, &[0.2, 0.05, 0.05, 0.1]),
            bath_temperature: 0.3,
        });
        for v in [PhononPropagator::Paper, PhononPropagator::Symmetrized] {
            let pi = bath_gamma_sigma(&spec, grid, v).unwrap();
            let a = solve_rak_phonon(&spec, &pi, grid, v).unwrap();
            let b = solve_coupled_phonon(&spec, &pi, grid, v).unwrap();
            assert!(a.max_norm_diff(&b) < 1e-10, "{v:?}");
        }
    }

    #[test]
    fn zero_bath_symmetrized_phonon_matches_free() {
        let grid = FrequencyGrid::new(5.0, 201).unwrap();
        let mut spec = resonant(0.0, 1.0, 0.0, 0.05);
        spec.phonons = Some(PhononSpec {
            omegas: vec![1.0],
            coupling: RMatrix::from_element(1, 1, 0.2),
            bath_gamma: RMatrix::zeros(1, 1),
            bath_temperature: 0.0,
        });
        let v = PhononPropagator::Symmetrized;
        let pi = bath_gamma_sigma(&spec, grid, v).unwrap();
        let d = solve_rak_phonon(&spec, &pi, grid, v).unwrap();
        let d0 = phonon_d0(&spec, grid, v).unwrap();
        assert!(d.retarded().max_norm_diff(&d0.retarded()) < 1e-12);
        let v = PhononPropagator::Paper;
        let d =
            solve_rak_phonon(&spec, &bath_gamma_sigma(&spec, grid, v).unwrap(), grid, v).unwrap();
        let d0 = phonon_d0(&spec, grid, v).unwrap();
        assert!(d.ll.max_norm_diff(&d0.ll) < 1e-12);
    }

    #[test]
    fn dyson_residual_vanishes_for_solution() {
        let grid = FrequencyGrid::new(5.0, 101).unwrap();
        let spec = resonant(0.2, 1.0, 0.1, 0.01);
        let sigma = lead_sigma(&spec, grid, LeadSelection::Both);
        let g = solve_rak(&spec, &sigma, grid).unwrap();
        assert!(dyson_residual(&spec, &sigma, &g).unwrap() < 1e-12);
    }

    #[test]
    fn poles_are_in_lower_half_plane() {
        let grid = FrequencyGrid::new(5.0, 101).unwrap();
        let spec = resonant(0.2, 1.0, 0.1, 0.01);
        let sigma = lead_sigma(&spec, grid, LeadSelection::Both);
        assert!((max_pole_imag(&spec, &sigma) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn orders_without_iterations() {
        let spec = resonant(0.0, 1.0, 0.0, 0.01);
        for order in [InteractionOrder::None, InteractionOrder::Born] {
            let opts = SolverOptions {
                omega_max: 5.0,
                n_omega: 101,
                interaction_order: order,
                ..SolverOptions::default()
            };
            let r = scba_loop(&spec, &opts).unwrap();
            assert_eq!(r.iterations, 0);
            assert!(r.residual_history.is_empty());
            assert!(r.converged);
            assert!(r.d.is_none());
        }
    }

    #[test]
    fn uncoupled_scba_stops_after_one_iteration() {
        let mut spec = resonant(0.0, 1.0, 0.0, 0.01);
        let opts = SolverOptions {
            omega_max: 5.0,
            n_omega: 101,
            ..SolverOptions::default()
        };
        let r = scba_loop(&spec, &opts).unwrap();
        assert_eq!(
            (r.iterations, r.residual_history.clone(), r.converged),
            (1, vec![0.0], true)
        );
        spec.phonons = Some(PhononSpec {
            omegas: vec![1.0],
            coupling: RMatrix::zeros(1, 1),
            bath_gamma: RMatrix::from_element(1, 1, 0.1),
            bath_temperature: 0.1,
        });
        let r = scba_loop(&spec, &opts).unwrap();
        assert_eq!(
            (r.iterations, r.residual_history.clone(), r.converged),
            (1, vec![0.0], true)
        );
        assert!(r.d.is_some());
    }

    #[test]
    fn invalid_options_rejected() {
        let spec = resonant(0.0, 1.0, 0.0, 0.01);
        let opts = SolverOptions {
            mixing: 0.0,
            ..SolverOptions::default()
        };
        match scba_loop(&spec, &opts) {
            Err(SolverError::Model(e)) => assert_eq!(e.path(), "solver.mixing"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
