mod common;

use std::f64::consts::PI;

use common::*;
use negf::observables::{
    currents, landauer_current, lead_current, occupation, spectral, transmission,
};
use negf::selfenergy::lead_sigma;
use negf::{
    apply_bias, scba_loop, solve_rak, BiasProfile, FrequencyGrid, InteractionOrder, JunctionSpec,
    KeldyshGF, LeadSelection, PhononPropagator, RMatrix, SolverOptions,
};

fn bare(spec: &JunctionSpec, grid: FrequencyGrid) -> KeldyshGF {
    solve_rak(spec, &lead_sigma(spec, grid, LeadSelection::Both), grid).unwrap()
}

/// Zero-temperature current through a single level at `ε₀ = 0`, spin included.
fn arctan_current(ga: f64, gb: f64, mu_a: f64, mu_b: f64) -> f64 {
    let g = ga + gb;
    ga * gb * (2.0 / g) * ((2.0 * mu_a / g).atan() - (2.0 * mu_b / g).atan()) / PI
}

#[test]
fn resonant_level_current_matches_landauer_and_closed_form() {
    let grid = FrequencyGrid::new(20.0, 8001).unwrap();
    for v in [0.2, 1.0, 5.0] {
        let spec = resonant(0.0, 0.5, 0.5, 0.5 * v, -0.5 * v, 1e-10);
        let g = bare(&spec, grid);
        let i_a = lead_current(&g, &lead_sigma(&spec, grid, LeadSelection::A), &grid).unwrap();
        let t = transmission(&g, &spec.lead_a.gamma, &spec.lead_b.gamma);
        let land = landauer_current(&t, &spec.lead_a, &spec.lead_b, &grid).unwrap();
        let exact = arctan_current(0.5, 0.5, 0.5 * v, -0.5 * v);
        assert!(
            (i_a - land).abs() < 1e-6 * land.abs(),
            "V={v}: {i_a} vs {land}"
        );
        assert!(
            (i_a - exact).abs() < 1e-3 * exact.abs(),
            "V={v}: {i_a} vs {exact}"
        );
    }
}

#[test]
fn asymmetric_coupling_closed_form() {
    let grid = FrequencyGrid::new(20.0, 8001).unwrap();
    let spec = resonant(0.0, 0.8, 0.2, 0.6, -0.4, 1e-10);
    let r = currents(&spec, &bare(&spec, grid)).unwrap();
    let exact = arctan_current(0.8, 0.2, 0.6, -0.4);
    assert!((r.current_a - exact).abs() < 1e-3 * exact);
}

#[test]
fn noninteracting_current_is_conserved_and_odd_in_bias() {
    let grid = FrequencyGrid::new(20.0, 4001).unwrap();
    // η is a particle leak of order η∫Tr[G_r G_a], so keep it far below the check
    let mut base = resonant(0.0, 0.0, 0.0, 0.0, 0.0, 1e-11);
    base.n_levels = 2;
    base.energy = RMatrix::from_row_slice(2, 2, &[-0.3, 0.1, 0.1, 0.4]);
    base.lead_a.gamma = RMatrix::from_row_slice(2, 2, &[0.6, 0.1, 0.1, 0.3]);
    base.lead_b.gamma = RMatrix::from_row_slice(2, 2, &[0.3, 0.1, 0.1, 0.6]);
    base.lead_a.temperature = 0.05;
    base.lead_b.temperature = 0.05;
    let mirror = {
        let mut m = base.clone();
        std::mem::swap(&mut m.lead_a, &mut m.lead_b);
        m
    };
    for v in [0.3, 1.2] {
        let fwd_spec = apply_bias(&base, v, &BiasProfile::None).unwrap();
        let fwd = currents(&fwd_spec, &bare(&fwd_spec, grid)).unwrap();
        assert!(
            fwd.conservation_residual.abs() < 1e-8,
            "{}",
            fwd.conservation_residual
        );
        // reversing the bias is the same as exchanging the leads
        let back_spec = apply_bias(&mirror, -v, &BiasProfile::None).unwrap();
        let back = currents(&back_spec, &bare(&back_spec, grid)).unwrap();
        assert!((fwd.current_a - back.current_b).abs() < 1e-12);
        let zero_spec = apply_bias(&base, 0.0, &BiasProfile::None).unwrap();
        let zero = currents(&zero_spec, &bare(&zero_spec, grid)).unwrap();
        assert!(zero.current_a.abs() < 1e-9);
    }
}

#[test]
fn spectral_sum_rule_and_positivity() {
    let grid = FrequencyGrid::new(1000.0, 40001).unwrap();
    let mut two = resonant(0.0, 0.0, 0.0, 0.3, -0.3, 1e-8);
    two.n_levels = 2;
    two.energy = RMatrix::from_row_slice(2, 2, &[-1.0, 0.3, 0.3, 0.5]);
    two.lead_a.gamma = RMatrix::from_row_slice(2, 2, &[0.5, 0.2, 0.2, 0.5]);
    two.lead_b.gamma = RMatrix::from_row_slice(2, 2, &[0.7, -0.1, -0.1, 0.4]);
    for spec in [resonant(0.0, 0.5, 0.5, 0.0, 0.0, 1e-8), two] {
        let a = spectral(&bare(&spec, grid));
        let total = negf::grid::integrate(&a);
        for i in 0..spec.n_levels {
            let s = total[(i, i)].re / (2.0 * PI);
            assert!((s - 1.0).abs() < 1e-3, "level {i}: {s}");
        }
        for m in a.values() {
            let herm = (m + m.adjoint()) * negf::C64::from(0.5);
            let min = herm.symmetric_eigenvalues().min();
            assert!(min >= -1e-10, "{min}");
        }
    }
}

fn occupation_grid() -> FrequencyGrid {
    FrequencyGrid::new(4000.0, 80001).unwrap()
}

#[test]
fn occupation_fixtures() {
    let grid = occupation_grid();
    let deep = resonant(-400.0, 0.5, 0.5, 0.0, 0.0, 1e-8);
    let n = occupation(&bare(&deep, grid), &grid).unwrap()[0];
    assert!((n - 1.0).abs() < 1e-3, "deep {n}");
    let mid = resonant(0.0, 0.5, 0.5, 0.0, 0.0, 1e-8);
    let n = occupation(&bare(&mid, grid), &grid).unwrap()[0];
    assert!((n - 0.5).abs() < 1e-3, "symmetric {n}");
    let high = resonant(400.0, 0.5, 0.5, 0.0, 0.0, 1e-8);
    let n = occupation(&bare(&high, grid), &grid).unwrap()[0];
    assert!(n <= 1e-3, "high {n}");
}

#[test]
fn occupation_and_current_are_gauge_invariant() {
    let grid = occupation_grid();
    let c = 2.0 * grid.spacing();
    let mut spec = resonant(0.3, 0.4, 0.6, 0.5, -0.5, 1e-8);
    spec.lead_a.temperature = 0.05;
    spec.lead_b.temperature = 0.05;
    let mut shifted = spec.clone();
    shifted.energy[(0, 0)] += c;
    shifted.lead_a.mu += c;
    shifted.lead_b.mu += c;
    let (g0, g1) = (bare(&spec, grid), bare(&shifted, grid));
    let n0 = occupation(&g0, &grid).unwrap()[0];
    let n1 = occupation(&g1, &grid).unwrap()[0];
    assert!((n0 - n1).abs() < 1e-8, "{}", n0 - n1);
    let i0 = currents(&spec, &g0).unwrap().current_a;
    let i1 = currents(&shifted, &g1).unwrap().current_a;
    assert!((i0 - i1).abs() < 1e-8, "{}", i0 - i1);
}

fn phonon_fixture(lambda: f64, v: f64) -> JunctionSpec {
    let mut spec = with_mode(
        resonant(0.0, 0.5, 0.5, 0.5 * v, -0.5 * v, 1e-8),
        1.0,
        lambda,
        0.1,
        0.05,
    );
    spec.lead_a.temperature = 0.05;
    spec.lead_b.temperature = 0.05;
    spec
}

#[test]
fn born_current_correction_is_quadratic() {
    let opts = SolverOptions {
        omega_max: 20.0,
        n_omega: 4001,
        interaction_order: InteractionOrder::Born,
        ..SolverOptions::default()
    };
    let current = |lambda: f64| {
        let mut spec = phonon_fixture(lambda, 1.5);
        spec.eta = 0.02;
        currents(&spec, &scba_loop(&spec, &opts).unwrap().g)
            .unwrap()
            .net
    };
    let i0 = current(0.0);
    let c1 = (current(0.05) - i0) / 0.05f64.powi(2);
    let c2 = (current(0.025) - i0) / 0.025f64.powi(2);
    assert!(c1.abs() > 1e-3, "{c1}");
    assert!((c1 - c2).abs() < 0.05 * c2.abs(), "{c1} vs {c2}");
}

/// Each contact current is then only the finite-bandwidth leak, shared equally.
#[test]
fn scba_equilibrium_carries_no_net_current() {
    let spec = phonon_fixture(0.3, 0.0);
    let opts = SolverOptions {
        omega_max: 20.0,
        n_omega: 2001,
        phonon_propagator: PhononPropagator::Symmetrized,
        ..SolverOptions::default()
    };
    let r = scba_loop(&spec, &opts).unwrap();
    assert!(r.converged);
    let c = currents(&spec, &r.g).unwrap();
    assert!(c.net.abs() < 1e-10, "{c:?}");
    assert!((c.current_a - c.current_b).abs() < 1e-10);
    assert!(c.conservation_residual.abs() < 1e-2);
}

#[test]
fn scba_conservation_improves_with_bandwidth() {
    let residual = |w: f64, n: usize| {
        let spec = phonon_fixture(0.2, 0.5);
        let opts = SolverOptions {
            omega_max: w,
            n_omega: n,
            phonon_propagator: PhononPropagator::Symmetrized,
            ..SolverOptions::default()
        };
        let r = scba_loop(&spec, &opts).unwrap();
        assert!(r.converged);
        currents(&spec, &r.g).unwrap().conservation_residual.abs()
    };
    let narrow = residual(20.0, 4001);
    let wide = residual(40.0, 8001);
    assert!(narrow < 1e-3, "{narrow}");
    assert!(wide < 0.6 * narrow, "{wide} vs {narrow}");
}
