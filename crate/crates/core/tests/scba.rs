mod common;

use common::*;
use negf::{scba_loop, scba_loop_from, JunctionSpec, PhononPropagator, SolverError, SolverOptions};

fn fixture(lambda: f64, v: f64) -> JunctionSpec {
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

fn options() -> SolverOptions {
    SolverOptions {
        omega_max: 20.0,
        n_omega: 4001,
        max_iter: 50,
        tol: 1e-8,
        mixing: 0.5,
        phonon_propagator: PhononPropagator::Symmetrized,
        ..SolverOptions::default()
    }
}

#[test]
fn weak_coupling_converges_monotonically() {
    let r = scba_loop(&fixture(0.2, 0.0), &options()).unwrap();
    assert!(r.converged, "{:?}", r.residual_history);
    assert!(r.iterations <= 50);
    let h = &r.residual_history;
    assert_eq!(h.len(), r.iterations);
    for w in h[h.len() - 6..].windows(2) {
        assert!(w[1] <= w[0], "{h:?}");
    }
    assert!(r.final_residual().unwrap() <= 1e-8);
}

#[test]
fn single_pole_propagator_also_converges() {
    let opts = SolverOptions {
        phonon_propagator: PhononPropagator::Paper,
        ..options()
    };
    assert!(scba_loop(&fixture(0.2, 0.5), &opts).unwrap().converged);
}

#[test]
fn iteration_cap_is_reported_honestly() {
    let opts = SolverOptions {
        max_iter: 3,
        ..options()
    };
    let r = scba_loop(&fixture(0.2, 0.5), &opts).unwrap();
    assert!(!r.converged);
    assert_eq!(r.iterations, 3);
    assert!(r.final_residual().unwrap() > opts.tol);
}

#[test]
fn warm_start_from_nearby_bias_saves_iterations() {
    let opts = options();
    let cold = scba_loop(&fixture(0.2, 0.55), &opts).unwrap();
    let seed = scba_loop(&fixture(0.2, 0.5), &opts).unwrap();
    let warm = scba_loop_from(&fixture(0.2, 0.55), &opts, Some(&seed)).unwrap();
    assert!(warm.converged && cold.converged);
    assert!(
        warm.iterations < cold.iterations,
        "{} vs {}",
        warm.iterations,
        cold.iterations
    );
    assert!(warm.g.max_norm_diff(&cold.g) < 1e-6);
}

#[test]
fn decoupled_mode_is_a_fixed_point() {
    let r = scba_loop(&fixture(0.0, 0.5), &options()).unwrap();
    assert_eq!(r.iterations, 1);
    assert_eq!(r.residual_history, vec![0.0]);
}

#[test]
fn invalid_mixing_is_rejected() {
    let opts = SolverOptions {
        mixing: 0.0,
        ..options()
    };
    match scba_loop(&fixture(0.2, 0.0), &opts) {
        Err(SolverError::Model(e)) => assert!(e.to_string().contains("mixing"), "{e}"),
        other => panic!("{other:?}"),
    }
}
