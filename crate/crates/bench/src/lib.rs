//! Fixtures shared by the benchmarks.

use negf::{JunctionSpec, LeadSpec, PhononSpec, RMatrix};

/// Single level at the band centre with one damped mode.
pub fn single_level(lambda: f64) -> JunctionSpec {
    let lead = |mu: f64| LeadSpec {
        gamma: RMatrix::from_element(1, 1, 0.5),
        mu,
        temperature: 0.05,
    };
    JunctionSpec {
        n_levels: 1,
        energy: RMatrix::from_element(1, 1, 0.0),
        lead_a: lead(0.25),
        lead_b: lead(-0.25),
        phonons: Some(PhononSpec {
            omegas: vec![1.0],
            coupling: RMatrix::from_element(1, 1, lambda),
            bath_gamma: RMatrix::from_element(1, 1, 0.1),
            bath_temperature: 0.05,
        }),
        eta: 1e-6,
    }
}

/// Two coupled levels, two modes.
pub fn two_level(lambda: f64) -> JunctionSpec {
    let mut spec = single_level(lambda);
    spec.n_levels = 2;
    spec.energy = RMatrix::from_row_slice(2, 2, &[-0.3, 0.1, 0.1, 0.4]);
    spec.lead_a.gamma = RMatrix::from_row_slice(2, 2, &[0.6, 0.0, 0.0, 0.1]);
    spec.lead_b.gamma = RMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.6]);
    spec.phonons = Some(PhononSpec {
        omegas: vec![0.5, 1.2],
        coupling: RMatrix::from_row_slice(2, 2, &[lambda, 0.0, 0.0, lambda]),
        bath_gamma: RMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.1]),
        bath_temperature: 0.05,
    });
    spec
}
