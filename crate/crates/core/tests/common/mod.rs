#![allow(dead_code)]

use negf::green::FieldKind;
use negf::grid::{FrequencyGrid, GridFunction};
use negf::{CMatrix, JunctionSpec, KeldyshGF, LeadSpec, PhononSpec, RMatrix, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn lead(gamma: f64, mu: f64, temperature: f64) -> LeadSpec {
    LeadSpec {
        gamma: RMatrix::from_element(1, 1, gamma),
        mu,
        temperature,
    }
}

/// Single level between two leads, no phonons.
pub fn resonant(
    eps: f64,
    gamma_a: f64,
    gamma_b: f64,
    mu_a: f64,
    mu_b: f64,
    eta: f64,
) -> JunctionSpec {
    JunctionSpec {
        n_levels: 1,
        energy: RMatrix::from_element(1, 1, eps),
        lead_a: lead(gamma_a, mu_a, 0.0),
        lead_b: lead(gamma_b, mu_b, 0.0),
        phonons: None,
        eta,
    }
}

pub fn with_mode(
    mut spec: JunctionSpec,
    omega: f64,
    lambda: f64,
    bath: f64,
    t: f64,
) -> JunctionSpec {
    spec.phonons = Some(PhononSpec {
        omegas: vec![omega],
        coupling: RMatrix::from_element(1, 1, lambda),
        bath_gamma: RMatrix::from_element(1, 1, bath),
        bath_temperature: t,
    });
    spec
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut StdRng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_function(rng: &mut StdRng, grid: FrequencyGrid, d: usize) -> GridFunction {
    let values = (0..grid.len()).map(|_| random_matrix(rng, d)).collect();
    GridFunction::new(grid, d, values).unwrap()
}

pub fn random_keldysh(
    rng: &mut StdRng,
    grid: FrequencyGrid,
    d: usize,
    kind: FieldKind,
) -> KeldyshGF {
    KeldyshGF::new(
        random_function(rng, grid, d),
        random_function(rng, grid, d),
        random_function(rng, grid, d),
        random_function(rng, grid, d),
        kind,
    )
    .unwrap()
}
