//! Steady-state nonequilibrium Green-function (NEGF) solver for a multi-level
//! molecular junction coupled to two wide-band leads and to a set of harmonic
//! phonon modes.
//!
//! The four Liouville-space (superoperator) components of every propagator are
//! kept explicitly: `ll`, `lr`, `rl`, `rr`, which coincide with the time-ordered,
//! lesser, greater and anti-time-ordered Hilbert-space functions. Self-energies are
//! stored in the same physical convention; the block form that enters the
//! Liouville Dyson equation carries an extra `κ_α κ_β` sign on each component and
//! is available through [`selfenergy::SelfEnergySet::liouville_component`].
//!
//! Units: `ħ = e = k_B = 1`. Currents include the spin factor 2.

pub mod dyson;
pub mod error;
pub mod green;
pub mod grid;
pub mod model;
pub mod observables;
pub mod selfenergy;

pub use dyson::{scba_loop, scba_loop_from, solve_coupled, solve_rak, ScbaResult};
pub use error::{GridError, ModelError, SolverError};
pub use green::{Branch, FieldKind, KeldyshGF, RakGF};
pub use grid::{FrequencyGrid, GridFunction};
pub use model::{
    apply_bias, parse_config, BiasProfile, Config, InteractionOrder, JunctionSpec, LeadSpec,
    PhononPropagator, PhononSpec, SolverOptions,
};
pub use observables::CurrentResult;
pub use selfenergy::{LeadSelection, SelfEnergySet};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix used for per-frequency blocks.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense real matrix used for model parameters.
pub type RMatrix = nalgebra::DMatrix<f64>;
