//! Four-component (Liouville-space) Green functions, the free propagators and
//! the rotation to retarded/advanced/correlation form.

use crate::error::{GridError, SolverError};
use crate::grid::{bose_on_grid, FrequencyGrid, GridFunction};
use crate::model::{JunctionSpec, PhononPropagator};
use crate::{CMatrix, C64};

/// Superoperator branch; `κ_L = +1`, `κ_R = −1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    L,
    R,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::L, Branch::R];

    pub fn kappa(self) -> f64 {
        match self {
            Branch::L => 1.0,
            Branch::R => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Electron,
    Phonon,
}

/// The components `ll`, `lr`, `rl`, `rr` on a common grid.
///
/// For propagators built by the solver these are the time-ordered, lesser,
/// greater and anti-time-ordered functions.
#[derive(Debug, Clone, PartialEq)]
pub struct KeldyshGF {
    pub ll: GridFunction,
    pub lr: GridFunction,
    pub rl: GridFunction,
    pub rr: GridFunction,
    pub kind: FieldKind,
}

/// Retarded, advanced and correlation components.
#[derive(Debug, Clone, PartialEq)]
pub struct RakGF {
    pub r: GridFunction,
    pub a: GridFunction,
    pub c: GridFunction,
}

impl KeldyshGF {
    pub fn new(
        ll: GridFunction,
        lr: GridFunction,
        rl: GridFunction,
        rr: GridFunction,
        kind: FieldKind,
    ) -> Result<Self, GridError> {
        ll.check_compatible(&lr)?;
        ll.check_compatible(&rl)?;
        ll.check_compatible(&rr)?;
        Ok(Self {
            ll,
            lr,
            rl,
            rr,
            kind,
        })
    }

    pub fn zeros(grid: FrequencyGrid, dim: usize, kind: FieldKind) -> Self {
        let z = GridFunction::zeros(grid, dim);
        Self {
            ll: z.clone(),
            lr: z.clone(),
            rl: z.clone(),
            rr: z,
            kind,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.ll.grid()
    }

    pub fn dim(&self) -> usize {
        self.ll.dim()
    }

    pub fn component(&self, alpha: Branch, beta: Branch) -> &GridFunction {
        match (alpha, beta) {
            (Branch::L, Branch::L) => &self.ll,
            (Branch::L, Branch::R) => &self.lr,
            (Branch::R, Branch::L) => &self.rl,
            (Branch::R, Branch::R) => &self.rr,
        }
    }

    pub fn components(&self) -> [&GridFunction; 4] {
        [&self.ll, &self.lr, &self.rl, &self.rr]
    }

    /// `ll − lr`.
    pub fn retarded(&self) -> GridFunction {
        &self.ll - &self.lr
    }

    /// `ll − rl`.
    pub fn advanced(&self) -> GridFunction {
        &self.ll - &self.rl
    }

    /// Largest component-wise difference over all four components.
    pub fn max_norm_diff(&self, other: &KeldyshGF) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| a.max_norm_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    /// `(1 − m)·self + m·other`, component by component.
    pub fn mix(&self, other: &KeldyshGF, m: f64) -> Self {
        Self {
            ll: self.ll.mix(&other.ll, m),
            lr: self.lr.mix(&other.lr, m),
            rl: self.rl.mix(&other.rl, m),
            rr: self.rr.mix(&other.rr, m),
            kind: self.kind,
        }
    }
}

fn inverse_or_singular(m: CMatrix, omega: f64) -> Result<CMatrix, SolverError> {
    m.try_inverse().ok_or(SolverError::Singular { omega })
}

/// Free electron propagator `G⁰_{αβ}(ω) = δ_{αβ}[ω − κ_α E + iη]⁻¹`.
///
/// Note the `rr` branch keeps `+iη`, so this set does not satisfy
/// `ll + rr = lr + rl`; thermal information enters through the self-energies.
pub fn electron_g0(spec: &JunctionSpec, grid: FrequencyGrid) -> Result<KeldyshGF, SolverError> {
    let n = spec.n_levels;
    let e = spec.energy.map(C64::from);
    let eta = C64::new(0.0, spec.eta);
    let build = |kappa: f64| -> Result<GridFunction, SolverError> {
        let values = grid
            .points()
            .map(|w| {
                let m = CMatrix::identity(n, n) * (C64::from(w) + eta) - &e * C64::from(kappa);
                inverse_or_singular(m, w)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GridFunction::new(grid, n, values)?)
    };
    Ok(KeldyshGF {
        ll: build(1.0)?,
        lr: GridFunction::zeros(grid, n),
        rl: GridFunction::zeros(grid, n),
        rr: build(-1.0)?,
        kind: FieldKind::Electron,
    })
}

/// Free phonon propagator, diagonal in the mode index.
///
/// `Paper`: `D⁰_{αβ} = −δ_{αβ}/(ω − κ_α Ω + iη)`, no occupation.
/// `Symmetrized`: `D_r = 2Ω/((ω+iη)² − Ω²)` with `lr = N(ω)(D_r − D_a)`,
/// `rl = (1 + N(ω))(D_r − D_a)` at the bath temperature and the remaining two
/// components fixed by the retarded part and the Keldysh identity.
pub fn phonon_d0(
    spec: &JunctionSpec,
    grid: FrequencyGrid,
    variant: PhononPropagator,
) -> Result<KeldyshGF, SolverError> {
    let ph = spec.phonons.as_ref().ok_or(SolverError::NoPhonons)?;
    let np = ph.n_modes();
    let eta = spec.eta;
    let diag = |f: &(dyn Fn(f64, f64) -> C64 + Sync)| {
        GridFunction::from_fn(grid, np, |w| {
            CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                np,
                ph.omegas.iter().map(|&o| f(w, o)),
            ))
        })
    };
    Ok(match variant {
        PhononPropagator::Paper => KeldyshGF {
            ll: diag(&|w, o| -1.0 / C64::new(w - o, eta)),
            lr: GridFunction::zeros(grid, np),
            rl: GridFunction::zeros(grid, np),
            rr: diag(&|w, o| -1.0 / C64::new(w + o, eta)),
            kind: FieldKind::Phonon,
        },
        PhononPropagator::Symmetrized => {
            let t = ph.bath_temperature;
            let dw = grid.spacing();
            let dr = |w: f64, o: f64| {
                let z = C64::new(w, eta);
                2.0 * o / (z * z - o * o)
            };
            let spectral = |w: f64, o: f64| {
                let r = dr(w, o);
                r - r.conj()
            };
            let lr = diag(&|w, o| spectral(w, o) * bose_on_grid(w, t, dw));
            let rl = diag(&|w, o| spectral(w, o) * (1.0 + bose_on_grid(w, t, dw)));
            let ll = &diag(&dr) + &lr;
            let rr = &(&lr + &rl) - &ll;
            KeldyshGF {
                ll,
                lr,
                rl,
                rr,
                kind: FieldKind::Phonon,
            }
        }
    })
}

/// `r = ll − lr`, `a = ll − rl`, `c = ll + rr`.
pub fn to_rak(k: &KeldyshGF) -> RakGF {
    RakGF {
        r: &k.ll - &k.lr,
        a: &k.ll - &k.rl,
        c: &k.ll + &k.rr,
    }
}

/// Inverse of [`to_rak`] given the lesser (`lr`) component:
/// `ll = r + lr`, `rl = ll − a`, `rr = lr + rl − ll`. The correlation part of
/// `rak` is not used; the output satisfies the Keldysh identity exactly.
pub fn from_rak(rak: &RakGF, lesser: &GridFunction, kind: FieldKind) -> KeldyshGF {
    let lr = lesser.clone();
    let ll = &rak.r + &lr;
    let rl = &ll - &rak.a;
    let rr = &(&lr + &rl) - &ll;
    KeldyshGF {
        ll,
        lr,
        rl,
        rr,
        kind,
    }
}

/// `max_ω ‖ll + rr − lr − rl‖_max`.
pub fn keldysh_residual(k: &KeldyshGF) -> f64 {
    let lhs = &k.ll + &k.rr;
    let rhs = &k.lr + &k.rl;
    lhs.max_norm_diff(&rhs)
}
