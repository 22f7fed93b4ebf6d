//! Lead, bath and electron-phonon self-energies.
//!
//! Components are stored in the physical convention (`ll` time-ordered, `lr`
//! lesser, `rl` greater, `rr` anti-time-ordered), so that `Σ_r = ll − lr` and
//! `Σ^< = lr`. The block that multiplies the propagator in the Liouville Dyson
//! equation is `κ_α κ_β` times the stored component, see
//! [`SelfEnergySet::liouville_component`].

use nalgebra::DVector;

use crate::error::{GridError, SolverError};
use crate::green::{Branch, FieldKind, KeldyshGF};
use crate::grid::{
    bose_on_grid, convolve_with, fermi_occupation, ConvolutionMethod, FrequencyGrid, GridFunction,
    Product,
};
use crate::model::{JunctionSpec, LeadSpec, PhononPropagator};
use crate::{CMatrix, RMatrix, C64};

/// Which lead(s) to include in [`lead_sigma`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeadSelection {
    A,
    B,
    Both,
}

/// Four stored components plus a static (Hartree) matrix that adds to the
/// retarded and advanced parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfEnergySet {
    pub keldysh: KeldyshGF,
    pub hartree: CMatrix,
}

impl SelfEnergySet {
    pub fn zeros(grid: FrequencyGrid, dim: usize, kind: FieldKind) -> Self {
        Self {
            keldysh: KeldyshGF::zeros(grid, dim, kind),
            hartree: CMatrix::zeros(dim, dim),
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.keldysh.grid()
    }

    pub fn dim(&self) -> usize {
        self.keldysh.dim()
    }

    /// Retarded part at grid index `k`: `ll − lr + hartree`.
    pub fn retarded_at(&self, k: usize) -> CMatrix {
        self.keldysh.ll.at(k) - self.keldysh.lr.at(k) + &self.hartree
    }

    pub fn retarded(&self) -> GridFunction {
        self.keldysh.retarded().add_constant(&self.hartree)
    }

    /// Component as it enters the block Dyson equation: `κ_α κ_β` times the
    /// stored value, with the Hartree term on the diagonal blocks.
    pub fn liouville_component(&self, alpha: Branch, beta: Branch) -> GridFunction {
        let sign = alpha.kappa() * beta.kappa();
        let base = self.keldysh.component(alpha, beta).scale(C64::from(sign));
        match (alpha, beta) {
            (Branch::L, Branch::L) => base.add_constant(&self.hartree),
            (Branch::R, Branch::R) => base.add_constant(&(-&self.hartree)),
            _ => base,
        }
    }

    /// Moves the Hartree matrix into `ll` (added) and `rr` (subtracted); the
    /// retarded part and the Keldysh identity are unchanged.
    pub fn fold_hartree(&self) -> Self {
        let h = &self.hartree;
        Self {
            keldysh: KeldyshGF {
                ll: self.keldysh.ll.add_constant(h),
                lr: self.keldysh.lr.clone(),
                rl: self.keldysh.rl.clone(),
                rr: self.keldysh.rr.add_constant(&(-h)),
                kind: self.keldysh.kind,
            },
            hartree: CMatrix::zeros(h.nrows(), h.ncols()),
        }
    }

    pub fn max_norm_diff(&self, other: &SelfEnergySet) -> f64 {
        let h = (&self.hartree - &other.hartree)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        self.keldysh.max_norm_diff(&other.keldysh).max(h)
    }
}

fn real_to_complex(m: &RMatrix) -> CMatrix {
    m.map(C64::from)
}

/// `−iΓ/2` retarded part, `iΣ_c Γ_c f_c` lesser, `−iΣ_c Γ_c (1 − f_c)` greater;
/// `ll` and `rr` follow from the retarded part and the Keldysh identity.
pub fn lead_sigma(spec: &JunctionSpec, grid: FrequencyGrid, which: LeadSelection) -> SelfEnergySet {
    let leads: Vec<&LeadSpec> = match which {
        LeadSelection::A => vec![&spec.lead_a],
        LeadSelection::B => vec![&spec.lead_b],
        LeadSelection::Both => vec![&spec.lead_a, &spec.lead_b],
    };
    let n = spec.n_levels;
    let gammas: Vec<CMatrix> = leads.iter().map(|l| real_to_complex(&l.gamma)).collect();
    let total = gammas.iter().fold(CMatrix::zeros(n, n), |acc, g| acc + g);
    let retarded = &total * C64::new(0.0, -0.5);
    let i = C64::new(0.0, 1.0);
    let lr = GridFunction::from_fn(grid, n, |w| {
        leads
            .iter()
            .zip(&gammas)
            .fold(CMatrix::zeros(n, n), |acc, (l, g)| {
                acc + g * (i * fermi_occupation(w, l.mu, l.temperature))
            })
    });
    let rl = GridFunction::from_fn(grid, n, |w| {
        leads
            .iter()
            .zip(&gammas)
            .fold(CMatrix::zeros(n, n), |acc, (l, g)| {
                acc - g * (i * (1.0 - fermi_occupation(w, l.mu, l.temperature)))
            })
    });
    let ll = lr.add_constant(&retarded);
    let rr = &(&lr + &rl) - &ll;
    SelfEnergySet {
        keldysh: KeldyshGF {
            ll,
            lr,
            rl,
            rr,
            kind: FieldKind::Electron,
        },
        hartree: CMatrix::zeros(n, n),
    }
}

/// Damping of the primary modes by the secondary-phonon bath.
///
/// `Paper`: frequency-independent width, `γ_r = −iΓ̃/2`, `lr = −iΓ̃N(ω)`,
/// `rl = −iΓ̃(N(ω)+1)`.
/// `Symmetrized`: Ohmic width `Γ̃_{ll′}·ω/√(Ω_l Ω_l′)`, odd in `ω` as required
/// for the displacement field and equal to `Γ̃` at resonance for a single mode.
/// `N(0)` is regularized by averaging over `±δω/2`.
pub fn bath_gamma_sigma(
    spec: &JunctionSpec,
    grid: FrequencyGrid,
    variant: PhononPropagator,
) -> Result<SelfEnergySet, SolverError> {
    let ph = spec.phonons.as_ref().ok_or(SolverError::NoPhonons)?;
    let np = ph.n_modes();
    let t = ph.bath_temperature;
    let dw = grid.spacing();
    let base = real_to_complex(&ph.bath_gamma);
    let sqrt_w = DVector::from_iterator(np, ph.omegas.iter().map(|w| w.sqrt()));
    let minus_i = C64::new(0.0, -1.0);

    // width(ω) and width(ω)·N(ω); the product stays finite at ω = 0
    let width = |w: f64| -> CMatrix {
        match variant {
            PhononPropagator::Paper => base.clone(),
            PhononPropagator::Symmetrized => {
                CMatrix::from_fn(np, np, |l, m| base[(l, m)] * (w / (sqrt_w[l] * sqrt_w[m])))
            }
        }
    };
    let width_n = |w: f64| -> CMatrix {
        match variant {
            PhononPropagator::Paper => &base * C64::from(bose_on_grid(w, t, dw)),
            PhononPropagator::Symmetrized => {
                let wn = if w == 0.0 {
                    let h = 0.5 * dw;
                    0.5 * h * (bose_on_grid(h, t, dw) - bose_on_grid(-h, t, dw))
                } else {
                    w * bose_on_grid(w, t, dw)
                };
                CMatrix::from_fn(np, np, |l, m| base[(l, m)] * (wn / (sqrt_w[l] * sqrt_w[m])))
            }
        }
    };

    let lr = GridFunction::from_fn(grid, np, |w| width_n(w) * minus_i);
    let rl = GridFunction::from_fn(grid, np, |w| (width_n(w) + width(w)) * minus_i);
    let retarded = GridFunction::from_fn(grid, np, |w| width(w) * C64::new(0.0, -0.5));
    let ll = &retarded + &lr;
    let rr = &(&lr + &rl) - &ll;
    Ok(SelfEnergySet {
        keldysh: KeldyshGF {
            ll,
            lr,
            rl,
            rr,
            kind: FieldKind::Phonon,
        },
        hartree: CMatrix::zeros(np, np),
    })
}

fn coupling(spec: &JunctionSpec) -> Result<CMatrix, SolverError> {
    Ok(real_to_complex(
        &spec
            .phonons
            .as_ref()
            .ok_or(SolverError::NoPhonons)?
            .coupling,
    ))
}

/// Electron-phonon self-energy of the electrons.
///
/// Fock part, stored: `Ξ_{αβ}^{ij}(ω) = i Σ λ_{l₁i} λ_{l₂j} ∫dω′/2π
/// D_{αβ}^{l₁l₂}(ω′) G_{αβ}^{ij}(ω−ω′)`. Hartree part:
/// `H_ii = Σ λ_{l₁i} λ_{l₂i₁} n_{i₁} Re D_r^{l₁l₂}(0)` with `D_r = ll − lr`,
/// zero unless `include_hartree`.
pub fn ep_sigma_electron(
    g: &KeldyshGF,
    d: &KeldyshGF,
    spec: &JunctionSpec,
    occupations: &[f64],
    include_hartree: bool,
) -> Result<SelfEnergySet, SolverError> {
    ep_sigma_electron_with(
        g,
        d,
        spec,
        occupations,
        include_hartree,
        ConvolutionMethod::Auto,
    )
}

pub fn ep_sigma_electron_with(
    g: &KeldyshGF,
    d: &KeldyshGF,
    spec: &JunctionSpec,
    occupations: &[f64],
    include_hartree: bool,
    method: ConvolutionMethod,
) -> Result<SelfEnergySet, SolverError> {
    if g.grid() != d.grid() {
        return Err(GridError::GridMismatch.into());
    }
    let lambda = coupling(spec)?;
    let ne = spec.n_levels;
    if g.dim() != ne || d.dim() != lambda.nrows() {
        return Err(GridError::DimensionMismatch(format!(
            "electron {} / phonon {} vs coupling {}x{}",
            g.dim(),
            d.dim(),
            lambda.nrows(),
            lambda.ncols()
        ))
        .into());
    }
    if occupations.len() != ne {
        return Err(GridError::LengthMismatch {
            expected: ne,
            found: occupations.len(),
        }
        .into());
    }
    let lt = lambda.transpose();
    let i = C64::new(0.0, 1.0);
    let fock = |alpha: Branch, beta: Branch| -> Result<GridFunction, GridError> {
        let dressed = d.component(alpha, beta).map(|m| &lt * m * &lambda);
        Ok(convolve_with(
            &dressed,
            g.component(alpha, beta),
            Product::Elementwise,
            method,
        )?
        .scale(i))
    };
    let keldysh = KeldyshGF {
        ll: fock(Branch::L, Branch::L)?,
        lr: fock(Branch::L, Branch::R)?,
        rl: fock(Branch::R, Branch::L)?,
        rr: fock(Branch::R, Branch::R)?,
        kind: FieldKind::Electron,
    };
    let mut hartree = CMatrix::zeros(ne, ne);
    if include_hartree {
        let k0 = d.grid().zero_index();
        let d_static = (d.ll.at(k0) - d.lr.at(k0)).map(|z| C64::from(z.re));
        let n = DVector::from_iterator(ne, occupations.iter().map(|&x| C64::from(x)));
        // Σ_{l₁l₂} λ_{l₁i} D_{l₁l₂} Σ_{i₁} λ_{l₂i₁} n_{i₁}
        let v = &lt * d_static * (&lambda * n);
        for k in 0..ne {
            hartree[(k, k)] = C64::from(v[k].re);
        }
    }
    Ok(SelfEnergySet { keldysh, hartree })
}

/// Electron-hole bubble, stored: `Λ_{αβ}^{ll′}(ω) = −i Σ λ_{li} λ_{l′j} ∫dω′/2π
/// G_{αβ}^{ij}(ω′) G_{βα}^{ji}(ω′−ω)`. The static tadpole is not included.
pub fn ep_sigma_phonon(g: &KeldyshGF, spec: &JunctionSpec) -> Result<SelfEnergySet, SolverError> {
    ep_sigma_phonon_with(g, spec, ConvolutionMethod::Auto)
}

pub fn ep_sigma_phonon_with(
    g: &KeldyshGF,
    spec: &JunctionSpec,
    method: ConvolutionMethod,
) -> Result<SelfEnergySet, SolverError> {
    let lambda = coupling(spec)?;
    if g.dim() != lambda.ncols() {
        return Err(GridError::DimensionMismatch(format!(
            "electron {} vs coupling {}x{}",
            g.dim(),
            lambda.nrows(),
            lambda.ncols()
        ))
        .into());
    }
    let np = lambda.nrows();
    let lt = lambda.transpose();
    let minus_i = C64::new(0.0, -1.0);
    let bubble = |alpha: Branch, beta: Branch| -> Result<GridFunction, GridError> {
        // B^{ij}(x) = G_{βα}^{ji}(−x), so that G_{βα}^{ji}(ω′−ω) = B^{ij}(ω−ω′)
        let back = g.component(beta, alpha).reversed().map(|m| m.transpose());
        let p = convolve_with(
            g.component(alpha, beta),
            &back,
            Product::Elementwise,
            method,
        )?;
        Ok(p.map(|m| &lambda * m * &lt * minus_i))
    };
    Ok(SelfEnergySet {
        keldysh: KeldyshGF {
            ll: bubble(Branch::L, Branch::L)?,
            lr: bubble(Branch::L, Branch::R)?,
            rl: bubble(Branch::R, Branch::L)?,
            rr: bubble(Branch::R, Branch::R)?,
            kind: FieldKind::Phonon,
        },
        hartree: CMatrix::zeros(np, np),
    })
}

fn assemble(a: &SelfEnergySet, b: &SelfEnergySet) -> Result<SelfEnergySet, SolverError> {
    for (x, y) in a.keldysh.components().iter().zip(b.keldysh.components()) {
        x.check_compatible(y)?;
    }
    let sum = SelfEnergySet {
        keldysh: KeldyshGF {
            ll: &a.keldysh.ll + &b.keldysh.ll,
            lr: &a.keldysh.lr + &b.keldysh.lr,
            rl: &a.keldysh.rl + &b.keldysh.rl,
            rr: &a.keldysh.rr + &b.keldysh.rr,
            kind: a.keldysh.kind,
        },
        hartree: &a.hartree + &b.hartree,
    };
    Ok(sum.fold_hartree())
}

/// `Σ = σ + Ξ` with the Hartree term folded into `ll`/`rr`.
pub fn assemble_electron_sigma(
    lead: &SelfEnergySet,
    ep: &SelfEnergySet,
) -> Result<SelfEnergySet, SolverError> {
    assemble(lead, ep)
}

/// `Π = γ + Λ`.
pub fn assemble_phonon_pi(
    bath: &SelfEnergySet,
    ep: &SelfEnergySet,
) -> Result<SelfEnergySet, SolverError> {
    assemble(bath, ep)
}
