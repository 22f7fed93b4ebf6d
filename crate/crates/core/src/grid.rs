//! Uniform symmetric frequency grid, matrix-valued grid functions, trapezoid
//! quadrature and the frequency-domain convolution used by the self-energies.

use std::ops::{Add, Sub};
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::GridError;
use crate::{CMatrix, C64};

/// Above this many points `ConvolutionMethod::Auto` switches to the FFT path.
const FFT_THRESHOLD: usize = 257;

/// Uniform grid `ω_k = (k − (n−1)/2)·δω`, `k = 0..n`, with `n` odd so that
/// `ω = 0` is a grid point and the grid is exactly symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyGrid {
    omega_max: f64,
    n: usize,
}

impl FrequencyGrid {
    pub fn new(omega_max: f64, n: usize) -> Result<Self, GridError> {
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(GridError::BadHalfWidth(omega_max));
        }
        if n < 3 || n.is_multiple_of(2) {
            return Err(GridError::EvenOrTooSmall(n));
        }
        Ok(Self { omega_max, n })
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.omega_max / (self.n - 1) as f64
    }

    /// Index of `ω = 0`.
    pub fn zero_index(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn point(&self, k: usize) -> f64 {
        (k as f64 - self.zero_index() as f64) * self.spacing()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.point(k))
    }

    /// Trapezoid weight of point `k` (includes `δω`, excludes `1/2π`).
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n {
            0.5 * self.spacing()
        } else {
            self.spacing()
        }
    }
}

/// A `dim × dim` complex matrix at every point of a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: FrequencyGrid,
    dim: usize,
    values: Vec<CMatrix>,
}

impl GridFunction {
    pub fn new(grid: FrequencyGrid, dim: usize, values: Vec<CMatrix>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(m) = values.iter().find(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(GridError::DimensionMismatch(format!(
                "expected {dim}x{dim}, found {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { grid, dim, values })
    }

    pub fn zeros(grid: FrequencyGrid, dim: usize) -> Self {
        Self {
            grid,
            dim,
            values: vec![CMatrix::zeros(dim, dim); grid.len()],
        }
    }

    /// Evaluates `f(ω)` at every grid point (in parallel).
    pub fn from_fn<F>(grid: FrequencyGrid, dim: usize, f: F) -> Self
    where
        F: Fn(f64) -> CMatrix + Sync,
    {
        let values: Vec<CMatrix> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let m = f(grid.point(k));
                debug_assert_eq!((m.nrows(), m.ncols()), (dim, dim));
                m
            })
            .collect();
        Self { grid, dim, values }
    }

    /// Scalar (1×1) grid function.
    pub fn scalar_from_fn<F>(grid: FrequencyGrid, f: F) -> Self
    where
        F: Fn(f64) -> C64 + Sync,
    {
        Self::from_fn(grid, 1, |w| CMatrix::from_element(1, 1, f(w)))
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    pub fn at(&self, k: usize) -> &CMatrix {
        &self.values[k]
    }

    pub fn into_values(self) -> Vec<CMatrix> {
        self.values
    }

    /// Scalar value of a 1×1 function at point `k`.
    pub fn scalar(&self, k: usize) -> C64 {
        self.values[k][(0, 0)]
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(&CMatrix) -> CMatrix + Sync + Send,
    {
        let values: Vec<CMatrix> = self.values.par_iter().map(f).collect();
        let dim = values.first().map_or(self.dim, |m| m.nrows());
        Self {
            grid: self.grid,
            dim,
            values,
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        self.map(|m| m * factor)
    }

    /// Pointwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.map(|m| m.adjoint())
    }

    /// `g(ω) = f(−ω)`; exact on the symmetric grid.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid,
            dim: self.dim,
            values,
        }
    }

    pub fn is_compatible(&self, other: &GridFunction) -> bool {
        self.grid == other.grid && self.dim == other.dim
    }

    pub fn check_compatible(&self, other: &GridFunction) -> Result<(), GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        if self.dim != other.dim {
            return Err(GridError::DimensionMismatch(format!(
                "{} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// Largest entry modulus over all points.
    pub fn max_norm(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|m| m.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `max_k max_ij |self_k − other_k|_ij`.
    ///
    /// # Panics
    /// If the two functions are not compatible.
    pub fn max_norm_diff(&self, other: &GridFunction) -> f64 {
        assert!(self.is_compatible(other), "incompatible grid functions");
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .flat_map(|m| m.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(1 − m)·self + m·other`.
    pub fn mix(&self, other: &GridFunction, m: f64) -> Self {
        assert!(self.is_compatible(other), "incompatible grid functions");
        let values = self
            .values
            .par_iter()
            .zip(&other.values)
            .map(|(a, b)| a * C64::from(1.0 - m) + b * C64::from(m))
            .collect();
        Self {
            grid: self.grid,
            dim: self.dim,
            values,
        }
    }

    /// Adds the same matrix at every grid point.
    pub fn add_constant(&self, c: &CMatrix) -> Self {
        self.map(|m| m + c)
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;

    fn add(self, rhs: &GridFunction) -> GridFunction {
        assert!(self.is_compatible(rhs), "incompatible grid functions");
        let values = self
            .values
            .par_iter()
            .zip(&rhs.values)
            .map(|(a, b)| a + b)
            .collect();
        GridFunction {
            grid: self.grid,
            dim: self.dim,
            values,
        }
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;

    fn sub(self, rhs: &GridFunction) -> GridFunction {
        assert!(self.is_compatible(rhs), "incompatible grid functions");
        let values = self
            .values
            .par_iter()
            .zip(&rhs.values)
            .map(|(a, b)| a - b)
            .collect();
        GridFunction {
            grid: self.grid,
            dim: self.dim,
            values,
        }
    }
}

/// Fermi function `1/(e^{(ω−μ)/T}+1)`; a step (½ at `ω = μ`) when `T = 0`.
pub fn fermi_occupation(omega: f64, mu: f64, temperature: f64) -> f64 {
    let x = omega - mu;
    if temperature == 0.0 {
        return if x < 0.0 {
            1.0
        } else if x > 0.0 {
            0.0
        } else {
            0.5
        };
    }
    let x = x / temperature;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Bose function `1/(e^{ω/T}−1)`. At `T = 0` it is `0` for `ω > 0` and `−1`
/// for `ω < 0`. `ω = 0` is a pole and is rejected.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64, GridError> {
    if omega == 0.0 {
        return Err(GridError::BosePole { temperature });
    }
    if temperature == 0.0 {
        return Ok(if omega > 0.0 { 0.0 } else { -1.0 });
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Bose function on a grid point; at `ω = 0` the pole is replaced by the average
/// of the values at `±δω/2`, which is exactly `−1/2`.
pub(crate) fn bose_on_grid(omega: f64, temperature: f64, spacing: f64) -> f64 {
    match bose_occupation(omega, temperature) {
        Ok(n) => n,
        Err(_) => {
            let h = 0.5 * spacing;
            let up = bose_occupation(h, temperature).unwrap_or(0.0);
            let down = bose_occupation(-h, temperature).unwrap_or(-1.0);
            0.5 * (up + down)
        }
    }
}

/// Trapezoid rule over the whole grid. The `1/2π` of a `∫dω/2π` is left to
/// the caller.
pub fn integrate(f: &GridFunction) -> CMatrix {
    let grid = f.grid();
    f.values()
        .iter()
        .enumerate()
        .fold(CMatrix::zeros(f.dim(), f.dim()), |acc, (k, m)| {
            acc + m * C64::from(grid.weight(k))
        })
}

/// How two matrices are combined under the convolution integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Product {
    /// Ordinary matrix product `A·B`.
    Matrix,
    /// Entry-by-entry (Hadamard) product.
    Elementwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvolutionMethod {
    /// Direct `O(n²)` sum; the reference.
    Direct,
    /// Zero-padded FFT.
    Fft,
    #[default]
    Auto,
}

/// `C(ω) = ∫dω′/2π A(ω′)·B(ω−ω′)` with matrix product in the given order.
///
/// Discretised as `C(ω_k) = (1/2π) Σ_j w_j A(ω_j)·B(ω_k − ω_j)` with trapezoid
/// weights `w_j` on the `ω′` sum; `B` is taken as zero off the grid.
pub fn convolve(a: &GridFunction, b: &GridFunction) -> Result<GridFunction, GridError> {
    convolve_with(a, b, Product::Matrix, ConvolutionMethod::Auto)
}

pub fn convolve_with(
    a: &GridFunction,
    b: &GridFunction,
    product: Product,
    method: ConvolutionMethod,
) -> Result<GridFunction, GridError> {
    if a.grid() != b.grid() {
        return Err(GridError::GridMismatch);
    }
    let out_dim = match product {
        Product::Matrix => a.dim(),
        Product::Elementwise => a.dim(),
    };
    match product {
        Product::Matrix if a.dim() != b.dim() => {
            return Err(GridError::DimensionMismatch(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                a.dim(),
                b.dim()
            )))
        }
        Product::Elementwise if a.dim() != b.dim() => {
            return Err(GridError::DimensionMismatch(format!(
                "elementwise product of {0}x{0} and {1}x{1}",
                a.dim(),
                b.dim()
            )))
        }
        _ => {}
    }
    let use_fft = match method {
        ConvolutionMethod::Direct => false,
        ConvolutionMethod::Fft => true,
        ConvolutionMethod::Auto => a.grid().len() >= FFT_THRESHOLD,
    };
    let values = if use_fft {
        convolve_fft(a, b, product)
    } else {
        convolve_direct(a, b, product)
    };
    GridFunction::new(*a.grid(), out_dim, values)
}

fn combine(x: &CMatrix, y: &CMatrix, product: Product) -> CMatrix {
    match product {
        Product::Matrix => x * y,
        Product::Elementwise => x.component_mul(y),
    }
}

fn convolve_direct(a: &GridFunction, b: &GridFunction, product: Product) -> Vec<CMatrix> {
    let grid = *a.grid();
    let n = grid.len();
    let c = grid.zero_index();
    let norm = 1.0 / (2.0 * std::f64::consts::PI);
    let dim = a.dim();
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = CMatrix::zeros(dim, dim);
            for j in 0..n {
                // ω_k − ω_j sits at index k − j + c
                let m = k + c;
                if m < j || m - j >= n {
                    continue;
                }
                let term = combine(a.at(j), b.at(m - j), product);
                acc += term * C64::from(grid.weight(j));
            }
            acc * C64::from(norm)
        })
        .collect()
}

struct FftPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    len: usize,
}

fn plan(n: usize) -> FftPair {
    let len = (2 * n - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    FftPair {
        forward: planner.plan_fft_forward(len),
        inverse: planner.plan_fft_inverse(len),
        len,
    }
}

fn convolve_fft(a: &GridFunction, b: &GridFunction, product: Product) -> Vec<CMatrix> {
    let grid = *a.grid();
    let n = grid.len();
    let c = grid.zero_index();
    let dim = a.dim();
    let fft = plan(n);
    let len = fft.len;

    let spectrum = |f: &dyn Fn(usize) -> C64| -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); len];
        for (k, slot) in buf.iter_mut().take(n).enumerate() {
            *slot = f(k);
        }
        fft.forward.process(&mut buf);
        buf
    };

    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .collect();
    let a_hat: Vec<Vec<C64>> = pairs
        .par_iter()
        .map(|&(i, j)| spectrum(&|k| a.at(k)[(i, j)] * grid.weight(k)))
        .collect();
    let b_hat: Vec<Vec<C64>> = pairs
        .par_iter()
        .map(|&(i, j)| spectrum(&|k| b.at(k)[(i, j)]))
        .collect();

    let scale = 1.0 / (len as f64 * 2.0 * std::f64::consts::PI);
    let outputs: Vec<Vec<C64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut buf: Vec<C64> = match product {
                Product::Elementwise => {
                    let idx = i * dim + j;
                    a_hat[idx]
                        .iter()
                        .zip(&b_hat[idx])
                        .map(|(x, y)| x * y)
                        .collect()
                }
                Product::Matrix => {
                    let mut acc = vec![C64::new(0.0, 0.0); len];
                    for r in 0..dim {
                        let x = &a_hat[i * dim + r];
                        let y = &b_hat[r * dim + j];
                        for ((s, xv), yv) in acc.iter_mut().zip(x).zip(y) {
                            *s += xv * yv;
                        }
                    }
                    acc
                }
            };
            fft.inverse.process(&mut buf);
            buf[c..c + n].iter().map(|z| z * scale).collect()
        })
        .collect();

    (0..n)
        .map(|k| CMatrix::from_fn(dim, dim, |i, j| outputs[i * dim + j][k]))
        .collect()
}
