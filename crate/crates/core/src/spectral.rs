//! Periodic grids with normalized discrete Fourier transforms, plus Fourier multipliers.
//!
//! Coefficients are stored for the full complex spectrum in row-major order
//! (axis 0 outermost). The transform is normalized so that
//!
//! ```text
//! û(k) = N^{-d} Σ_x f(x) e^{-i k·x}
//! ```
//!
//! which makes `û(0)` the mean of `f` and `cos(2πx/L)` map to `1/2` on the
//! `±1` modes. Wavenumbers are physical, `k = (2π/L)·m` with integer
//! `m ∈ {-N/2+1, …, N/2}`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};

/// Relative tolerance for Hermitian symmetry and imaginary residue checks.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// The 2/3 rule used for quadratic products.
pub const TWO_THIRDS: f64 = 2.0 / 3.0;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// A uniform periodic grid on `[0, L)^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    points: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be a power of two >= 8, got {points}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Self {
            dim,
            points,
            length,
        })
    }

    /// `[0, 2π)^dim` with `points` per axis.
    pub fn periodic_2pi(dim: usize, points: usize) -> Result<Self> {
        Self::new(dim, points, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of grid points (and of Fourier modes).
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// `L^d`; Parseval reads `Σ f² dV = L^d Σ |û|²`.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Lowest nonzero wavenumber `2π/L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Signed integer frequency for an axis index.
    pub fn frequency(&self, index: usize) -> i64 {
        let n = self.points as i64;
        let j = index as i64;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Integer frequencies of a flat index; unused axes are zero.
    pub fn frequencies(&self, flat: usize) -> [i64; 2] {
        match self.dim {
            1 => [self.frequency(flat), 0],
            _ => [
                self.frequency(flat / self.points),
                self.frequency(flat % self.points),
            ],
        }
    }

    /// Physical wavevector of a flat index; unused axes are zero.
    pub fn wavevector(&self, flat: usize) -> [f64; 2] {
        let m = self.frequencies(flat);
        let k0 = self.fundamental();
        [k0 * m[0] as f64, k0 * m[1] as f64]
    }

    pub fn wavenumber(&self, flat: usize) -> f64 {
        let k = self.wavevector(flat);
        k[0].hypot(k[1])
    }

    /// Flat index of `-k`.
    pub fn mirror(&self, flat: usize) -> usize {
        let n = self.points;
        match self.dim {
            1 => (n - flat) % n,
            _ => {
                let (i0, i1) = (flat / n, flat % n);
                ((n - i0) % n) * n + (n - i1) % n
            }
        }
    }

    /// Wavenumber of the Nyquist frequency `N/2` on one axis.
    pub fn nyquist_wavenumber(&self) -> f64 {
        self.fundamental() * (self.points / 2) as f64
    }

    /// Largest Euclidean `|k|` represented on the grid.
    pub fn max_wavenumber(&self) -> f64 {
        self.nyquist_wavenumber() * (self.dim as f64).sqrt()
    }

    /// Physical coordinates of a flat index.
    pub fn coordinates(&self, flat: usize) -> [f64; 2] {
        let h = self.spacing();
        match self.dim {
            1 => [h * flat as f64, 0.0],
            _ => [
                h * (flat / self.points) as f64,
                h * (flat % self.points) as f64,
            ],
        }
    }

    /// Samples `f` at every grid point.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let x = self.coordinates(i);
                f(&x[..self.dim])
            })
            .collect()
    }
}

/// Fourier coefficients of a real field on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    /// Builds a field from a per-mode function of the integer frequencies.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([i64; 2]) -> Complex64) -> Self {
        let coeffs = (0..grid.len()).map(|i| f(grid.frequencies(i))).collect();
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at integer frequencies `m` (negative values wrap).
    pub fn mode(&self, m: [i64; 2]) -> Complex64 {
        self.coeffs[self.flat_index(m)]
    }

    pub fn set_mode(&mut self, m: [i64; 2], value: Complex64) {
        let i = self.flat_index(m);
        self.coeffs[i] = value;
    }

    fn flat_index(&self, m: [i64; 2]) -> usize {
        let n = self.grid.points as i64;
        let wrap = |v: i64| v.rem_euclid(n) as usize;
        match self.grid.dim {
            1 => wrap(m[0]),
            _ => wrap(m[0]) * self.grid.points + wrap(m[1]),
        }
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ |û(k)|`, an upper bound for the sup norm of the physical field.
    pub fn wiener_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn has_nan(&self) -> bool {
        self.coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
    }

    /// Largest `|û(k) - conj(û(-k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[i] - self.coeffs[self.grid.mirror(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Projects onto Hermitian-symmetric coefficients; self-paired modes become real.
    pub fn symmetrize(&mut self) {
        let src = self.coeffs.clone();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c = 0.5 * (src[i] + src[self.grid.mirror(i)].conj());
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for c in &mut self.coeffs {
            *c *= factor;
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale(factor);
        self
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &SpectralField) -> Result<()> {
        self.check_grid(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `L^d Σ |û|²`, the squared L² norm of the physical field.
    pub fn l2_norm_squared(&self) -> f64 {
        self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_squared().sqrt()
    }

    /// L² distance between two fields on the same grid.
    pub fn l2_distance(&self, other: &SpectralField) -> Result<f64> {
        self.check_grid(other)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((self.grid.volume() * s).sqrt())
    }

    /// Physical samples; see [`inverse_transform`].
    pub fn to_physical(&self) -> Result<Vec<f64>> {
        inverse_transform(self)
    }
}

/// Normalized forward transform of real samples.
pub fn forward_transform(values: &[f64], grid: &Grid) -> Result<SpectralField> {
    if values.len() != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            actual: values.len(),
        });
    }
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(grid, &mut data, FftDirection::Forward);
    let norm = 1.0 / grid.len() as f64;
    for c in &mut data {
        *c *= norm;
    }
    Ok(SpectralField {
        grid: *grid,
        coeffs: data,
    })
}

/// Inverse transform to real samples.
///
/// Fails if the coefficients are not Hermitian-symmetric to within
/// [`SYMMETRY_TOLERANCE`] relative to the largest coefficient.
pub fn inverse_transform(field: &SpectralField) -> Result<Vec<f64>> {
    let scale = field.max_abs();
    let tolerance = SYMMETRY_TOLERANCE * scale.max(f64::MIN_POSITIVE);
    let defect = field.hermitian_defect();
    if defect > tolerance || defect.is_nan() {
        return Err(Error::SymmetryViolation { defect, tolerance });
    }
    let mut data = field.coeffs.clone();
    fft_in_place(&field.grid, &mut data, FftDirection::Inverse);
    let peak = data.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let residue = data.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let residue_tol = SYMMETRY_TOLERANCE * peak.max(f64::MIN_POSITIVE);
    if residue > residue_tol {
        return Err(Error::SymmetryViolation {
            defect: residue,
            tolerance: residue_tol,
        });
    }
    Ok(data.into_iter().map(|c| c.re).collect())
}

fn fft_in_place(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.points;
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // Rows (or the whole 1D signal): the buffer is processed in chunks of n.
    fft.process_with_scratch(data, &mut scratch);
    if grid.dim == 2 {
        let mut t = transpose(data, n);
        fft.process_with_scratch(&mut t, &mut scratch);
        let back = transpose(&t, n);
        data.copy_from_slice(&back);
    }
}

fn transpose(data: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = data[i * n + j];
        }
    }
    out
}

type SymbolFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// A Fourier multiplier `m(k)` together with its homogeneity order and the
/// constant `C` in `|m(k)| <= C |k|^order`.
#[derive(Clone)]
pub struct MultiplierSymbol {
    evaluator: Arc<SymbolFn>,
    order: f64,
    bound: f64,
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSymbol")
            .field("order", &self.order)
            .field("bound", &self.bound)
            .finish_non_exhaustive()
    }
}

impl MultiplierSymbol {
    pub fn new(
        order: f64,
        bound: f64,
        evaluator: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            evaluator: Arc::new(evaluator),
            order,
            bound,
        }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 1.0, |_| Complex64::new(1.0, 0.0))
    }

    pub fn eval(&self, k: &[f64]) -> Complex64 {
        (self.evaluator)(k)
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Pointwise product of two symbols (composition of the operators).
    pub fn compose(&self, other: &MultiplierSymbol) -> MultiplierSymbol {
        let (a, b) = (self.evaluator.clone(), other.evaluator.clone());
        MultiplierSymbol {
            evaluator: Arc::new(move |k| a(k) * b(k)),
            order: self.order + other.order,
            bound: self.bound * other.bound,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> MultiplierSymbol {
        let a = self.evaluator.clone();
        MultiplierSymbol {
            evaluator: Arc::new(move |k| factor * a(k)),
            order: self.order,
            bound: self.bound * factor.norm(),
        }
    }

    /// Values on every mode of `grid`, in coefficient order.
    pub fn tabulate(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        (0..grid.len())
            .map(|i| {
                let k = grid.wavevector(i);
                let k = &k[..grid.dim()];
                let v = self.eval(k);
                if v.re.is_nan() || v.im.is_nan() {
                    Err(Error::NanSymbol(k.to_vec()))
                } else {
                    Ok(v)
                }
            })
            .collect()
    }
}

fn euclidean(k: &[f64]) -> f64 {
    k.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Coefficient-wise product `û(k)·m(k)`.
pub fn apply_multiplier(field: &SpectralField, symbol: &MultiplierSymbol) -> Result<SpectralField> {
    let table = symbol.tabulate(&field.grid)?;
    Ok(apply_table(field, &table))
}

/// Coefficient-wise product with a pre-tabulated symbol.
pub fn apply_table(field: &SpectralField, table: &[Complex64]) -> SpectralField {
    debug_assert_eq!(table.len(), field.coeffs.len());
    SpectralField {
        grid: field.grid,
        coeffs: field.coeffs.iter().zip(table).map(|(c, m)| c * m).collect(),
    }
}

/// `|k|^β`. At `k = 0` the value is 1 when `β = 0` (`|0|^0 = 1`) and 0 otherwise,
/// so negative powers act on the mean-zero subspace.
pub fn power_symbol(beta: f64) -> MultiplierSymbol {
    MultiplierSymbol::new(beta, 1.0, move |k| {
        let r = euclidean(k);
        let v = if beta == 0.0 {
            1.0
        } else if r == 0.0 {
            0.0
        } else {
            r.powf(beta)
        };
        Complex64::new(v, 0.0)
    })
}

/// Symbol `|k|^κ` of `Λ^κ`.
pub fn fractional_laplacian_symbol(kappa: f64) -> Result<MultiplierSymbol> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    Ok(power_symbol(kappa))
}

/// Symbol `exp(-t|k|^κ)` of the semigroup `e^{-tΛ^κ}`.
pub fn semigroup_multiplier(t: f64, kappa: f64) -> Result<MultiplierSymbol> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time must be non-negative, got {t}"
        )));
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    Ok(MultiplierSymbol::new(0.0, 1.0, move |k| {
        Complex64::new((-t * euclidean(k).powf(kappa)).exp(), 0.0)
    }))
}

fn at_nyquist(component: f64, nyquist: f64) -> bool {
    (component.abs() - nyquist).abs() <= 1e-9 * nyquist
}

/// Symbol `i k_axis` of `∂_axis`. The Nyquist frequency has no Hermitian
/// partner, so the odd symbol is zero there.
pub fn derivative_symbol(grid: &Grid, axis: usize) -> Result<MultiplierSymbol> {
    if axis >= grid.dim() {
        return Err(Error::InvalidParameter(format!(
            "axis {axis} out of range for a {}-dimensional grid",
            grid.dim()
        )));
    }
    let nyquist = grid.nyquist_wavenumber();
    Ok(MultiplierSymbol::new(1.0, 1.0, move |k| {
        if at_nyquist(k[axis], nyquist) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, k[axis])
        }
    }))
}

/// The velocity symbols `(-i k₂/|k|, i k₁/|k|)` of `u = (-R₂η, R₁η)`.
///
/// Both vanish at `k = 0`, and each vanishes where its odd component sits at
/// the Nyquist frequency.
pub fn riesz_vector_symbols(grid: &Grid) -> Result<[MultiplierSymbol; 2]> {
    if grid.dim() != 2 {
        return Err(Error::InvalidParameter(format!(
            "Riesz velocity needs a 2D grid, got dimension {}",
            grid.dim()
        )));
    }
    let nyquist = grid.nyquist_wavenumber();
    let first = MultiplierSymbol::new(0.0, 1.0, move |k| {
        let r = euclidean(k);
        if r == 0.0 || at_nyquist(k[1], nyquist) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -k[1] / r)
        }
    });
    let second = MultiplierSymbol::new(0.0, 1.0, move |k| {
        let r = euclidean(k);
        if r == 0.0 || at_nyquist(k[0], nyquist) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, k[0] / r)
        }
    });
    Ok([first, second])
}

/// Zeroes every mode with some `|m_axis| > rule·N/2`.
pub fn dealias(field: &SpectralField, rule: f64) -> Result<SpectralField> {
    let mut out = field.clone();
    dealias_in_place(&mut out, rule)?;
    Ok(out)
}

pub fn dealias_in_place(field: &mut SpectralField, rule: f64) -> Result<()> {
    if !(rule > 0.0 && rule <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "dealiasing rule must lie in (0, 1], got {rule}"
        )));
    }
    let cutoff = rule * (field.grid.points / 2) as f64;
    let grid = field.grid;
    for (i, c) in field.coeffs.iter_mut().enumerate() {
        let m = grid.frequencies(i);
        if m[0].unsigned_abs() as f64 > cutoff || m[1].unsigned_abs() as f64 > cutoff {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    Ok(())
}

/// Largest retained integer frequency under `rule`.
pub fn retained_frequency(grid: &Grid, rule: f64) -> i64 {
    (rule * (grid.points() / 2) as f64).floor() as i64
}

/// Pointwise product of two physical fields given as samples, returned as a
/// dealiased spectral field.
pub fn product_of_samples(a: &[f64], b: &[f64], grid: &Grid, rule: f64) -> Result<SpectralField> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mut out = forward_transform(&prod, grid)?;
    dealias_in_place(&mut out, rule)?;
    Ok(out)
}

/// Pseudo-spectral product of two fields followed by dealiasing.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField, rule: f64) -> Result<SpectralField> {
    a.check_grid(b)?;
    let pa = inverse_transform(a)?;
    let pb = inverse_transform(b)?;
    product_of_samples(&pa, &pb, &a.grid, rule)
}

/// Exact maximum of `x^α e^{-t x^κ}` over `x >= 0`, i.e.
/// `(α/(tκ))^{α/κ} e^{-α/κ}`; equal to 1 when `α = 0`.
pub fn smoothing_maximum(alpha: f64, t: f64, kappa: f64) -> f64 {
    if alpha == 0.0 {
        return 1.0;
    }
    let r = alpha / kappa;
    (alpha / (t * kappa)).powf(r) * (-r).exp()
}
