//! Homogeneous Sobolev and Gevrey norms, a Littlewood–Paley bank with the
//! matching Triebel–Lizorkin norm, the analyticity radius of a spectrum, and
//! the Kato–Ponce ratio.
//!
//! Norms at `p = 2` are exact Plancherel sums. Every other `p` is a Riemann
//! sum over the physical samples, which is only as accurate as the grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{forward_transform, Grid, SpectralField};

/// Natural-log ceiling for Gevrey weights.
pub const GEVREY_EXPONENT_LIMIT: f64 = 700.0;

/// Relative size of `û(0)` that still counts as mean zero.
const MEAN_ZERO_TOLERANCE: f64 = 1e-12;

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "Lebesgue exponent must be >= 1, got {p}"
        )))
    }
}

fn check_mean_zero(field: &SpectralField, beta: f64) -> Result<()> {
    if beta < 0.0 {
        let mean = field.mean().norm();
        if mean > MEAN_ZERO_TOLERANCE * field.max_abs() {
            return Err(Error::Precondition(format!(
                "negative order {beta} needs a mean-zero field, but |û(0)| = {mean:e}"
            )));
        }
    }
    Ok(())
}

/// `|k|^β` with `|0|^0 = 1` and `|0|^β = 0` otherwise.
fn radial_power(k: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else if k == 0.0 {
        0.0
    } else {
        k.powf(beta)
    }
}

/// Discrete `L^p` norm of physical samples; `p = ∞` is the maximum.
pub fn lebesgue_norm(samples: &[f64], grid: &Grid, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if samples.len() != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: grid.len(),
            actual: samples.len(),
        });
    }
    if p.is_infinite() {
        return Ok(samples.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let dv = grid.cell_volume();
    if p == 2.0 {
        return Ok((dv * samples.iter().map(|v| v * v).sum::<f64>()).sqrt());
    }
    // Scale by the maximum so large p cannot overflow.
    let top = samples.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = samples.iter().map(|v| (v.abs() / top).powf(p)).sum();
    Ok(top * (dv * s).powf(1.0 / p))
}

/// `‖Λ^β f‖_{L^p}`.
pub fn sobolev_norm(field: &SpectralField, beta: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    check_mean_zero(field, beta)?;
    let grid = *field.grid();
    if p == 2.0 {
        let s: f64 = field
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| radial_power(grid.wavenumber(i), 2.0 * beta) * c.norm_sqr())
            .sum();
        return Ok((grid.volume() * s).sqrt());
    }
    let weighted = map_modes(field, |i| radial_power(grid.wavenumber(i), beta));
    lebesgue_norm(&weighted.to_physical()?, &grid, p)
}

fn map_modes(field: &SpectralField, weight: impl Fn(usize) -> f64) -> SpectralField {
    let mut out = field.clone();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c *= weight(i);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightNorm {
    /// `|k₁| + |k₂|`
    L1,
    Euclidean,
}

impl WeightNorm {
    pub fn apply(self, k: [f64; 2]) -> f64 {
        match self {
            WeightNorm::L1 => k[0].abs() + k[1].abs(),
            WeightNorm::Euclidean => k[0].hypot(k[1]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GevreyFlavor {
    /// `‖e^{c s^{1/κ} w(D)} Λ^β f‖_{L^p}`.
    Lp,
    /// `Σ_k e^{c s^{1/κ} w(k)} |k|^β |û(k)|`.
    FourierL1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevreyParams {
    pub s: f64,
    pub beta: f64,
    pub kappa: f64,
    pub p: f64,
    pub weight_constant: f64,
    pub weight_norm: WeightNorm,
    pub flavor: GevreyFlavor,
}

impl GevreyParams {
    /// `L^p` flavor with `c = 1/2` and the Euclidean weight.
    pub fn new(s: f64, beta: f64, kappa: f64, p: f64) -> Self {
        Self {
            s,
            beta,
            kappa,
            p,
            weight_constant: 0.5,
            weight_norm: WeightNorm::Euclidean,
            flavor: GevreyFlavor::Lp,
        }
    }

    pub fn fourier_l1(s: f64, beta: f64, kappa: f64) -> Self {
        Self {
            p: 1.0,
            flavor: GevreyFlavor::FourierL1,
            ..Self::new(s, beta, kappa, 1.0)
        }
    }

    pub fn with_s(mut self, s: f64) -> Self {
        self.s = s;
        self
    }

    pub fn with_weight(mut self, constant: f64, norm: WeightNorm) -> Self {
        self.weight_constant = constant;
        self.weight_norm = norm;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Gevrey parameter s must be >= 0, got {}",
                self.s
            )));
        }
        if !(self.kappa >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Gevrey kappa must be >= 1, got {}",
                self.kappa
            )));
        }
        if !(self.weight_constant > 0.0 && self.weight_constant <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "weight constant must lie in (0, 1], got {}",
                self.weight_constant
            )));
        }
        check_exponent(self.p)
    }

    /// `c s^{1/κ}`, the rate multiplying `w(k)` in the exponent.
    pub fn rate(&self) -> f64 {
        self.weight_constant * self.s.powf(1.0 / self.kappa)
    }
}

pub fn gevrey_norm(field: &SpectralField, gp: &GevreyParams) -> Result<f64> {
    gp.validate()?;
    check_mean_zero(field, gp.beta)?;
    let grid = *field.grid();
    let rate = gp.rate();
    let exponents: Vec<f64> = (0..grid.len())
        .map(|i| rate * gp.weight_norm.apply(grid.wavevector(i)))
        .collect();
    let top = exponents.iter().cloned().fold(0.0, f64::max);
    if top > GEVREY_EXPONENT_LIMIT {
        return Err(Error::GevreyOverflow {
            exponent: top,
            limit: GEVREY_EXPONENT_LIMIT,
        });
    }
    let power = |i: usize| radial_power(grid.wavenumber(i), gp.beta);
    let value = match gp.flavor {
        GevreyFlavor::FourierL1 => field
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| exponents[i].exp() * power(i) * c.norm())
            .sum(),
        GevreyFlavor::Lp if gp.p == 2.0 => {
            let s: f64 = field
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| (2.0 * exponents[i]).exp() * (power(i) * c.norm()).powi(2))
                .sum();
            (grid.volume() * s).sqrt()
        }
        GevreyFlavor::Lp => {
            let weighted = map_modes(field, |i| exponents[i].exp() * power(i));
            lebesgue_norm(&weighted.to_physical()?, &grid, gp.p)?
        }
    };
    if !value.is_finite() {
        return Err(Error::GevreyOverflow {
            exponent: top,
            limit: GEVREY_EXPONENT_LIMIT,
        });
    }
    Ok(value)
}

/// `t^{1/κ} ≤ s^{1/κ} + (t-s)^{1/κ}` for `0 ≤ s ≤ t`, `κ ≥ 1`; the
/// inequality that lets Gevrey weights split across a Duhamel integral.
pub fn gevrey_weight_subadditive(s: f64, t: f64, kappa: f64) -> bool {
    let r = 1.0 / kappa;
    t.powf(r) <= s.powf(r) + (t - s).powf(r) + 1e-14 * t.powf(r).max(1.0)
}

/// `C^∞` transition: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
fn smooth_step(x: f64) -> f64 {
    let h = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        h(x) / (h(x) + h(1.0 - x))
    }
}

/// Radial cutoff: 1 on `r ≤ 1`, 0 on `r ≥ 2`.
fn low_pass(r: f64) -> f64 {
    1.0 - smooth_step(r - 1.0)
}

/// Annular bump `φ(r) - φ(2r)`, supported in `[1/2, 2]` with peak 1 at `r = 1`.
pub fn dyadic_bump(r: f64) -> f64 {
    low_pass(r) - low_pass(2.0 * r)
}

/// Dyadic filters `ψ_j(k) = ψ(2^{-j}|k|)` for `j_min ≤ j ≤ j_max` together with
/// the low-frequency cutoff `χ`, normalized so that they sum to one on every mode.
#[derive(Debug, Clone)]
pub struct LPBank {
    grid: Grid,
    j_min: i32,
    j_max: i32,
    block_filters: Vec<Vec<f64>>,
    low_filter: Vec<f64>,
}

impl LPBank {
    pub fn build(grid: &Grid) -> Self {
        let j_min = grid.fundamental().log2().floor() as i32;
        let j_max = grid.max_wavenumber().log2().ceil() as i32;
        let n = grid.len();
        let mut block_filters: Vec<Vec<f64>> = (j_min..=j_max)
            .map(|j| {
                let scale = 2f64.powi(-j);
                (0..n)
                    .map(|i| dyadic_bump(scale * grid.wavenumber(i)))
                    .collect()
            })
            .collect();
        let low_scale = 2f64.powi(1 - j_min);
        let mut low_filter: Vec<f64> = (0..n)
            .map(|i| low_pass(low_scale * grid.wavenumber(i)))
            .collect();
        for i in 0..n {
            let total: f64 = low_filter[i] + block_filters.iter().map(|f| f[i]).sum::<f64>();
            low_filter[i] /= total;
            for f in &mut block_filters {
                f[i] /= total;
            }
        }
        Self {
            grid: *grid,
            j_min,
            j_max,
            block_filters,
            low_filter,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn filter(&self, j: i32) -> Result<&[f64]> {
        if j < self.j_min || j > self.j_max {
            return Err(Error::BlockOutOfRange {
                j,
                min: self.j_min,
                max: self.j_max,
            });
        }
        Ok(&self.block_filters[(j - self.j_min) as usize])
    }

    pub fn low_filter(&self) -> &[f64] {
        &self.low_filter
    }

    fn check(&self, field: &SpectralField) -> Result<()> {
        if *field.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

fn filtered(field: &SpectralField, filter: &[f64]) -> SpectralField {
    map_modes(field, |i| filter[i])
}

/// `Δ_j f`.
pub fn lp_block(field: &SpectralField, bank: &LPBank, j: i32) -> Result<SpectralField> {
    bank.check(field)?;
    Ok(filtered(field, bank.filter(j)?))
}

/// `S_{j_min} f`, the part of `f` below the first dyadic block.
pub fn lp_low_block(field: &SpectralField, bank: &LPBank) -> Result<SpectralField> {
    bank.check(field)?;
    Ok(filtered(field, &bank.low_filter))
}

pub fn triebel_lizorkin_norm(
    field: &SpectralField,
    alpha: f64,
    p: f64,
    bank: &LPBank,
) -> Result<f64> {
    check_exponent(p)?;
    check_mean_zero(field, alpha)?;
    bank.check(field)?;
    let mut square = vec![0.0; field.grid().len()];
    for j in bank.j_min..=bank.j_max {
        let weight = 2f64.powf(2.0 * j as f64 * alpha);
        let block = lp_block(field, bank, j)?.to_physical()?;
        for (acc, v) in square.iter_mut().zip(&block) {
            *acc += weight * v * v;
        }
    }
    let root: Vec<f64> = square.into_iter().map(f64::sqrt).collect();
    lebesgue_norm(&root, field.grid(), p)
}

/// `Σ_j (2^j/|k|)^{2α} ψ_j(k)²` for the mode `flat`: the squared ratio of the
/// `p = 2` Triebel–Lizorkin and Sobolev norms on that single mode.
pub fn tl_mode_calibration(bank: &LPBank, flat: usize, alpha: f64) -> f64 {
    let k = bank.grid.wavenumber(flat);
    (bank.j_min..=bank.j_max)
        .map(|j| {
            let psi = bank.block_filters[(j - bank.j_min) as usize][flat];
            (2f64.powi(j) / k).powf(2.0 * alpha) * psi * psi
        })
        .sum()
}

/// Bony decomposition `uv = T_u v + T_v u + R(u, v)` as physical samples.
#[derive(Debug, Clone)]
pub struct BonyDecomposition {
    pub paraproduct_uv: Vec<f64>,
    pub paraproduct_vu: Vec<f64>,
    pub remainder: Vec<f64>,
}

impl BonyDecomposition {
    pub fn reconstruct(&self) -> Vec<f64> {
        self.paraproduct_uv
            .iter()
            .zip(&self.paraproduct_vu)
            .zip(&self.remainder)
            .map(|((a, b), c)| a + b + c)
            .collect()
    }
}

/// Splits `uv` using the bank's blocks, with `S_{j_min}` acting as block `j_min - 1`.
/// `T_u v = Σ_j S_{j-1}u Δ_j v` and `R` collects the pairs with `|j - j'| ≤ 1`.
pub fn bony_decomposition(
    u: &SpectralField,
    v: &SpectralField,
    bank: &LPBank,
) -> Result<BonyDecomposition> {
    bank.check(u)?;
    bank.check(v)?;
    let blocks = |f: &SpectralField| -> Result<Vec<Vec<f64>>> {
        let mut out = vec![lp_low_block(f, bank)?.to_physical()?];
        for j in bank.j_min..=bank.j_max {
            out.push(lp_block(f, bank, j)?.to_physical()?);
        }
        Ok(out)
    };
    let (bu, bv) = (blocks(u)?, blocks(v)?);
    let n = u.grid().len();
    let mut dec = BonyDecomposition {
        paraproduct_uv: vec![0.0; n],
        paraproduct_vu: vec![0.0; n],
        remainder: vec![0.0; n],
    };
    let mut partial_u = vec![0.0; n];
    let mut partial_v = vec![0.0; n];
    for i in 0..bu.len() {
        // partial_* holds the sum of blocks 0..i-2 at this point.
        if i >= 2 {
            for x in 0..n {
                partial_u[x] += bu[i - 2][x];
                partial_v[x] += bv[i - 2][x];
            }
        }
        for x in 0..n {
            dec.paraproduct_uv[x] += partial_u[x] * bv[i][x];
            dec.paraproduct_vu[x] += partial_v[x] * bu[i][x];
        }
        for near in &bv[i.saturating_sub(1)..(i + 2).min(bv.len())] {
            for x in 0..n {
                dec.remainder[x] += bu[i][x] * near[x];
            }
        }
    }
    Ok(dec)
}

/// Decay rate `ρ` in `|û(k)| ≈ C e^{-ρ|k|}`.
///
/// Modes are grouped in unit-width shells of `|k|`; each shell contributes its
/// largest coefficient at the `|k|` where it occurs. Shells whose maximum is
/// at most `noise_floor` times the largest shell maximum are discarded and
/// `log M` is fitted linearly against `|k|` over the rest.
pub fn analyticity_radius(field: &SpectralField, noise_floor: f64) -> Result<f64> {
    let points = shell_maxima(field);
    fit_shell_decay(&points, noise_floor)
}

/// `(|k|, max |û|)` per unit shell, ordered by shell, skipping `k = 0`.
pub fn shell_maxima(field: &SpectralField) -> Vec<(f64, f64)> {
    let grid = field.grid();
    let shells = grid.max_wavenumber().round() as usize + 2;
    let mut best: Vec<Option<(f64, f64)>> = vec![None; shells];
    for (i, c) in field.coeffs().iter().enumerate() {
        let k = grid.wavenumber(i);
        if k == 0.0 {
            continue;
        }
        let shell = k.round() as usize;
        let a = c.norm();
        match best[shell] {
            Some((_, m)) if m >= a => {}
            _ => best[shell] = Some((k, a)),
        }
    }
    best.into_iter().flatten().collect()
}

fn fit_shell_decay(points: &[(f64, f64)], noise_floor: f64) -> Result<f64> {
    let top = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > noise_floor * top && p.1 > 0.0)
        .map(|&(k, m)| (k, m.ln()))
        .collect();
    if usable.len() < 4 {
        return Err(Error::InsufficientShells {
            required: 4,
            found: usable.len(),
        });
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((-sxy / sxx).max(0.0))
}

fn physical_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_grid(g)?;
    let a = f.to_physical()?;
    let b = g.to_physical()?;
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    forward_transform(&prod, f.grid())
}

fn reciprocal(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// `‖Λ^s(fg)‖_p / (‖Λ^s f‖_{p₁}‖g‖_{q₁} + ‖f‖_{p₂}‖Λ^s g‖_{q₂})`.
///
/// The product is taken pointwise without truncation, so inputs should be
/// band-limited to half the grid band to avoid aliasing.
#[allow(clippy::too_many_arguments)]
pub fn kato_ponce_ratio(
    f: &SpectralField,
    g: &SpectralField,
    s: f64,
    p: f64,
    p1: f64,
    q1: f64,
    p2: f64,
    q2: f64,
) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "order s must be >= 0, got {s}"
        )));
    }
    for (a, b) in [(p1, q1), (p2, q2)] {
        if (reciprocal(p) - reciprocal(a) - reciprocal(b)).abs() > 1e-12 {
            return Err(Error::HolderMismatch { p, a, b });
        }
    }
    let numerator = sobolev_norm(&physical_product(f, g)?, s, p)?;
    let denominator = sobolev_norm(f, s, p1)? * sobolev_norm(g, 0.0, q1)?
        + sobolev_norm(f, 0.0, p2)? * sobolev_norm(g, s, q2)?;
    if denominator == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(numerator / denominator)
}

/// `‖fg‖ / (‖f‖‖g‖)` in the given Gevrey norm, with the product taken pointwise.
pub fn gevrey_algebra_ratio(
    f: &SpectralField,
    g: &SpectralField,
    gp: &GevreyParams,
) -> Result<f64> {
    let numerator = gevrey_norm(&physical_product(f, g)?, gp)?;
    let denominator = gevrey_norm(f, gp)? * gevrey_norm(g, gp)?;
    if denominator == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(numerator / denominator)
}

/// `û(k) = amplitude · e^{-a|k|}` with zero mean; exactly analytic with radius `a`.
pub fn exponential_spectrum(grid: Grid, a: f64, amplitude: f64) -> SpectralField {
    let k0 = grid.fundamental();
    SpectralField::from_fn(grid, |m| {
        let k = k0 * (m[0] as f64).hypot(m[1] as f64);
        if k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(amplitude * (-a * k).exp(), 0.0)
        }
    })
}
