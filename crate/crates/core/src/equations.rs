//! Equation instances `u_t + ν Λ^κ u = G(u)` with `G(u) = T₀ F(T₁u, …, Tₙu)`,
//! critical exponents and admissibility of the operator orders.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    self, apply_table, derivative_symbol, forward_transform, inverse_transform, product_of_samples,
    riesz_vector_symbols, Grid, MultiplierSymbol, SpectralField, TWO_THIRDS,
};

/// The nonlinear term and its equation-specific coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    /// `G(u) = α |u|^{n-1} u`.
    FractionalHeat { coefficient: f64 },
    /// `G(u) = ∂ₓ(uⁿ)` in one dimension.
    Burgers,
    /// `G(η) = -∇·(uη)` with `u = (-R₂η, R₁η)`.
    Sqg,
    /// Vorticity form `G(ω) = -∇·(uω)`, `u = ∇^⊥Δ^{-1}ω`. Three-dimensional
    /// instances are only used for exponent arithmetic.
    NavierStokes,
    /// `G(u) = βΔ(u³)`.
    CahnHilliardCubic { beta: f64 },
    /// `G(u) = Δf(u)` with `f(u) = Σ_{j=1}^{2N-1} a_j u^j`; `coefficients[j-1] = a_j`.
    CahnHilliardGeneral { coefficients: Vec<f64> },
}

impl Nonlinearity {
    pub fn name(&self) -> &'static str {
        match self {
            Nonlinearity::FractionalHeat { .. } => "fractional_heat",
            Nonlinearity::Burgers => "burgers",
            Nonlinearity::Sqg => "sqg",
            Nonlinearity::NavierStokes => "navier_stokes",
            Nonlinearity::CahnHilliardCubic { .. } => "cahn_hilliard_cubic",
            Nonlinearity::CahnHilliardGeneral { .. } => "cahn_hilliard_general",
        }
    }

    /// True when `T₀` annihilates the zero mode, so the mean is conserved.
    pub fn preserves_mean(&self) -> bool {
        !matches!(self, Nonlinearity::FractionalHeat { .. })
    }
}

/// One instance of the dissipative equation class.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSpec {
    nonlinearity: Nonlinearity,
    kappa: f64,
    dim: usize,
    degree: usize,
    alpha_t: Vec<f64>,
    viscosity: f64,
    nonlinear_enabled: bool,
    dealias_rule: f64,
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (d={}, kappa={}, n={})",
            self.nonlinearity.name(),
            self.dim,
            self.kappa,
            self.degree
        )
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 1.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "kappa must exceed 1, got {kappa}"
        )));
    }
    Ok(())
}

fn zeros_with_outer(outer: f64, degree: usize) -> Vec<f64> {
    let mut a = vec![0.0; degree + 1];
    a[0] = outer;
    a
}

impl EquationSpec {
    fn build(
        nonlinearity: Nonlinearity,
        kappa: f64,
        dim: usize,
        degree: usize,
        outer_order: f64,
    ) -> Self {
        Self {
            nonlinearity,
            kappa,
            dim,
            degree,
            alpha_t: zeros_with_outer(outer_order, degree),
            viscosity: 1.0,
            nonlinear_enabled: true,
            dealias_rule: TWO_THIRDS,
        }
    }

    /// `u_t + Λ^κ u = α|u|^{n-1}u`.
    pub fn fractional_heat(
        dim: usize,
        kappa: f64,
        degree: usize,
        coefficient: f64,
    ) -> Result<Self> {
        check_kappa(kappa)?;
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "dimension must be 1..=3, got {dim}"
            )));
        }
        if degree < 2 {
            return Err(Error::InvalidParameter(format!(
                "degree must be >= 2, got {degree}"
            )));
        }
        Ok(Self::build(
            Nonlinearity::FractionalHeat { coefficient },
            kappa,
            dim,
            degree,
            0.0,
        ))
    }

    /// `u_t - u_xx = ∂ₓ(uⁿ)` on the line.
    pub fn burgers(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidParameter(format!(
                "degree must be >= 2, got {degree}"
            )));
        }
        Ok(Self::build(Nonlinearity::Burgers, 2.0, 1, degree, 1.0))
    }

    /// Subcritical SQG, `κ ∈ (1, 2]`.
    pub fn sqg(kappa: f64) -> Result<Self> {
        if !(kappa > 1.0 && kappa <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "SQG needs kappa in (1, 2], got {kappa}"
            )));
        }
        Ok(Self::build(Nonlinearity::Sqg, kappa, 2, 2, 1.0))
    }

    /// Navier–Stokes with `T₀ = ∇·`; `dim = 2` is simulated in vorticity form.
    pub fn navier_stokes(dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidParameter(format!(
                "Navier-Stokes needs dimension 2 or 3, got {dim}"
            )));
        }
        Ok(Self::build(Nonlinearity::NavierStokes, 2.0, dim, 2, 1.0))
    }

    /// `u_t = -Δ²u + βΔ(u³)`.
    pub fn cahn_hilliard_cubic(dim: usize, beta: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "dimension must be 1..=3, got {dim}"
            )));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(Self::build(
            Nonlinearity::CahnHilliardCubic { beta },
            4.0,
            dim,
            3,
            2.0,
        ))
    }

    /// `u_t = -Δ²u + Δf(u)`, `f(u) = Σ_{j=1}^{2N-1} a_j u^j` with `a_{2N-1} > 0`.
    pub fn cahn_hilliard_general(dim: usize, coefficients: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "dimension must be 1..=3, got {dim}"
            )));
        }
        let degree = coefficients.len();
        if degree < 3 || degree.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "need coefficients a_1..a_(2N-1) with N >= 2, got {degree}"
            )));
        }
        if !(coefficients[degree - 1] > 0.0) {
            return Err(Error::InvalidParameter(
                "leading coefficient a_(2N-1) must be positive".into(),
            ));
        }
        Ok(Self::build(
            Nonlinearity::CahnHilliardGeneral { coefficients },
            4.0,
            dim,
            degree,
            2.0,
        ))
    }

    /// Replaces the operator orders `α_{T₀}, …, α_{Tₙ}` (exponent arithmetic only).
    pub fn with_alpha_t(mut self, alpha_t: Vec<f64>) -> Result<Self> {
        if alpha_t.len() != self.degree + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} operator orders, got {}",
                self.degree + 1,
                alpha_t.len()
            )));
        }
        if alpha_t.iter().any(|a| !(*a >= 0.0)) {
            return Err(Error::InvalidParameter(
                "operator orders must be >= 0".into(),
            ));
        }
        self.alpha_t = alpha_t;
        Ok(self)
    }

    /// Replaces `κ`. Values down to 1 are accepted so boundary cases can be
    /// evaluated by the exponent calculator.
    pub fn with_kappa(mut self, kappa: f64) -> Result<Self> {
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be >= 1, got {kappa}"
            )));
        }
        self.kappa = kappa;
        Ok(self)
    }

    /// Coefficient `ν` in front of `Λ^κ`; zero gives pure transport.
    pub fn with_viscosity(mut self, viscosity: f64) -> Result<Self> {
        if !(viscosity >= 0.0 && viscosity.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "viscosity must be >= 0, got {viscosity}"
            )));
        }
        self.viscosity = viscosity;
        Ok(self)
    }

    /// Disables `G` (linear test mode).
    pub fn linear_only(mut self) -> Self {
        self.nonlinear_enabled = false;
        self
    }

    pub fn with_dealias_rule(mut self, rule: f64) -> Result<Self> {
        if !(rule > 0.0 && rule <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dealiasing rule must lie in (0, 1], got {rule}"
            )));
        }
        self.dealias_rule = rule;
        Ok(self)
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn name(&self) -> &'static str {
        self.nonlinearity.name()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn alpha_t(&self) -> &[f64] {
        &self.alpha_t
    }

    pub fn viscosity(&self) -> f64 {
        self.viscosity
    }

    pub fn nonlinear_enabled(&self) -> bool {
        self.nonlinear_enabled
    }

    pub fn dealias_rule(&self) -> f64 {
        self.dealias_rule
    }

    /// `Σ_{j=1}^{2N-2} j|a_j|`, the smallness quantity for the general
    /// Cahn–Hilliard nonlinearity. Reported, not enforced.
    pub fn lower_order_weight(&self) -> Option<f64> {
        match &self.nonlinearity {
            Nonlinearity::CahnHilliardGeneral { coefficients } => Some(
                coefficients[..coefficients.len() - 1]
                    .iter()
                    .enumerate()
                    .map(|(i, a)| (i + 1) as f64 * a.abs())
                    .sum(),
            ),
            _ => None,
        }
    }

    /// Whether the instance can be time-stepped on a periodic grid.
    pub fn is_simulable(&self) -> bool {
        self.dim <= 2
    }
}

/// Critical Sobolev index `β_c = d/p - (κ - Σα_{T_i})/(n - 1)`.
pub fn compute_beta_c(spec: &EquationSpec, p: f64) -> Result<f64> {
    if spec.degree < 2 {
        return Err(Error::InvalidParameter("degree must be >= 2".into()));
    }
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
    }
    let sum: f64 = spec.alpha_t.iter().sum();
    Ok(spec.dim as f64 / p - (spec.kappa - sum) / (spec.degree - 1) as f64)
}

/// Outcome of the operator-order conditions of the small-data theory.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// `Σ_{i=0}^n α_{T_i} <= κ`.
    pub condition_sum: bool,
    /// `min_{i>=1} α_{T_i}` exceeds [`Self::min_threshold`].
    pub condition_min: bool,
    /// `max{Σ_{i>=1} α_{T_i}/n - d/(np), (Σ_{i>=0} α_{T_i} - κ)/(n-1)}`.
    pub min_threshold: f64,
    pub beta_c: f64,
    /// Half-open interval `[β_c, min{d/p, d/p + min_{i>=1} α_{T_i}})` for `β₀`.
    pub beta0_range: (f64, f64),
    /// General Cahn–Hilliard only: `Σ_{j=1}^{2N-2} j|a_j|`.
    pub lower_order_weight: Option<f64>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.condition_sum && self.condition_min && self.beta0_range.0 < self.beta0_range.1
    }
}

pub fn check_admissibility(spec: &EquationSpec, p: f64) -> Result<AdmissibilityReport> {
    let beta_c = compute_beta_c(spec, p)?;
    let n = spec.degree as f64;
    let d = spec.dim as f64;
    let total: f64 = spec.alpha_t.iter().sum();
    let inner = &spec.alpha_t[1..];
    let inner_sum: f64 = inner.iter().sum();
    let inner_min = inner.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_threshold = (inner_sum / n - d / (n * p)).max((total - spec.kappa) / (n - 1.0));
    let upper = (d / p).min(d / p + inner_min);
    Ok(AdmissibilityReport {
        condition_sum: total <= spec.kappa,
        condition_min: inner_min > min_threshold,
        min_threshold,
        beta_c,
        beta0_range: (beta_c, upper),
        lower_order_weight: spec.lower_order_weight(),
    })
}

/// Algebraic decay rate `(ζ - β_c)/κ` of `‖Λ^ζ u(t)‖_{L^p}`.
pub fn predicted_decay_exponent(spec: &EquationSpec, zeta: f64, p: f64) -> Result<f64> {
    let beta_c = compute_beta_c(spec, p)?;
    if !(zeta > beta_c) {
        return Err(Error::Precondition(format!(
            "zeta = {zeta} must exceed beta_c = {beta_c}"
        )));
    }
    Ok((zeta - beta_c) / spec.kappa)
}

enum Structure {
    /// `outer · F(u)`; `outer = None` means the identity.
    Scalar { outer: Option<Vec<Complex64>> },
    /// `-∇·(v θ)` with velocity tables `v_j(k)` applied to `θ`.
    Advection {
        velocity: [Vec<Complex64>; 2],
        divergence: [Vec<Complex64>; 2],
    },
}

/// `G` tabulated on a fixed grid.
pub struct NonlinearOperator {
    spec: EquationSpec,
    grid: Grid,
    structure: Structure,
}

fn laplacian_table(grid: &Grid, factor: f64) -> Vec<Complex64> {
    (0..grid.len())
        .map(|i| {
            let k = grid.wavenumber(i);
            Complex64::new(-factor * k * k, 0.0)
        })
        .collect()
}

fn biot_savart_symbols(grid: &Grid) -> [MultiplierSymbol; 2] {
    // ψ̂ = -ω̂/|k|², u = (-∂₂ψ, ∂₁ψ)
    let nyquist = grid.nyquist_wavenumber();
    let at_nyq = move |c: f64| (c.abs() - nyquist).abs() <= 1e-9 * nyquist;
    let first = MultiplierSymbol::new(-1.0, 1.0, move |k| {
        let r2 = k[0] * k[0] + k[1] * k[1];
        if r2 == 0.0 || at_nyq(k[1]) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, k[1] / r2)
        }
    });
    let second = MultiplierSymbol::new(-1.0, 1.0, move |k| {
        let r2 = k[0] * k[0] + k[1] * k[1];
        if r2 == 0.0 || at_nyq(k[0]) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -k[0] / r2)
        }
    });
    [first, second]
}

impl NonlinearOperator {
    pub fn new(spec: &EquationSpec, grid: &Grid) -> Result<Self> {
        if !spec.is_simulable() {
            return Err(Error::InvalidParameter(format!(
                "{spec} is not simulable on a periodic grid"
            )));
        }
        if grid.dim() != spec.dim {
            return Err(Error::InvalidParameter(format!(
                "grid dimension {} does not match equation dimension {}",
                grid.dim(),
                spec.dim
            )));
        }
        let structure = match &spec.nonlinearity {
            Nonlinearity::FractionalHeat { .. } => Structure::Scalar { outer: None },
            Nonlinearity::Burgers => Structure::Scalar {
                outer: Some(derivative_symbol(grid, 0)?.tabulate(grid)?),
            },
            Nonlinearity::CahnHilliardCubic { beta } => Structure::Scalar {
                outer: Some(laplacian_table(grid, *beta)),
            },
            Nonlinearity::CahnHilliardGeneral { .. } => Structure::Scalar {
                outer: Some(laplacian_table(grid, 1.0)),
            },
            Nonlinearity::Sqg | Nonlinearity::NavierStokes => {
                let [v0, v1] = if matches!(spec.nonlinearity, Nonlinearity::Sqg) {
                    riesz_vector_symbols(grid)?
                } else {
                    biot_savart_symbols(grid)
                };
                let minus = Complex64::new(-1.0, 0.0);
                Structure::Advection {
                    velocity: [v0.tabulate(grid)?, v1.tabulate(grid)?],
                    divergence: [
                        derivative_symbol(grid, 0)?.scaled(minus).tabulate(grid)?,
                        derivative_symbol(grid, 1)?.scaled(minus).tabulate(grid)?,
                    ],
                }
            }
        };
        Ok(Self {
            spec: spec.clone(),
            grid: *grid,
            structure,
        })
    }

    pub fn spec(&self) -> &EquationSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Fourier coefficients of `G(u)`.
    pub fn evaluate(&self, field: &SpectralField) -> Result<SpectralField> {
        if *field.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        if !self.spec.nonlinear_enabled {
            return Ok(SpectralField::zeros(self.grid));
        }
        let rule = self.spec.dealias_rule;
        let out = match (&self.structure, &self.spec.nonlinearity) {
            (Structure::Scalar { outer }, nl) => {
                let inner = match nl {
                    Nonlinearity::FractionalHeat { coefficient } => {
                        if *coefficient == 0.0 {
                            return Ok(SpectralField::zeros(self.grid));
                        }
                        self.signed_power(field, self.spec.degree)?
                            .scaled(*coefficient)
                    }
                    Nonlinearity::Burgers | Nonlinearity::CahnHilliardCubic { .. } => self
                        .powers(field, self.spec.degree)?
                        .pop()
                        .expect("degree >= 2"),
                    Nonlinearity::CahnHilliardGeneral { coefficients } => {
                        let powers = self.powers(field, coefficients.len())?;
                        let mut acc = SpectralField::zeros(self.grid);
                        for (a, p) in coefficients.iter().zip(&powers) {
                            if *a != 0.0 {
                                acc.axpy(*a, p)?;
                            }
                        }
                        acc
                    }
                    Nonlinearity::Sqg | Nonlinearity::NavierStokes => unreachable!(),
                };
                match outer {
                    Some(table) => apply_table(&inner, table),
                    None => inner,
                }
            }
            (
                Structure::Advection {
                    velocity,
                    divergence,
                },
                _,
            ) => {
                let theta = inverse_transform(field)?;
                let mut acc = SpectralField::zeros(self.grid);
                for axis in 0..2 {
                    let v = inverse_transform(&apply_table(field, &velocity[axis]))?;
                    let flux = product_of_samples(&v, &theta, &self.grid, rule)?;
                    let div = apply_table(&flux, &divergence[axis]);
                    acc.axpy(1.0, &div)?;
                }
                acc
            }
        };
        if out.has_nan() {
            return Err(Error::BlowUp {
                time: f64::NAN,
                reason: format!("non-finite value in {} nonlinearity", self.spec.name()),
            });
        }
        Ok(out)
    }

    /// `u, u², …, u^n`, each higher power formed by one dealiased binary product.
    fn powers(&self, field: &SpectralField, n: usize) -> Result<Vec<SpectralField>> {
        let rule = self.spec.dealias_rule;
        let base = inverse_transform(field)?;
        let mut out = vec![field.clone()];
        let mut current = base.clone();
        for _ in 1..n {
            let next = product_of_samples(&current, &base, &self.grid, rule)?;
            current = inverse_transform(&next)?;
            out.push(next);
        }
        Ok(out)
    }

    /// `|u|^{n-1}u`. Odd degrees reduce to `uⁿ`; even degrees are formed
    /// pointwise, where dealiasing is only approximate.
    fn signed_power(&self, field: &SpectralField, n: usize) -> Result<SpectralField> {
        if n % 2 == 1 {
            return Ok(self.powers(field, n)?.pop().expect("n >= 1"));
        }
        let u = inverse_transform(field)?;
        let values: Vec<f64> = u.iter().map(|v| v.abs().powi(n as i32 - 1) * v).collect();
        let mut out = forward_transform(&values, &self.grid)?;
        spectral::dealias_in_place(&mut out, self.spec.dealias_rule)?;
        Ok(out)
    }
}

/// Convenience wrapper that tabulates the operator for a single evaluation.
pub fn evaluate_nonlinearity(spec: &EquationSpec, field: &SpectralField) -> Result<SpectralField> {
    NonlinearOperator::new(spec, field.grid())?.evaluate(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::forward_transform;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn band_limited(grid: Grid, band: i64, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::from_fn(grid, |m| {
            if m[0].abs() <= band && m[1].abs() <= band && m != [0, 0] {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        f.symmetrize();
        f
    }

    fn all_simulable(dim: usize) -> Vec<EquationSpec> {
        let mut v = vec![
            EquationSpec::fractional_heat(dim, 1.5, 3, 0.7).unwrap(),
            EquationSpec::cahn_hilliard_cubic(dim, 0.5).unwrap(),
            EquationSpec::cahn_hilliard_general(dim, vec![0.1, -0.2, 0.3, 0.0, 1.0]).unwrap(),
        ];
        if dim == 1 {
            v.push(EquationSpec::burgers(3).unwrap());
        } else {
            v.push(EquationSpec::sqg(1.5).unwrap());
            v.push(EquationSpec::navier_stokes(2).unwrap());
        }
        v
    }

    #[test]
    fn beta_c_reference_values() {
        let nse = EquationSpec::navier_stokes(3).unwrap();
        assert!((compute_beta_c(&nse, 2.0).unwrap() - 0.5).abs() < 1e-14);
        let burgers = EquationSpec::burgers(3).unwrap();
        assert!(compute_beta_c(&burgers, 2.0).unwrap().abs() < 1e-14);
        let ch = EquationSpec::cahn_hilliard_cubic(3, 1.0).unwrap();
        assert!((compute_beta_c(&ch, 2.0).unwrap() - 0.5).abs() < 1e-14);
        let sqg = EquationSpec::sqg(1.5).unwrap();
        assert!(compute_beta_c(&sqg, 2.0 / (1.5 - 1.0)).unwrap().abs() < 1e-14);
        let heat = EquationSpec::fractional_heat(2, 2.0, 3, 1.0).unwrap();
        assert!(compute_beta_c(&heat, 2.0).unwrap().abs() < 1e-14);
        assert!(compute_beta_c(&heat, 1.0).is_err());
    }

    #[test]
    fn beta_c_scales_affinely() {
        let base = EquationSpec::sqg(1.5).unwrap();
        let p = 3.0;
        let b0 = compute_beta_c(&base, p).unwrap();
        let d_over_p = 2.0 / p;
        for lambda in [1.0, 1.3, 2.0] {
            let scaled = base
                .clone()
                .with_kappa(1.5 * lambda)
                .and_then(|s| s.with_alpha_t(vec![lambda, 0.0, 0.0]))
                .unwrap();
            let b = compute_beta_c(&scaled, p).unwrap();
            assert!((b - (d_over_p + lambda * (b0 - d_over_p))).abs() < 1e-14);
        }
    }

    #[test]
    fn nse_admissibility() {
        let nse = EquationSpec::navier_stokes(3).unwrap();
        let r = check_admissibility(&nse, 2.0).unwrap();
        assert!(r.condition_sum);
        assert!(r.condition_min);
        assert!((r.min_threshold + 0.75).abs() < 1e-15);
        assert!((r.beta_c - 0.5).abs() < 1e-15);
    }

    #[test]
    fn excessive_orders_fail_sum_condition() {
        let heat = EquationSpec::fractional_heat(2, 2.0, 2, 1.0).unwrap();
        let bad = heat.with_alpha_t(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(!check_admissibility(&bad, 2.0).unwrap().condition_sum);
        assert!(EquationSpec::burgers(3)
            .unwrap()
            .with_alpha_t(vec![1.0])
            .is_err());
    }

    #[test]
    fn burgers_beta0_range() {
        let r = check_admissibility(&EquationSpec::burgers(3).unwrap(), 2.0).unwrap();
        assert!(r.beta0_range.0.abs() < 1e-15);
        assert!((r.beta0_range.1 - 0.5).abs() < 1e-15);
        assert!(r.admissible());
    }

    #[test]
    fn predicted_exponents() {
        let nse = EquationSpec::navier_stokes(3).unwrap();
        assert!((predicted_decay_exponent(&nse, 1.0, 2.0).unwrap() - 0.25).abs() < 1e-15);
        let sqg = EquationSpec::sqg(1.25).unwrap();
        let p0 = 2.0 / 0.25;
        let e = predicted_decay_exponent(&sqg, 0.7, p0).unwrap();
        assert!((e - 0.7 / 1.25).abs() < 1e-14);
        assert!(predicted_decay_exponent(&nse, 0.5, 2.0).is_err());
    }

    #[test]
    fn ch_general_weight_is_reported() {
        let spec = EquationSpec::cahn_hilliard_general(1, vec![0.1, -0.2, 1.0]).unwrap();
        let r = check_admissibility(&spec, 2.0).unwrap();
        assert!((r.lower_order_weight.unwrap() - 0.5).abs() < 1e-15);
        assert!(EquationSpec::cahn_hilliard_general(1, vec![0.1, 1.0]).is_err());
        assert!(EquationSpec::cahn_hilliard_general(1, vec![0.1, 1.0, -1.0]).is_err());
    }

    #[test]
    fn zero_field_gives_zero() {
        for dim in [1, 2] {
            let g = Grid::periodic_2pi(dim, 16).unwrap();
            for spec in all_simulable(dim) {
                let out = evaluate_nonlinearity(&spec, &SpectralField::zeros(g)).unwrap();
                assert_eq!(out.max_abs(), 0.0, "{spec}");
            }
        }
    }

    #[test]
    fn burgers_quadratic_on_sine() {
        let g = Grid::periodic_2pi(1, 32).unwrap();
        let u = forward_transform(&g.sample(|x| x[0].sin()), &g).unwrap();
        let out = evaluate_nonlinearity(&EquationSpec::burgers(2).unwrap(), &u).unwrap();
        // ∂ₓ(sin²x) = sin 2x: coefficients ∓i/2 on ±2.
        for i in 0..32 {
            let m = g.frequency(i);
            let expected = match m {
                2 => Complex64::new(0.0, -0.5),
                -2 => Complex64::new(0.0, 0.5),
                _ => Complex64::new(0.0, 0.0),
            };
            assert!((out.coeffs()[i] - expected).norm() < 1e-14, "mode {m}");
        }
    }

    #[test]
    fn sqg_plane_wave_is_stationary() {
        let g = Grid::periodic_2pi(2, 16).unwrap();
        let eta = forward_transform(&g.sample(|x| x[0].cos() + 0.3 * x[0].sin()), &g).unwrap();
        let out = evaluate_nonlinearity(&EquationSpec::sqg(1.5).unwrap(), &eta).unwrap();
        assert!(out.max_abs() < 1e-15);
    }

    #[test]
    fn mean_is_preserved() {
        for dim in [1, 2] {
            let g = Grid::periodic_2pi(dim, 32).unwrap();
            let mut u = band_limited(g, 4, 21);
            u.set_mode([0, 0], Complex64::new(0.3, 0.0));
            for spec in all_simulable(dim) {
                if !spec.nonlinearity().preserves_mean() {
                    continue;
                }
                let out = evaluate_nonlinearity(&spec, &u).unwrap();
                assert_eq!(out.mean(), Complex64::new(0.0, 0.0), "{spec}");
            }
        }
    }

    #[test]
    fn advection_is_skew_symmetric() {
        let g = Grid::periodic_2pi(2, 32).unwrap();
        let u = band_limited(g, 8, 4);
        for spec in [
            EquationSpec::sqg(1.5).unwrap(),
            EquationSpec::navier_stokes(2).unwrap(),
        ] {
            let gu = evaluate_nonlinearity(&spec, &u).unwrap();
            let inner: Complex64 = gu
                .coeffs()
                .iter()
                .zip(u.coeffs())
                .map(|(a, b)| a * b.conj())
                .sum();
            let scale = gu.l2_norm() * u.l2_norm() / g.volume();
            assert!(inner.norm() < 1e-10 * scale.max(1e-300), "{spec}: {inner}");
        }
    }

    #[test]
    fn grid_must_match_dimension() {
        let g = Grid::periodic_2pi(2, 16).unwrap();
        assert!(NonlinearOperator::new(&EquationSpec::burgers(2).unwrap(), &g).is_err());
        let g3 = Grid::periodic_2pi(2, 16).unwrap();
        assert!(NonlinearOperator::new(&EquationSpec::navier_stokes(3).unwrap(), &g3).is_err());
    }

    #[test]
    fn disabled_nonlinearity_is_zero() {
        let g = Grid::periodic_2pi(1, 16).unwrap();
        let u = band_limited(g, 3, 2);
        let spec = EquationSpec::burgers(3).unwrap().linear_only();
        assert_eq!(evaluate_nonlinearity(&spec, &u).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn even_heat_power_uses_absolute_value() {
        let g = Grid::periodic_2pi(1, 64).unwrap();
        let u = forward_transform(&g.sample(|x| x[0].sin()), &g).unwrap();
        let spec = EquationSpec::fractional_heat(1, 2.0, 2, 1.0).unwrap();
        let out = evaluate_nonlinearity(&spec, &u).unwrap();
        // |sin x| sin x is odd with sine series 8/π Σ_{k odd} sin(kx)/(k(4-k²)).
        let b1 = 8.0 / (std::f64::consts::PI * 3.0);
        assert!((out.mode([1, 0]) - Complex64::new(0.0, -b1 / 2.0)).norm() < 1e-4);
    }
}
