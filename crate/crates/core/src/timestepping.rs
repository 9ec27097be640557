//! Exponential integrators for `u_t + νΛ^κ u = G(u)` and a Picard iteration
//! of the mild formulation, used as an independent small-horizon oracle.
//!
//! The linear part is propagated exactly, so with `G` disabled every scheme
//! reproduces `e^{-tνΛ^κ}u₀` to round-off for any step size.

use num_complex::Complex64;

use crate::equations::{EquationSpec, NonlinearOperator};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ExponentialEuler,
    Etdrk2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    /// Threshold on the sup norm of the physical field.
    pub blowup_threshold: f64,
    pub diagnostic_stride: usize,
}

impl IntegratorConfig {
    pub fn new(scheme: Scheme, dt: f64, t_end: f64) -> Self {
        Self {
            scheme,
            dt,
            t_end,
            blowup_threshold: 1e8,
            diagnostic_stride: 1,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.diagnostic_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::InvalidParameter(
                "blow-up threshold must be positive".into(),
            ));
        }
        if self.diagnostic_stride == 0 {
            return Err(Error::InvalidParameter(
                "diagnostic stride must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// `φ₁(z) = (1 - e^{-z})/z`, with `φ₁(0) = 1`.
fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// `φ₂(z) = (e^{-z} - 1 + z)/z²`, with `φ₂(0) = 1/2`.
fn phi2(z: f64) -> f64 {
    if z < 1e-3 {
        // Taylor series; the closed form cancels catastrophically here.
        0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0
    } else {
        ((-z).exp_m1() + z) / (z * z)
    }
}

/// Per-mode weights of the exponential integrators for a fixed step.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    dt: f64,
    decay: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

/// `ν|k|^κ` on every mode.
pub fn dissipation_rates(spec: &EquationSpec, grid: &Grid) -> Vec<f64> {
    (0..grid.len())
        .map(|i| {
            let k = grid.wavenumber(i);
            if k == 0.0 {
                0.0
            } else {
                spec.viscosity() * k.powf(spec.kappa())
            }
        })
        .collect()
}

impl LinearPropagator {
    pub fn new(spec: &EquationSpec, grid: &Grid, dt: f64) -> Self {
        let rates = dissipation_rates(spec, grid);
        let decay = rates.iter().map(|r| (-dt * r).exp()).collect();
        let phi1 = rates.iter().map(|r| dt * phi1(dt * r)).collect();
        let phi2 = rates.iter().map(|r| dt * phi2(dt * r)).collect();
        Self {
            dt,
            decay,
            phi1,
            phi2,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `e^{-dt νΛ^κ} u`.
    pub fn propagate(&self, field: &SpectralField) -> SpectralField {
        let mut out = field.clone();
        for (c, e) in out.coeffs_mut().iter_mut().zip(&self.decay) {
            *c *= *e;
        }
        out
    }
}

/// One-step map for a fixed equation, grid and step size.
pub struct Stepper {
    operator: NonlinearOperator,
    propagator: LinearPropagator,
    scheme: Scheme,
    corrector_weight: f64,
    blowup_threshold: f64,
}

impl Stepper {
    pub fn new(spec: &EquationSpec, grid: &Grid, scheme: Scheme, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {dt}"
            )));
        }
        Ok(Self {
            operator: NonlinearOperator::new(spec, grid)?,
            propagator: LinearPropagator::new(spec, grid, dt),
            scheme,
            corrector_weight: 1.0,
            blowup_threshold: 1e8,
        })
    }

    pub fn with_blowup_threshold(mut self, threshold: f64) -> Self {
        self.blowup_threshold = threshold;
        self
    }

    /// Scales the ETDRK2 corrector; zero recovers exponential Euler.
    pub fn with_corrector_weight(mut self, weight: f64) -> Self {
        self.corrector_weight = weight;
        self
    }

    pub fn dt(&self) -> f64 {
        self.propagator.dt
    }

    pub fn operator(&self) -> &NonlinearOperator {
        &self.operator
    }

    /// Advances `field`, which is taken to sit at time `t` (used for error reports).
    pub fn step(&self, field: &SpectralField, t: f64) -> Result<SpectralField> {
        let stamp = |e: Error| match e {
            Error::BlowUp { reason, .. } => Error::BlowUp { time: t, reason },
            other => other,
        };
        let g0 = self.operator.evaluate(field).map_err(stamp)?;
        let p = &self.propagator;
        let mut predictor = field.clone();
        for (i, c) in predictor.coeffs_mut().iter_mut().enumerate() {
            *c = p.decay[i] * *c + p.phi1[i] * g0.coeffs()[i];
        }
        let next = match self.scheme {
            Scheme::ExponentialEuler => predictor,
            Scheme::Etdrk2 => {
                let g1 = self.operator.evaluate(&predictor).map_err(stamp)?;
                let w = self.corrector_weight;
                let mut out = predictor;
                let (a, b) = (g1.coeffs(), g0.coeffs());
                for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
                    *c += w * p.phi2[i] * (a[i] - b[i]);
                }
                out
            }
        };
        self.check_blowup(&next, t + p.dt)?;
        Ok(next)
    }

    fn check_blowup(&self, field: &SpectralField, t: f64) -> Result<()> {
        if field.has_nan() {
            return Err(Error::BlowUp {
                time: t,
                reason: "non-finite Fourier coefficient".into(),
            });
        }
        // Σ|û| bounds the sup norm; only transform when the bound is exceeded.
        if field.wiener_norm() > self.blowup_threshold {
            let peak = field
                .to_physical()?
                .iter()
                .map(|v| v.abs())
                .fold(0.0, f64::max);
            if peak > self.blowup_threshold {
                return Err(Error::BlowUp {
                    time: t,
                    reason: format!(
                        "sup norm {peak:e} exceeds threshold {:e}",
                        self.blowup_threshold
                    ),
                });
            }
        }
        Ok(())
    }
}

/// `û⁺ = e^{-dtνΛ^κ}û + φ₁ Ĝ(u)`.
pub fn exponential_euler_step(
    spec: &EquationSpec,
    field: &SpectralField,
    dt: f64,
) -> Result<SpectralField> {
    Stepper::new(spec, field.grid(), Scheme::ExponentialEuler, dt)?.step(field, 0.0)
}

/// Two-stage exponential time differencing (Cox–Matthews ETDRK2).
pub fn etdrk2_step(spec: &EquationSpec, field: &SpectralField, dt: f64) -> Result<SpectralField> {
    Stepper::new(spec, field.grid(), Scheme::Etdrk2, dt)?.step(field, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    BlowUp { time: f64, reason: String },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Last successfully computed state.
    pub final_field: SpectralField,
    pub final_time: f64,
    pub steps: usize,
    pub status: RunStatus,
}

/// Number of uniform steps covering `[0, t_end]` with step at most `dt`.
pub fn step_count(dt: f64, t_end: f64) -> usize {
    if t_end == 0.0 {
        0
    } else {
        ((t_end / dt) - 1e-9).ceil().max(1.0) as usize
    }
}

/// Integrates to `t_end`, calling `hook(t, field)` at `t = 0`, every
/// `diagnostic_stride` steps, and at the final step.
///
/// The step is shrunk to `t_end / ceil(t_end/dt)` so sample times are exact
/// multiples. Blow-up ends the run with [`RunStatus::BlowUp`] and the last
/// good state.
pub fn integrate(
    spec: &EquationSpec,
    u0: &SpectralField,
    cfg: &IntegratorConfig,
    hook: &mut dyn FnMut(f64, &SpectralField),
) -> Result<Trajectory> {
    cfg.validate()?;
    hook(0.0, u0);
    let steps = step_count(cfg.dt, cfg.t_end);
    if steps == 0 {
        return Ok(Trajectory {
            final_field: u0.clone(),
            final_time: 0.0,
            steps: 0,
            status: RunStatus::Completed,
        });
    }
    let h = cfg.t_end / steps as f64;
    let stepper =
        Stepper::new(spec, u0.grid(), cfg.scheme, h)?.with_blowup_threshold(cfg.blowup_threshold);

    let cfl = u0.wiener_norm() * u0.grid().max_wavenumber() * h;
    log::info!("{spec}: {steps} steps of {h:e}, CFL estimate {cfl:.3e}");

    let mut field = u0.clone();
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * h;
        match stepper.step(&field, t_prev) {
            Ok(next) => field = next,
            Err(Error::BlowUp { time, reason }) => {
                log::warn!("{spec}: blow-up at t = {time}: {reason}");
                return Ok(Trajectory {
                    final_field: field,
                    final_time: t_prev,
                    steps: i - 1,
                    status: RunStatus::BlowUp { time, reason },
                });
            }
            Err(e) => return Err(e),
        }
        if i % cfg.diagnostic_stride == 0 || i == steps {
            hook(i as f64 * h, &field);
        }
    }
    Ok(Trajectory {
        final_field: field,
        final_time: cfg.t_end,
        steps,
        status: RunStatus::Completed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardConfig {
    pub horizon: f64,
    /// Uniform trapezoid nodes on `[0, horizon]`, endpoints included.
    pub quadrature_nodes: usize,
    pub max_iters: usize,
    pub tolerance: f64,
    /// Exponent `w` of the time weight `t^w` in the stopping distance;
    /// zero gives the plain sup-over-time L² distance.
    pub distance_weight: f64,
}

impl PicardConfig {
    pub fn new(horizon: f64, quadrature_nodes: usize) -> Self {
        Self {
            horizon,
            quadrature_nodes,
            max_iters: 100,
            tolerance: 1e-13,
            distance_weight: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0)
            || self.quadrature_nodes < 2
            || self.max_iters == 0
            || !(self.tolerance > 0.0)
        {
            return Err(Error::InvalidParameter(
                "Picard horizon, tolerance and iteration count must be positive, nodes >= 2".into(),
            ));
        }
        if !(self.distance_weight >= 0.0) {
            return Err(Error::InvalidParameter(
                "distance weight must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub iterations: usize,
    /// Distance between successive iterates, one entry per iteration.
    pub distances: Vec<f64>,
}

impl PicardSolution {
    pub fn final_state(&self) -> &SpectralField {
        self.states.last().expect("at least two nodes")
    }

    /// Ratios of successive iterate distances.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.distances.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Fixed-point iteration of
/// `u(t_j) = e^{-t_jνΛ^κ}u₀ + ∫₀^{t_j} e^{-(t_j-s)νΛ^κ} G(u(s)) ds`
/// with the time integral evaluated by the trapezoid rule on the nodes.
pub fn picard_solve(
    spec: &EquationSpec,
    u0: &SpectralField,
    cfg: &PicardConfig,
) -> Result<PicardSolution> {
    cfg.validate()?;
    let grid = *u0.grid();
    let op = NonlinearOperator::new(spec, &grid)?;
    let m = cfg.quadrature_nodes;
    let h = cfg.horizon / (m - 1) as f64;
    let times: Vec<f64> = (0..m).map(|j| j as f64 * h).collect();
    let rates = dissipation_rates(spec, &grid);
    // lag[l][k] = exp(-l h ν|k|^κ)
    let lag: Vec<Vec<f64>> = (0..m)
        .map(|l| rates.iter().map(|r| (-(l as f64) * h * r).exp()).collect())
        .collect();
    let propagate = |field: &SpectralField, l: usize| {
        let mut out = field.clone();
        for (c, e) in out.coeffs_mut().iter_mut().zip(&lag[l]) {
            *c *= *e;
        }
        out
    };
    let linear: Vec<SpectralField> = (0..m).map(|j| propagate(u0, j)).collect();

    let mut current = linear.clone();
    let mut distances = Vec::new();
    let mut growth_streak = 0;
    for iteration in 1..=cfg.max_iters {
        let forcing = current
            .iter()
            .map(|u| op.evaluate(u))
            .collect::<Result<Vec<_>>>()?;
        let mut next = Vec::with_capacity(m);
        for j in 0..m {
            let mut acc = linear[j].clone();
            for i in 0..=j {
                if j == 0 {
                    break;
                }
                let w = if i == 0 || i == j { 0.5 * h } else { h };
                let lagged = &lag[j - i];
                for ((a, g), e) in acc
                    .coeffs_mut()
                    .iter_mut()
                    .zip(forcing[i].coeffs())
                    .zip(lagged)
                {
                    *a += Complex64::from(w * e) * g;
                }
            }
            next.push(acc);
        }
        let mut distance: f64 = 0.0;
        for j in 0..m {
            let weight = if cfg.distance_weight == 0.0 {
                1.0
            } else {
                times[j].powf(cfg.distance_weight)
            };
            distance = distance.max(weight * next[j].l2_distance(&current[j])?);
        }
        if let Some(&prev) = distances.last() {
            if distance > prev {
                growth_streak += 1;
                if growth_streak >= 3 {
                    return Err(Error::NonContraction {
                        ratio: distance / prev,
                    });
                }
            } else {
                growth_streak = 0;
            }
        }
        distances.push(distance);
        current = next;
        if distance < cfg.tolerance {
            return Ok(PicardSolution {
                times,
                states: current,
                iterations: iteration,
                distances,
            });
        }
    }
    Err(Error::PicardNotConverged {
        iterations: cfg.max_iters,
        distance: *distances.last().unwrap_or(&f64::NAN),
        tolerance: cfg.tolerance,
    })
}
