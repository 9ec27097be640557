//! Post-processing of sampled trajectories. Power-law fits feed the decay
//! verdicts; monitors follow the Gevrey norm and the analyticity radius.

use crate::equations::{predicted_decay_exponent, EquationSpec};
use crate::error::{Error, Result};
use crate::norms::{analyticity_radius, gevrey_norm, shell_maxima, sobolev_norm, GevreyParams};
use crate::spectral::{retained_frequency, SpectralField};

#[derive(Debug, Clone, PartialEq)]
pub struct NormSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    label: String,
}

impl NormSeries {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            times: Vec::new(),
            values: Vec::new(),
            label: label.into(),
        }
    }

    pub fn from_parts(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::ShapeMismatch {
                expected: times.len(),
                actual: values.len(),
            });
        }
        let mut s = Self::new(label);
        for (t, v) in times.into_iter().zip(values) {
            s.push(t, v)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if !t.is_finite() || self.times.last().is_some_and(|&last| t <= last) {
            return Err(Error::InvalidSeries(format!(
                "{}: sample time {t} does not increase",
                self.label
            )));
        }
        if !(value >= 0.0) || value.is_infinite() {
            return Err(Error::InvalidSeries(format!(
                "{}: value {value} at t = {t} is not a finite non-negative number",
                self.label
            )));
        }
        self.times.push(t);
        self.values.push(value);
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Samples with `t` in the closed window.
    pub fn in_window(&self, window: TimeWindow) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.values)
            .filter(move |(t, _)| window.contains(**t))
            .map(|(t, v)| (*t, *v))
    }

    /// True if each value is strictly below the previous one.
    pub fn is_strictly_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] < w[0])
    }

    /// Largest increase between consecutive samples (0 for a non-increasing series).
    pub fn max_increase(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
}

impl TimeWindow {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start > 0.0 && end > start) {
            return Err(Error::InvalidParameter(format!(
                "fit window must satisfy 0 < start < end, got [{start}, {end}]"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayMode {
    /// The fitted exponent must match the prediction.
    PowerLaw,
    /// `t^γ v(t)` over the window must stay below its maximum over the first
    /// decade `[t_a, 10 t_a]`, with `γ` the predicted exponent.
    OneSided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// Minus the log-log slope.
    pub fitted_exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: TimeWindow,
    pub samples: usize,
    pub predicted_exponent: Option<f64>,
    pub mode: Option<DecayMode>,
    /// `max_window t^γ v / max_first_decade t^γ v`, present in one-sided mode.
    pub bound_ratio: Option<f64>,
    pub verdict: Option<bool>,
}

pub const MIN_FIT_SAMPLES: usize = 5;
pub const MIN_R_SQUARED: f64 = 0.95;

/// Ordinary least squares of `log v` on `log t` over the window.
pub fn fit_power_law(series: &NormSeries, window: TimeWindow) -> Result<DecayFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (t, v) in series.in_window(window) {
        if v <= 0.0 {
            return Err(Error::NonPositiveValue { time: t, value: v });
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            required: MIN_FIT_SAMPLES,
            found: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    // A flat series is fitted perfectly by slope zero.
    let r_squared = if ss_tot <= f64::EPSILON * ys.iter().map(|y| y * y).sum::<f64>() {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(DecayFit {
        fitted_exponent: -slope,
        intercept,
        r_squared,
        window,
        samples: xs.len(),
        predicted_exponent: None,
        mode: None,
        bound_ratio: None,
        verdict: None,
    })
}

/// `max_window t^γ v / max_{[t_a, 10 t_a]} t^γ v`.
pub fn one_sided_bound_ratio(series: &NormSeries, window: TimeWindow, gamma: f64) -> Result<f64> {
    let decade_end = (10.0 * window.start).min(window.end);
    let mut reference: f64 = 0.0;
    let mut overall: f64 = 0.0;
    let mut decade_samples = 0;
    for (t, v) in series.in_window(window) {
        let w = t.powf(gamma) * v;
        overall = overall.max(w);
        if t <= decade_end {
            reference = reference.max(w);
            decade_samples += 1;
        }
    }
    if decade_samples == 0 {
        return Err(Error::InsufficientSamples {
            required: 1,
            found: 0,
        });
    }
    if reference == 0.0 {
        return Ok(if overall == 0.0 { 1.0 } else { f64::INFINITY });
    }
    Ok(overall / reference)
}

/// Fits the series and compares with `(ζ - β_c)/κ`.
pub fn verify_decay(
    series: &NormSeries,
    spec: &EquationSpec,
    zeta: f64,
    p: f64,
    tolerance: f64,
    window: TimeWindow,
    mode: DecayMode,
) -> Result<DecayFit> {
    let predicted = predicted_decay_exponent(spec, zeta, p)?;
    let mut fit = fit_power_law(series, window)?;
    fit.predicted_exponent = Some(predicted);
    fit.mode = Some(mode);
    let verdict = match mode {
        DecayMode::PowerLaw => {
            (fit.fitted_exponent - predicted).abs() <= tolerance && fit.r_squared >= MIN_R_SQUARED
        }
        DecayMode::OneSided => {
            let ratio = one_sided_bound_ratio(series, window, predicted)?;
            fit.bound_ratio = Some(ratio);
            ratio <= 1.0 + 1e-12
        }
    };
    fit.verdict = Some(verdict);
    Ok(fit)
}

/// Fraction of `∫|u|` lying within `margin·L` of the box boundary; used to end
/// whole-space surrogate fits before periodic wrap-around matters.
pub fn edge_mass_fraction(field: &SpectralField, margin: f64) -> Result<f64> {
    let grid = *field.grid();
    let samples = field.to_physical()?;
    let lo = margin * grid.length();
    let hi = grid.length() - lo;
    let mut edge = 0.0;
    let mut total = 0.0;
    for (i, v) in samples.iter().enumerate() {
        let x = grid.coordinates(i);
        let near = x[..grid.dim()].iter().any(|&c| c < lo || c > hi);
        total += v.abs();
        if near {
            edge += v.abs();
        }
    }
    Ok(if total == 0.0 { 0.0 } else { edge / total })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GevreyBoundReport {
    pub supremum: f64,
    pub supremum_time: f64,
    /// `‖u₀‖` in the Sobolev norm with the monitor's `β` and `p`.
    pub initial_norm: f64,
    /// `sup ≤ 2‖u₀‖`.
    pub within_twice_initial: bool,
    /// Time of the first sample whose Gevrey weight saturated, if any.
    pub truncated_at: Option<f64>,
    pub samples: usize,
}

/// Records `‖u(t)‖_{Gv(t)}`, i.e. the Gevrey norm with `s = t`.
#[derive(Debug, Clone)]
pub struct GevreyMonitor {
    base: GevreyParams,
    series: NormSeries,
    initial_norm: Option<f64>,
    truncated_at: Option<f64>,
}

impl GevreyMonitor {
    pub fn new(base: GevreyParams) -> Self {
        Self {
            base,
            series: NormSeries::new(format!("gevrey(beta={}, p={})", base.beta, base.p)),
            initial_norm: None,
            truncated_at: None,
        }
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated_at.is_some()
    }

    /// Samples the field at time `t`; stops silently after a saturation.
    pub fn observe(&mut self, t: f64, field: &SpectralField) -> Result<()> {
        if self.truncated_at.is_some() {
            return Ok(());
        }
        if self.initial_norm.is_none() {
            self.initial_norm = Some(sobolev_norm(field, self.base.beta, self.base.p)?);
        }
        match gevrey_norm(field, &self.base.with_s(t)) {
            Ok(v) => self.series.push(t, v),
            Err(Error::GevreyOverflow { .. }) => {
                log::warn!("Gevrey monitor truncated at t = {t}");
                self.truncated_at = Some(t);
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    pub fn series(&self) -> &NormSeries {
        &self.series
    }

    pub fn report(&self) -> GevreyBoundReport {
        let (mut supremum, mut supremum_time) = (0.0, 0.0);
        for (t, v) in self.series.times().iter().zip(self.series.values()) {
            if *v > supremum {
                supremum = *v;
                supremum_time = *t;
            }
        }
        let initial_norm = self.initial_norm.unwrap_or(0.0);
        GevreyBoundReport {
            supremum,
            supremum_time,
            initial_norm,
            within_twice_initial: supremum <= 2.0 * initial_norm,
            truncated_at: self.truncated_at,
            samples: self.series.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSample {
    pub t: f64,
    /// `None` when the spectrum had too few shells above the floor.
    pub rho: Option<f64>,
    pub saturated: bool,
}

/// Tracks the analyticity radius along a trajectory.
///
/// A sample is saturated once the largest shell inside the dealiased band has
/// fallen below the noise floor; from then on the fit only sees the resolved
/// low modes, so this and all later samples are kept out of verdicts.
#[derive(Debug, Clone)]
pub struct FourierDecayTracker {
    noise_floor: f64,
    dealias_rule: f64,
    samples: Vec<RadiusSample>,
}

impl FourierDecayTracker {
    pub fn new(noise_floor: f64, dealias_rule: f64) -> Self {
        Self {
            noise_floor,
            dealias_rule,
            samples: Vec::new(),
        }
    }

    pub fn observe(&mut self, t: f64, field: &SpectralField) -> Result<()> {
        let already = self.samples.last().is_some_and(|s| s.saturated);
        let saturated = already || self.edge_below_floor(field);
        let rho = match analyticity_radius(field, self.noise_floor) {
            Ok(r) => Some(r),
            Err(Error::InsufficientShells { .. }) => None,
            Err(e) => return Err(e),
        };
        self.samples.push(RadiusSample { t, rho, saturated });
        Ok(())
    }

    fn edge_below_floor(&self, field: &SpectralField) -> bool {
        let grid = field.grid();
        let edge = retained_frequency(grid, self.dealias_rule) as f64 * grid.fundamental();
        let shells = shell_maxima(field);
        let top = shells.iter().map(|s| s.1).fold(0.0, f64::max);
        let last_resolved = shells
            .iter()
            .filter(|s| s.0 <= edge + 1e-9)
            .max_by(|a, b| a.0.total_cmp(&b.0));
        match last_resolved {
            Some(&(_, m)) => m <= self.noise_floor * top,
            None => true,
        }
    }

    pub fn samples(&self) -> &[RadiusSample] {
        &self.samples
    }

    /// First saturated sample time.
    pub fn saturation_time(&self) -> Option<f64> {
        self.samples.iter().find(|s| s.saturated).map(|s| s.t)
    }

    /// Radii before saturation.
    pub fn resolved(&self) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .take_while(|s| !s.saturated)
            .filter_map(|s| s.rho.map(|r| (s.t, r)))
            .collect()
    }

    /// `ρ` positive for `t > 0` and never decreasing by more than `slack`
    /// between consecutive pre-saturation samples.
    pub fn is_positive_and_nondecreasing(&self, slack: f64) -> bool {
        let r = self.resolved();
        r.iter().any(|s| s.0 > 0.0)
            && r.iter().all(|s| s.0 == 0.0 || s.1 > 0.0)
            && r.windows(2).all(|w| w[1].1 >= w[0].1 - slack)
    }

    /// `min ρ(t)/t^{1/κ}` over pre-saturation samples with `t > 0`; the
    /// growth claim holds when this is positive.
    pub fn growth_constant(&self, kappa: f64) -> Option<f64> {
        self.resolved()
            .into_iter()
            .filter(|s| s.0 > 0.0)
            .map(|(t, r)| r / t.powf(1.0 / kappa))
            .reduce(f64::min)
    }
}
