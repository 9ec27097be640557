//! Runs one experiment: integrates, samples the configured norms, fits decay
//! laws and renders the CSV time series and JSON summary.

use std::fmt::Write as _;
use std::path::Path;

use gevrey_core::analysis::{
    edge_mass_fraction, verify_decay, DecayFit, DecayMode, FourierDecayTracker, GevreyBoundReport,
    GevreyMonitor, NormSeries, RadiusSample, TimeWindow,
};
use gevrey_core::equations::{check_admissibility, compute_beta_c, predicted_decay_exponent};
use gevrey_core::norms::{
    analyticity_radius, gevrey_norm, sobolev_norm, GevreyFlavor, GevreyParams,
};
use gevrey_core::spectral::SpectralField;
use gevrey_core::timestepping::{integrate, RunStatus};
use gevrey_core::Error;
use serde_json::{json, Map, Value};

use crate::config::{DecaySettings, ExperimentConfig, NormDescriptor};
use crate::error::{LabError, LabResult};
use crate::initial::InitialCondition;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest tolerated drop of `ρ` between samples.
pub const RADIUS_SLACK: f64 = 1e-9;

/// Relative `∫|u|` near the box edge beyond which whole-space fits stop.
pub const WRAPAROUND_LIMIT: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct RadiusSummary {
    pub samples: Vec<RadiusSample>,
    pub saturation_time: Option<f64>,
    pub positive_nondecreasing: bool,
    pub growth_constant: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EnergySummary {
    pub max_increase: f64,
    pub tolerance: f64,
    pub non_increasing: bool,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    /// `rows[i][c]` is column `c` at `times[i]`.
    pub rows: Vec<Vec<f64>>,
    pub status: RunStatus,
    pub final_time: f64,
    pub steps: usize,
    /// First sample time at which the edge mass exceeded [`WRAPAROUND_LIMIT`].
    pub wraparound_time: Option<f64>,
    pub gevrey: Option<GevreyBoundReport>,
    pub radius: Option<RadiusSummary>,
    pub energy: Option<EnergySummary>,
}

impl RunRecord {
    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let c = self.labels.iter().position(|l| l == label)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub zeta: f64,
    pub predicted: Option<f64>,
    pub result: Result<DecayFit, String>,
}

impl FitOutcome {
    pub fn verdict(&self) -> bool {
        matches!(&self.result, Ok(f) if f.verdict == Some(true))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub fits: Vec<FitOutcome>,
    pub csv: String,
    pub json: Value,
}

impl RunOutput {
    /// 0 on completion, 2 on blow-up.
    pub fn exit_code(&self) -> i32 {
        match self.record.status {
            RunStatus::Completed => 0,
            RunStatus::BlowUp { .. } => 2,
        }
    }

    pub fn all_verdicts(&self) -> bool {
        self.json["all_verdicts"] == Value::Bool(true)
    }
}

fn evaluate_column(
    d: &NormDescriptor,
    t: f64,
    field: &SpectralField,
    cfg: &ExperimentConfig,
) -> gevrey_core::Result<f64> {
    let kappa = cfg.equation.kappa();
    match *d {
        NormDescriptor::Sobolev { beta, p } => sobolev_norm(field, beta, p),
        NormDescriptor::Gevrey { beta, p } => {
            gevrey_norm(field, &GevreyParams::new(t, beta, kappa, p))
        }
        NormDescriptor::GevreyFourier { beta } => {
            gevrey_norm(field, &GevreyParams::fourier_l1(t, beta, kappa))
        }
        NormDescriptor::Mode { m } => {
            let c = field.mode(m).norm();
            Ok(if m == [0, 0] { c } else { 2.0 * c })
        }
        NormDescriptor::Radius => match analyticity_radius(field, cfg.diagnostics.radius_floor) {
            Err(Error::InsufficientShells { .. }) => Ok(f64::NAN),
            r => r,
        },
        NormDescriptor::L2Squared => Ok(field.l2_norm_squared()),
    }
}

/// Integrates the configured equation and collects every diagnostic.
pub fn simulate(cfg: &ExperimentConfig) -> LabResult<RunRecord> {
    let u0 = cfg.initial.build(&cfg.grid)?;
    let columns = cfg.columns();
    let dim = cfg.grid.dim();
    let labels: Vec<String> = columns.iter().map(|c| c.label(dim)).collect();
    let diag = &cfg.diagnostics;
    let whole_space = matches!(cfg.initial, InitialCondition::GaussianBump { .. });

    let mut times = Vec::new();
    let mut rows = Vec::new();
    let mut failure: Option<Error> = None;
    let mut wraparound_time = None;
    let mut monitor = diag.gevrey_bound.as_ref().map(|g| {
        let mut gp = GevreyParams::new(0.0, g.beta, cfg.equation.kappa(), g.p);
        if g.flavor == GevreyFlavor::FourierL1 {
            gp = GevreyParams::fourier_l1(0.0, g.beta, cfg.equation.kappa());
        }
        GevreyMonitor::new(gp)
    });
    let mut tracker = diag
        .radius_tracker
        .then(|| FourierDecayTracker::new(diag.radius_floor, cfg.equation.dealias_rule()));
    let mut energy: Vec<f64> = Vec::new();

    let mut hook = |t: f64, field: &SpectralField| {
        if failure.is_some() {
            return;
        }
        let mut sample = || -> gevrey_core::Result<()> {
            let row = columns
                .iter()
                .map(|c| evaluate_column(c, t, field, cfg))
                .collect::<gevrey_core::Result<Vec<_>>>()?;
            if let Some(m) = monitor.as_mut() {
                m.observe(t, field)?;
            }
            if let Some(tr) = tracker.as_mut() {
                tr.observe(t, field)?;
            }
            if diag.energy_check {
                energy.push(field.l2_norm_squared());
            }
            if whole_space
                && wraparound_time.is_none()
                && edge_mass_fraction(field, 0.1)? > WRAPAROUND_LIMIT
            {
                wraparound_time = Some(t);
            }
            times.push(t);
            rows.push(row);
            Ok(())
        };
        if let Err(e) = sample() {
            failure = Some(e);
        }
    };
    let traj = integrate(&cfg.equation, &u0, &cfg.integrator, &mut hook)?;
    if let Some(e) = failure {
        return Err(e.into());
    }

    let energy = diag.energy_check.then(|| {
        let tolerance = 1e-8 * u0.l2_norm_squared();
        let max_increase = energy
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        EnergySummary {
            max_increase,
            tolerance,
            non_increasing: max_increase <= tolerance,
        }
    });
    let radius = tracker.map(|tr| RadiusSummary {
        samples: tr.samples().to_vec(),
        saturation_time: tr.saturation_time(),
        positive_nondecreasing: tr.is_positive_and_nondecreasing(RADIUS_SLACK),
        growth_constant: tr.growth_constant(cfg.equation.kappa()),
    });
    Ok(RunRecord {
        labels,
        times,
        rows,
        status: traj.status,
        final_time: traj.final_time,
        steps: traj.steps,
        wraparound_time,
        gevrey: monitor.map(|m| m.report()),
        radius,
        energy,
    })
}

/// Decay fits for each configured `ζ` against an existing record.
pub fn fit_decays(cfg: &ExperimentConfig, record: &RunRecord) -> Vec<FitOutcome> {
    let Some(decay) = &cfg.diagnostics.decay else {
        return Vec::new();
    };
    decay
        .zetas
        .iter()
        .map(|&zeta| fit_one(cfg, decay, record, zeta))
        .collect()
}

fn fit_one(
    cfg: &ExperimentConfig,
    decay: &DecaySettings,
    record: &RunRecord,
    zeta: f64,
) -> FitOutcome {
    let predicted = predicted_decay_exponent(&cfg.equation, zeta, decay.p).ok();
    let label = NormDescriptor::Sobolev {
        beta: zeta,
        p: decay.p,
    }
    .label(cfg.grid.dim());
    let result = (|| -> Result<DecayFit, String> {
        let values = record
            .column(&label)
            .ok_or_else(|| format!("column {label} was not recorded"))?;
        let series = NormSeries::from_parts(label.clone(), record.times.clone(), values)
            .map_err(|e| e.to_string())?;
        let end = match record.wraparound_time {
            Some(t) => decay.window.end.min(t),
            None => decay.window.end,
        };
        let window = TimeWindow::new(decay.window.start, end).map_err(|e| e.to_string())?;
        verify_decay(
            &series,
            &cfg.equation,
            zeta,
            decay.p,
            decay.tolerance,
            window,
            decay.mode,
        )
        .map_err(|e| e.to_string())
    })();
    FitOutcome {
        zeta,
        predicted,
        result,
    }
}

/// CSV with header `t,<labels>` and 17 significant digits.
pub fn render_csv(record: &RunRecord) -> String {
    let mut out = String::from("t");
    for l in &record.labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    let fmt = |x: f64| {
        if x.is_nan() {
            "nan".to_string()
        } else {
            format!("{x:.16e}")
        }
    };
    for (t, row) in record.times.iter().zip(&record.rows) {
        out.push_str(&fmt(*t));
        for v in row {
            let _ = write!(out, ",{}", fmt(*v));
        }
        out.push('\n');
    }
    out
}

/// JSON numbers with NaN and infinities replaced by strings.
#[derive(Default)]
pub(crate) struct JsonNumbers {
    pub(crate) non_finite: bool,
}

impl JsonNumbers {
    pub(crate) fn num(&mut self, x: f64) -> Value {
        if x.is_finite() {
            json!(x)
        } else {
            self.non_finite = true;
            if x.is_nan() {
                json!("nan")
            } else if x > 0.0 {
                json!("inf")
            } else {
                json!("-inf")
            }
        }
    }

    pub(crate) fn opt(&mut self, x: Option<f64>) -> Value {
        x.map_or(Value::Null, |v| self.num(v))
    }
}

fn mode_name(m: DecayMode) -> &'static str {
    match m {
        DecayMode::PowerLaw => "power_law",
        DecayMode::OneSided => "one_sided",
    }
}

pub(crate) fn fit_json(fit: &FitOutcome, n: &mut JsonNumbers) -> Value {
    let mut obj = Map::new();
    obj.insert("zeta".into(), n.num(fit.zeta));
    obj.insert("predicted_exponent".into(), n.opt(fit.predicted));
    match &fit.result {
        Ok(f) => {
            obj.insert("fitted_exponent".into(), n.num(f.fitted_exponent));
            obj.insert("intercept".into(), n.num(f.intercept));
            obj.insert("r_squared".into(), n.num(f.r_squared));
            obj.insert("window_start".into(), n.num(f.window.start));
            obj.insert("window_end".into(), n.num(f.window.end));
            obj.insert("samples".into(), json!(f.samples));
            obj.insert("mode".into(), json!(f.mode.map(mode_name)));
            obj.insert("bound_ratio".into(), n.opt(f.bound_ratio));
            obj.insert("verdict".into(), json!(f.verdict == Some(true)));
        }
        Err(e) => {
            obj.insert("error".into(), json!(e));
            obj.insert("verdict".into(), json!(false));
        }
    }
    Value::Object(obj)
}

pub fn summary_json(cfg: &ExperimentConfig, record: &RunRecord, fits: &[FitOutcome]) -> Value {
    let mut nums = JsonNumbers::default();
    let spec = &cfg.equation;
    let p = cfg.diagnostics.p;
    let beta_c = compute_beta_c(spec, p).ok();
    let admissible = check_admissibility(spec, p).ok().map(|r| r.admissible());
    let fits_json: Vec<Value> = fits.iter().map(|f| fit_json(f, &mut nums)).collect();
    let n = &mut nums;

    let mut verdicts = Map::new();
    for f in fits {
        verdicts.insert(format!("decay_zeta_{}", f.zeta), json!(f.verdict()));
    }
    let gevrey = record.gevrey.as_ref().map(|g| {
        verdicts.insert("gevrey_bound".into(), json!(g.within_twice_initial));
        json!({
            "supremum": n.num(g.supremum),
            "supremum_time": n.num(g.supremum_time),
            "initial_norm": n.num(g.initial_norm),
            "twice_initial": n.num(2.0 * g.initial_norm),
            "within_twice_initial": g.within_twice_initial,
            "truncated_at": n.opt(g.truncated_at),
            "samples": g.samples,
        })
    });
    let radius = record.radius.as_ref().map(|r| {
        verdicts.insert("radius_growth".into(), json!(r.positive_nondecreasing));
        let pre: Vec<&RadiusSample> = r.samples.iter().take_while(|s| !s.saturated).collect();
        json!({
            "saturation_time": n.opt(r.saturation_time),
            "presaturation_samples": pre.len(),
            "initial_radius": n.opt(r.samples.first().and_then(|s| s.rho)),
            "last_presaturation_radius": n.opt(pre.last().and_then(|s| s.rho)),
            "positive_nondecreasing": r.positive_nondecreasing,
            "growth_constant": n.opt(r.growth_constant),
        })
    });
    let energy = record.energy.as_ref().map(|e| {
        verdicts.insert("energy_non_increasing".into(), json!(e.non_increasing));
        json!({
            "max_increase": n.num(e.max_increase),
            "tolerance": n.num(e.tolerance),
            "non_increasing": e.non_increasing,
        })
    });
    let predicted: Map<String, Value> = cfg
        .diagnostics
        .decay
        .iter()
        .flat_map(|d| d.zetas.iter().map(move |z| (*z, d.p)))
        .map(|(z, dp)| {
            (
                format!("zeta_{z}"),
                n.opt(predicted_decay_exponent(spec, z, dp).ok()),
            )
        })
        .collect();
    let (status, blowup_time, reason) = match &record.status {
        RunStatus::Completed => ("completed", None, None),
        RunStatus::BlowUp { time, reason } => ("blow_up", Some(*time), Some(reason.clone())),
    };
    let all = verdicts.values().all(|v| v == &Value::Bool(true));
    let mut root = json!({
        "schema_version": SCHEMA_VERSION,
        "equation": {
            "kind": spec.name(),
            "kappa": n.num(spec.kappa()),
            "dim": spec.dim(),
            "degree": spec.degree(),
            "alpha_t": spec.alpha_t(),
            "viscosity": n.num(spec.viscosity()),
            "nonlinear": spec.nonlinear_enabled(),
        },
        "grid": {
            "points": cfg.grid.points(),
            "length": n.num(cfg.grid.length()),
        },
        "p": n.num(p),
        "beta_c": n.opt(beta_c),
        "admissible": admissible,
        "predicted_exponents": predicted,
        "decay_fits": fits_json,
        "gevrey_bound": gevrey,
        "fourier_decay": radius,
        "energy": energy,
        "wraparound_time": n.opt(record.wraparound_time),
        "status": status,
        "blowup_time": n.opt(blowup_time),
        "blowup_reason": reason,
        "final_time": n.num(record.final_time),
        "steps": record.steps,
        "samples": record.times.len(),
        "verdicts": verdicts,
        "all_verdicts": all,
    });
    root["contains_non_finite"] = json!(nums.non_finite);
    root
}

pub fn execute(cfg: &ExperimentConfig) -> LabResult<RunOutput> {
    let record = simulate(cfg)?;
    let fits = fit_decays(cfg, &record);
    let csv = render_csv(&record);
    let json = summary_json(cfg, &record, &fits);
    Ok(RunOutput {
        record,
        fits,
        csv,
        json,
    })
}

fn write_file(path: &Path, contents: &str) -> LabResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| LabError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| LabError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a configuration file, runs it and writes the configured artifacts.
pub fn run_file(path: &Path) -> LabResult<RunOutput> {
    let cfg = ExperimentConfig::load(path)?;
    let out = execute(&cfg)?;
    if let Some(csv) = &cfg.output.csv {
        write_file(csv, &out.csv)?;
    }
    if let Some(p) = &cfg.output.json {
        let text = serde_json::to_string_pretty(&out.json).expect("JSON values serialize");
        write_file(p, &(text + "\n"))?;
    }
    Ok(out)
}
