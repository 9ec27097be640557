//! Experiment configuration: INI sections `[equation]`, `[grid]`,
//! `[integrator]`, `[initial]`, `[diagnostics]` and `[output]`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gevrey_core::analysis::{DecayMode, TimeWindow};
use gevrey_core::equations::EquationSpec;
use gevrey_core::norms::GevreyFlavor;
use gevrey_core::spectral::Grid;
use gevrey_core::timestepping::{IntegratorConfig, Scheme};
use ini::Ini;

use crate::error::{LabError, LabResult};
use crate::initial::InitialCondition;

pub const SECTIONS: [&str; 6] = [
    "equation",
    "grid",
    "integrator",
    "initial",
    "diagnostics",
    "output",
];

/// Section → key → value, with section and key names lower-cased.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
    base_dir: Option<PathBuf>,
}

impl RawConfig {
    pub fn parse(text: &str) -> LabResult<Self> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| LabError::Syntax(e.to_string()))?;
        let mut sections = BTreeMap::new();
        for (name, props) in &ini {
            let Some(name) = name else {
                if props.iter().next().is_some() {
                    return Err(LabError::Syntax("keys outside of any section".into()));
                }
                continue;
            };
            let name = name.trim().to_ascii_lowercase();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(LabError::Syntax(format!("unknown section [{name}]")));
            }
            let entry: &mut BTreeMap<String, String> = sections.entry(name).or_default();
            for (k, v) in props.iter() {
                entry.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
            }
        }
        Ok(Self {
            sections,
            base_dir: None,
        })
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut raw = Self::parse(&text)?;
        raw.base_dir = path.parent().map(Path::to_path_buf);
        Ok(raw)
    }

    pub fn base_dir(&self) -> Option<&Path> {
        self.base_dir.as_deref()
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.into());
    }

    /// Overrides `section.key`.
    pub fn set_parameter(&mut self, parameter: &str, value: &str) -> LabResult<()> {
        let (section, key) = split_parameter(parameter)?;
        self.set(&section, &key, value);
        Ok(())
    }

    fn section<'a>(&'a self, name: &'a str) -> LabResult<Section<'a>> {
        match self.sections.get(name) {
            Some(map) => Ok(Section {
                name,
                map: Some(map),
            }),
            None => Err(LabError::MissingSection(name.into())),
        }
    }

    fn optional_section<'a>(&'a self, name: &'a str) -> Section<'a> {
        Section {
            name,
            map: self.sections.get(name),
        }
    }
}

pub fn split_parameter(parameter: &str) -> LabResult<(String, String)> {
    match parameter.split_once('.') {
        Some((s, k)) if SECTIONS.contains(&s) && !k.is_empty() => {
            Ok((s.to_string(), k.to_string()))
        }
        _ => Err(LabError::UnknownParameter(parameter.into())),
    }
}

pub(crate) struct Section<'a> {
    name: &'a str,
    map: Option<&'a BTreeMap<String, String>>,
}

impl Section<'_> {
    pub(crate) fn raw(&self, key: &str) -> Option<&str> {
        self.map.and_then(|m| m.get(key)).map(String::as_str)
    }

    pub(crate) fn invalid(&self, key: &str, value: &str, reason: impl Into<String>) -> LabError {
        LabError::InvalidValue {
            section: self.name.into(),
            key: key.into(),
            value: value.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn require<T: FromStr>(&self, key: &str) -> LabResult<T> {
        self.optional(key)?.ok_or_else(|| LabError::MissingKey {
            key: key.into(),
            section: self.name.into(),
        })
    }

    pub(crate) fn optional<T: FromStr>(&self, key: &str) -> LabResult<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| {
                self.invalid(key, v, format!("expected {}", std::any::type_name::<T>()))
            }),
        }
    }

    pub(crate) fn or<T: FromStr>(&self, key: &str, default: T) -> LabResult<T> {
        Ok(self.optional(key)?.unwrap_or(default))
    }

    pub(crate) fn flag(&self, key: &str, default: bool) -> LabResult<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => Ok(true),
                "false" | "no" | "0" | "off" => Ok(false),
                _ => Err(self.invalid(key, v, "expected a boolean")),
            },
        }
    }

    pub(crate) fn list<T: FromStr>(&self, key: &str) -> LabResult<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) if v.trim().is_empty() => Ok(Some(Vec::new())),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<T>()
                        .map_err(|_| self.invalid(key, v, "expected a comma-separated list"))
                })
                .collect::<LabResult<Vec<T>>>()
                .map(Some),
        }
    }

    fn model<T>(&self, key: &str, value: &str, r: gevrey_core::Result<T>) -> LabResult<T> {
        r.map_err(|e| self.invalid(key, value, e.to_string()))
    }
}

/// A norm recorded as one CSV column.
#[derive(Debug, Clone, PartialEq)]
pub enum NormDescriptor {
    /// `‖Λ^β u‖_{L^p}`.
    Sobolev { beta: f64, p: f64 },
    /// Gevrey norm with `s = t`, `L^p` flavor.
    Gevrey { beta: f64, p: f64 },
    /// Gevrey norm with `s = t`, Fourier-`L¹` flavor.
    GevreyFourier { beta: f64 },
    /// Physical amplitude of the mode `m` (`2|û(m)|`, or `|û(0)|` for the mean).
    Mode { m: [i64; 2] },
    /// Analyticity radius.
    Radius,
    /// `‖u‖²_{L²}`.
    L2Squared,
}

fn parse_exponent(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "infinity" => Some(f64::INFINITY),
        other => other.parse().ok(),
    }
}

fn format_number(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

impl NormDescriptor {
    pub fn parse(text: &str, dim: usize) -> Option<Self> {
        let parts: Vec<&str> = text.trim().split(':').map(str::trim).collect();
        let num = |i: usize| parts.get(i).and_then(|s| parse_exponent(s));
        let d = match (parts[0], parts.len()) {
            ("sobolev", 3) => NormDescriptor::Sobolev {
                beta: num(1)?,
                p: num(2)?,
            },
            ("gevrey", 3) => NormDescriptor::Gevrey {
                beta: num(1)?,
                p: num(2)?,
            },
            ("gevrey_fourier", 2) => NormDescriptor::GevreyFourier { beta: num(1)? },
            ("mode", n) if n == 1 + dim => {
                let mut m = [0i64; 2];
                for (i, s) in parts[1..].iter().enumerate() {
                    m[i] = s.parse().ok()?;
                }
                NormDescriptor::Mode { m }
            }
            ("radius", 1) => NormDescriptor::Radius,
            ("l2sq", 1) => NormDescriptor::L2Squared,
            _ => return None,
        };
        match d {
            NormDescriptor::Sobolev { p, .. } | NormDescriptor::Gevrey { p, .. } if p < 1.0 => None,
            d => Some(d),
        }
    }

    /// Column label; parsing the label gives back the descriptor.
    pub fn label(&self, dim: usize) -> String {
        match self {
            NormDescriptor::Sobolev { beta, p } => {
                format!("sobolev:{}:{}", format_number(*beta), format_number(*p))
            }
            NormDescriptor::Gevrey { beta, p } => {
                format!("gevrey:{}:{}", format_number(*beta), format_number(*p))
            }
            NormDescriptor::GevreyFourier { beta } => {
                format!("gevrey_fourier:{}", format_number(*beta))
            }
            NormDescriptor::Mode { m } => match dim {
                1 => format!("mode:{}", m[0]),
                _ => format!("mode:{}:{}", m[0], m[1]),
            },
            NormDescriptor::Radius => "radius".into(),
            NormDescriptor::L2Squared => "l2sq".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySettings {
    pub zetas: Vec<f64>,
    pub p: f64,
    pub window: TimeWindow,
    pub mode: DecayMode,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GevreyBoundSettings {
    pub beta: f64,
    pub p: f64,
    pub flavor: GevreyFlavor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsConfig {
    pub norms: Vec<NormDescriptor>,
    /// Lebesgue exponent for the reported β_c.
    pub p: f64,
    pub decay: Option<DecaySettings>,
    pub gevrey_bound: Option<GevreyBoundSettings>,
    pub radius_tracker: bool,
    pub radius_floor: f64,
    pub energy_check: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub equation: EquationSpec,
    pub grid: Grid,
    pub integrator: IntegratorConfig,
    pub initial: InitialCondition,
    pub diagnostics: DiagnosticsConfig,
    pub output: OutputConfig,
    pub raw: RawConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> LabResult<Self> {
        Self::from_raw(RawConfig::parse(text)?)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        Self::from_raw(RawConfig::load(path)?)
    }

    pub fn from_raw(raw: RawConfig) -> LabResult<Self> {
        let equation = parse_equation(&raw.section("equation")?)?;
        let grid = parse_grid(&raw.section("grid")?, equation.dim())?;
        let integrator = parse_integrator(&raw.section("integrator")?)?;
        let initial =
            InitialCondition::parse(&raw.section("initial")?, &grid, equation.dealias_rule())?;
        let diagnostics = parse_diagnostics(&raw.optional_section("diagnostics"), &equation)?;
        let output = parse_output(&raw.optional_section("output"), raw.base_dir());
        Ok(Self {
            equation,
            grid,
            integrator,
            initial,
            diagnostics,
            output,
            raw,
        })
    }

    /// Columns written to the CSV, including the Sobolev norms needed by decay fits.
    pub fn columns(&self) -> Vec<NormDescriptor> {
        let mut cols = self.diagnostics.norms.clone();
        if let Some(decay) = &self.diagnostics.decay {
            for &zeta in &decay.zetas {
                let d = NormDescriptor::Sobolev {
                    beta: zeta,
                    p: decay.p,
                };
                if !cols.contains(&d) {
                    cols.push(d);
                }
            }
        }
        cols
    }
}

fn parse_equation(s: &Section) -> LabResult<EquationSpec> {
    let kind: String = s.require("kind")?;
    let kappa: f64 = s.require("kappa")?;
    let dim_default = match kind.as_str() {
        "burgers" => 1,
        _ => 2,
    };
    let dim: usize = s.or("dim", dim_default)?;
    let dim_str = dim.to_string();
    let kind_str = kind.clone();
    let spec = match kind.as_str() {
        "fractional_heat" => {
            let degree: usize = s.require("degree")?;
            let coefficient: f64 = s.or("coefficient", 1.0)?;
            s.model("kind", &kind_str, EquationSpec::fractional_heat(dim, kappa, degree, coefficient))?
        }
        "burgers" => {
            if dim != 1 {
                return Err(s.invalid("dim", &dim_str, "Burgers equations are one-dimensional"));
            }
            let degree: usize = s.require("degree")?;
            s.model("degree", &degree.to_string(), EquationSpec::burgers(degree))?
        }
        "sqg" => {
            if dim != 2 {
                return Err(s.invalid("dim", &dim_str, "SQG is two-dimensional"));
            }
            s.model("kappa", &kappa.to_string(), EquationSpec::sqg(kappa))?
        }
        "navier_stokes" => {
            if dim != 2 {
                return Err(s.invalid("dim", &dim_str, "only the two-dimensional vorticity form can be simulated"));
            }
            s.model("dim", &dim_str, EquationSpec::navier_stokes(dim))?
        }
        "cahn_hilliard_cubic" => {
            let beta: f64 = s.or("beta", 1.0)?;
            s.model("beta", &beta.to_string(), EquationSpec::cahn_hilliard_cubic(dim, beta))?
        }
        "cahn_hilliard_general" => {
            let coefficients: Vec<f64> = s.list("coefficients")?.ok_or_else(|| LabError::MissingKey {
                key: "coefficients".into(),
                section: "equation".into(),
            })?;
            let raw = s.raw("coefficients").unwrap_or_default().to_string();
            s.model("coefficients", &raw, EquationSpec::cahn_hilliard_general(dim, coefficients))?
        }
        other => {
            return Err(s.invalid(
                "kind",
                other,
                "expected fractional_heat, burgers, sqg, navier_stokes, cahn_hilliard_cubic or cahn_hilliard_general",
            ))
        }
    };
    if spec.dim() > 2 {
        return Err(s.invalid(
            "dim",
            &dim_str,
            "only one- and two-dimensional grids are simulated",
        ));
    }
    let mut spec = if (spec.kappa() - kappa).abs() > 0.0 {
        s.model("kappa", &kappa.to_string(), spec.with_kappa(kappa))?
    } else {
        spec
    };
    if let Some(alpha) = s.list::<f64>("alpha_t")? {
        let raw = s.raw("alpha_t").unwrap_or_default().to_string();
        spec = s.model("alpha_t", &raw, spec.with_alpha_t(alpha))?;
    }
    if let Some(nu) = s.optional::<f64>("viscosity")? {
        spec = s.model("viscosity", &nu.to_string(), spec.with_viscosity(nu))?;
    }
    if let Some(rule) = s.optional::<f64>("dealias")? {
        spec = s.model("dealias", &rule.to_string(), spec.with_dealias_rule(rule))?;
    }
    if !s.flag("nonlinear", true)? {
        spec = spec.linear_only();
    }
    Ok(spec)
}

fn parse_grid(s: &Section, dim: usize) -> LabResult<Grid> {
    let points: usize = s.require("points")?;
    let length: f64 = s.or("length", TAU)?;
    Grid::new(dim, points, length)
        .map_err(|e| s.invalid("points", &points.to_string(), e.to_string()))
}

fn parse_integrator(s: &Section) -> LabResult<IntegratorConfig> {
    let scheme = match s.raw("scheme").unwrap_or("etdrk2") {
        "etdrk2" => Scheme::Etdrk2,
        "exponential_euler" => Scheme::ExponentialEuler,
        other => return Err(s.invalid("scheme", other, "expected etdrk2 or exponential_euler")),
    };
    let dt: f64 = s.require("dt")?;
    let t_end: f64 = s.require("t_end")?;
    let mut cfg = IntegratorConfig::new(scheme, dt, t_end).with_stride(s.or("stride", 1)?);
    cfg.blowup_threshold = s.or("blowup_threshold", cfg.blowup_threshold)?;
    cfg.validate()
        .map_err(|e| s.invalid("dt", s.raw("dt").unwrap_or_default(), e.to_string()))?;
    Ok(cfg)
}

/// The `p` with `d/p = (κ - Σα)/(n - 1)`, so that `β_c = 0`.
fn critical_exponent(spec: &EquationSpec) -> Option<f64> {
    let sum: f64 = spec.alpha_t().iter().sum();
    let gap = spec.kappa() - sum;
    let p = spec.dim() as f64 * (spec.degree() - 1) as f64 / gap;
    (gap > 0.0 && p > 1.0).then_some(p)
}

fn parse_diagnostics(s: &Section, spec: &EquationSpec) -> LabResult<DiagnosticsConfig> {
    let dim = spec.dim();
    let norms = match s.raw("norms") {
        None => Vec::new(),
        Some(text) => text
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                NormDescriptor::parse(t, dim).ok_or_else(|| {
                    s.invalid(
                        "norms",
                        t.trim(),
                        format!("not a valid norm descriptor for a {dim}D equation"),
                    )
                })
            })
            .collect::<LabResult<Vec<_>>>()?,
    };
    let p = match s.raw("p") {
        None => 2.0,
        Some("critical") => critical_exponent(spec).ok_or_else(|| {
            s.invalid(
                "p",
                "critical",
                format!("no p > 1 makes the critical exponent of {spec} vanish"),
            )
        })?,
        Some(v) => parse_exponent(v)
            .filter(|p| *p > 1.0)
            .ok_or_else(|| s.invalid("p", v, "expected a number > 1 or critical"))?,
    };
    let decay = match s.list::<f64>("zeta")? {
        None => None,
        Some(zetas) if zetas.is_empty() => None,
        Some(zetas) => {
            let window: Vec<f64> = s.list("fit_window")?.ok_or_else(|| LabError::MissingKey {
                key: "fit_window".into(),
                section: "diagnostics".into(),
            })?;
            let raw_window = s.raw("fit_window").unwrap_or_default().to_string();
            if window.len() != 2 {
                return Err(s.invalid("fit_window", &raw_window, "expected two times"));
            }
            let window = s.model(
                "fit_window",
                &raw_window,
                TimeWindow::new(window[0], window[1]),
            )?;
            let mode = match s.raw("decay_mode").unwrap_or("power_law") {
                "power_law" => DecayMode::PowerLaw,
                "one_sided" => DecayMode::OneSided,
                other => {
                    return Err(s.invalid("decay_mode", other, "expected power_law or one_sided"))
                }
            };
            Some(DecaySettings {
                zetas,
                p,
                window,
                mode,
                tolerance: s.or("tolerance", 0.05)?,
            })
        }
    };
    let gevrey_bound = if s.flag("gevrey_bound", false)? {
        let flavor = match s.raw("gevrey_flavor").unwrap_or("lp") {
            "lp" => GevreyFlavor::Lp,
            "fourier" => GevreyFlavor::FourierL1,
            other => return Err(s.invalid("gevrey_flavor", other, "expected lp or fourier")),
        };
        Some(GevreyBoundSettings {
            beta: s.or("gevrey_beta", 0.0)?,
            p: s.or("gevrey_p", 2.0)?,
            flavor,
        })
    } else {
        None
    };
    Ok(DiagnosticsConfig {
        norms,
        p,
        decay,
        gevrey_bound,
        radius_tracker: s.flag("radius_tracker", false)?,
        radius_floor: s.or("radius_floor", 1e-12)?,
        energy_check: s.flag("energy_check", false)?,
    })
}

fn parse_output(s: &Section, base: Option<&Path>) -> OutputConfig {
    let resolve = |key: &str| {
        s.raw(key).filter(|v| !v.is_empty()).map(|v| {
            let p = PathBuf::from(v);
            match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            }
        })
    };
    OutputConfig {
        csv: resolve("csv"),
        json: resolve("json"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAT: &str = "
[equation]
kind = fractional_heat
kappa = 2
dim = 1
degree = 3
nonlinear = false

[grid]
points = 64

[integrator]
dt = 0.01
t_end = 1

[initial]
kind = single_mode
k = 1
amplitude = 1

[diagnostics]
norms = mode:1, sobolev:1:2, radius
";

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::parse(HEAT).unwrap();
        assert_eq!(cfg.grid.points(), 64);
        assert!(!cfg.equation.nonlinear_enabled());
        assert_eq!(cfg.columns().len(), 3);
        assert_eq!(cfg.columns()[1].label(1), "sobolev:1:2");
    }

    #[test]
    fn missing_kappa_names_key_and_section() {
        let err = ExperimentConfig::parse(&HEAT.replace("kappa = 2\n", "")).unwrap_err();
        assert_eq!(err.to_string(), "missing key kappa in [equation]");
    }

    #[test]
    fn random_data_needs_seed() {
        let text = HEAT.replace("kind = single_mode\nk = 1", "kind = random_band\nband = 5");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert_eq!(err.to_string(), "missing key seed in [initial]");
    }

    #[test]
    fn norms_must_fit_dimension() {
        let err = ExperimentConfig::parse(&HEAT.replace("mode:1,", "mode:1:2,")).unwrap_err();
        assert!(err.to_string().contains("norms"), "{err}");
    }

    #[test]
    fn descriptor_labels_round_trip() {
        for text in [
            "sobolev:0.5:inf",
            "gevrey:0:2",
            "gevrey_fourier:1.5",
            "mode:3:-2",
            "radius",
            "l2sq",
        ] {
            let d = NormDescriptor::parse(text, 2).unwrap();
            assert_eq!(d.label(2), text);
        }
        assert!(NormDescriptor::parse("sobolev:1", 1).is_none());
        assert!(NormDescriptor::parse("sobolev:1:0.5", 1).is_none());
    }

    #[test]
    fn overrides_replace_values() {
        let mut raw = RawConfig::parse(HEAT).unwrap();
        raw.set_parameter("equation.kappa", "4").unwrap();
        assert_eq!(
            ExperimentConfig::from_raw(raw.clone())
                .unwrap()
                .equation
                .kappa(),
            4.0
        );
        assert!(raw.set_parameter("kappa", "4").is_err());
        assert!(raw.set_parameter("nowhere.kappa", "4").is_err());
    }

    #[test]
    fn unknown_kind_is_reported() {
        let err = ExperimentConfig::parse(&HEAT.replace("fractional_heat", "kdv")).unwrap_err();
        assert!(err
            .to_string()
            .starts_with("invalid value \"kdv\" for key kind in [equation]"));
    }

    #[test]
    fn critical_p_zeroes_beta_c() {
        let sqg = "[equation]\nkind = sqg\nkappa = 1.25\n[grid]\npoints = 16\n[integrator]\ndt = 0.1\nt_end = 1\n\
                   [initial]\nkind = single_mode\nk = 1, 0\n[diagnostics]\np = critical\n";
        let cfg = ExperimentConfig::parse(sqg).unwrap();
        assert!((cfg.diagnostics.p - 8.0).abs() < 1e-12);
        let heat = HEAT.replace("norms = mode:1, sobolev:1:2, radius", "p = critical");
        assert!(ExperimentConfig::parse(&heat).is_err());
    }
}
