//! Acceptance criteria 1 to 10. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.
//!
//! Expected values come from reference computations written in this file,
//! mostly closed forms and a dense convolution. Library verdicts are
//! re-derived from the recorded time series rather than trusted.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use gevrey_core::equations::{compute_beta_c, evaluate_nonlinearity, EquationSpec, Nonlinearity};
use gevrey_core::norms::{
    analyticity_radius, bony_decomposition, gevrey_norm, lp_block, lp_low_block, sobolev_norm,
    GevreyParams, LPBank,
};
use gevrey_core::spectral::{smoothing_maximum, Grid, SpectralField};
use gevrey_core::timestepping::{integrate, picard_solve, IntegratorConfig, PicardConfig, Scheme};
use gevrey_lab::config::{ExperimentConfig, RawConfig};
use gevrey_lab::initial::InitialCondition;
use gevrey_lab::runner::{execute, run_file, RunOutput};
use gevrey_lab::suites::{norm_machinery_measurements, KATO_PONCE_BOUND, TL_SOBOLEV_RATIO_BOUNDS};
use num_complex::Complex64;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn experiment_text(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../experiments")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run_experiment(
    name: &str,
    overrides: &[(&str, &str)],
) -> Result<(ExperimentConfig, RunOutput), String> {
    let mut raw = RawConfig::parse(&experiment_text(name)).map_err(|e| e.to_string())?;
    for (k, v) in overrides {
        raw.set_parameter(k, v).map_err(|e| e.to_string())?;
    }
    let cfg = ExperimentConfig::from_raw(raw).map_err(|e| e.to_string())?;
    let out = execute(&cfg).map_err(|e| e.to_string())?;
    Ok((cfg, out))
}

fn column(out: &RunOutput, label: &str) -> Result<Vec<f64>, String> {
    out.record
        .column(label)
        .ok_or_else(|| format!("column {label} missing"))
}

fn random_field(grid: Grid, band: i64, l2: f64, seed: u64) -> SpectralField {
    InitialCondition::RandomBand {
        seed,
        band,
        amplitude: 1.0,
        spectral_decay: 0.0,
        l2_norm: Some(l2),
    }
    .build(&grid)
    .unwrap()
}

/// Largest `t^γ v(t)` over `[a, b]` against the largest over `[a, min(10a, b)]`.
fn one_sided_holds(times: &[f64], values: &[f64], gamma: f64, a: f64, b: f64) -> (bool, f64) {
    let weighted = |lo: f64, hi: f64| {
        times
            .iter()
            .zip(values)
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .map(|(t, v)| t.powf(gamma) * v)
            .fold(0.0, f64::max)
    };
    let first = weighted(a, (10.0 * a).min(b));
    let all = weighted(a, b);
    (all <= first * (1.0 + 1e-12), all / first)
}

fn criterion_1() -> Outcome {
    // β_c = d/p - (κ - Σα)/(n - 1) with (d, p, κ, Σα, n) read off each equation.
    let by_hand =
        |d: f64, p: f64, kappa: f64, alpha: f64, n: f64| d / p - (kappa - alpha) / (n - 1.0);
    let cases = [
        (
            "3D NSE",
            EquationSpec::navier_stokes(3),
            2.0,
            by_hand(3.0, 2.0, 2.0, 1.0, 2.0),
        ),
        (
            "Burgers n=3",
            EquationSpec::burgers(3),
            2.0,
            by_hand(1.0, 2.0, 2.0, 1.0, 3.0),
        ),
        (
            "Cahn-Hilliard d=3",
            EquationSpec::cahn_hilliard_cubic(3, 1.0),
            2.0,
            by_hand(3.0, 2.0, 4.0, 2.0, 3.0),
        ),
        (
            "SQG kappa=1.5",
            EquationSpec::sqg(1.5),
            4.0,
            by_hand(2.0, 4.0, 1.5, 1.0, 2.0),
        ),
        (
            "heat d=2",
            EquationSpec::fractional_heat(2, 2.0, 3, 1.0),
            2.0,
            by_hand(2.0, 2.0, 2.0, 0.0, 3.0),
        ),
    ];
    let listed = [0.5, 0.0, 0.5, 0.0, 0.0];
    let mut shown = Vec::new();
    for ((name, spec, p, by_hand), value) in cases.into_iter().zip(listed) {
        let b = compute_beta_c(&spec.map_err(|e| e.to_string())?, p).map_err(|e| e.to_string())?;
        ensure(
            (b - value).abs() <= 1e-14 && (by_hand - value).abs() <= 1e-14,
            || format!("{name}: got {b}, expected {value}"),
        )?;
        shown.push(format!("{name}={b}"));
    }
    Ok(shown.join(", "))
}

fn criterion_2() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for kappa in [1.5, 2.0, 4.0] {
        // A cos(3x) on [0, 2π): |û(±3)| = A/2 and ‖Λu‖_{L²} = 3A√π, both times e^{-t 3^κ}.
        let text = experiment_text("linear_heat.ini")
            .replace("kappa = 2", &format!("kappa = {kappa}"))
            .replace(
                "kind = random_band\nseed = 1\nband = 8",
                "kind = single_mode\nk = 3\namplitude = 1.5",
            )
            .replace(
                "norms = mode:1, mode:2, mode:3",
                "norms = mode:3, sobolev:1:2",
            );
        let path = dir.path().join(format!("heat_{kappa}.ini"));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        run_file(&path).map_err(|e| e.to_string())?;
        let csv = std::fs::read_to_string(dir.path().join("out/linear_heat.csv"))
            .map_err(|e| e.to_string())?;
        let mut lines = csv.lines();
        ensure(lines.next() == Some("t,mode:3,sobolev:1:2"), || {
            "unexpected CSV header".into()
        })?;
        let mut rows = 0;
        for line in lines {
            let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            let decay = (-v[0] * 3f64.powf(kappa)).exp();
            worst = worst
                .max((v[1] / (1.5 * decay) - 1.0).abs())
                .max((v[2] / (3.0 * 1.5 * PI.sqrt() * decay) - 1.0).abs());
            rows += 1;
        }
        ensure(rows == 11, || format!("kappa {kappa}: {rows} rows"))?;
    }
    ensure(worst <= 1e-12, || format!("max relative error {worst:.3e}"))?;
    Ok(format!(
        "max relative error {worst:.2e} for kappa in {{1.5, 2, 4}}"
    ))
}

fn criterion_3() -> Outcome {
    let grid = Grid::periodic_2pi(1, 64).unwrap();
    let spec = EquationSpec::burgers(3).unwrap();
    let u0 = random_field(grid, 8, 0.5, 77);
    let mut cfg = PicardConfig::new(0.1, 201);
    cfg.tolerance = 1e-14;
    let picard = picard_solve(&spec, &u0, &cfg).map_err(|e| e.to_string())?;
    let etd = integrate(
        &spec,
        &u0,
        &IntegratorConfig::new(Scheme::Etdrk2, 1e-4, 0.1),
        &mut |_, _| {},
    )
    .map_err(|e| e.to_string())?;
    let gap = picard.final_state().l2_distance(&etd.final_field).unwrap();
    // The flow must actually be nonlinear over the horizon for the comparison to mean anything.
    let linear = integrate(
        &spec.clone().linear_only(),
        &u0,
        &IntegratorConfig::new(Scheme::Etdrk2, 1e-4, 0.1),
        &mut |_, _| {},
    )
    .map_err(|e| e.to_string())?;
    let nonlinear_effect = linear.final_field.l2_distance(&etd.final_field).unwrap();
    ensure(gap < 1e-5, || format!("L2 gap {gap:.3e}"))?;
    ensure(nonlinear_effect > 100.0 * gap, || {
        format!("nonlinear effect {nonlinear_effect:.3e} too small")
    })?;
    Ok(format!(
        "L2 gap {gap:.2e} after {} Picard iterations (nonlinear effect {nonlinear_effect:.2e})",
        picard.iterations
    ))
}

/// Dense coefficient table on frequencies `-B..=B` per axis.
#[derive(Clone)]
struct Dense {
    dim: usize,
    band: i64,
    c: HashMap<(i64, i64), Complex64>,
}

impl Dense {
    fn from_field(f: &SpectralField, band: i64) -> Self {
        let dim = f.grid().dim();
        let mut c = HashMap::new();
        let ys = if dim == 2 { -band..=band } else { 0..=0 };
        for m0 in -band..=band {
            for m1 in ys.clone() {
                c.insert((m0, m1), f.mode([m0, m1]));
            }
        }
        Self { dim, band, c }
    }

    fn get(&self, m: (i64, i64)) -> Complex64 {
        self.c.get(&m).copied().unwrap_or_default()
    }

    /// `(fg)^(m) = Σ_{a+b=m} f̂(a) ĝ(b)`, for every output `m` in the sum band.
    fn times(&self, other: &Dense) -> Dense {
        let band = self.band + other.band;
        let mut c = HashMap::new();
        let range = |b: i64| if self.dim == 2 { -b..=b } else { 0..=0 };
        for m0 in -band..=band {
            for m1 in range(band) {
                let mut s = Complex64::new(0.0, 0.0);
                for a0 in -self.band..=self.band {
                    for a1 in range(self.band) {
                        s += self.get((a0, a1)) * other.get((m0 - a0, m1 - a1));
                    }
                }
                c.insert((m0, m1), s);
            }
        }
        Dense {
            dim: self.dim,
            band,
            c,
        }
    }

    fn map(&self, f: impl Fn(f64, f64) -> Complex64) -> Dense {
        let c = self
            .c
            .iter()
            .map(|(m, v)| (*m, v * f(m.0 as f64, m.1 as f64)))
            .collect();
        Dense { c, ..self.clone() }
    }

    fn plus(&self, other: &Dense, a: f64) -> Dense {
        let band = self.band.max(other.band);
        let mut c = self.c.clone();
        for (m, v) in &other.c {
            *c.entry(*m).or_default() += a * v;
        }
        Dense {
            dim: self.dim,
            band,
            c,
        }
    }
}

fn reference_nonlinearity(spec: &EquationSpec, u: &Dense) -> Dense {
    let pow = |n: usize| (1..n).fold(u.clone(), |acc, _| acc.times(u));
    let i = Complex64::new(0.0, 1.0);
    let lap = |k0: f64, k1: f64| Complex64::new(-(k0 * k0 + k1 * k1), 0.0);
    match spec.nonlinearity() {
        Nonlinearity::FractionalHeat { coefficient } => {
            pow(spec.degree()).map(|_, _| Complex64::new(*coefficient, 0.0))
        }
        Nonlinearity::Burgers => pow(spec.degree()).map(|k0, _| i * k0),
        Nonlinearity::CahnHilliardCubic { beta } => pow(3).map(|k0, k1| *beta * lap(k0, k1)),
        Nonlinearity::CahnHilliardGeneral { coefficients } => {
            let mut f = u.map(|_, _| Complex64::new(0.0, 0.0));
            for (j, a) in coefficients.iter().enumerate() {
                f = f.plus(&pow(j + 1), *a);
            }
            f.map(lap)
        }
        Nonlinearity::Sqg | Nonlinearity::NavierStokes => {
            // SQG: u = (-R₂θ, R₁θ) with R_j ↔ i k_j/|k|.
            // 2D vorticity: ψ solves Δψ = ω and u = (-∂₂ψ, ∂₁ψ).
            let sqg = matches!(spec.nonlinearity(), Nonlinearity::Sqg);
            let (u1, u2) = if sqg {
                let r = |k0: f64, k1: f64| (k0 * k0 + k1 * k1).sqrt();
                (
                    u.map(|k0, k1| {
                        if r(k0, k1) == 0.0 {
                            0.0.into()
                        } else {
                            -i * k1 / r(k0, k1)
                        }
                    }),
                    u.map(|k0, k1| {
                        if r(k0, k1) == 0.0 {
                            0.0.into()
                        } else {
                            i * k0 / r(k0, k1)
                        }
                    }),
                )
            } else {
                let psi = u.map(|k0, k1| {
                    let r2 = k0 * k0 + k1 * k1;
                    if r2 == 0.0 {
                        0.0.into()
                    } else {
                        Complex64::new(-1.0 / r2, 0.0)
                    }
                });
                (psi.map(|_, k1| -i * k1), psi.map(|k0, _| i * k0))
            };
            let f1 = u1.times(u).map(|k0, _| -i * k0);
            let f2 = u2.times(u).map(|_, k1| -i * k1);
            f1.plus(&f2, 1.0)
        }
    }
}

fn criterion_4() -> Outcome {
    // N = 32 keeps |m| <= 10; bands are chosen so that n·band <= 10 and the
    // truncation after each product never acts.
    let cases: Vec<(EquationSpec, usize, i64)> = vec![
        (
            EquationSpec::fractional_heat(2, 2.0, 3, -0.8).unwrap(),
            2,
            3,
        ),
        (EquationSpec::burgers(3).unwrap(), 1, 3),
        (EquationSpec::sqg(1.5).unwrap(), 2, 5),
        (EquationSpec::navier_stokes(2).unwrap(), 2, 5),
        (EquationSpec::cahn_hilliard_cubic(2, 0.6).unwrap(), 2, 3),
        (
            EquationSpec::cahn_hilliard_general(1, vec![0.1, 0.7, -0.4, -0.3, 0.9]).unwrap(),
            1,
            2,
        ),
    ];
    let mut worst: f64 = 0.0;
    for (idx, (spec, dim, band)) in cases.iter().enumerate() {
        let grid = Grid::periodic_2pi(*dim, 32).unwrap();
        let u = random_field(grid, *band, 1.3, 900 + idx as u64);
        let got = evaluate_nonlinearity(spec, &u).map_err(|e| e.to_string())?;
        let want = reference_nonlinearity(spec, &Dense::from_field(&u, *band));
        let scale = want.c.values().map(|v| v.norm()).fold(0.0, f64::max);
        let mut err: f64 = 0.0;
        for (flat, c) in got.coeffs().iter().enumerate() {
            let m = grid.frequencies(flat);
            err = err.max((c - want.get((m[0], m[1]))).norm());
        }
        let covered = want.c.keys().all(|m| m.0.abs() <= 10 && m.1.abs() <= 10);
        ensure(covered, || {
            format!("{spec}: reference support exceeds the grid band")
        })?;
        ensure(err / scale <= 1e-10, || {
            format!("{spec}: relative error {:.3e}", err / scale)
        })?;
        worst = worst.max(err / scale);
    }
    Ok(format!("six instances, max relative error {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let (cfg, out) = run_experiment("heat_gaussian.ini", &[])?;
    ensure(
        cfg.grid.points() == 4096 && cfg.grid.length() == 200.0,
        || "unexpected grid".into(),
    )?;
    let InitialCondition::GaussianBump {
        width, amplitude, ..
    } = cfg.initial
    else {
        return Err("expected Gaussian data".into());
    };
    let values = column(&out, "sobolev:1:2")?;
    // ‖∂ₓu(t)‖² = A² w² Γ(3/2) (w² + 2t)^{-3/2} for the whole-line heat flow.
    let oracle = |t: f64| {
        (amplitude.powi(2)
            * width.powi(2)
            * (PI.sqrt() / 2.0)
            * (width.powi(2) + 2.0 * t).powf(-1.5))
        .sqrt()
    };
    let mut worst: f64 = 0.0;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (t, v) in out.record.times.iter().zip(&values) {
        worst = worst.max((v / oracle(*t) - 1.0).abs());
        if (5.0..=50.0).contains(t) {
            xs.push(t.ln());
            ys.push(v.ln());
        }
    }
    ensure(worst < 1e-8, || {
        format!("norm deviates from closed form by {worst:.3e}")
    })?;
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = -sxy / sxx;
    let fit = out.fits[0].result.as_ref().map_err(|e| e.clone())?;
    ensure((fit.fitted_exponent - slope).abs() < 1e-9, || {
        format!("library fit {} vs direct OLS {slope}", fit.fitted_exponent)
    })?;
    ensure((slope - 0.75).abs() <= 0.05, || {
        format!("fitted exponent {slope:.4}")
    })?;
    ensure(out.record.wraparound_time.is_none(), || {
        "mass reached the box edge".into()
    })?;
    Ok(format!(
        "fitted exponent {slope:.4} on [5, 50] ({} samples), target 0.75",
        xs.len()
    ))
}

fn burgers() -> Result<(ExperimentConfig, RunOutput), String> {
    run_experiment("burgers_small_data.ini", &[])
}

fn criterion_6(run: &(ExperimentConfig, RunOutput)) -> Outcome {
    let (cfg, out) = run;
    let u0 = cfg.initial.build(&cfg.grid).map_err(|e| e.to_string())?;
    ensure((u0.l2_norm() - 1e-2).abs() < 1e-15, || {
        format!("‖u0‖ = {}", u0.l2_norm())
    })?;
    let gv = column(out, "gevrey:0:2")?;
    ensure(
        out.record.status.is_completed() && out.record.final_time >= 10.0 - 1e-9,
        || {
            format!(
                "run ended at {} with {:?}",
                out.record.final_time, out.record.status
            )
        },
    )?;
    ensure(gv.iter().all(|v| v.is_finite()), || {
        "non-finite Gevrey norm".into()
    })?;
    let sup = gv.iter().copied().fold(0.0, f64::max);
    ensure(sup <= 2.0 * u0.l2_norm(), || {
        format!("sup {sup:.4e} > 2‖u0‖")
    })?;
    Ok(format!(
        "sup ‖u(t)‖_Gv(t) = {sup:.4e} <= {:.1e} over {} samples",
        2.0 * u0.l2_norm(),
        gv.len()
    ))
}

fn criterion_7(run: &(ExperimentConfig, RunOutput)) -> Outcome {
    let (_, out) = run;
    let radius = out
        .record
        .radius
        .as_ref()
        .ok_or("radius tracker disabled")?;
    let saturation = radius
        .saturation_time
        .ok_or("radius never saturated on this grid")?;
    let rho: Vec<(f64, f64)> = radius
        .samples
        .iter()
        .take_while(|s| !s.saturated)
        .map(|s| (s.t, s.rho.unwrap_or(f64::NAN)))
        .collect();
    ensure(rho.len() >= 10, || {
        format!("only {} pre-saturation samples", rho.len())
    })?;
    ensure(rho.iter().all(|(_, r)| *r > 0.0), || {
        "non-positive radius".into()
    })?;
    let drop = rho
        .windows(2)
        .map(|w| w[0].1 - w[1].1)
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(drop <= 1e-9, || format!("radius decreased by {drop:.3e}"))?;

    // Control: flat spectrum under e^{-t|k|}; the exact radius is t.
    let grid = Grid::periodic_2pi(1, 64).unwrap();
    let mut flat = SpectralField::zeros(grid);
    for m in 1..=21i64 {
        let phase = Complex64::from_polar(1.0, 0.37 * m as f64);
        flat.set_mode([m, 0], phase);
        flat.set_mode([-m, 0], phase.conj());
    }
    let mut control_dev: f64 = 0.0;
    for step in 1..=20 {
        let t = 0.025 * step as f64;
        let mut f = flat.clone();
        for (flat_idx, c) in f.coeffs_mut().iter_mut().enumerate() {
            let m = grid.frequencies(flat_idx)[0].abs() as f64;
            *c *= (-t * m).exp();
        }
        let r = analyticity_radius(&f, 1e-12).map_err(|e| e.to_string())?;
        control_dev = control_dev.max((r / t - 1.0).abs());
    }
    ensure(control_dev <= 0.02, || {
        format!("control deviates by {control_dev:.3e}")
    })?;
    Ok(format!(
        "rho from {:.4} to {:.4} over {} samples before saturation at t={saturation}; control |rho/t-1| <= {control_dev:.1e}",
        rho[0].1,
        rho[rho.len() - 1].1,
        rho.len()
    ))
}

fn criterion_8() -> Outcome {
    let kappas = ["1.25", "1.5", "2.0"];
    let runs: Vec<Result<(ExperimentConfig, RunOutput), String>> = std::thread::scope(|s| {
        let handles: Vec<_> = kappas
            .iter()
            .map(|k| s.spawn(move || run_experiment("sqg_decay.ini", &[("equation.kappa", k)])))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut ratios = Vec::new();
    for (k, run) in kappas.iter().zip(runs) {
        let (cfg, out) = run?;
        let kappa: f64 = k.parse().unwrap();
        ensure(cfg.grid.points() == 256, || "expected N = 256".into())?;
        ensure(
            (cfg.diagnostics.p - 2.0 / (kappa - 1.0)).abs() < 1e-12,
            || format!("p = {}", cfg.diagnostics.p),
        )?;
        ensure(out.record.status.is_completed(), || {
            format!("kappa {k}: {:?}", out.record.status)
        })?;
        let window = cfg
            .diagnostics
            .decay
            .as_ref()
            .ok_or("no decay window")?
            .window;
        for zeta in [0.5, 1.0] {
            let values = column(&out, &format!("sobolev:{zeta}:{}", cfg.diagnostics.p))?;
            let (holds, ratio) = one_sided_holds(
                &out.record.times,
                &values,
                zeta / kappa,
                window.start,
                window.end,
            );
            ensure(holds, || {
                format!("kappa {k}, zeta {zeta}: ratio {ratio:.6}")
            })?;
            let fit = out
                .fits
                .iter()
                .find(|f| f.zeta == zeta)
                .ok_or("missing fit")?;
            ensure(fit.verdict(), || {
                format!("kappa {k}, zeta {zeta}: library verdict false")
            })?;
            ensure(
                fit.predicted
                    .is_some_and(|p| (p - zeta / kappa).abs() < 1e-14),
                || format!("kappa {k}, zeta {zeta}: predicted {:?}", fit.predicted),
            )?;
            ratios.push(ratio);
        }
    }
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    Ok(format!("6 one-sided checks, largest ratio {worst:.6}"))
}

fn criterion_9(burgers: &(ExperimentConfig, RunOutput)) -> Outcome {
    let ch = run_experiment("cahn_hilliard_energy.ini", &[])?;
    let mut shown = Vec::new();
    for (name, (cfg, out)) in [("Cahn-Hilliard", &ch), ("Burgers", burgers)] {
        ensure(out.record.status.is_completed(), || {
            format!("{name}: {:?}", out.record.status)
        })?;
        let u0 = cfg.initial.build(&cfg.grid).map_err(|e| e.to_string())?;
        let tol = 1e-8 * u0.l2_norm_squared();
        let e = column(out, "l2sq")?;
        let rise = e
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        ensure(rise <= tol, || {
            format!("{name}: L2² rose by {rise:.3e} > {tol:.3e}")
        })?;
        ensure(e.last().unwrap() < &e[0], || {
            format!("{name}: no dissipation")
        })?;
        shown.push(format!("{name} {} samples, max rise {rise:.1e}", e.len()));
    }
    Ok(shown.join("; "))
}

/// Maximum of `x^β e^{-t x^κ}` by a log-spaced scan refined with golden sections.
fn searched_maximum(beta: f64, t: f64, kappa: f64) -> f64 {
    let f = |y: f64| (beta * y - t * (kappa * y).exp()).exp();
    let ys: Vec<f64> = (0..=4000)
        .map(|i| -20.0 + 40.0 * i as f64 / 4000.0)
        .collect();
    let best = ys
        .iter()
        .copied()
        .fold(ys[0], |a, y| if f(y) > f(a) { y } else { a });
    let (mut a, mut b) = (best - 0.01, best + 0.01);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-12 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

fn criterion_10() -> Outcome {
    let grid = Grid::periodic_2pi(2, 32).unwrap();
    let f = random_field(grid, 10, 1.0, 314);
    let g = random_field(grid, 10, 1.0, 271);

    for beta in [0.0, 0.5, 1.5] {
        for p in [2.0, 3.0] {
            let a = gevrey_norm(&f, &GevreyParams::new(0.0, beta, 2.0, p)).unwrap();
            let b = sobolev_norm(&f, beta, p).unwrap();
            ensure((a - b).abs() <= 1e-12 * b, || {
                format!("Gevrey s=0 mismatch at beta {beta}, p {p}")
            })?;
        }
    }

    let bank = LPBank::build(&grid);
    let mut total = lp_low_block(&f, &bank).unwrap();
    for j in bank.j_min()..=bank.j_max() {
        total.axpy(1.0, &lp_block(&f, &bank, j).unwrap()).unwrap();
    }
    let lp_err = total.l2_distance(&f).unwrap() / f.l2_norm();
    ensure(lp_err <= 1e-12, || {
        format!("LP reconstruction error {lp_err:.3e}")
    })?;

    let ((lo, hi), kp) = norm_machinery_measurements().map_err(|e| e.to_string())?;
    let (blo, bhi) = TL_SOBOLEV_RATIO_BOUNDS;
    ensure(lo >= blo && hi <= bhi, || {
        format!("TL/Sobolev range [{lo}, {hi}] outside [{blo}, {bhi}]")
    })?;
    ensure(kp < KATO_PONCE_BOUND, || {
        format!("Kato-Ponce ratio {kp} >= {KATO_PONCE_BOUND}")
    })?;

    let dec = bony_decomposition(&f, &g, &bank).unwrap();
    let (pf, pg) = (f.to_physical().unwrap(), g.to_physical().unwrap());
    let mut bony_err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for ((x, y), r) in pf.iter().zip(&pg).zip(dec.reconstruct()) {
        bony_err = bony_err.max((x * y - r).abs());
        scale = scale.max((x * y).abs());
    }
    ensure(bony_err <= 1e-10 * scale, || {
        format!("Bony error {bony_err:.3e}")
    })?;

    let mut smooth_err: f64 = 0.0;
    for beta in [0.25, 1.0, 2.5] {
        for t in [0.05, 1.0, 20.0] {
            for kappa in [1.25, 2.0, 4.0] {
                let closed = (beta / (t * kappa * std::f64::consts::E)).powf(beta / kappa);
                let searched = searched_maximum(beta, t, kappa);
                let lib = smoothing_maximum(beta, t, kappa);
                smooth_err = smooth_err
                    .max((lib / closed - 1.0).abs())
                    .max((searched / closed - 1.0).abs());
            }
        }
    }
    ensure(smooth_err <= 1e-10, || {
        format!("smoothing maximum error {smooth_err:.3e}")
    })?;
    Ok(format!(
        "LP {lp_err:.1e}, TL/Sobolev [{lo:.4}, {hi:.4}], Kato-Ponce {kp:.4}, Bony {:.1e}, smoothing {smooth_err:.1e}",
        bony_err / scale
    ))
}

fn report(n: usize, name: &str, start: Instant, outcome: &Outcome) {
    let secs = start.elapsed().as_secs_f64();
    let line = match outcome {
        Ok(detail) => format!("criterion {n:>2} {name}: PASS ({secs:.1} s) {detail}\n"),
        Err(why) => format!("criterion {n:>2} {name}: FAIL ({secs:.1} s) {why}\n"),
    };
    // Written to the process stream directly so the line survives output capture.
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

#[test]
fn acceptance_criteria() {
    let mut failures = Vec::new();
    let mut record = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        report(n, name, start, &outcome);
        if outcome.is_err() {
            failures.push(n);
        }
    };
    record(1, "beta_c table", &mut criterion_1);
    record(2, "linear exactness", &mut criterion_2);
    record(3, "Picard vs ETDRK2", &mut criterion_3);
    record(4, "nonlinearity vs convolution", &mut criterion_4);
    record(5, "heat decay exponent", &mut criterion_5);
    // Criteria 6, 7 and 9 read the same shipped Burgers run.
    let shared = burgers();
    let with_burgers = |f: fn(&(ExperimentConfig, RunOutput)) -> Outcome| match &shared {
        Ok(run) => f(run),
        Err(e) => Err(format!("Burgers run failed: {e}")),
    };
    record(6, "Gevrey bound", &mut || with_burgers(criterion_6));
    record(7, "Fourier decay", &mut || with_burgers(criterion_7));
    record(8, "SQG decay sweep", &mut criterion_8);
    record(9, "energy inequality", &mut || with_burgers(criterion_9));
    record(10, "norm machinery", &mut criterion_10);
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
