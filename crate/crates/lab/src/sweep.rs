//! One-parameter sweeps over an experiment configuration.
//!
//! Every value produces one JSON entry, in input order. A value that fails to
//! parse or whose run fails yields an entry with an `error` string instead of
//! aborting the sweep. Sweeping `diagnostics.zeta` reuses a single simulation
//! and only refits the decay laws.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{split_parameter, ExperimentConfig, RawConfig};
use crate::error::{LabError, LabResult};
use crate::runner::{execute, fit_decays, simulate, summary_json};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GEVREY_LAB_THREADS";

fn entry(parameter: &str, value: &str, outcome: LabResult<Value>) -> Value {
    match outcome {
        Ok(summary) => json!({ "parameter": parameter, "value": value, "summary": summary }),
        Err(e) => json!({ "parameter": parameter, "value": value, "error": e.to_string() }),
    }
}

fn configure(base: &RawConfig, parameter: &str, value: &str) -> LabResult<ExperimentConfig> {
    let mut raw = base.clone();
    raw.set_parameter(parameter, value)?;
    ExperimentConfig::from_raw(raw)
}

fn pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool construction")
}

/// Runs the base configuration once per value of `parameter`.
///
/// Output files named in `[output]` are not written during a sweep.
pub fn sweep(base: &RawConfig, parameter: &str, values: &[String]) -> LabResult<Vec<Value>> {
    split_parameter(parameter)?;
    if values.is_empty() {
        return Ok(Vec::new());
    }
    if parameter == "diagnostics.zeta" {
        return Ok(refit_sweep(base, parameter, values));
    }
    let out = pool().install(|| {
        values
            .par_iter()
            .map(|v| {
                let outcome =
                    configure(base, parameter, v).and_then(|cfg| execute(&cfg).map(|o| o.json));
                entry(parameter, v, outcome)
            })
            .collect()
    });
    Ok(out)
}

fn refit_sweep(base: &RawConfig, parameter: &str, values: &[String]) -> Vec<Value> {
    let configs: Vec<LabResult<ExperimentConfig>> = values
        .iter()
        .map(|v| configure(base, parameter, v))
        .collect();
    let mut zetas: Vec<f64> = Vec::new();
    for cfg in configs.iter().flatten() {
        for z in cfg.diagnostics.decay.iter().flat_map(|d| d.zetas.iter()) {
            if !zetas.contains(z) {
                zetas.push(*z);
            }
        }
    }
    if zetas.is_empty() {
        return configs
            .into_iter()
            .zip(values)
            .map(|(cfg, v)| entry(parameter, v, cfg.and_then(|c| execute(&c).map(|o| o.json))))
            .collect();
    }
    let union = zetas
        .iter()
        .map(|z| z.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let record = configure(base, parameter, &union).and_then(|cfg| simulate(&cfg));
    configs
        .into_iter()
        .zip(values)
        .map(|(cfg, v)| {
            let outcome = cfg.and_then(|cfg| match &record {
                Ok(rec) => Ok(summary_json(&cfg, rec, &fit_decays(&cfg, rec))),
                Err(e) => Err(LabError::SharedRun(e.to_string())),
            });
            entry(parameter, v, outcome)
        })
        .collect()
}
