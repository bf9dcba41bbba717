//! Parameter sweeps: one scenario per value, run in parallel.

use std::path::{Path, PathBuf};

use ini::Ini;
use log::info;
use rayon::prelude::*;

use crate::config::{override_key, ScenarioConfig, SWEEP_KEYS};
use crate::error::{CliError, Result};
use crate::format::{fmt_num, CsvTable};
use crate::scenario::{execute, Outcome};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "RESERVOIR_WORKERS";

#[derive(Debug)]
pub struct SweepPoint {
    pub index: usize,
    pub value: f64,
    pub directory: PathBuf,
    pub outcome: Outcome,
}

pub fn parse_values(list: &str) -> Result<Vec<f64>> {
    let values = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::config("values", format!("cannot parse '{s}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::config("values", "empty list"));
    }
    Ok(values)
}

/// Worker count from `RESERVOIR_WORKERS`, or rayon's default.
pub fn worker_count() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config(WORKERS_ENV, format!("must be a positive integer (got '{v}')"))),
        },
    }
}

fn render(value: f64) -> String {
    fmt_num(value)
}

/// Runs every point under `out/point_<i>` (points ordered by value) and
/// writes `out/summary.csv`. Quality gates are applied after all points
/// finish, so the summary is written even when a point fails.
pub fn run_sweep(base: &Ini, axis: &str, values: &[f64], out: &Path) -> Result<Vec<SweepPoint>> {
    if !SWEEP_KEYS.contains(&axis) {
        return Err(CliError::config(
            "axis",
            format!("'{axis}' is not a sweepable key ({})", SWEEP_KEYS.join(", ")),
        ));
    }
    if values.is_empty() {
        return Err(CliError::config("values", "empty list"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let configs = sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut ini = base.clone();
            override_key(&mut ini, axis, &render(v))?;
            let dir = out.join(format!("point_{i}"));
            ini.with_section(Some("output")).set("directory", dir.to_string_lossy());
            ScenarioConfig::from_ini(&ini).map(|c| (i, v, dir, c))
        })
        .collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;

    let run = || {
        configs
            .into_par_iter()
            .map(|(index, value, directory, config)| {
                info!("sweep point {index}: {axis} = {value}");
                execute(&config).map(|outcome| SweepPoint {
                    index,
                    value,
                    directory,
                    outcome,
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    let points = match worker_count()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::config(WORKERS_ENV, e.to_string()))?
            .install(run),
        None => run(),
    }?;

    let mut table = CsvTable::new(&["point", "value", "c2_infinity", "peak_locations"]);
    for p in &points {
        let peaks: Vec<String> = p.outcome.long_time.peak_locations.iter().map(|&x| fmt_num(x)).collect();
        table.push_raw(&[
            p.index.to_string(),
            render(p.value),
            fmt_num(p.outcome.long_time.c2_infinity),
            peaks.join(";"),
        ]);
    }
    table.write(out, "summary.csv")?;

    for p in &points {
        p.outcome.check()?;
    }
    Ok(points)
}
