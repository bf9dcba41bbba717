//! One configured run: dynamics, spectra, densities and the manifest.

use std::path::Path;
use std::time::Instant;

use log::{info, warn};
use reservoir_core::density::{
    density_mode_mode_infinity, excitation_spectrum_from_state, export_indices, sideband_peak_analysis,
    total_concurrence, Peak,
};
use reservoir_core::discrete::{integrate, sample_times};
use reservoir_core::entanglement::concurrence_sum;
use reservoir_core::model::{discretize_bath, BathGrid};
use reservoir_core::pseudomode::{resolving_grid, spectrum_at, spectrum_infinity_on_grid, PseudomodeSolution};
use reservoir_core::{PhysicalParams, Spectrum, SystemState, TimePoint};
use serde::Serialize;

use crate::config::{Artifact, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::format::CsvTable;

/// Norm drift above this fails the run.
pub const MAX_NORM_DRIFT: f64 = 1e-6;
/// Cap on exported grid points per axis.
pub const EXPORT_POINTS: usize = 400;
/// Cap on time rows in the atom-mode density export.
pub const EXPORT_TIMES: usize = 100;
/// Grid points across the narrowest line for long-time integrals.
pub const SAMPLES_PER_LINEWIDTH_INFINITY: f64 = 20.0;
/// Grid points across the narrowest line for finite-time quadrature.
pub const SAMPLES_PER_LINEWIDTH: f64 = 4.0;

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub rows: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub norm_drift: Option<f64>,
    pub cross_method_max_dev: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: ScenarioConfig,
    pub version: String,
    pub files: Vec<FileEntry>,
    pub diagnostics: Diagnostics,
    pub duration_seconds: f64,
}

/// Long-time summary used by sweeps.
#[derive(Debug, Clone)]
pub struct LongTime {
    /// C²(∞) from the closed-form spectrum.
    pub c2_infinity: f64,
    /// Spectrum peak detunings in units of Γ.
    pub peak_locations: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub manifest: RunManifest,
    pub long_time: LongTime,
}

impl Outcome {
    /// Quality gates: norm drift and cross-method agreement.
    pub fn check(&self) -> Result<()> {
        let d = &self.manifest.diagnostics;
        if let Some(drift) = d.norm_drift {
            if drift.is_nan() || drift > MAX_NORM_DRIFT {
                return Err(CliError::Numerical(format!(
                    "norm drift {drift:e} exceeds {MAX_NORM_DRIFT:e}"
                )));
            }
        }
        if let Some(dev) = d.cross_method_max_dev {
            let tol = self.manifest.config.tolerance;
            if dev.is_nan() || dev > tol {
                return Err(CliError::Numerical(format!(
                    "discrete and analytic populations differ by {dev:e} (tolerance {tol:e})"
                )));
            }
        }
        Ok(())
    }
}

/// Runs the scenario, writes its artifacts and manifest, then applies the
/// quality gates.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunManifest> {
    let outcome = execute(config)?;
    outcome.check()?;
    Ok(outcome.manifest)
}

/// Finer of the bath grid and a grid resolving the narrowest line.
pub fn quadrature_grid(params: &PhysicalParams, grid: &BathGrid, samples_per_linewidth: f64) -> Result<BathGrid> {
    let fine = resolving_grid(params, grid_half_span(grid), samples_per_linewidth)?;
    Ok(if fine.spacing() < grid.spacing() {
        fine
    } else {
        grid.clone()
    })
}

fn grid_half_span(grid: &BathGrid) -> f64 {
    let f = grid.frequencies();
    0.5 * (f[f.len() - 1] - f[0])
}

/// C²(∞) and the long-time spectrum peaks, on a resolving grid.
pub fn long_time_summary(params: &PhysicalParams, half_span: f64) -> Result<LongTime> {
    let grid = resolving_grid(params, half_span, SAMPLES_PER_LINEWIDTH_INFINITY)?;
    let s = spectrum_infinity_on_grid(&grid, params);
    let peaks = sideband_peak_analysis(&s, params.gamma)?;
    Ok(LongTime {
        c2_infinity: total_concurrence(&s, 0.0),
        peak_locations: peaks
            .iter()
            .map(|p| (p.location - params.atom_frequency) / params.gamma)
            .collect(),
    })
}

struct Series {
    times: Vec<f64>,
    discrete: Option<Vec<SystemState>>,
    analytic_pop: Option<Vec<f64>>,
    norm_drift: Option<f64>,
}

impl Series {
    fn population(&self, k: usize) -> f64 {
        match (&self.analytic_pop, &self.discrete) {
            (Some(p), _) => p[k],
            (None, Some(s)) => s[k].atom_population(),
            (None, None) => unreachable!("a scenario runs at least one method"),
        }
    }
}

fn run_dynamics(config: &ScenarioConfig, grid: &BathGrid) -> Result<Series> {
    let p = &config.params;
    let (times, discrete, norm_drift) = if config.method.discrete() {
        let traj = integrate(
            &SystemState::excited_atom(grid.len()),
            grid,
            p,
            config.t_end,
            config.dt,
            config.sample_every,
        )?;
        let drift = traj.max_norm_drift();
        (traj.times, Some(traj.states), Some(drift))
    } else {
        (sample_times(config.t_end, config.dt, config.sample_every), None, None)
    };
    let analytic_pop = config.method.analytic().then(|| {
        let sol = PseudomodeSolution::excited(p);
        times.iter().map(|&t| sol.atom_amplitude(t).norm_sqr()).collect()
    });
    Ok(Series {
        times,
        discrete,
        analytic_pop,
        norm_drift,
    })
}

/// Executes the scenario and writes all outputs, without the quality gates.
pub fn execute(config: &ScenarioConfig) -> Result<Outcome> {
    let start = Instant::now();
    let p = config.params;
    let gamma = p.gamma;
    let dir = config.directory.as_path();
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    let grid = discretize_bath(&p, config.n_modes, config.half_span)?;
    let horizon = grid.recurrence_time();
    if config.t_end > 0.5 * horizon {
        warn!(
            "t_end = {} exceeds half the grid recurrence time {horizon:.4}; bath revivals may appear",
            config.t_end
        );
    }
    info!(
        "{} modes, dt = {:e}, method {:?}",
        grid.len(),
        config.dt,
        config.method
    );

    let series = run_dynamics(config, &grid)?;
    let cross = match (&series.discrete, &series.analytic_pop) {
        (Some(states), Some(pops)) => Some(
            states
                .iter()
                .zip(pops)
                .map(|(s, a)| (s.atom_population() - a).abs())
                .fold(0.0, f64::max),
        ),
        _ => None,
    };

    let mut files = Vec::new();
    let mut emit = |artifact: Artifact, table: CsvTable| -> Result<()> {
        table.write(dir, &artifact.file_name())?;
        files.push(FileEntry {
            name: artifact.file_name(),
            rows: table.rows(),
        });
        Ok(())
    };
    let deltas: Vec<f64> = grid.detunings(&p).iter().map(|d| d / gamma).collect();

    if config.wants(Artifact::Population) {
        emit(Artifact::Population, population_table(&series, gamma))?;
    }

    // Finite-time spectra: analytic on a quadrature grid when available,
    // otherwise straight from the discrete amplitudes.
    let quad = if config.method.analytic() {
        Some(quadrature_grid(&p, &grid, SAMPLES_PER_LINEWIDTH)?)
    } else {
        None
    };
    let spectrum_at_sample = |k: usize| -> Result<Spectrum> {
        match (&quad, &series.discrete) {
            (Some(q), _) => Ok(spectrum_at(TimePoint::Finite(series.times[k]), q, &p)?),
            (None, Some(states)) => Ok(excitation_spectrum_from_state(&states[k], &grid)?),
            (None, None) => unreachable!("a scenario runs at least one method"),
        }
    };

    if config.wants(Artifact::Concurrence) {
        let mut header = vec!["gamma_t", "population", "c2_density"];
        if series.discrete.is_some() {
            header.push("c2_discrete_sum");
        }
        let mut table = CsvTable::new(&header);
        for k in 0..series.times.len() {
            let pop = series.population(k);
            let c2 = total_concurrence(&spectrum_at_sample(k)?, pop);
            let mut row = vec![series.times[k] * gamma, pop, c2];
            if let Some(states) = &series.discrete {
                row.push(concurrence_sum(&states[k])?.total);
            }
            table.push(&row);
        }
        emit(Artifact::Concurrence, table)?;
    }

    let last = series.times.len() - 1;
    let final_analytic = if config.method.analytic() {
        Some(spectrum_at(TimePoint::Finite(config.t_end), &grid, &p)?)
    } else {
        None
    };
    let final_discrete = match &series.discrete {
        Some(states) => Some(excitation_spectrum_from_state(&states[last], &grid)?),
        None => None,
    };
    let infinity = spectrum_infinity_on_grid(&grid, &p);

    if config.wants(Artifact::Spectrum) {
        let mut header = vec!["delta"];
        if final_discrete.is_some() {
            header.push("s_discrete");
        }
        if final_analytic.is_some() {
            header.push("s_analytic");
        }
        header.push("s_infinity");
        let mut table = CsvTable::new(&header);
        for (k, d) in deltas.iter().enumerate() {
            let mut row = vec![*d];
            row.extend(final_discrete.iter().map(|s| s.values[k] * gamma));
            row.extend(final_analytic.iter().map(|s| s.values[k] * gamma));
            row.push(infinity.values[k] * gamma);
            table.push(&row);
        }
        emit(Artifact::Spectrum, table)?;
    }

    let cols = export_indices(grid.len(), EXPORT_POINTS);
    if config.wants(Artifact::EAtom) {
        let mut table = CsvTable::new(&["gamma_t", "delta", "value"]);
        for k in export_indices(series.times.len(), EXPORT_TIMES) {
            let s = match &series.discrete {
                Some(states) if !config.method.analytic() => excitation_spectrum_from_state(&states[k], &grid)?,
                _ => spectrum_at(TimePoint::Finite(series.times[k]), &grid, &p)?,
            };
            let pop = series.population(k);
            for &j in &cols {
                table.push(&[series.times[k] * gamma, deltas[j], 4.0 * pop * s.values[j] * gamma]);
            }
        }
        emit(Artifact::EAtom, table)?;
    }

    if config.wants(Artifact::EModes) {
        let s = final_analytic.as_ref().or(final_discrete.as_ref()).expect("final spectrum");
        let mut table = CsvTable::new(&["omega_lambda", "omega_mu", "value"]);
        for &a in &cols {
            for &b in &cols {
                table.push(&[deltas[a], deltas[b], 2.0 * s.values[a] * s.values[b] * gamma * gamma]);
            }
        }
        emit(Artifact::EModes, table)?;
    }

    if config.wants(Artifact::EModesInfinity) {
        let freqs: Vec<f64> = cols.iter().map(|&k| grid.frequencies()[k]).collect();
        let field = density_mode_mode_infinity(&freqs, &freqs, &p);
        let mut table = CsvTable::new(&["omega_lambda", "omega_mu", "value"]);
        for (a, &ka) in cols.iter().enumerate() {
            for (b, &kb) in cols.iter().enumerate() {
                table.push(&[deltas[ka], deltas[kb], field[(a, b)] * gamma * gamma]);
            }
        }
        emit(Artifact::EModesInfinity, table)?;
    }

    let long_time = long_time_summary(&p, config.half_span)?;

    if config.wants(Artifact::Peaks) {
        let mut table = CsvTable::new(&["source", "delta", "height", "weight"]);
        let mut sources: Vec<(&str, &Spectrum)> = Vec::new();
        if let Some(s) = &final_discrete {
            sources.push(("final_discrete", s));
        }
        if let Some(s) = &final_analytic {
            sources.push(("final_analytic", s));
        }
        sources.push(("infinity", &infinity));
        for (name, s) in sources {
            match sideband_peak_analysis(s, gamma) {
                Ok(peaks) => push_peaks(&mut table, name, &peaks, &p),
                Err(e) => warn!("peak analysis of {name} skipped: {e}"),
            }
        }
        emit(Artifact::Peaks, table)?;
    }

    let manifest = RunManifest {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        files,
        diagnostics: Diagnostics {
            norm_drift: series.norm_drift,
            cross_method_max_dev: cross,
        },
        duration_seconds: start.elapsed().as_secs_f64(),
    };
    write_manifest(dir, &manifest)?;
    Ok(Outcome { manifest, long_time })
}

fn population_table(series: &Series, gamma: f64) -> CsvTable {
    let mut header = vec!["gamma_t"];
    if series.discrete.is_some() {
        header.push("pop_discrete");
    }
    if series.analytic_pop.is_some() {
        header.push("pop_analytic");
    }
    let mut table = CsvTable::new(&header);
    for (k, t) in series.times.iter().enumerate() {
        let mut row = vec![t * gamma];
        if let Some(states) = &series.discrete {
            row.push(states[k].atom_population());
        }
        if let Some(p) = &series.analytic_pop {
            row.push(p[k]);
        }
        table.push(&row);
    }
    table
}

fn push_peaks(table: &mut CsvTable, source: &str, peaks: &[Peak], p: &PhysicalParams) {
    use crate::format::fmt_num;
    for peak in peaks {
        table.push_raw(&[
            source.to_string(),
            fmt_num((peak.location - p.atom_frequency) / p.gamma),
            fmt_num(peak.height * p.gamma),
            fmt_num(peak.weight),
        ]);
    }
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
}
