//! Plot-ready data for the four standard figures, in Γ = 1 units with
//! c_a(0) = 1, c₀ = 0 and Δ = 0.

use std::path::{Path, PathBuf};

use reservoir_core::density::{density_mode_mode_infinity, total_concurrence};
use reservoir_core::model::default_bath;
use reservoir_core::pseudomode::{spectrum_at, spectrum_at_frequencies, PseudomodeSolution};
use reservoir_core::{PhysicalParams, TimePoint};

use crate::config::DEFAULT_N_MODES;
use crate::error::{CliError, Result};
use crate::format::CsvTable;
use crate::scenario::{quadrature_grid, SAMPLES_PER_LINEWIDTH};

pub const STRONG: f64 = 10.0;
pub const INTERMEDIATE: f64 = 1.0;
pub const WEAK: f64 = 0.1;

/// Shared time axis of the population and concurrence figures.
pub const T_MAX: f64 = 60.0;
pub const POPULATION_STEP: f64 = 0.02;
pub const CONCURRENCE_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl std::str::FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            other => Err(CliError::config("which", format!("unknown figure '{other}'"))),
        }
    }
}

fn params(coupling: f64) -> PhysicalParams {
    PhysicalParams::resonant(1.0, coupling).expect("positive couplings")
}

/// `count` evenly spaced points from 0 to `t_max` inclusive.
fn time_axis(t_max: f64, step: f64) -> Vec<f64> {
    let n = (t_max / step).round() as usize;
    (0..=n).map(|k| k as f64 * t_max / n as f64).collect()
}

/// Symmetric detuning axis ±1.5·max(Ω₀, 3Γ) with `2·half + 1` points.
pub fn detuning_axis(coupling: f64, half: usize) -> Vec<f64> {
    let range = 1.5 * coupling.max(3.0);
    (0..=2 * half)
        .map(|k| (k as f64 - half as f64) * range / half as f64)
        .collect()
}

/// Writes the files for one figure and returns their paths.
pub fn emit_figure(which: Figure, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    match which {
        Figure::Fig1 => Ok(vec![fig1().write(out, "fig1.csv")?]),
        Figure::Fig2 => Ok(vec![fig2()?.write(out, "fig2.csv")?]),
        Figure::Fig3 => Ok(vec![
            fig3(STRONG, 10.0, 0.1)?.write(out, "fig3_strong.csv")?,
            fig3(WEAK, T_MAX, 0.5)?.write(out, "fig3_weak.csv")?,
        ]),
        Figure::Fig4 => Ok(vec![
            fig4(STRONG).write(out, "fig4_strong.csv")?,
            fig4(INTERMEDIATE).write(out, "fig4_intermediate.csv")?,
            fig4(WEAK).write(out, "fig4_weak.csv")?,
        ]),
    }
}

/// Atomic population for strong and weak coupling.
pub fn fig1() -> CsvTable {
    let strong = PseudomodeSolution::excited(&params(STRONG));
    let weak = PseudomodeSolution::excited(&params(WEAK));
    let mut table = CsvTable::new(&["gamma_t", "pop_strong", "pop_weak"]);
    for t in time_axis(T_MAX, POPULATION_STEP) {
        table.push(&[t, strong.atom_amplitude(t).norm_sqr(), weak.atom_amplitude(t).norm_sqr()]);
    }
    table
}

/// C²(t) = ∫𝓔_A + ∫∫𝓔_R along the analytic solution.
pub fn concurrence_series(coupling: f64, times: &[f64]) -> Result<Vec<f64>> {
    let p = params(coupling);
    let grid = quadrature_grid(&p, &default_bath(&p, DEFAULT_N_MODES)?, SAMPLES_PER_LINEWIDTH)?;
    let sol = PseudomodeSolution::excited(&p);
    times
        .iter()
        .map(|&t| {
            let s = spectrum_at(TimePoint::Finite(t), &grid, &p)?;
            Ok(total_concurrence(&s, sol.atom_amplitude(t).norm_sqr()))
        })
        .collect()
}

pub fn fig2() -> Result<CsvTable> {
    let times = time_axis(T_MAX, CONCURRENCE_STEP);
    let strong = concurrence_series(STRONG, &times)?;
    let weak = concurrence_series(WEAK, &times)?;
    let mut table = CsvTable::new(&["gamma_t", "c2_strong", "c2_weak"]);
    for k in 0..times.len() {
        table.push(&[times[k], strong[k], weak[k]]);
    }
    Ok(table)
}

/// 𝓔_A(δ, t) triples.
pub fn fig3(coupling: f64, t_max: f64, step: f64) -> Result<CsvTable> {
    let p = params(coupling);
    let sol = PseudomodeSolution::excited(&p);
    let deltas = detuning_axis(coupling, 100);
    let mut table = CsvTable::new(&["gamma_t", "delta", "value"]);
    for t in time_axis(t_max, step) {
        let s = spectrum_at_frequencies(TimePoint::Finite(t), &deltas, &p)?;
        let pop = sol.atom_amplitude(t).norm_sqr();
        for (d, v) in deltas.iter().zip(&s.values) {
            table.push(&[t, *d, 4.0 * pop * v]);
        }
    }
    Ok(table)
}

/// Long-time 𝓔_R field on a symmetric grid containing δ = ±Ω₀.
pub fn fig4_field(coupling: f64) -> (Vec<f64>, ndarray::Array2<f64>) {
    let deltas = detuning_axis(coupling, 150);
    let field = density_mode_mode_infinity(&deltas, &deltas, &params(coupling));
    (deltas, field)
}

pub fn fig4(coupling: f64) -> CsvTable {
    let (deltas, field) = fig4_field(coupling);
    let mut table = CsvTable::new(&["omega_lambda", "omega_mu", "value"]);
    for (a, x) in deltas.iter().enumerate() {
        for (b, y) in deltas.iter().enumerate() {
            table.push(&[*x, *y, field[(a, b)]]);
        }
    }
    table
}
