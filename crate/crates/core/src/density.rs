//! Entanglement densities in the continuum limit.
//!
//! Both densities are built from the spectrum of reservoir excitation S:
//! the atom-mode density is `𝓔_A(ω) = 4|c_a|²S(ω)` and the mode-mode density
//! is `𝓔_R(ω, ω') = 2S(ω)S(ω')`. Their integrals add up to the total
//! concurrence C² = ∫𝓔_A + ∫∫𝓔_R.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::discrete::SystemState;
use crate::error::{Error, Result};
use crate::model::{BathGrid, PhysicalParams};
use crate::quadrature::{neumaier_sum, trapezoid, trapezoid_weights};
use crate::spectrum::{Spectrum, TimePoint};

/// 𝓔_A on the spectrum grid and 𝓔_R on grid × grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFields {
    pub frequencies: Vec<f64>,
    pub e_atom: Vec<f64>,
    pub e_modes: Array2<f64>,
    pub time: TimePoint,
    pub atom_population: f64,
}

impl DensityFields {
    pub fn new(spectrum: &Spectrum, atom_population: f64) -> Self {
        DensityFields {
            frequencies: spectrum.frequencies.clone(),
            e_atom: density_atom_mode(spectrum, atom_population),
            e_modes: density_mode_mode(spectrum),
            time: spectrum.time,
            atom_population,
        }
    }

    /// ∫𝓔_A dω + ∫∫𝓔_R dω dω' with the full 2-D trapezoid rule.
    pub fn total_concurrence(&self) -> f64 {
        trapezoid(&self.frequencies, &self.e_atom) + double_trapezoid(&self.frequencies, &self.e_modes)
    }
}

/// S(ω_λ) = |c_λ|²/Δω from finite-N amplitudes.
pub fn excitation_spectrum_from_state(state: &SystemState, grid: &BathGrid) -> Result<Spectrum> {
    state.check_grid(grid)?;
    let rho = grid.mode_density();
    Ok(Spectrum {
        frequencies: grid.frequencies().to_vec(),
        values: state.mode_amps.iter().map(|c| rho * c.norm_sqr()).collect(),
        time: TimePoint::Finite(state.time),
    })
}

/// 𝓔_A(ω, t) = 4·P·S(ω, t).
pub fn density_atom_mode(spectrum: &Spectrum, atom_population: f64) -> Vec<f64> {
    spectrum.values.iter().map(|s| 4.0 * atom_population * s).collect()
}

/// 𝓔_R(ω_λ, ω_μ, t) = 2S(ω_λ)S(ω_μ), diagonal included.
pub fn density_mode_mode(spectrum: &Spectrum) -> Array2<f64> {
    let s = &spectrum.values;
    let n = s.len();
    Array2::from_shape_fn((n, n), |(a, b)| 2.0 * s[a] * s[b])
}

fn lorentz_pole_product(delta: f64, params: &PhysicalParams) -> f64 {
    let om2 = params.omega0_coupling * params.omega0_coupling;
    let hw = 0.5 * params.gamma;
    let re = delta * delta - delta * params.detuning - om2;
    re * re + hw * hw * delta * delta
}

/// Long-time mode-mode density
/// `Ω₀⁴Γ² / (2π²·f(δ_λ)·f(δ_μ))` with `f(δ) = (δ² − Ω₀²)² + (Γ/2)²δ²` on
/// resonance (δΔ enters f off resonance). Rows follow `rows`, columns `cols`.
pub fn density_mode_mode_infinity(rows: &[f64], cols: &[f64], params: &PhysicalParams) -> Array2<f64> {
    let om4 = params.omega0_coupling.powi(4);
    let g2 = params.gamma * params.gamma;
    let fr: Vec<f64> = rows
        .iter()
        .map(|w| lorentz_pole_product(w - params.atom_frequency, params))
        .collect();
    let fc: Vec<f64> = cols
        .iter()
        .map(|w| lorentz_pole_product(w - params.atom_frequency, params))
        .collect();
    Array2::from_shape_fn((rows.len(), cols.len()), |(a, b)| {
        om4 * g2 / (2.0 * PI * PI * fr[a] * fc[b])
    })
}

/// C² = 4P∫S + 2(∫S)², using separability of 𝓔_R.
pub fn total_concurrence(spectrum: &Spectrum, atom_population: f64) -> f64 {
    let bath = spectrum.integral();
    4.0 * atom_population * bath + 2.0 * bath * bath
}

fn double_trapezoid(x: &[f64], field: &Array2<f64>) -> f64 {
    let n = x.len();
    let w: Vec<f64> = if n < 2 {
        vec![0.0; n]
    } else {
        // Non-uniform trapezoid weights.
        (0..n)
            .map(|k| {
                let left = if k > 0 { x[k] - x[k - 1] } else { 0.0 };
                let right = if k + 1 < n { x[k + 1] - x[k] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    };
    neumaier_sum(
        field
            .indexed_iter()
            .map(|((a, b), v)| w[a] * w[b] * v),
    )
}

/// A local maximum of a 1-D field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub location: f64,
    pub height: f64,
    /// Integral of the field over `location ± window`.
    pub weight: f64,
}

/// A local maximum of a 2-D field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak2D {
    pub row_location: f64,
    pub col_location: f64,
    pub height: f64,
    pub weight: f64,
}

const PEAK_THRESHOLD: f64 = 0.01;

fn check_resolution(spacing: f64, window: f64) -> Result<()> {
    let limit = window / 4.0;
    if spacing >= limit {
        return Err(Error::GridTooCoarse { spacing, limit });
    }
    Ok(())
}

/// Interior local maxima above 1% of the global maximum, in increasing index
/// order. A plateau counts once, at its lowest index.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let global = values.iter().copied().fold(0.0, f64::max);
    let floor = PEAK_THRESHOLD * global;
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] && values[i] > floor {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Peaks of a spectrum (or any 1-D density on its grid) with their weight
/// inside `±window` (normally ±Γ). Rejects grids with spacing ≥ window/4.
pub fn sideband_peak_analysis(spectrum: &Spectrum, window: f64) -> Result<Vec<Peak>> {
    check_resolution(spectrum.spacing(), window)?;
    let x = &spectrum.frequencies;
    let y = &spectrum.values;
    Ok(local_maxima(y)
        .into_iter()
        .map(|k| {
            let (lo, hi) = window_bounds(x, x[k], window);
            Peak {
                location: x[k],
                height: y[k],
                weight: trapezoid(&x[lo..hi], &y[lo..hi]),
            }
        })
        .collect())
}

fn window_bounds(x: &[f64], center: f64, window: f64) -> (usize, usize) {
    let lo = x.partition_point(|&v| v < center - window);
    let hi = x.partition_point(|&v| v <= center + window);
    (lo, hi)
}

/// Interior strict local maxima over the 8-neighbourhood of a 2-D field,
/// above 1% of its maximum, with ties resolved toward the lower linear index.
pub fn local_maxima_2d(field: &Array2<f64>) -> Vec<(usize, usize)> {
    let (nr, nc) = field.dim();
    let global = field.iter().copied().fold(0.0, f64::max);
    let floor = PEAK_THRESHOLD * global;
    let mut out = Vec::new();
    if nr < 3 || nc < 3 {
        return out;
    }
    for r in 1..nr - 1 {
        for c in 1..nc - 1 {
            let v = field[(r, c)];
            if v <= floor {
                continue;
            }
            let mut is_max = true;
            'nb: for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (rr, cc) = ((r as i64 + dr) as usize, (c as i64 + dc) as usize);
                    let u = field[(rr, cc)];
                    let earlier = (dr, dc) < (0, 0);
                    if (earlier && u >= v) || (!earlier && u > v) {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                out.push((r, c));
            }
        }
    }
    out
}

/// Peaks of a 2-D field with their weight over the `±window` square.
pub fn field_peak_analysis(
    rows: &[f64],
    cols: &[f64],
    field: &Array2<f64>,
    window: f64,
) -> Result<Vec<Peak2D>> {
    let spacing = |x: &[f64]| {
        if x.len() < 2 {
            f64::INFINITY
        } else {
            (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64
        }
    };
    check_resolution(spacing(rows).max(spacing(cols)), window)?;
    Ok(local_maxima_2d(field)
        .into_iter()
        .map(|(r, c)| {
            let (r0, r1) = window_bounds(rows, rows[r], window);
            let (c0, c1) = window_bounds(cols, cols[c], window);
            let wr = local_weights(&rows[r0..r1]);
            let wc = local_weights(&cols[c0..c1]);
            let weight = neumaier_sum((r0..r1).flat_map(|a| {
                let wr = &wr;
                let wc = &wc;
                (c0..c1).map(move |b| wr[a - r0] * wc[b - c0] * field[(a, b)])
            }));
            Peak2D {
                row_location: rows[r],
                col_location: cols[c],
                height: field[(r, c)],
                weight,
            }
        })
        .collect())
}

fn local_weights(x: &[f64]) -> Vec<f64> {
    if x.len() < 2 {
        return vec![0.0; x.len()];
    }
    let dx = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    trapezoid_weights(x.len(), dx)
}

/// At most `max` indices into a grid of `n` points with a common stride,
/// symmetric about the centre point when `n` is odd.
pub fn export_indices(n: usize, max: usize) -> Vec<usize> {
    if n <= max || n == 0 {
        return (0..n).collect();
    }
    let max = max.max(2);
    let stride = (n - 1).div_ceil(max - 1).max(1);
    let center = (n - 1) / 2;
    let reach = center / stride;
    let mut idx: Vec<usize> = (0..=reach).rev().map(|k| center - k * stride).collect();
    idx.extend((1..).map(|k| center + k * stride).take_while(|&i| i < n));
    while idx.len() > max {
        idx.remove(0);
        idx.pop();
    }
    idx
}
