//! Physical constants of the atom-reservoir model and the discretized bath.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model constants, all in the same inverse-time unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Lorentzian width Γ.
    pub gamma: f64,
    /// Overall coupling Ω₀, with Ω₀² = Σ g_λ².
    pub omega0_coupling: f64,
    /// Atomic transition frequency ω₀.
    pub atom_frequency: f64,
    /// Reservoir peak frequency ω_c.
    pub reservoir_center: f64,
    /// Δ = ω_c − ω₀; kept in sync by [`PhysicalParams::validate`].
    pub detuning: f64,
}

impl PhysicalParams {
    pub fn new(
        gamma: f64,
        omega0_coupling: f64,
        atom_frequency: f64,
        reservoir_center: f64,
    ) -> Result<Self> {
        PhysicalParams {
            gamma,
            omega0_coupling,
            atom_frequency,
            reservoir_center,
            detuning: reservoir_center - atom_frequency,
        }
        .validate()
    }

    /// Atom at ω₀ = 0 with the reservoir centred at ω_c = Δ.
    pub fn with_detuning(gamma: f64, omega0_coupling: f64, detuning: f64) -> Result<Self> {
        Self::new(gamma, omega0_coupling, 0.0, detuning)
    }

    /// Resonant case Δ = 0 with ω₀ = ω_c = 0.
    pub fn resonant(gamma: f64, omega0_coupling: f64) -> Result<Self> {
        Self::new(gamma, omega0_coupling, 0.0, 0.0)
    }

    /// Checks positivity and finiteness, and recomputes the detuning from
    /// ω_c − ω₀.
    pub fn validate(self) -> Result<Self> {
        let finite = [
            ("gamma", self.gamma),
            ("omega0_coupling", self.omega0_coupling),
            ("atom_frequency", self.atom_frequency),
            ("reservoir_center", self.reservoir_center),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    requirement: "finite",
                    value,
                });
            }
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                requirement: "positive",
                value: self.gamma,
            });
        }
        if self.omega0_coupling <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega0_coupling",
                requirement: "positive",
                value: self.omega0_coupling,
            });
        }
        let detuning = self.reservoir_center - self.atom_frequency;
        if !detuning.is_finite() {
            return Err(Error::InvalidParameter {
                name: "detuning",
                requirement: "finite",
                value: detuning,
            });
        }
        Ok(PhysicalParams { detuning, ..self })
    }

    /// D(ω) = Γ / ((ω − ω_c)² + (Γ/2)²).
    pub fn structure_function(&self, omega: f64) -> f64 {
        lorentzian_offset(omega - self.reservoir_center, self.gamma)
    }

    /// max(40Γ, 4Ω₀): covers the Lorentzian wings and the Rabi sidebands.
    pub fn default_half_span(&self) -> f64 {
        (40.0 * self.gamma).max(4.0 * self.omega0_coupling)
    }

    pub fn is_resonant(&self) -> bool {
        self.detuning == 0.0
    }
}

#[inline]
fn lorentzian_offset(x: f64, gamma: f64) -> f64 {
    let hw = 0.5 * gamma;
    gamma / (x * x + hw * hw)
}

/// Lorentzian reservoir structure function, normalized to ∫D dω = 2π.
pub fn lorentzian_structure_function(omega: f64, params: &PhysicalParams) -> f64 {
    params.structure_function(omega)
}

/// A uniform discretization of the reservoir.
///
/// Frequencies are stored as `center + offset_k` where the offsets
/// `(k − (n−1)/2)·Δω` are exactly antisymmetric for odd `n`, so functions
/// even in the detuning come out exactly symmetric on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BathGrid {
    center: f64,
    spacing: f64,
    offsets: Vec<f64>,
    frequencies: Vec<f64>,
    couplings: Vec<f64>,
}

impl BathGrid {
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Offsets ω_λ − ω_c.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// ρ_λ = 1/Δω.
    pub fn mode_density(&self) -> f64 {
        1.0 / self.spacing
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// δ_λ = ω_λ − ω₀, computed as Δ + (ω_λ − ω_c).
    pub fn detunings(&self, params: &PhysicalParams) -> Vec<f64> {
        self.offsets.iter().map(|o| params.detuning + o).collect()
    }

    /// Σ g_λ².
    pub fn total_coupling_sqr(&self) -> f64 {
        crate::quadrature::neumaier_sum(self.couplings.iter().map(|g| g * g))
    }

    /// Largest |δ_λ| on the grid.
    pub fn max_abs_detuning(&self, params: &PhysicalParams) -> f64 {
        self.offsets
            .iter()
            .map(|o| (params.detuning + o).abs())
            .fold(0.0, f64::max)
    }

    /// Time 2π/Δω after which a finite grid revives.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.spacing
    }
}

/// Uniform grid on `[ω_c − half_span, ω_c + half_span]` with couplings
/// `g_λ = Ω₀·sqrt(D(ω_λ)·Δω/(2π))`, so that ρ_λ g_λ² = Ω₀² D(ω_λ)/(2π)
/// holds at every mode (endpoints included).
pub fn discretize_bath(params: &PhysicalParams, n_modes: usize, half_span: f64) -> Result<BathGrid> {
    if n_modes < 2 {
        return Err(Error::Configuration(format!(
            "n_modes must be at least 2 (got {n_modes})"
        )));
    }
    if !(half_span > 0.0 && half_span.is_finite()) {
        return Err(Error::Configuration(format!(
            "half_span must be positive (got {half_span})"
        )));
    }
    let spacing = 2.0 * half_span / (n_modes - 1) as f64;
    let mid = (n_modes - 1) as f64 / 2.0;
    let offsets: Vec<f64> = (0..n_modes).map(|k| (k as f64 - mid) * spacing).collect();
    let center = params.reservoir_center;
    let frequencies = offsets.iter().map(|o| center + o).collect();
    let couplings = offsets
        .iter()
        .map(|&o| {
            params.omega0_coupling * (lorentzian_offset(o, params.gamma) * spacing / (2.0 * PI)).sqrt()
        })
        .collect();
    Ok(BathGrid {
        center,
        spacing,
        offsets,
        frequencies,
        couplings,
    })
}

/// Grid with the default span `max(40Γ, 4Ω₀)`.
pub fn default_bath(params: &PhysicalParams, n_modes: usize) -> Result<BathGrid> {
    discretize_bath(params, n_modes, params.default_half_span())
}
