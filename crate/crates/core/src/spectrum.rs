use serde::{Deserialize, Serialize};

use crate::quadrature::trapezoid;

/// A finite time, or the t → ∞ limit taken analytically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimePoint {
    Finite(f64),
    Infinity,
}

impl TimePoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, TimePoint::Infinity)
    }
}

impl From<f64> for TimePoint {
    fn from(t: f64) -> Self {
        TimePoint::Finite(t)
    }
}

/// Spectrum of reservoir excitation S(ω, t) = ρ(ω)|c(ω, t)|², sampled on
/// increasing frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub values: Vec<f64>,
    pub time: TimePoint,
}

impl Spectrum {
    /// ∫S dω by the trapezoid rule; the total bath excitation.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.frequencies, &self.values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean spacing of the frequency samples.
    pub fn spacing(&self) -> f64 {
        match self.frequencies.len() {
            0 | 1 => f64::INFINITY,
            n => (self.frequencies[n - 1] - self.frequencies[0]) / (n - 1) as f64,
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}
