//! Dense pure states of a small qubit register.
//!
//! Used for states outside the single-excitation sector (GHZ, arbitrary
//! products) where global entanglement still needs evaluating. Costs
//! O(2^n), so keep n small.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

use crate::discrete::SystemState;
use crate::error::{Error, Result};
use crate::quadrature::neumaier_sum;

/// Amplitudes over basis states `|b_{n−1} … b_1 b_0⟩`, qubit k on bit k.
#[derive(Debug, Clone, PartialEq)]
pub struct PureRegister {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl PureRegister {
    pub fn new(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 24 {
            return Err(Error::Configuration(format!(
                "register size {n_qubits} outside 1..=24"
            )));
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::Configuration(format!(
                "expected {} amplitudes, got {}",
                1usize << n_qubits,
                amps.len()
            )));
        }
        Ok(PureRegister { n_qubits, amps })
    }

    /// (|0…0⟩ + |1…1⟩)/√2.
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits.min(24);
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = C64::new(h, 0.0);
        amps[dim - 1] = C64::new(h, 0.0);
        Self::new(n_qubits, amps)
    }

    /// Σ_k |0…1_k…0⟩/√n.
    pub fn w(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits.min(24);
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        let a = C64::new(1.0 / (n_qubits as f64).sqrt(), 0.0);
        for k in 0..n_qubits.min(24) {
            amps[1 << k] = a;
        }
        Self::new(n_qubits, amps)
    }

    /// ⊗_k (α_k|0⟩ + β_k|1⟩), each factor normalized by the caller.
    pub fn product(factors: &[(C64, C64)]) -> Result<Self> {
        let n = factors.len();
        let dim = 1usize << n.min(24);
        let amps = (0..dim)
            .map(|idx| {
                factors
                    .iter()
                    .enumerate()
                    .map(|(k, (a, b))| if idx >> k & 1 == 1 { *b } else { *a })
                    .product()
            })
            .collect();
        Self::new(n, amps)
    }

    /// Embeds a single-excitation state: atom on qubit 0, mode λ on qubit λ+1.
    pub fn from_single_excitation(state: &SystemState) -> Result<Self> {
        let n = state.n_qubits();
        let dim = 1usize << n.min(24);
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        if n <= 24 {
            amps[0] = state.vacuum_amp;
            amps[1] = state.atom_amp;
            for (k, c) in state.mode_amps.iter().enumerate() {
                amps[1 << (k + 1)] = *c;
            }
        }
        Self::new(n, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        neumaier_sum(self.amps.iter().map(|a| a.norm_sqr()))
    }

    /// Reduced state of qubit k over `|0⟩, |1⟩`.
    pub fn reduced_one_qubit(&self, k: usize) -> Result<Matrix2<C64>> {
        if k >= self.n_qubits {
            return Err(Error::SubsystemOutOfRange {
                index: k,
                modes: self.n_qubits,
            });
        }
        let mut m = Matrix2::zeros();
        let bit = 1usize << k;
        for idx in 0..self.amps.len() {
            if idx & bit != 0 {
                continue;
            }
            let a0 = self.amps[idx];
            let a1 = self.amps[idx | bit];
            m[(0, 0)] += a0 * a0.conj();
            m[(0, 1)] += a0 * a1.conj();
            m[(1, 0)] += a1 * a0.conj();
            m[(1, 1)] += a1 * a1.conj();
        }
        Ok(m)
    }

    /// Q = 2 − (2/n)Σ_k tr ρ_k².
    pub fn global_entanglement(&self) -> Result<f64> {
        let deviation = (self.norm_sqr() - 1.0).abs();
        if deviation > crate::entanglement::NORM_TOLERANCE {
            return Err(Error::NotNormalized { deviation });
        }
        let purities = (0..self.n_qubits)
            .map(|k| self.reduced_one_qubit(k).map(|r| (r * r).trace().re))
            .collect::<Result<Vec<f64>>>()?;
        Ok(2.0 - 2.0 / self.n_qubits as f64 * neumaier_sum(purities))
    }
}
