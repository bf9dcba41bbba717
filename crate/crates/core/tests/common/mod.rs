#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use reservoir_core::SystemState;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut StdRng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random normalized (c₀, c_a, c_λ) over `n_modes` modes. With `vacuum`
/// false, c₀ = 0.
pub fn random_state(rng: &mut StdRng, n_modes: usize, vacuum: bool) -> SystemState {
    let mut amps: Vec<C64> = (0..n_modes + 2).map(|_| random_complex(rng)).collect();
    if !vacuum {
        amps[0] = C64::new(0.0, 0.0);
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    SystemState::new(amps[0], amps[1], amps[2..].to_vec())
}

/// Dense vector for the register with the atom on qubit 0 and mode k on
/// qubit k + 1 (qubit q is bit q of the basis index).
pub fn dense_vector(state: &SystemState) -> Vec<C64> {
    let n = state.mode_amps.len() + 1;
    let mut v = vec![C64::new(0.0, 0.0); 1 << n];
    v[0] = state.vacuum_amp;
    v[1] = state.atom_amp;
    for (k, c) in state.mode_amps.iter().enumerate() {
        v[1 << (k + 1)] = *c;
    }
    v
}

/// ρ_{qj, qi} = Tr_rest |ψ⟩⟨ψ| in the basis index 2·b_j + b_i, summing
/// explicitly over every environment configuration.
pub fn brute_two_qubit(psi: &[C64], n_qubits: usize, qj: usize, qi: usize) -> Matrix4<C64> {
    let mut rho = Matrix4::zeros();
    let rest: Vec<usize> = (0..n_qubits).filter(|&q| q != qj && q != qi).collect();
    for env in 0..(1usize << rest.len()) {
        let mut base = 0usize;
        for (b, q) in rest.iter().enumerate() {
            if env >> b & 1 == 1 {
                base |= 1 << q;
            }
        }
        let index = |local: usize| {
            let bj = local >> 1 & 1;
            let bi = local & 1;
            base | (bj << qj) | (bi << qi)
        };
        for r in 0..4 {
            for c in 0..4 {
                rho[(r, c)] += psi[index(r)] * psi[index(c)].conj();
            }
        }
    }
    rho
}

pub fn brute_one_qubit(psi: &[C64], n_qubits: usize, q: usize) -> Matrix2<C64> {
    let mut rho = Matrix2::zeros();
    for env in 0..(1usize << n_qubits) {
        if env >> q & 1 == 1 {
            continue;
        }
        for r in 0..2 {
            for c in 0..2 {
                rho[(r, c)] += psi[env | (r << q)] * psi[env | (c << q)].conj();
            }
        }
    }
    rho
}

pub fn brute_global_entanglement(psi: &[C64], n_qubits: usize) -> f64 {
    let purity: f64 = (0..n_qubits)
        .map(|q| {
            let r = brute_one_qubit(psi, n_qubits, q);
            (r * r).trace().re
        })
        .sum();
    2.0 - 2.0 * purity / n_qubits as f64
}

/// Plain trapezoid rule, kept separate from the library's compensated one.
pub fn trapz(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}
