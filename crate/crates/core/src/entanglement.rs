//! Reduced density matrices, two-qubit concurrence and global entanglement
//! for single-excitation states of the atom plus N bath modes.
//!
//! The register is treated as N+1 qubits: the atom and each mode are either
//! empty (`|0⟩`) or hold the excitation (`|1⟩`). Because the state never has
//! more than one excitation, every reduced matrix is fixed by a handful of
//! amplitudes and no 2^(N+1)-dimensional object is ever built.

use nalgebra::{DMatrix, Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::discrete::SystemState;
use crate::error::{Error, Result};
use crate::quadrature::neumaier_sum;

/// Hermiticity / trace tolerance for density-matrix validation.
pub const DM_TOLERANCE: f64 = 1e-10;
/// Eigenvalues below −NEGATIVE_EIGENVALUE_TOL mark an invalid density matrix.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-10;
/// Density-matrix eigenvalues at or below this are treated as exact zeros
/// when forming the preconcurrence matrix.
const RANK_CUTOFF: f64 = 1e-13;
/// Largest accepted |norm − 1| for entanglement measures.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// A qubit of the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    Atom,
    Mode(usize),
}

impl SystemState {
    /// Amplitude of the basis state with the excitation in `which`.
    pub fn amplitude(&self, which: Subsystem) -> Result<C64> {
        match which {
            Subsystem::Atom => Ok(self.atom_amp),
            Subsystem::Mode(k) => self.mode_amps.get(k).copied().ok_or(Error::SubsystemOutOfRange {
                index: k,
                modes: self.mode_amps.len(),
            }),
        }
    }
}

/// Two-qubit density matrix over `|0_j0_i⟩, |0_j1_i⟩, |1_j0_i⟩, |1_j1_i⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDM(Matrix4<C64>);

/// One-qubit density matrix over `|0_j⟩, |1_j⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneQubitDM(Matrix2<C64>);

impl TwoQubitDM {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn from_matrix(m: Matrix4<C64>) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > DM_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max |ρ − ρ†| = {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr - 1.0).norm() > DM_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        let min = SymmetricEigen::new(m).eigenvalues.min();
        if min < -NEGATIVE_EIGENVALUE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(TwoQubitDM(m))
    }

    /// Pure two-qubit state from amplitudes in the same basis order.
    pub fn pure(amps: [C64; 4]) -> Result<Self> {
        let v = nalgebra::Vector4::from(amps);
        Self::from_matrix(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Eigenvalues of ρ in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(self.0).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

impl OneQubitDM {
    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    /// tr ρ².
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }
}

/// σ_y ⊗ σ_y in the computational basis.
fn sigma_yy() -> Matrix4<C64> {
    let z = C64::new(0.0, 0.0);
    let p = C64::new(1.0, 0.0);
    let m = -p;
    Matrix4::new(
        z, z, z, m, //
        z, z, p, z, //
        z, p, z, z, //
        m, z, z, z,
    )
}

/// Reduced state of qubits `(j, i)` by tracing out everything else.
///
/// Entries: diagonal `(1−|c_j|²−|c_i|², |c_i|², |c_j|², 0)`, coherences
/// `⟨0_j0_i|ρ|0_j1_i⟩ = c₀c_i*`, `⟨0_j0_i|ρ|1_j0_i⟩ = c₀c_j*`,
/// `⟨0_j1_i|ρ|1_j0_i⟩ = c_i c_j*`, and the Hermitian conjugates.
pub fn reduced_two_qubit(state: &SystemState, j: Subsystem, i: Subsystem) -> Result<TwoQubitDM> {
    if j == i {
        return Err(Error::SameSubsystem);
    }
    let cj = state.amplitude(j)?;
    let ci = state.amplitude(i)?;
    let c0 = state.vacuum_amp;
    let z = C64::new(0.0, 0.0);
    let m = Matrix4::new(
        C64::new(1.0 - cj.norm_sqr() - ci.norm_sqr(), 0.0),
        c0 * ci.conj(),
        c0 * cj.conj(),
        z,
        //
        c0.conj() * ci,
        C64::new(ci.norm_sqr(), 0.0),
        ci * cj.conj(),
        z,
        //
        c0.conj() * cj,
        cj * ci.conj(),
        C64::new(cj.norm_sqr(), 0.0),
        z,
        //
        z,
        z,
        z,
        z,
    );
    Ok(TwoQubitDM(m))
}

/// Reduced state of a single qubit: `[[1−|c_j|², c₀c_j*], [c₀*c_j, |c_j|²]]`.
pub fn reduced_one_qubit(state: &SystemState, j: Subsystem) -> Result<OneQubitDM> {
    let cj = state.amplitude(j)?;
    let c0 = state.vacuum_amp;
    let p = cj.norm_sqr();
    Ok(OneQubitDM(Matrix2::new(
        C64::new(1.0 - p, 0.0),
        c0 * cj.conj(),
        c0.conj() * cj,
        C64::new(p, 0.0),
    )))
}

/// Eigenvalues of `R = ρ(σy⊗σy)ρ*(σy⊗σy)` in decreasing order, with small
/// negative parts clamped to zero.
///
/// Kept as a diagnostic: zero eigenvalues of R come out of a general
/// eigensolver at the square root of machine precision, so
/// [`concurrence_general`] works from singular values instead.
pub fn wootters_eigenvalues(rho: &TwoQubitDM) -> Result<[f64; 4]> {
    let yy = sigma_yy();
    let r = rho.0 * yy * rho.0.conjugate() * yy;
    let eig = r
        .eigenvalues()
        .ok_or_else(|| Error::InvalidDensityMatrix("eigen-decomposition of R failed".into()))?;
    let mut out = [0.0; 4];
    for (o, l) in out.iter_mut().zip(eig.iter()) {
        if l.re < -NEGATIVE_EIGENVALUE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "R has a negative eigenvalue {:e}",
                l.re
            )));
        }
        *o = l.re.max(0.0);
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Wootters concurrence `max{0, √λ₁ − √λ₂ − √λ₃ − √λ₄}`.
///
/// The √λ's are the singular values of the preconcurrence matrix
/// `τ = Wᵀ(σy⊗σy)W` for any factorization `ρ = WW†`; `W` is built from the
/// eigenvectors of ρ whose eigenvalues exceed the rank cutoff. This yields
/// the exact zeros of R as zeros rather than as O(1e-8) noise.
pub fn concurrence_general(rho: &TwoQubitDM) -> Result<f64> {
    let eig = SymmetricEigen::new(rho.0);
    let min = eig.eigenvalues.min();
    if min < -NEGATIVE_EIGENVALUE_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {min:e}"
        )));
    }
    let kept: Vec<usize> = (0..4).filter(|&k| eig.eigenvalues[k] > RANK_CUTOFF).collect();
    if kept.is_empty() {
        return Err(Error::InvalidDensityMatrix("zero matrix".into()));
    }
    let w = DMatrix::from_fn(4, kept.len(), |row, col| {
        let k = kept[col];
        eig.eigenvectors[(row, k)] * eig.eigenvalues[k].sqrt()
    });
    let yy = DMatrix::from_fn(4, 4, |r, c| sigma_yy()[(r, c)]);
    let tau = w.transpose() * yy * &w;
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = sv.iter().skip(1).sum();
    Ok((sv[0] - rest).max(0.0))
}

/// Squared concurrence of the single-excitation reduced state,
/// `c² = 4|c_j|²|c_i|²`.
pub fn concurrence_closed_form(c_j: C64, c_i: C64) -> f64 {
    4.0 * c_j.norm_sqr() * c_i.norm_sqr()
}

fn check_normalized(state: &SystemState) -> Result<()> {
    let deviation = (state.norm_sqr() - 1.0).abs();
    if deviation > NORM_TOLERANCE {
        return Err(Error::NotNormalized { deviation });
    }
    Ok(())
}

/// Q = 2 − (2/n)Σ tr ρ_k² over the n = N+1 qubits (atom and modes), from the
/// one-qubit purities `1 + 2|c_k|²(|c_k|² + |c₀|² − 1)`.
pub fn global_entanglement(state: &SystemState) -> Result<f64> {
    check_normalized(state)?;
    let p0 = state.vacuum_amp.norm_sqr();
    let purity = |c: &C64| {
        let p = c.norm_sqr();
        1.0 + 2.0 * p * (p + p0 - 1.0)
    };
    let n = state.n_qubits() as f64;
    let sum = neumaier_sum(
        std::iter::once(purity(&state.atom_amp)).chain(state.mode_amps.iter().map(purity)),
    );
    Ok(2.0 - 2.0 / n * sum)
}

/// C² split into atom-mode and mode-mode pair sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceSum {
    pub total: f64,
    /// Σ_λ 4|c_a|²|c_λ|².
    pub atom_part: f64,
    /// Σ_{λ<μ} 4|c_λ|²|c_μ|².
    pub mode_part: f64,
}

/// Sum of squared pair concurrences; Q = 2·total/(N+1).
pub fn concurrence_sum(state: &SystemState) -> Result<ConcurrenceSum> {
    check_normalized(state)?;
    let pa = state.atom_amp.norm_sqr();
    let bath = state.bath_population();
    let fourth = neumaier_sum(state.mode_amps.iter().map(|c| c.norm_sqr().powi(2)));
    let atom_part = 4.0 * pa * bath;
    let mode_part = 2.0 * (bath * bath - fourth);
    Ok(ConcurrenceSum {
        total: atom_part + mode_part,
        atom_part,
        mode_part,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(n_modes: usize, seed: u64, with_vacuum: bool) -> SystemState {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut draw = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let vac = if with_vacuum { draw() } else { c(0.0, 0.0) };
        let atom = draw();
        let modes: Vec<C64> = (0..n_modes).map(|_| draw()).collect();
        let mut s = SystemState::new(vac, atom, modes);
        let norm = s.norm_sqr().sqrt();
        s.vacuum_amp /= norm;
        s.atom_amp /= norm;
        s.mode_amps.iter_mut().for_each(|m| *m /= norm);
        s
    }

    #[test]
    fn excited_atom_reduced_matrix() {
        let s = SystemState::excited_atom(3);
        let rho = reduced_two_qubit(&s, Subsystem::Atom, Subsystem::Mode(1)).unwrap();
        let mut expected = Matrix4::zeros();
        expected[(2, 2)] = c(1.0, 0.0);
        assert_eq!(*rho.matrix(), expected);
    }

    #[test]
    fn bell_pair_reduced_matrix() {
        let h = (0.5_f64).sqrt();
        let s = SystemState::new(c(0.0, 0.0), c(h, 0.0), vec![c(h, 0.0), c(0.0, 0.0)]);
        let rho = reduced_two_qubit(&s, Subsystem::Atom, Subsystem::Mode(0)).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let e = if (1..=2).contains(&r) && (1..=2).contains(&col) { 0.5 } else { 0.0 };
                assert!((rho.matrix()[(r, col)] - e).norm() < 1e-15);
            }
        }
        assert!((concurrence_general(&rho).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn index_errors() {
        let s = SystemState::excited_atom(2);
        assert_eq!(
            reduced_two_qubit(&s, Subsystem::Mode(1), Subsystem::Mode(1)).unwrap_err(),
            Error::SameSubsystem
        );
        assert!(reduced_two_qubit(&s, Subsystem::Atom, Subsystem::Mode(2)).is_err());
        assert!(reduced_one_qubit(&s, Subsystem::Mode(5)).is_err());
    }

    #[test]
    fn one_qubit_matrices() {
        let s = SystemState::excited_atom(2);
        let r = reduced_one_qubit(&s, Subsystem::Mode(0)).unwrap();
        assert_eq!(r.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(r.purity(), 1.0);

        let h = (0.5_f64).sqrt();
        let s = SystemState::new(c(0.0, 0.0), c(h, 0.0), vec![c(0.5, 0.0), c(0.0, 0.5)]);
        let r = reduced_one_qubit(&s, Subsystem::Atom).unwrap();
        assert!((r.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn purity_matches_probability_conservation_form() {
        for seed in 0..50 {
            let s = random_state(4, seed, true);
            let p: Vec<f64> = std::iter::once(s.atom_amp.norm_sqr())
                .chain(s.mode_amps.iter().map(|m| m.norm_sqr()))
                .collect();
            for j in 0..p.len() {
                let sub = if j == 0 { Subsystem::Atom } else { Subsystem::Mode(j - 1) };
                let others: f64 = (0..p.len()).filter(|&i| i != j).map(|i| p[i]).sum();
                let expected = 1.0 - 2.0 * p[j] * others;
                let got = reduced_one_qubit(&s, sub).unwrap().purity();
                assert!((got - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn product_state_has_zero_concurrence() {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = c(1.0, 0.0);
        let rho = TwoQubitDM::from_matrix(m).unwrap();
        assert_eq!(concurrence_general(&rho).unwrap(), 0.0);
        let plus = 0.5;
        let rho = TwoQubitDM::pure([c(plus, 0.0); 4]).unwrap();
        assert!(concurrence_general(&rho).unwrap() < 1e-14);
    }

    #[test]
    fn singlet_and_mixed_states() {
        let h = (0.5_f64).sqrt();
        let singlet = TwoQubitDM::pure([c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((concurrence_general(&singlet).unwrap() - 1.0).abs() < 1e-14);
        // Werner state p|Ψ⁻⟩⟨Ψ⁻| + (1−p)I/4 has c = max(0, (3p−1)/2).
        for p in [0.2, 0.5, 0.9] {
            let m = singlet.matrix() * c(p, 0.0) + Matrix4::identity() * c((1.0 - p) / 4.0, 0.0);
            let rho = TwoQubitDM::from_matrix(m).unwrap();
            let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((concurrence_general(&rho).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_matrices_rejected() {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = c(1.2, 0.0);
        m[(1, 1)] = c(-0.2, 0.0);
        assert!(TwoQubitDM::from_matrix(m).is_err());
        assert!(concurrence_general(&TwoQubitDM(m)).is_err());
        let mut m = Matrix4::zeros();
        m[(0, 0)] = c(1.0, 0.0);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(TwoQubitDM::from_matrix(m).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let h = (0.5_f64).sqrt();
        assert!((concurrence_closed_form(c(h, 0.0), c(0.0, h)) - 1.0).abs() < 1e-15);
        assert_eq!(concurrence_closed_form(c(0.3, 0.1), c(0.0, 0.0)), 0.0);
    }

    #[test]
    fn wootters_eigenvalues_square_to_singular_values() {
        for seed in 0..20 {
            let s = random_state(3, 100 + seed, true);
            let rho = reduced_two_qubit(&s, Subsystem::Mode(0), Subsystem::Mode(2)).unwrap();
            let lam = wootters_eigenvalues(&rho).unwrap();
            let c2 = concurrence_general(&rho).unwrap().powi(2);
            assert!((lam[0] - c2).abs() < 1e-12, "{lam:?} {c2}");
            assert!(lam[1..].iter().all(|&l| l < 1e-12));
        }
    }

    #[test]
    fn global_entanglement_limits() {
        assert_eq!(global_entanglement(&SystemState::excited_atom(5)).unwrap(), 0.0);
        for n in [2usize, 4, 16, 1024] {
            let a = c(1.0 / (n as f64).sqrt(), 0.0);
            let s = SystemState::new(c(0.0, 0.0), a, vec![a; n - 1]);
            let q = global_entanglement(&s).unwrap();
            let expected = 4.0 * (n as f64 - 1.0) / (n * n) as f64;
            assert!((q - expected).abs() <= 4.0 * f64::EPSILON * expected, "{n} {q}");
        }
        let mut bad = SystemState::excited_atom(2);
        bad.atom_amp = c(0.5, 0.0);
        assert!(global_entanglement(&bad).is_err());
        assert!(concurrence_sum(&bad).is_err());
    }

    #[test]
    fn concurrence_sum_examples() {
        let s = SystemState::excited_atom(4);
        let cs = concurrence_sum(&s).unwrap();
        assert_eq!((cs.total, cs.atom_part, cs.mode_part), (0.0, 0.0, 0.0));

        for n in [3usize, 10, 100] {
            let a = c(1.0 / (n as f64).sqrt(), 0.0);
            let s = SystemState::new(c(0.0, 0.0), c(0.0, 0.0), vec![a; n]);
            let cs = concurrence_sum(&s).unwrap();
            assert!((cs.mode_part - 2.0 * (1.0 - 1.0 / n as f64)).abs() < 1e-13);
            assert_eq!(cs.atom_part, 0.0);
        }
    }

    #[test]
    fn concurrence_sum_matches_pair_enumeration() {
        for seed in 0..20 {
            let s = random_state(6, 300 + seed, true);
            let mut pairs = 0.0;
            let subs: Vec<Subsystem> = std::iter::once(Subsystem::Atom)
                .chain((0..6).map(Subsystem::Mode))
                .collect();
            for a in 0..subs.len() {
                for b in a + 1..subs.len() {
                    let rho = reduced_two_qubit(&s, subs[a], subs[b]).unwrap();
                    pairs += concurrence_general(&rho).unwrap().powi(2);
                }
            }
            let cs = concurrence_sum(&s).unwrap();
            assert!((cs.total - pairs).abs() < 1e-10);
            let q = global_entanglement(&s).unwrap();
            assert!((q - 2.0 * cs.total / 7.0).abs() < 1e-12);
        }
    }
}
