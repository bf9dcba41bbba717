//! Exact dynamics through the pseudomode reduction of the Lorentzian
//! reservoir.
//!
//! For a Lorentzian structure function the atom couples to a single damped
//! pseudomode b̃:
//!
//! ```text
//! i d/dt c̃_a = Ω₀ b̃
//! i d/dt b̃   = (Δ − iΓ/2) b̃ + Ω₀ c̃_a
//! ```
//!
//! With b̃(0) = 0 the atom amplitude is a sum of two exponentials
//! `A₊e^{s₊t} + A₋e^{s₋t}` with `s± = (−(Γ + 2iΔ) ± α)/4` and
//! `α = sqrt((Γ + 2iΔ)² − 16Ω₀²)` (principal branch). On resonance this is
//! the familiar `α = sqrt(Γ² − 16Ω₀²)`. Integrating the mode equation
//! against that sum gives every bath amplitude in closed form, at any time
//! and in the t → ∞ limit.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{BathGrid, PhysicalParams};
use crate::spectrum::{Spectrum, TimePoint};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// |α| below this fraction of the rate scale is treated as critical damping.
const DEGENERACY_TOL: f64 = 1e-8;

/// Atom amplitude `c_a0·(A₊e^{s₊t} + A₋e^{s₋t})`, or `c_a0·e^{st}(1 − st)` at
/// critical damping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudomodeSolution {
    /// s₊, s₋.
    pub rates: [C64; 2],
    /// A₊, A₋.
    pub weights: [C64; 2],
    pub alpha: C64,
    pub degenerate: bool,
    pub initial_atom_amp: C64,
    params: PhysicalParams,
    // Half of the pseudomode matrix trace, and the half-splitting κ.
    half_trace: C64,
    kappa: C64,
}

impl PseudomodeSolution {
    pub fn new(params: &PhysicalParams, initial_atom_amp: C64) -> Self {
        let gamma = params.gamma;
        let omega = params.omega0_coupling;
        let delta = params.detuning;
        let shifted = C64::new(gamma, 2.0 * delta);
        let alpha = (shifted * shifted - 16.0 * omega * omega).sqrt();
        let scale = gamma.max(4.0 * omega).max(2.0 * delta.abs());
        let degenerate = alpha.norm() < DEGENERACY_TOL * scale;
        let s_plus = (-shifted + alpha) / 4.0;
        let s_minus = (-shifted - alpha) / 4.0;
        let weights = if degenerate {
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
        } else {
            let a_plus = (C64::new(1.0, 0.0) + shifted / alpha) / 2.0;
            [a_plus, C64::new(1.0, 0.0) - a_plus]
        };
        let d = C64::new(delta, -0.5 * gamma);
        PseudomodeSolution {
            rates: [s_plus, s_minus],
            weights,
            alpha,
            degenerate,
            initial_atom_amp,
            params: *params,
            half_trace: d / 2.0,
            kappa: (d * d / 4.0 + omega * omega).sqrt(),
        }
    }

    /// Excited atom, c_a(0) = 1.
    pub fn excited(params: &PhysicalParams) -> Self {
        Self::new(params, C64::new(1.0, 0.0))
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// (c̃_a(t), b̃(t)) from the 2×2 propagator
    /// `e^{−iMt} = e^{−idt/2}[cos κt − i (sin κt/κ)(M − d/2)]`, which is
    /// regular through critical damping.
    pub fn amplitudes(&self, t: f64) -> (C64, C64) {
        let kt = self.kappa * t;
        let sinc = sin_over(self.kappa, t);
        let envelope = (-I * self.half_trace * t).exp();
        let atom = envelope * (kt.cos() + I * self.half_trace * sinc);
        let mode = envelope * (-I * self.params.omega0_coupling * sinc);
        (self.initial_atom_amp * atom, self.initial_atom_amp * mode)
    }

    pub fn atom_amplitude(&self, t: f64) -> C64 {
        self.amplitudes(t).0
    }

    pub fn pseudomode_amplitude(&self, t: f64) -> C64 {
        self.amplitudes(t).1
    }

    /// Atom amplitude from the exponential decomposition (the form the mode
    /// integrals are built on).
    pub fn atom_amplitude_decomposed(&self, t: f64) -> C64 {
        let c = if self.degenerate {
            let s = self.rates[0];
            (s * t).exp() * (1.0 - s * t)
        } else {
            self.weights[0] * (self.rates[0] * t).exp() + self.weights[1] * (self.rates[1] * t).exp()
        };
        self.initial_atom_amp * c
    }

    /// c̃_λ(t) = −i g_λ ∫₀ᵗ e^{iδ_λt'} c̃_a(t') dt' for an initially empty mode.
    pub fn mode_amplitude(&self, t: TimePoint, detuning: f64, coupling: f64) -> C64 {
        let shift = C64::new(0.0, detuning);
        let integral = if self.degenerate {
            let s = self.rates[0];
            let z = s + shift;
            phi_integral(z, t, 0) - s * phi_integral(z, t, 1)
        } else {
            self.weights[0] * phi_integral(self.rates[0] + shift, t, 0)
                + self.weights[1] * phi_integral(self.rates[1] + shift, t, 0)
        };
        -I * coupling * self.initial_atom_amp * integral
    }

    /// Smallest decay rate −Re s±, the half width of the narrowest line in
    /// the reservoir spectrum.
    pub fn narrowest_linewidth(&self) -> f64 {
        (-self.rates[0].re).min(-self.rates[1].re)
    }
}

/// sin(κt)/κ, continuous at κ = 0.
fn sin_over(kappa: C64, t: f64) -> C64 {
    let x = kappa * t;
    if x.norm() < 1e-3 {
        let x2 = x * x;
        t * (1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0)))
    } else {
        x.sin() / kappa
    }
}

/// ∫₀ᵗ t'^k e^{zt'} dt' for k ∈ {0, 1}; the t → ∞ limit requires Re z < 0.
fn phi_integral(z: C64, t: TimePoint, k: u32) -> C64 {
    match t {
        TimePoint::Infinity => match k {
            0 => -1.0 / z,
            _ => 1.0 / (z * z),
        },
        TimePoint::Finite(t) => {
            let w = z * t;
            match k {
                0 => t * phi1(w),
                _ => t * t * phi2(w),
            }
        }
    }
}

/// (e^w − 1)/w.
fn phi1(w: C64) -> C64 {
    if w.norm() < 0.5 {
        // Σ w^n/(n+1)!
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for n in 1..30 {
            term *= w / (n + 1) as f64;
            sum += term;
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

/// (e^w(w − 1) + 1)/w² = ∫₀¹ u e^{wu} du.
fn phi2(w: C64) -> C64 {
    if w.norm() < 0.5 {
        // Σ w^n/(n!(n+2))
        let mut fact = C64::new(1.0, 0.0);
        let mut sum = C64::new(0.5, 0.0);
        for n in 1..30 {
            fact *= w / n as f64;
            sum += fact / (n + 2) as f64;
        }
        sum
    } else {
        (w.exp() * (w - 1.0) + 1.0) / (w * w)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// Resonant atom amplitude
/// `c_a0·e^{−Γt/4}(cosh(αt/4) + (Γ/α)sinh(αt/4))`, with the critical-damping
/// limit `c_a0·e^{−Γt/4}(1 + Γt/4)` when |α| < 1e-8·Γ.
pub fn atomic_amplitude_resonant(t: f64, params: &PhysicalParams, c_a0: C64) -> Result<C64> {
    check_time(t)?;
    if !params.is_resonant() {
        return Err(Error::Configuration(format!(
            "resonant solution needs zero detuning (got {})",
            params.detuning
        )));
    }
    let gamma = params.gamma;
    let omega = params.omega0_coupling;
    let alpha = C64::new(gamma * gamma - 16.0 * omega * omega, 0.0).sqrt();
    let x = -gamma * t / 4.0;
    if alpha.norm() < 1e-8 * gamma {
        return Ok(c_a0 * x.exp() * (1.0 - x));
    }
    // e^{−Γt/4}cosh(αt/4) and e^{−Γt/4}sinh(αt/4) expanded into decaying
    // exponentials so nothing overflows at long times.
    let grow = (x + alpha * t / 4.0).exp();
    let shrink = (x - alpha * t / 4.0).exp();
    let cosh = (grow + shrink) / 2.0;
    let sinh = (grow - shrink) / 2.0;
    Ok(c_a0 * (cosh + gamma / alpha * sinh))
}

/// (c̃_a(t), b̃(t)) for any detuning, with b̃(0) = 0.
pub fn atomic_amplitude_general(t: f64, params: &PhysicalParams, c_a0: C64) -> Result<(C64, C64)> {
    check_time(t)?;
    Ok(PseudomodeSolution::new(params, c_a0).amplitudes(t))
}

/// Closed-form c̃_λ(t) for every grid mode, starting from an empty bath.
pub fn mode_amplitudes_analytic(
    t: TimePoint,
    grid: &BathGrid,
    params: &PhysicalParams,
    c_a0: C64,
) -> Result<Vec<C64>> {
    if let TimePoint::Finite(t) = t {
        check_time(t)?;
    }
    let sol = PseudomodeSolution::new(params, c_a0);
    Ok(grid
        .detunings(params)
        .iter()
        .zip(grid.couplings())
        .map(|(&d, &g)| sol.mode_amplitude(t, d, g))
        .collect())
}

/// S(ω_λ, t) = ρ_λ|c_λ(t)|² on the grid, for c_a(0) = 1.
pub fn spectrum_at(t: TimePoint, grid: &BathGrid, params: &PhysicalParams) -> Result<Spectrum> {
    let amps = mode_amplitudes_analytic(t, grid, params, C64::new(1.0, 0.0))?;
    let rho = grid.mode_density();
    Ok(Spectrum {
        frequencies: grid.frequencies().to_vec(),
        values: amps.iter().map(|c| rho * c.norm_sqr()).collect(),
        time: t,
    })
}

pub fn spectrum_at_time(t: f64, grid: &BathGrid, params: &PhysicalParams) -> Result<Spectrum> {
    spectrum_at(TimePoint::Finite(t), grid, params)
}

/// Continuum spectrum S(ω, t) = (Ω₀²D(ω)/2π)·|c̃(ω, t)/g|² at arbitrary
/// frequencies, independent of any grid.
pub fn spectrum_at_frequencies(t: TimePoint, frequencies: &[f64], params: &PhysicalParams) -> Result<Spectrum> {
    if let TimePoint::Finite(t) = t {
        check_time(t)?;
    }
    let sol = PseudomodeSolution::excited(params);
    let om2 = params.omega0_coupling * params.omega0_coupling;
    let values = frequencies
        .iter()
        .map(|&w| {
            let amp = sol.mode_amplitude(t, w - params.atom_frequency, 1.0);
            om2 * params.structure_function(w) / (2.0 * PI) * amp.norm_sqr()
        })
        .collect();
    Ok(Spectrum {
        frequencies: frequencies.to_vec(),
        values,
        time: t,
    })
}

/// Long-time spectrum at one detuning δ = ω − ω₀:
/// `Ω₀²(Γ/2) / (π[(δ² − δΔ − Ω₀²)² + (Γ/2)²δ²])`, which on resonance is
/// `Ω₀²(Γ/2) / (π[(δ² − Ω₀²)² + (Γ/2)²δ²])`.
pub fn spectrum_infinity_at(delta: f64, params: &PhysicalParams) -> f64 {
    let omega_sq = params.omega0_coupling * params.omega0_coupling;
    let hw = 0.5 * params.gamma;
    let real = delta * delta - delta * params.detuning - omega_sq;
    omega_sq * hw / (PI * (real * real + hw * hw * delta * delta))
}

/// Closed-form S(ω, ∞) for c_a(0) = 1, c₀ = 0.
pub fn spectrum_infinity(frequencies: &[f64], params: &PhysicalParams) -> Spectrum {
    Spectrum {
        frequencies: frequencies.to_vec(),
        values: frequencies
            .iter()
            .map(|w| spectrum_infinity_at(w - params.atom_frequency, params))
            .collect(),
        time: TimePoint::Infinity,
    }
}

/// Closed-form S(ω, ∞) evaluated at the grid detunings (exactly symmetric
/// about ω₀ on a resonant odd-sized grid).
pub fn spectrum_infinity_on_grid(grid: &BathGrid, params: &PhysicalParams) -> Spectrum {
    Spectrum {
        frequencies: grid.frequencies().to_vec(),
        values: grid
            .detunings(params)
            .iter()
            .map(|&d| spectrum_infinity_at(d, params))
            .collect(),
        time: TimePoint::Infinity,
    }
}

/// Largest number of points [`resolving_grid`] will allocate.
pub const MAX_RESOLVING_POINTS: usize = 4_000_001;

/// Odd-sized uniform grid over `ω_c ± half_span` whose spacing puts
/// `samples_per_linewidth` points across the narrowest spectral line
/// (half width min(−Re s±, Γ/4)).
pub fn resolving_grid(params: &PhysicalParams, half_span: f64, samples_per_linewidth: f64) -> Result<BathGrid> {
    let width = PseudomodeSolution::excited(params)
        .narrowest_linewidth()
        .min(params.gamma / 4.0);
    let target = width / samples_per_linewidth.max(1.0);
    let mut n = (2.0 * half_span / target).ceil() as usize + 1;
    if n.is_multiple_of(2) {
        n += 1;
    }
    if n > MAX_RESOLVING_POINTS {
        return Err(Error::Configuration(format!(
            "resolving the spectrum needs {n} points (limit {MAX_RESOLVING_POINTS})"
        )));
    }
    crate::model::discretize_bath(params, n.max(3), half_span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::discretize_bath;

    fn c1() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn initial_values() {
        let p = PhysicalParams::resonant(1.0, 3.0).unwrap();
        let c0 = C64::new(0.6, -0.8);
        assert_eq!(atomic_amplitude_resonant(0.0, &p, c0).unwrap(), c0);
        let (a, b) = atomic_amplitude_general(0.0, &p, c0).unwrap();
        assert!((a - c0).norm() < 1e-15);
        assert_eq!(b.norm(), 0.0);
        assert!(atomic_amplitude_resonant(-1.0, &p, c0).is_err());
        assert!(atomic_amplitude_general(-1.0, &p, c0).is_err());
    }

    #[test]
    fn critical_damping() {
        let p = PhysicalParams::resonant(4.0, 1.0).unwrap();
        let c = atomic_amplitude_resonant(1.0, &p, c1()).unwrap();
        assert!((c.re - 2.0 * (-1.0_f64).exp()).abs() < 1e-15);
        assert!((c.re - 0.7358).abs() < 1e-4);
        let (g, _) = atomic_amplitude_general(1.0, &p, c1()).unwrap();
        assert!((g - c).norm() < 1e-14);
        let sol = PseudomodeSolution::excited(&p);
        assert!(sol.degenerate);
        assert!((sol.atom_amplitude_decomposed(1.0) - c).norm() < 1e-15);
    }

    #[test]
    fn resonant_and_general_forms_agree() {
        for omega in [0.01, 0.1, 0.25, 0.2499, 0.26, 1.0, 10.0, 40.0] {
            let p = PhysicalParams::resonant(1.0, omega).unwrap();
            for k in 0..200 {
                let t = k as f64 * 0.05;
                let a = atomic_amplitude_resonant(t, &p, c1()).unwrap();
                let (b, _) = atomic_amplitude_general(t, &p, c1()).unwrap();
                assert!((a - b).norm() < 1e-12, "omega={omega} t={t} {a} {b}");
            }
        }
    }

    #[test]
    fn solution_invariants() {
        for (omega, delta) in [(0.1, 0.0), (10.0, 0.0), (1.0, 0.7), (2.0, -3.0)] {
            let p = PhysicalParams::with_detuning(1.0, omega, delta).unwrap();
            let sol = PseudomodeSolution::excited(&p);
            let [a, b] = sol.weights;
            assert!((a + b - 1.0).norm() < 1e-14);
            assert!(sol.rates.iter().all(|s| s.re <= 0.0));
            let [s1, s2] = sol.rates;
            assert!((a * s1 + b * s2).norm() < 1e-12);
            for k in 0..50 {
                let t = 0.13 * k as f64;
                let diff = sol.atom_amplitude_decomposed(t) - sol.atom_amplitude(t);
                assert!(diff.norm() < 1e-12);
            }
        }
        let p = PhysicalParams::resonant(1.0, 10.0).unwrap();
        let sol = PseudomodeSolution::excited(&p);
        let expected = C64::new(1.0 - 1600.0, 0.0).sqrt();
        assert!((sol.alpha - expected).norm() < 1e-12);
    }

    #[test]
    fn leakage_balance() {
        for (omega, delta) in [(0.3, 0.0), (5.0, 0.0), (1.0, 2.0)] {
            let p = PhysicalParams::with_detuning(1.0, omega, delta).unwrap();
            let sol = PseudomodeSolution::excited(&p);
            let n = 200_000;
            let t_end = 6.0;
            let h = t_end / n as f64;
            // Simpson on |b|²
            let mut acc = 0.0;
            for k in 0..=n {
                let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * sol.pseudomode_amplitude(k as f64 * h).norm_sqr();
            }
            let leaked = p.gamma * acc * h / 3.0;
            let (c, b) = sol.amplitudes(t_end);
            let total = c.norm_sqr() + b.norm_sqr() + leaked;
            assert!((total - 1.0).abs() < 1e-8, "{total}");
        }
    }

    #[test]
    fn mode_amplitudes_vanish_at_zero() {
        let p = PhysicalParams::resonant(1.0, 2.0).unwrap();
        let g = discretize_bath(&p, 101, 40.0).unwrap();
        let amps = mode_amplitudes_analytic(TimePoint::Finite(0.0), &g, &p, c1()).unwrap();
        assert!(amps.iter().all(|c| c.norm() == 0.0));
        let s = spectrum_at_time(0.0, &g, &p).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mode_amplitudes_solve_the_mode_equation() {
        let p = PhysicalParams::with_detuning(1.0, 2.0, 0.4).unwrap();
        let sol = PseudomodeSolution::excited(&p);
        let (delta, g) = (1.7, 0.3);
        let t = 2.2;
        let h = 1e-5;
        let f = |t| sol.mode_amplitude(TimePoint::Finite(t), delta, g);
        let numeric = (f(t + h) - f(t - h)) / (2.0 * h);
        let exact = -I * g * C64::from_polar(1.0, delta * t) * sol.atom_amplitude(t);
        assert!((numeric - exact).norm() < 1e-8);
    }

    #[test]
    fn removable_singularity() {
        // s + iδ = 0 is impossible for Re s < 0; small finite-time arguments
        // exercise the series branch instead.
        let w = C64::new(1e-15, -1e-15);
        assert!((phi1(w) - 1.0).norm() < 1e-14);
        assert!((phi2(w) - 0.5).norm() < 1e-14);
        for w in [C64::new(0.3, 0.2), C64::new(-0.49, 0.0), C64::new(0.0, 0.45)] {
            assert!((phi1(w) - (w.exp() - 1.0) / w).norm() < 1e-14);
            assert!((phi2(w) - (w.exp() * (w - 1.0) + 1.0) / (w * w)).norm() < 1e-13);
        }
    }

    #[test]
    fn long_time_modes_reproduce_closed_form_spectrum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for (omega, delta) in [(10.0, 0.0), (0.1, 0.0), (1.0, 0.0), (1.5, 0.8)] {
            let p = PhysicalParams::with_detuning(1.0, omega, delta).unwrap();
            let sol = PseudomodeSolution::excited(&p);
            for _ in 0..100 {
                let d: f64 = rng.random_range(-30.0..30.0);
                let w = p.atom_frequency + d;
                let rho_g2 = omega * omega * p.structure_function(w) / (2.0 * PI);
                let amp = sol.mode_amplitude(TimePoint::Infinity, d, 1.0);
                let s = rho_g2 * amp.norm_sqr();
                let closed = spectrum_infinity_at(d, &p);
                assert!((s / closed - 1.0).abs() < 1e-10, "{s} {closed}");
            }
        }
    }

    #[test]
    fn continuum_spectrum_limits() {
        let p = PhysicalParams::with_detuning(1.0, 2.5, 0.7).unwrap();
        let w: Vec<f64> = (-60..=60).map(|k| 0.13 * k as f64).collect();
        let s = spectrum_at_frequencies(TimePoint::Infinity, &w, &p).unwrap();
        let closed = spectrum_infinity(&w, &p);
        for (a, b) in s.values.iter().zip(&closed.values) {
            assert!((a / b - 1.0).abs() < 1e-10);
        }
        let zero = spectrum_at_frequencies(TimePoint::Finite(0.0), &w, &p).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
        assert!(spectrum_at_frequencies(TimePoint::Finite(-1.0), &w, &p).is_err());
    }

    #[test]
    fn spectrum_infinity_values() {
        for (gamma, omega) in [(1.0, 10.0), (1.0, 0.1), (2.0, 3.0)] {
            let p = PhysicalParams::resonant(gamma, omega).unwrap();
            assert!((spectrum_infinity_at(0.0, &p) / (gamma / (2.0 * PI * omega * omega)) - 1.0).abs() < 1e-14);
            let side = 2.0 / (PI * gamma);
            assert!((spectrum_infinity_at(omega, &p) / side - 1.0).abs() < 1e-14);
            assert!((spectrum_infinity_at(-omega, &p) / side - 1.0).abs() < 1e-14);
            for x in [0.3, 2.0, 11.0] {
                assert_eq!(spectrum_infinity_at(x, &p), spectrum_infinity_at(-x, &p));
            }
        }
    }

    #[test]
    fn spectrum_infinity_first_form_identity() {
        let p = PhysicalParams::resonant(1.3, 2.1).unwrap();
        for k in -50..=50 {
            let d = 0.37 * k as f64;
            let hw2 = (p.gamma / 2.0).powi(2);
            let om2 = p.omega0_coupling.powi(2);
            let first = om2 * p.structure_function(d) / (2.0 * PI) * (d * d + hw2)
                / ((d * d - om2).powi(2) + hw2 * d * d);
            let second = spectrum_infinity_at(d, &p);
            assert!((first / second - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn narrowest_linewidth_regimes() {
        let strong = PseudomodeSolution::excited(&PhysicalParams::resonant(1.0, 10.0).unwrap());
        assert!((strong.narrowest_linewidth() - 0.25).abs() < 1e-12);
        let weak = PseudomodeSolution::excited(&PhysicalParams::resonant(1.0, 0.1).unwrap());
        assert!((weak.narrowest_linewidth() - 0.25 * (1.0 - 0.84_f64.sqrt())).abs() < 1e-12);
    }
}
