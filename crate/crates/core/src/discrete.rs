//! Interaction-picture Schrödinger equation for the atom and N discrete bath
//! modes, integrated with fixed-step RK4.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{BathGrid, PhysicalParams};
use crate::quadrature::neumaier_sum;

/// Single-excitation amplitudes at one instant (interaction picture).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub time: f64,
    /// c₀, untouched by the dynamics.
    pub vacuum_amp: C64,
    /// c̃_a.
    pub atom_amp: C64,
    /// c̃_λ, one per grid mode.
    pub mode_amps: Vec<C64>,
}

impl SystemState {
    /// Fully excited atom with an empty bath of `n_modes` modes.
    pub fn excited_atom(n_modes: usize) -> Self {
        SystemState {
            time: 0.0,
            vacuum_amp: C64::new(0.0, 0.0),
            atom_amp: C64::new(1.0, 0.0),
            mode_amps: vec![C64::new(0.0, 0.0); n_modes],
        }
    }

    pub fn new(vacuum_amp: C64, atom_amp: C64, mode_amps: Vec<C64>) -> Self {
        SystemState {
            time: 0.0,
            vacuum_amp,
            atom_amp,
            mode_amps,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.mode_amps.len()
    }

    /// Atom plus modes.
    pub fn n_qubits(&self) -> usize {
        self.mode_amps.len() + 1
    }

    pub fn norm_sqr(&self) -> f64 {
        neumaier_sum(
            std::iter::once(self.vacuum_amp.norm_sqr())
                .chain(std::iter::once(self.atom_amp.norm_sqr()))
                .chain(self.mode_amps.iter().map(|c| c.norm_sqr())),
        )
    }

    pub fn atom_population(&self) -> f64 {
        self.atom_amp.norm_sqr()
    }

    /// Σ_λ |c_λ|².
    pub fn bath_population(&self) -> f64 {
        neumaier_sum(self.mode_amps.iter().map(|c| c.norm_sqr()))
    }

    /// Schrödinger-picture amplitudes: c_a = e^{−iω₀t} c̃_a, c_λ = e^{−iω_λt} c̃_λ.
    pub fn to_schrodinger(&self, params: &PhysicalParams, grid: &BathGrid) -> SystemState {
        let t = self.time;
        let mode_amps = self
            .mode_amps
            .iter()
            .zip(grid.frequencies())
            .map(|(c, w)| c * C64::from_polar(1.0, -w * t))
            .collect();
        SystemState {
            time: t,
            vacuum_amp: self.vacuum_amp,
            atom_amp: self.atom_amp * C64::from_polar(1.0, -params.atom_frequency * t),
            mode_amps,
        }
    }

    pub(crate) fn check_grid(&self, grid: &BathGrid) -> Result<()> {
        if self.mode_amps.len() != grid.len() {
            return Err(Error::GridMismatch {
                expected: grid.len(),
                found: self.mode_amps.len(),
            });
        }
        Ok(())
    }
}

/// Sampled solution of the amplitude equations.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SystemState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &SystemState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn atom_populations(&self) -> Vec<f64> {
        self.states.iter().map(SystemState::atom_population).collect()
    }

    /// max_t |norm(t) − 1|.
    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Time derivatives of the dynamical amplitudes (dc₀/dt is identically zero).
#[derive(Debug, Clone, PartialEq)]
pub struct Derivative {
    pub vacuum: C64,
    pub atom: C64,
    pub modes: Vec<C64>,
}

/// dc̃_a/dt = −i Σ g_λ e^{−iδ_λt} c̃_λ,  dc̃_λ/dt = −i g_λ e^{iδ_λt} c̃_a.
pub fn derivative(state: &SystemState, grid: &BathGrid, params: &PhysicalParams) -> Result<Derivative> {
    state.check_grid(grid)?;
    let bath = PreparedBath::new(grid, params);
    let mut phases = vec![C64::new(0.0, 0.0); grid.len()];
    bath.fill_phases(state.time, &mut phases);
    let mut modes = vec![C64::new(0.0, 0.0); grid.len()];
    let atom = bath.eval(&phases, state.atom_amp, &state.mode_amps, &mut modes);
    Ok(Derivative {
        vacuum: C64::new(0.0, 0.0),
        atom,
        modes,
    })
}

/// 0.01·min(1/Ω₀, 1/Γ, 1/max|δ_λ|).
pub fn default_dt(grid: &BathGrid, params: &PhysicalParams) -> f64 {
    0.01 * fastest_timescale(grid, params)
}

/// 0.1·min(1/Ω₀, 1/Γ, 1/max|δ_λ|); larger steps are rejected.
pub fn max_stable_dt(grid: &BathGrid, params: &PhysicalParams) -> f64 {
    0.1 * fastest_timescale(grid, params)
}

fn fastest_timescale(grid: &BathGrid, params: &PhysicalParams) -> f64 {
    let mut rate = params.omega0_coupling.max(params.gamma);
    rate = rate.max(grid.max_abs_detuning(params));
    1.0 / rate
}

/// Number of whole steps and the length of the trailing partial step.
fn step_schedule(t_end: f64, dt: f64) -> (usize, f64) {
    let ratio = t_end / dt;
    let whole = (ratio + 1e-9).floor() as usize;
    let rest = t_end - whole as f64 * dt;
    if rest > 1e-12 * dt.max(t_end) {
        (whole, rest)
    } else {
        (whole, 0.0)
    }
}

/// Sample times produced by [`integrate`] for the same arguments: every
/// `sample_every`-th step, plus `t_end`.
pub fn sample_times(t_end: f64, dt: f64, sample_every: usize) -> Vec<f64> {
    let every = sample_every.max(1);
    let (whole, rest) = step_schedule(t_end, dt);
    let mut times: Vec<f64> = (0..=whole)
        .filter(|k| k % every == 0)
        .map(|k| k as f64 * dt)
        .collect();
    let t_final = if rest > 0.0 { t_end } else { whole as f64 * dt };
    if *times.last().unwrap() != t_final {
        times.push(t_final);
    }
    times
}

/// Smallest decimation keeping at most `max_samples` snapshots.
pub fn decimation_for(t_end: f64, dt: f64, max_samples: usize) -> usize {
    let (whole, _) = step_schedule(t_end, dt);
    let slots = max_samples.saturating_sub(1).max(1);
    whole.div_ceil(slots).max(1)
}

/// Fixed-step RK4 from `initial.time` over a duration `t_end`.
pub fn integrate(
    initial: &SystemState,
    grid: &BathGrid,
    params: &PhysicalParams,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    initial.check_grid(grid)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Configuration(format!("dt must be positive (got {dt})")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::NegativeTime(t_end));
    }
    let limit = max_stable_dt(grid, params);
    if dt > limit {
        return Err(Error::UnstableStep { dt, limit });
    }
    let deviation = (initial.norm_sqr() - 1.0).abs();
    if deviation > 1e-10 {
        return Err(Error::NotNormalized { deviation });
    }
    let every = sample_every.max(1);
    let (whole, rest) = step_schedule(t_end, dt);
    let t0 = initial.time;

    let bath = PreparedBath::new(grid, params);
    let mut stepper = Rk4::new(grid.len());
    let mut atom = initial.atom_amp;
    let mut modes = initial.mode_amps.clone();

    let snapshot = |t: f64, atom: C64, modes: &[C64]| SystemState {
        time: t,
        vacuum_amp: initial.vacuum_amp,
        atom_amp: atom,
        mode_amps: modes.to_vec(),
    };

    let mut times = vec![t0];
    let mut states = vec![initial.clone()];
    for k in 0..whole {
        let t = t0 + k as f64 * dt;
        let t_next = t0 + (k + 1) as f64 * dt;
        atom = stepper.step(&bath, t, t_next, atom, &mut modes);
        let n = k + 1;
        if n % every == 0 {
            let tn = t0 + n as f64 * dt;
            times.push(tn);
            states.push(snapshot(tn, atom, &modes));
        }
    }
    if rest > 0.0 {
        let t = t0 + whole as f64 * dt;
        atom = stepper.step(&bath, t, t + rest, atom, &mut modes);
    }
    let t_final = t0 + if rest > 0.0 { t_end } else { whole as f64 * dt };
    if *times.last().unwrap() != t_final {
        times.push(t_final);
        states.push(snapshot(t_final, atom, &modes));
    }
    Ok(Trajectory { times, states })
}

/// Grid data precomputed once per integration.
struct PreparedBath {
    detunings: Vec<f64>,
    couplings: Vec<f64>,
}

impl PreparedBath {
    fn new(grid: &BathGrid, params: &PhysicalParams) -> Self {
        PreparedBath {
            detunings: grid.detunings(params),
            couplings: grid.couplings().to_vec(),
        }
    }

    /// phases[λ] = e^{iδ_λ t}.
    fn fill_phases(&self, t: f64, phases: &mut [C64]) {
        for (p, d) in phases.iter_mut().zip(&self.detunings) {
            let (s, c) = (d * t).sin_cos();
            *p = C64::new(c, s);
        }
    }

    /// Writes dc̃_λ/dt into `out` and returns dc̃_a/dt.
    fn eval(&self, phases: &[C64], atom: C64, modes: &[C64], out: &mut [C64]) -> C64 {
        let minus_i = C64::new(0.0, -1.0);
        let mut sum_re = KahanAcc::default();
        let mut sum_im = KahanAcc::default();
        for (((o, &g), p), c) in out.iter_mut().zip(&self.couplings).zip(phases).zip(modes) {
            *o = minus_i * g * p * atom;
            let term = g * p.conj() * c;
            sum_re.add(term.re);
            sum_im.add(term.im);
        }
        minus_i * C64::new(sum_re.value(), sum_im.value())
    }
}

#[derive(Default, Clone, Copy)]
struct KahanAcc {
    sum: f64,
    comp: f64,
}

impl KahanAcc {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Scratch buffers for the classical four-stage scheme.
struct Rk4 {
    phase_start: Vec<C64>,
    phase_mid: Vec<C64>,
    phase_end: Vec<C64>,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
    // Time at which `phase_end` was last filled.
    end_time: Option<f64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Rk4 {
            phase_start: z.clone(),
            phase_mid: z.clone(),
            phase_end: z.clone(),
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
            end_time: None,
        }
    }

    /// One step from `t` to `t_next`; end phases are reused as the next
    /// step's start phases.
    fn step(&mut self, bath: &PreparedBath, t: f64, t_next: f64, atom: C64, modes: &mut [C64]) -> C64 {
        let h = t_next - t;
        if self.end_time == Some(t) {
            std::mem::swap(&mut self.phase_start, &mut self.phase_end);
        } else {
            bath.fill_phases(t, &mut self.phase_start);
        }
        bath.fill_phases(t + 0.5 * h, &mut self.phase_mid);
        bath.fill_phases(t_next, &mut self.phase_end);
        self.end_time = Some(t_next);

        let [k1, k2, k3, k4] = &mut self.k;
        let a1 = bath.eval(&self.phase_start, atom, modes, k1);

        for ((y, m), d) in self.tmp.iter_mut().zip(modes.iter()).zip(k1.iter()) {
            *y = m + d * (0.5 * h);
        }
        let a2 = bath.eval(&self.phase_mid, atom + a1 * (0.5 * h), &self.tmp, k2);

        for ((y, m), d) in self.tmp.iter_mut().zip(modes.iter()).zip(k2.iter()) {
            *y = m + d * (0.5 * h);
        }
        let a3 = bath.eval(&self.phase_mid, atom + a2 * (0.5 * h), &self.tmp, k3);

        for ((y, m), d) in self.tmp.iter_mut().zip(modes.iter()).zip(k3.iter()) {
            *y = m + d * h;
        }
        let a4 = bath.eval(&self.phase_end, atom + a3 * h, &self.tmp, k4);

        let w = h / 6.0;
        for (i, m) in modes.iter_mut().enumerate() {
            *m += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
        atom + (a1 + (a2 + a3) * 2.0 + a4) * w
    }
}
