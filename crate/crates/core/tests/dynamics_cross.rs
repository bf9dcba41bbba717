mod common;

use num_complex::Complex64 as C64;
use reservoir_core::discrete::{default_dt, integrate};
use reservoir_core::model::{default_bath, discretize_bath};
use reservoir_core::pseudomode::{mode_amplitudes_analytic, PseudomodeSolution};
use reservoir_core::{PhysicalParams, SystemState, TimePoint};

fn population_error(omega0: f64, n_modes: usize, half_span: f64) -> (f64, f64) {
    let p = PhysicalParams::resonant(1.0, omega0).unwrap();
    let grid = discretize_bath(&p, n_modes, half_span).unwrap();
    let dt = default_dt(&grid, &p);
    let traj = integrate(&SystemState::excited_atom(n_modes), &grid, &p, 10.0, dt, 10).unwrap();
    let sol = PseudomodeSolution::excited(&p);
    let err = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| (s.atom_population() - sol.atom_amplitude(t).norm_sqr()).abs())
        .fold(0.0, f64::max);
    (err, traj.max_norm_drift())
}

#[test]
fn rk4_population_tracks_closed_form_weak_and_intermediate() {
    for omega0 in [0.1, 1.0] {
        let (err, drift) = population_error(omega0, 2001, 40.0);
        assert!(err < 1e-3, "Ω₀={omega0}: {err}");
        assert!(drift < 1e-8);
    }
}

#[test]
fn mode_amplitudes_agree_with_rk4() {
    let p = PhysicalParams::resonant(1.0, 1.0).unwrap();
    let grid = default_bath(&p, 2001).unwrap();
    let dt = default_dt(&grid, &p);
    let traj = integrate(&SystemState::excited_atom(2001), &grid, &p, 5.0, dt, 1_000_000).unwrap();
    let rk4 = traj.final_state();
    let analytic = mode_amplitudes_analytic(TimePoint::Finite(5.0), &grid, &p, C64::new(1.0, 0.0)).unwrap();
    let worst = rk4
        .mode_amps
        .iter()
        .zip(&analytic)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn weak_coupling_decays_monotonically() {
    let p = PhysicalParams::resonant(1.0, 0.1).unwrap();
    let grid = default_bath(&p, 2001).unwrap();
    let dt = default_dt(&grid, &p);
    let traj = integrate(&SystemState::excited_atom(2001), &grid, &p, 5.0, dt, 20).unwrap();
    let pops = traj.atom_populations();
    assert!(pops.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(*pops.last().unwrap() < 0.9);
}

#[test]
fn vacuum_amplitude_is_constant() {
    let p = PhysicalParams::resonant(1.0, 2.0).unwrap();
    let grid = discretize_bath(&p, 201, 40.0).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut init = SystemState::excited_atom(201);
    init.vacuum_amp = C64::new(0.0, h);
    init.atom_amp = C64::new(h, 0.0);
    let traj = integrate(&init, &grid, &p, 3.0, default_dt(&grid, &p), 50).unwrap();
    assert!(traj.states.iter().all(|s| s.vacuum_amp == init.vacuum_amp));
    assert!(traj.max_norm_drift() < 1e-8);
}

#[test]
fn grid_refinement_converges() {
    let p = PhysicalParams::resonant(1.0, 10.0).unwrap();
    let span = p.default_half_span();
    let run = |n: usize| {
        let grid = discretize_bath(&p, n, span).unwrap();
        let dt = default_dt(&grid, &p);
        integrate(&SystemState::excited_atom(n), &grid, &p, 10.0, dt, 40).unwrap()
    };
    let coarse = run(2001);
    let fine = run(4001);
    assert_eq!(coarse.times.len(), fine.times.len());
    let worst = coarse
        .states
        .iter()
        .zip(&fine.states)
        .map(|(a, b)| (a.atom_amp.norm() - b.atom_amp.norm()).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn time_step_convergence_is_fourth_order() {
    let p = PhysicalParams::resonant(1.0, 3.0).unwrap();
    let grid = discretize_bath(&p, 101, 20.0).unwrap();
    let init = SystemState::excited_atom(101);
    let t_end = 2.0;
    let base = 0.004;
    let final_amp = |dt: f64| integrate(&init, &grid, &p, t_end, dt, 1_000_000).unwrap().final_state().atom_amp;
    let a1 = final_amp(base);
    let a2 = final_amp(base / 2.0);
    let a4 = final_amp(base / 4.0);
    let ratio = (a1 - a2).norm() / (a2 - a4).norm();
    assert!((8.0..=24.0).contains(&ratio), "ratio {ratio}");
}
