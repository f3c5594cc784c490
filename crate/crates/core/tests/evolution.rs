mod common;

use std::f64::consts::PI;

use nalgebra::Vector3;
use photon_core::evolve::*;
use photon_core::field::{norm_energy, plane_wave};
use photon_core::media::{potential_energy, Convention, PotentialField};
use photon_core::spectral::{to_real, to_reciprocal, ModeTable};
use photon_core::spin::helicity_basis;
use photon_core::{Complex64, Grid, VectorField};

use common::*;

fn box3() -> Grid {
    Grid::new([8, 8, 8], [4.0, 4.0, 4.0]).unwrap()
}

/// Smooth real potential on a square 2D box.
fn smooth_potential(grid: Grid, amplitude: f64) -> PotentialField {
    let l = grid.lengths();
    let values = (0..grid.len())
        .map(|i| {
            let r = grid.position(i);
            Complex64::from(amplitude * (2.0 * PI * r.x / l[0]).cos() * (2.0 * PI * r.y / l[1]).cos())
        })
        .collect();
    PotentialField::new(grid, values).unwrap()
}

fn packet_2d(grid: Grid) -> VectorField {
    let l = grid.lengths();
    wave_packet(
        grid,
        Vector3::new(0.5 * l[0], 0.5 * l[1], 0.5),
        Vector3::new(2.0, 2.0, 1e6),
        mode_wavevector(&grid, [4, 0, 0]),
        Helicity::Plus,
    )
    .unwrap()
}

#[test]
fn free_step_matches_explicit_helicity_decomposition() {
    let mut r = rng(10);
    let grid = box3();
    let f = random_field(grid, photon_core::Space::Real, &mut r);
    let dt = 0.37;
    let got = to_reciprocal(&free_propagator(&f, dt).unwrap()).unwrap();
    let rec = to_reciprocal(&f).unwrap();
    let modes = ModeTable::new(&grid);
    for idx in 0..grid.len() {
        let v = rec.get(idx);
        let expected = match modes.unit(idx) {
            None => v,
            Some(u) => {
                let b = helicity_basis(&u).unwrap();
                let theta = modes.norm(idx) * dt;
                b.plus * (b.plus.dotc(&v) * Complex64::from_polar(1.0, -theta))
                    + b.minus * (b.minus.dotc(&v) * Complex64::from_polar(1.0, theta))
            }
        };
        assert!((got.get(idx) - expected).norm() < 1e-13);
    }
}

#[test]
fn free_propagator_is_a_semigroup() {
    let mut r = rng(11);
    let f = random_transverse(box3(), &mut r);
    let half = free_propagator(&free_propagator(&f, 0.35).unwrap(), 0.35).unwrap();
    let full = free_propagator(&f, 0.7).unwrap();
    assert!(half.max_diff(&full).unwrap() < 1e-13);
    assert!(free_propagator(&f, 0.0).unwrap().max_diff(&f).unwrap() < 1e-14);
}

#[test]
fn helicity_plane_waves_keep_phase_for_long_times() {
    let grid = box3();
    for m in [[1, 0, 0], [0, 2, 1], [3, -1, 2], [-4, 0, 0]] {
        let k = mode_wavevector(&grid, m);
        let b = helicity_basis(&(k / k.norm())).unwrap();
        for (pol, sign) in [(b.plus, -1.0), (b.minus, 1.0)] {
            let f = plane_wave(grid, k, pol, Complex64::ONE).unwrap();
            for t in [1.0, 10.0, 100.0, 1000.0] {
                let mut expected = f.clone();
                expected.scale(Complex64::from_polar(1.0, sign * k.norm() * t));
                let got = free_propagator(&f, t).unwrap();
                assert!(got.max_diff(&expected).unwrap() < 1e-12, "m = {m:?}, t = {t}");
            }
        }
    }
}

#[test]
fn free_evolution_stays_transverse() {
    let mut r = rng(12);
    let f = random_transverse(box3(), &mut r);
    let mut state = EvolutionState::new(f, 0.1, None).unwrap();
    for _ in 0..20 {
        state.advance(5).unwrap();
        assert!(state.propagator().transversality(state.field()).unwrap() < 1e-10);
    }
}

#[test]
fn split_step_reduces_to_free_and_uniform_cases() {
    let mut r = rng(13);
    let grid = box3();
    let f = random_transverse(grid, &mut r);
    let zero = PotentialField::uniform(grid, Complex64::ZERO);
    let s = split_step(EvolutionState::new(f.clone(), 0.05, Some(zero)).unwrap(), 40).unwrap();
    assert!(s.field().max_diff(&free_propagator(&f, 2.0).unwrap()).unwrap() < 1e-13);

    let v = Complex64::from(-0.4);
    let s =
        split_step(EvolutionState::new(f.clone(), 0.05, Some(PotentialField::uniform(grid, v))).unwrap(), 40).unwrap();
    let mut expected = free_propagator(&f, 2.0).unwrap();
    expected.scale((-Complex64::I * v * 2.0).exp());
    assert!(s.field().max_diff(&expected).unwrap() < 1e-12);
}

#[test]
fn uniform_real_potential_is_unitary_over_ten_thousand_steps() {
    let mut r = rng(14);
    let grid = box3();
    let f = random_transverse(grid, &mut r);
    let n0 = norm_energy(&f);
    let pot = PotentialField::uniform(grid, Complex64::from(0.3));
    let mut state = EvolutionState::new(f, 0.05, Some(pot)).unwrap();
    state.advance_recording(10_000, 1000).unwrap();
    for s in state.diagnostics() {
        assert!((s.norm - n0).abs() <= 1e-10 * n0);
    }
}

#[test]
fn varying_real_potential_norm_drift_is_small() {
    let grid = Grid::new([64, 64, 1], [16.0, 16.0, 1.0]).unwrap();
    let f = packet_2d(grid);
    let n0 = norm_energy(&f);
    let mut state = EvolutionState::new(f, 0.05, Some(smooth_potential(grid, -0.3))).unwrap();
    state.advance_recording(2000, 100).unwrap();
    let drift = state.diagnostics().map(|s| (s.norm - n0).abs() / n0).fold(0.0, f64::max);
    assert!(drift <= 1e-6, "drift {drift:e}");
    assert!(state.max_projected_out() > 0.0);
}

#[test]
fn uniform_absorber_decays_at_twice_the_rate() {
    let mut r = rng(15);
    let grid = box3();
    let f = random_transverse(grid, &mut r);
    let n0 = norm_energy(&f);
    let pot = PotentialField::uniform(grid, Complex64::new(0.0, -0.1));
    let mut state = EvolutionState::new(f, 0.1, Some(pot)).unwrap();
    state.advance(50).unwrap();
    for s in state.diagnostics() {
        let expected = n0 * (-0.2 * s.time).exp();
        assert!((s.norm - expected).abs() <= 1e-10 * expected);
    }
}

#[test]
fn absorption_is_monotone() {
    let grid = Grid::new([64, 64, 1], [16.0, 16.0, 1.0]).unwrap();
    let values = (0..grid.len())
        .map(|i| {
            let x = grid.position(i).x;
            Complex64::new(0.2 * x.sin(), -0.5 * (1.0 + (0.5 * x).cos()))
        })
        .collect();
    let pot = PotentialField::new(grid, values).unwrap();
    let mut state = EvolutionState::new(packet_2d(grid), 0.05, Some(pot)).unwrap();
    state.advance(400).unwrap();
    let norms: Vec<f64> = state.diagnostics().map(|s| s.norm).collect();
    for w in norms.windows(2) {
        assert!(w[1] <= w[0]);
    }
    assert!(norms.last().unwrap() < &(0.5 * norms[0]));
}

#[test]
fn evolution_is_reversible() {
    let mut r = rng(16);
    let grid = box3();
    let f = random_transverse(grid, &mut r);
    let mut state =
        EvolutionState::new(f.clone(), 0.05, Some(PotentialField::uniform(grid, Complex64::from(0.7)))).unwrap();
    state.advance(500).unwrap();
    state.rewind(500).unwrap();
    assert!(state.field().rel_l2_diff(&f).unwrap() < 1e-10);

    let grid = Grid::new([64, 64, 1], [16.0, 16.0, 1.0]).unwrap();
    let f = packet_2d(grid);
    let mut state = EvolutionState::new(f.clone(), 0.05, Some(smooth_potential(grid, -0.3))).unwrap();
    state.advance(200).unwrap();
    state.rewind(200).unwrap();
    let err = state.field().rel_l2_diff(&f).unwrap();
    assert!(err < 1e-6, "varying potential round trip {err:e}");
}

#[test]
fn strang_self_convergence_is_second_order() {
    let grid = Grid::new([64, 64, 1], [16.0, 16.0, 1.0]).unwrap();
    let f = packet_2d(grid);
    let pot = smooth_potential(grid, -0.3);
    let run = |dt: f64| {
        let mut s = EvolutionState::new(f.clone(), dt, Some(pot.clone())).unwrap();
        s.advance((4.0 / dt).round() as u64).unwrap();
        s.into_field()
    };
    let (a, b, c) = (run(0.1), run(0.05), run(0.025));
    let ratio = a.rel_l2_diff(&b).unwrap() / b.rel_l2_diff(&c).unwrap();
    assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
}

#[test]
fn packet_centroid_moves_at_light_speed() {
    let grid = Grid::line(256, 64.0).unwrap();
    let carrier = mode_wavevector(&grid, [32, 0, 0]);
    let f =
        wave_packet(grid, Vector3::new(20.0, 0.5, 0.5), Vector3::new(4.0, 1e6, 1e6), carrier, Helicity::Plus).unwrap();
    let mut state = EvolutionState::new(f, 0.1, None).unwrap();
    let start = observables(&state).unwrap();
    state.advance(100).unwrap();
    let end = observables(&state).unwrap();
    let speed = (end.centroid.x - start.centroid.x) / state.time();
    assert!((speed - 1.0).abs() < 0.01, "speed {speed}");
    assert!((end.norm - norm_energy(state.field())).abs() == 0.0);
    assert!((end.centroid.y - 0.5).abs() < 1e-12);
}

/// Phase velocity of the dominant mode in a uniform medium.
fn phase_velocity(n: f64, convention: Convention) -> f64 {
    let grid = Grid::line(128, 32.0).unwrap();
    let m = [16, 0, 0];
    let k0 = mode_wavevector(&grid, m);
    let omega = k0.x / convention.stationary_factor(Complex64::from(n)).re;
    let v = potential_energy(omega, Complex64::from(n), convention).unwrap();
    let f = wave_packet(grid, Vector3::new(16.0, 0.5, 0.5), Vector3::new(3.0, 1e6, 1e6), k0, Helicity::Plus).unwrap();
    let mut state = EvolutionState::new(f, 0.01, Some(PotentialField::uniform(grid, v))).unwrap();
    let mut unwrapped = 0.0;
    let mut last = observables(&state).unwrap().carrier_phase;
    for _ in 0..100 {
        state.advance(5).unwrap();
        let obs = observables(&state).unwrap();
        assert_eq!(obs.dominant_mode, m);
        let mut d = obs.carrier_phase - last;
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        unwrapped += d;
        last = obs.carrier_phase;
    }
    let measured_omega = -unwrapped / state.time();
    measured_omega / k0.x
}

#[test]
fn carrier_phase_velocity_follows_each_convention() {
    let n = 1.5;
    let kin = phase_velocity(n, Convention::Kinematic);
    assert!((kin - 1.0 / n).abs() <= 1e-3 / n, "kinematic {kin}");
    let lit = phase_velocity(n, Convention::PaperLiteral);
    let expected = 1.0 / (2.0 - 1.0 / n);
    assert!((lit - expected).abs() <= 1e-3 * expected, "paper-literal {lit}");
}

#[test]
fn reciprocal_round_trip_of_packet() {
    let grid = Grid::new([32, 16, 1], [8.0, 4.0, 1.0]).unwrap();
    let f = packet_2d(grid);
    let back = to_real(&to_reciprocal(&f).unwrap()).unwrap();
    assert!(back.rel_l2_diff(&f).unwrap() < 1e-12);
}
