use std::f64::consts::PI;

use nalgebra::Vector3;
use photon_core::bands::*;
use photon_core::evolve::Helicity;
use photon_core::media::{Convention, IndexLattice, IndexProfile, Layer};
use photon_core::{Complex64, Grid};
use proptest::prelude::*;

fn c(x: f64) -> Complex64 {
    Complex64::from(x)
}

fn cube(n: Complex64) -> IndexLattice {
    IndexLattice::new([Some(1.0); 3], IndexProfile::Uniform(n)).unwrap()
}

fn stack() -> IndexLattice {
    IndexLattice::stack_1d(vec![Layer { thickness: 0.5, index: c(1.0) }, Layer { thickness: 0.5, index: c(2.0) }])
        .unwrap()
}

/// Sorted `|q+G| / b` over the cubic reciprocal lattice, each listed twice.
fn free_lines(q: Vector3<f64>, b: Complex64, count: usize) -> Vec<Complex64> {
    let mut k: Vec<f64> = Vec::new();
    for i in -3i32..=3 {
        for j in -3i32..=3 {
            for l in -3i32..=3 {
                let g = Vector3::new(i as f64, j as f64, l as f64) * (2.0 * PI);
                k.push((q + g).norm());
            }
        }
    }
    k.sort_by(f64::total_cmp);
    k.iter().flat_map(|v| [c(*v) / b; 2]).take(count).collect()
}

#[test]
fn empty_lattice_reproduces_free_lines() {
    let q = Vector3::new(0.3 * PI, 0.1 * PI, 0.0);
    let p = BlochProblem::new(cube(c(1.0)), q, 2, Convention::Kinematic).unwrap();
    let sol = pwe_bands(&p, 8).unwrap();
    let expected = free_lines(q, c(1.0), 8);
    for (got, want) in sol.frequencies().iter().zip(&expected) {
        assert!((got - want).norm() < 1e-8, "{got} vs {want}");
    }
    for pair in sol.frequencies().chunks(2) {
        assert!((pair[0] - pair[1]).norm() < 1e-8);
    }
}

#[test]
fn uniform_medium_scales_by_the_stationary_factor() {
    let q = Vector3::new(0.5 * PI, 0.0, 0.25 * PI);
    for conv in [Convention::Kinematic, Convention::PaperLiteral] {
        let n = c(1.5);
        let p = BlochProblem::new(cube(n), q, 2, conv).unwrap();
        let sol = pwe_bands(&p, 6).unwrap();
        let expected = free_lines(q, conv.stationary_factor(n), 6);
        for (got, want) in sol.frequencies().iter().zip(&expected) {
            assert!((got - want).norm() < 1e-8, "{conv}: {got} vs {want}");
        }
    }
}

#[test]
fn convention_ratio_for_index_two() {
    let q = Vector3::new(0.4 * PI, 0.2 * PI, 0.0);
    let solve = |conv| pwe_bands(&BlochProblem::new(cube(c(2.0)), q, 1, conv).unwrap(), 4).unwrap().frequencies();
    let kin = solve(Convention::Kinematic);
    let lit = solve(Convention::PaperLiteral);
    for (k, l) in kin.iter().zip(&lit) {
        assert!((k.re / l.re - 0.75).abs() < 1e-10);
    }
}

#[test]
fn stack_bands_converge_with_cutoff() {
    let q = Vector3::new(0.3 * PI, 0.0, 0.0);
    let bands = |cut| {
        let p = BlochProblem::new(stack(), q, cut, Convention::Kinematic).unwrap();
        pwe_bands(&p, 4).unwrap().frequencies()
    };
    let (a, b, d) = (bands(16), bands(32), bands(64));
    let change = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    let first = change(&a, &b);
    let second = change(&b, &d);
    assert!(second < first, "{first:e} then {second:e}");
    assert!(second < 1e-5);
}

#[test]
fn stack_matches_helicity_transfer_matrix() {
    let template = BlochProblem::new(stack(), Vector3::zeros(), 32, Convention::Kinematic)
        .unwrap()
        .with_helicity(Some(Helicity::Plus));
    for i in 0..16 {
        let q = -PI + (i as f64 + 0.5) * 2.0 * PI / 16.0;
        let sol = pwe_bands(&template.at(Vector3::new(q, 0.0, 0.0)), 4).unwrap();
        let tmm =
            transfer_matrix_bands_1d_with(&stack(), q, [1e-3, 20.0], 800, Matching::Helicity, Convention::Kinematic)
                .unwrap();
        assert!(tmm.branches.len() >= 4);
        for (p, t) in sol.frequencies().iter().zip(&tmm.branches) {
            assert!((p.re - t).abs() < 1e-3, "q = {q}: {p} vs {t}");
        }
    }
}

#[test]
fn stack_modes_satisfy_the_stationary_equation() {
    let p = BlochProblem::new(stack(), Vector3::new(0.7 * PI, 0.0, 0.0), 16, Convention::PaperLiteral).unwrap();
    let sol = pwe_bands(&p, 6).unwrap();
    for i in 0..6 {
        assert!(mode_residual(&p, &sol, i).unwrap() <= 1e-8);
    }
}

#[test]
fn generalized_eigen_residuals_are_small() {
    for lattice in [stack(), cube(Complex64::new(1.5, 0.2))] {
        let p = BlochProblem::new(lattice, Vector3::new(0.2, 0.0, 0.0), 3, Convention::Kinematic).unwrap();
        let asm = assemble(&p).unwrap();
        let pairs = solve_generalized(&asm.a, &asm.b).unwrap();
        let scale = asm.a.norm() + asm.b.norm();
        for (j, w) in pairs.values.iter().enumerate() {
            let v = pairs.vectors.column(j);
            let r = &asm.a * v - (&asm.b * v) * *w;
            assert!(r.norm() <= 1e-10 * scale * (1.0 + w.norm()), "pair {j}");
        }
    }
}

#[test]
fn synthesized_uniform_mode_is_stationary() {
    let n = c(1.5);
    let conv = Convention::PaperLiteral;
    let q = Vector3::new(0.25 * 2.0 * PI / 4.0, 0.0, 0.0);
    let lattice = IndexLattice::new([Some(4.0), Some(4.0), Some(4.0)], IndexProfile::Uniform(n)).unwrap();
    let p = BlochProblem::new(lattice, q, 1, conv).unwrap();
    let sol = pwe_bands(&p, 4).unwrap();
    let grid = Grid::new([16, 16, 16], [16.0, 16.0, 16.0]).unwrap();
    for i in 0..4 {
        let f = synthesize_mode(&sol, i, &grid).unwrap();
        let kappa = sol.modes[i].raw_omega * conv.stationary_factor(n);
        assert!(stationary_residual(&f, kappa).unwrap() < 1e-10, "mode {i}");
    }
}

#[test]
fn absorbing_uniform_medium_gives_complex_frequencies() {
    let n = Complex64::new(1.5, 0.1);
    let q = Vector3::new(0.3 * PI, 0.0, 0.0);
    let p = BlochProblem::new(cube(n), q, 1, Convention::Kinematic).unwrap();
    let sol = pwe_bands(&p, 4).unwrap();
    let expected = free_lines(q, n, 4);
    for (got, want) in sol.frequencies().iter().zip(&expected) {
        assert!((got - want).norm() < 1e-8, "{got} vs {want}");
        assert!(got.im < 0.0);
    }
}

#[test]
fn band_path_bookkeeping() {
    let template = BlochProblem::new(stack(), Vector3::zeros(), 8, Convention::Kinematic).unwrap();
    let single = band_path(&template, &[Vector3::new(0.5, 0.0, 0.0)], 3).unwrap();
    assert_eq!(single.arclength, vec![0.0]);
    assert_eq!(single.n_bands(), 3);

    let path: Vec<Vector3<f64>> = (0..=10).map(|i| Vector3::new(PI * i as f64 / 10.0, 0.0, 0.0)).collect();
    let forward = band_path(&template, &path, 4).unwrap();
    assert!((forward.arclength[10] - PI).abs() < 1e-12);
    assert_eq!(forward.omega[0][0].norm(), forward.omega[0][0].norm());
    assert!(forward.omega[0][0].norm() < 1e-10);
    let reversed: Vec<_> = path.iter().rev().copied().collect();
    let backward = band_path(&template, &reversed, 4).unwrap();
    for i in 0..path.len() {
        assert_eq!(forward.omega[i], backward.omega[path.len() - 1 - i]);
    }
    assert!((forward.normalized(2.0 * PI) - 1.0).abs() < 1e-15);
    assert!(band_path(&template, &[], 2).is_err());
}

#[test]
fn folded_wavevector_is_flagged() {
    let template = BlochProblem::new(stack(), Vector3::zeros(), 8, Convention::Kinematic).unwrap();
    let inside = pwe_bands(&template.at(Vector3::new(0.5 * PI, 0.0, 0.0)), 4).unwrap();
    let outside = pwe_bands(&template.at(Vector3::new(2.5 * PI, 0.0, 0.0)), 4).unwrap();
    assert!(!inside.folded && outside.folded);
    for (a, b) in inside.frequencies().iter().zip(&outside.frequencies()) {
        assert!((a - b).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn time_reversal_symmetry(qx in -PI..PI, n2 in 1.1f64..3.0) {
        let lattice = IndexLattice::stack_1d(vec![
            Layer { thickness: 0.4, index: c(1.0) },
            Layer { thickness: 0.6, index: c(n2) },
        ]).unwrap();
        let p = BlochProblem::new(lattice, Vector3::new(qx, 0.0, 0.0), 8, Convention::Kinematic).unwrap();
        let plus = pwe_bands(&p, 6).unwrap().frequencies();
        let minus = pwe_bands(&p.at(Vector3::new(-qx, 0.0, 0.0)), 6).unwrap().frequencies();
        for (a, b) in plus.iter().zip(&minus) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn lossless_lattices_have_real_bands(qx in -PI..PI, qy in -PI..PI, n2 in 1.1f64..3.0) {
        let lattice = IndexLattice::new(
            [Some(1.0), Some(1.0), None],
            IndexProfile::Layered { axis: photon_core::media::Axis::Y, layers: vec![
                Layer { thickness: 0.3, index: c(n2) },
                Layer { thickness: 0.7, index: c(1.0) },
            ]},
        ).unwrap();
        let p = BlochProblem::new(lattice, Vector3::new(qx, qy, 0.0), 3, Convention::PaperLiteral).unwrap();
        let sol = pwe_bands(&p, 6).unwrap();
        let scale = sol.frequencies().iter().map(|w| w.norm()).fold(1.0, f64::max);
        for w in sol.frequencies() {
            prop_assert!(w.im.abs() <= 1e-10 * scale);
        }
        for pair in sol.frequencies().windows(2) {
            prop_assert!(pair[0].re <= pair[1].re + 1e-12 * scale);
        }
    }
}
