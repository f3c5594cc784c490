mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use approx::assert_abs_diff_eq;
use nalgebra::Vector3;
use photon_core::field::{from_eh, norm_energy, plane_wave};
use photon_core::spectral::*;
use photon_core::spin::{helicity_basis, k_dot_s, spin_matrices};
use photon_core::{Complex64, ComplexVec3, Grid, Space, VectorField};
use proptest::prelude::*;

use common::*;

fn cube(n: usize) -> Grid {
    Grid::new([n, n, n], [2.0, 3.0, 5.0]).unwrap()
}

/// Unitary DFT written out as a double loop.
fn brute_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|m| {
            x.iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (m * j) as f64 / n as f64))
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

#[test]
fn fast_transform_matches_brute_force_dft() {
    let mut r = rng(1);
    let grid = Grid::line(8, 3.0).unwrap();
    let f = random_field(grid, Space::Real, &mut r);
    let rec = to_reciprocal(&f).unwrap();
    for c in 0..3 {
        let oracle = brute_dft(f.component(c));
        for (a, b) in rec.component(c).iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn round_trip_and_parseval() {
    let mut r = rng(2);
    let f = random_field(cube(12), Space::Real, &mut r);
    let rec = to_reciprocal(&f).unwrap();
    let back = to_real(&rec).unwrap();
    assert!(back.rel_l2_diff(&f).unwrap() < 1e-12);
    let (a, b) = (norm_energy(&f), norm_energy(&rec));
    assert!((a - b).abs() < 1e-12 * a);
}

#[test]
fn spin_curl_equals_cross_curl() {
    let mut r = rng(3);
    for _ in 0..10 {
        let f = random_field(Grid::new([16, 16, 16], [1.0, 2.0, 3.0]).unwrap(), Space::Reciprocal, &mut r);
        let a = curl_k(&f).unwrap();
        let b = curl_via_spin(&f).unwrap();
        assert!(a.max_diff(&b).unwrap() <= 1e-12 * a.max_norm());
    }
    let zero = VectorField::zeros(cube(4), Space::Reciprocal);
    assert_eq!(curl_via_spin(&zero).unwrap().max_norm(), 0.0);
}

#[test]
fn double_curl_identity() {
    let mut r = rng(4);
    let f = random_field(cube(10), Space::Reciprocal, &mut r);
    let twice = curl_k(&curl_k(&f).unwrap()).unwrap();
    let modes = ModeTable::new(f.grid());
    for idx in 0..f.len() {
        let k = modes.k(idx).map(Complex64::from);
        let v = f.get(idx);
        let expected = v * Complex64::from(modes.norm(idx).powi(2)) - k * k.dot(&v);
        let got = twice.get(idx);
        assert!((got - expected).norm() <= 1e-12 * expected.norm().max(modes.norm(idx).powi(2)));
    }
}

#[test]
fn projection_properties() {
    let mut r = rng(5);
    let f = random_field(cube(8), Space::Reciprocal, &mut r);
    let once = transverse_project(&f).unwrap();
    let twice = transverse_project(&once).unwrap();
    assert!(once.max_diff(&twice).unwrap() < 1e-14);
    let split = split_transverse(&f).unwrap();
    let sum = split.transverse.combine(Complex64::ONE, &split.longitudinal, Complex64::ONE).unwrap();
    assert!(sum.max_diff(&f).unwrap() < 1e-14);
    assert!(transversality_residual(&once).unwrap() < 1e-14);
    // The curl of a transverse field is transverse.
    assert!(transversality_residual(&curl_k(&once).unwrap()).unwrap() < 1e-14);
    assert!(split.dc_magnitude > 0.0);
}

#[test]
fn curl_is_hermitian() {
    let mut r = rng(6);
    let u = random_field(cube(8), Space::Reciprocal, &mut r);
    let v = random_field(cube(8), Space::Reciprocal, &mut r);
    let a = u.inner(&curl_k(&v).unwrap()).unwrap();
    let b = curl_k(&u).unwrap().inner(&v).unwrap();
    assert!((a - b).norm() < 1e-12 * a.norm());
}

#[test]
fn transverse_projection_example() {
    let grid = Grid::line(8, 1.0).unwrap();
    let mut f = VectorField::zeros(grid, Space::Reciprocal);
    let idx = grid.mode_index([1, 0, 0]).unwrap();
    f.set(idx, ComplexVec3::new(Complex64::ONE, Complex64::ONE, Complex64::ZERO));
    let p = transverse_project(&f).unwrap();
    assert_eq!(p.get(idx), ComplexVec3::new(Complex64::ZERO, Complex64::ONE, Complex64::ZERO));
}

#[test]
fn circular_plane_wave_is_helicity_eigenstate() {
    let grid = Grid::new([4, 4, 8], [1.0, 1.0, 2.0]).unwrap();
    let k = Vector3::new(0.0, 0.0, PI);
    let pol = ComplexVec3::new(Complex64::ONE, Complex64::I, Complex64::ZERO);
    let f = plane_wave(grid, k, pol, Complex64::ONE).unwrap();
    let rec = to_reciprocal(&f).unwrap();
    let nonzero: Vec<usize> = (0..rec.len()).filter(|&i| rec.get(i).norm() > 1e-10).collect();
    assert_eq!(nonzero, vec![grid.mode_index([0, 0, 1]).unwrap()]);
    let v = rec.get(nonzero[0]);
    let u = k_dot_s(&(k / k.norm())) * v;
    assert!((u - v).norm() < 1e-12);
}

#[test]
fn helicity_gram_matrix_over_random_directions() {
    let mut r = rng(7);
    for _ in 0..100 {
        let k = random_unit(&mut r);
        let b = helicity_basis(&k).unwrap();
        let basis = [b.plus, b.minus, b.zero];
        for i in 0..3 {
            for j in 0..3 {
                let g = basis[i].dotc(&basis[j]);
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g - expected).norm() < 1e-12);
            }
        }
        let kc = k.map(Complex64::from);
        assert!(kc.dot(&b.plus).norm() < 1e-12);
        assert!(kc.dot(&b.minus).norm() < 1e-12);
    }
}

#[test]
fn spin_algebra_to_rounding() {
    let s = spin_matrices();
    let cas = s.casimir();
    for i in 0..3 {
        for j in 0..3 {
            let expected = if i == j { 2.0 } else { 0.0 };
            assert_abs_diff_eq!(cas[(i, j)].re, expected, epsilon = 1e-15);
            assert_abs_diff_eq!(cas[(i, j)].im, 0.0, epsilon = 1e-15);
        }
    }
    let v = ComplexVec3::new(Complex64::ONE, Complex64::I, Complex64::ZERO) * Complex64::from(FRAC_1_SQRT_2);
    assert!((s.z * v - v).norm() < 1e-15);
}

#[test]
fn from_eh_is_linear() {
    let mut r = rng(8);
    let grid = cube(4);
    let real = |r: &mut _| {
        let f = random_field(grid, Space::Real, r);
        VectorField::from_fn(grid, Space::Real, |i| f.get(i).map(|v| Complex64::from(v.re)))
    };
    let (e1, h1, e2, h2) = (real(&mut r), real(&mut r), real(&mut r), real(&mut r));
    let (a, b) = (Complex64::from(0.7), Complex64::from(-1.3));
    let lhs = from_eh(&e1.combine(a, &e2, b).unwrap(), &h1.combine(a, &h2, b).unwrap()).unwrap();
    let rhs = from_eh(&e1, &h1).unwrap().combine(a, &from_eh(&e2, &h2).unwrap(), b).unwrap();
    assert!(lhs.max_diff(&rhs).unwrap() < 1e-14);
}

fn unit_vector() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-4)
        .prop_map(|(x, y, z)| Vector3::new(x, y, z).normalize())
}

fn cvec() -> impl Strategy<Value = ComplexVec3> {
    proptest::array::uniform6(-1.0..1.0f64).prop_map(|a| {
        ComplexVec3::new(Complex64::new(a[0], a[1]), Complex64::new(a[2], a[3]), Complex64::new(a[4], a[5]))
    })
}

proptest! {
    #[test]
    fn k_dot_s_is_i_cross(k in proptest::array::uniform3(-10.0..10.0f64), v in cvec()) {
        let k = Vector3::from(k);
        let lhs = k_dot_s(&k) * v;
        let rhs = curl_mode(&k, &v);
        prop_assert!((lhs - rhs).norm() <= 1e-14 * (1.0 + k.norm() * v.norm()));
    }

    #[test]
    fn k_dot_s_spectrum(u in unit_vector(), scale in 0.01..50.0f64) {
        let k = u * scale;
        let m = k_dot_s(&k);
        let b = helicity_basis(&u).unwrap();
        let cs = Complex64::from(scale);
        prop_assert!((m * b.plus - b.plus * cs).norm() < 1e-12 * scale);
        prop_assert!((m * b.minus + b.minus * cs).norm() < 1e-12 * scale);
        prop_assert!((m * b.zero).norm() < 1e-12 * scale);
    }

    #[test]
    fn helicity_basis_is_orthonormal(u in unit_vector()) {
        let b = helicity_basis(&u).unwrap();
        let basis = [b.plus, b.minus, b.zero];
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((basis[i].dotc(&basis[j]) - expected).norm() < 1e-12);
            }
        }
    }
}
