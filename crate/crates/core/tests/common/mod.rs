#![allow(dead_code)]

use nalgebra::Vector3;
use photon_core::{Complex64, ComplexVec3, Grid, Space, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vec3(rng: &mut ChaCha8Rng) -> ComplexVec3 {
    ComplexVec3::new(random_c(rng), random_c(rng), random_c(rng))
}

pub fn random_field(grid: Grid, space: Space, rng: &mut ChaCha8Rng) -> VectorField {
    VectorField::from_fn(grid, space, |_| random_vec3(rng))
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random field with only transverse nonzero modes, in real representation.
pub fn random_transverse(grid: Grid, rng: &mut ChaCha8Rng) -> VectorField {
    let mut f = random_field(grid, Space::Reciprocal, rng);
    f = photon_core::spectral::transverse_project(&f).unwrap();
    photon_core::spectral::to_real(&f).unwrap()
}
