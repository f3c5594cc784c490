//! Simulator for the three-component photon wave function.
//!
//! The field `ψ = (E + iH)/√2` evolves under `i ∂ψ/∂t = c ∇×ψ + V ψ`, where the
//! photon potential `V` encodes the refractive index of the medium. The crate
//! covers grids and fields, reciprocal-space operators, Lorentz-oscillator
//! media, split-step time evolution and plane-wave band structures of
//! photonic crystals.
//!
//! Units are natural (`ħ = c = 1`); lengths are in box units and frequencies in
//! radians per unit time.

pub mod bands;
pub mod error;
pub mod evolve;
pub mod field;
pub mod grid;
pub mod media;
pub mod spectral;
pub mod spin;

pub use error::{Error, Result};
pub use field::{ComplexVec3, Space, VectorField};
pub use grid::Grid;
pub use num_complex::Complex64;

/// Speed of light in natural units.
pub const C: f64 = 1.0;
