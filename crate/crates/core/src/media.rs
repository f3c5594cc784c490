//! Photon kinematics in media, the Lorentz-oscillator index and the photon
//! potential energy.
//!
//! The potential comes in two conventions. `PaperLiteral` reads the wavelength
//! in `V = (hc/λ)(1/n − 1)` as the vacuum wavelength, giving `V = ω(1/n − 1)`.
//! `Kinematic` reads it as the in-medium wavelength so that `E = cp + V = pv`,
//! giving `V = ω(1 − n)` and the ordinary dispersion `c|k| = nω`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// One resonance of a Lorentz medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    /// Dimensionless strength `f_s` (electrons per molecule at this resonance).
    pub strength: f64,
    /// Binding frequency `ω_s`.
    pub resonance: f64,
    /// Damping `γ_s`.
    pub damping: f64,
}

/// `n² = 1 + ω_p² Σ_s f_s / (ω_s² − ω² − iωγ_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzMedium {
    coupling: f64,
    oscillators: Vec<Oscillator>,
}

impl LorentzMedium {
    /// `coupling` is the plasma coupling `ω_p² = Ne²/ε₀m`.
    pub fn new(coupling: f64, oscillators: Vec<Oscillator>) -> Result<Self> {
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(Error::Domain(format!("coupling must be >= 0, got {coupling}")));
        }
        for (i, o) in oscillators.iter().enumerate() {
            if !(o.strength.is_finite() && o.strength >= 0.0) {
                return Err(Error::Domain(format!("oscillator {i}: strength must be >= 0")));
            }
            if !(o.resonance.is_finite() && o.resonance > 0.0) {
                return Err(Error::Domain(format!("oscillator {i}: resonance must be > 0")));
            }
            if !(o.damping.is_finite() && o.damping >= 0.0) {
                return Err(Error::Domain(format!("oscillator {i}: damping must be >= 0")));
            }
        }
        if coupling > 0.0 && oscillators.is_empty() {
            return Err(Error::Domain("a medium with nonzero coupling needs an oscillator".into()));
        }
        Ok(Self { coupling, oscillators })
    }

    pub fn vacuum() -> Self {
        Self { coupling: 0.0, oscillators: Vec::new() }
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn oscillators(&self) -> &[Oscillator] {
        &self.oscillators
    }

    pub fn is_lossless(&self) -> bool {
        self.oscillators.iter().all(|o| o.damping == 0.0)
    }

    /// `n²(ω)`.
    pub fn permittivity(&self, omega: f64) -> Complex64 {
        let sum: Complex64 = self
            .oscillators
            .iter()
            .map(|o| {
                let den = Complex64::new(o.resonance * o.resonance - omega * omega, -omega * o.damping);
                o.strength / den
            })
            .sum();
        Complex64::ONE + sum * self.coupling
    }
}

/// Refractive index with a flag for the evanescent (purely imaginary) regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexValue {
    pub n: Complex64,
    pub evanescent: bool,
}

/// Square root on the absorbing branch `Im n ≥ 0`; real positive for `n² > 0`.
pub fn absorbing_sqrt(n2: Complex64) -> Complex64 {
    let n = n2.sqrt();
    if n.im < 0.0 {
        -n
    } else {
        n
    }
}

pub fn refractive_index(medium: &LorentzMedium, omega: f64) -> Result<IndexValue> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::Domain(format!("frequency must be >= 0, got {omega}")));
    }
    let n2 = medium.permittivity(omega);
    if !(n2.re.is_finite() && n2.im.is_finite()) {
        return Err(Error::Domain(format!("undamped resonance at ω = {omega}: index is unbounded")));
    }
    let n = absorbing_sqrt(n2);
    Ok(IndexValue { n, evanescent: n2.im == 0.0 && n2.re < 0.0 })
}

/// Which wavelength the photon potential is written in terms of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    /// Vacuum wavelength: `V = ω(1/n − 1)`.
    PaperLiteral,
    /// In-medium wavelength: `V = ω(1 − n)`.
    Kinematic,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::PaperLiteral => "paper-literal",
            Convention::Kinematic => "kinematic",
        }
    }

    /// Scalar `b(n)` in the stationary equation `c ∇×ψ = ω b(n) ψ`.
    pub fn stationary_factor(self, n: Complex64) -> Complex64 {
        match self {
            Convention::PaperLiteral => 2.0 - n.inv(),
            Convention::Kinematic => n,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" => Ok(Convention::PaperLiteral),
            "kinematic" => Ok(Convention::Kinematic),
            other => Err(Error::Domain(format!("unknown convention '{other}' (expected paper-literal or kinematic)"))),
        }
    }
}

/// Energy, momentum and velocity of a photon in a medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub energy: f64,
    pub momentum: f64,
    pub velocity: f64,
}

/// `E = hν`, `p = h/λ`, `v = νλ` with `h = 2π` (`ħ = 1`); `λ` is the in-medium
/// wavelength, so `E = p v` holds identically.
pub fn photon_kinematics(nu: f64, lambda_med: f64) -> Result<Kinematics> {
    if !(nu.is_finite() && nu > 0.0 && lambda_med.is_finite() && lambda_med > 0.0) {
        return Err(Error::Domain(format!("frequency and wavelength must be > 0, got ν = {nu}, λ = {lambda_med}")));
    }
    let h = 2.0 * PI;
    Ok(Kinematics { energy: h * nu, momentum: h / lambda_med, velocity: nu * lambda_med })
}

/// Photon potential energy at frequency `omega` in a medium of index `n`.
pub fn potential_energy(omega: f64, n: Complex64, convention: Convention) -> Result<Complex64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {omega}")));
    }
    if !(n.re > 0.0 && n.im.is_finite()) {
        return Err(Error::Domain(format!("index must have Re n > 0, got {n}")));
    }
    Ok(match convention {
        Convention::PaperLiteral => (n.inv() - 1.0) * omega,
        Convention::Kinematic => (1.0 - n) * omega,
    })
}

/// Lattice axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        [Axis::X, Axis::Y, Axis::Z].get(i).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub thickness: f64,
    pub index: Complex64,
}

/// Axis-aligned box `[lo, hi)` in unit-cell coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexBlock {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub index: Complex64,
}

impl IndexBlock {
    fn contains(&self, r: [f64; 3]) -> bool {
        (0..3).all(|a| r[a] >= self.lo[a] && r[a] < self.hi[a])
    }
}

/// Refractive index over one unit cell.
#[derive(Debug, Clone, PartialEq)]
pub enum IndexProfile {
    Uniform(Complex64),
    /// Layers stacked from the cell origin along one axis.
    Layered {
        axis: Axis,
        layers: Vec<Layer>,
    },
    /// Background with boxes painted on top; later blocks win.
    Blocks {
        background: Complex64,
        blocks: Vec<IndexBlock>,
    },
    /// Tabulated values on a `dims` grid spanning the cell, x fastest,
    /// piecewise constant per table cell.
    Sampled {
        dims: [usize; 3],
        values: Vec<Complex64>,
    },
}

/// Periodic refractive index `n(r) = n(r + mτ)`.
///
/// An axis with no period is one along which the profile is not repeated;
/// positions along it are used unreduced.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexLattice {
    period: [Option<f64>; 3],
    profile: IndexProfile,
}

impl IndexLattice {
    pub fn new(period: [Option<f64>; 3], profile: IndexProfile) -> Result<Self> {
        for (a, p) in period.iter().enumerate() {
            if let Some(p) = p {
                if !(p.is_finite() && *p > 0.0) {
                    return Err(Error::Domain(format!("period along axis {a} must be > 0")));
                }
            }
        }
        let check_n = |n: &Complex64| -> Result<()> {
            if !(n.re > 0.0 && n.im.is_finite()) {
                return Err(Error::Domain(format!("index {n} must have Re n > 0")));
            }
            if n.im < 0.0 {
                return Err(Error::Domain(format!("index {n} describes a gain medium")));
            }
            Ok(())
        };
        match &profile {
            IndexProfile::Uniform(n) => check_n(n)?,
            IndexProfile::Layered { axis, layers } => {
                let Some(tau) = period[axis.index()] else {
                    return Err(Error::Domain("layered profile needs a period along its axis".into()));
                };
                if layers.is_empty() {
                    return Err(Error::Domain("layered profile has no layers".into()));
                }
                for l in layers {
                    check_n(&l.index)?;
                    if !(l.thickness.is_finite() && l.thickness > 0.0) {
                        return Err(Error::Domain("layer thickness must be > 0".into()));
                    }
                }
                let total: f64 = layers.iter().map(|l| l.thickness).sum();
                if (total - tau).abs() > 1e-12 * tau {
                    return Err(Error::Domain(format!("layer thicknesses sum to {total}, period is {tau}")));
                }
            }
            IndexProfile::Blocks { background, blocks } => {
                check_n(background)?;
                for b in blocks {
                    check_n(&b.index)?;
                }
            }
            IndexProfile::Sampled { dims, values } => {
                if dims.contains(&0) || values.len() != dims.iter().product::<usize>() {
                    return Err(Error::Shape(format!("sampled profile has {} values for dims {dims:?}", values.len())));
                }
                for (a, &d) in dims.iter().enumerate() {
                    if d > 1 && period[a].is_none() {
                        return Err(Error::Domain(format!(
                            "sampled profile varies along axis {a} but has no period there"
                        )));
                    }
                }
                values.iter().try_for_each(check_n)?;
            }
        }
        Ok(Self { period, profile })
    }

    pub fn uniform(n: Complex64) -> Result<Self> {
        Self::new([None; 3], IndexProfile::Uniform(n))
    }

    /// Two-or-more layer stack along x with period equal to the total thickness.
    pub fn stack_1d(layers: Vec<Layer>) -> Result<Self> {
        let tau = layers.iter().map(|l| l.thickness).sum();
        Self::new([Some(tau), None, None], IndexProfile::Layered { axis: Axis::X, layers })
    }

    pub fn period(&self) -> [Option<f64>; 3] {
        self.period
    }

    pub fn profile(&self) -> &IndexProfile {
        &self.profile
    }

    pub fn is_lossless(&self) -> bool {
        self.indices().all(|n| n.im == 0.0)
    }

    /// Every distinct index value that appears in the profile.
    pub fn indices(&self) -> Box<dyn Iterator<Item = Complex64> + '_> {
        match &self.profile {
            IndexProfile::Uniform(n) => Box::new(std::iter::once(*n)),
            IndexProfile::Layered { layers, .. } => Box::new(layers.iter().map(|l| l.index)),
            IndexProfile::Blocks { background, blocks } => {
                Box::new(std::iter::once(*background).chain(blocks.iter().map(|b| b.index)))
            }
            IndexProfile::Sampled { values, .. } => Box::new(values.iter().copied()),
        }
    }

    /// Index at a position already reduced into the unit cell.
    pub fn index_in_cell(&self, r: [f64; 3]) -> Complex64 {
        match &self.profile {
            IndexProfile::Uniform(n) => *n,
            IndexProfile::Layered { axis, layers } => {
                let x = r[axis.index()];
                let mut edge = 0.0;
                for l in layers {
                    edge += l.thickness;
                    if x < edge {
                        return l.index;
                    }
                }
                layers[layers.len() - 1].index
            }
            IndexProfile::Blocks { background, blocks } => {
                blocks.iter().rev().find(|b| b.contains(r)).map_or(*background, |b| b.index)
            }
            IndexProfile::Sampled { dims, values } => {
                let mut cell = [0usize; 3];
                for a in 0..3 {
                    let frac = match self.period[a] {
                        Some(p) => r[a] / p,
                        None => 0.0,
                    };
                    cell[a] = ((frac * dims[a] as f64).floor() as usize).min(dims[a] - 1);
                }
                values[cell[0] + dims[0] * (cell[1] + dims[1] * cell[2])]
            }
        }
    }

    /// Index at an arbitrary position.
    pub fn index_at(&self, r: [f64; 3]) -> Complex64 {
        let mut red = r;
        for a in 0..3 {
            if let Some(p) = self.period[a] {
                red[a] = r[a].rem_euclid(p);
            }
        }
        self.index_in_cell(red)
    }

    /// Grid cells per period along each axis; errors when the box is not an
    /// integer number of periods or a period is not an integer number of cells.
    pub fn cells_per_period(&self, grid: &Grid) -> Result<[Option<usize>; 3]> {
        let mut out = [None; 3];
        for a in 0..3 {
            let Some(tau) = self.period[a] else { continue };
            let len = grid.lengths()[a];
            let reps = len / tau;
            let m = reps.round();
            if m < 1.0 || (reps - m).abs() > 1e-9 * reps {
                return Err(Error::Domain(format!(
                    "incommensurate lattice: box length {len} along axis {a} is not a multiple of period {tau}"
                )));
            }
            let n = grid.dims()[a];
            let m = m as usize;
            if !n.is_multiple_of(m) {
                return Err(Error::Domain(format!(
                    "incommensurate lattice: {n} cells along axis {a} do not split into {m} periods"
                )));
            }
            out[a] = Some(n / m);
        }
        Ok(out)
    }
}

/// Index sampled at grid cell centres, exactly periodic in cells.
pub fn sample_index_field(lattice: &IndexLattice, grid: &Grid) -> Result<Vec<Complex64>> {
    let cells = lattice.cells_per_period(grid)?;
    let h = grid.spacing();
    Ok((0..grid.len())
        .map(|idx| {
            let c = grid.coords(idx);
            let r = [0, 1, 2].map(|a| {
                let j = match cells[a] {
                    Some(p) => c[a] % p,
                    None => c[a],
                };
                (j as f64 + 0.5) * h[a]
            });
            lattice.index_in_cell(r)
        })
        .collect())
}

/// Photon potential `V(r)` per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl PotentialField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!("{} potential values for a grid of {} points", values.len(), grid.len())));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain("potential must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn uniform(grid: Grid, value: Complex64) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn is_uniform(&self) -> bool {
        self.values.iter().all(|v| *v == self.values[0])
    }
}

pub fn potential_field(
    lattice: &IndexLattice,
    grid: &Grid,
    omega: f64,
    convention: Convention,
) -> Result<PotentialField> {
    let n = sample_index_field(lattice, grid)?;
    let values = n.iter().map(|&n| potential_energy(omega, n, convention)).collect::<Result<Vec<_>>>()?;
    PotentialField::new(*grid, values)
}
