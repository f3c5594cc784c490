//! Stationary modes and photonic band structures.
//!
//! A stationary state `ψ(r) e^{-iωt}` of the wave equation with potential
//! `V(r)` satisfies `c ∇×ψ = ω b(r) ψ`, where `b = 2 − 1/n` (paper-literal)
//! or `b = n` (kinematic). For a periodic `n(r)` the Bloch ansatz
//! `ψ = Σ_G ψ_G e^{i(q+G)·r}` turns this into the dense generalized
//! eigenproblem
//!
//! ```text
//! c [i(q+G)×] ψ_G = ω Σ_G' b̂(G − G') ψ_G'
//! ```
//!
//! over a truncated set of reciprocal lattice vectors. The curl annihilates
//! longitudinal components, so every `G` contributes one spurious `ω = 0`
//! solution; those are removed by their transversality score.
//!
//! The curl problem is first order, so each transverse mode comes with a sign
//! of `ω` tied to its helicity. Reported frequencies are folded onto
//! `Re ω ≥ 0` by `ω ↦ −ω` (the mirror image of the mode), which pairs the
//! two helicities into the usual doubly degenerate photon bands.

mod eigen;
pub mod tmm;

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::Helicity;
use crate::field::{ComplexVec3, Space, VectorField};
use crate::grid::Grid;
use crate::media::{refractive_index, Convention, IndexLattice, IndexProfile, LorentzMedium};
use crate::spectral::{curl_mode, curl_real, Transform};
use crate::spin::k_dot_s;
use crate::C;

pub use eigen::{complex_schur, solve_generalized, triangular_eigenvectors, CMatrix, Eigenpairs};
pub use tmm::{transfer_matrix_bands_1d, transfer_matrix_bands_1d_with, Matching, TmmBands};

/// Modes whose transverse fraction is below this are discarded as longitudinal.
pub const TRANSVERSALITY_THRESHOLD: f64 = 0.99;

/// A periodic medium, a Bloch wavevector and a plane-wave truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochProblem {
    lattice: IndexLattice,
    q: Vector3<f64>,
    cutoff: [usize; 3],
    convention: Convention,
    helicity: Option<Helicity>,
}

impl BlochProblem {
    /// Uses `cutoff` along every periodic axis (`2·cutoff + 1` plane waves
    /// per axis).
    pub fn new(lattice: IndexLattice, q: Vector3<f64>, cutoff: usize, convention: Convention) -> Result<Self> {
        let cut = lattice.period().map(|p| if p.is_some() { cutoff } else { 0 });
        Self::with_cutoffs(lattice, q, cut, convention)
    }

    /// Per-axis cutoffs; aperiodic axes must have cutoff 0 and periodic
    /// axes at least 1.
    pub fn with_cutoffs(
        lattice: IndexLattice,
        q: Vector3<f64>,
        cutoff: [usize; 3],
        convention: Convention,
    ) -> Result<Self> {
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("Bloch wavevector must be finite".into()));
        }
        for (a, p) in lattice.period().iter().enumerate() {
            match (p, cutoff[a]) {
                (Some(_), 0) => return Err(Error::Domain(format!("cutoff along periodic axis {a} must be >= 1"))),
                (None, c) if c > 0 => {
                    return Err(Error::Domain(format!("axis {a} is not periodic; its cutoff must be 0")))
                }
                _ => {}
            }
        }
        if let IndexProfile::Blocks { blocks, .. } = lattice.profile() {
            for (a, p) in lattice.period().iter().enumerate() {
                if p.is_none() && blocks.iter().any(|b| b.lo[a] > f64::MIN || b.hi[a] < f64::MAX) {
                    return Err(Error::Domain(format!("blocks have finite extent along aperiodic axis {a}")));
                }
            }
        }
        Ok(Self { lattice, q, cutoff, convention, helicity: None })
    }

    /// Keeps only modes whose unfolded frequency has the sign of `helicity`.
    pub fn with_helicity(mut self, helicity: Option<Helicity>) -> Self {
        self.helicity = helicity;
        self
    }

    /// The same problem at another Bloch wavevector.
    pub fn at(&self, q: Vector3<f64>) -> Self {
        Self { q, ..self.clone() }
    }

    pub fn lattice(&self) -> &IndexLattice {
        &self.lattice
    }

    pub fn q(&self) -> Vector3<f64> {
        self.q
    }

    pub fn cutoff(&self) -> [usize; 3] {
        self.cutoff
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn helicity(&self) -> Option<Helicity> {
        self.helicity
    }

    /// Reciprocal lattice spacing `2π/τ` per axis (0 where aperiodic).
    pub fn reciprocal(&self) -> [f64; 3] {
        self.lattice.period().map(|p| p.map_or(0.0, |t| 2.0 * PI / t))
    }

    /// Number of plane waves `Π (2 c_a + 1)`.
    pub fn basis_len(&self) -> usize {
        self.cutoff.iter().map(|c| 2 * c + 1).product()
    }

    /// Reciprocal lattice indices, x fastest.
    pub fn basis(&self) -> Vec<[i64; 3]> {
        let c = self.cutoff.map(|c| c as i64);
        let mut out = Vec::with_capacity(self.basis_len());
        for mz in -c[2]..=c[2] {
            for my in -c[1]..=c[1] {
                for mx in -c[0]..=c[0] {
                    out.push([mx, my, mz]);
                }
            }
        }
        out
    }
}

/// `q` reduced into the first Brillouin zone `(−π/τ, π/τ]` along periodic
/// axes, and whether it moved.
pub fn fold_to_zone(q: Vector3<f64>, period: [Option<f64>; 3]) -> (Vector3<f64>, bool) {
    let mut out = q;
    for a in 0..3 {
        let Some(tau) = period[a] else { continue };
        let g = 2.0 * PI / tau;
        let half = 0.5 * g;
        let tol = 1e-12 * g;
        if q[a] > half + tol || q[a] <= -half + tol {
            let mut r = q[a] - g * (q[a] / g).round();
            if r <= -half + tol {
                r += g;
            }
            out[a] = r;
        }
    }
    let moved = out != q;
    (out, moved)
}

/// Fourier coefficients `b̂(m) = ⟨b(r) e^{-iG·r}⟩_cell` for `|m_a| ≤ span_a`.
#[derive(Debug, Clone)]
struct FourierTable {
    span: [usize; 3],
    data: Vec<Complex64>,
}

impl FourierTable {
    fn zeros(span: [usize; 3]) -> Self {
        let len = span.iter().map(|s| 2 * s + 1).product();
        Self { span, data: vec![Complex64::ZERO; len] }
    }

    fn offset(&self, m: [i64; 3]) -> Option<usize> {
        let mut idx = 0;
        let mut stride = 1;
        for a in 0..3 {
            let s = self.span[a] as i64;
            if m[a].abs() > s {
                return None;
            }
            idx += (m[a] + s) as usize * stride;
            stride *= 2 * self.span[a] + 1;
        }
        Some(idx)
    }

    fn get(&self, m: [i64; 3]) -> Complex64 {
        self.offset(m).map_or(Complex64::ZERO, |i| self.data[i])
    }

    fn set(&mut self, m: [i64; 3], v: Complex64) {
        let i = self.offset(m).expect("index within span");
        self.data[i] = v;
    }

    fn indices(&self) -> Vec<[i64; 3]> {
        let s = self.span.map(|s| s as i64);
        let mut out = Vec::with_capacity(self.data.len());
        for mz in -s[2]..=s[2] {
            for my in -s[1]..=s[1] {
                for mx in -s[0]..=s[0] {
                    out.push([mx, my, mz]);
                }
            }
        }
        out
    }
}

/// `(1/τ)∫ over table cell 0 of e^{-iGx}` for a table of `d` cells.
fn cell_factor(m: i64, d: usize) -> Complex64 {
    if m == 0 {
        return Complex64::from(1.0 / d as f64);
    }
    let theta = 2.0 * PI * m as f64 / d as f64;
    (Complex64::ONE - Complex64::from_polar(1.0, -theta)) / Complex64::new(0.0, 2.0 * PI * m as f64)
}

/// Exact coefficients of a piecewise-constant table spanning one cell.
fn table_coefficients(dims: [usize; 3], values: &[Complex64], span: [usize; 3]) -> Result<FourierTable> {
    let grid = Grid::new(dims, [1.0; 3])?;
    let transform = Transform::new(grid);
    let mut spectrum = values.to_vec();
    transform.forward_plane(&mut spectrum);
    let root = (grid.len() as f64).sqrt();
    let mut table = FourierTable::zeros(span);
    for m in table.indices() {
        let j = [0, 1, 2].map(|a| m[a].rem_euclid(dims[a] as i64) as usize);
        let factor: Complex64 = (0..3).map(|a| cell_factor(m[a], dims[a])).product();
        table.set(m, spectrum[grid.index(j)] * root * factor);
    }
    Ok(table)
}

fn fourier_coefficients(problem: &BlochProblem, span: [usize; 3]) -> Result<FourierTable> {
    let lattice = &problem.lattice;
    let b = |n: Complex64| problem.convention.stationary_factor(n);
    match lattice.profile() {
        IndexProfile::Uniform(n) => {
            let mut t = FourierTable::zeros(span);
            t.set([0; 3], b(*n));
            Ok(t)
        }
        IndexProfile::Layered { axis, layers } => {
            let a = axis.index();
            let tau = lattice.period()[a].expect("layered axis is periodic");
            let mut t = FourierTable::zeros(span);
            for m in -(span[a] as i64)..=span[a] as i64 {
                let mut idx = [0i64; 3];
                idx[a] = m;
                let g = 2.0 * PI * m as f64 / tau;
                let mut acc = Complex64::ZERO;
                let mut x0 = 0.0;
                for l in layers {
                    let x1 = x0 + l.thickness;
                    acc += b(l.index)
                        * if m == 0 {
                            Complex64::from(l.thickness / tau)
                        } else {
                            (Complex64::from_polar(1.0, -g * x0) - Complex64::from_polar(1.0, -g * x1))
                                / Complex64::new(0.0, g * tau)
                        };
                    x0 = x1;
                }
                t.set(idx, acc);
            }
            Ok(t)
        }
        IndexProfile::Sampled { dims, values } => {
            let bv: Vec<_> = values.iter().map(|&n| b(n)).collect();
            table_coefficients(*dims, &bv, span)
        }
        IndexProfile::Blocks { .. } => {
            let period = lattice.period();
            let dims = [0, 1, 2].map(|a| match period[a] {
                Some(_) => {
                    let r = (8 * (2 * span[a] + 1)).max(64);
                    r + r % 2
                }
                None => 1,
            });
            let grid = Grid::new(dims, period.map(|p| p.unwrap_or(1.0)))?;
            let values: Vec<_> = (0..grid.len())
                .map(|idx| {
                    let r = grid.position(idx);
                    let r = [0, 1, 2].map(|a| if period[a].is_some() { r[a] } else { 0.0 });
                    b(lattice.index_in_cell(r))
                })
                .collect();
            table_coefficients(dims, &values, span)
        }
    }
}

/// The assembled eigenproblem `A x = ω B x`; entry `3i + c` is component
/// `c` of the amplitude at `basis[i]`.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub a: CMatrix,
    pub b: CMatrix,
    pub basis: Vec<[i64; 3]>,
    /// Wavevectors `q + G` per basis element.
    pub k: Vec<Vector3<f64>>,
}

fn wavevectors(q: &Vector3<f64>, basis: &[[i64; 3]], recip: [f64; 3]) -> Vec<Vector3<f64>> {
    basis
        .iter()
        .map(|m| q + Vector3::new(m[0] as f64 * recip[0], m[1] as f64 * recip[1], m[2] as f64 * recip[2]))
        .collect()
}

/// Builds the matrices for `problem` at its wavevector as given (no folding).
pub fn assemble(problem: &BlochProblem) -> Result<Assembly> {
    let basis = problem.basis();
    let span = problem.cutoff.map(|c| 2 * c);
    let table = fourier_coefficients(problem, span)?;
    let k = wavevectors(&problem.q, &basis, problem.reciprocal());
    let dim = 3 * basis.len();
    let mut a = DMatrix::zeros(dim, dim);
    let mut b = DMatrix::zeros(dim, dim);
    for (i, mi) in basis.iter().enumerate() {
        let block = k_dot_s(&k[i]) * Complex64::from(C);
        a.view_mut((3 * i, 3 * i), (3, 3)).copy_from(&block);
        for (j, mj) in basis.iter().enumerate() {
            let v = table.get([mi[0] - mj[0], mi[1] - mj[1], mi[2] - mj[2]]);
            for c in 0..3 {
                b[(3 * i + c, 3 * j + c)] = v;
            }
        }
    }
    let rcond = eigen::overlap_rcond(&b);
    if !(rcond >= eigen::MIN_RCOND) {
        let mean = table.get([0; 3]);
        let (index, value) = table
            .indices()
            .into_iter()
            .filter(|m| *m != [0; 3])
            .map(|m| (m, table.get(m)))
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .filter(|(_, v)| mean.norm() > 1e-12 * v.norm())
            .unwrap_or(([0; 3], mean));
        return Err(Error::Conditioning { index, value, rcond });
    }
    Ok(Assembly { a, b, basis, k })
}

/// One retained Bloch mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMode {
    /// Frequency folded onto `Re ω ≥ 0`.
    pub omega: Complex64,
    /// Eigenvalue of `A x = ω B x` before folding.
    pub raw_omega: Complex64,
    /// Fraction of `Σ|ψ_G|²` transverse to `q + G`.
    pub transversality: f64,
    /// Amplitudes `ψ_G` in basis order, unit norm, largest entry real positive.
    pub amplitudes: Vec<ComplexVec3>,
}

/// Output of [`pwe_bands`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlochSolution {
    /// Bloch wavevector after folding into the first zone.
    pub q: Vector3<f64>,
    /// Whether the requested wavevector lay outside the first zone.
    pub folded: bool,
    pub basis: Vec<[i64; 3]>,
    pub reciprocal: [f64; 3],
    pub modes: Vec<BlochMode>,
    /// Eigenpairs dropped by the transversality filter.
    pub longitudinal_filtered: usize,
}

impl BlochSolution {
    pub fn frequencies(&self) -> Vec<Complex64> {
        self.modes.iter().map(|m| m.omega).collect()
    }

    /// Wavevector `q + G` of basis element `i`.
    pub fn wavevector(&self, i: usize) -> Vector3<f64> {
        let m = self.basis[i];
        self.q
            + Vector3::new(
                m[0] as f64 * self.reciprocal[0],
                m[1] as f64 * self.reciprocal[1],
                m[2] as f64 * self.reciprocal[2],
            )
    }
}

/// Direction used as "longitudinal" for the `q + G = 0` plane wave.
fn reference_direction(problem: &BlochProblem) -> Vector3<f64> {
    let mut d = Vector3::zeros();
    let axis = (0..3).find(|&a| problem.cutoff[a] > 0).unwrap_or(0);
    d[axis] = 1.0;
    d
}

struct Projector {
    units: Vec<Vector3<f64>>,
}

impl Projector {
    fn new(k: &[Vector3<f64>], reference: Vector3<f64>) -> Self {
        let scale = k.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        let units = k
            .iter()
            .map(|v| {
                let n = v.norm();
                if n > 1e-12 * scale {
                    v / n
                } else {
                    reference
                }
            })
            .collect();
        Self { units }
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = x.to_vec();
        for (i, u) in self.units.iter().enumerate() {
            let d = x[3 * i] * u.x + x[3 * i + 1] * u.y + x[3 * i + 2] * u.z;
            for c in 0..3 {
                out[3 * i + c] -= d * u[c];
            }
        }
        out
    }

    fn score(&self, x: &[Complex64]) -> f64 {
        let total: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        self.apply(x).iter().map(|v| v.norm_sqr()).sum::<f64>() / total
    }
}

fn rayleigh(a: &CMatrix, b: &CMatrix, x: &[Complex64]) -> Complex64 {
    let v = nalgebra::DVector::from_column_slice(x);
    let num = v.dotc(&(a * &v));
    let den = v.dotc(&(b * &v));
    num / den
}

/// Inside a cluster of (numerically) equal eigenvalues, rotates the
/// eigenvectors so they diagonalize the transverse projector.
fn rotate_cluster(
    vectors: &mut [Vec<Complex64>],
    values: &mut [Complex64],
    members: &[usize],
    projector: &Projector,
    asm: &Assembly,
) {
    let p = members.len();
    let dim = vectors[members[0]].len();
    let x = CMatrix::from_fn(dim, p, |r, c| vectors[members[c]][r]);
    let px = CMatrix::from_fn(dim, p, |r, c| 0.0 * x[(r, c)]);
    let mut px = px;
    for c in 0..p {
        let col = projector.apply(&vectors[members[c]]);
        px.column_mut(c).copy_from_slice(&col);
    }
    let gram = x.adjoint() * &x;
    let t = x.adjoint() * &px;
    let Some(pairs) = eigen::hermitian_definite(&t, &gram) else {
        return;
    };
    let rotated = &x * &pairs.vectors;
    for (c, &m) in members.iter().enumerate() {
        let mut col: Vec<Complex64> = rotated.column(c).iter().copied().collect();
        let n = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        col.iter_mut().for_each(|v| *v /= n);
        values[m] = rayleigh(&asm.a, &asm.b, &col);
        vectors[m] = col;
    }
}

/// Clusters of indices whose values chain within `tol`, after sorting.
fn clusters(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].re.total_cmp(&values[j].re).then(values[i].im.total_cmp(&values[j].im)));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match out.last_mut() {
            Some(last) if (values[*last.last().unwrap()] - values[i]).norm() <= tol => last.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Makes the largest-magnitude entry real and positive.
fn fix_phase(x: &mut [Complex64]) {
    let max = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = x.iter().find(|v| v.norm() >= max * (1.0 - 1e-12)).copied().unwrap();
    let phase = pivot.conj() / pivot.norm();
    x.iter_mut().for_each(|v| *v *= phase);
}

fn lexicographic(x: &[ComplexVec3], y: &[ComplexVec3]) -> Ordering {
    for (u, v) in x.iter().zip(y) {
        for c in 0..3 {
            let o = u[c].re.total_cmp(&v[c].re).then(u[c].im.total_cmp(&v[c].im));
            if o != Ordering::Equal {
                return o;
            }
        }
    }
    Ordering::Equal
}

/// Lowest `n_bands` transverse Bloch modes, ordered by `Re ω`.
///
/// Ties (within `1e-12` of the largest frequency) are broken by descending
/// transversality and then lexicographically on the phase-fixed amplitudes.
pub fn pwe_bands(problem: &BlochProblem, n_bands: usize) -> Result<BlochSolution> {
    let m = problem.basis_len();
    if n_bands > 2 * m {
        return Err(Error::Domain(format!(
            "{n_bands} bands requested but the basis holds only {} transverse modes",
            2 * m
        )));
    }
    let (q, folded) = fold_to_zone(problem.q, problem.lattice.period());
    if folded {
        log::info!("Bloch wavevector {:?} folded to {:?}", problem.q.as_slice(), q.as_slice());
    }
    let folded_problem = problem.at(q);
    let asm = assemble(&folded_problem)?;
    let pairs = solve_generalized(&asm.a, &asm.b)?;
    let dim = 3 * m;
    let mut values = pairs.values.clone();
    let mut vectors: Vec<Vec<Complex64>> =
        (0..dim).map(|c| pairs.vectors.column(c).iter().copied().collect()).collect();

    let projector = Projector::new(&asm.k, reference_direction(problem));
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    for members in clusters(&values, 1e-11 * scale) {
        if members.len() > 1 {
            rotate_cluster(&mut vectors, &mut values, &members, &projector, &asm);
        }
    }

    let mut modes = Vec::new();
    let mut filtered = 0;
    for (raw, mut x) in values.into_iter().zip(vectors) {
        let score = projector.score(&x);
        if score < TRANSVERSALITY_THRESHOLD {
            filtered += 1;
            continue;
        }
        if let Some(h) = problem.helicity {
            let positive = raw.re >= 0.0;
            if positive != (h == Helicity::Plus) {
                continue;
            }
        }
        fix_phase(&mut x);
        let omega = if raw.re >= 0.0 { raw } else { -raw };
        modes.push(BlochMode {
            omega,
            raw_omega: raw,
            transversality: score,
            amplitudes: x.chunks(3).map(|c| ComplexVec3::new(c[0], c[1], c[2])).collect(),
        });
    }
    modes.sort_by(|a, b| a.omega.re.total_cmp(&b.omega.re));
    let tol = 1e-12 * scale;
    let mut start = 0;
    while start < modes.len() {
        let mut end = start + 1;
        while end < modes.len() && modes[end].omega.re - modes[end - 1].omega.re <= tol {
            end += 1;
        }
        modes[start..end].sort_by(|a, b| {
            b.transversality.total_cmp(&a.transversality).then_with(|| lexicographic(&a.amplitudes, &b.amplitudes))
        });
        start = end;
    }
    if modes.len() < n_bands {
        return Err(Error::Domain(format!(
            "{n_bands} bands requested but only {} transverse modes were found",
            modes.len()
        )));
    }
    modes.truncate(n_bands);
    Ok(BlochSolution {
        q,
        folded,
        basis: asm.basis,
        reciprocal: problem.reciprocal(),
        modes,
        longitudinal_filtered: filtered,
    })
}

/// Band frequencies along a path of Bloch wavevectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    /// Wavevectors as supplied.
    pub path: Vec<Vector3<f64>>,
    /// Cumulative distance along `path`.
    pub arclength: Vec<f64>,
    /// `omega[i][b]`: band `b` at path point `i`, ascending in `Re ω`.
    pub omega: Vec<Vec<Complex64>>,
    pub transversality: Vec<Vec<f64>>,
    pub longitudinal_filtered: Vec<usize>,
    pub convention: Convention,
    pub cutoff: [usize; 3],
    pub period: [Option<f64>; 3],
}

impl BandStructure {
    /// Period used to normalize frequencies: the first periodic axis, else 1.
    pub fn reference_period(&self) -> f64 {
        self.period.iter().flatten().copied().next().unwrap_or(1.0)
    }

    /// `ω τ / 2πc`.
    pub fn normalized(&self, omega: f64) -> f64 {
        omega * self.reference_period() / (2.0 * PI * C)
    }

    pub fn n_bands(&self) -> usize {
        self.omega.first().map_or(0, |v| v.len())
    }
}

/// Solves each path point independently (in parallel) and merges by index.
pub fn band_path(template: &BlochProblem, path: &[Vector3<f64>], n_bands: usize) -> Result<BandStructure> {
    if path.is_empty() {
        return Err(Error::Domain("band path is empty".into()));
    }
    let solutions: Vec<BlochSolution> =
        path.par_iter().map(|q| pwe_bands(&template.at(*q), n_bands)).collect::<Result<_>>()?;
    let mut arclength = Vec::with_capacity(path.len());
    let mut s = 0.0;
    for (i, q) in path.iter().enumerate() {
        if i > 0 {
            s += (q - path[i - 1]).norm();
        }
        arclength.push(s);
    }
    Ok(BandStructure {
        path: path.to_vec(),
        arclength,
        omega: solutions.iter().map(|s| s.frequencies()).collect(),
        transversality: solutions.iter().map(|s| s.modes.iter().map(|m| m.transversality).collect()).collect(),
        longitudinal_filtered: solutions.iter().map(|s| s.longitudinal_filtered).collect(),
        convention: template.convention,
        cutoff: template.cutoff,
        period: template.lattice.period(),
    })
}

/// Wavenumber of a stationary wave in a homogeneous medium:
/// `k = (ω/c)(2 − 1/n)` (paper-literal) or `k = (ω/c) n` (kinematic).
pub fn homogeneous_dispersion(omega: f64, medium: &LorentzMedium, convention: Convention) -> Result<Complex64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("frequency {omega} must be > 0")));
    }
    let n = refractive_index(medium, omega)?.n;
    Ok(convention.stationary_factor(n) * (omega / C))
}

/// `‖∇×ψ − κψ‖ / ‖ψ‖` with the spectral curl.
pub fn stationary_residual(field: &VectorField, kappa: Complex64) -> Result<f64> {
    field.require_space(Space::Real)?;
    let norm = field.sum_sq();
    if norm == 0.0 {
        return Err(Error::Domain("stationary residual of a zero field".into()));
    }
    let curl = curl_real(field, &Transform::new(*field.grid()))?;
    let diff = curl.combine(Complex64::ONE, field, -kappa)?;
    Ok((diff.sum_sq() / norm).sqrt())
}

/// Places mode `index` of `solution` on `grid` as `Σ_G ψ_G e^{i(q+G)·r}`.
///
/// Every `q + G` must be a grid wavevector.
pub fn synthesize_mode(solution: &BlochSolution, index: usize, grid: &Grid) -> Result<VectorField> {
    let mode = solution.modes.get(index).ok_or_else(|| Error::Domain(format!("mode {index} out of range")))?;
    let h = grid.spacing();
    let root = Complex64::from((grid.len() as f64).sqrt());
    let mut rec = VectorField::zeros(*grid, Space::Reciprocal);
    for (i, amp) in mode.amplitudes.iter().enumerate() {
        let k = solution.wavevector(i);
        let m = grid.mode_of(&k)?;
        let idx = grid
            .mode_index(m)
            .ok_or_else(|| Error::Domain(format!("wavevector {m:?} beyond the grid's Nyquist limit")))?;
        let shift = 0.5 * (k.x * h[0] + k.y * h[1] + k.z * h[2]);
        rec.set(idx, rec.get(idx) + amp * root * Complex64::from_polar(1.0, shift));
    }
    Transform::new(*grid).inverse(&mut rec)?;
    Ok(rec)
}

/// Residual of mode `index` against the position-dependent stationary
/// equation `c ∇×ψ = ω b(r) ψ`, restricted to the plane-wave basis.
///
/// The periodic part `u = e^{-iq·r} ψ` and the truncated `b(r)` are
/// synthesized on a one-cell grid fine enough that their product is free of
/// aliasing inside the basis; the product is formed pointwise and
/// transformed back. Returns `‖c i(q+G)×ψ_G − ω (bψ)_G‖ / ‖ψ‖`.
pub fn mode_residual(problem: &BlochProblem, solution: &BlochSolution, index: usize) -> Result<f64> {
    let mode = solution.modes.get(index).ok_or_else(|| Error::Domain(format!("mode {index} out of range")))?;
    let period = problem.lattice.period();
    let cut = problem.cutoff;
    let dims = [0, 1, 2].map(|a| if cut[a] > 0 { 4 * cut[a] + 2 } else { 1 });
    let grid = Grid::new(dims, period.map(|p| p.unwrap_or(1.0)))?;
    let transform = Transform::new(grid);
    let h = grid.spacing();
    let recip = problem.reciprocal();
    let g_of = |m: [i64; 3]| Vector3::new(m[0] as f64 * recip[0], m[1] as f64 * recip[1], m[2] as f64 * recip[2]);
    let half_shift = |g: &Vector3<f64>| Complex64::from_polar(1.0, 0.5 * (g.x * h[0] + g.y * h[1] + g.z * h[2]));
    let root = (grid.len() as f64).sqrt();

    let table = fourier_coefficients(problem, cut.map(|c| 2 * c))?;
    let mut b = vec![Complex64::ZERO; grid.len()];
    for m in table.indices() {
        let idx = grid.mode_index(m).expect("coefficient below Nyquist");
        b[idx] = table.get(m) * root * half_shift(&g_of(m));
    }
    transform.inverse_plane(&mut b);

    let mut u = VectorField::zeros(grid, Space::Reciprocal);
    for (i, m) in solution.basis.iter().enumerate() {
        let idx = grid.mode_index(*m).expect("basis below Nyquist");
        u.set(idx, mode.amplitudes[i] * Complex64::from(root) * half_shift(&g_of(*m)));
    }
    transform.inverse(&mut u)?;
    u.map_points(|idx, v| v * b[idx]);
    transform.forward(&mut u)?;

    let mut num = 0.0;
    let mut den = 0.0;
    for (i, m) in solution.basis.iter().enumerate() {
        let idx = grid.mode_index(*m).expect("basis below Nyquist");
        let bu = u.get(idx) * (half_shift(&g_of(*m)).conj() / root);
        let x = mode.amplitudes[i];
        let r = curl_mode(&solution.wavevector(i), &x) * Complex64::from(C) - bu * mode.raw_omega;
        num += r.norm_squared();
        den += x.norm_squared();
    }
    Ok((num / den).sqrt())
}
