//! Transfer-matrix dispersion of a lossless one-dimensional layer stack.
//!
//! Each layer contributes a characteristic matrix
//! `[[cos δ, i sin δ / η], [i η sin δ, cos δ]]` with phase `δ = k d`,
//! `k = b(n) ω / c`, and the Bloch condition is `cos(qτ) = ½ tr Π M_l`.
//! With [`Matching::Impedance`] the admittance is `η = b(n)`, which for the
//! kinematic convention is the Maxwell stack
//! `cos k₁d₁ cos k₂d₂ − ½(n₁/n₂ + n₂/n₁) sin k₁d₁ sin k₂d₂`.
//! With [`Matching::Helicity`] the admittance is 1 in every layer, so the
//! relation collapses to `cos(qτ) = cos(Σ k_l d_l)`: the interfaces reflect
//! nothing, as for a single-helicity wave obeying `c ∇×ψ = ω b ψ`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::media::{Convention, IndexLattice, IndexProfile};
use crate::C;

/// Interface condition between layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Matching {
    /// Admittance equal to the layer's `b(n)`.
    Impedance,
    /// Unit admittance everywhere.
    Helicity,
}

/// Roots of the Bloch condition at one `q` and the allowed bands in range.
#[derive(Debug, Clone, PartialEq)]
pub struct TmmBands {
    pub q: f64,
    pub range: [f64; 2],
    /// Frequencies with `½ tr M(ω) = cos qτ`, ascending. Tangent (double)
    /// roots, where two Bloch waves coincide, are listed twice.
    pub branches: Vec<f64>,
    /// Frequencies where `|½ tr M| = 1`, ascending and distinct.
    pub edges: Vec<f64>,
    /// Maximal intervals with `|½ tr M| ≤ 1`.
    pub allowed: Vec<[f64; 2]>,
}

impl TmmBands {
    /// Intervals of the range not covered by an allowed band.
    pub fn gaps(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        let mut cursor = self.range[0];
        for band in &self.allowed {
            if band[0] > cursor {
                out.push([cursor, band[0]]);
            }
            cursor = cursor.max(band[1]);
        }
        if cursor < self.range[1] {
            out.push([cursor, self.range[1]]);
        }
        out
    }
}

struct Stack {
    tau: f64,
    layers: Vec<(f64, f64)>,
}

fn real_stack(stack: &IndexLattice, convention: Convention) -> Result<Stack> {
    let IndexProfile::Layered { axis, layers } = stack.profile() else {
        return Err(Error::Domain("transfer matrices need a layered stack".into()));
    };
    if !stack.is_lossless() {
        return Err(Error::Domain("transfer-matrix oracle needs real indices".into()));
    }
    let tau = stack.period()[axis.index()].expect("layered axis is periodic");
    let layers = layers.iter().map(|l| (l.thickness, convention.stationary_factor(l.index).re)).collect::<Vec<_>>();
    if layers.iter().any(|&(_, b)| b <= 0.0) {
        return Err(Error::Domain("stationary factor must be positive in every layer".into()));
    }
    Ok(Stack { tau, layers })
}

fn half_trace(stack: &Stack, omega: f64, matching: Matching) -> f64 {
    let mut m = [[Complex64::ONE, Complex64::ZERO], [Complex64::ZERO, Complex64::ONE]];
    for &(d, b) in &stack.layers {
        let delta = b * omega * d / C;
        let eta = match matching {
            Matching::Impedance => b,
            Matching::Helicity => 1.0,
        };
        let (s, c) = delta.sin_cos();
        let l =
            [[Complex64::from(c), Complex64::new(0.0, s / eta)], [Complex64::new(0.0, eta * s), Complex64::from(c)]];
        m = [
            [m[0][0] * l[0][0] + m[0][1] * l[1][0], m[0][0] * l[0][1] + m[0][1] * l[1][1]],
            [m[1][0] * l[0][0] + m[1][1] * l[1][0], m[1][0] * l[0][1] + m[1][1] * l[1][1]],
        ];
    }
    0.5 * (m[0][0] + m[1][1]).re
}

/// Tangent roots must bring `|f|` below this.
const TANGENT_TOL: f64 = 1e-9;

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1).abs(), f(x2).abs());
    for _ in 0..200 {
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1).abs();
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2).abs();
        }
    }
    0.5 * (a + b)
}

/// Roots of `f` on `[lo, hi]` from a uniform scan of `res` intervals:
/// sign changes are bisected, local minima of `|f|` are refined by golden
/// section and kept (twice) if they reach [`TANGENT_TOL`].
fn scan_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, res: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..=res).map(|i| lo + (hi - lo) * i as f64 / res as f64).collect();
    let v: Vec<f64> = w.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..res {
        if v[i] == 0.0 {
            roots.push(w[i]);
        } else if v[i] * v[i + 1] < 0.0 {
            roots.push(bisect(&f, w[i], w[i + 1]));
        }
    }
    if v[res] == 0.0 {
        roots.push(w[res]);
    }
    for i in 1..res {
        let same_sign = v[i - 1] * v[i] > 0.0 && v[i] * v[i + 1] > 0.0;
        if same_sign && v[i].abs() < v[i - 1].abs() && v[i].abs() <= v[i + 1].abs() {
            let x = golden_min(&f, w[i - 1], w[i + 1]);
            if f(x).abs() < TANGENT_TOL {
                roots.push(x);
                roots.push(x);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Maxwell (impedance-matched) stack in the kinematic convention.
pub fn transfer_matrix_bands_1d(
    stack: &IndexLattice,
    q: f64,
    omega_range: [f64; 2],
    resolution: usize,
) -> Result<TmmBands> {
    transfer_matrix_bands_1d_with(stack, q, omega_range, resolution, Matching::Impedance, Convention::Kinematic)
}

pub fn transfer_matrix_bands_1d_with(
    stack: &IndexLattice,
    q: f64,
    omega_range: [f64; 2],
    resolution: usize,
    matching: Matching,
    convention: Convention,
) -> Result<TmmBands> {
    let [lo, hi] = omega_range;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Domain(format!("invalid frequency range [{lo}, {hi}]")));
    }
    if resolution < 2 {
        return Err(Error::Domain("resolution must be >= 2".into()));
    }
    if !q.is_finite() {
        return Err(Error::Domain("Bloch wavenumber must be finite".into()));
    }
    let s = real_stack(stack, convention)?;
    let target = (q * s.tau).cos();
    let ht = |w: f64| half_trace(&s, w, matching);
    let branches = scan_roots(|w| ht(w) - target, lo, hi, resolution);

    let mut edges = scan_roots(|w| ht(w) - 1.0, lo, hi, resolution);
    edges.extend(scan_roots(|w| ht(w) + 1.0, lo, hi, resolution));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));

    let mut cuts = vec![lo];
    cuts.extend(edges.iter().copied().filter(|&e| e > lo && e < hi));
    cuts.push(hi);
    let mut allowed: Vec<[f64; 2]> = Vec::new();
    for pair in cuts.windows(2) {
        if pair[1] <= pair[0] || ht(0.5 * (pair[0] + pair[1])).abs() > 1.0 {
            continue;
        }
        match allowed.last_mut() {
            Some(last) if last[1] == pair[0] => last[1] = pair[1],
            _ => allowed.push([pair[0], pair[1]]),
        }
    }
    Ok(TmmBands { q, range: omega_range, branches, edges, allowed })
}
