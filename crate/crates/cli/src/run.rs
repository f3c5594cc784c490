use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use photon_core::bands::{band_path, homogeneous_dispersion, BandStructure, BlochProblem};
use photon_core::evolve::{default_step, mode_wavevector, wave_packet, EvolutionState};
use photon_core::media::{potential_energy, potential_field, refractive_index, Convention, PotentialField};

use crate::demo::run_double_slit;
use crate::error::CliError;
use crate::format::{field_table, num, Table};
use crate::scenario::{BandsSpec, Body, DispersionSpec, EvolveSpec, Medium, Scenario, SlitSpec};

/// Files written by a run and a few human-readable summary lines.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

impl Report {
    fn save(&mut self, table: &Table, dir: &Path, name: &str) -> Result<(), CliError> {
        let path = dir.join(name);
        table.save(&path)?;
        self.files.push(path);
        Ok(())
    }
}

/// Runs `scenario`, writing its outputs into `out` (created if needed).
pub fn run(scenario: &Scenario, out: &Path) -> Result<Report, CliError> {
    fs::create_dir_all(out)?;
    let hash = scenario.hash();
    let convention = scenario.convention;
    match &scenario.body {
        Body::Dispersion(d) => dispersion(d, convention, &hash, out),
        Body::Evolve(e) => evolve(e, require(convention)?, &hash, out),
        Body::Bands(b) => bands(b, require(convention)?, &hash, out),
        Body::DoubleSlit(s) => double_slit(s, require(convention)?, &hash, out),
    }
}

fn require(c: Option<Convention>) -> Result<Convention, CliError> {
    c.ok_or_else(|| crate::error::ConfigError::new(None, Some("convention"), "missing required key").into())
}

fn dispersion(d: &DispersionSpec, only: Option<Convention>, hash: &str, out: &Path) -> Result<Report, CliError> {
    let medium = d.medium()?;
    let conventions = match only {
        Some(c) => vec![c],
        None => vec![Convention::PaperLiteral, Convention::Kinematic],
    };
    let mut report = Report::default();
    for conv in conventions {
        let mut t =
            Table::new("dispersion", hash, &["omega", "re_n", "im_n", "re_v", "im_v", "re_k", "im_k", "evanescent"]);
        t.meta("convention", conv.name());
        for w in d.frequencies() {
            let n = refractive_index(&medium, w)?;
            let v = potential_energy(w, n.n, conv)?;
            let k = homogeneous_dispersion(w, &medium, conv)?;
            t.row(&[
                num(w),
                num(n.n.re),
                num(n.n.im),
                num(v.re),
                num(v.im),
                num(k.re),
                num(k.im),
                u8::from(n.evanescent).to_string(),
            ]);
        }
        report.save(&t, out, &format!("dispersion-{}.dat", conv.name()))?;
    }
    report.summary.push(format!("{} frequencies tabulated", d.omega_count));
    Ok(report)
}

fn evolve(e: &EvolveSpec, conv: Convention, hash: &str, out: &Path) -> Result<Report, CliError> {
    let grid = e.grid;
    let potential = match (&e.medium, e.medium.lattice()?) {
        (_, None) => None,
        (Medium::Uniform { index, .. }, _) => {
            let w = e.omega_ref.expect("validated with the medium");
            Some(PotentialField::uniform(grid, potential_energy(w, *index, conv)?))
        }
        (_, Some(lattice)) => {
            Some(potential_field(&lattice, &grid, e.omega_ref.expect("validated with the medium"), conv)?)
        }
    };
    let unitary = potential.as_ref().is_none_or(|p| p.is_real() && p.is_uniform());
    let p = &e.packet;
    let field =
        wave_packet(grid, Vector3::from(p.center), Vector3::from(p.width), mode_wavevector(&grid, p.mode), p.helicity)?;
    let dt = e.dt.unwrap_or_else(|| default_step(&grid));
    let mut state = EvolutionState::new(field, dt, potential)?;

    let mut report = Report::default();
    let mut snap = 0usize;
    let mut write_snapshot = |state: &EvolutionState, report: &mut Report| -> Result<(), CliError> {
        let t = field_table(state.field(), state.time(), hash);
        report.save(&t, out, &format!("field-{snap:05}.dat"))?;
        snap += 1;
        Ok(())
    };
    write_snapshot(&state, &mut report)?;
    let chunk = if e.snapshot_stride == 0 { e.n_steps } else { e.snapshot_stride };
    let mut done = 0;
    while done < e.n_steps {
        let n = chunk.min(e.n_steps - done);
        state.advance(n)?;
        done += n;
        write_snapshot(&state, &mut report)?;
    }

    let mut t = Table::new("diagnostics", hash, &["step", "time", "norm", "projected_out"]);
    t.meta("convention", conv.name()).meta("dt", num(dt));
    for s in state.diagnostics() {
        t.row(&[s.step.to_string(), num(s.time), num(s.norm), num(s.projected_out)]);
    }
    report.save(&t, out, "diagnostics.dat")?;

    let first = state.diagnostics().next().map_or(0.0, |s| s.norm);
    let last = state.diagnostics().last().map_or(0.0, |s| s.norm);
    let drift = (last - first).abs() / first;
    if unitary && drift > 1e-10 {
        return Err(CliError::Check(format!("norm drift {drift:.3e} exceeds 1e-10 for a unitary run")));
    }
    report
        .summary
        .push(format!("{} steps of {dt}; norm {first:.12} -> {last:.12} (relative change {drift:.3e})", e.n_steps));
    report.summary.push(format!("largest re-projected fraction {:.3e}", state.max_projected_out()));
    Ok(report)
}

fn bands(b: &BandsSpec, conv: Convention, hash: &str, out: &Path) -> Result<Report, CliError> {
    let lattice = b.medium.lattice()?.expect("bands media are never vacuum");
    let template = BlochProblem::new(lattice, Vector3::zeros(), b.cutoff, conv)?;
    let path: Vec<Vector3<f64>> = b.path().into_iter().map(Vector3::from).collect();
    let bs = band_path(&template, &path, b.n_bands)?;

    let mut t = Table::new(
        "bands",
        hash,
        &["q_index", "arclength", "qx", "qy", "qz", "band", "re_omega", "im_omega", "omega_norm", "transversality"],
    );
    t.meta("convention", conv.name())
        .meta("cutoff", bs.cutoff.map(|c| c.to_string()).join(" "))
        .meta("reference_period", num(bs.reference_period()));
    for (i, q) in bs.path.iter().enumerate() {
        for (band, w) in bs.omega[i].iter().enumerate() {
            t.row(&[
                i.to_string(),
                num(bs.arclength[i]),
                num(q.x),
                num(q.y),
                num(q.z),
                band.to_string(),
                num(w.re),
                num(w.im),
                num(bs.normalized(w.re)),
                num(bs.transversality[i][band]),
            ]);
        }
    }
    let mut report = Report::default();
    report.save(&t, out, "bands.dat")?;

    let gaps = band_gaps(&bs);
    let mut g = Table::new("gaps", hash, &["lower_band", "lo", "hi", "lo_norm", "hi_norm"]);
    g.meta("convention", conv.name());
    for (band, lo, hi) in &gaps {
        g.row(&[band.to_string(), num(*lo), num(*hi), num(bs.normalized(*lo)), num(bs.normalized(*hi))]);
    }
    report.save(&g, out, "gaps.dat")?;
    report.summary.push(format!(
        "{} bands at {} wavevectors; {} gap(s) along the path",
        bs.n_bands(),
        path.len(),
        gaps.len()
    ));
    Ok(report)
}

/// Complete gaps along the sampled path: `(b, max Re ω_b, min Re ω_{b+1})`
/// wherever the former is below the latter.
pub fn band_gaps(bs: &BandStructure) -> Vec<(usize, f64, f64)> {
    let n = bs.n_bands();
    (0..n.saturating_sub(1))
        .filter_map(|b| {
            let lo = bs.omega.iter().map(|w| w[b].re).fold(f64::NEG_INFINITY, f64::max);
            let hi = bs.omega.iter().map(|w| w[b + 1].re).fold(f64::INFINITY, f64::min);
            let scale = lo.abs().max(hi.abs()).max(1.0);
            (hi - lo > 1e-9 * scale).then_some((b, lo, hi))
        })
        .collect()
}

fn double_slit(s: &SlitSpec, conv: Convention, hash: &str, out: &Path) -> Result<Report, CliError> {
    let r = run_double_slit(s, conv)?;
    let mut t = Table::new("intensity", hash, &["y", "intensity"]);
    t.meta("convention", conv.name())
        .meta("detector_x", num(r.detector_x))
        .meta("fringe_spacing", num(r.spacing))
        .meta("expected_spacing", num(r.expected))
        .meta("relative_error", num(r.relative_error()))
        .meta("maxima", r.maxima.iter().map(|m| num(*m)).collect::<Vec<_>>().join(" "));
    for (y, i) in r.y.iter().zip(&r.intensity) {
        t.row(&[num(*y), num(*i)]);
    }
    let mut report = Report::default();
    report.save(&t, out, "intensity.dat")?;
    report.summary.push(format!(
        "fringe spacing {:.4} vs λL/d = {:.4} ({:.2}% off); transmitted norm {:.4}",
        r.spacing,
        r.expected,
        100.0 * r.relative_error(),
        r.final_norm / r.initial_norm
    ));
    Ok(report)
}
