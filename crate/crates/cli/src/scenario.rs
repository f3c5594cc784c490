//! Scenario files.
//!
//! One `key = value` pair per line, `#` starts a comment. Lists are comma
//! separated, vectors are `x,y,z`, lists of vectors are separated by `;`.
//! Complex numbers are written `a`, `a+bi` or `a-bi`. Which keys are allowed
//! depends on `kind` (and for media on `medium`); anything else is an error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use photon_core::evolve::Helicity;
use photon_core::media::{Axis, Convention, IndexLattice, IndexProfile, Layer, LorentzMedium, Oscillator};
use photon_core::{Complex64, Grid};
use sha2::{Digest, Sha256};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Dispersion,
    Evolve,
    Bands,
    DemoDoubleSlit,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Dispersion => "dispersion",
            Kind::Evolve => "evolve",
            Kind::Bands => "bands",
            Kind::DemoDoubleSlit => "demo-double-slit",
        }
    }

    /// The CLI subcommand that runs this kind.
    pub fn subcommand(self) -> &'static str {
        match self {
            Kind::DemoDoubleSlit => "demo",
            other => other.name(),
        }
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Kind::Dispersion, Kind::Evolve, Kind::Bands, Kind::DemoDoubleSlit]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown kind '{s}' (expected dispersion, evolve, bands or demo-double-slit)"))
    }
}

/// Medium filling the box (evolve) or the unit cell (bands).
#[derive(Debug, Clone, PartialEq)]
pub enum Medium {
    Vacuum,
    Uniform {
        index: Complex64,
        period: [Option<f64>; 3],
    },
    /// Layers along `axis`; the period along it is the total thickness.
    Layered {
        axis: Axis,
        thickness: Vec<f64>,
        index: Vec<Complex64>,
    },
}

impl Medium {
    fn name(&self) -> &'static str {
        match self {
            Medium::Vacuum => "vacuum",
            Medium::Uniform { .. } => "uniform",
            Medium::Layered { .. } => "layered",
        }
    }

    /// `None` for vacuum.
    pub fn lattice(&self) -> photon_core::Result<Option<IndexLattice>> {
        match self {
            Medium::Vacuum => Ok(None),
            Medium::Uniform { index, period } => IndexLattice::new(*period, IndexProfile::Uniform(*index)).map(Some),
            Medium::Layered { axis, thickness, index } => {
                let layers: Vec<Layer> =
                    thickness.iter().zip(index).map(|(&t, &n)| Layer { thickness: t, index: n }).collect();
                let mut period = [None; 3];
                period[axis.index()] = Some(thickness.iter().sum());
                IndexLattice::new(period, IndexProfile::Layered { axis: *axis, layers }).map(Some)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionSpec {
    pub coupling: f64,
    pub strength: Vec<f64>,
    pub resonance: Vec<f64>,
    pub damping: Vec<f64>,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_count: usize,
}

impl DispersionSpec {
    pub fn medium(&self) -> photon_core::Result<LorentzMedium> {
        let osc = (0..self.strength.len())
            .map(|i| Oscillator { strength: self.strength[i], resonance: self.resonance[i], damping: self.damping[i] })
            .collect();
        LorentzMedium::new(self.coupling, osc)
    }

    /// Evenly spaced frequencies, both ends included.
    pub fn frequencies(&self) -> Vec<f64> {
        if self.omega_count == 1 {
            return vec![self.omega_min];
        }
        let step = (self.omega_max - self.omega_min) / (self.omega_count - 1) as f64;
        (0..self.omega_count).map(|i| self.omega_min + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpec {
    pub center: [f64; 3],
    pub width: [f64; 3],
    /// Carrier as an integer mode index of the grid.
    pub mode: [i64; 3],
    pub helicity: Helicity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSpec {
    pub grid: Grid,
    pub medium: Medium,
    /// Carrier frequency fixing the potential; absent for vacuum.
    pub omega_ref: Option<f64>,
    pub dt: Option<f64>,
    pub n_steps: u64,
    /// Snapshot every this many steps; 0 writes only the first and last.
    pub snapshot_stride: u64,
    pub packet: PacketSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandsSpec {
    pub medium: Medium,
    pub q_vertices: Vec<[f64; 3]>,
    /// Points per path segment (the segment end is added once).
    pub q_steps: usize,
    pub cutoff: usize,
    pub n_bands: usize,
}

impl BandsSpec {
    pub fn path(&self) -> Vec<[f64; 3]> {
        let v = &self.q_vertices;
        let mut out = vec![v[0]];
        for pair in v.windows(2) {
            for s in 1..=self.q_steps {
                let t = s as f64 / self.q_steps as f64;
                out.push([0, 1, 2].map(|a| pair[0][a] + t * (pair[1][a] - pair[0][a])));
            }
        }
        out
    }
}

/// Plane wave through an absorbing screen with two slits.
///
/// The wave travels along +x; the screen occupies
/// `screen_x ≤ x < screen_x + screen_thickness` except for two slits
/// centred at `Ly/2 ± slit_separation/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlitSpec {
    pub grid: Grid,
    pub wavelength: f64,
    pub source_x: f64,
    pub source_width: f64,
    pub screen_x: f64,
    pub screen_thickness: f64,
    pub screen_index: Complex64,
    pub slit_separation: f64,
    pub slit_width: f64,
    pub detector_x: f64,
    pub t_end: f64,
    pub dt: Option<f64>,
}

impl SlitSpec {
    /// Distance from the screen's exit face to the detection plane.
    pub fn distance(&self) -> f64 {
        self.detector_x - self.screen_x - self.screen_thickness
    }

    /// Far-field two-slit fringe spacing `λL/d`.
    pub fn expected_spacing(&self) -> f64 {
        self.wavelength * self.distance() / self.slit_separation
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Dispersion(DispersionSpec),
    Evolve(EvolveSpec),
    Bands(BandsSpec),
    DoubleSlit(SlitSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Absent only for dispersion, which then reports both conventions.
    pub convention: Option<Convention>,
    pub output: Option<PathBuf>,
    pub body: Body,
}

impl Scenario {
    pub fn kind(&self) -> Kind {
        match self.body {
            Body::Dispersion(_) => Kind::Dispersion,
            Body::Evolve(_) => Kind::Evolve,
            Body::Bands(_) => Kind::Bands,
            Body::DoubleSlit(_) => Kind::DemoDoubleSlit,
        }
    }

    /// Canonical text; `parse_scenario` of it gives back `self`.
    pub fn to_text(&self) -> String {
        let values = self.values();
        let medium = match &self.body {
            Body::Evolve(e) => Some(e.medium.name()),
            Body::Bands(b) => Some(b.medium.name()),
            _ => None,
        };
        let mut out = String::new();
        for (key, _) in key_table(self.kind(), medium) {
            if let Some(v) = values.get(key) {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        out
    }

    /// SHA-256 of the canonical text without the output directory, so runs
    /// into different directories carry the same hash.
    pub fn hash(&self) -> String {
        let text = Scenario { output: None, ..self.clone() }.to_text();
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn values(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("kind", self.kind().name().to_owned());
        if let Some(c) = self.convention {
            m.insert("convention", c.name().to_owned());
        }
        if let Some(o) = &self.output {
            m.insert("output", o.display().to_string());
        }
        match &self.body {
            Body::Dispersion(d) => {
                m.insert("coupling", fmt_f64(d.coupling));
                m.insert("oscillator_strength", fmt_list(&d.strength));
                m.insert("oscillator_resonance", fmt_list(&d.resonance));
                m.insert("oscillator_damping", fmt_list(&d.damping));
                m.insert("omega_min", fmt_f64(d.omega_min));
                m.insert("omega_max", fmt_f64(d.omega_max));
                m.insert("omega_count", d.omega_count.to_string());
            }
            Body::Evolve(e) => {
                insert_grid(&mut m, &e.grid);
                insert_medium(&mut m, &e.medium);
                if let Some(w) = e.omega_ref {
                    m.insert("omega_ref", fmt_f64(w));
                }
                if let Some(dt) = e.dt {
                    m.insert("dt", fmt_f64(dt));
                }
                m.insert("n_steps", e.n_steps.to_string());
                m.insert("snapshot_stride", e.snapshot_stride.to_string());
                m.insert("packet_center", fmt_vec(&e.packet.center));
                m.insert("packet_width", fmt_vec(&e.packet.width));
                m.insert("packet_mode", e.packet.mode.map(|v| v.to_string()).join(","));
                let h = match e.packet.helicity {
                    Helicity::Plus => "plus",
                    Helicity::Minus => "minus",
                };
                m.insert("packet_helicity", h.to_owned());
            }
            Body::Bands(b) => {
                insert_medium(&mut m, &b.medium);
                m.insert("q_vertices", b.q_vertices.iter().map(fmt_vec).collect::<Vec<_>>().join("; "));
                m.insert("q_steps", b.q_steps.to_string());
                m.insert("cutoff", b.cutoff.to_string());
                m.insert("n_bands", b.n_bands.to_string());
            }
            Body::DoubleSlit(s) => {
                insert_grid(&mut m, &s.grid);
                m.insert("wavelength", fmt_f64(s.wavelength));
                m.insert("source_x", fmt_f64(s.source_x));
                m.insert("source_width", fmt_f64(s.source_width));
                m.insert("screen_x", fmt_f64(s.screen_x));
                m.insert("screen_thickness", fmt_f64(s.screen_thickness));
                m.insert("screen_index", fmt_complex(s.screen_index));
                m.insert("slit_separation", fmt_f64(s.slit_separation));
                m.insert("slit_width", fmt_f64(s.slit_width));
                m.insert("detector_x", fmt_f64(s.detector_x));
                m.insert("t_end", fmt_f64(s.t_end));
                if let Some(dt) = s.dt {
                    m.insert("dt", fmt_f64(dt));
                }
            }
        }
        m
    }
}

fn insert_grid(m: &mut BTreeMap<&'static str, String>, g: &Grid) {
    m.insert("grid_dims", g.dims().map(|v| v.to_string()).join(","));
    m.insert("box", fmt_vec(&g.lengths()));
}

fn insert_medium(m: &mut BTreeMap<&'static str, String>, medium: &Medium) {
    m.insert("medium", medium.name().to_owned());
    match medium {
        Medium::Vacuum => {}
        Medium::Uniform { index, period } => {
            m.insert("index", fmt_complex(*index));
            if period.iter().any(Option::is_some) {
                let p = period.map(|p| p.map_or("none".to_owned(), fmt_f64));
                m.insert("lattice_period", p.join(","));
            }
        }
        Medium::Layered { axis, thickness, index } => {
            m.insert("layer_axis", ["x", "y", "z"][axis.index()].to_owned());
            m.insert("layer_thickness", fmt_list(thickness));
            m.insert("layer_index", index.iter().map(|n| fmt_complex(*n)).collect::<Vec<_>>().join(", "));
        }
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ")
}

fn fmt_vec(v: &[f64; 3]) -> String {
    v.map(fmt_f64).join(",")
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_f64(z.re)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", z.re, z.im.abs())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Need {
    Required,
    Optional,
}

use Need::{Optional, Required};

/// Allowed keys in canonical order.
fn key_table(kind: Kind, medium: Option<&str>) -> Vec<(&'static str, Need)> {
    let convention = if kind == Kind::Dispersion { Optional } else { Required };
    let mut t = vec![("kind", Required), ("convention", convention), ("output", Optional)];
    let medium_keys = |t: &mut Vec<(&'static str, Need)>| {
        t.push(("medium", Required));
        match medium {
            Some("uniform") => t.extend([("index", Required), ("lattice_period", Optional)]),
            Some("layered") => {
                t.extend([("layer_axis", Required), ("layer_thickness", Required), ("layer_index", Required)])
            }
            _ => {}
        }
    };
    match kind {
        Kind::Dispersion => t.extend([
            ("coupling", Required),
            ("oscillator_strength", Required),
            ("oscillator_resonance", Required),
            ("oscillator_damping", Required),
            ("omega_min", Required),
            ("omega_max", Required),
            ("omega_count", Required),
        ]),
        Kind::Evolve => {
            t.extend([("grid_dims", Required), ("box", Required)]);
            medium_keys(&mut t);
            if medium != Some("vacuum") {
                t.push(("omega_ref", Required));
            }
            t.extend([
                ("dt", Optional),
                ("n_steps", Required),
                ("snapshot_stride", Required),
                ("packet_center", Required),
                ("packet_width", Required),
                ("packet_mode", Required),
                ("packet_helicity", Required),
            ]);
        }
        Kind::Bands => {
            medium_keys(&mut t);
            t.extend([("q_vertices", Required), ("q_steps", Required), ("cutoff", Required), ("n_bands", Required)]);
        }
        Kind::DemoDoubleSlit => t.extend([
            ("grid_dims", Required),
            ("box", Required),
            ("wavelength", Required),
            ("source_x", Required),
            ("source_width", Required),
            ("screen_x", Required),
            ("screen_thickness", Required),
            ("screen_index", Required),
            ("slit_separation", Required),
            ("slit_width", Required),
            ("detector_x", Required),
            ("t_end", Required),
            ("dt", Optional),
        ]),
    }
    t
}

/// Parsed but untyped lines.
struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn read(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::new(Some(line), None, format!("expected 'key = value', found '{content}'")));
            };
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(ConfigError::new(Some(line), None, format!("invalid key '{key}'")));
            }
            if let Some((first, _)) = map.get(key) {
                return Err(ConfigError::at(line, key, format!("duplicate key (first set on line {first})")));
            }
            map.insert(key.to_owned(), (line, value.trim().to_owned()));
        }
        Ok(Self { map })
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn req(&self, key: &str) -> Result<(usize, &str), ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::new(None, Some(key), "missing required key"))
    }

    fn parse<T>(&self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        let (line, v) = self.req(key)?;
        f(v).map_err(|m| ConfigError::at(line, key, m))
    }

    fn parse_opt<T>(&self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => f(v).map(Some).map_err(|m| ConfigError::at(line, key, m)),
        }
    }

    /// Line of `key` for errors raised after typed parsing.
    fn line(&self, key: &str) -> Option<usize> {
        self.get(key).map(|(l, _)| l)
    }

    fn fail(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::new(self.line(key), Some(key), message)
    }
}

fn real(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x = real(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be > 0, got {x}"))
    }
}

fn count(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))
}

fn at_least_one(s: &str) -> Result<usize, String> {
    match count(s)? {
        0 => Err("must be >= 1".into()),
        n => Ok(n),
    }
}

fn complex(s: &str) -> Result<Complex64, String> {
    let bad = || format!("'{s}' is not a complex number (forms: a, bi, a+bi, a-bi)");
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return real(&t).map(Complex64::from).map_err(|_| bad());
    };
    // Split at the last sign that is not a leading sign or part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (real(&body[..i]).map_err(|_| bad())?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => real(other.strip_prefix('+').unwrap_or(other)).map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

fn list<T>(s: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| f(p.trim())).collect()
}

fn triple<T: Copy>(s: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<[T; 3], String> {
    let v = list(s, f)?;
    <[T; 3]>::try_from(v.as_slice()).map_err(|_| format!("expected 3 comma-separated values, got {}", v.len()))
}

fn grid(e: &Entries) -> Result<Grid, ConfigError> {
    let dims = e.parse("grid_dims", |s| triple(s, at_least_one))?;
    let lengths = e.parse("box", |s| triple(s, positive))?;
    Grid::new(dims, lengths).map_err(|err| e.fail("grid_dims", err.to_string()))
}

fn medium(e: &Entries, allow_vacuum: bool) -> Result<Medium, ConfigError> {
    let (line, name) = e.req("medium")?;
    let m = match name {
        "vacuum" if allow_vacuum => Medium::Vacuum,
        "uniform" => {
            let index = e.parse("index", complex)?;
            let period = e
                .parse_opt("lattice_period", |s| {
                    triple(s, |p| if p == "none" { Ok(None) } else { positive(p).map(Some) })
                })?
                .unwrap_or([None; 3]);
            Medium::Uniform { index, period }
        }
        "layered" => {
            let axis = e.parse("layer_axis", |s| match s {
                "x" => Ok(Axis::X),
                "y" => Ok(Axis::Y),
                "z" => Ok(Axis::Z),
                other => Err(format!("unknown axis '{other}' (expected x, y or z)")),
            })?;
            let thickness = e.parse("layer_thickness", |s| list(s, positive))?;
            let index = e.parse("layer_index", |s| list(s, complex))?;
            if thickness.len() != index.len() {
                return Err(e.fail(
                    "layer_index",
                    format!("{} indices for {} layer thicknesses", index.len(), thickness.len()),
                ));
            }
            Medium::Layered { axis, thickness, index }
        }
        other => {
            let choices = if allow_vacuum { "vacuum, uniform or layered" } else { "uniform or layered" };
            return Err(ConfigError::at(line, "medium", format!("'{other}' not allowed here (expected {choices})")));
        }
    };
    let blame = match m {
        Medium::Layered { .. } => "layer_index",
        _ => "index",
    };
    m.lattice().map_err(|err| e.fail(blame, err.to_string()))?;
    Ok(m)
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let e = Entries::read(text)?;
    let kind: Kind = e.parse("kind", |s| s.parse())?;
    let medium_name = match kind {
        Kind::Evolve | Kind::Bands => e.get("medium").map(|(_, v)| v),
        _ => None,
    };
    let table = key_table(kind, medium_name);
    for (key, (line, _)) in &e.map {
        if !table.iter().any(|(k, _)| k == key) {
            return Err(ConfigError::at(*line, key, format!("unknown key for kind '{}'", kind.name())));
        }
    }
    for (key, need) in &table {
        if *need == Required && e.get(key).is_none() {
            return Err(ConfigError::new(None, Some(key), format!("missing required key for kind '{}'", kind.name())));
        }
    }
    let convention = e.parse_opt("convention", |s| s.parse::<Convention>().map_err(|err| err.to_string()))?;
    let output = e.get("output").map(|(_, v)| PathBuf::from(v));

    let body = match kind {
        Kind::Dispersion => Body::Dispersion(dispersion(&e)?),
        Kind::Evolve => Body::Evolve(evolve(&e)?),
        Kind::Bands => Body::Bands(bands(&e)?),
        Kind::DemoDoubleSlit => Body::DoubleSlit(double_slit(&e)?),
    };
    Ok(Scenario { convention, output, body })
}

fn dispersion(e: &Entries) -> Result<DispersionSpec, ConfigError> {
    let spec = DispersionSpec {
        coupling: e.parse("coupling", real)?,
        strength: e.parse("oscillator_strength", |s| list(s, real))?,
        resonance: e.parse("oscillator_resonance", |s| list(s, real))?,
        damping: e.parse("oscillator_damping", |s| list(s, real))?,
        omega_min: e.parse("omega_min", positive)?,
        omega_max: e.parse("omega_max", positive)?,
        omega_count: e.parse("omega_count", at_least_one)?,
    };
    let n = spec.strength.len();
    for key in ["oscillator_resonance", "oscillator_damping"] {
        let len = if key == "oscillator_resonance" { spec.resonance.len() } else { spec.damping.len() };
        if len != n {
            return Err(e.fail(key, format!("{len} values for {n} oscillator strengths")));
        }
    }
    if spec.omega_max < spec.omega_min {
        return Err(e.fail("omega_max", "must be >= omega_min"));
    }
    spec.medium().map_err(|err| e.fail("oscillator_strength", err.to_string()))?;
    Ok(spec)
}

fn evolve(e: &Entries) -> Result<EvolveSpec, ConfigError> {
    let grid = grid(e)?;
    let medium = medium(e, true)?;
    if let Some(lattice) = medium.lattice().ok().flatten() {
        let blame = match medium {
            Medium::Layered { .. } => "layer_thickness",
            _ => "lattice_period",
        };
        lattice.cells_per_period(&grid).map_err(|err| e.fail(blame, format!("lattice does not fit the box: {err}")))?;
    }
    let packet = PacketSpec {
        center: e.parse("packet_center", |s| triple(s, real))?,
        width: e.parse("packet_width", |s| triple(s, positive))?,
        mode: e.parse("packet_mode", |s| {
            triple(s, |v| v.parse::<i64>().map_err(|_| format!("'{v}' is not an integer")))
        })?,
        helicity: e.parse("packet_helicity", |s| match s {
            "plus" => Ok(Helicity::Plus),
            "minus" => Ok(Helicity::Minus),
            other => Err(format!("unknown helicity '{other}' (expected plus or minus)")),
        })?,
    };
    if grid.mode_index(packet.mode).is_none() {
        return Err(e.fail("packet_mode", "mode lies beyond the grid's Nyquist limit"));
    }
    if packet.mode == [0, 0, 0] {
        return Err(e.fail("packet_mode", "carrier must be nonzero"));
    }
    Ok(EvolveSpec {
        grid,
        medium,
        omega_ref: e.parse_opt("omega_ref", positive)?,
        dt: e.parse_opt("dt", positive)?,
        n_steps: e.parse("n_steps", |s| at_least_one(s).map(|n| n as u64))?,
        snapshot_stride: e.parse("snapshot_stride", |s| count(s).map(|n| n as u64))?,
        packet,
    })
}

fn bands(e: &Entries) -> Result<BandsSpec, ConfigError> {
    let medium = medium(e, false)?;
    let q_vertices = e.parse("q_vertices", |s| s.split(';').map(|v| triple(v.trim(), real)).collect())?;
    let spec = BandsSpec {
        medium,
        q_vertices,
        q_steps: e.parse("q_steps", at_least_one)?,
        cutoff: e.parse("cutoff", at_least_one)?,
        n_bands: e.parse("n_bands", at_least_one)?,
    };
    let lattice = spec.medium.lattice().ok().flatten().expect("validated above");
    let periodic = lattice.period().iter().filter(|p| p.is_some()).count() as u32;
    let transverse = 2 * (2 * spec.cutoff + 1).pow(periodic);
    if spec.n_bands > transverse {
        return Err(e.fail("n_bands", format!("at most {transverse} bands fit the plane-wave basis")));
    }
    Ok(spec)
}

fn double_slit(e: &Entries) -> Result<SlitSpec, ConfigError> {
    let spec = SlitSpec {
        grid: grid(e)?,
        wavelength: e.parse("wavelength", positive)?,
        source_x: e.parse("source_x", real)?,
        source_width: e.parse("source_width", positive)?,
        screen_x: e.parse("screen_x", real)?,
        screen_thickness: e.parse("screen_thickness", positive)?,
        screen_index: e.parse("screen_index", complex)?,
        slit_separation: e.parse("slit_separation", positive)?,
        slit_width: e.parse("slit_width", positive)?,
        detector_x: e.parse("detector_x", real)?,
        t_end: e.parse("t_end", positive)?,
        dt: e.parse_opt("dt", positive)?,
    };
    let [lx, ly, _] = spec.grid.lengths();
    let periods = lx / spec.wavelength;
    if (periods - periods.round()).abs() > 1e-9 * periods {
        return Err(e.fail("wavelength", format!("box length {lx} is not a whole number of wavelengths")));
    }
    if 2.0 * periods.round() >= spec.grid.dims()[0] as f64 {
        return Err(e.fail("wavelength", "carrier is at or beyond the grid's Nyquist limit"));
    }
    if !(spec.source_x > 0.0 && spec.source_x < spec.screen_x) {
        return Err(e.fail("source_x", "source must lie between 0 and the screen"));
    }
    if spec.detector_x <= spec.screen_x + spec.screen_thickness || spec.detector_x >= lx {
        return Err(e.fail("detector_x", "detector must lie behind the screen and inside the box"));
    }
    if spec.slit_width >= spec.slit_separation || spec.slit_separation + spec.slit_width >= ly {
        return Err(e.fail("slit_separation", "slits overlap or do not fit the box"));
    }
    if spec.screen_index.im <= 0.0 || spec.screen_index.re <= 0.0 {
        return Err(e.fail("screen_index", "screen must absorb (Re n > 0, Im n > 0)"));
    }
    Ok(spec)
}
