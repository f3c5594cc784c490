//! Output files: `#` header lines followed by space-separated records.
//!
//! Every file starts with
//!
//! ```text
//! # photon-wave format 1
//! # kind <file kind>
//! # scenario sha256:<hex>
//! ```
//!
//! then `# <name> <value>` metadata lines and a `# columns ...` line. Reals
//! are printed with 17 significant digits (`{:.16e}`), which round-trips
//! every binary64 value.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use photon_core::{Space, VectorField};

pub const FORMAT_VERSION: u32 = 1;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header and records of one output file, assembled in memory.
#[derive(Debug, Clone)]
pub struct Table {
    kind: String,
    hash: String,
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<String>,
}

impl Table {
    pub fn new(kind: &str, hash: &str, columns: &[&str]) -> Self {
        Self {
            kind: kind.to_owned(),
            hash: hash.to_owned(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, name: &str, value: impl Into<String>) -> &mut Self {
        self.meta.push((name.to_owned(), value.into()));
        self
    }

    /// Appends a record; panics if the field count differs from the columns.
    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns.len(), "record width");
        self.rows.push(fields.join(" "));
    }

    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "# photon-wave format {FORMAT_VERSION}")?;
        writeln!(w, "# kind {}", self.kind)?;
        writeln!(w, "# scenario sha256:{}", self.hash)?;
        for (k, v) in &self.meta {
            writeln!(w, "# {k} {v}")?;
        }
        writeln!(w, "# columns {}", self.columns.join(" "))?;
        for r in &self.rows {
            writeln!(w, "{r}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        let mut w = BufWriter::new(fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()
    }
}

/// Snapshot of a real-space field: one record per grid point in storage
/// order (x fastest), columns `re_x im_x re_y im_y re_z im_z`.
pub fn field_table(field: &VectorField, time: f64, hash: &str) -> Table {
    assert_eq!(field.space(), Space::Real, "snapshots are written in real space");
    let g = field.grid();
    let mut t = Table::new("field", hash, &["re_x", "im_x", "re_y", "im_y", "re_z", "im_z"]);
    t.meta("dims", g.dims().map(|d| d.to_string()).join(" "))
        .meta("lengths", g.lengths().map(num).join(" "))
        .meta("time", num(time));
    for idx in 0..field.len() {
        let v = field.get(idx);
        t.row(&[v.x.re, v.x.im, v.y.re, v.y.im, v.z.re, v.z.im].map(num));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }

    #[test]
    fn header_layout() {
        let mut t = Table::new("demo", "ab", &["a", "b"]);
        t.meta("note", "x");
        t.row(&[num(1.0), num(2.0)]);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# photon-wave format 1");
        assert_eq!(lines[1], "# kind demo");
        assert_eq!(lines[2], "# scenario sha256:ab");
        assert_eq!(lines[3], "# note x");
        assert_eq!(lines[4], "# columns a b");
        assert_eq!(lines[5], "1.0000000000000000e0 2.0000000000000000e0");
    }
}
