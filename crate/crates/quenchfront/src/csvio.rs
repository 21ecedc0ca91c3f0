//! Versioned CSV tables: `#`-prefixed `key = value` header lines, one column-name row,
//! then comma-separated numbers with 17 significant digits.

use std::{
    fs::File,
    io::{BufWriter, Read, Write},
    path::Path,
};

use anyhow::{anyhow, bail, Context, Result};
use quenchfront_core::{FrontProfile, Grid};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

impl Table {
    pub fn new(kind: &str, columns: &[&str]) -> Table {
        Table {
            kind: kind.to_string(),
            meta: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn meta_f64(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.meta(key, fmt_f64(value))
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        let v = self.get(key).ok_or_else(|| anyhow!("missing header entry `{key}`"))?;
        v.parse()
            .map_err(|_| anyhow!("header entry `{key}` is not a number: `{v}`"))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| anyhow!("missing column `{name}`"))?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# schema_version = {SCHEMA_VERSION}")?;
        writeln!(w, "# kind = {}", self.kind)?;
        for (k, v) in &self.meta {
            writeln!(w, "# {k} = {v}")?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.columns)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(|v| fmt_f64(*v)))?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        self.write_to(BufWriter::new(f))
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Table> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        let mut meta = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.trim_end().strip_prefix('#') else {
                break;
            };
            body_start += line.len();
            if let Some((k, v)) = rest.split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        let version = meta
            .iter()
            .find(|(k, _)| k == "schema_version")
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| anyhow!("missing schema_version header"))?;
        if version != SCHEMA_VERSION.to_string() {
            bail!("unsupported schema_version {version} (this build reads {SCHEMA_VERSION})");
        }
        let kind = meta
            .iter()
            .find(|(k, _)| k == "kind")
            .map(|(_, v)| v.clone())
            .unwrap_or_default();
        meta.retain(|(k, _)| k != "schema_version" && k != "kind");
        let mut csv = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
        let columns: Vec<String> = csv.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, rec) in csv.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|_| anyhow!("row {}: non-numeric field", i + 1))?;
            rows.push(row);
        }
        Ok(Table {
            kind,
            meta,
            columns,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Table> {
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        Table::read_from(f).with_context(|| format!("reading {}", path.display()))
    }
}

/// Loads a profile written by `solve` (columns `x`, `u`; header `c`).
pub fn read_profile(path: &Path) -> Result<FrontProfile> {
    let t = Table::read(path)?;
    if t.kind != "profile" {
        bail!("{} holds a `{}` table, not a profile", path.display(), t.kind);
    }
    let c = t.get_f64("c")?;
    let x = t.column("x")?;
    let u = t.column("u")?;
    if x.len() < Grid::MIN_NODES {
        bail!("profile has only {} nodes", x.len());
    }
    let grid = Grid::new(x[0], x[x.len() - 1], x.len())?;
    let off = x
        .iter()
        .enumerate()
        .fold(0.0f64, |m, (i, xi)| m.max((xi - grid.x(i)).abs()));
    if off > 1e-9 * (1.0 + grid.x_max().abs().max(grid.x_min().abs())) {
        bail!("profile nodes are not uniformly spaced");
    }
    let mut p = FrontProfile::new(c, grid, u)?;
    p.converged = true;
    p.residual_norm = t.get_f64("residual_norm").unwrap_or(f64::NAN);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut t = Table::new("demo", &["x", "u"]);
        t.meta("c", "0.5").meta_f64("residual_norm", 1.25e-11);
        t.push_row(vec![0.1, 1.0 / 3.0]);
        t.push_row(vec![-2.0, f64::NAN]);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# schema_version = 1\n# kind = demo\n"));
        assert!(text.contains("3.3333333333333331e-1"));
        let back = Table::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.kind, "demo");
        assert_eq!(back.get("c"), Some("0.5"));
        assert_eq!(back.rows[0], vec![0.1, 1.0 / 3.0]);
        assert!(back.rows[1][1].is_nan());
    }

    #[test]
    fn unknown_schema_rejected() {
        let text = "# schema_version = 2\n# kind = profile\nx,u\n0,1\n";
        let err = Table::read_from(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("unsupported schema_version"));
        assert!(Table::read_from("x,u\n0,1\n".as_bytes()).is_err());
    }
}
