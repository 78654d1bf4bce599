//! Emission and re-parsing of run artifacts.
//!
//! Three file shapes, each self-describing through a `# schema:` header
//! (CSV) or a `schema` field (JSON), and each pointing back at the manifest
//! of the run that produced it:
//!
//! * series CSV: one row per grid time, float columns;
//! * table CSV: one row per node, an integer node column plus float columns;
//! * JSON summary and manifest, serialized with stable field order.
//!
//! Floats are written with [`f64`]'s shortest round-trip formatting in
//! scientific notation, so a re-parse recovers them bit for bit and a rerun
//! of a deterministic config reproduces every byte.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context};

pub const SERIES_SCHEMA: &str = "qwalk-series-v1";
pub const TABLE_SCHEMA: &str = "qwalk-table-v1";
pub const SUMMARY_SCHEMA: &str = "qwalk-summary-v1";
pub const MANIFEST_SCHEMA: &str = "qwalk-manifest-v1";

/// A float-column CSV with its header metadata, as written or re-read.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub manifest: String,
    pub columns: Vec<(String, Vec<f64>)>,
}

/// Node-indexed table: `node` column plus named float columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TableFile {
    pub manifest: String,
    pub nodes: Vec<usize>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl SeriesFile {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# schema: {SERIES_SCHEMA}\n"));
        out.push_str(&format!("# manifest: {}\n", self.manifest));
        let names: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        let rows = self.columns.first().map_or(0, |(_, v)| v.len());
        for (name, values) in &self.columns {
            assert_eq!(values.len(), rows, "ragged column {name}");
        }
        for r in 0..rows {
            let mut row = String::new();
            for (k, (_, values)) in self.columns.iter().enumerate() {
                if k > 0 {
                    row.push(',');
                }
                row.push_str(&format!("{:e}", values[r]));
            }
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> anyhow::Result<SeriesFile> {
        let (manifest, names, rows) = split_csv(text, SERIES_SCHEMA)?;
        let mut columns: Vec<(String, Vec<f64>)> = names
            .into_iter()
            .map(|n| (n, Vec::with_capacity(rows.len())))
            .collect();
        for (lineno, row) in rows {
            let fields: Vec<&str> = row.split(',').collect();
            if fields.len() != columns.len() {
                bail!(
                    "line {lineno}: expected {} fields, found {}",
                    columns.len(),
                    fields.len()
                );
            }
            for (slot, field) in columns.iter_mut().zip(fields) {
                slot.1.push(parse_float(field, lineno)?);
            }
        }
        Ok(SeriesFile { manifest, columns })
    }
}

impl TableFile {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# schema: {TABLE_SCHEMA}\n"));
        out.push_str(&format!("# manifest: {}\n", self.manifest));
        let mut names = vec!["node".to_string()];
        names.extend(self.columns.iter().map(|(n, _)| n.clone()));
        out.push_str(&names.join(","));
        out.push('\n');
        for (name, values) in &self.columns {
            assert_eq!(values.len(), self.nodes.len(), "ragged column {name}");
        }
        for (r, node) in self.nodes.iter().enumerate() {
            let mut row = node.to_string();
            for (_, values) in &self.columns {
                row.push(',');
                row.push_str(&format!("{:e}", values[r]));
            }
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> anyhow::Result<TableFile> {
        let (manifest, mut names, rows) = split_csv(text, TABLE_SCHEMA)?;
        if names.first().map(String::as_str) != Some("node") {
            bail!("first table column must be `node`");
        }
        names.remove(0);
        let mut nodes = Vec::with_capacity(rows.len());
        let mut columns: Vec<(String, Vec<f64>)> = names
            .into_iter()
            .map(|n| (n, Vec::with_capacity(rows.len())))
            .collect();
        for (lineno, row) in rows {
            let fields: Vec<&str> = row.split(',').collect();
            if fields.len() != columns.len() + 1 {
                bail!(
                    "line {lineno}: expected {} fields, found {}",
                    columns.len() + 1,
                    fields.len()
                );
            }
            nodes.push(
                fields[0]
                    .parse::<usize>()
                    .with_context(|| format!("line {lineno}: bad node index {:?}", fields[0]))?,
            );
            for (slot, field) in columns.iter_mut().zip(&fields[1..]) {
                slot.1.push(parse_float(field, lineno)?);
            }
        }
        Ok(TableFile {
            manifest,
            nodes,
            columns,
        })
    }
}

/// Shared CSV scaffolding: schema line, manifest line, header, data rows
/// tagged with their 1-based line number.
#[allow(clippy::type_complexity)]
fn split_csv(
    text: &str,
    want_schema: &str,
) -> anyhow::Result<(String, Vec<String>, Vec<(usize, String)>)> {
    let mut lines = text.lines().enumerate();
    let schema = header_line(lines.next(), "# schema: ")?;
    if schema != want_schema {
        bail!("schema {schema:?} where {want_schema:?} was expected");
    }
    let manifest = header_line(lines.next(), "# manifest: ")?;
    let (_, header) = lines.next().context("missing column header")?;
    let names: Vec<String> = header.split(',').map(str::to_string).collect();
    let rows = lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| (i + 1, l.to_string()))
        .collect();
    Ok((manifest, names, rows))
}

fn header_line(line: Option<(usize, &str)>, prefix: &str) -> anyhow::Result<String> {
    let (_, line) = line.with_context(|| format!("missing {prefix:?} header"))?;
    line.strip_prefix(prefix)
        .map(str::to_string)
        .with_context(|| format!("expected a {prefix:?} header, found {line:?}"))
}

fn parse_float(field: &str, lineno: usize) -> anyhow::Result<f64> {
    field
        .parse::<f64>()
        .with_context(|| format!("line {lineno}: bad float {field:?}"))
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
