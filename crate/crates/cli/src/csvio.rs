//! CSV emission and parsing. All files share one shape: '#'-prefixed
//! metadata lines, one header line, then comma-separated data rows with
//! floats printed to 17 significant digits so that every value survives a
//! round trip bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// A float formatted losslessly for CSV output.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// A parsed CSV file: metadata (without the leading `# `), header names and
/// raw string fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvData {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvData {
    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// A whole column parsed as floats.
    pub fn floats(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        self.rows.iter().map(|r| r.get(i)?.parse().ok()).collect()
    }
}

/// Writes metadata, header and rows to `path`.
pub fn write_csv(
    path: &Path,
    meta: &[String],
    header: &[&str],
    rows: &[Vec<String>],
) -> io::Result<()> {
    let mut out = String::new();
    for m in meta {
        writeln!(out, "# {m}").unwrap();
    }
    writeln!(out, "{}", header.join(",")).unwrap();
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    fs::write(path, out)
}

/// Reads a CSV file produced by [`write_csv`].
pub fn read_csv(path: &Path) -> io::Result<CsvData> {
    let text = fs::read_to_string(path)?;
    let mut meta = Vec::new();
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            meta.push(rest.trim_start().to_string());
        } else if header.is_empty() {
            header = line.split(',').map(str::to_string).collect();
        } else if !line.is_empty() {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    if header.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "missing CSV header"));
    }
    Ok(CsvData { meta, header, rows })
}
