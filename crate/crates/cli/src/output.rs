//! CSV tables plus one JSON metadata sidecar per run.
//!
//! Result rows replay bit-exactly for a given config and seed: floats are
//! rendered to 12 significant digits, integers verbatim. The sidecar embeds
//! the fully resolved configuration, the CSV schema version and the wall
//! clock (the only non-reproducible field).

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// 12 significant digits; integral values print as integers.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.fract() == 0.0 && x.abs() < 1e15 {
        return format!("{}", x as i64);
    }
    format!("{x:.11e}")
}

pub struct CsvTable {
    pub name: String,
    pub schema: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, schema: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            schema: schema.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize> {
    schema_version: u32,
    command: &'a str,
    library_version: &'a str,
    config: &'a C,
    seed: u64,
    wall_clock_ms: u128,
    csv_files: Vec<SidecarCsv>,
}

#[derive(Serialize)]
struct SidecarCsv {
    file: String,
    schema: String,
    columns: Vec<String>,
    rows: usize,
}

/// Writes every table as `<out>/<name>.csv` and the sidecar as
/// `<out>/<command>.meta.json`; returns the paths written.
pub fn write_run<C: Serialize>(
    out_dir: &Path,
    command: &str,
    config: &C,
    seed: u64,
    wall_clock_ms: u128,
    tables: &[CsvTable],
) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Other(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    let mut csv_files = Vec::new();
    for table in tables {
        let path = out_dir.join(format!("{}.csv", table.name));
        std::fs::write(&path, table.render())
            .map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))?;
        csv_files.push(SidecarCsv {
            file: format!("{}.csv", table.name),
            schema: table.schema.clone(),
            columns: table.header.clone(),
            rows: table.rows.len(),
        });
        written.push(path);
    }
    let sidecar = Sidecar {
        schema_version: 1,
        command,
        library_version: env!("CARGO_PKG_VERSION"),
        config,
        seed,
        wall_clock_ms,
        csv_files,
    };
    let path = out_dir.join(format!("{command}.meta.json"));
    let json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| CliError::Other(format!("sidecar: {e}")))?;
    std::fs::write(&path, json)
        .map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_stable() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(3.0), "3");
        assert_eq!(fmt_f64(-17.0), "-17");
        assert_eq!(fmt_f64(0.875), "8.75000000000e-1");
        assert_eq!(fmt_f64(1.2311319), "1.23113190000e0");
    }
}
