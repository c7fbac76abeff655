//! CSV artifacts with a `#` metadata header.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Full double precision: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV file: metadata lines, a header row, data rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// Appended to the output stem, e.g. `"_summary"`; empty for the main file.
    pub suffix: &'static str,
    pub meta: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Artifact {
    pub fn new(suffix: &'static str, header: Vec<&'static str>) -> Self {
        Artifact {
            suffix,
            meta: Vec::new(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Header block plus RFC-4180 body.
    pub fn render(&self) -> Result<String, CliError> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = write!(out, "# {k}: {}\r\n", v.replace('\n', " "));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let body = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn path_for(&self, main: &Path) -> PathBuf {
        if self.suffix.is_empty() {
            return main.to_path_buf();
        }
        let stem = main.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
        let ext = main.extension().and_then(|s| s.to_str()).unwrap_or("csv");
        main.with_file_name(format!("{stem}{}.{ext}", self.suffix))
    }

    pub fn write(&self, main: &Path) -> Result<PathBuf, CliError> {
        let path = self.path_for(main);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, self.render()?)?;
        Ok(path)
    }
}
