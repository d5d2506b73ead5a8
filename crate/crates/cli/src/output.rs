//! CSV and JSON writers. Nothing here depends on the clock or the thread count.

use std::fs;
use std::path::{Path, PathBuf};

use bcurrent::quadrature::DiagnosticRow;
use bcurrent::{Sample, C};
use serde::Serialize;

use crate::CliError;

pub const TOOL: &str = "bcurrent";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<C<f64>> for Complex {
    fn from(z: C<f64>) -> Self {
        Complex { re: z.re, im: z.im }
    }
}

/// Shortest round-trip representation, so equal values print equal bytes.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        fs::write(&p, text).map_err(|e| CliError::io(&p, e))?;
        Ok(p)
    }

    pub fn write_json<R: Serialize>(&self, name: &str, report: &R) -> Result<PathBuf, CliError> {
        let mut s = serde_json::to_string_pretty(report).expect("report serializes");
        s.push('\n');
        self.write_text(name, &s)
    }

    /// A `# tool version` comment line, then a header and rows.
    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let p = self.path(name);
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(header).map_err(|e| CliError::other(e.to_string()))?;
        for r in rows {
            w.write_record(r).map_err(|e| CliError::other(e.to_string()))?;
        }
        let body = w.into_inner().map_err(|e| CliError::other(e.to_string()))?;
        let mut text = format!("# {TOOL} {VERSION}\n").into_bytes();
        text.extend_from_slice(&body);
        fs::write(&p, text).map_err(|e| CliError::io(&p, e))?;
        Ok(p)
    }

    pub fn write_samples(&self, name: &str, samples: &[Sample]) -> Result<PathBuf, CliError> {
        let rows: Vec<Vec<String>> =
            samples.iter().map(|s| vec![num(s.epsilon), num(s.value.re), num(s.value.im), num(s.err_est)]).collect();
        self.write_csv(name, &["epsilon", "re", "im", "err_est"], &rows)
    }

    pub fn write_diagnostics(&self, name: &str, traces: &[(f64, Vec<DiagnosticRow>)]) -> Result<PathBuf, CliError> {
        let rows: Vec<Vec<String>> = traces
            .iter()
            .flat_map(|(eps, rows)| {
                rows.iter().map(move |r| vec![num(*eps), r.cells.to_string(), num(r.re), num(r.im), num(r.err_est)])
            })
            .collect();
        self.write_csv(name, &["epsilon", "cells", "re", "im", "err_est"], &rows)
    }
}

/// Lines of a CSV file with comment lines removed.
pub fn csv_body(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -1.9173, 1e-300, 4.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn body_drops_comments() {
        assert_eq!(csv_body("# v\na,b\n1,2\n"), "a,b\n1,2\n");
    }
}
