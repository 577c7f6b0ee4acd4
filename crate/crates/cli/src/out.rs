//! Deterministic CSV emission: comma separators, a header row, LF line
//! endings, floats printed with 17 significant digits. Identical inputs
//! produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// 17 significant digits round-trip any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct CsvWriter {
    file: std::io::BufWriter<fs::File>,
    columns: usize,
    path: PathBuf,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> CliResult<Self> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let file = fs::File::create(path)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
        let mut writer = Self {
            file: std::io::BufWriter::new(file),
            columns: header.len(),
            path: path.to_path_buf(),
        };
        writer.raw_row(header)?;
        Ok(writer)
    }

    pub fn row(&mut self, fields: &[String]) -> CliResult<()> {
        let borrowed: Vec<&str> = fields.iter().map(String::as_str).collect();
        self.raw_row(&borrowed)
    }

    fn raw_row(&mut self, fields: &[&str]) -> CliResult<()> {
        debug_assert_eq!(fields.len(), self.columns, "{}", self.path.display());
        let mut line = fields.join(",");
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<PathBuf> {
        self.file.flush()?;
        Ok(self.path)
    }
}

/// Resolve the output directory: `--out` flag, else `VFCB_OUT_DIR`, else
/// `./out`.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("VFCB_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_17_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        let v = std::f64::consts::PI * 1e-7;
        let parsed: f64 = fmt_f64(v).parse().unwrap();
        assert_eq!(parsed.to_bits(), v.to_bits());
    }
}
