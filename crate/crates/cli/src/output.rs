use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliResult;

/// CSV writer with a header row; floats use Rust's shortest round-trip
/// formatting so downstream diffs are stable.
pub struct CsvWriter {
    file: std::io::BufWriter<std::fs::File>,
    columns: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> CliResult<CsvWriter> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(file, "{}", header.join(","))?;
        Ok(CsvWriter {
            file,
            columns: header.len(),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> CliResult<()> {
        debug_assert_eq!(fields.len(), self.columns);
        writeln!(self.file, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.file.flush()?;
        Ok(())
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(file, value).map_err(std::io::Error::from)?;
    Ok(())
}

pub fn ensure_out_dir(out_dir: &Path) -> CliResult<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    Ok(out_dir.to_path_buf())
}
