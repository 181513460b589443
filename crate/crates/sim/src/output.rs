//! CSV, text and manifest output with SHA-256 checksums.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::GhzParams;
use crate::error::{Result, SimError};

/// Twelve significant digits in scientific notation. Fixed formatting
/// keeps reruns byte-identical.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        // Avoid a distinct "-0" column entry.
        return "0.00000000000e0".to_owned();
    }
    format!("{x:.11e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Serializes columns as CSV with a header row and LF line endings.
pub fn csv_bytes(header: &[&str], columns: &[&[f64]]) -> Result<Vec<u8>> {
    if header.len() != columns.len() {
        return Err(SimError::config("CSV header and column counts differ"));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(SimError::config("CSV columns have different lengths"));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| format_number(c[i])))?;
    }
    w.into_inner().map_err(|e| SimError::io("<csv buffer>", e.into_error()))
}

/// One emitted file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Index of a run's artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub parameters: GhzParams,
    pub seed: u64,
    pub files: Vec<ManifestEntry>,
    /// Scalar results worth reading without opening the CSVs.
    pub summary: BTreeMap<String, f64>,
}

/// Writes files into one directory and remembers their checksums.
#[derive(Debug)]
pub struct ArtifactWriter {
    dir: PathBuf,
    files: Vec<ManifestEntry>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[ManifestEntry] {
        &self.files
    }

    pub fn bytes(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| SimError::io(&path, e))?;
        self.files.push(ManifestEntry {
            path: name.to_owned(),
            sha256: sha256_hex(contents),
            bytes: contents.len() as u64,
        });
        Ok(path)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], columns: &[&[f64]]) -> Result<PathBuf> {
        let data = csv_bytes(header, columns)?;
        self.bytes(name, &data)
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        self.bytes(name, contents.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.text(name, &s)
    }

    /// Writes `manifest_name` listing every file written so far. The
    /// manifest does not list itself.
    pub fn finish(
        self,
        manifest_name: &str,
        command: &str,
        parameters: GhzParams,
        seed: u64,
        summary: BTreeMap<String, f64>,
    ) -> Result<Manifest> {
        let manifest = Manifest { command: command.to_owned(), parameters, seed, files: self.files, summary };
        let path = self.dir.join(manifest_name);
        let mut s = serde_json::to_string_pretty(&manifest)?;
        s.push('\n');
        std::fs::write(&path, s).map_err(|e| SimError::io(&path, e))?;
        Ok(manifest)
    }
}

/// Reads a manifest and returns the files whose contents no longer match
/// their recorded checksum (or are missing).
pub fn verify_manifest(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    Ok(manifest
        .files
        .iter()
        .filter(|f| match std::fs::read(dir.join(&f.path)) {
            Ok(bytes) => sha256_hex(&bytes) != f.sha256,
            Err(_) => true,
        })
        .map(|f| f.path.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_twelve_significant_digits() {
        assert_eq!(format_number(0.8267195767195767), "8.26719576720e-1");
        assert_eq!(format_number(-0.0), "0.00000000000e0");
        assert_eq!(format_number(1.5e10), "1.50000000000e10");
    }

    #[test]
    fn csv_layout() {
        let bytes = csv_bytes(&["t_ns", "p"], &[&[0.0, 1.0], &[0.5, 0.25]]).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text, "t_ns,p\n0.00000000000e0,5.00000000000e-1\n1.00000000000e0,2.50000000000e-1\n");
        assert!(csv_bytes(&["a"], &[&[1.0], &[2.0]]).is_err());
    }
}
