//! Deterministic CSV and metadata emission.
//!
//! Floats are written with Rust's shortest round-trip formatting: distinct
//! values always produce distinct text, any value can be recovered exactly,
//! and identical runs produce byte-identical files. Writes go through a
//! temporary file in the target directory followed by a rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Shortest text that parses back to exactly this value.
pub fn fmt_f64(value: f64) -> String {
    format!("{value}")
}

fn quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Writes a rectangular table as CSV with LF line endings, atomically.
pub fn emit_csv(headers: &[&str], rows: &[Vec<String>], path: &Path) -> std::io::Result<()> {
    let mut text = String::new();
    text.push_str(
        &headers
            .iter()
            .map(|h| quote(h))
            .collect::<Vec<_>>()
            .join(","),
    );
    text.push('\n');
    for (idx, row) in rows.iter().enumerate() {
        assert_eq!(
            row.len(),
            headers.len(),
            "row {idx} has {} fields, header has {}",
            row.len(),
            headers.len()
        );
        text.push_str(&row.iter().map(|f| quote(f)).collect::<Vec<_>>().join(","));
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

/// Key-value metadata sidecar in the flat config syntax; entries are written
/// in the given order so the output is byte-stable.
pub fn emit_metadata(entries: &[(String, String)], path: &Path) -> std::io::Result<()> {
    let mut text = String::new();
    for (key, value) in entries {
        text.push_str(&format!("{key} = {value}\n"));
    }
    write_atomic(path, text.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp: PathBuf = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Sidecar path convention: `<output>.meta` next to the file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta");
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        emit_csv(&["a", "b"], &[], &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "a,b\n");
    }

    #[test]
    fn single_cell_full_precision() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.csv");
        emit_csv(&["col"], &[vec![fmt_f64(0.5)]], &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "col\n0.5\n");
    }

    #[test]
    fn floats_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::f64::consts::PI] {
            let text = fmt_f64(v);
            assert_eq!(text.parse::<f64>().unwrap(), v, "text {text}");
        }
    }

    #[test]
    fn rerun_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("again.csv");
        let rows = vec![vec![fmt_f64(1.0 / 7.0), "x".to_string()]];
        emit_csv(&["v", "tag"], &rows, &path).unwrap();
        let first = fs::read(&path).unwrap();
        emit_csv(&["v", "tag"], &rows, &path).unwrap();
        assert_eq!(first, fs::read(&path).unwrap());
    }
}
