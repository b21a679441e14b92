//! CSV output. Files are written to a temporary sibling and renamed into
//! place, so readers never observe a partial file.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

/// Shortest-round-trip-safe rendering: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `header` and `rows` to `dir/name`, replacing any existing file.
pub fn write_csv<I>(dir: &Path, name: &str, header: &[&str], rows: I) -> std::io::Result<PathBuf>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    write_atomic(dir, name, &bytes)
}

/// Appends `rows` to `dir/name`, writing `header` first if the file is new.
pub fn append_csv<I>(dir: &Path, name: &str, header: &[&str], rows: I) -> std::io::Result<PathBuf>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let path = dir.join(name);
    let mut bytes = match std::fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e),
    };
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    if bytes.is_empty() {
        writer.write_record(header)?;
    }
    for row in rows {
        writer.write_record(&row)?;
    }
    bytes.extend(writer.into_inner().map_err(|e| e.into_error())?);
    write_atomic(dir, name, &bytes)
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| e.error)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn append_writes_header_once() {
        let dir = tempfile::tempdir().unwrap();
        for i in 0..2 {
            append_csv(dir.path(), "a.csv", &["x", "y"], [vec![i.to_string(), "z".into()]]).unwrap();
        }
        let text = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
        assert_eq!(text, "x,y\n0,z\n1,z\n");
    }
}
