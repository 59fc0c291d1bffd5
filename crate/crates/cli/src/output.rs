use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::error::{usage, CliResult};

/// Writes `bytes` to `out` via a temporary file and rename, or to stdout.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let Some(path) = out else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(bytes)?;
        return Ok(stdout.flush()?);
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Reads a JSON parameter file, or the default when none is given.
pub fn load_params<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = std::fs::read_to_string(path).or_else(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).or_else(|e| usage(format!("invalid parameter file {}: {e}", path.display())))
}

/// CSV writer into memory, flushed by [`finish`].
pub fn csv_writer(header: &[&str]) -> CliResult<csv::Writer<Vec<u8>>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    Ok(w)
}

pub fn finish(w: csv::Writer<Vec<u8>>) -> CliResult<Vec<u8>> {
    w.into_inner().map_err(|e| std::io::Error::other(e.to_string()).into())
}

/// Side length of a square lattice with `nodes` nodes.
pub fn lattice_side(nodes: usize) -> CliResult<usize> {
    let side = (nodes as f64).sqrt().round() as usize;
    if side < 2 || side * side != nodes {
        return usage(format!("--mesh-nodes {nodes} is not a square lattice size of at least 4"));
    }
    Ok(side)
}
