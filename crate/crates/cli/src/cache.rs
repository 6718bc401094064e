//! On-disk cache of the resolved wiring convention.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tetra_core::network::resolve_convention;
use tetra_core::Convention;

/// Bump when anything that influences resolution changes.
pub const CACHE_KEY: &str = concat!("tetra ", env!("CARGO_PKG_VERSION"), " probe 4");

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    convention: Convention,
}

pub fn default_path() -> PathBuf {
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .unwrap_or_else(std::env::temp_dir);
    base.join("tetra").join("convention.json")
}

fn read(path: &Path) -> Option<Convention> {
    let text = fs::read_to_string(path).ok()?;
    let entry: Entry = serde_json::from_str(&text).ok()?;
    (entry.key == CACHE_KEY).then_some(entry.convention)
}

fn write(path: &Path, convention: Convention) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let entry = Entry { key: CACHE_KEY.to_string(), convention };
    fs::write(path, serde_json::to_string_pretty(&entry)? + "\n")
}

/// Cached convention if the key matches, otherwise a fresh resolution
/// (written back unless `path` is `None`).
pub fn convention(path: Option<&Path>) -> anyhow::Result<Convention> {
    if let Some(c) = path.and_then(read) {
        return Ok(c);
    }
    let conv = resolve_convention(4)?;
    if let Some(p) = path {
        if let Err(e) = write(p, conv) {
            eprintln!("warning: could not write convention cache {}: {e}", p.display());
        }
    }
    Ok(conv)
}
