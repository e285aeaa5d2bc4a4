use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamped into every output file.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Meta {
    pub fn new(command: &str, config: &serde_json::Value, seed: u64) -> Self {
        // serde_json maps are sorted, so this is a canonical form
        let canonical = serde_json::to_string(config).expect("JSON values serialize");
        Self {
            tool: "solitonic",
            version: VERSION,
            command: command.to_string(),
            config_sha256: hex::encode(Sha256::digest(canonical.as_bytes())),
            seed,
        }
    }

    pub fn csv_header(&self) -> String {
        format!(
            "# tool={} version={} command={} config_sha256={} seed={}\n",
            self.tool, self.version, self.command, self.config_sha256, self.seed
        )
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    meta: &'a Meta,
    report: &'a T,
}

pub fn json_document<T: Serialize>(meta: &Meta, report: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope { meta, report }).expect("reports serialize");
    s.push('\n');
    s
}

/// CSV text with a leading `#` provenance line.
pub fn csv_document(meta: &Meta, body: &str) -> String {
    meta.csv_header() + body
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Path of the CSV companion of a JSON output.
pub fn companion_csv(path: &Path) -> PathBuf {
    let p = path.with_extension("csv");
    if p == path {
        path.with_extension("grid.csv")
    } else {
        p
    }
}
