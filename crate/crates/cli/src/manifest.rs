use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::CliError;
use crate::config::Resolved;

#[derive(Debug, Serialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub inputs: Vec<InputFile>,
    pub config: &'a Resolved,
    pub outputs: Vec<PathBuf>,
    pub version: &'static str,
    pub timestamp: String,
}

pub fn hash_file(path: &Path) -> Result<InputFile, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(InputFile {
        path: path.to_path_buf(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

pub fn write(command: &str, inputs: &[PathBuf], config: &Resolved, outputs: Vec<PathBuf>) -> Result<PathBuf, CliError> {
    let manifest = RunManifest {
        command,
        inputs: inputs.iter().map(|p| hash_file(p)).collect::<Result<_, _>>()?,
        config,
        outputs,
        version: env!("CARGO_PKG_VERSION"),
        timestamp: chrono::Utc::now().to_rfc3339(),
    };
    let path = config.out.join("manifest.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n",
    )?;
    Ok(path)
}
