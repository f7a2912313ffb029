//! Exit-code-aware error wrapper and atomic file output.

use sha2::{Digest, Sha256};
use std::path::Path;
use vbpbb_core::ErrorCategory;

/// CLI-level error carrying the process exit code (2 data, 3 config).
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn data(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 3,
        }
    }
}

impl From<vbpbb_core::Error> for CliError {
    fn from(e: vbpbb_core::Error) -> Self {
        let code = match e.category() {
            ErrorCategory::Data => 2,
            ErrorCategory::Config => 3,
        };
        Self {
            message: e.to_string(),
            code,
        }
    }
}

/// Write via a temp file in the target directory plus rename, so failures
/// leave no partial output behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::data(format!("invalid output path {}", path.display())))?;
    let tmp_name = format!(".{}.tmp-{}", file_name.to_string_lossy(), std::process::id());
    let tmp_path = match dir {
        Some(d) => d.join(&tmp_name),
        None => tmp_name.clone().into(),
    };
    let write = || -> std::io::Result<()> {
        std::fs::write(&tmp_path, bytes)?;
        std::fs::rename(&tmp_path, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp_path);
        CliError::data(format!("cannot write {}: {e}", path.display()))
    })
}

/// Hex SHA-256 of a byte buffer; used as the dataset digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
