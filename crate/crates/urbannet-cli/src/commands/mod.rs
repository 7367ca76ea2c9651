pub mod ablate;
pub mod eval;
pub mod generate;
pub mod inspect;
pub mod lift;
pub mod render;

use std::path::Path;

use crate::CliError;

/// Atomic write with data-level error mapping.
pub fn write_output(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
        }
    }
    urbannet::io::write_atomic(path, contents)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Load a dataset directory, mapping failures to data errors.
pub fn load_dataset(dir: &Path) -> Result<Vec<urbannet::synth::SceneFiles>, CliError> {
    urbannet::synth::read_dataset(dir).map_err(|e| CliError::Data(e.to_string()))
}
