//! Small shared helpers for the on-disk text formats: versioned headers,
//! atomic writes and line-oriented parsing.
//!
//! Every format starts with a `# urbannet-<kind> v<major>` header line.
//! Readers reject unknown kinds and unknown major versions.

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: missing or malformed header (expected '# urbannet-{kind} v<major>')")]
    MissingHeader { path: String, kind: String },
    #[error("{path}: unsupported {kind} format version {found} (supported: {supported})")]
    Version {
        path: String,
        kind: String,
        found: u32,
        supported: u32,
    },
}

impl FormatError {
    pub fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        FormatError::Parse {
            path: path.display().to_string(),
            line,
            msg: msg.into(),
        }
    }
}

/// Write `contents` to `path` atomically (temp file + rename in the same
/// directory), so readers never observe partial files.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile_path(dir, path);
    // Regenerate on the unlikely collision with a leftover temp file.
    while tmp.exists() {
        tmp = tempfile_path(dir, &tmp);
    }
    let mut f = fs::File::create(&tmp)?;
    f.write_all(contents)?;
    f.sync_all()?;
    drop(f);
    match fs::rename(&tmp, path) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn tempfile_path(dir: &Path, stem_of: &Path) -> std::path::PathBuf {
    let stem = stem_of
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    dir.join(format!(".{stem}.tmp"))
}

pub fn header_line(kind: &str, major: u32) -> String {
    format!("# urbannet-{kind} v{major}")
}

/// Check the first line of a file against the expected kind and major
/// version. Returns the parsed major version.
pub fn check_header(
    path: &Path,
    first_line: Option<&str>,
    kind: &str,
    supported_major: u32,
) -> Result<u32, FormatError> {
    let missing = || FormatError::MissingHeader {
        path: path.display().to_string(),
        kind: kind.to_string(),
    };
    let line = first_line.ok_or_else(missing)?.trim();
    let prefix = format!("# urbannet-{kind} v");
    let rest = line.strip_prefix(&prefix).ok_or_else(missing)?;
    let major: u32 = rest.parse().map_err(|_| missing())?;
    if major != supported_major {
        return Err(FormatError::Version {
            path: path.display().to_string(),
            kind: kind.to_string(),
            found: major,
            supported: supported_major,
        });
    }
    Ok(major)
}

/// Iterate non-empty, non-comment lines with their 1-based line numbers.
/// The header line (line 1) is expected to be consumed by `check_header`.
pub fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_f64(path: &Path, line: usize, tok: &str) -> Result<f64, FormatError> {
    tok.parse::<f64>()
        .map_err(|_| FormatError::parse(path, line, format!("expected a number, got '{tok}'")))
}

pub fn parse_usize(path: &Path, line: usize, tok: &str) -> Result<usize, FormatError> {
    tok.parse::<usize>()
        .map_err(|_| FormatError::parse(path, line, format!("expected an index, got '{tok}'")))
}
