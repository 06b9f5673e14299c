use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

/// Pipeline stage an error surfaced in; used to tag CLI messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Split,
    Depth,
    Features,
    Fit,
    Classify,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Split => "split",
            Stage::Depth => "depth",
            Stage::Features => "features",
            Stage::Fit => "fit",
            Stage::Classify => "classify",
            Stage::Output => "output",
        })
    }
}

fn at(path: &Option<PathBuf>) -> String {
    path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default()
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: malformed image at byte {offset}: {reason}", path.display())]
    Decode {
        path: PathBuf,
        offset: usize,
        reason: String,
    },
    #[error("{}: unsupported image format: {reason}", path.display())]
    Unsupported { path: PathBuf, reason: String },
    #[error("{}: no images found", path.display())]
    EmptyClass { path: PathBuf },
    #[error("{}: no class directories found", path.display())]
    EmptyDatabase { path: PathBuf },
    #[error("{}: image is {}x{}, database images are {}x{}", path.display(), actual.0, actual.1, expected.0, expected.1)]
    ExtentMismatch {
        path: PathBuf,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("invalid split: {0}")]
    Split(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("model file line {line}: {message}")]
    Model { line: usize, message: String },
    #[error("{}{source}", at(path))]
    Core {
        path: Option<PathBuf>,
        #[source]
        source: facerec_core::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub(crate) fn core(path: Option<&Path>, source: facerec_core::Error) -> Self {
        Error::Core {
            path: path.map(Path::to_path_buf),
            source,
        }
    }

    /// Tags the error with a stage unless it already carries one.
    pub fn in_stage(self, stage: Stage) -> Self {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

impl From<facerec_core::Error> for Error {
    fn from(e: facerec_core::Error) -> Self {
        Error::core(None, e)
    }
}
