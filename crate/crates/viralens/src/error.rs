use std::fmt;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage an error was raised in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Read,
    Decode,
    Extract,
    Quantize,
    FoldIn,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Read => "read",
            Stage::Decode => "decode",
            Stage::Extract => "extract",
            Stage::Quantize => "quantize",
            Stage::FoldIn => "fold_in",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("manifest is missing column `{0}`")]
    MissingColumn(String),

    #[error("manifest row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("unsupported archive format_version {found} (this build reads {supported})")]
    ArchiveVersion { found: u64, supported: u64 },

    #[error("invalid archive: {0}")]
    Archive(String),

    #[error("{stage} failed: {message}")]
    Stage { stage: Stage, message: String },

    #[error("{0}")]
    Validation(String),

    #[error("document {id}: {source}")]
    Document { id: String, source: Box<Error> },

    #[error("{variant}: {source}")]
    Variant { variant: &'static str, source: Box<Error> },

    #[error(transparent)]
    Core(#[from] viralens_core::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn stage(stage: Stage, message: impl fmt::Display) -> Self {
        Error::Stage { stage, message: message.to_string() }
    }

    /// Process exit status: 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::Document { source, .. } | Error::Variant { source, .. } => source.exit_code(),
            _ => 1,
        }
    }

    /// The pipeline stage this error came from, looking through wrappers.
    pub fn pipeline_stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            Error::Document { source, .. } | Error::Variant { source, .. } => source.pipeline_stage(),
            _ => None,
        }
    }
}
