//! Crate-wide error type.
//!
//! One enum covers the whole pipeline. Variants that correspond to bad
//! evaluation inputs (as opposed to bad invocations) are distinguished via
//! [`Error::exit_code`] so the CLI can report them differently.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("pixel buffer length {got} does not match {width}x{height}")]
    BadBufferLength {
        width: usize,
        height: usize,
        got: usize,
    },

    #[error("slice index {index} out of range for axis {axis} (extent {extent})")]
    SliceIndex {
        axis: &'static str,
        index: usize,
        extent: usize,
    },

    #[error("cannot decode {path}: {reason}")]
    ImageDecode { path: PathBuf, reason: String },

    #[error("{path}: expected 8- or 16-bit grayscale, got {format}")]
    NonGrayscale { path: PathBuf, format: String },

    #[error("malformed NIfTI header at byte offset {offset}: {reason}")]
    NiftiHeader { offset: usize, reason: String },

    #[error("unsupported dimensionality: NIfTI dim[0] = {0}, only 3-D volumes are handled")]
    UnsupportedDimensionality(i16),

    #[error("unsupported NIfTI datatype code {0} (supported: 2 = uint8, 4 = int16, 16 = float32)")]
    UnsupportedDatatype(i16),

    #[error("no loadable slices in {0}")]
    EmptyVolumeDir(PathBuf),

    #[error(
        "spectrum breaks conjugate symmetry at bin ({x}, {y}): residual {residual:.3e} \
         exceeds {tol:.3e}; inverse transform would not be real"
    )]
    HermitianViolation {
        x: usize,
        y: usize,
        residual: f64,
        tol: f64,
    },

    #[error("image too small to place circles ({width}x{height})")]
    ImageTooSmall { width: usize, height: usize },

    #[error("circles overlap or extend past the image border")]
    BadCircleLayout,

    #[error("no foreground: could not place any region on brain tissue")]
    NoForeground,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate box: {0}")]
    DegenerateBox(String),

    #[error("undefined recall: ground truth contains no boxes")]
    NoGroundTruth,

    #[error("degenerate sample: differences have zero variance")]
    DegenerateSample,

    #[error("paired inputs differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least {need} paired values, got {got}")]
    SampleTooSmall { need: usize, got: usize },

    #[error("manifest {path} line {line}: {reason}")]
    ManifestLine {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("manifest {path}: {reason}")]
    ManifestInvalid { path: PathBuf, reason: String },

    #[error("bin \"{bin}\" starved: no accepted sample in {attempts} consecutive attempts")]
    BinStarved { bin: String, attempts: u64 },

    #[error("detection file {path}: {reason}")]
    DetectionFile { path: PathBuf, reason: String },

    #[error("detection file references unknown image id(s): {}", ids.join(", "))]
    UnresolvedImageId { ids: Vec<String> },

    #[error("missing corrections for sample(s): {}", ids.join(", "))]
    MissingCorrections { ids: Vec<String> },

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Other(String),
}

impl Error {
    /// Process exit code the `forge` binary maps this error to.
    ///
    /// Evaluation-level failures (an external system handed us incomplete or
    /// inconsistent predictions) exit 1; usage, config and i/o problems
    /// exit 2. Success is 0.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingCorrections { .. }
            | Error::UnresolvedImageId { .. }
            | Error::NoGroundTruth => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
