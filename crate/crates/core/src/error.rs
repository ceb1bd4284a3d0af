use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated body: header declares {expected} records, found {found}")]
    TruncatedBody { expected: usize, found: usize },
    #[error("unsupported property: {0}")]
    UnsupportedProperty(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("malformed record {record}: {reason}")]
    MalformedRecord { record: usize, reason: String },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("cloud resolution must be positive and finite, got {0}")]
    InvalidResolution(f64),
    #[error("voxel leaf size must be positive, got {0}")]
    NonPositiveLeaf(f64),
    #[error("invalid rigid transform: {0}")]
    InvalidTransform(String),
    #[error("noise sigma must be non-negative, got {0}")]
    NegativeSigma(f64),
    #[error("search radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("index {index} out of range for cloud of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("spatial index was built over {expected} points but the cloud has {found}")]
    IndexMismatch { expected: usize, found: usize },
    #[error("neighborhood is empty")]
    EmptyNeighborhood,
    #[error("cloud carries no color; use the geometry-only mode")]
    NoColor,
    #[error("invalid detector parameters: {0}")]
    InvalidParams(String),
    #[error("saliency fields are not index-aligned or thresholds do not match fields")]
    MisalignedFields,
    #[error("keypoint count {count} out of range 1..={len}")]
    CountOutOfRange { count: usize, len: usize },
    #[error("invalid scene spec: {0}")]
    InvalidSpec(String),
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
