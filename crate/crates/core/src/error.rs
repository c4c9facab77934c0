use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point is not on the unit sphere (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("tangent direction has norm {norm}, expected 1")]
    NonUnitDirection { norm: f64 },

    #[error("tangent direction is not orthogonal to its base point (inner product {dot})")]
    NotTangent { dot: f64 },

    #[error("direction undefined: points are equal or antipodal")]
    UndefinedDirection,

    #[error("point lies within {distance:e} of the projection pole")]
    NearPole { distance: f64 },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid shape mismatch: expected {expected} samples, found {found}")]
    GridShape { expected: usize, found: usize },

    #[error("resolution too coarse: {0}")]
    TooCoarse(String),

    #[error("degenerate metric at (u, v) = ({u:.6}, {v:.6}): det g = {det:e}")]
    DegenerateMetric { u: f64, v: f64, det: f64 },

    #[error("malformed grid file, line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("grid file line {row} (i = {i}, j = {j}) has norm {norm}, expected 1")]
    NonUnitRow {
        row: usize,
        i: usize,
        j: usize,
        norm: f64,
    },

    #[error("wrong topology: {0}")]
    Topology(String),

    #[error("sets are not disjoint (closest samples {distance:e} apart)")]
    NotDisjoint { distance: f64 },

    #[error("empty point set")]
    EmptySet,

    #[error("no admissible projection pole (best clearance {clearance:.4})")]
    NoAdmissiblePole { clearance: f64 },

    #[error("linking integral {raw:.6} is not within 0.1 of an integer; raise the resolution")]
    NonIntegerLinking { raw: f64 },

    #[error("initial configuration is unlinked")]
    Unlinked,

    #[error("shortest-path graph is disconnected")]
    Disconnected,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
