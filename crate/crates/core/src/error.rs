use thiserror::Error;

/// Errors raised by the geometric, combinatorial and lattice operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero homology class has no phase")]
    ZeroClass,

    #[error("invalid lattice basis: determinant {0} must be positive")]
    DegenerateBasis(f64),

    #[error("phase lift {lift} is not a lift of the class argument {argument}")]
    InconsistentLift { lift: f64, argument: f64 },

    #[error("curve needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("edge {0} has zero length")]
    ZeroLengthEdge(usize),

    #[error("edges {0} and {1} reverse direction")]
    ReversedEdge(usize, usize),

    #[error("refinement required: tangent turns by {turn} rad at vertex {vertex}")]
    RefinementRequired { vertex: usize, turn: f64 },

    #[error("curve has Maslov index {0}; phase is not gradeable")]
    NotGradeable(i64),

    #[error("history mismatch at step {step}: {reason}")]
    CorrespondenceMismatch { step: usize, reason: String },

    #[error("resample required: edge {edge} has length {length} below guard {guard}")]
    ResampleRequired { edge: usize, length: f64, guard: f64 },

    #[error("time step {dt} exceeds stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("clean/parallel intersection between edge {0} and edge {1}: not supported")]
    ParallelIntersection(usize, usize),

    #[error("curves do not intersect")]
    NoIntersection,

    #[error("graded sum does not exist: phase window fails at intersection {point} (phi1 = {phi1}, phi2 = {phi2})")]
    GradedSumDoesNotExist { point: usize, phi1: f64, phi2: f64 },

    #[error("necks too large: radius {radius} must stay below {limit}")]
    NecksTooLarge { radius: f64, limit: f64 },

    #[error("expected {expected} neck scales, got {got}")]
    NeckCount { expected: usize, got: usize },

    #[error("neck scales must be positive and finite")]
    InvalidNeckScale,

    #[error("empty intersection list")]
    EmptyIntersections,

    #[error("search bound {bound} is below the class size {needed}")]
    BoundTooSmall { bound: i64, needed: i64 },

    #[error("pairing matrix: {0}")]
    InvalidPairing(String),

    #[error("generator {0} is not spherical")]
    NonSpherical(usize),

    #[error("generator index {0} out of range")]
    UnknownGenerator(usize),

    #[error("vector length {got} does not match lattice rank {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("not reducible: {0}")]
    NotReducible(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("family path passes through 0 at sample {0}")]
    PathThroughZero(usize),

    #[error("family path undersampled: phase jumps {jump} rad between samples {index} and {next}", next = .index + 1)]
    Undersampled { index: usize, jump: f64 },

    #[error("unnormalized orientation ({p}, {q}): shift the grading first")]
    UnnormalizedOrientation { p: i64, q: i64 },

    #[error("mirror dictionary requires the unit square lattice with alpha = 0")]
    NonStandardGeometry,

    #[error("dimension parity must be 2 or 3, got {0}")]
    BadDimension(u32),

    #[error("degenerate Mukai vector input")]
    DegenerateVector,

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
