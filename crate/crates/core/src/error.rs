use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no areas given")]
    EmptyInput,
    #[error("area #{index} is {value}, areas must be positive")]
    NonPositiveArea { index: usize, value: f64 },
    #[error("area #{index} is not a finite number")]
    NonFiniteArea { index: usize },
    #[error("{n} area(s) given, at least 2 are required")]
    UnsupportedCount { n: usize },
    #[error("areas are not flat (slack {slack})")]
    NotFlat { slack: f64 },
    #[error("areas do not describe a solid polyhedron")]
    NotSolid,

    #[error("radius {radius} is below the half-length {min} of the longest link")]
    RadiusTooSmall { radius: f64, min: f64 },
    #[error("radius search did not converge (residual {residual:e})")]
    RadiusNoConvergence { residual: f64 },
    #[error("inconsistent polygon layout: {0}")]
    InternalGeometry(String),

    #[error("fold index k = {k} outside [2, {max}]")]
    BadK { k: usize, max: usize },
    #[error("vector lift failed after {attempts} attempts (seed {seed}): {reason}")]
    LiftFailed { seed: u64, attempts: usize, reason: String },

    #[error("normals and support numbers differ in length ({normals} vs {supports})")]
    LengthMismatch { normals: usize, supports: usize },
    #[error("halfspaces do not bound a region")]
    UnboundedRegion,
    #[error("halfspaces have no common interior")]
    EmptyInterior,
    #[error("volume cross-check failed: {support_sum} vs {tetra_sum}")]
    InconsistentVolume { support_sum: f64, tetra_sum: f64 },
    #[error("edge between facets {i} and {j} is degenerate (length {length:e})")]
    DegenerateCombinatorics { i: usize, j: usize, length: f64 },

    #[error("vector system is not fully equilibrated: {0}")]
    NotEquilibrated(String),
    #[error("Minkowski solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64, history: Vec<f64> },
    #[error("facet {facet} collapsed during the Minkowski solve")]
    FacetCollapse { facet: usize, history: Vec<f64> },
}
