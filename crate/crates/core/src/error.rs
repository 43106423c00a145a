//! One error type for the whole crate. Pipeline stages feed each other, so a
//! single enum keeps composition and exit-code mapping straightforward.

use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two vectors that must share a length do not.
    LengthMismatch { left: usize, right: usize },
    /// Two lens points with different `q` (or a config/data `q` clash).
    ModulusMismatch { left: u32, right: u32 },
    /// `q` must be prime (and at least 2).
    NotPrime(u32),
    /// Eigendecomposition input is not square.
    NonSquare { rows: usize, cols: usize },
    /// Jacobi sweeps failed to drive the off-diagonal mass to zero.
    NoConvergence,
    /// A distance matrix is not symmetric / has a nonzero diagonal entry.
    AsymmetricInput { i: usize, j: usize },
    /// A parameter is outside its documented domain.
    InvalidParameter(&'static str),
    /// A point that must lie in the closed unit disc does not.
    PointOutsideDisc { index: usize },
    /// A point that must lie on the unit sphere (within tolerance) does not.
    NotUnit,
    /// Requested more landmarks than there are points, or zero.
    BadLandmarkCount { requested: usize, available: usize },
    /// Landmark seed index out of range or repeated.
    BadSeedIndex(usize),
    /// Diagram has no pair suitable for the requested operation.
    EmptyDiagram,
    /// No class with `death > 2 * birth` exists in the degree-1 diagram.
    NoAdmissibleClass,
    /// A point is not within `epsilon` of any landmark.
    Uncovered,
    /// Several points are not within `epsilon` of any landmark.
    CoverageFailure { uncovered: Vec<usize> },
    /// The cocycle value on a needed landmark pair is undefined at this scale.
    MissingEdge { j: usize, k: usize },
    /// Projection of a point that lies in the span of the removed direction.
    DegenerateProjection,
    /// An operation needs at least one input point.
    EmptyCloud,
    /// Neighborhood graph is not connected; carries the component count.
    DisconnectedGraph { components: usize },
    /// A filtered complex is malformed (missing face, unsorted, bad vertex).
    InvalidComplex(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::ModulusMismatch { left, right } => {
                write!(f, "modulus mismatch: q={left} vs q={right}")
            }
            Error::NotPrime(q) => write!(f, "q={q} is not prime"),
            Error::NonSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Error::NoConvergence => write!(f, "eigendecomposition did not converge"),
            Error::AsymmetricInput { i, j } => {
                write!(f, "distance matrix invalid at ({i},{j})")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::PointOutsideDisc { index } => {
                write!(f, "point {index} lies outside the closed unit disc")
            }
            Error::NotUnit => write!(f, "point is not on the unit sphere"),
            Error::BadLandmarkCount {
                requested,
                available,
            } => write!(f, "cannot choose {requested} landmarks from {available} points"),
            Error::BadSeedIndex(i) => write!(f, "bad landmark seed index {i}"),
            Error::EmptyDiagram => write!(f, "diagram has no usable pair"),
            Error::NoAdmissibleClass => {
                write!(f, "no degree-1 class with death > 2*birth")
            }
            Error::Uncovered => {
                write!(f, "point is not covered by any landmark ball")
            }
            Error::CoverageFailure { uncovered } => write!(
                f,
                "{} points not covered by the landmark balls (first: {:?})",
                uncovered.len(),
                uncovered.first()
            ),
            Error::MissingEdge { j, k } => write!(
                f,
                "cocycle value undefined on landmark pair ({j},{k}) at this scale"
            ),
            Error::DegenerateProjection => {
                write!(f, "point lies in the span of the removed direction")
            }
            Error::EmptyCloud => write!(f, "need at least one point"),
            Error::DisconnectedGraph { components } => {
                write!(f, "neighborhood graph has {components} components")
            }
            Error::InvalidComplex(what) => write!(f, "invalid filtered complex: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
