use crate::triangulation::{Direction, Label, ValidationReport};

/// Errors raised by the combinatorial, geometric and dynamical layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid triangulation: {0}")]
    Invalid(ValidationReport),

    #[error("triangulation is not veering")]
    NotVeering,

    #[error("label index {0} out of range")]
    UnknownLabel(usize),

    #[error("unknown label name `{0}`")]
    UnknownLabelName(String),

    #[error("both sides of edge {0} lie in one triangle")]
    DegenerateQuad(Label),

    #[error("edge {label} is not {direction:?} flippable")]
    NotFlippable { label: Label, direction: Direction },

    #[error("monochromatic triangle {0}")]
    Monochromatic(usize),

    #[error("edge {0} is horizontal or vertical")]
    AxisAlignedEdge(Label),

    #[error("flip of edge {0} produced a horizontal or vertical diagonal")]
    DegenerateWidth(Label),

    #[error("geometry does not match the triangulation: {0}")]
    Geometry(String),

    #[error("cone has no nonzero nonnegative point")]
    EmptyCone,

    #[error("word is not applicable at move {index}")]
    InapplicableWord { index: usize },

    #[error("join stalled after {steps} flips")]
    JoinStalled { steps: usize },

    #[error("non-Keane event at return {event}: {source}")]
    NonKeaneDetected {
        event: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("iteration cap of {0} flips reached")]
    IterationCap(usize),

    #[error("state is not balanced after the flips at return {0}")]
    NotBalancedAfterFlip(usize),

    #[error("marker word never occurs in the trajectory")]
    ThetaNeverSeen,

    #[error("point is singular for the projective action")]
    SingularPoint,

    #[error("point lies on the boundary of the polytope")]
    BoundaryPoint,

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("quadrature did not converge to {0:e}")]
    QuadratureNonconvergence(f64),

    #[error("{edges} edges exceeds the enumeration limit of {limit}")]
    TooLarge { edges: usize, limit: usize },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
