use thiserror::Error;

/// Failures raised by the model, phase and echo computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("branch lost at path point {index}: best overlap {overlap:.3e} < 0.5")]
    BranchLost { index: usize, overlap: f64 },
    #[error("loop too coarse at step {index}: overlap modulus {overlap:.3e} < 0.5")]
    LoopTooCoarse { index: usize, overlap: f64 },
    #[error("too few loop points: {got} (need at least {need})")]
    TooFewPoints { got: usize, need: usize },
    #[error("path or loop is not closed")]
    NotClosed,
    #[error("degenerate perturbation frame: splitting vanishes, polar angle undefined")]
    DegenerateFrame,
    #[error("near-singular loop: 1 - sin(theta)*s = {0:.3e} below guard")]
    NearSingular(f64),
    #[error("singular unit-overlap limit: 1 - sin(theta) = {0:.3e} below guard")]
    SingularLimit(f64),
    #[error("model yields {0} stationary states, need at least 2")]
    ModelDegenerate(usize),
    #[error("ambiguous regime: diagonal splitting ordering is zero")]
    AmbiguousRegime,
    #[error("step size too large: {0}")]
    StepSize(String),
    #[error("at degeneracy: {0}")]
    AtDegeneracy(String),
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
