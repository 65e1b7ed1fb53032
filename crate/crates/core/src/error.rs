use thiserror::Error;

pub type Result<T, E = ComptonError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComptonError {
    #[error("momentum is off the mass shell: p·p = {mass_sqr}, expected {expected}")]
    OffShell { mass_sqr: f64, expected: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular propagator denominator: {name} = {value:e}")]
    SingularDenominator { name: &'static str, value: f64 },

    #[error("unphysical kinematics: {0}")]
    Kinematics(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("spin basis mismatch: state is {state:?}, matrix is {matrix:?}")]
    BasisMismatch {
        state: crate::amplitudes::SpinBasis,
        matrix: crate::amplitudes::SpinBasis,
    },

    #[error("invalid label `{0}`")]
    InvalidLabel(String),

    #[error("root finding failed: {0}")]
    NoConvergence(String),

    #[error("usage: {0}")]
    Usage(String),
}
