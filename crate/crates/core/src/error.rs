use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("profile is not finite at r = {r}")]
    Domain { r: f64 },
    #[error("invalid warping function: {0}")]
    InvalidWarping(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("missing required field `{0}`")]
    MissingField(&'static str),
    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },
    #[error("non-positive integrand sample {value} at x = {x}")]
    NonPositiveIntegrand { x: f64, value: f64 },
    #[error("quadrature did not reach tolerance: estimate {value}, error {error} after {panels} panels")]
    QuadratureFailed { value: f64, error: f64, panels: usize },
    #[error("tridiagonal system is singular at row {0}")]
    SingularSystem(usize),
}
