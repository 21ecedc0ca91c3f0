use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector length {found} does not match grid size {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("argument {value} outside the domain of {what}")]
    DomainViolation { what: &'static str, value: f64 },
    #[error("singular pivot in row {row}")]
    SingularPivot { row: usize },
    #[error("newton did not converge in {iterations} iterations (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("newton diverged at iteration {iteration} (residual {residual:e})")]
    Diverged { iteration: usize, residual: f64 },
    #[error("line search failed at iteration {iteration} (residual {residual:e})")]
    LineSearchFailed { iteration: usize, residual: f64 },
    #[error("converged solution at c = {c} is not admissible")]
    NotAdmissible { c: f64 },
    #[error("continuation step underflow; last converged c = {last_c}")]
    StepUnderflow { last_c: f64 },
    #[error("grids do not overlap")]
    NoOverlap,
    #[error("tail window reaches values below the underflow guard")]
    TailUnderflow,
    #[error("level {delta} outside the range of the profile")]
    LevelOutOfRange { delta: f64 },
    #[error("eigen-iteration did not converge (residual {residual:e})")]
    EigenNoConvergence { residual: f64 },
    #[error("non-finite state after time step {step}")]
    BlowUp { step: usize },
    #[error("steady state not reached (deviation {deviation:e})")]
    SteadyStateNotReached { deviation: f64 },
    #[error("no sign change found for the Bessel combination")]
    NoSignChange,
}
