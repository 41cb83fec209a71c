use thiserror::Error;

/// Errors reported by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("polynomial order {0} outside 1..=8")]
    OrderOutOfRange(usize),

    #[error("equilibrium is not a complex focus: {0}")]
    NotAFocus(String),

    #[error("oracle fit inconclusive: {0}")]
    FitInconclusive(String),

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("step budget of {0} exhausted")]
    StepBudgetExhausted(usize),

    #[error("no return to the section: {0}")]
    NoReturn(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("no Hopf manifold in the slice a = {0} (requires a >= 2)")]
    NoHopf(f64),

    #[error("cycle count not monotone along the segment: endpoints {start} and {end}, interior {interior}")]
    CountNotMonotone { start: usize, end: usize, interior: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
