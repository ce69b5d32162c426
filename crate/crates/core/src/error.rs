use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid grid, ladder or solver configuration.
    Config(String),
    /// An argument outside its admissible range (negative time, p < 1, ...).
    Argument(String),
    /// Grids, species counts or time grids that do not line up.
    Shape(String),
    /// Coefficients violating symmetry or positivity.
    Validation(String),
    /// All cross-diffusion coefficients are equal, so no rescaling exists.
    Degenerate,
    /// The IMEX stepper exceeded its blow-up guard.
    Diverged { time: f64, sup: f64 },
    NoSamples,
    TrivialProblem,
    /// Not enough time nodes for a finite-difference stencil or a fit.
    Stencil(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Argument(msg) => write!(f, "argument error: {msg}"),
            Error::Shape(msg) => write!(f, "shape error: {msg}"),
            Error::Validation(msg) => write!(f, "validation error: {msg}"),
            Error::Degenerate => {
                f.write_str("degenerate: system decouples into heat equations")
            }
            Error::Diverged { time, sup } => {
                write!(f, "diverged at t = {time:e} (sup norm {sup:e})")
            }
            Error::NoSamples => f.write_str("no samples"),
            Error::TrivialProblem => f.write_str("trivial problem: zero denominator"),
            Error::Stencil(msg) => write!(f, "insufficient time nodes: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
