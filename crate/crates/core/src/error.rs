use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid argument or malformed input data.
    #[error("invalid input: {0}")]
    Input(String),

    /// A numerical procedure failed to produce a trustworthy result.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The bright-sector closed form is singular at an exceptional point.
    #[error(
        "bright-sector closed form is singular near the exceptional point \
         (|eta| = {eta_abs:.3e}); use closed_form_ep for the coalesced dynamics"
    )]
    AtExceptionalPoint { eta_abs: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
