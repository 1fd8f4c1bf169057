use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or symbol parameter violates one of the catalog constraints.
    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {index} is out of range (allowed {allowed})")]
    OutOfRange {
        what: &'static str,
        index: i64,
        allowed: String,
    },

    #[error("{nodes} quadrature nodes are too few for half-width {half_width} (need at least {required})")]
    TooFewNodes {
        nodes: usize,
        half_width: usize,
        required: usize,
    },

    #[error("Levinson breakdown at k = {k}: reflection product {product:.3e} reached the unit circle")]
    Breakdown { k: usize, product: f64 },

    #[error("logarithmic Fourier coefficients do not decay (ratio {ratio:.3e} at j = {j})")]
    NonDecaying { j: usize, ratio: f64 },

    #[error("Painlevé II integration left the Hastings–McLeod branch near x = {x:.4} (|u| = {value:.3e})")]
    BlowUp { x: f64, value: f64 },

    #[error("step size underflow at x = {x:.6}")]
    StepUnderflow { x: f64 },

    #[error("Fredholm matrix is numerically singular (|det| = {modulus:.3e}); 1 may lie in the spectrum")]
    Singular { modulus: f64 },

    #[error("truncation bound {bound:.3e} exceeds tolerance {tol:.1e}; increase {hint}")]
    TailBound { bound: f64, tol: f64, hint: &'static str },

    #[error("x = {x} is outside the regime [{lo}, {hi}] of this check; {hint}")]
    Regime {
        x: f64,
        lo: f64,
        hi: f64,
        hint: &'static str,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Failures caused by finite precision or conditioning rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Breakdown { .. }
                | Error::NonDecaying { .. }
                | Error::BlowUp { .. }
                | Error::StepUnderflow { .. }
                | Error::Singular { .. }
                | Error::TailBound { .. }
        )
    }
}
