use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: argument outside domain: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: singular argument: {detail}")]
    Singular { op: &'static str, detail: String },

    #[error("{op}: result would overflow: {detail}")]
    Overflow { op: &'static str, detail: String },

    #[error("{op}: quadrature did not converge (residual estimate {residual:e})")]
    Quadrature { op: &'static str, residual: f64 },

    #[error("{op}: integration did not converge (last residual {residual:e})")]
    NonConvergence { op: &'static str, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{op}: precondition violated: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("linear system is singular or nearly so (pivot {pivot:e}); energy is close to a pole")]
    PoleProximity { pivot: f64 },

    #[error("momentum tail estimate {estimate:e} exceeds tolerance {tolerance:e}; increase p_max")]
    Tail { estimate: f64, tolerance: f64 },

    #[error("refinement did not converge: coarse {coarse:e}, refined {refined:e}")]
    Refinement { coarse: f64, refined: f64 },

    #[error("extrapolation failed: {detail}")]
    Extrapolation {
        detail: String,
        samples: Vec<(f64, Complex64)>,
    },

    #[error("order {order} is not supported (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("point pair outside the convergence region of the two-center expansion: {0}")]
    ConvergenceRegion(String),

    #[error("momentum {0} is not a node of the table")]
    OffGrid(f64),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn singular(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Singular {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn precondition(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            op,
            detail: detail.into(),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
