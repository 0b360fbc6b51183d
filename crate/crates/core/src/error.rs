use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eigenvalues must be finite and strictly increasing (violated at index {index})")]
    UnsortedEigenvalues { index: usize },
    #[error("weight at index {index} is not positive ({value:e})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("model dimension must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("non-finite input value")]
    NonFinite,
    #[error("evaluation point {re}{im:+}i is within the exclusion radius of a pole")]
    PoleProximity { re: f64, im: f64 },
    #[error("evaluation point {re}{im:+}i is at a zero of F (a point of the infinite-coupling spectrum)")]
    ZeroOfF { re: f64, im: f64 },
    #[error("root finder could not isolate a sign change in bracket {bracket}")]
    BracketFailure { bracket: usize },
    #[error("nodes are inconsistent with coupling h = {h} (secular residual {residual:e} at node {index})")]
    InconsistentNodes { h: f64, index: usize, residual: f64 },
    #[error("sampling on the spectrum of the infinite coupling is not defined")]
    InfiniteCoupling,
    #[error("operation requires a model with unit cyclic-vector norm (found {0})")]
    NormalizationRequired(f64),
    #[error("representation poles do not match the zeros of F (pole {index})")]
    PoleMismatch { index: usize },
    #[error("w is not a zero of the transformed function (|f(w)| = {0:e})")]
    NotAZero(f64),
    #[error("w must have a nonzero imaginary part")]
    RealPoint,
    #[error("insufficient Jacobi coefficients: need {needed} of {which}, have {available}")]
    InsufficientCoefficients {
        which: &'static str,
        needed: usize,
        available: usize,
    },
    #[error("off-diagonal coefficient b_{index} must be positive")]
    NonPositiveOffDiagonal { index: usize },
    #[error("second-kind polynomial Q_n vanishes at {re}{im:+}i")]
    QZero { re: f64, im: f64 },
    #[error("quadrature did not converge (refinements differ by {0:e})")]
    QuadratureNonConvergence(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn pole_at(z: num_complex::Complex64) -> Self {
        Error::PoleProximity { re: z.re, im: z.im }
    }

    pub(crate) fn zero_at(z: num_complex::Complex64) -> Self {
        Error::ZeroOfF { re: z.re, im: z.im }
    }
}
