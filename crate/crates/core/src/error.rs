use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0:?} is at the sphere center; distance gradient undefined")]
    AtCenter([f64; 3]),
    #[error("point {point:?} is not on the surface at t={t} (|D|={residual:.3e})")]
    NotOnSurface { point: [f64; 3], t: f64, residual: f64 },
    #[error("time {t} outside [0, {t_end}]")]
    TimeOutOfRange { t: f64, t_end: f64 },
    #[error("unsupported geometry order k_g={0}; expected 1, 2 or 3")]
    UnsupportedGeometryOrder(usize),
    #[error("no quadrature rule of degree {0}")]
    QuadratureDegree(usize),
    #[error("degenerate element {elem}: Jacobian rank < 2")]
    DegenerateElement { elem: usize },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("linear solve failed: {0}")]
    Solver(String),
    #[error("non-finite value in solution at step {step}")]
    NonFinite { step: usize },
    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from invalid user input rather than a runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnsupportedGeometryOrder(_) | Error::InvalidSpace(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
