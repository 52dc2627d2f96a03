use thiserror::Error;

/// Every fallible operation in the crate returns this error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time {t} a.u. lies outside the pulse support [0, {duration}]")]
    OutsidePulse { t: f64, duration: f64 },

    #[error(
        "imaginary-time relaxation did not converge after {iterations} iterations (last energy change {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("orbital overlap {0} is too close to one: the two centres coincide")]
    DegenerateOverlap(f64),

    #[error("time step {dt} a.u. does not resolve the cutoff harmonic (need dt <= {limit})")]
    UnresolvedCutoff { dt: f64, limit: f64 },

    #[error("propagation became unstable at t = {t} a.u.: norm grew to {norm}")]
    Unstable { t: f64, norm: f64 },

    #[error("phase factor overflow: |theta| = {0:e} exceeds 700; reduce g0 or the molecule number")]
    PhaseOverflow(f64),

    #[error("mode count mismatch: expected {expected}, found {found}")]
    ModeMismatch { expected: usize, found: usize },

    #[error("mode index {q} out of range 1..={q_cutoff}")]
    ModeOutOfRange { q: usize, q_cutoff: usize },

    #[error("conditioned state has zero probability")]
    ZeroProbability,

    #[error("density matrix has eigenvalue {0:e} below the clipping tolerance")]
    NegativeEigenvalue(f64),

    #[error("dense oracle guard violated: {0}")]
    OracleGuard(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    MissingArtifact(String),

    #[error("trace file is malformed: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("stage `{stage}` failed: {source}")]
    Stage { stage: String, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for problems in user input rather than in the numerics.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_)
            | Error::InvalidParameter(_)
            | Error::UnresolvedCutoff { .. }
            | Error::MissingArtifact(_) => true,
            Error::Stage { source, .. } => source.is_config(),
            _ => false,
        }
    }

    pub fn in_stage(self, stage: &str) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage { stage: stage.to_string(), source: Box::new(e) },
        }
    }
}
