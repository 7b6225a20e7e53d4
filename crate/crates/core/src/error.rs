use crate::trajectory::TrajectoryRecord;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The reciprocal passage time is unbounded because the trajectory starts
    /// exactly on the detector sphere. This is a measure-zero configuration;
    /// it is reported as an event instead of an IEEE infinity.
    #[error("reciprocal passage time unbounded: initial radius equals detector radius")]
    UnboundedReciprocal,

    /// Adaptive step control shrank the step below the representable floor.
    /// Carries the partial trajectory integrated so far.
    #[error("integration failure: step size underflow at t = {t}")]
    StepSizeUnderflow {
        t: f64,
        record: Box<TrajectoryRecord>,
    },

    /// The velocity-field callable returned a non-finite value.
    #[error("field evaluation returned non-finite value at t = {t}, position {position:?}")]
    FieldEvaluation { t: f64, position: [f64; 3] },

    /// A trajectory driven by a gridded field left the sampled domain.
    #[error("trajectory left the gridded field domain at t = {t}, position {position:?}")]
    OutOfDomain { t: f64, position: [f64; 3] },

    /// The grid is too small to hold the packet at the requested time.
    #[error(
        "aliasing guard: box half-width {box_half_width} too small, need at least {required}"
    )]
    AliasingGuard { box_half_width: f64, required: f64 },

    /// Velocity extraction found no grid point above the density floor.
    #[error("degenerate field: every grid point is below the density mask floor")]
    DegenerateField,

    /// A per-sample failure inside an ensemble run, tagged with the sample index.
    #[error("sample {index}: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
