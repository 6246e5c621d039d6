use thiserror::Error;

/// Errors surfaced by constructors and evaluators.
///
/// Hot-loop code never produces these: parameters are validated once at
/// construction and the loops work on pre-checked values.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("shape evaluated at negative abscissa {0}")]
    NegativeAbscissa(f64),

    #[error("bump width {0} below Pareto support [1, inf)")]
    WidthBelowSupport(f64),

    #[error("operation requires dimension {required}, got {got}")]
    DimensionMismatch { required: usize, got: usize },

    #[error("growth-speed integral diverges: zeta = {zeta} >= 1")]
    SpeedIntegralDiverges { zeta: f64 },

    #[error("series diverges for exponent {exponent} (needs {bound})")]
    SeriesDiverges { exponent: f64, bound: &'static str },

    #[error("second moment infinite: kappa = {kappa} >= 1/2")]
    InfiniteVariance { kappa: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("need at least {required} points, got {got}")]
    NotEnoughData { required: usize, got: usize },

    #[error("scale values must be positive for log-log fitting (got {0})")]
    NonPositiveScale(f64),

    #[error("trajectory budget exceeded: requested N = {requested}, budget = {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },

    #[error("grid of {cells} cells exceeds the memory budget")]
    GridTooLarge { cells: u128 },
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
