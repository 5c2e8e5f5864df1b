//! Crate-wide error type.

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("tower construction: {0}")]
    TowerConstruction(String),

    /// Requested a perturbed tower observable on a tower without the mixing
    /// modification; the perturbation is defined only on the modified tower.
    #[error("perturbed observable requires the mixing-modified tower")]
    PerturbedNeedsModified,

    /// `solve_t_alpha` handles levels strictly above the mean; mirror the
    /// distribution for levels below it.
    #[error("alpha = {alpha} is at or below the mean {mean}: use symmetric branch")]
    UseSymmetricBranch { alpha: f64, mean: f64 },

    /// No interior minimizer exists at or beyond the top of the support.
    #[error("alpha = {alpha} outside rate-function domain (max support value {max_value})")]
    OutsideRateDomain { alpha: f64, max_value: f64 },

    /// The Legendre maximizer fell on the edge of the tabulated t-grid.
    #[error("Legendre maximizer at t-grid boundary for alpha = {alpha}: extend t_grid")]
    ExtendTGrid { alpha: f64 },

    /// An exceedance bin came back empty; crude Monte Carlo cannot resolve it.
    #[error("no exceedances observed at n = {n}: increase replicas or lower n")]
    EmptyTailBin { n: u64 },

    /// Window length left the admissible range [1, n/2].
    #[error("window schedule error at n = {n}: k = {k} outside [1, n/2]")]
    ScheduleWindow { n: u64, k: i64 },

    #[error("argument error: {0}")]
    Argument(String),

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
