//! erlab: a desk-scale laboratory for Erdős–Rényi window laws of Birkhoff
//! sums.
//!
//! The crate generates stationary time series from three source families —
//! bounded discrete i.i.d. draws, the doubling map under its exact Bernoulli
//! bit coding, and Young towers with polynomial return-time tails — and
//! measures the maximal window average theta(n, k) against the window
//! schedules that separate its limit regimes: logarithmic windows scaled by
//! the large-deviation rate (nontrivial limit), longer windows (limit 0),
//! and fixed windows (limit sup of the observable). Rate functions come
//! three ways: exact minimization for discrete i.i.d. sources, Monte Carlo
//! SCGF estimation with a Legendre–Fenchel transform, and tail regression.
//!
//! Everything is deterministic given a 64-bit seed; replica streams are
//! split with a documented avalanche hash, so experiment tables reproduce
//! byte for byte.
//!
//! Start with the runnable examples (`cargo run --release -p erlab
//! --example exact_iid_rate`, `tower_info`, `er_scan_iid`, ...) or the
//! `erlab` binary, whose subcommands (`iid-exact`, `rate-fn`, `er-scan`,
//! `tower-info`, `corr`, `experiment`) drive the same library calls from
//! the command line.

pub mod er;
mod error;
pub mod experiments;
pub mod large_deviations;
pub mod processes;
pub mod seeding;
pub mod tower;
mod util;

pub mod cli;

pub use error::{Error, Result};

pub use er::{er_scan, geometric_grid, theta, theta_min, ErScanResult, WindowSchedule};
pub use large_deviations::{
    empirical_scgf, exact_scgf_table, legendre_transform, mgf, solve_t_alpha, tail_fit,
    RateFunction, RateMethod, ScgfTable, TailFit, TailModel,
};
pub use processes::{
    doubling_orbit_point, generate_series, split_seed, DiscreteDistribution, PrefixSums,
    ProcessKind, ProcessSpec, DEFAULT_MASTER_SEED,
};
pub use tower::{
    coboundary_transfer, separation_time, symbolic_distance, Separation, TowerObservable,
    TowerPoint, Variant, YoungTower, DEFAULT_TOWER_TOL,
};
