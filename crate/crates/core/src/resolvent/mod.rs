//! Finite-difference `P = -h^2 Delta + V - E` on a Dirichlet box, shifted
//! direct solves and weighted resolvent norms.

mod banded;
mod catalog;
mod grid;
mod norm;
mod operator;
mod solver;
mod sweep;

use thiserror::Error;

pub use banded::BandedLu;
pub use catalog::catalog_potential;
pub use grid::{BoxDiscretization, PlaneGrid};
pub use norm::{weighted_resolvent_norm, NormEstimate, NormOptions, WeightDiag};
pub use operator::{assemble, assemble_fn, assemble_resolved_at, DiscreteOperator};
pub use solver::{solve_shifted, ShiftedSolver, Solve, SOLVE_TOLERANCE};
pub use sweep::{linear_fit, sweep_h, EpsRule, Fit, SweepMode, SweepResult, SweepRow, SweepSpec, CSV_HEADER};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolventError {
    #[error("grid: {0}")]
    Grid(String),
    #[error("resolution too coarse: spacing {a} > h/4 = {}", .h / 4.0)]
    ResolutionTooCoarse { a: f64, h: f64 },
    #[error("factorization failed at column {column}")]
    FactorizationFailed { column: usize },
    #[error("residual above tolerance after refinement: {residual:.3e} > {tolerance:.1e}")]
    ResidualAboveTolerance { residual: f64, tolerance: f64 },
    #[error("max_iter exceeded ({iterations} iterations, last estimate {estimate:.6e})")]
    MaxIterExceeded { iterations: usize, estimate: f64 },
    #[error("eps nonpositive (got {0})")]
    EpsNonpositive(f64),
    #[error("envelope violated at ({x}, {y}): ratio {ratio:.6e} > c = {c}")]
    EnvelopeViolated { x: f64, y: f64, ratio: f64, c: f64 },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("no sweep points")]
    NoSweepPoints,
    #[error("sweep aborted at h = {h}: {reason} ({} rows completed)", completed.len())]
    SweepAborted {
        h: f64,
        reason: Box<ResolventError>,
        completed: Vec<SweepRow>,
    },
}
