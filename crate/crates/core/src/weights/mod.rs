//! Radial weight construction: the profile `psi`, the phase `phi` from the
//! Riccati equation, the barrier `w`, the multiplier `m` and `g`/`h1`.

mod barrier;
mod grid;
mod psi;
mod riccati;
mod tables;

use thiserror::Error;

use crate::params::ParamError;

pub use barrier::{compute_g_and_h1, eval_g, eval_m, g_tail_bound, Barrier, GTable};
pub use grid::RadialGrid;
pub use psi::{find_psi_constants, find_psi_constants_with_report, margin_grid, PsiSearch, PsiSpec};
pub use riccati::{solve_phi_riccati, ConstantSource, RiccatiOptions, RiccatiSolution, RiccatiSource};
pub use tables::{build_w, ColumnarTable, ConstantsReport, WeightTables, TABLE_COLUMNS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightsError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("grid: {0}")]
    Grid(String),
    #[error(
        "no admissible R1 in range [{r1_min}, {r1_max}]: best min margin {best_margin:.6e} at R1 = {best_r1}, r = {best_argmin}"
    )]
    NoAdmissibleR1 {
        r1_min: f64,
        r1_max: f64,
        best_r1: f64,
        best_margin: f64,
        best_argmin: f64,
    },
    #[error("outer radius R1 = {0} gives no valid 0 < R0 < R1")]
    InvalidOuterRadius(f64),
    #[error("residual above tolerance: {residual:.3e} > {tolerance:.3e} near r = {r}")]
    ResidualAboveTolerance { residual: f64, tolerance: f64, r: f64 },
    #[error("nonnegativity violated: u({r}) = {u:.3e}")]
    NonnegativityViolated { r: f64, u: f64 },
    #[error("tail bound exceeds grid max: {tail_bound:.6e} > {grid_max:.6e}")]
    TailBoundExceedsGridMax { tail_bound: f64, grid_max: f64 },
    #[error("h must be positive and finite (got {0})")]
    NonPositiveH(f64),
}
