//! Signed-margin certificates for the pointwise inequalities behind the
//! Carleman estimate, plus quadratic-form tests of the estimate itself.

mod barrier_facts;
mod carleman;
mod e4;
mod effective;
mod gluing;
mod psi_ineq;
mod report;
mod sample;

use thiserror::Error;

use crate::resolvent::ResolventError;
use crate::weights::WeightsError;

pub use barrier_facts::verify_barrier_facts;
pub use carleman::{
    carleman_quadratic_form_test, combined_estimate_test, shifted_quadratic_form_test, CarlemanForm,
    CombinedEstimate, TestFunction,
};
pub use e4::{e4_margin_profile, log_spaced_hs, verify_e4_inequality, verify_e4_with_sample, T_TERM_INNER};
pub use effective::{effective_potential, EffectivePotentialTable};
pub use gluing::{
    gluing_constants, gluing_ratios, gluing_tail_bound, shift_radius_bound, verify_shift_envelope, GluingConstants,
};
pub use psi_ineq::{psi_coeff, psi_margin_at, verify_psi_inequality};
pub use report::{Location, MarginReport};
pub use sample::{PotentialSample, SampleMode};

/// Default acceptance threshold for margin reports.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("h exceeds h1 ({h} > {h1})")]
    HExceedsH1 { h: f64, h1: f64 },
    #[error("support touches boundary (nonzero node {cells} cells from the edge)")]
    SupportTouchesBoundary { cells: usize },
    #[error("eps must satisfy 0 <= eps <= h (eps = {eps}, h = {h})")]
    EpsOutOfRange { eps: f64, h: f64 },
    #[error("x0 too large: |x0| = {norm} > {bound}")]
    X0TooLarge { norm: f64, bound: f64 },
    #[error("x0 must be nonzero")]
    X0Zero,
    #[error("tail not certified: edge bound {tail:.6e} exceeds grid max {grid_max:.6e}")]
    TailNotCertified { tail: f64, grid_max: f64 },
    #[error("box half-width {half_width} too small for the tail argument (needs {needed})")]
    BoxTooSmall { half_width: f64, needed: f64 },
    #[error("test function size mismatch: {0}")]
    SizeMismatch(String),
}
