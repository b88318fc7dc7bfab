//! Moving the origin to `x0` and gluing the two Carleman estimates.
//!
//! The gluing constant uses `w'` to the first power: the estimate controls
//! `int w' e^{2 phi/h} |v|^2`, and with this power both ratios have finite
//! limits at infinity (`1/(2 delta)` and `2`). With `(w')^2` the first ratio
//! grows like `r^{1+delta}` and no finite `K` exists on the plane.

use serde::{Deserialize, Serialize};

use super::report::{Location, MarginReport};
use super::{VerifyError, DEFAULT_TOLERANCE};
use crate::params::ProblemParams;
use crate::resolvent::PlaneGrid;
use crate::weights::{eval_m, Barrier, WeightTables, WeightsError};

/// Relative slack on the admissible shift radius.
const SHIFT_SLACK: f64 = 1e-12;

/// `2^{1/(1+delta0)} - 1`.
pub fn shift_radius_bound(delta0: f64) -> f64 {
    (std::f64::consts::LN_2 / (1.0 + delta0)).exp_m1()
}

/// Pointwise sufficient condition for the shifted potential to obey the
/// envelope: `q^{1+delta0} <= 2` and `q^{delta0} <= 2`, `q = (1+|x|)/(1+|x-x0|)`.
pub fn verify_shift_envelope(x0: [f64; 2], p: &ProblemParams, grid: &PlaneGrid) -> Result<MarginReport, VerifyError> {
    let p = p.validate().map_err(WeightsError::from)?;
    let d0 = p.delta0;
    let norm = x0[0].hypot(x0[1]);
    let bound = shift_radius_bound(d0);
    if norm > bound * (1.0 + SHIFT_SLACK) {
        return Err(VerifyError::X0TooLarge { norm, bound });
    }
    let margins = grid.points().map(|[x, y]| {
        let q = (1.0 + x.hypot(y)) / (1.0 + (x - x0[0]).hypot(y - x0[1]));
        let m = (2.0 - q.powf(1.0 + d0)).min(2.0 - q.powf(d0));
        (Location::Point { x, y }, m)
    });
    Ok(MarginReport::from_margins("shift_envelope", DEFAULT_TOLERANCE, margins))
}

/// `(m^{-2} / (w'(|x|) + w'(|x-x0|)), (m(|x|)^2 + m(|x-x0|)^2) / m(|x|)^2)`.
pub fn gluing_ratios(b: &Barrier, x: [f64; 2], x0: [f64; 2]) -> (f64, f64) {
    let r = x[0].hypot(x[1]);
    let r_s = (x[0] - x0[0]).hypot(x[1] - x0[1]);
    let m = eval_m(b.delta, r);
    let m_s = eval_m(b.delta, r_s);
    let m2 = m * m;
    (1.0 / (m2 * (b.wprime(r) + b.wprime(r_s))), (m2 + m_s * m_s) / m2)
}

/// Bound on both ratios for `|x| >= r_e`: drop the shifted `w'` in the first,
/// use `|x-x0| <= |x| + |x0|` in the second. Each bound decreases once
/// `r_e >= 1` and `r_e (r_e + |x0|) >= 1`.
pub fn gluing_tail_bound(b: &Barrier, r_e: f64, shift: f64) -> Result<f64, VerifyError> {
    let needed = 1.0_f64.max(b.r0);
    if r_e < needed {
        return Err(VerifyError::BoxTooSmall {
            half_width: r_e,
            needed,
        });
    }
    let e = 0.5 * (1.0 + b.delta);
    let first = ((1.0 + r_e) * (1.0 + r_e) / (1.0 + r_e * r_e)).powf(e) / b.delta;
    let second = 1.0 + ((1.0 + (r_e + shift) * (r_e + shift)) / (1.0 + r_e * r_e)).powf(e);
    Ok(first.max(second))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingConstants {
    /// Certified `K` on the plane.
    pub k: f64,
    /// Grid maximum of both ratios.
    pub k_grid: f64,
    pub tail_bound: f64,
    /// Radius of the inscribed disc used for the tail.
    pub tail_radius: f64,
    pub argmax: Location,
    /// `R = R1 + |x0|`; both phases equal `max phi` for `|x| >= R`.
    pub r_cut: f64,
    pub x0: [f64; 2],
    pub grid_size: usize,
}

pub fn gluing_constants(wt: &WeightTables, x0: [f64; 2], grid: &PlaneGrid) -> Result<GluingConstants, VerifyError> {
    let shift = x0[0].hypot(x0[1]);
    if shift == 0.0 {
        return Err(VerifyError::X0Zero);
    }
    let bound = shift_radius_bound(wt.spec.delta0);
    if shift > bound * (1.0 + SHIFT_SLACK) {
        return Err(VerifyError::X0TooLarge { norm: shift, bound });
    }
    let b = &wt.barrier;
    let mut k_grid = 0.0_f64;
    let mut argmax = Location::None;
    let mut count = 0;
    for [x, y] in grid.points() {
        let (a, c) = gluing_ratios(b, [x, y], x0);
        count += 1;
        let v = a.max(c);
        if !(v <= k_grid) {
            k_grid = v;
            argmax = Location::Point { x, y };
        }
    }
    let tail_radius = grid.half_width;
    let tail_bound = gluing_tail_bound(b, tail_radius, shift)?;
    if !(tail_bound <= k_grid) {
        return Err(VerifyError::TailNotCertified {
            tail: tail_bound,
            grid_max: k_grid,
        });
    }
    Ok(GluingConstants {
        k: k_grid,
        k_grid,
        tail_bound,
        tail_radius,
        argmax,
        r_cut: wt.spec.r1 + shift,
        x0,
        grid_size: count,
    })
}
