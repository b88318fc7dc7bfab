use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use super::psi::{one_minus_decay, PsiSpec};
use super::WeightsError;

/// `m(r) = (1 + r^2)^{(1+delta)/4}`.
pub fn eval_m(delta: f64, r: f64) -> f64 {
    (1.0 + r * r).powf(0.25 * (1.0 + delta))
}

/// The barrier `w(r)`: `c0 r^2` on `[0, R0]`, `1 - (1+r)^{-delta}` beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Barrier {
    pub delta: f64,
    pub r0: f64,
    /// `(1 - (1+R0)^{-delta}) / R0^2`, makes `w` continuous at `R0`.
    pub c0: f64,
}

impl Barrier {
    pub fn new(spec: &PsiSpec) -> Self {
        let c0 = one_minus_decay(spec.delta, spec.r0) / (spec.r0 * spec.r0);
        Self {
            delta: spec.delta,
            r0: spec.r0,
            c0,
        }
    }

    pub fn w(&self, r: f64) -> f64 {
        if r <= self.r0 {
            self.c0 * r * r
        } else {
            one_minus_decay(self.delta, r)
        }
    }

    pub fn wprime(&self, r: f64) -> f64 {
        if r <= self.r0 {
            2.0 * self.c0 * r
        } else {
            self.delta * (1.0 + r).powf(-1.0 - self.delta)
        }
    }

    /// `|w(R0+) - w(R0-)|`.
    pub fn w_jump(&self) -> f64 {
        (one_minus_decay(self.delta, self.r0) - self.c0 * self.r0 * self.r0).abs()
    }

    /// `w'(R0+) - w'(R0-)`; `w'` may jump.
    pub fn wprime_jump(&self) -> f64 {
        self.delta * (1.0 + self.r0).powf(-1.0 - self.delta) - 2.0 * self.c0 * self.r0
    }

    /// `w / w'`; equals `r/2` on `(0, R0]`.
    pub fn w_over_wprime(&self, r: f64) -> f64 {
        if r <= self.r0 {
            0.5 * r
        } else {
            let x = 1.0 + r;
            x * (self.delta * x.ln()).exp_m1() / self.delta
        }
    }
}

/// `g(r) = (1/(4r^2)) (1 - (2/delta) ((1+r)^{1+delta} - (1+r)) / r)`.
pub fn eval_g(delta: f64, r: f64) -> f64 {
    let x = 1.0 + r;
    let excess = x * (delta * r.ln_1p()).exp_m1();
    (1.0 - 2.0 / delta * excess / r) / (4.0 * r * r)
}

/// Decreasing majorant of `|g|`: `(1/(2 delta)) (1+r)^{1+delta}/r^3 + 1/(4 r^2)`.
pub fn g_tail_bound(delta: f64, r: f64) -> f64 {
    (1.0 + r).powf(1.0 + delta) / (2.0 * delta * r * r * r) + 1.0 / (4.0 * r * r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GTable {
    pub r: Vec<f64>,
    pub g: Vec<f64>,
    pub g_sup: f64,
    /// `g_tail_bound` at the last node.
    pub tail_bound: f64,
    pub h1: f64,
}

/// Samples `g` on the grid nodes in `[R0, r_max]`, certifies the tail and
/// returns `h1 = (E / (4 sup|g|))^{1/2}`.
pub fn compute_g_and_h1(spec: &PsiSpec, energy: f64, grid: &RadialGrid) -> Result<GTable, WeightsError> {
    let (r, g): (Vec<f64>, Vec<f64>) = grid
        .nodes()
        .iter()
        .filter(|&&r| r >= spec.r0)
        .map(|&r| (r, eval_g(spec.delta, r)))
        .unzip();
    if r.is_empty() {
        return Err(WeightsError::Grid("no nodes at or beyond R0".into()));
    }
    let g_sup = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tail_bound = g_tail_bound(spec.delta, *r.last().unwrap());
    if tail_bound > g_sup {
        return Err(WeightsError::TailBoundExceedsGridMax {
            tail_bound,
            grid_max: g_sup,
        });
    }
    let h1 = (energy / (4.0 * g_sup)).sqrt();
    Ok(GTable {
        r,
        g,
        g_sup,
        tail_bound,
        h1,
    })
}
