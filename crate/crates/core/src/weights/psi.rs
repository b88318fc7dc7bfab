use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use super::WeightsError;
use crate::params::ProblemParams;
use crate::potential::PotentialModel;
use crate::verify::{verify_psi_inequality, MarginReport};

/// `1 - (1+r)^{-delta}`, accurate for small `delta * ln(1+r)`.
pub(crate) fn one_minus_decay(delta: f64, r: f64) -> f64 {
    -(-delta * r.ln_1p()).exp_m1()
}

/// The piecewise profile
///
/// ```text
/// psi(r) = 1/delta0                          r <= R0
///        = B / (1 - (1+r)^{-delta}) - E/4    R0 < r < R1
///        = 0                                 r >= R1
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiSpec {
    pub b: f64,
    pub r0: f64,
    pub r1: f64,
    pub delta: f64,
    pub delta0: f64,
    pub energy: f64,
}

impl PsiSpec {
    /// Solves both continuity equations for a given outer radius:
    /// `B = (E/4)(1-(1+R1)^{-delta})`, then `R0` from the plateau value.
    pub fn from_outer_radius(p: &ProblemParams, r1: f64) -> Result<Self, WeightsError> {
        let p = p.validate()?;
        if !(r1 > 0.0 && r1.is_finite()) {
            return Err(WeightsError::InvalidOuterRadius(r1));
        }
        let delta = p.delta();
        let quarter = 0.25 * p.energy;
        let b = quarter * one_minus_decay(delta, r1);
        let q = b / (1.0 / p.delta0 + quarter);
        // (1+R0)^{-delta} = 1 - q
        let r0 = (-(-q).ln_1p() / delta).exp_m1();
        if !(r0 > 0.0 && r0 < r1) {
            return Err(WeightsError::InvalidOuterRadius(r1));
        }
        Ok(Self {
            b,
            r0,
            r1,
            delta,
            delta0: p.delta0,
            energy: p.energy,
        })
    }

    /// The middle branch `B/(1-(1+r)^{-delta}) - E/4`, at any `r > 0`.
    pub fn middle_branch(&self, r: f64) -> f64 {
        self.b / one_minus_decay(self.delta, r) - 0.25 * self.energy
    }

    pub fn psi(&self, r: f64) -> f64 {
        if r <= self.r0 {
            1.0 / self.delta0
        } else if r < self.r1 {
            self.middle_branch(r)
        } else {
            0.0
        }
    }

    /// Exact derivative; zero outside `(R0, R1)`.
    pub fn psi_prime(&self, r: f64) -> f64 {
        if r <= self.r0 || r >= self.r1 {
            return 0.0;
        }
        let d = one_minus_decay(self.delta, r);
        -self.b * self.delta * (1.0 + r).powf(-1.0 - self.delta) / (d * d)
    }

    /// `(|psi(R0+) - 1/delta0|, |psi(R1-)|)`.
    pub fn continuity_residuals(&self) -> (f64, f64) {
        (
            (self.middle_branch(self.r0) - 1.0 / self.delta0).abs(),
            self.middle_branch(self.r1).abs(),
        )
    }

    pub fn sup_psi(&self) -> f64 {
        1.0 / self.delta0
    }

    pub fn params(&self) -> ProblemParams {
        ProblemParams::with_delta(self.energy, self.delta0, self.delta)
    }
}

/// Search controls for [`find_psi_constants`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiSearch {
    pub r1_min: f64,
    pub r1_max: f64,
    /// Number of geometrically spaced `R1` candidates.
    pub steps: usize,
    /// Uniform margin nodes on `[0, 2 R1]`.
    pub margin_nodes: usize,
    pub tolerance: f64,
    pub model: PotentialModel,
}

impl Default for PsiSearch {
    fn default() -> Self {
        Self {
            r1_min: 1.0,
            r1_max: 1.0e4,
            steps: 200,
            margin_nodes: 10_000,
            tolerance: 1e-12,
            model: PotentialModel::Envelope,
        }
    }
}

/// Uniform certification grid on `(0, 2 R1]` with `R0`, `R1` as nodes.
pub fn margin_grid(spec: &PsiSpec, nodes: usize) -> Result<RadialGrid, WeightsError> {
    let r_max = 2.0 * spec.r1;
    RadialGrid::uniform(r_max / nodes as f64, r_max, nodes, &[spec.r0, spec.r1])
}

/// Scans `R1` upward and returns the first spec whose margin for the
/// `psi`-inequality is nonnegative (within `tolerance`) on the margin grid.
pub fn find_psi_constants(p: &ProblemParams, search: &PsiSearch) -> Result<PsiSpec, WeightsError> {
    let (spec, _) = find_psi_constants_with_report(p, search)?;
    Ok(spec)
}

pub fn find_psi_constants_with_report(
    p: &ProblemParams,
    search: &PsiSearch,
) -> Result<(PsiSpec, MarginReport), WeightsError> {
    let p = p.validate()?;
    if !(search.r1_min > 0.0 && search.r1_max >= search.r1_min && search.steps >= 1) {
        return Err(WeightsError::Grid(format!(
            "bad R1 search range [{}, {}] with {} steps",
            search.r1_min, search.r1_max, search.steps
        )));
    }
    let mut best: Option<(f64, MarginReport)> = None;
    let ratio = search.r1_max / search.r1_min;
    for k in 0..search.steps {
        let t = if search.steps == 1 {
            0.0
        } else {
            k as f64 / (search.steps - 1) as f64
        };
        let r1 = search.r1_min * ratio.powf(t);
        let spec = match PsiSpec::from_outer_radius(&p, r1) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let grid = margin_grid(&spec, search.margin_nodes)?;
        let mut report = verify_psi_inequality(&spec, &grid, &search.model);
        report.tolerance = search.tolerance;
        report.refresh_pass();
        if report.pass {
            return Ok((spec, report));
        }
        if best.as_ref().is_none_or(|(_, b)| report.min_margin > b.min_margin) {
            best = Some((r1, report));
        }
    }
    let (best_r1, best_margin, best_argmin) = match best {
        Some((r1, rep)) => (r1, rep.min_margin, rep.argmin.radius()),
        None => (f64::NAN, f64::NEG_INFINITY, f64::NAN),
    };
    Err(WeightsError::NoAdmissibleR1 {
        r1_min: search.r1_min,
        r1_max: search.r1_max,
        best_r1,
        best_margin,
        best_argmin,
    })
}
