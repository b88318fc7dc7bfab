use serde::{Deserialize, Serialize};

use super::sample::{PotentialSample, SampleMode};
use super::VerifyError;
use crate::weights::WeightTables;

/// `V_phi = V - (phi')^2 + h phi'' - h^2/(4 r^2)` on the table grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivePotentialTable {
    pub h: f64,
    pub r: Vec<f64>,
    pub vphi: Vec<f64>,
    /// The same quantity from `V - psi - h^2/(4 r^2)`.
    pub vphi_identity: Vec<f64>,
    /// `max |vphi - vphi_identity|`.
    pub cross_residual: f64,
}

pub fn effective_potential(v: &PotentialSample, wt: &WeightTables) -> Result<EffectivePotentialTable, VerifyError> {
    if v.mode != SampleMode::Radial {
        return Err(VerifyError::GridMismatch("potential must be sampled in radial mode".into()));
    }
    if v.radii != wt.r {
        return Err(VerifyError::GridMismatch(format!(
            "potential has {} samples, tables have {} nodes",
            v.radii.len(),
            wt.r.len()
        )));
    }
    let h = wt.h;
    let n = wt.r.len();
    let mut vphi = Vec::with_capacity(n);
    let mut ident = Vec::with_capacity(n);
    let mut cross: f64 = 0.0;
    for k in 0..n {
        let r = wt.r[k];
        let pole = h * h / (4.0 * r * r);
        let a = v.values[k] - wt.u[k] * wt.u[k] + h * wt.uprime[k] - pole;
        let b = v.values[k] - wt.psi[k] - pole;
        cross = cross.max((a - b).abs());
        vphi.push(a);
        ident.push(b);
    }
    Ok(EffectivePotentialTable {
        h,
        r: wt.r.clone(),
        vphi,
        vphi_identity: ident,
        cross_residual: cross,
    })
}
