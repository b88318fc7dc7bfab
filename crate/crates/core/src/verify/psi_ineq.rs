use rayon::prelude::*;

use super::report::{Location, MarginReport};
use super::DEFAULT_TOLERANCE;
use crate::potential::PotentialModel;
use crate::weights::{PsiSpec, RadialGrid};

/// `(1-(1+r)^{-delta}) / (delta (1+r)^{-1-delta})`, i.e. `(1+r)((1+r)^delta - 1)/delta`.
pub fn psi_coeff(delta: f64, r: f64) -> f64 {
    (1.0 + r) * (delta * r.ln_1p()).exp_m1() / delta
}

/// `psi - V - V_r coeff + psi' coeff + E/2` with `(V, V_r)` from the model.
pub fn psi_margin_at(spec: &PsiSpec, model: &PotentialModel, r: f64) -> f64 {
    let (v, dv) = model.worst_terms(spec.delta0, r);
    let k = psi_coeff(spec.delta, r);
    spec.psi(r) - v - dv * k + spec.psi_prime(r) * k + 0.5 * spec.energy
}

pub fn verify_psi_inequality(spec: &PsiSpec, grid: &RadialGrid, model: &PotentialModel) -> MarginReport {
    let margins: Vec<(Location, f64)> = grid
        .nodes()
        .par_iter()
        .map(|&r| (Location::Radius { r }, psi_margin_at(spec, model, r)))
        .collect();
    MarginReport::from_margins(format!("psi_inequality[{}]", model.label()), DEFAULT_TOLERANCE, margins)
}
