//! The `E/4` bound through the expansion identity
//!
//! ```text
//! d_r(w (E - V_phi)) - (E/4) w'
//!     = (E - V + psi) w' + (psi' - d_r V) w + T - (E/4) w'
//! ```
//!
//! with `T = h^2 g w'` beyond `R0` and `T = 0` inside, where `w' = 2w/r`.
//! No derivative of the tables is taken.

use rayon::prelude::*;

use super::report::{Location, MarginReport};
use super::sample::{PotentialSample, SampleMode};
use super::{VerifyError, DEFAULT_TOLERANCE};
use crate::potential::PotentialModel;
use crate::weights::{eval_g, WeightTables, WeightsError};

/// `T` on `[0, R0]`, where `w' - 2w/r` vanishes identically.
pub const T_TERM_INNER: f64 = 0.0;

fn margin_at(wt: &WeightTables, r: f64, v: f64, dv: f64, h: f64) -> f64 {
    let s = &wt.spec;
    let wp = wt.barrier.wprime(r);
    let w = wt.barrier.w(r);
    let t = if r <= s.r0 {
        T_TERM_INNER
    } else {
        h * h * eval_g(s.delta, r) * wp
    };
    (s.energy - v + s.psi(r)) * wp + (s.psi_prime(r) - dv) * w + t - 0.25 * s.energy * wp
}

fn check_hs(wt: &WeightTables, hs: &[f64]) -> Result<(), VerifyError> {
    for &h in hs {
        if !(h > 0.0 && h.is_finite()) {
            return Err(WeightsError::NonPositiveH(h).into());
        }
        if h > wt.h1() {
            return Err(VerifyError::HExceedsH1 { h, h1: wt.h1() });
        }
    }
    Ok(())
}

/// Margin at every table node for one `h`.
pub fn e4_margin_profile(model: &PotentialModel, wt: &WeightTables, h: f64) -> Vec<f64> {
    wt.r
        .iter()
        .map(|&r| {
            let (v, dv) = model.worst_terms(wt.spec.delta0, r);
            margin_at(wt, r, v, dv, h)
        })
        .collect()
}

/// Minimum over the table nodes and every `h` in `hs`.
pub fn verify_e4_inequality(
    model: &PotentialModel,
    wt: &WeightTables,
    hs: &[f64],
) -> Result<MarginReport, VerifyError> {
    check_hs(wt, hs)?;
    let margins: Vec<(Location, f64)> = hs
        .par_iter()
        .flat_map_iter(|&h| {
            e4_margin_profile(model, wt, h)
                .into_iter()
                .zip(&wt.r)
                .map(move |(m, &r)| (Location::RadiusH { r, h }, m))
        })
        .collect();
    Ok(MarginReport::from_margins(
        format!("e4_inequality[{}]", model.label()),
        DEFAULT_TOLERANCE,
        margins,
    ))
}

/// Instance mode from radial samples on the table grid.
pub fn verify_e4_with_sample(
    sample: &PotentialSample,
    wt: &WeightTables,
    hs: &[f64],
) -> Result<MarginReport, VerifyError> {
    if sample.mode != SampleMode::Radial || sample.radii != wt.r {
        return Err(VerifyError::GridMismatch("sample must be radial on the table grid".into()));
    }
    check_hs(wt, hs)?;
    let margins: Vec<(Location, f64)> = hs
        .iter()
        .flat_map(|&h| {
            (0..wt.r.len()).map(move |k| {
                let r = wt.r[k];
                let m = margin_at(wt, r, sample.values[k], sample.radial_derivative[k], h);
                (Location::RadiusH { r, h }, m)
            })
        })
        .collect();
    Ok(MarginReport::from_margins("e4_inequality[sample]", DEFAULT_TOLERANCE, margins))
}

/// `count` values from `h_max` down to `h_max * ratio`, geometric, `h_max` first.
pub fn log_spaced_hs(h_max: f64, ratio: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![h_max],
        _ => (0..count)
            .map(|k| {
                if k == 0 {
                    h_max
                } else {
                    h_max * ratio.powf(k as f64 / (count - 1) as f64)
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProblemParams;
    use crate::potential::CatalogPotential;
    use crate::weights::{compute_g_and_h1, PsiSpec, RadialGrid};

    fn tables() -> WeightTables {
        let spec = PsiSpec::from_outer_radius(&ProblemParams::new(1.0, 0.4, 0.6), 1.0).unwrap();
        let grid = RadialGrid::refined(&spec, 800, 10.0).unwrap();
        let h1 = compute_g_and_h1(&spec, 1.0, &grid).unwrap().h1;
        WeightTables::build(&spec, h1, &grid).unwrap()
    }

    #[test]
    fn inner_branch_closed_form_for_zero_potential() {
        let wt = tables();
        let zero = PotentialModel::Instance(CatalogPotential::Zero);
        let prof = e4_margin_profile(&zero, &wt, wt.h1());
        let s = &wt.spec;
        for (k, &r) in wt.r.iter().enumerate() {
            if r < s.r0 {
                let expected = (0.75 * s.energy + 1.0 / s.delta0) * wt.barrier.wprime(r);
                assert!((prof[k] - expected).abs() <= 1e-12 * expected.max(1e-300), "r={r}");
                assert!(prof[k] > 0.0);
            }
        }
    }

    #[test]
    fn zero_potential_certificate_passes_up_to_h1() {
        let wt = tables();
        let hs = log_spaced_hs(wt.h1(), 1e-2, 8);
        let rep = verify_e4_inequality(&PotentialModel::Instance(CatalogPotential::Zero), &wt, &hs).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn h_above_h1_is_rejected() {
        let wt = tables();
        let err = verify_e4_inequality(&PotentialModel::Envelope, &wt, &[wt.h1() * 1.001]).unwrap_err();
        assert!(matches!(err, VerifyError::HExceedsH1 { .. }));
    }

    #[test]
    fn t_term_scales_quadratically() {
        let wt = tables();
        let zero = PotentialModel::Instance(CatalogPotential::Zero);
        let h = wt.h1();
        let a = e4_margin_profile(&zero, &wt, h);
        let b = e4_margin_profile(&zero, &wt, 0.5 * h);
        let base = e4_margin_profile(&zero, &wt, 0.0);
        for k in 0..wt.r.len() {
            let (ta, tb) = (a[k] - base[k], b[k] - base[k]);
            let scale = a[k].abs().max(base[k].abs()).max(1e-12);
            assert!((ta - 4.0 * tb).abs() <= 1e-12 * scale, "k={k}");
        }
    }

    #[test]
    fn sample_mode_agrees_with_model_mode() {
        let wt = tables();
        let pot = CatalogPotential::RadialDecay { c: 1.0, delta0: 0.4 };
        let sample = PotentialSample::radial(&pot, &wt.r, 1.0, 0.4);
        let hs = [wt.h1()];
        let a = verify_e4_with_sample(&sample, &wt, &hs).unwrap();
        let b = verify_e4_inequality(&PotentialModel::Instance(pot), &wt, &hs).unwrap();
        assert_eq!(a.min_margin, b.min_margin);
    }
}
