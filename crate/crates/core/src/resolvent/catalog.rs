use super::grid::BoxDiscretization;
use super::ResolventError;
use crate::potential::{CatalogParams, CatalogPotential, PotentialId};
use crate::verify::PotentialSample;

/// Field sample of a catalog potential on the box.
///
/// `radial_decay` is checked against its declared `c`. For `trapping_ring`
/// the reported `c` is the smallest constant satisfying both envelope
/// bounds on the grid, which also requires `A > E`.
pub fn catalog_potential(
    id: PotentialId,
    params: &CatalogParams,
    energy: f64,
    disc: &BoxDiscretization,
) -> Result<PotentialSample, ResolventError> {
    let pot = CatalogPotential::from_id(id, params);
    let sample = PotentialSample::field(&pot, disc.n, disc.half_width, params.c, params.delta0);
    match id {
        PotentialId::Zero => Ok(sample),
        PotentialId::RadialDecay => {
            if sample.envelope_ok() {
                Ok(sample)
            } else {
                let (k, ratio) = sample.worst_node().expect("non-empty sample");
                let [x, y] = sample.points[k];
                Err(ResolventError::EnvelopeViolated { x, y, ratio, c: sample.c })
            }
        }
        PotentialId::TrappingRing => {
            if !(params.amplitude > energy) {
                return Err(ResolventError::InvalidPotential(format!(
                    "trapping_ring needs amplitude > E (got A = {}, E = {energy})",
                    params.amplitude
                )));
            }
            if !(params.sigma > 0.0 && params.rho > 0.0) {
                return Err(ResolventError::InvalidPotential("trapping_ring needs rho, sigma > 0".into()));
            }
            let c = sample.smallest_envelope_constant();
            Ok(sample.with_c(c))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc() -> BoxDiscretization {
        BoxDiscretization::new(4.0, 81).unwrap()
    }

    #[test]
    fn radial_decay_gradient_below_envelope() {
        let p = CatalogParams::default();
        let s = catalog_potential(PotentialId::RadialDecay, &p, 1.0, &disc()).unwrap();
        for k in 0..s.len() {
            let r = s.radii[k];
            let closed = 0.5 * p.c * p.delta0 * r * (1.0 + r * r).powf(-0.5 * p.delta0 - 1.0);
            assert!(closed <= p.c * (1.0 + r).powf(-1.0 - p.delta0));
        }
        assert!(s.envelope_ok());
    }

    #[test]
    fn ring_envelope_constant_is_reported() {
        let p = CatalogParams::default();
        let s = catalog_potential(PotentialId::TrappingRing, &p, 1.0, &disc()).unwrap();
        assert!(s.envelope_ok());
        assert!(s.c >= 2.0);
        let low = CatalogParams { amplitude: 0.5, ..p };
        assert!(catalog_potential(PotentialId::TrappingRing, &low, 1.0, &disc()).is_err());
    }

    #[test]
    fn violated_envelope_names_worst_node() {
        let p = CatalogParams { c: 1.0, delta0: 0.01, ..CatalogParams::default() };
        // the sample is checked against a much steeper envelope
        let mut s = catalog_potential(PotentialId::Zero, &p, 1.0, &disc()).unwrap();
        s.delta0 = 0.4;
        s.recompute_flags();
        assert!(s.envelope_ok());
        // a steep decay overshoots its own envelope near r = 1
        let bad = CatalogParams { delta0: 6.0, ..CatalogParams::default() };
        assert!(matches!(
            catalog_potential(PotentialId::RadialDecay, &bad, 1.0, &disc()),
            Err(ResolventError::EnvelopeViolated { .. })
        ));
    }
}
