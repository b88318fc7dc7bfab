//! Problem parameters shared by every stage: energy, decay exponent and the
//! weight exponent `s` (with `delta = 2s - 1`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Envelope constant used throughout the normalized problem.
pub const CANONICAL_ENVELOPE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Energy level `E > 0`.
    pub energy: f64,
    /// Long-range decay exponent of the potential.
    pub delta0: f64,
    /// Envelope constant `c` in `V <= c (1+|x|)^{-delta0}`.
    pub c: f64,
    /// Weight exponent, `s > 1/2`.
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} is not finite")]
    NotFinite { name: &'static str },
    #[error("energy must be positive (got {0})")]
    NonPositiveEnergy(f64),
    #[error("envelope constant c must be 1/2 in canonical mode (got {0})")]
    NonCanonicalEnvelope(f64),
    #[error("delta0 must be positive (got {0})")]
    NonPositiveDelta0(f64),
    #[error("delta0 >= 1/2 (got {0})")]
    Delta0TooLarge(f64),
    #[error("delta = {0} violates 0 < 2s-1")]
    NonPositiveDelta(f64),
    #[error("delta >= delta0 ({delta} >= {delta0})")]
    DeltaNotBelowDelta0 { delta: f64, delta0: f64 },
}

impl ProblemParams {
    /// Canonical parameters (`c = 1/2`).
    pub fn new(energy: f64, delta0: f64, s: f64) -> Self {
        Self {
            energy,
            delta0,
            c: CANONICAL_ENVELOPE,
            s,
        }
    }

    /// Parameters with an explicit weight exponent `delta` (so `s = (1+delta)/2`).
    pub fn with_delta(energy: f64, delta0: f64, delta: f64) -> Self {
        Self::new(energy, delta0, 0.5 * (1.0 + delta))
    }

    pub fn delta(&self) -> f64 {
        2.0 * self.s - 1.0
    }

    /// Checks `E > 0`, `c = 1/2` and `0 < 2s-1 < delta0 < 1/2`.
    pub fn validate(self) -> Result<Self, ParamError> {
        for (name, v) in [
            ("energy", self.energy),
            ("delta0", self.delta0),
            ("c", self.c),
            ("s", self.s),
        ] {
            if !v.is_finite() {
                return Err(ParamError::NotFinite { name });
            }
        }
        if self.energy <= 0.0 {
            return Err(ParamError::NonPositiveEnergy(self.energy));
        }
        if self.c != CANONICAL_ENVELOPE {
            return Err(ParamError::NonCanonicalEnvelope(self.c));
        }
        if self.delta0 <= 0.0 {
            return Err(ParamError::NonPositiveDelta0(self.delta0));
        }
        if self.delta0 >= 0.5 {
            return Err(ParamError::Delta0TooLarge(self.delta0));
        }
        let delta = self.delta();
        if delta <= 0.0 {
            return Err(ParamError::NonPositiveDelta(delta));
        }
        if delta >= self.delta0 {
            return Err(ParamError::DeltaNotBelowDelta0 {
                delta,
                delta0: self.delta0,
            });
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_is_accepted() {
        let p = ProblemParams::new(1.0, 0.4, 0.6);
        assert_eq!(p.validate(), Ok(p));
        assert!((p.delta() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn delta0_at_or_above_half_is_rejected() {
        let err = ProblemParams::new(1.0, 0.6, 0.6).validate().unwrap_err();
        assert!(matches!(err, ParamError::Delta0TooLarge(_)));
        assert!(err.to_string().contains("delta0 >= 1/2"));
    }

    #[test]
    fn delta_not_below_delta0_is_rejected() {
        let err = ProblemParams::new(1.0, 0.3, 0.7).validate().unwrap_err();
        assert!(err.to_string().contains("delta >= delta0"), "{err}");
    }

    #[test]
    fn s_of_one_half_gives_zero_delta() {
        let err = ProblemParams::new(1.0, 0.4, 0.5).validate().unwrap_err();
        assert_eq!(err, ParamError::NonPositiveDelta(0.0));
        assert!(err.to_string().contains("delta = 0"));
    }

    #[test]
    fn non_canonical_envelope_and_energy() {
        let mut p = ProblemParams::new(1.0, 0.4, 0.6);
        p.c = 1.0;
        assert!(matches!(
            p.validate(),
            Err(ParamError::NonCanonicalEnvelope(_))
        ));
        assert!(matches!(
            ProblemParams::new(-1.0, 0.4, 0.6).validate(),
            Err(ParamError::NonPositiveEnergy(_))
        ));
        assert!(matches!(
            ProblemParams::new(f64::NAN, 0.4, 0.6).validate(),
            Err(ParamError::NotFinite { .. })
        ));
    }
}
