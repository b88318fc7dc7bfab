//! Closed-form radial potentials used by the instance checks and the
//! resolvent experiments.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialId {
    Zero,
    RadialDecay,
    TrappingRing,
}

impl PotentialId {
    pub const ALL: [PotentialId; 3] = [
        PotentialId::Zero,
        PotentialId::RadialDecay,
        PotentialId::TrappingRing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PotentialId::Zero => "zero",
            PotentialId::RadialDecay => "radial_decay",
            PotentialId::TrappingRing => "trapping_ring",
        }
    }
}

impl fmt::Display for PotentialId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PotentialId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| format!("unknown potential id `{s}`"))
    }
}

/// Parameters for the catalog. Fields a potential does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CatalogParams {
    /// Envelope constant for `radial_decay`.
    pub c: f64,
    pub delta0: f64,
    /// Barrier height of `trapping_ring`.
    pub amplitude: f64,
    /// Ring radius.
    pub rho: f64,
    /// Ring width.
    pub sigma: f64,
}

impl Default for CatalogParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            delta0: 0.4,
            amplitude: 2.0,
            rho: 1.0,
            sigma: 0.25,
        }
    }
}

/// A radial potential with an exact derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogPotential {
    Zero,
    /// `(c/2) (1+r^2)^{-delta0/2}`.
    RadialDecay { c: f64, delta0: f64 },
    /// `A exp(-(r-rho)^2/sigma^2)`.
    TrappingRing { amplitude: f64, rho: f64, sigma: f64 },
}

impl CatalogPotential {
    pub fn from_id(id: PotentialId, p: &CatalogParams) -> Self {
        match id {
            PotentialId::Zero => CatalogPotential::Zero,
            PotentialId::RadialDecay => CatalogPotential::RadialDecay {
                c: p.c,
                delta0: p.delta0,
            },
            PotentialId::TrappingRing => CatalogPotential::TrappingRing {
                amplitude: p.amplitude,
                rho: p.rho,
                sigma: p.sigma,
            },
        }
    }

    pub fn id(&self) -> PotentialId {
        match self {
            CatalogPotential::Zero => PotentialId::Zero,
            CatalogPotential::RadialDecay { .. } => PotentialId::RadialDecay,
            CatalogPotential::TrappingRing { .. } => PotentialId::TrappingRing,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match *self {
            CatalogPotential::Zero => 0.0,
            CatalogPotential::RadialDecay { c, delta0 } => {
                0.5 * c * (1.0 + r * r).powf(-0.5 * delta0)
            }
            CatalogPotential::TrappingRing {
                amplitude,
                rho,
                sigma,
            } => {
                let z = (r - rho) / sigma;
                amplitude * (-z * z).exp()
            }
        }
    }

    pub fn radial_derivative(&self, r: f64) -> f64 {
        match *self {
            CatalogPotential::Zero => 0.0,
            CatalogPotential::RadialDecay { c, delta0 } => {
                -0.5 * c * delta0 * r * (1.0 + r * r).powf(-0.5 * delta0 - 1.0)
            }
            CatalogPotential::TrappingRing {
                amplitude,
                rho,
                sigma,
            } => {
                let z = (r - rho) / sigma;
                -2.0 * amplitude * z / sigma * (-z * z).exp()
            }
        }
    }

    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        self.value(x.hypot(y))
    }
}

/// Which potentials an inequality is certified for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialModel {
    /// Worst case over `V <= (1+r)^{-delta0}`, `|d_r V| <= (1+r)^{-1-delta0}`.
    Envelope,
    /// One concrete radial potential.
    Instance(CatalogPotential),
}

impl PotentialModel {
    /// Upper bound for `V` and for `d_r V` at radius `r`.
    pub fn worst_terms(&self, delta0: f64, r: f64) -> (f64, f64) {
        match self {
            PotentialModel::Envelope => {
                let v = (1.0 + r).powf(-delta0);
                (v, v / (1.0 + r))
            }
            PotentialModel::Instance(p) => (p.value(r), p.radial_derivative(r)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            PotentialModel::Envelope => "envelope".to_string(),
            PotentialModel::Instance(p) => format!("instance:{}", p.id()),
        }
    }
}
