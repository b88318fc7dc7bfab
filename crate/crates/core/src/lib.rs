//! Carleman weights for two-dimensional semiclassical Schrödinger operators,
//! pointwise certificates for the inequalities they satisfy, and numerical
//! weighted resolvent sweeps.

pub mod cli;
pub mod params;
pub mod potential;
pub mod resolvent;
pub mod verify;
pub mod weights;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/weights.md")]
    pub mod weights {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    pub mod certificates {}
    #[doc = include_str!("../../../book/src/carleman.md")]
    pub mod carleman {}
    #[doc = include_str!("../../../book/src/resolvent.md")]
    pub mod resolvent {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../book/src/limits.md")]
    pub mod limits {}
}
