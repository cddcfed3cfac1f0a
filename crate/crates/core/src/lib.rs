//! Resonance interaction between two entangled two-level emitters placed in a
//! photonic bandgap environment with effective-mass dispersion.
//!
//! The numeric core (dispersion, spectral weight, oscillatory quadrature, the
//! dyadic operator, band-resolved energies and the closed-form asymptotics) is
//! generic over [`Real`]. The experiment layer ([`analysis`], [`cli`]) works in
//! `f64`; the aliases below name the `f64` instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod asymptotics;
pub mod cli;
pub mod dispersion;
mod error;
pub mod interaction;
pub mod quadrature;
mod real;
pub mod spectral;
pub mod tensor3d;

pub use error::{Error, Result};
pub use real::Real;

pub type CrystalParams = dispersion::CrystalParams<f64>;
pub type BandEdges = dispersion::BandEdges<f64>;
pub type DispersionModel = dispersion::DispersionModel<f64>;
pub type EmitterPair = spectral::EmitterPair<f64>;
pub type GapPosition = spectral::GapPosition<f64>;
pub type OscillatorySpec = quadrature::OscillatorySpec<f64>;
pub type QuadratureResult = quadrature::QuadratureResult<f64>;
pub type QuadratureOptions = quadrature::QuadratureOptions<f64>;
pub type Tensor3 = tensor3d::Tensor3<f64>;
pub type EnergyResult = interaction::EnergyResult<f64>;
pub type AsymptoticConstants = asymptotics::AsymptoticConstants<f64>;

pub use analysis::{EnvelopeFit, SweepTable};
pub use interaction::BandSelector;
pub use spectral::Symmetry;

/// Vacuum speed of light in m/s.
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;
