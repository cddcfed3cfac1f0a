//! Closed-form large-distance laws inside the bandgap and the free-space
//! comparators. Everything is parameterized by `alpha = omega_l / omega_a`
//! (using `omega_l = A k0^2`), and energies are returned in reduced units:
//! `|mu|^2 k0^3` in 3D, `|p|^2_perp k0` in 1D.
//!
//! Sign convention: the symmetric state takes the upper sign, so the 3D law
//! carries `-` and the 1D law `+` for `Symmetry::Symmetric`.

use crate::spectral::{dot, EmitterPair, Geometry};
use crate::{Error, Real, Result};

/// Guard on `1 - alpha` below which the constants are considered divergent.
pub const EDGE_GUARD: f64 = 1e-6;

/// Below this `k0 r` the asymptotic forms are flagged as out of regime.
pub const FAR_ZONE_THRESHOLD: f64 = 20.0;

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::AlphaOutOfRange(alpha.as_f64()));
    }
    if T::one() - alpha < T::lit(EDGE_GUARD) {
        return Err(Error::EdgeResonance((T::one() - alpha).as_f64()));
    }
    Ok(())
}

// shared first term: 2 alpha / (1 - alpha^2)
fn resonant_term<T: Real>(alpha: T) -> T {
    T::lit(2.0) * alpha / (T::one() - alpha * alpha)
}

/// `Gamma_3 = 2 alpha/(1 - alpha^2) + sqrt(alpha/(1 + alpha))`.
pub fn gamma3<T: Real>(alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    Ok(resonant_term(alpha) + (alpha / (T::one() + alpha)).sqrt())
}

/// `Gamma_1 = 2 (alpha/(1 - alpha^2) + 1)`.
pub fn gamma1<T: Real>(alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    Ok(resonant_term(alpha) + T::lit(2.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants<T> {
    pub gamma1: T,
    pub gamma3: T,
    pub alpha: T,
}

impl<T: Real> AsymptoticConstants<T> {
    pub fn new(alpha: T) -> Result<Self> {
        Ok(Self { gamma1: gamma1(alpha)?, gamma3: gamma3(alpha)?, alpha })
    }

    /// From the lower band edge and the atomic frequency.
    pub fn from_frequencies(omega_l: T, omega_a: T) -> Result<Self> {
        Self::new(omega_l / omega_a)
    }
}

/// A closed-form value plus whether `k0 r` was inside the far zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticValue<T> {
    pub value: T,
    pub far_zone: bool,
}

fn far<T: Real>(phase: T) -> bool {
    phase >= T::lit(FAR_ZONE_THRESHOLD)
}

/// `I_3D ~ -Gamma_3 cos(k0 r)/(k0 r)`.
pub fn i3d_asymptotic<T: Real>(constants: &AsymptoticConstants<T>, k0: T, r: T) -> AsymptoticValue<T> {
    let phase = k0 * r;
    AsymptoticValue { value: -constants.gamma3 * phase.cos() / phase, far_zone: far(phase) }
}

/// `I_1D ~ Gamma_1 sin(k0 r)/r`, in units of `1/length`.
pub fn i1d_asymptotic<T: Real>(constants: &AsymptoticConstants<T>, k0: T, r: T) -> AsymptoticValue<T> {
    let phase = k0 * r;
    AsymptoticValue { value: constants.gamma1 * phase.sin() / r, far_zone: far(phase) }
}

fn transverse_projection<T: Real>(mu: &[T; 3], r_hat: &[T; 3]) -> T {
    let along = dot(mu, r_hat);
    dot(mu, mu) - along * along
}

/// Unit-normalised transverse projection `mu.(delta - rr).mu / |mu|^2`.
fn unit_transverse<T: Real>(mu: &[T; 3], r_hat: &[T; 3]) -> T {
    transverse_projection(mu, r_hat) / dot(mu, mu)
}

fn expect_3d<T: Real>(pair: &EmitterPair<T>) -> ([T; 3], [T; 3], T) {
    match pair.geometry {
        Geometry::Dipoles3D { mu, r_hat, r } => (mu, r_hat, r),
        Geometry::Dipoles1D { .. } => panic!("3D law requested for a 1D pair"),
    }
}

fn expect_1d<T: Real>(pair: &EmitterPair<T>) -> T {
    match pair.geometry {
        Geometry::Dipoles1D { r, .. } => r,
        Geometry::Dipoles3D { .. } => panic!("1D law requested for a 3D pair"),
    }
}

/// `-/+ (Gamma_3/pi) mu.(delta - rr).mu cos(k0 r)/(k0 r)^2`, reduced units.
///
/// Panics if `pair` is 1D.
pub fn delta_e_3d_asymptotic<T: Real>(pair: &EmitterPair<T>, constants: &AsymptoticConstants<T>, k0: T) -> T {
    let (mu, r_hat, r) = expect_3d(pair);
    let phase = k0 * r;
    -pair.symmetry.sign::<T>() * constants.gamma3 / T::PI() * unit_transverse(&mu, &r_hat) * phase.cos()
        / (phase * phase)
}

/// `+/- 2 Gamma_1 sin(k0 r)/(k0 r)`, reduced units.
///
/// Panics if `pair` is 3D.
pub fn delta_e_1d_asymptotic<T: Real>(pair: &EmitterPair<T>, constants: &AsymptoticConstants<T>, k0: T) -> T {
    let phase = k0 * expect_1d(pair);
    pair.symmetry.sign::<T>() * T::lit(2.0) * constants.gamma1 * phase.sin() / phase
}

/// Free space, 3D: `-/+ (omega_a/c)^3 mu.(delta - rr).mu cos(q)/q`, `q = omega_a r / c`.
/// Returned in units of `|mu|^2 k0^3` so it can sit next to the bandgap values.
pub fn delta_e_3d_free_space<T: Real>(pair: &EmitterPair<T>, c: T, k0: T) -> T {
    let (mu, r_hat, r) = expect_3d(pair);
    let wavenumber = pair.omega_a / c;
    let q = wavenumber * r;
    let ratio = wavenumber / k0;
    -pair.symmetry.sign::<T>() * ratio * ratio * ratio * unit_transverse(&mu, &r_hat) * q.cos() / q
}

/// Free space, 1D: `+/- 2 pi (omega_a/c) sin(omega_a r / c)` in units of `|p|^2_perp k0`.
pub fn delta_e_1d_free_space<T: Real>(pair: &EmitterPair<T>, c: T, k0: T) -> T {
    let r = expect_1d(pair);
    let wavenumber = pair.omega_a / c;
    pair.symmetry.sign::<T>() * T::lit(2.0) * T::PI() * (wavenumber / k0) * (wavenumber * r).sin()
}

/// Distance at which the 3D bandgap envelope `Gamma_3 k0^3/(pi (k0 r)^2)`
/// equals the free-space envelope `(omega_a/c)^2 / r`:
/// `r* = Gamma_3 c^2 k0 / (pi omega_a^2)`.
pub fn crossover_seed<T: Real>(gamma3: T, omega_a: T, c: T, k0: T) -> T {
    gamma3 * c * c * k0 / (T::PI() * omega_a * omega_a)
}
