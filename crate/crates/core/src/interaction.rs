//! Band-resolved numeric resonance energies and the quasi-static force.
//!
//! 1D: `dE = +/- 2 |p|^2_perp * int W(k) cos(kr) dk`.
//!
//! 3D: `dE = +/- (1/pi) mu_l mu_m int W(k) [D g_k]_lm dk` with `D` the dyadic
//! operator and `g_k(r) = sin(kr)/(kr)`. Applying `D` per mode splits the
//! integrand into a `sin(kr)` and a `cos(kr)` piece (see
//! [`tensor3d::mode_tensor_parts`]), each integrated with the oscillatory
//! rule.
//!
//! Values are reported in reduced units, `|mu|^2 k0^3` (3D) and
//! `|p|^2_perp k0` (1D), whatever unit system the model and pair use.

use rayon::prelude::*;

use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionModel;
use crate::quadrature::{
    differentiate_profile, integrate_oscillatory, OscillatorKind, OscillatorySpec, QuadratureOptions, QuadratureResult,
};
use crate::spectral::{EmitterPair, Geometry, SpectralWeight};
use crate::tensor3d::DipoleProjections;
use crate::{Real, Result};

/// Default upper end of the above-gap window, in units of `k0`.
pub const DEFAULT_ABOVE_UPPER: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandSelector {
    /// `[0, k0]`
    #[serde(rename = "below")]
    BelowGap,
    /// `[k0, above_upper * k0]`
    #[serde(rename = "above")]
    AboveGapWindow,
    Both,
}

impl BandSelector {
    fn includes_below(self) -> bool {
        matches!(self, BandSelector::BelowGap | BandSelector::Both)
    }

    fn includes_above(self) -> bool {
        matches!(self, BandSelector::AboveGapWindow | BandSelector::Both)
    }
}

/// Quadrature settings plus the above-gap window bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyOptions<T> {
    pub quadrature: QuadratureOptions<T>,
    /// Upper end of the above-gap window in units of `k0`; must exceed 1.
    pub above_upper: T,
}

impl<T: Real> Default for EnergyOptions<T> {
    fn default() -> Self {
        Self { quadrature: QuadratureOptions::default(), above_upper: T::lit(DEFAULT_ABOVE_UPPER) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BandBreakdown<T> {
    pub below_gap: Option<T>,
    pub above_gap: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResult<T> {
    /// Signed energy in reduced units.
    pub value: T,
    /// Per-band signed contributions, reduced units.
    pub band_breakdown: BandBreakdown<T>,
    /// Combined diagnostics; `value` and `abs_error_estimate` are in reduced units.
    pub quadrature: QuadratureResult<T>,
    /// `+1` symmetric, `-1` antisymmetric.
    pub symmetry_sign: T,
}

impl<T: Real> EnergyResult<T> {
    pub fn converged(&self) -> bool {
        self.quadrature.converged
    }

    pub fn abs_error(&self) -> T {
        self.quadrature.abs_error_estimate
    }
}

fn combine<T: Real>(parts: &[QuadratureResult<T>]) -> QuadratureResult<T> {
    let mut total =
        QuadratureResult { value: T::zero(), abs_error_estimate: T::zero(), panels_used: 0, converged: true };
    for p in parts {
        total.value = total.value + p.value;
        total.abs_error_estimate = total.abs_error_estimate + p.abs_error_estimate;
        total.panels_used += p.panels_used;
        total.converged &= p.converged;
    }
    total
}

fn band_limits<T: Real>(model: &DispersionModel<T>, band: BandSelector, options: &EnergyOptions<T>) -> Vec<(T, T)> {
    let k0 = model.k0();
    let mut limits = Vec::with_capacity(2);
    if band.includes_below() {
        limits.push((T::zero(), k0));
    }
    if band.includes_above() {
        limits.push((k0, options.above_upper * k0));
    }
    limits
}

fn check_options<T: Real>(options: &EnergyOptions<T>) -> Result<()> {
    options.quadrature.validate()?;
    if !(options.above_upper > T::one()) {
        return Err(crate::Error::InvalidQuadrature(format!(
            "above-gap window upper bound {} must exceed k0",
            options.above_upper
        )));
    }
    Ok(())
}

/// `int W(k) cos(kr) dk` over one interval.
fn integral_1d<T: Real>(
    weight: &SpectralWeight<T>,
    r: T,
    lo: T,
    hi: T,
    q: &QuadratureOptions<T>,
) -> Result<QuadratureResult<T>> {
    let spec = OscillatorySpec::new(OscillatorKind::CosineProduct, r, lo, hi).with_options(*q);
    integrate_oscillatory(|k| weight.eval(k), &spec)
}

/// `int W(k) mu.[D g_k].mu dk` over one interval, from the sin/cos split.
fn integral_3d<T: Real>(
    weight: &SpectralWeight<T>,
    proj: &DipoleProjections<T>,
    r: T,
    lo: T,
    hi: T,
    q: &QuadratureOptions<T>,
) -> Result<QuadratureResult<T>> {
    let r3 = r * r * r;
    let sine = OscillatorySpec::new(OscillatorKind::SineProduct, r, lo, hi).with_options(*q);
    let sin_part = integrate_oscillatory(
        |k| weight.eval(k) * proj.transverse * k / r + weight.eval_over_k(k) * proj.static_ / r3,
        &sine,
    )?;
    let cosine = OscillatorySpec::new(OscillatorKind::CosineProduct, r, lo, hi).with_options(*q);
    let cos_part = integrate_oscillatory(|k| -weight.eval(k) * proj.static_ / (r * r), &cosine)?;
    Ok(combine(&[sin_part, cos_part]))
}

/// `I_1D = int_band W(k) cos(kr) dk`.
pub fn band_integral_1d<T: Real>(
    model: &DispersionModel<T>,
    omega_a: T,
    r: T,
    band: BandSelector,
    options: &EnergyOptions<T>,
) -> Result<QuadratureResult<T>> {
    check_options(options)?;
    let weight = SpectralWeight::new(model, omega_a)?;
    let parts = band_limits(model, band, options)
        .into_iter()
        .map(|(lo, hi)| integral_1d(&weight, r, lo, hi, &options.quadrature))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(&parts))
}

/// `I_3D = int_band W(k) sin(kr)/k dk`.
pub fn band_integral_3d<T: Real>(
    model: &DispersionModel<T>,
    omega_a: T,
    r: T,
    band: BandSelector,
    options: &EnergyOptions<T>,
) -> Result<QuadratureResult<T>> {
    check_options(options)?;
    let weight = SpectralWeight::new(model, omega_a)?;
    let parts = band_limits(model, band, options)
        .into_iter()
        .map(|(lo, hi)| {
            let spec = OscillatorySpec::new(OscillatorKind::SineProduct, r, lo, hi).with_options(options.quadrature);
            integrate_oscillatory(|k| weight.eval_over_k(k), &spec)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(&parts))
}

fn assemble<T: Real>(sign: T, scale: T, band: BandSelector, per_band: Vec<QuadratureResult<T>>) -> EnergyResult<T> {
    let factor = sign * scale;
    let scaled: Vec<_> = per_band.iter().map(|q| q.scaled(factor)).collect();
    let mut breakdown = BandBreakdown::default();
    let mut it = scaled.iter();
    if band.includes_below() {
        breakdown.below_gap = it.next().map(|q| q.value);
    }
    if band.includes_above() {
        breakdown.above_gap = it.next().map(|q| q.value);
    }
    let quadrature = combine(&scaled);
    EnergyResult { value: quadrature.value, band_breakdown: breakdown, quadrature, symmetry_sign: sign }
}

/// 1D resonance energy in units of `|p|^2_perp k0`.
///
/// Panics if `pair` is 3D.
pub fn delta_e_1d_numeric<T: Real>(
    pair: &EmitterPair<T>,
    model: &DispersionModel<T>,
    band: BandSelector,
    options: &EnergyOptions<T>,
) -> Result<EnergyResult<T>> {
    pair.validate()?;
    check_options(options)?;
    let r = match pair.geometry {
        Geometry::Dipoles1D { r, .. } => r,
        Geometry::Dipoles3D { .. } => panic!("delta_e_1d_numeric called with a 3D pair"),
    };
    let weight = SpectralWeight::new(model, pair.omega_a)?;
    let per_band = band_limits(model, band, options)
        .into_iter()
        .map(|(lo, hi)| integral_1d(&weight, r, lo, hi, &options.quadrature))
        .collect::<Result<Vec<_>>>()?;
    // 2 |p|^2 int W cos dk, divided by |p|^2 k0
    let scale = T::lit(2.0) / model.k0();
    Ok(assemble(pair.symmetry.sign(), scale, band, per_band))
}

/// 3D resonance energy in units of `|mu|^2 k0^3`.
///
/// Panics if `pair` is 1D.
pub fn delta_e_3d_numeric<T: Real>(
    pair: &EmitterPair<T>,
    model: &DispersionModel<T>,
    band: BandSelector,
    options: &EnergyOptions<T>,
) -> Result<EnergyResult<T>> {
    pair.validate()?;
    check_options(options)?;
    let (mu, r_hat, r) = match pair.geometry {
        Geometry::Dipoles3D { mu, r_hat, r } => (mu, r_hat, r),
        Geometry::Dipoles1D { .. } => panic!("delta_e_3d_numeric called with a 1D pair"),
    };
    let weight = SpectralWeight::new(model, pair.omega_a)?;
    let strength = pair.dipole_strength();
    // dipole magnitude divides out; integrate with the unit direction
    let norm = strength.sqrt();
    let unit = [mu[0] / norm, mu[1] / norm, mu[2] / norm];
    let proj = DipoleProjections::new(&unit, &r_hat);
    let per_band = band_limits(model, band, options)
        .into_iter()
        .map(|(lo, hi)| integral_3d(&weight, &proj, r, lo, hi, &options.quadrature))
        .collect::<Result<Vec<_>>>()?;
    let k0 = model.k0();
    let scale = T::one() / (T::PI() * k0 * k0 * k0);
    Ok(assemble(pair.symmetry.sign(), scale, band, per_band))
}

/// Dispatches on the pair's dimensionality.
pub fn delta_e_numeric<T: Real>(
    pair: &EmitterPair<T>,
    model: &DispersionModel<T>,
    band: BandSelector,
    options: &EnergyOptions<T>,
) -> Result<EnergyResult<T>> {
    if pair.is_3d() {
        delta_e_3d_numeric(pair, model, band, options)
    } else {
        delta_e_1d_numeric(pair, model, band, options)
    }
}

/// Resonant energy-transfer matrix element: the magnitude of the shift with
/// the state's sign removed. Independent of the input symmetry class.
pub fn energy_transfer_element<T: Real>(
    pair: &EmitterPair<T>,
    model: &DispersionModel<T>,
    band: BandSelector,
    options: &EnergyOptions<T>,
) -> Result<EnergyResult<T>> {
    let symmetric = pair.with_symmetry(crate::spectral::Symmetry::Symmetric);
    let mut res = delta_e_numeric(&symmetric, model, band, options)?;
    res.value = res.value.abs();
    res.quadrature.value = res.value;
    Ok(res)
}

/// Energies at each separation in `separations`, evaluated in parallel and
/// returned in input order.
pub fn energy_sweep<T: Real>(
    pair: &EmitterPair<T>,
    model: &DispersionModel<T>,
    band: BandSelector,
    options: &EnergyOptions<T>,
    separations: &[T],
) -> Vec<Result<EnergyResult<T>>> {
    separations.par_iter().map(|&r| delta_e_numeric(&pair.with_separation(r), model, band, options)).collect()
}

/// Quasi-static force `F = -dE/dr` (positive = repulsive) from energies
/// sampled at increasing separations. Units: energy unit per length unit of
/// the abscissa.
pub fn force_profile<T: Real>(sweep: &[(T, EnergyResult<T>)]) -> Result<Vec<(T, T)>> {
    let samples: Vec<(T, T)> = sweep.iter().map(|(r, e)| (*r, e.value)).collect();
    force_from_values(&samples)
}

/// [`force_profile`] on bare `(r, energy)` pairs.
pub fn force_from_values<T: Real>(samples: &[(T, T)]) -> Result<Vec<(T, T)>> {
    Ok(differentiate_profile(samples)?.into_iter().map(|(r, d)| (r, -d)).collect())
}
