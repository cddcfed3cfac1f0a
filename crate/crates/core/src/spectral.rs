//! Frequency-response weight of the second-order shift and the band-integral
//! integrands.
//!
//! Both rotating and counterrotating terms are kept:
//! `W(k) = omega_k/(omega_a - omega_k) - omega_k/(omega_a + omega_k)`,
//! which equals `2 omega_k^2 / (omega_a^2 - omega_k^2)`.

use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionModel;
use crate::{Error, Real, Result};

/// Default pole guard, relative to `omega_a`.
pub const DEFAULT_POLE_GUARD: f64 = 1e-9;

/// Correlated state of the pair. The resonance shift flips sign between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

impl Symmetry {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Symmetry::Symmetric => T::one(),
            Symmetry::Antisymmetric => -T::one(),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Symmetry::Symmetric => Symmetry::Antisymmetric,
            Symmetry::Antisymmetric => Symmetry::Symmetric,
        }
    }
}

/// Dipole data and separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry<T> {
    /// Equal real transition dipoles `mu` on both emitters, unit axis `r_hat`.
    Dipoles3D { mu: [T; 3], r_hat: [T; 3], r: T },
    /// Squared transverse dipole-per-length `|p|^2_perp`.
    Dipoles1D { p_perp_sq: T, r: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterPair<T> {
    pub omega_a: T,
    pub symmetry: Symmetry,
    pub geometry: Geometry<T>,
}

impl<T: Real> EmitterPair<T> {
    /// Builds a 3D pair. `mu_a` and `mu_b` must coincide; the symmetric and
    /// antisymmetric sectors only decouple for equal matrix elements.
    pub fn new_3d(omega_a: T, symmetry: Symmetry, mu_a: [T; 3], mu_b: [T; 3], r_hat: [T; 3], r: T) -> Result<Self> {
        if mu_a != mu_b {
            return Err(Error::InvalidPair("dipole matrix elements of A and B must be equal".into()));
        }
        let pair = Self { omega_a, symmetry, geometry: Geometry::Dipoles3D { mu: mu_a, r_hat, r } };
        pair.validate()?;
        Ok(pair)
    }

    pub fn new_1d(omega_a: T, symmetry: Symmetry, p_perp_sq: T, r: T) -> Result<Self> {
        let pair = Self { omega_a, symmetry, geometry: Geometry::Dipoles1D { p_perp_sq, r } };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_a > T::zero()) || !self.omega_a.is_finite() {
            return Err(Error::InvalidPair(format!("omega_a = {} must be positive", self.omega_a)));
        }
        let r = self.separation();
        if r == T::zero() {
            return Err(Error::ZeroSeparation);
        }
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::InvalidPair(format!("separation r = {r} must be positive")));
        }
        match self.geometry {
            Geometry::Dipoles3D { mu, r_hat, .. } => {
                let norm = dot(&r_hat, &r_hat).sqrt();
                if (norm - T::one()).abs() > T::lit(1e-12) {
                    return Err(Error::InvalidPair(format!("r_hat must be a unit vector (|r_hat| = {norm})")));
                }
                if !mu.iter().all(|m| m.is_finite()) || dot(&mu, &mu) == T::zero() {
                    return Err(Error::InvalidPair("dipole must be finite and non-zero".into()));
                }
            }
            Geometry::Dipoles1D { p_perp_sq, .. } => {
                if !(p_perp_sq > T::zero()) || !p_perp_sq.is_finite() {
                    return Err(Error::InvalidPair(format!("|p|^2_perp = {p_perp_sq} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn separation(&self) -> T {
        match self.geometry {
            Geometry::Dipoles3D { r, .. } | Geometry::Dipoles1D { r, .. } => r,
        }
    }

    pub fn with_separation(mut self, new_r: T) -> Self {
        match &mut self.geometry {
            Geometry::Dipoles3D { r, .. } | Geometry::Dipoles1D { r, .. } => *r = new_r,
        }
        self
    }

    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn is_3d(&self) -> bool {
        matches!(self.geometry, Geometry::Dipoles3D { .. })
    }

    /// `|mu|^2` in 3D, `|p|^2_perp` in 1D.
    pub fn dipole_strength(&self) -> T {
        match self.geometry {
            Geometry::Dipoles3D { mu, .. } => dot(&mu, &mu),
            Geometry::Dipoles1D { p_perp_sq, .. } => p_perp_sq,
        }
    }
}

pub(crate) fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Where the atomic line sits relative to the gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPosition<T> {
    /// `omega_l / omega_a`.
    pub alpha: T,
    /// `(omega_a - omega_l) / (omega_u - omega_l)`.
    pub delta: T,
}

impl<T: Real> GapPosition<T> {
    pub fn new(model: &DispersionModel<T>, omega_a: T) -> Result<Self> {
        let e = model.edges();
        let pos = Self { alpha: e.omega_l / omega_a, delta: (omega_a - e.omega_l) / e.width() };
        if !(pos.delta > T::zero() && pos.delta < T::one()) {
            return Err(Error::InvalidPair(format!(
                "omega_a = {omega_a} lies outside the gap ({}, {})",
                e.omega_l, e.omega_u
            )));
        }
        Ok(pos)
    }

    /// Near-lower-edge regime, `omega_a - omega_l << gap width` (taken as < 0.1).
    pub fn near_lower_edge(&self) -> bool {
        self.delta < T::lit(0.1)
    }
}

/// `W(k)` with a per-point pole guard (`|omega_a - omega_k| > guard * omega_a`).
pub fn spectral_weight<T: Real>(model: &DispersionModel<T>, omega_a: T, k: T) -> Result<T> {
    spectral_weight_guarded(model, omega_a, k, T::lit(DEFAULT_POLE_GUARD))
}

pub fn spectral_weight_guarded<T: Real>(model: &DispersionModel<T>, omega_a: T, k: T, guard: T) -> Result<T> {
    let w = model.omega(k)?;
    let gap = (omega_a - w).abs();
    if !(gap > guard * omega_a) {
        return Err(Error::ResonancePole { gap: gap.as_f64(), guard: (guard * omega_a).as_f64() });
    }
    Ok(weight_from_omega(omega_a, w))
}

#[inline]
fn weight_from_omega<T: Real>(omega_a: T, w: T) -> T {
    w / (omega_a - w) - w / (omega_a + w)
}

/// `W(k)` for a line already checked to sit inside the gap. The hot path of
/// the band integrals.
#[derive(Debug, Clone, Copy)]
pub struct SpectralWeight<T> {
    model: DispersionModel<T>,
    omega_a: T,
}

impl<T: Real> SpectralWeight<T> {
    /// Fails with `ResonancePole` unless both gap edges are farther than the
    /// guard from `omega_a`, which keeps every `omega(k)` off the pole.
    pub fn new(model: &DispersionModel<T>, omega_a: T) -> Result<Self> {
        Self::with_guard(model, omega_a, T::lit(DEFAULT_POLE_GUARD))
    }

    pub fn with_guard(model: &DispersionModel<T>, omega_a: T, guard: T) -> Result<Self> {
        let e = model.edges();
        let guard_abs = guard * omega_a;
        let gap = (omega_a - e.omega_l).min(e.omega_u - omega_a);
        if !(gap > guard_abs) {
            return Err(Error::ResonancePole { gap: gap.as_f64(), guard: guard_abs.as_f64() });
        }
        Ok(Self { model: *model, omega_a })
    }

    pub fn model(&self) -> &DispersionModel<T> {
        &self.model
    }

    pub fn omega_a(&self) -> T {
        self.omega_a
    }

    #[inline]
    pub fn eval(&self, k: T) -> T {
        weight_from_omega(self.omega_a, self.model.omega_unchecked(k))
    }

    /// `W(k) / k`, finite at `k = 0` where `W ~ k^2`.
    #[inline]
    pub fn eval_over_k(&self, k: T) -> T {
        if k == T::zero() {
            T::zero()
        } else {
            self.eval(k) / k
        }
    }
}

/// `W(k) cos(kr)`, the 1D band-integral integrand.
pub fn integrand_1d<T: Real>(model: &DispersionModel<T>, omega_a: T, r: T, k: T) -> Result<T> {
    Ok(spectral_weight(model, omega_a, k)? * (k * r).cos())
}

/// `W(k) sin(kr) / k`, the 3D band-integral integrand; zero at `k = 0`.
pub fn integrand_3d<T: Real>(model: &DispersionModel<T>, omega_a: T, r: T, k: T) -> Result<T> {
    let w = spectral_weight(model, omega_a, k)?;
    if k == T::zero() {
        return Ok(T::zero());
    }
    Ok(w * (k * r).sin() / k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::BandEdges;
    use approx::assert_relative_eq;

    // reduced reference model: omega_a = 1, k0 = 1
    fn model() -> DispersionModel<f64> {
        DispersionModel::new(BandEdges::new(0.987_238_766_933_361_3, 1.974_477_533_866_722_5).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn weight_examples() {
        let m = model();
        assert_eq!(spectral_weight(&m, 1.0, 0.0).unwrap(), 0.0);
        // find k with omega_k = 1/sqrt(2) on the lower branch
        let target = 0.5f64.sqrt();
        let a = m.curvature();
        let k = 1.0 - (1.0 - target / a).sqrt();
        assert_relative_eq!(m.omega(k).unwrap(), target, max_relative = 1e-14);
        assert_relative_eq!(spectral_weight(&m, 1.0, k).unwrap(), 2.0, max_relative = 1e-13);
        assert!(spectral_weight(&m, 1.0, 1.2).unwrap() < 0.0);
    }

    #[test]
    fn algebraic_identity_over_band() {
        let m = model();
        let sw = SpectralWeight::new(&m, 1.0).unwrap();
        for i in 1..=3000 {
            let k = 1.5 * i as f64 / 3000.0;
            let w = m.omega(k).unwrap();
            let closed = 2.0 * w * w / (1.0 - w * w);
            let two_term = sw.eval(k);
            assert_relative_eq!(two_term, closed, max_relative = 1e-12);
            if k < 1.0 {
                assert!(two_term > 0.0);
            } else if k > 1.0 {
                assert!(two_term < 0.0);
            }
        }
    }

    #[test]
    fn pole_guard() {
        let m = model();
        let e = m.edges();
        // omega_a below the lower edge: the lower band crosses the pole
        let k = 1.0 - (1.0 - 0.9 / m.curvature()).sqrt();
        assert!(matches!(spectral_weight(&m, 0.9, k), Err(Error::ResonancePole { .. })));
        assert!(matches!(SpectralWeight::new(&m, 0.9), Err(Error::ResonancePole { .. })));
        assert!(matches!(SpectralWeight::new(&m, e.omega_u), Err(Error::ResonancePole { .. })));
        assert!(SpectralWeight::new(&m, 1.0).is_ok());
    }

    #[test]
    fn integrand_examples() {
        let m = model();
        assert_eq!(integrand_1d(&m, 1.0, 3.0, 0.0).unwrap(), 0.0);
        let w = spectral_weight(&m, 1.0, 0.4).unwrap();
        assert_eq!(integrand_1d(&m, 1.0, 0.0, 0.4).unwrap(), w);
        assert!(integrand_1d(&m, 1.0, std::f64::consts::FRAC_PI_2 / 0.4, 0.4).unwrap().abs() < 1e-15);
        assert_eq!(integrand_3d(&m, 1.0, 5.0, 0.0).unwrap(), 0.0);
        let r = 2.0 * std::f64::consts::PI;
        assert!(integrand_3d(&m, 1.0, r, 1.0).unwrap().abs() < 1e-12);
        let wl = m.edges().omega_l;
        let expected = 2.0 * wl * wl / (1.0 - wl * wl) * 7.0f64.sin();
        assert_relative_eq!(integrand_3d(&m, 1.0, 7.0, 1.0).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn small_k_limit_of_3d_integrand() {
        let m = model();
        let r = 3.0;
        let k = 1e-6;
        // W ~ 2 (2 A k0 k)^2 near 0, so W sin(kr)/k ~ 8 A^2 k^2 r
        let a = m.curvature();
        assert_relative_eq!(integrand_3d(&m, 1.0, r, k).unwrap(), 8.0 * a * a * k * k * r, max_relative = 1e-5);
    }

    #[test]
    fn parity_in_r() {
        let m = model();
        for &r in &[0.3, 4.0, 77.0] {
            assert_eq!(integrand_1d(&m, 1.0, r, 0.7).unwrap(), integrand_1d(&m, 1.0, -r, 0.7).unwrap());
            assert_eq!(integrand_3d(&m, 1.0, r, 0.7).unwrap(), -integrand_3d(&m, 1.0, -r, 0.7).unwrap());
        }
    }

    #[test]
    fn gap_position() {
        let m = model();
        let g = GapPosition::new(&m, 1.0).unwrap();
        assert_relative_eq!(g.alpha, 0.987_238_766_933_361_3, max_relative = 1e-15);
        assert_relative_eq!(g.delta, 0.012_926_187_153_568_42, max_relative = 1e-12);
        assert!(g.near_lower_edge());
        assert!(GapPosition::new(&m, 0.5).is_err());
    }

    #[test]
    fn pair_validation() {
        let z = [0.0, 0.0, 1.0];
        let x = [1.0, 0.0, 0.0];
        assert!(EmitterPair::new_3d(1.0, Symmetry::Symmetric, x, x, z, 10.0).is_ok());
        assert!(EmitterPair::new_3d(1.0, Symmetry::Symmetric, x, z, z, 10.0).is_err());
        assert!(EmitterPair::new_3d(1.0, Symmetry::Symmetric, x, x, [0.0, 0.0, 2.0], 10.0).is_err());
        assert_eq!(EmitterPair::new_1d(1.0, Symmetry::Symmetric, 1.0, 0.0), Err(Error::ZeroSeparation));
        assert!(EmitterPair::new_1d(-1.0, Symmetry::Symmetric, 1.0, 1.0).is_err());
    }
}
