//! Photonic-crystal dispersion: band edges of the first gap of a periodic slab
//! stack with `b = 2na`, and the piecewise effective-mass relation `omega(k)`
//! used on either side of the gap.
//!
//! Below the gap the relation is the interpolated parabola
//! `omega = 2 A k k0 - A k^2` (linear at small `k`, flat at `k0`), with
//! `A = omega_l / k0^2`. Above the gap it is `omega = omega_u + A (k - k0)^2`
//! with the same curvature. No structure beyond the first gap is modelled.

use crate::{Error, Real, Result};

/// Layered dielectric: slabs of index `n` and thickness `2a` separated by
/// `b = 2na` of vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalParams<T> {
    pub n: T,
    pub a: T,
    /// Vacuum light speed in the caller's unit system.
    pub c: T,
}

impl<T: Real> CrystalParams<T> {
    pub fn new(n: T, a: T, c: T) -> Result<Self> {
        let crystal = Self { n, a, c };
        crystal.validate()?;
        Ok(crystal)
    }

    /// SI light speed.
    pub fn si(n: T, a: T) -> Result<Self> {
        Self::new(n, a, T::lit(crate::SPEED_OF_LIGHT_SI))
    }

    fn validate(&self) -> Result<()> {
        if !(self.n > T::one()) {
            return Err(Error::InvalidCrystal(format!("refractive index n = {} must exceed 1", self.n)));
        }
        if !(self.a > T::zero()) {
            return Err(Error::InvalidCrystal(format!("half-thickness a = {} must be positive", self.a)));
        }
        if !(self.c > T::zero()) || !self.c.is_finite() {
            return Err(Error::InvalidCrystal(format!("light speed c = {} must be positive", self.c)));
        }
        Ok(())
    }

    /// Vacuum gap between slabs, `b = 2na`.
    pub fn spacing(&self) -> T {
        T::lit(2.0) * self.n * self.a
    }

    /// Lattice period `L = 2a + b = 2a(1 + n)`.
    pub fn period(&self) -> T {
        T::lit(2.0) * self.a * (T::one() + self.n)
    }

    /// Wavenumber of the first gap, `pi / L`.
    pub fn k0(&self) -> T {
        T::PI() / self.period()
    }
}

/// Lower and upper edge of the first gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdges<T> {
    pub omega_l: T,
    pub omega_u: T,
}

impl<T: Real> BandEdges<T> {
    pub fn new(omega_l: T, omega_u: T) -> Result<Self> {
        if !(omega_l > T::zero() && omega_u > omega_l) {
            return Err(Error::InvalidCrystal(format!(
                "band edges must satisfy 0 < omega_l < omega_u (got {omega_l}, {omega_u})"
            )));
        }
        Ok(Self { omega_l, omega_u })
    }

    pub fn width(&self) -> T {
        self.omega_u - self.omega_l
    }

    /// Both edges divided by `unit`.
    pub fn scaled(&self, unit: T) -> Self {
        Self { omega_l: self.omega_l / unit, omega_u: self.omega_u / unit }
    }
}

/// Edges of the first gap for the `b = 2na` crystal:
/// `omega_l = c/(4na) * acos((1+n^2-6n)/(1+n^2+2n))`, `omega_u = 2 pi c/(4na) - omega_l`.
pub fn band_edges<T: Real>(crystal: &CrystalParams<T>) -> Result<BandEdges<T>> {
    crystal.validate()?;
    let n = crystal.n;
    let one = T::one();
    let arg = (one + n * n - T::lit(6.0) * n) / (one + n * n + T::lit(2.0) * n);
    // (1 + n^2 - 6n)/(1 + n)^2 lies in (-1, 1) for every n > 1
    assert!(arg >= -one && arg <= one, "arccos argument {arg} out of range");
    let scale = crystal.c / (T::lit(4.0) * n * crystal.a);
    let omega_l = scale * arg.acos();
    let omega_u = T::lit(2.0) * T::PI() * scale - omega_l;
    BandEdges::new(omega_l, omega_u)
}

/// Effective low-frequency propagation speed `2 omega_l / k0`.
pub fn effective_speed<T: Real>(edges: &BandEdges<T>, k0: T) -> T {
    T::lit(2.0) * edges.omega_l / k0
}

/// Piecewise dispersion relation around the first gap. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionModel<T> {
    edges: BandEdges<T>,
    k0: T,
    curvature: T,
}

/// Which branch a wavenumber falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Below,
    Above,
}

pub fn make_dispersion<T: Real>(edges: BandEdges<T>, k0: T) -> Result<DispersionModel<T>> {
    DispersionModel::new(edges, k0)
}

impl<T: Real> DispersionModel<T> {
    pub fn new(edges: BandEdges<T>, k0: T) -> Result<Self> {
        let edges = BandEdges::new(edges.omega_l, edges.omega_u)?;
        if !(k0 > T::zero()) || !k0.is_finite() {
            return Err(Error::InvalidCrystal(format!("k0 = {k0} must be positive")));
        }
        Ok(Self { edges, k0, curvature: edges.omega_l / (k0 * k0) })
    }

    pub fn from_crystal(crystal: &CrystalParams<T>) -> Result<Self> {
        Self::new(band_edges(crystal)?, crystal.k0())
    }

    /// Same model in reduced units: wavenumbers in `k0`, frequencies in `omega_unit`.
    pub fn reduced(&self, omega_unit: T) -> Result<Self> {
        Self::new(self.edges.scaled(omega_unit), T::one())
    }

    pub fn edges(&self) -> BandEdges<T> {
        self.edges
    }

    pub fn k0(&self) -> T {
        self.k0
    }

    /// Curvature `A` shared by both branches.
    pub fn curvature(&self) -> T {
        self.curvature
    }

    pub fn effective_speed(&self) -> T {
        effective_speed(&self.edges, self.k0)
    }

    pub fn branch(&self, k: T) -> Branch {
        if k <= self.k0 {
            Branch::Below
        } else {
            Branch::Above
        }
    }

    pub fn omega(&self, k: T) -> Result<T> {
        check_k(k)?;
        Ok(self.omega_unchecked(k))
    }

    /// `omega(k)` without the sign check; `k` must be non-negative.
    #[inline]
    pub fn omega_unchecked(&self, k: T) -> T {
        let a = self.curvature;
        if k <= self.k0 {
            a * k * (T::lit(2.0) * self.k0 - k)
        } else {
            let dk = k - self.k0;
            self.edges.omega_u + a * dk * dk
        }
    }

    /// Group velocity `d omega / dk`; one-sided at `k0` (zero from both sides).
    pub fn d_omega_dk(&self, k: T) -> Result<T> {
        check_k(k)?;
        let two_a = T::lit(2.0) * self.curvature;
        Ok(if k <= self.k0 { two_a * (self.k0 - k) } else { two_a * (k - self.k0) })
    }
}

fn check_k<T: Real>(k: T) -> Result<()> {
    if k < T::zero() || k.is_nan() {
        return Err(Error::NegativeWavenumber(k.as_f64()));
    }
    Ok(())
}

/// Convenience: free function form of [`DispersionModel::omega`].
pub fn omega_of_k<T: Real>(model: &DispersionModel<T>, k: T) -> Result<T> {
    model.omega(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference() -> CrystalParams<f64> {
        CrystalParams::si(3.0, 2e-8).unwrap()
    }

    #[test]
    fn reference_edges() {
        let e = band_edges(&reference()).unwrap();
        // mpmath: 2.61618273237340732e15, 5.23236546474681465e15
        assert_relative_eq!(e.omega_l, 2.616_182_732_373_407e15, max_relative = 1e-14);
        assert_relative_eq!(e.omega_u, 5.232_365_464_746_815e15, max_relative = 1e-14);
        assert!((e.omega_l - 2.61e15).abs() <= 0.01e15);
        assert!((e.omega_u - 5.23e15).abs() <= 0.01e15);
    }

    #[test]
    fn n3_arccos_is_two_thirds_pi() {
        let c = reference();
        let e = band_edges(&c).unwrap();
        let expected = c.c / (4.0 * 3.0 * 2e-8) * (2.0 * std::f64::consts::PI / 3.0);
        assert_relative_eq!(e.omega_l, expected, max_relative = 1e-14);
        // with n = 3 the gap is exactly as wide as omega_l
        assert_relative_eq!(e.width(), e.omega_l, max_relative = 1e-14);
    }

    #[test]
    fn effective_speed_is_eight_ninths_c() {
        let c = reference();
        let m = DispersionModel::from_crystal(&c).unwrap();
        assert_relative_eq!(m.effective_speed() / c.c, 8.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_crystals() {
        assert!(matches!(CrystalParams::si(1.0, 2e-8), Err(Error::InvalidCrystal(_))));
        assert!(matches!(CrystalParams::si(3.0, 0.0), Err(Error::InvalidCrystal(_))));
        let raw = CrystalParams { n: 0.5, a: 1.0, c: 1.0 };
        assert!(band_edges(&raw).is_err());
    }

    #[test]
    fn branch_values() {
        let m = DispersionModel::from_crystal(&reference()).unwrap();
        let (k0, e) = (m.k0(), m.edges());
        assert_eq!(m.omega(0.0).unwrap(), 0.0);
        assert_relative_eq!(m.omega(k0).unwrap(), e.omega_l, max_relative = 1e-15);
        assert_relative_eq!(m.omega(0.5 * k0).unwrap(), 0.75 * e.omega_l, max_relative = 1e-15);
        assert_relative_eq!(m.omega(1.5 * k0).unwrap(), e.omega_u + e.omega_l / 4.0, max_relative = 1e-15);
        assert!(m.omega(k0 * (1.0 + 1e-12)).unwrap() >= e.omega_u);
        assert_eq!(m.d_omega_dk(k0).unwrap(), 0.0);
        assert!(matches!(m.omega(-1.0), Err(Error::NegativeWavenumber(_))));
    }

    #[test]
    fn curvature_identity() {
        let m = DispersionModel::from_crystal(&reference()).unwrap();
        assert_relative_eq!(m.curvature() * m.k0() * m.k0(), m.edges().omega_l, max_relative = 1e-15);
    }

    #[test]
    fn gap_is_empty_dense() {
        let m = DispersionModel::from_crystal(&reference()).unwrap();
        let e = m.edges();
        for i in 0..=20_000 {
            let k = m.k0() * 2.0 * i as f64 / 20_000.0;
            let w = m.omega(k).unwrap();
            assert!(!(w > e.omega_l && w < e.omega_u), "k = {k} maps into the gap");
        }
    }

    #[test]
    fn works_in_f32() {
        let c = CrystalParams::<f32>::new(3.0, 1.0, 1.0).unwrap();
        let m = DispersionModel::from_crystal(&c).unwrap();
        assert!((m.omega(m.k0()).unwrap() - m.edges().omega_l).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn monotone_below_gap(n in 1.01f64..6.0, i in 0usize..999) {
            let c = CrystalParams::new(n, 1.0, 1.0).unwrap();
            let m = DispersionModel::from_crystal(&c).unwrap();
            let k1 = m.k0() * i as f64 / 1000.0;
            let k2 = m.k0() * (i + 1) as f64 / 1000.0;
            prop_assert!(m.omega(k2).unwrap() > m.omega(k1).unwrap());
            prop_assert!(m.d_omega_dk(k1).unwrap() >= 0.0);
        }

        #[test]
        fn scaling_covariance(n in 1.01f64..6.0, lambda in 0.1f64..10.0) {
            let base = CrystalParams::new(n, 1.0, 1.0).unwrap();
            let scaled = CrystalParams::new(n, lambda, 1.0).unwrap();
            let (e1, e2) = (band_edges(&base).unwrap(), band_edges(&scaled).unwrap());
            prop_assert!((e2.omega_l * lambda / e1.omega_l - 1.0).abs() < 1e-13);
            prop_assert!((e2.omega_u * lambda / e1.omega_u - 1.0).abs() < 1e-13);
            prop_assert!((scaled.k0() * lambda / base.k0() - 1.0).abs() < 1e-13);
        }
    }
}
