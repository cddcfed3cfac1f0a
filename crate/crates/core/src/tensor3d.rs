//! The dyadic operator `(-nabla^2 delta_lm + nabla_l nabla_m)` acting on
//! spherically symmetric functions, and its per-mode form for
//! `g_k(r) = sin(kr)/(kr)`.
//!
//! For radial `g`, `nabla_l nabla_m g = rr g'' + (delta - rr) g'/r` and
//! `nabla^2 g = g'' + 2 g'/r`, where `rr` is the outer product of the unit
//! separation vector with itself.

use std::ops::{Add, Mul, Sub};

use crate::{Error, Real, Result};

/// 3x3 real tensor, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor3<T>(pub [[T; 3]; 3]);

impl<T: Real> Tensor3<T> {
    pub fn zero() -> Self {
        Self([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            t.0[i][i] = T::one();
        }
        t
    }

    pub fn outer(u: &[T; 3], v: &[T; 3]) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = u[i] * v[j];
            }
        }
        t
    }

    /// `a * delta + b * (r_hat r_hat)`, symmetric by construction.
    pub fn isotropic_plus_axial(a: T, b: T, r_hat: &[T; 3]) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in i..3 {
                let v = if i == j { a } else { T::zero() } + b * r_hat[i] * r_hat[j];
                t.0[i][j] = v;
                t.0[j][i] = v;
            }
        }
        t
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// `u . T . v`
    pub fn contract(&self, u: &[T; 3], v: &[T; 3]) -> T {
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s = s + u[i] * self.0[i][j] * v[j];
            }
        }
        s
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = T::zero();
                for k in 0..3 {
                    s = s + self.0[i][k] * other.0[k][j];
                }
                t.0[i][j] = s;
            }
        }
        t
    }

    pub fn apply(&self, v: &[T; 3]) -> [T; 3] {
        let mut out = [T::zero(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v[0] + self.0[i][1] * v[1] + self.0[i][2] * v[2];
        }
        out
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        let mut t = *self;
        t.0.iter_mut().flatten().for_each(|x| *x = *x * s);
        t
    }
}

impl<T: Real> Add for Tensor3<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        self
    }
}

impl<T: Real> Sub for Tensor3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-T::one())
    }
}

impl<T: Real> Mul<T> for Tensor3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

/// Spherically symmetric scalar with its first two radial derivatives.
pub trait RadialFunction<T> {
    fn value(&self, r: T) -> T;
    fn first(&self, r: T) -> T;
    fn second(&self, r: T) -> T;
}

/// A [`RadialFunction`] from three closures `g, g', g''`.
pub struct RadialFn<G, D1, D2> {
    pub g: G,
    pub d1: D1,
    pub d2: D2,
}

impl<T, G, D1, D2> RadialFunction<T> for RadialFn<G, D1, D2>
where
    G: Fn(T) -> T,
    D1: Fn(T) -> T,
    D2: Fn(T) -> T,
{
    fn value(&self, r: T) -> T {
        (self.g)(r)
    }
    fn first(&self, r: T) -> T {
        (self.d1)(r)
    }
    fn second(&self, r: T) -> T {
        (self.d2)(r)
    }
}

/// `sin(kr)/(kr)` with analytic derivatives (spherical Bessel `j0`).
#[derive(Debug, Clone, Copy)]
pub struct SincProfile<T> {
    pub k: T,
}

// below this |kr| the closed forms lose digits to cancellation
const SERIES_CUTOFF: f64 = 0.05;

fn j0<T: Real>(x: T) -> T {
    if x.abs() < T::lit(SERIES_CUTOFF) {
        let x2 = x * x;
        T::one() - x2 / T::lit(6.0) * (T::one() - x2 / T::lit(20.0) * (T::one() - x2 / T::lit(42.0)))
    } else {
        x.sin() / x
    }
}

fn j0_prime<T: Real>(x: T) -> T {
    if x.abs() < T::lit(SERIES_CUTOFF) {
        let x2 = x * x;
        x * (-T::one() / T::lit(3.0) + x2 / T::lit(30.0) - x2 * x2 / T::lit(840.0) + x2 * x2 * x2 / T::lit(45360.0))
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

fn j0_second<T: Real>(x: T) -> T {
    if x.abs() < T::lit(SERIES_CUTOFF) {
        let x2 = x * x;
        -T::one() / T::lit(3.0) + x2 / T::lit(10.0) - x2 * x2 / T::lit(168.0) + x2 * x2 * x2 / T::lit(6480.0)
    } else {
        -j0(x) - T::lit(2.0) * j0_prime(x) / x
    }
}

impl<T: Real> RadialFunction<T> for SincProfile<T> {
    fn value(&self, r: T) -> T {
        j0(self.k * r)
    }
    fn first(&self, r: T) -> T {
        self.k * j0_prime(self.k * r)
    }
    fn second(&self, r: T) -> T {
        self.k * self.k * j0_second(self.k * r)
    }
}

/// `(-nabla^2 delta_lm + nabla_l nabla_m) g` at `r * r_hat`.
pub fn dyadic_apply<T: Real, G: RadialFunction<T> + ?Sized>(g: &G, r: T, r_hat: &[T; 3]) -> Result<Tensor3<T>> {
    if !(r > T::zero()) {
        return Err(Error::ZeroSeparation);
    }
    let d1_over_r = g.first(r) / r;
    let d2 = g.second(r);
    let laplacian = d2 + T::lit(2.0) * d1_over_r;
    // -lap delta + (delta - rr) g'/r + rr g''
    Ok(Tensor3::isotropic_plus_axial(d1_over_r - laplacian, d2 - d1_over_r, r_hat))
}

/// Operator applied to the single mode `sin(kr)/(kr)`.
pub fn mode_tensor<T: Real>(k: T, r: T, r_hat: &[T; 3]) -> Result<Tensor3<T>> {
    if !(k > T::zero()) {
        return Err(Error::NegativeWavenumber(k.as_f64()));
    }
    dyadic_apply(&SincProfile { k }, r, r_hat)
}

/// The mode tensor split as `sine * sin(kr) + cosine * cos(kr)`:
/// `sine = (k/r)(delta - rr) + (3rr - delta)/(k r^3)`, `cosine = (delta - 3rr)/r^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTensorParts<T> {
    pub sine: Tensor3<T>,
    pub cosine: Tensor3<T>,
}

impl<T: Real> ModeTensorParts<T> {
    pub fn evaluate(&self, k: T, r: T) -> Tensor3<T> {
        let phase = k * r;
        self.sine * phase.sin() + self.cosine * phase.cos()
    }
}

pub fn mode_tensor_parts<T: Real>(k: T, r: T, r_hat: &[T; 3]) -> Result<ModeTensorParts<T>> {
    if !(r > T::zero()) {
        return Err(Error::ZeroSeparation);
    }
    if !(k > T::zero()) {
        return Err(Error::NegativeWavenumber(k.as_f64()));
    }
    let three = T::lit(3.0);
    let transverse = k / r;
    let near = T::one() / (k * r * r * r);
    let sine = Tensor3::isotropic_plus_axial(transverse - near, three * near - transverse, r_hat);
    let r2 = r * r;
    let cosine = Tensor3::isotropic_plus_axial(T::one() / r2, -three / r2, r_hat);
    Ok(ModeTensorParts { sine, cosine })
}

/// Projections of a dipole onto the two angular structures of the mode
/// tensor: `transverse = mu.(delta - rr).mu`, `static = mu.(3rr - delta).mu`.
/// Then `mu.sine.mu = transverse k/r + static/(k r^3)` and
/// `mu.cosine.mu = -static/r^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleProjections<T> {
    pub transverse: T,
    pub static_: T,
}

impl<T: Real> DipoleProjections<T> {
    pub fn new(mu: &[T; 3], r_hat: &[T; 3]) -> Self {
        let mm = mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2];
        let along = mu[0] * r_hat[0] + mu[1] * r_hat[1] + mu[2] * r_hat[2];
        let along2 = along * along;
        Self { transverse: mm - along2, static_: T::lit(3.0) * along2 - mm }
    }
}

/// Second-order central differences of `phi(x) = g(|x|)` in Cartesian
/// coordinates, assembled into `-lap(phi) delta + hess(phi)`.
pub fn finite_difference_operator(g: &dyn Fn(f64) -> f64, r: f64, r_hat: &[f64; 3], h: f64) -> Tensor3<f64> {
    let x0 = [r * r_hat[0], r * r_hat[1], r * r_hat[2]];
    let phi = |d: [f64; 3]| {
        let p = [x0[0] + d[0], x0[1] + d[1], x0[2] + d[2]];
        g((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
    };
    let unit = |i: usize, s: f64| {
        let mut e = [0.0; 3];
        e[i] = s;
        e
    };
    let mut hess = Tensor3::zero();
    for i in 0..3 {
        for j in 0..3 {
            hess.0[i][j] = if i == j {
                (phi(unit(i, h)) - 2.0 * phi([0.0; 3]) + phi(unit(i, -h))) / (h * h)
            } else {
                let d = |si: f64, sj: f64| {
                    let mut e = unit(i, si * h);
                    e[j] += sj * h;
                    phi(e)
                };
                (d(1.0, 1.0) - d(1.0, -1.0) - d(-1.0, 1.0) + d(-1.0, -1.0)) / (4.0 * h * h)
            };
        }
    }
    Tensor3::identity() * (-hess.trace()) + hess
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Z: [f64; 3] = [0.0, 0.0, 1.0];
    const X: [f64; 3] = [1.0, 0.0, 0.0];

    fn rel_diff(a: &Tensor3<f64>, b: &Tensor3<f64>) -> f64 {
        (*a - *b).norm() / b.norm()
    }

    fn coulomb() -> RadialFn<impl Fn(f64) -> f64, impl Fn(f64) -> f64, impl Fn(f64) -> f64> {
        RadialFn { g: |r: f64| 1.0 / r, d1: |r: f64| -1.0 / (r * r), d2: |r: f64| 2.0 / (r * r * r) }
    }

    #[test]
    fn static_dipole_kernel() {
        let r = 1.7;
        let t = dyadic_apply(&coulomb(), r, &Z).unwrap();
        let expected = (Tensor3::outer(&Z, &Z) * 3.0 - Tensor3::identity()) * (1.0 / (r * r * r));
        assert!(rel_diff(&t, &expected) < 1e-12);
        assert_eq!(t.0[0][0], t.0[1][1]);
        assert!((t.0[2][2] * r.powi(3) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_gives_zero() {
        let g = RadialFn { g: |_: f64| 4.0, d1: |_: f64| 0.0, d2: |_: f64| 0.0 };
        assert_eq!(dyadic_apply(&g, 2.0, &X).unwrap(), Tensor3::zero());
    }

    #[test]
    fn zero_separation() {
        assert_eq!(dyadic_apply(&coulomb(), 0.0, &Z), Err(Error::ZeroSeparation));
        assert!(mode_tensor_parts(1.0, 0.0, &Z).is_err());
    }

    #[test]
    fn finite_difference_agreement() {
        let k = 1.3;
        let r = 10.0 / k;
        let h = 1e-3 / k;
        let r_hat = [0.48, -0.6, 0.64];
        let sinc = |r: f64| (k * r).sin() / (k * r);
        let t = mode_tensor(k, r, &r_hat).unwrap();
        assert!(rel_diff(&t, &finite_difference_operator(&sinc, r, &r_hat, h)) < 1e-6);

        let t = dyadic_apply(&coulomb(), r, &r_hat).unwrap();
        assert!(rel_diff(&t, &finite_difference_operator(&|r| 1.0 / r, r, &r_hat, h)) < 1e-6);

        let cosr = RadialFn {
            g: |r: f64| (k * r).cos() / r,
            d1: |r: f64| -k * (k * r).sin() / r - (k * r).cos() / (r * r),
            d2: |r: f64| {
                -k * k * (k * r).cos() / r + 2.0 * k * (k * r).sin() / (r * r) + 2.0 * (k * r).cos() / r.powi(3)
            },
        };
        let t = dyadic_apply(&cosr, r, &r_hat).unwrap();
        assert!(rel_diff(&t, &finite_difference_operator(&|r| (k * r).cos() / r, r, &r_hat, h)) < 1e-6);
    }

    #[test]
    fn sinc_series_matches_closed_form_at_cutoff() {
        for &x in &[0.049_999f64, 0.050_001] {
            let p = SincProfile { k: 1.0 };
            assert!((p.value(x) - x.sin() / x).abs() < 1e-15);
            assert!((p.first(x) - (x * x.cos() - x.sin()) / (x * x)).abs() < 1e-12);
        }
        let p = SincProfile { k: 1.0 };
        assert!((p.second(1e-8) + 1.0f64 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn parts_recombine_to_mode_tensor() {
        let r_hat = [0.0, 0.6, 0.8];
        for &(k, r) in &[(0.3, 2.0), (1.0, 10.0), (2.0, 400.0)] {
            let full = mode_tensor(k, r, &r_hat).unwrap();
            let parts = mode_tensor_parts(k, r, &r_hat).unwrap().evaluate(k, r);
            assert!(rel_diff(&parts, &full) < 1e-12, "k={k} r={r}");
        }
    }

    #[test]
    fn projections_match_parts() {
        let mu = [0.3, -1.1, 0.7];
        let r_hat = [0.0, 0.6, 0.8];
        let (k, r) = (0.7f64, 13.0f64);
        let parts = mode_tensor_parts(k, r, &r_hat).unwrap();
        let p = DipoleProjections::new(&mu, &r_hat);
        let s = p.transverse * k / r + p.static_ / (k * r.powi(3));
        assert!((parts.sine.contract(&mu, &mu) - s).abs() < 1e-14);
        assert!((parts.cosine.contract(&mu, &mu) + p.static_ / (r * r)).abs() < 1e-14);
    }

    #[test]
    fn transverse_dominance_at_large_kr() {
        let k = 1.0;
        let r = 1e3;
        let t = mode_tensor(k, r, &Z).unwrap();
        let scale = k * k * (k * r).sin() / (k * r);
        assert!((t.0[0][0] / scale - 1.0).abs() < 2.0 / (k * r));
        // longitudinal part is down by one power of kr
        let transverse_envelope = k * k / (k * r);
        assert!(t.0[2][2].abs() < 3.0 * transverse_envelope / (k * r));
        assert!(t.0[2][2].abs() > 0.1 * transverse_envelope / (k * r));
    }

    #[test]
    fn x_vs_z_axis_is_a_rotation() {
        // rotation about y by +90 degrees maps z to x
        let rot = Tensor3([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]]);
        assert_eq!(rot.apply(&Z), X);
        let tz = mode_tensor(0.9, 5.0, &Z).unwrap();
        let tx = mode_tensor(0.9, 5.0, &X).unwrap();
        assert!(rel_diff(&tx, &rot.matmul(&tz).matmul(&rot.transpose())) < 1e-14);
    }

    fn rotation(axis: [f64; 3], angle: f64) -> Tensor3<f64> {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let u = [axis[0] / n, axis[1] / n, axis[2] / n];
        let (s, c) = angle.sin_cos();
        let cross = Tensor3([[0.0, -u[2], u[1]], [u[2], 0.0, -u[0]], [-u[1], u[0], 0.0]]);
        Tensor3::identity() * c + cross * s + Tensor3::outer(&u, &u) * (1.0 - c)
    }

    proptest! {
        #[test]
        fn symmetric_and_rotation_covariant(
            ax in prop::array::uniform3(-1.0f64..1.0),
            angle in 0.0..std::f64::consts::TAU,
            theta in 0.0..std::f64::consts::PI,
            phi in 0.0..std::f64::consts::TAU,
            k in 0.01f64..3.0,
            r in 0.1f64..200.0,
        ) {
            prop_assume!(ax.iter().map(|a| a * a).sum::<f64>() > 1e-3);
            let r_hat = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let t = mode_tensor(k, r, &r_hat).unwrap();
            prop_assert_eq!(t, t.transpose());
            let rot = rotation(ax, angle);
            let rotated = mode_tensor(k, r, &rot.apply(&r_hat)).unwrap();
            let expected = rot.matmul(&t).matmul(&rot.transpose());
            prop_assert!((rotated - expected).norm() <= 1e-12 * t.norm().max(1e-300));
        }
    }
}
