//! Invariant suite run by `pbgres validate`: quadrature against closed forms,
//! the dyadic operator against finite differences, envelope fits of synthetic
//! laws, and exact symmetries of the configured setup.

use std::f64::consts::PI;

use crate::analysis::{fit_envelope, linear_grid, Emitter, Setup};
use crate::asymptotics::{gamma1, gamma3};
use crate::interaction::{delta_e_numeric, BandSelector};
use crate::quadrature::{integrate_oscillatory, OscillatorKind, OscillatorySpec, QuadratureOptions};
use crate::tensor3d::{dyadic_apply, finite_difference_operator, mode_tensor, RadialFn, Tensor3};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }

    fn within(name: impl Into<String>, err: f64, tol: f64) -> Self {
        Self::new(name, err <= tol, format!("rel err {err:.2e} (tol {tol:.0e})"))
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn quadrature_checks(out: &mut Vec<Check>) {
    let k0 = 1.0;
    let opts = QuadratureOptions::default().with_rel_tol(1e-12);
    for &phase in &[1.0, 10.0, 100.0, 1e4] {
        let r = phase / k0;
        let tol = if phase > 1e3 { 1e-8 } else { 1e-10 };
        let spec = |kind| OscillatorySpec::new(kind, r, 0.0, k0).with_options(opts);
        let cases: [(&str, f64, f64); 3] = [
            (
                "int cos(kr)",
                integrate_oscillatory(|_| 1.0, &spec(OscillatorKind::CosineProduct)).map_or(f64::NAN, |q| q.value),
                phase.sin() / r,
            ),
            (
                "int sin(kr)",
                integrate_oscillatory(|_| 1.0, &spec(OscillatorKind::SineProduct)).map_or(f64::NAN, |q| q.value),
                (1.0 - phase.cos()) / r,
            ),
            (
                "int k cos(kr)",
                integrate_oscillatory(|k| k, &spec(OscillatorKind::CosineProduct)).map_or(f64::NAN, |q| q.value),
                (phase.cos() - 1.0) / (r * r) + k0 * phase.sin() / r,
            ),
        ];
        for (name, got, exact) in cases {
            out.push(Check::within(format!("quadrature {name}, k0 r = {phase}"), rel(got, exact), tol));
        }
    }
}

fn tensor_checks(out: &mut Vec<Check>) {
    let norm_rel = |a: &Tensor3<f64>, b: &Tensor3<f64>| (*a - *b).norm() / b.norm();
    let k = 1.3;
    let r = 10.0 / k;
    let h = 1e-3 / k;
    let r_hat = [0.48, -0.6, 0.64];

    let sinc = |x: f64| (k * x).sin() / (k * x);
    let err =
        mode_tensor(k, r, &r_hat).map_or(f64::NAN, |t| norm_rel(&t, &finite_difference_operator(&sinc, r, &r_hat, h)));
    out.push(Check::within("tensor sin(kr)/(kr) vs finite differences", err, 1e-6));

    let coulomb = RadialFn { g: |x: f64| 1.0 / x, d1: |x: f64| -1.0 / (x * x), d2: |x: f64| 2.0 / (x * x * x) };
    let t = dyadic_apply(&coulomb, r, &r_hat).unwrap_or_else(|_| Tensor3::zero());
    let err = norm_rel(&t, &finite_difference_operator(&|x| 1.0 / x, r, &r_hat, h));
    out.push(Check::within("tensor 1/r vs finite differences", err, 1e-6));
    let kernel = (Tensor3::outer(&r_hat, &r_hat) * 3.0 - Tensor3::identity()) * (1.0 / r.powi(3));
    out.push(Check::within("tensor 1/r vs (3 rr - delta)/r^3", norm_rel(&t, &kernel), 1e-12));

    let cosr = RadialFn {
        g: move |x: f64| (k * x).cos() / x,
        d1: move |x: f64| -k * (k * x).sin() / x - (k * x).cos() / (x * x),
        d2: move |x: f64| {
            -k * k * (k * x).cos() / x + 2.0 * k * (k * x).sin() / (x * x) + 2.0 * (k * x).cos() / x.powi(3)
        },
    };
    let err = dyadic_apply(&cosr, r, &r_hat)
        .map_or(f64::NAN, |t| norm_rel(&t, &finite_difference_operator(&|x| (k * x).cos() / x, r, &r_hat, h)));
    out.push(Check::within("tensor cos(kr)/r vs finite differences", err, 1e-6));
}

type Law = (&'static str, f64, Box<dyn Fn(f64) -> f64>);

fn envelope_checks(out: &mut Vec<Check>) {
    let k0 = 1.7;
    let laws: [Law; 3] = [
        ("cos(k0 r)/(k0 r)^2", -2.0, Box::new(move |x: f64| (k0 * x).cos() / (k0 * x).powi(2))),
        ("sin(k0 r)/r", -1.0, Box::new(move |x: f64| (k0 * x).sin() / x)),
        ("sin(k0 r)", 0.0, Box::new(move |x: f64| (k0 * x).sin())),
    ];
    for (name, exponent, f) in laws {
        let samples: Vec<(f64, f64)> =
            linear_grid(100.0 / k0, 1000.0 / k0, 4000).into_iter().map(|x| (x, f(x))).collect();
        match fit_envelope(&samples) {
            Ok(fit) => {
                let period_err = rel(fit.period, 2.0 * PI / k0);
                out.push(Check::new(
                    format!("envelope fit {name}"),
                    (fit.exponent - exponent).abs() <= 0.02 && period_err <= 0.01,
                    format!("exponent {:.4} (expected {exponent}), period rel err {period_err:.1e}", fit.exponent),
                ));
            }
            Err(e) => out.push(Check::new(format!("envelope fit {name}"), false, e.to_string())),
        }
    }
}

fn constant_checks(out: &mut Vec<Check>) {
    let positive = (1..1000).all(|i| {
        let a = 1e-6 + (1.0 - 2e-6) * i as f64 / 1000.0;
        matches!((gamma1(a), gamma3(a)), (Ok(g1), Ok(g3)) if g1 > 0.0 && g3 > 0.0)
    });
    out.push(Check::new("Gamma_1, Gamma_3 positive on (1e-6, 1 - 1e-6)", positive, "999 grid points"));
}

fn symmetry_checks(setup: &Setup, out: &mut Vec<Check>) {
    let model = match setup.reduced_model() {
        Ok(m) => m,
        Err(e) => {
            out.push(Check::new("reduced model", false, e.to_string()));
            return;
        }
    };
    let x = 150.0;
    let outcome = setup.pair_at(x).and_then(|pair| {
        let sym = delta_e_numeric(&pair, &model, BandSelector::Both, &setup.options)?;
        let anti =
            delta_e_numeric(&pair.with_symmetry(pair.symmetry.flipped()), &model, BandSelector::Both, &setup.options)?;
        Ok((sym, anti))
    });
    match outcome {
        Ok((sym, anti)) => {
            out.push(Check::new(
                "symmetry swap negates the energy exactly",
                sym.value == -anti.value,
                format!("{:e} vs {:e}", sym.value, anti.value),
            ));
            let b = sym.band_breakdown;
            let sum = b.below_gap.unwrap_or(f64::NAN) + b.above_gap.unwrap_or(f64::NAN);
            let gap = (sum - sym.value).abs();
            out.push(Check::new(
                "band additivity within quadrature error",
                gap <= sym.abs_error().max(f64::EPSILON * sym.value.abs() * 4.0),
                format!("|below + above - both| = {gap:.1e}, error {:.1e}", sym.abs_error()),
            ));
        }
        Err(e) => out.push(Check::new("symmetry swap", false, e.to_string())),
    }

    let mut longitudinal = *setup;
    longitudinal.emitter = Emitter::ThreeD { dipole: [0.0, 0.0, 1.0], r_hat: [0.0, 0.0, 1.0] };
    let value = longitudinal.asymptotic(x);
    out.push(Check::new(
        "longitudinal 3D asymptotic energy is zero",
        matches!(value, Ok(v) if v == 0.0),
        match value {
            Ok(v) => format!("{v:e}"),
            Err(e) => e.to_string(),
        },
    ));
}

/// Runs every check. Order is fixed.
pub fn validation_suite(setup: &Setup) -> Vec<Check> {
    let mut out = Vec::new();
    quadrature_checks(&mut out);
    tensor_checks(&mut out);
    envelope_checks(&mut out);
    constant_checks(&mut out);
    symmetry_checks(setup, &mut out);
    out
}
