//! Run configuration: a flat `key = value` document with dotted keys
//! (`crystal.n = 3`), parsed as TOML. Missing keys take the reference values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{linear_grid, Emitter, Setup, DEFAULT_HALF_THICKNESS, DEFAULT_INDEX, DEFAULT_OMEGA_A};
use crate::dispersion::{band_edges, CrystalParams};
use crate::interaction::{EnergyOptions, DEFAULT_ABOVE_UPPER};
use crate::quadrature::{QuadratureOptions, DEFAULT_MAX_PANELS, DEFAULT_REL_TOL};
use crate::{BandSelector, Symmetry, SPEED_OF_LIGHT_SI};

/// Transition dipole used when none is given, statC cm (2.54 debye).
pub const DEFAULT_DIPOLE: f64 = 2.54e-18;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    /// `k0 r`
    Reduced,
    Meters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputUnits {
    Reduced,
    Si,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrystalSection {
    pub n: f64,
    /// Slab half-thickness, metres.
    pub a: f64,
}

impl Default for CrystalSection {
    fn default() -> Self {
        Self { n: DEFAULT_INDEX, a: DEFAULT_HALF_THICKNESS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsSection {
    /// Vacuum speed of light, m/s.
    pub c: f64,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        Self { c: SPEED_OF_LIGHT_SI }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitterSection {
    /// Atomic transition frequency, 1/s.
    pub omega_a: f64,
    /// 1 or 3.
    pub dimension: u8,
    pub symmetry: Symmetry,
    /// Transition dipole (3D), statC cm.
    pub dipole: [f64; 3],
    /// Unit vector from emitter A to emitter B (3D).
    pub r_hat: [f64; 3],
    /// Effective squared transverse dipole (1D), erg cm.
    pub p_perp_sq: f64,
}

impl Default for EmitterSection {
    fn default() -> Self {
        Self {
            omega_a: DEFAULT_OMEGA_A,
            dimension: 3,
            symmetry: Symmetry::Symmetric,
            dipole: [DEFAULT_DIPOLE, 0.0, 0.0],
            r_hat: [0.0, 0.0, 1.0],
            p_perp_sq: DEFAULT_DIPOLE * DEFAULT_DIPOLE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandSection {
    pub selection: BandSelector,
    /// Upper end of the above-gap window, units of `k0`.
    pub above_upper: f64,
}

impl Default for BandSection {
    fn default() -> Self {
        Self { selection: BandSelector::BelowGap, above_upper: DEFAULT_ABOVE_UPPER }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub units: LengthUnit,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { r_min: 100.0, r_max: 1000.0, points: 2000, units: LengthUnit::Reduced }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSection {
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        Self { rel_tol: DEFAULT_REL_TOL, max_panels: DEFAULT_MAX_PANELS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub units: OutputUnits,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { format: OutputFormat::Csv, path: None, units: OutputUnits::Reduced }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub crystal: CrystalSection,
    pub constants: ConstantsSection,
    pub emitter: EmitterSection,
    pub band: BandSection,
    pub sweep: SweepSection,
    pub quadrature: QuadratureSection,
    pub output: OutputSection,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
    config.validate()?;
    Ok(config)
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} must be positive and finite")))
    }
}

impl RunConfig {
    /// Serialized form; parses back to an identical config.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("crystal.n", self.crystal.n)?;
        positive("crystal.a", self.crystal.a)?;
        positive("constants.c", self.constants.c)?;
        positive("emitter.omega_a", self.emitter.omega_a)?;
        let crystal = self.crystal_params()?;
        let edges = band_edges(&crystal).map_err(|e| invalid(e.to_string()))?;
        let omega_a = self.emitter.omega_a;
        if omega_a <= edges.omega_l {
            return Err(invalid(format!(
                "emitter.omega_a = {omega_a:.4e} 1/s is below lower band edge {:.4e} 1/s (upper edge {:.4e} 1/s)",
                edges.omega_l, edges.omega_u
            )));
        }
        if omega_a >= edges.omega_u {
            return Err(invalid(format!(
                "emitter.omega_a = {omega_a:.4e} 1/s is above upper band edge {:.4e} 1/s (lower edge {:.4e} 1/s)",
                edges.omega_u, edges.omega_l
            )));
        }
        match self.emitter.dimension {
            3 => {
                let d = self.emitter.dipole;
                let norm2 = d.iter().map(|x| x * x).sum::<f64>();
                if !(norm2 > 0.0 && norm2.is_finite()) {
                    return Err(invalid("emitter.dipole must be a non-zero finite vector"));
                }
                let r = self.emitter.r_hat;
                let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !((rn - 1.0).abs() < 1e-9) {
                    return Err(invalid(format!("emitter.r_hat must be a unit vector (norm {rn})")));
                }
            }
            1 => positive("emitter.p_perp_sq", self.emitter.p_perp_sq)?,
            d => return Err(invalid(format!("emitter.dimension = {d} must be 1 or 3"))),
        }
        if !(self.band.above_upper > 1.0 && self.band.above_upper.is_finite()) {
            return Err(invalid(format!("band.above_upper = {} must exceed 1", self.band.above_upper)));
        }
        positive("sweep.r_min", self.sweep.r_min)?;
        positive("sweep.r_max", self.sweep.r_max)?;
        if self.sweep.points == 0 {
            return Err(invalid("sweep.points must be at least 1"));
        }
        if self.sweep.points > 1 && !(self.sweep.r_min < self.sweep.r_max) {
            return Err(invalid(format!(
                "sweep.r_min = {} must be below sweep.r_max = {}",
                self.sweep.r_min, self.sweep.r_max
            )));
        }
        if !(self.quadrature.rel_tol > 0.0 && self.quadrature.rel_tol <= 1e-2) {
            return Err(invalid(format!("quadrature.rel_tol = {} must lie in (0, 1e-2]", self.quadrature.rel_tol)));
        }
        if self.quadrature.max_panels < 1 {
            return Err(invalid("quadrature.max_panels must be at least 1"));
        }
        Ok(())
    }

    pub fn crystal_params(&self) -> Result<CrystalParams<f64>, ConfigError> {
        CrystalParams::new(self.crystal.n, self.crystal.a, self.constants.c).map_err(|e| invalid(e.to_string()))
    }

    /// The physical setup in the form the analysis layer consumes. Dipoles are
    /// passed through unnormalized; reduced energies do not depend on their size.
    pub fn setup(&self) -> Result<Setup, ConfigError> {
        let emitter = match self.emitter.dimension {
            1 => Emitter::OneD { p_perp_sq: self.emitter.p_perp_sq },
            _ => Emitter::ThreeD { dipole: self.emitter.dipole, r_hat: self.emitter.r_hat },
        };
        let quadrature = QuadratureOptions {
            rel_tol: self.quadrature.rel_tol,
            max_panels: self.quadrature.max_panels,
            ..QuadratureOptions::default()
        };
        Ok(Setup {
            crystal: self.crystal_params()?,
            omega_a: self.emitter.omega_a,
            emitter,
            symmetry: self.emitter.symmetry,
            band: self.band.selection,
            options: EnergyOptions { quadrature, above_upper: self.band.above_upper },
        })
    }

    pub fn k0(&self) -> f64 {
        std::f64::consts::PI / (2.0 * self.crystal.a * (1.0 + self.crystal.n))
    }

    /// Sweep grid in `k0 r`.
    pub fn grid(&self) -> Vec<f64> {
        let scale = match self.sweep.units {
            LengthUnit::Reduced => 1.0,
            LengthUnit::Meters => self.k0(),
        };
        linear_grid(self.sweep.r_min * scale, self.sweep.r_max * scale, self.sweep.points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_reference_config() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.crystal.n, 3.0);
        assert_eq!(c.crystal.a, 2e-8);
        assert_eq!(c.emitter.omega_a, 2.65e15);
    }

    #[test]
    fn dotted_keys() {
        let c = parse_config("crystal.n = 3.0\nemitter.dimension = 1 # comment\nsweep.points = 5\n").unwrap();
        assert_eq!(c.emitter.dimension, 1);
        assert_eq!(c.sweep.points, 5);
        let c = parse_config("emitter.symmetry = \"antisymmetric\"\nband.selection = \"both\"").unwrap();
        assert_eq!(c.emitter.symmetry, Symmetry::Antisymmetric);
        assert_eq!(c.band.selection, BandSelector::Both);
    }

    #[test]
    fn omega_below_edge_is_rejected_with_edge_value() {
        let err = parse_config("emitter.omega_a = 2.0e15").unwrap_err();
        match err {
            ConfigError::Validation(msg) => {
                assert!(msg.contains("below lower band edge 2.6162e15"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        assert!(
            matches!(parse_config("emitter.omega_a = 6e15"), Err(ConfigError::Validation(m)) if m.contains("upper"))
        );
    }

    #[test]
    fn invariant_violations() {
        for doc in [
            "sweep.points = 0",
            "sweep.r_min = 0.0",
            "sweep.r_min = -1.0",
            "sweep.r_min = 10.0\nsweep.r_max = 5.0",
            "crystal.n = -3.0",
            "emitter.dimension = 2",
            "emitter.dipole = [0.0, 0.0, 0.0]",
            "emitter.r_hat = [1.0, 1.0, 0.0]",
            "quadrature.rel_tol = 0.5",
            "band.above_upper = 1.0",
        ] {
            assert!(matches!(parse_config(doc), Err(ConfigError::Validation(_))), "{doc}");
        }
    }

    #[test]
    fn malformed_documents() {
        for doc in ["crystal.n = ", "crystal.n = \"three\"", "nonsense.key = 1", "crystal.q = 1.0", "= 3"] {
            assert!(matches!(parse_config(doc), Err(ConfigError::Parse(_))), "{doc}");
        }
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::default();
        c.crystal.a = 2.3e-8;
        c.emitter.omega_a = 2.7e15;
        c.emitter.dipole = [0.1, 0.2, 0.3];
        c.emitter.symmetry = Symmetry::Antisymmetric;
        c.sweep.units = LengthUnit::Meters;
        c.sweep.r_min = 1e-6;
        c.sweep.r_max = 3e-6;
        c.output.path = Some("out.csv".into());
        c.output.format = OutputFormat::Json;
        c.quadrature.rel_tol = 1.0 / 3.0 * 1e-9;
        let text = c.to_text();
        assert_eq!(parse_config(&text).unwrap(), c);
        assert_eq!(parse_config(&RunConfig::default().to_text()).unwrap(), RunConfig::default());
    }

    #[test]
    fn grid_in_meters() {
        let mut c = RunConfig::default();
        c.sweep.units = LengthUnit::Meters;
        c.sweep.r_min = 1e-6;
        c.sweep.r_max = 2e-6;
        c.sweep.points = 3;
        let g = c.grid();
        assert!((g[0] - 1e-6 * c.k0()).abs() < 1e-12 * g[0]);
        assert_eq!(g.len(), 3);
        c.sweep.points = 1;
        assert_eq!(c.grid().len(), 1);
    }

    #[test]
    fn setup_matches_config() {
        let mut c = RunConfig::default();
        c.emitter.dimension = 1;
        let s = c.setup().unwrap();
        assert_eq!(s.emitter.dimension(), 1);
        assert_eq!(s.options.quadrature.rel_tol, DEFAULT_REL_TOL);
        assert!((s.crystal.k0() - c.k0()).abs() < 1e-9 * c.k0());
    }
}
