//! Table emission and unit conversion.
//!
//! SI mode: separations in metres, energies in joules, forces in newtons.
//! Energies carry Gaussian prefactors: `|mu|^2 k0^3` (3D, dipole in statC cm)
//! or `|p|^2_perp k0` (1D, erg cm), with `k0` in 1/cm, giving erg.

use serde::Serialize;

use super::config::{OutputUnits, RunConfig};
use crate::analysis::{SweepRow, SweepTable};

const ERG_IN_JOULE: f64 = 1e-7;

pub const CSV_HEADER: [&str; 8] =
    ["k0_r", "e_numeric", "e_asymptotic", "e_freespace", "force", "e_below_gap", "e_above_gap", "quad_error"];

/// Multiplicative factors from reduced to output units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitFactors {
    pub length: f64,
    pub energy: f64,
    pub force: f64,
    pub length_unit: &'static str,
    pub energy_unit: &'static str,
    pub force_unit: &'static str,
}

impl UnitFactors {
    pub fn reduced(dimension: u8) -> Self {
        let energy_unit = if dimension == 1 { "|p|^2_perp k0" } else { "|mu|^2 k0^3" };
        let force_unit = if dimension == 1 { "|p|^2_perp k0^2" } else { "|mu|^2 k0^4" };
        Self { length: 1.0, energy: 1.0, force: 1.0, length_unit: "1/k0", energy_unit, force_unit }
    }

    pub fn si(config: &RunConfig) -> Self {
        let k0 = config.k0();
        let k0_cm = k0 * 1e-2;
        let energy = if config.emitter.dimension == 1 {
            config.emitter.p_perp_sq * k0_cm
        } else {
            config.emitter.dipole.iter().map(|d| d * d).sum::<f64>() * k0_cm.powi(3)
        } * ERG_IN_JOULE;
        Self { length: 1.0 / k0, energy, force: energy * k0, length_unit: "m", energy_unit: "J", force_unit: "N" }
    }

    pub fn for_config(config: &RunConfig) -> Self {
        match config.output.units {
            OutputUnits::Reduced => Self::reduced(config.emitter.dimension),
            OutputUnits::Si => Self::si(config),
        }
    }

    fn row(&self, r: &SweepRow) -> [f64; 8] {
        [
            r.k0_r * self.length,
            r.e_numeric * self.energy,
            r.e_asymptotic * self.energy,
            r.e_freespace * self.energy,
            r.force * self.force,
            r.e_below_gap * self.energy,
            r.e_above_gap * self.energy,
            r.quad_error * self.energy,
        ]
    }
}

/// 12 significant digits, fixed exponent form.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.11e}")
    }
}

pub fn write_csv(table: &SweepTable, factors: &UnitFactors) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("writing to memory");
    for r in &table.rows {
        w.write_record(factors.row(r).iter().map(|v| format_value(*v))).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

#[derive(Serialize)]
struct JsonRow<'a> {
    k0_r: f64,
    r: f64,
    e_numeric: Option<f64>,
    e_asymptotic: Option<f64>,
    e_freespace: Option<f64>,
    force: Option<f64>,
    e_below_gap: Option<f64>,
    e_above_gap: Option<f64>,
    quad_error: Option<f64>,
    converged: bool,
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'static str,
    config: &'a RunConfig,
    units: &'a UnitFactors,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    metadata: Metadata<'a>,
    rows: Vec<JsonRow<'a>>,
}

// JSON has no NaN
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn write_json(table: &SweepTable, factors: &UnitFactors, config: &RunConfig) -> Vec<u8> {
    let rows = table
        .rows
        .iter()
        .map(|r| {
            let v = factors.row(r);
            JsonRow {
                k0_r: r.k0_r,
                r: v[0],
                e_numeric: finite(v[1]),
                e_asymptotic: finite(v[2]),
                e_freespace: finite(v[3]),
                force: finite(v[4]),
                e_below_gap: finite(v[5]),
                e_above_gap: finite(v[6]),
                quad_error: finite(v[7]),
                converged: r.converged,
                error: r.error.as_deref(),
            }
        })
        .collect();
    let doc = JsonDocument { metadata: Metadata { version: env!("CARGO_PKG_VERSION"), config, units: factors }, rows };
    let mut out = serde_json::to_vec_pretty(&doc).expect("serializable document");
    out.push(b'\n');
    out
}
