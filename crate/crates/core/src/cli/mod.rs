//! Command-line front end: configuration, subcommands and output.
//!
//! Data goes to the output file (or stdout); diagnostics go to stderr.
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 claim-check failure, 1 I/O.

pub mod config;
pub mod output;
pub mod validate;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::analysis::{
    band_ratio, crossover_distance, crossover_seed_for_edge, run_sweep, Emitter, Setup, SweepTable, RATIO_WINDOW,
};
use crate::dispersion::band_edges;
pub use config::{parse_config, ConfigError, LengthUnit, OutputFormat, OutputUnits, RunConfig};
use output::{format_value, write_csv, write_json, UnitFactors};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CLAIM: i32 = 4;

/// Accepted band for the crossover distance, units of `c/omega_a`.
pub const CROSSOVER_BAND: (f64, f64) = (30.0, 65.0);
/// Minimum below/above band ratio.
pub const RATIO_THRESHOLD: f64 = 10.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// Emitted data plus the exit status the command settled on.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub data: Vec<u8>,
    pub exit: i32,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    fn ok(data: impl Into<Vec<u8>>) -> Self {
        Self { data: data.into(), exit: EXIT_OK, diagnostics: Vec::new() }
    }

    pub fn text(&self) -> String {
        String::from_utf8_lossy(&self.data).into_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Edges,
    Energy,
    Sweep,
    Ratio,
    Crossover,
    Validate,
}

#[derive(Debug, Parser)]
#[command(name = "pbgres", version, about = "Resonance interaction of entangled emitters in a photonic bandgap")]
pub struct Invocation {
    #[arg(value_enum)]
    pub command: Command,
    /// Configuration file (dotted `key = value` lines); defaults apply if absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout if absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, value_enum)]
    pub units: Option<OutputUnits>,
}

fn sig3(v: f64) -> String {
    format!("{v:.2e}")
}

pub fn cmd_edges(config: &RunConfig) -> Result<Outcome, CliError> {
    let crystal = config.crystal_params()?;
    let edges = band_edges(&crystal)?;
    let k0 = crystal.k0();
    let v_eff = 2.0 * edges.omega_l / k0;
    let setup = config.setup()?;
    let gap = setup.gap_position()?;
    let mut s = String::new();
    writeln!(
        s,
        "omega_l = {} 1/s, omega_u = {} 1/s, v_eff = {:.3} c",
        sig3(edges.omega_l),
        sig3(edges.omega_u),
        v_eff / crystal.c
    )
    .unwrap();
    writeln!(s, "omega_l = {} 1/s", format_value(edges.omega_l)).unwrap();
    writeln!(s, "omega_u = {} 1/s", format_value(edges.omega_u)).unwrap();
    writeln!(s, "k0 = {} 1/m", format_value(k0)).unwrap();
    writeln!(s, "v_eff = {} m/s", format_value(v_eff)).unwrap();
    writeln!(
        s,
        "omega_a = {} 1/s, alpha = {:.6}, delta = {:.6}",
        format_value(config.emitter.omega_a),
        gap.alpha,
        gap.delta
    )
    .unwrap();
    Ok(Outcome::ok(s))
}

fn sweep_table(config: &RunConfig, grid: &[f64]) -> Result<SweepTable, CliError> {
    Ok(run_sweep(&config.setup()?, grid)?)
}

fn numerical_status(table: &SweepTable) -> (i32, Vec<String>) {
    let mut notes = Vec::new();
    for r in &table.rows {
        if let Some(e) = &r.error {
            notes.push(format!("k0 r = {}: {e}", r.k0_r));
        } else if !r.converged {
            notes.push(format!("k0 r = {}: quadrature did not converge (error estimate {:e})", r.k0_r, r.quad_error));
        }
    }
    (if notes.is_empty() { EXIT_OK } else { EXIT_NUMERICAL }, notes)
}

/// Single-point energy at the first sweep point.
pub fn cmd_energy(config: &RunConfig) -> Result<Outcome, CliError> {
    let x = config.grid()[0];
    let table = sweep_table(config, &[x])?;
    let factors = UnitFactors::for_config(config);
    let data = match config.output.format {
        OutputFormat::Json => write_json(&table, &factors, config),
        OutputFormat::Csv => {
            let r = &table.rows[0];
            let mut s = String::new();
            writeln!(s, "k0_r = {}", format_value(r.k0_r)).unwrap();
            writeln!(s, "r = {} {}", format_value(r.k0_r * factors.length), factors.length_unit).unwrap();
            for (name, v) in [
                ("e_numeric", r.e_numeric),
                ("e_below_gap", r.e_below_gap),
                ("e_above_gap", r.e_above_gap),
                ("e_asymptotic", r.e_asymptotic),
                ("e_freespace", r.e_freespace),
                ("quad_error", r.quad_error),
            ] {
                writeln!(s, "{name} = {} {}", format_value(v * factors.energy), factors.energy_unit).unwrap();
            }
            writeln!(
                s,
                "band = {:?}, symmetry = {:?}, converged = {}",
                config.band.selection, config.emitter.symmetry, r.converged
            )
            .unwrap();
            s.into_bytes()
        }
    };
    let (exit, diagnostics) = numerical_status(&table);
    Ok(Outcome { data, exit, diagnostics })
}

pub fn cmd_sweep(config: &RunConfig) -> Result<Outcome, CliError> {
    let table = sweep_table(config, &config.grid())?;
    let factors = UnitFactors::for_config(config);
    let data = match config.output.format {
        OutputFormat::Csv => write_csv(&table, &factors),
        OutputFormat::Json => write_json(&table, &factors, config),
    };
    let (exit, diagnostics) = numerical_status(&table);
    Ok(Outcome { data, exit, diagnostics })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn cmd_ratio(config: &RunConfig) -> Result<Outcome, CliError> {
    let base = config.setup()?;
    let three_d = match base.emitter {
        Emitter::ThreeD { .. } => base.emitter,
        Emitter::OneD { .. } => Emitter::perpendicular_3d(),
    };
    let one_d = match base.emitter {
        Emitter::OneD { .. } => base.emitter,
        Emitter::ThreeD { .. } => Emitter::one_d(),
    };
    let edges = band_edges(&base.crystal)?;
    let closer = Setup { omega_a: edges.omega_l + 0.5 * (base.omega_a - edges.omega_l), ..base };

    let mut s = String::new();
    let mut all = true;
    writeln!(s, "window: k0 r in [{}, {}]", RATIO_WINDOW.0, RATIO_WINDOW.1).unwrap();
    for (label, emitter) in [("1D", one_d), ("3D", three_d)] {
        let here = band_ratio(&Setup { emitter, ..base }, RATIO_WINDOW)?;
        let near = band_ratio(&Setup { emitter, ..closer }, RATIO_WINDOW)?;
        let big = here.ratio > RATIO_THRESHOLD;
        let grows = near.ratio > here.ratio;
        all &= big && grows;
        writeln!(
            s,
            "{label}: ratio = {:.4} (rms below {:.4e}, rms above {:.4e})  {} (> {RATIO_THRESHOLD})",
            here.ratio,
            here.rms_below,
            here.rms_above,
            pass(big)
        )
        .unwrap();
        writeln!(s, "{label}: ratio with omega_a - omega_l halved = {:.4}  {} (increases)", near.ratio, pass(grows))
            .unwrap();
    }
    writeln!(
        s,
        "claim: near the lower edge the [0, k0] band exceeds the [k0, 3k0/2] window by more than an order of magnitude in 1D and 3D, and more so closer to the edge"
    )
    .unwrap();
    Ok(Outcome { data: s.into_bytes(), exit: if all { EXIT_OK } else { EXIT_CLAIM }, diagnostics: Vec::new() })
}

/// Truncates to `digits` significant figures.
fn truncate_sig(v: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits - 1 - v.abs().log10().floor() as i32);
    (v * scale).trunc() / scale
}

pub fn cmd_crossover(config: &RunConfig) -> Result<Outcome, CliError> {
    let setup = config.setup()?;
    let edges = band_edges(&setup.crystal)?;
    let quoted = truncate_sig(edges.omega_l, 3);
    let seed_quoted = crossover_seed_for_edge(&setup, quoted)?;
    let c = crossover_distance(&setup)?;
    let inside = c.refined >= CROSSOVER_BAND.0 && c.refined <= CROSSOVER_BAND.1;
    let mut s = String::new();
    writeln!(s, "seed = {:.4} c/omega_a (omega_l = {:.6e} 1/s)", c.seed, edges.omega_l).unwrap();
    writeln!(s, "seed = {:.4} c/omega_a (omega_l truncated to {} 1/s)", seed_quoted, sig3(quoted)).unwrap();
    writeln!(
        s,
        "refined = {:.4} c/omega_a (numeric envelope {:.4e} (k0 r)^{:.4} over k0 r in [{:.1}, {:.1}])",
        c.refined, c.fit.amplitude, c.fit.exponent, c.window.0, c.window.1
    )
    .unwrap();
    writeln!(
        s,
        "claim: the bandgap enhances the 3D interaction out to about 40 c/omega_a; accepted [{}, {}]  {}",
        CROSSOVER_BAND.0,
        CROSSOVER_BAND.1,
        pass(inside)
    )
    .unwrap();
    Ok(Outcome { data: s.into_bytes(), exit: if inside { EXIT_OK } else { EXIT_CLAIM }, diagnostics: Vec::new() })
}

pub fn cmd_validate(config: &RunConfig) -> Result<Outcome, CliError> {
    let checks = validate::validation_suite(&config.setup()?);
    let mut s = String::new();
    for c in &checks {
        writeln!(s, "{} {}: {}", pass(c.passed), c.name, c.detail).unwrap();
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(s, "{} checks, {failed} failed", checks.len()).unwrap();
    Ok(Outcome { data: s.into_bytes(), exit: if failed == 0 { EXIT_OK } else { EXIT_CLAIM }, diagnostics: Vec::new() })
}

pub fn dispatch(command: Command, config: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Edges => cmd_edges(config),
        Command::Energy => cmd_energy(config),
        Command::Sweep => cmd_sweep(config),
        Command::Ratio => cmd_ratio(config),
        Command::Crossover => cmd_crossover(config),
        Command::Validate => cmd_validate(config),
    }
}

/// Loads the config named by the invocation and applies the flag overrides.
pub fn load_config(inv: &Invocation) -> Result<RunConfig, CliError> {
    let mut config = match &inv.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(f) = inv.format {
        config.output.format = f;
    }
    if let Some(u) = inv.units {
        config.output.units = u;
    }
    if let Some(p) = &inv.output {
        config.output.path = Some(p.display().to_string());
    }
    config.validate()?;
    Ok(config)
}

/// Runs one invocation end to end and returns the process exit code.
pub fn run(inv: &Invocation) -> i32 {
    let outcome = load_config(inv).and_then(|config| {
        let outcome = dispatch(inv.command, &config)?;
        match &config.output.path {
            Some(path) => std::fs::write(path, &outcome.data).map_err(|e| CliError::Io(format!("{path}: {e}")))?,
            None => {
                use std::io::Write;
                std::io::stdout().write_all(&outcome.data).map_err(|e| CliError::Io(e.to_string()))?
            }
        }
        Ok(outcome)
    });
    match outcome {
        Ok(o) => {
            for d in &o.diagnostics {
                eprintln!("pbgres: {d}");
            }
            o.exit
        }
        Err(e) => {
            eprintln!("pbgres: {e}");
            e.exit_code()
        }
    }
}
