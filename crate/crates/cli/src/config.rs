//! JSON run configuration.
//!
//! A config file carries a `units` tag: `"hz"` (the default) means every rate
//! and energy is an ordinary frequency and is multiplied by 2pi once, while
//! loading; `"rad_s"` means values are already angular. Phases are always
//! radians and times always seconds. A loaded [`RunConfig`] is in rad/s and
//! dumps back out tagged `"rad_s"`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use atomvolt::{hz, CellParams, Figure, LeadLevels, LeadOccupations, SweepAxis};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Hz,
    #[value(name = "rad_s", alias = "rad-s")]
    RadS,
}

impl Units {
    pub fn to_rad_s(self, value: f64) -> f64 {
        match self {
            Units::Hz => hz(value),
            Units::RadS => value,
        }
    }
}

/// Reservoir section of a config file, in file units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LeadsFile {
    Thermal { u_g: f64, u_e: f64, mu: f64, kt: f64 },
    Explicit { lead1: LeadLevels, lead2: LeadLevels },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsFile {
    pub gamma: Option<f64>,
    pub lambda_coupling: Option<f64>,
    pub rabi: Option<[f64; 2]>,
    pub detuning: Option<[f64; 2]>,
    pub phase: Option<[f64; 2]>,
    /// Omitted: deep-Fermi reservoirs with kT = gamma / 10 (baseline gamma
    /// when gamma is 0).
    pub leads: Option<LeadsFile>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveFile {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub initial: Option<String>,
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepFile {
    pub preset: Option<String>,
    pub axis: Option<SweepAxis>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    pub symmetric_mode: Option<bool>,
    /// Common detuning for presets.
    pub detuning: Option<f64>,
    /// Rabi pair for presets.
    pub rabi: Option<[f64; 2]>,
}

/// The on-disk representation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub units: Option<Units>,
    pub params: ParamsFile,
    pub evolve: EvolveFile,
    pub sweep: SweepFile,
    pub output_path: Option<PathBuf>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }
}

/// Initial state of a transient run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Basis(atomvolt::BasisState),
    MaximallyMixed,
}

impl FromStr for InitialState {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "mixed" {
            return Ok(InitialState::MaximallyMixed);
        }
        s.parse()
            .map(InitialState::Basis)
            .map_err(|_| CliError::Config(format!("initial: `{s}` is not a basis label (00, 0g, .., ee) or `mixed`")))
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialState::Basis(b) => write!(f, "{b}"),
            InitialState::MaximallyMixed => f.write_str("mixed"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveConfig {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub initial: InitialState,
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub preset: Option<Figure>,
    pub axis: Option<SweepAxis>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    pub symmetric_mode: Option<bool>,
    pub detuning: Option<f64>,
    pub rabi: Option<[f64; 2]>,
}

/// A fully resolved run, all rates in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: CellParams,
    pub evolve: EvolveConfig,
    pub sweep: SweepConfig,
    pub output_path: Option<PathBuf>,
}

fn finite(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{field}: must be finite, got {v}")))
    }
}

impl RunConfig {
    /// Converts a file (with any overrides already merged in) to rad/s.
    /// `units` overrides the file's own tag.
    pub fn from_file(file: &ConfigFile, units: Option<Units>) -> Result<Self, CliError> {
        let units = units.or(file.units).unwrap_or_default();
        let rate = |field: &str, v: f64| finite(field, v).map(|v| units.to_rad_s(v));
        let base = CellParams::baseline();
        let p = &file.params;

        let gamma = match p.gamma {
            Some(v) => rate("params.gamma", v)?,
            None => base.gamma,
        };
        let lambda_coupling = match p.lambda_coupling {
            Some(v) => rate("params.lambda_coupling", v)?,
            None => base.lambda_coupling,
        };
        let pair = |field: &str, v: Option<[f64; 2]>, default: [f64; 2], convert: bool| -> Result<[f64; 2], CliError> {
            match v {
                Some([a, b]) if convert => Ok([rate(field, a)?, rate(field, b)?]),
                Some([a, b]) => Ok([finite(field, a)?, finite(field, b)?]),
                None => Ok(default),
            }
        };
        let rabi = pair("params.rabi", p.rabi, base.rabi, true)?;
        let detuning = pair("params.detuning", p.detuning, base.detuning, true)?;
        let phase = pair("params.phase", p.phase, base.phase, false)?;
        let leads = match p.leads {
            // The reservoir temperature scales with gamma; a closed cell
            // never sees the reservoirs, so any valid temperature will do.
            None if gamma > 0.0 => LeadOccupations::deep_fermi(gamma),
            None => LeadOccupations::deep_fermi(base.gamma),
            Some(LeadsFile::Thermal { u_g, u_e, mu, kt }) => LeadOccupations::Thermal {
                u_g: rate("params.leads.thermal.u_g", u_g)?,
                u_e: rate("params.leads.thermal.u_e", u_e)?,
                mu: rate("params.leads.thermal.mu", mu)?,
                kt: rate("params.leads.thermal.kt", kt)?,
            },
            Some(LeadsFile::Explicit { lead1, lead2 }) => LeadOccupations::Explicit { lead1, lead2 },
        };
        let params = CellParams {
            gamma,
            lambda_coupling,
            rabi,
            detuning,
            phase,
            leads,
        };
        params.validate().map_err(|e| CliError::Config(format!("params: {e}")))?;

        let e = &file.evolve;
        let evolve = EvolveConfig {
            t_end: e.t_end.map(|v| finite("evolve.t_end", v)).transpose()?,
            dt: e.dt.map(|v| finite("evolve.dt", v)).transpose()?,
            initial: e.initial.as_deref().unwrap_or("00").parse()?,
            stride: e.stride.unwrap_or(1),
        };
        if evolve.stride == 0 {
            return Err(CliError::Config("evolve.stride: must be at least 1".into()));
        }

        let s = &file.sweep;
        let preset = s
            .preset
            .as_deref()
            .map(|name| name.parse::<Figure>().map_err(|e| CliError::Config(e.to_string())))
            .transpose()?;
        let axis = s.axis.or(preset.map(Figure::axis));
        let along_axis = |field: &str, v: f64| match axis {
            Some(a) if a.is_phase() => finite(field, v),
            _ => rate(field, v),
        };
        let sweep = SweepConfig {
            preset,
            axis: s.axis,
            start: s.start.map(|v| along_axis("sweep.start", v)).transpose()?,
            stop: s.stop.map(|v| along_axis("sweep.stop", v)).transpose()?,
            points: s.points,
            symmetric_mode: s.symmetric_mode,
            detuning: s.detuning.map(|v| rate("sweep.detuning", v)).transpose()?,
            rabi: s.rabi.map(|r| pair("sweep.rabi", Some(r), [0.0; 2], true)).transpose()?,
        };

        Ok(RunConfig {
            params,
            evolve,
            sweep,
            output_path: file.output_path.clone(),
        })
    }

    /// File form tagged `rad_s`; parses back to an equal config.
    pub fn to_file(&self) -> ConfigFile {
        let p = &self.params;
        let leads = match p.leads {
            LeadOccupations::Thermal { u_g, u_e, mu, kt } => LeadsFile::Thermal { u_g, u_e, mu, kt },
            LeadOccupations::Explicit { lead1, lead2 } => LeadsFile::Explicit { lead1, lead2 },
        };
        ConfigFile {
            units: Some(Units::RadS),
            params: ParamsFile {
                gamma: Some(p.gamma),
                lambda_coupling: Some(p.lambda_coupling),
                rabi: Some(p.rabi),
                detuning: Some(p.detuning),
                phase: Some(p.phase),
                leads: Some(leads),
            },
            evolve: EvolveFile {
                t_end: self.evolve.t_end,
                dt: self.evolve.dt,
                initial: Some(self.evolve.initial.to_string()),
                stride: Some(self.evolve.stride),
            },
            sweep: SweepFile {
                preset: self.sweep.preset.map(|f| f.name().to_string()),
                axis: self.sweep.axis,
                start: self.sweep.start,
                stop: self.sweep.stop,
                points: self.sweep.points,
                symmetric_mode: self.sweep.symmetric_mode,
                detuning: self.sweep.detuning,
                rabi: self.sweep.rabi,
            },
            output_path: self.output_path.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("config serializes") + "\n"
    }
}
