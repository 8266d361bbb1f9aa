//! One-dimensional parameter scans of the stationary cell.
//!
//! Grid points are independent and evaluated in parallel; rows always come
//! back in grid order, so the output does not depend on scheduling.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cell::{assemble_liouvillian, hz, CellParams};
use crate::error::{Error, Result};
use crate::observables::{lead_currents, trap_probabilities};
use crate::solver::steady_state;

pub const DEFAULT_POINTS: usize = 241;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Omega_2 - Omega_1.
    RabiDiff,
    /// Delta_2 - Delta_1.
    DetuningDiff,
    /// phi_2 - phi_1.
    PhaseDiff,
    Rabi2,
    Detuning2,
    Phase2,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 6] = [
        SweepAxis::RabiDiff,
        SweepAxis::DetuningDiff,
        SweepAxis::PhaseDiff,
        SweepAxis::Rabi2,
        SweepAxis::Detuning2,
        SweepAxis::Phase2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::RabiDiff => "rabi_diff",
            SweepAxis::DetuningDiff => "detuning_diff",
            SweepAxis::PhaseDiff => "phase_diff",
            SweepAxis::Rabi2 => "rabi2",
            SweepAxis::Detuning2 => "detuning2",
            SweepAxis::Phase2 => "phase2",
        }
    }

    /// Phase axes are in radians; the others are rates.
    pub fn is_phase(self) -> bool {
        matches!(self, SweepAxis::PhaseDiff | SweepAxis::Phase2)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let valid: Vec<_> = SweepAxis::ALL.iter().map(|a| a.name()).collect();
            Error::invalid("axis", format!("unknown axis `{s}`; valid: {}", valid.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: CellParams,
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// For difference axes: split the difference as -x/2, +x/2 around the
    /// mean of the two base values instead of offsetting parameter 2 only.
    pub symmetric_mode: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::invalid("points", format!("need at least 2, got {}", self.points)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() || !(self.start < self.stop) {
            return Err(Error::invalid(
                "start",
                format!("need finite start < stop, got [{}, {}]", self.start, self.stop),
            ));
        }
        self.base.validate()
    }

    pub fn grid(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| self.start + span * (k as f64 / last))
            .collect()
    }

    /// Cell parameters at axis value `x`.
    pub fn params_at(&self, x: f64) -> CellParams {
        let mut p = self.base;
        let apply_diff = |pair: &mut [f64; 2]| {
            if self.symmetric_mode {
                let centre = (pair[0] + pair[1]) / 2.0;
                *pair = [centre - x / 2.0, centre + x / 2.0];
            } else {
                pair[1] = pair[0] + x;
            }
        };
        match self.axis {
            SweepAxis::RabiDiff => apply_diff(&mut p.rabi),
            SweepAxis::DetuningDiff => apply_diff(&mut p.detuning),
            SweepAxis::PhaseDiff => apply_diff(&mut p.phase),
            SweepAxis::Rabi2 => p.rabi[1] = x,
            SweepAxis::Detuning2 => p.detuning[1] = x,
            SweepAxis::Phase2 => p.phase[1] = x,
        }
        // Grid arithmetic can leave an amplitude a rounding error below zero.
        let eps = 1e-12 * p.max_rate();
        for r in &mut p.rabi {
            if *r < 0.0 && *r > -eps {
                *r = 0.0;
            }
        }
        p
    }
}

/// One grid point of a sweep. A failed point carries NaN observables and the
/// solver message in `error`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub p10: f64,
    pub p20: f64,
    pub p1g: f64,
    pub p2g: f64,
    pub p1e: f64,
    pub p2e: f64,
    pub i1g: f64,
    pub i1e: f64,
    pub i2g: f64,
    pub i2e: f64,
    pub i_avg: f64,
    pub i_low_t: f64,
    pub i_simplified: f64,
    pub i_over_gamma: f64,
    pub residual: f64,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(axis_value: f64, err: &Error) -> Self {
        let nan = f64::NAN;
        SweepRow {
            axis_value,
            p10: nan,
            p20: nan,
            p1g: nan,
            p2g: nan,
            p1e: nan,
            p2e: nan,
            i1g: nan,
            i1e: nan,
            i2g: nan,
            i2e: nan,
            i_avg: nan,
            i_low_t: nan,
            i_simplified: nan,
            i_over_gamma: nan,
            residual: nan,
            error: Some(err.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Stationary observables for a single parameter set.
pub fn evaluate_point(axis_value: f64, params: &CellParams) -> Result<SweepRow> {
    let l = assemble_liouvillian(params)?;
    let ss = steady_state(&l)?;
    let p = trap_probabilities(&ss.rho);
    let c = lead_currents(&ss.rho, params)?;
    Ok(SweepRow {
        axis_value,
        p10: p.p10,
        p20: p.p20,
        p1g: p.p1g,
        p2g: p.p2g,
        p1e: p.p1e,
        p2e: p.p2e,
        i1g: c.i1g,
        i1e: c.i1e,
        i2g: c.i2g,
        i2e: c.i2e,
        i_avg: c.i_avg,
        i_low_t: c.i_low_t,
        i_simplified: c.i_simplified,
        i_over_gamma: c.i_avg / params.gamma,
        residual: ss.residual,
        error: None,
    })
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let rows: Vec<SweepRow> = spec
        .grid()
        .into_par_iter()
        .map(|x| evaluate_point(x, &spec.params_at(x)).unwrap_or_else(|e| SweepRow::failed(x, &e)))
        .collect();
    if let Some(first) = rows.iter().find_map(|r| r.error.clone()) {
        if rows.iter().all(|r| !r.is_ok()) {
            return Err(Error::AllPointsFailed {
                points: rows.len(),
                first,
            });
        }
    }
    Ok(rows)
}

/// Axis locations where `i_avg` changes sign. Values within `tol` of zero
/// count as zero; a run of such rows between opposite signs is reported at
/// its midpoint, otherwise the crossing is linearly interpolated.
pub fn zero_crossings(rows: &[SweepRow], tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    // (index, sign) of the last row clearly away from zero.
    let mut last: Option<(usize, f64)> = None;
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.is_ok() && r.i_avg.is_finite()).collect();
    for (k, row) in ok.iter().enumerate() {
        if row.i_avg.abs() <= tol {
            continue;
        }
        let sign = row.i_avg.signum();
        if let Some((j, prev)) = last {
            if prev != sign {
                let (a, b) = (ok[j], *row);
                if k == j + 1 {
                    let t = a.i_avg / (a.i_avg - b.i_avg);
                    out.push(a.axis_value + t * (b.axis_value - a.axis_value));
                } else {
                    let zeros = &ok[j + 1..k];
                    let mid = (zeros[0].axis_value + zeros[zeros.len() - 1].axis_value) / 2.0;
                    out.push(mid);
                }
            }
        }
        last = Some((k, sign));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl PhaseStats {
    pub fn peak_to_peak(&self) -> f64 {
        self.max - self.min
    }
}

/// Mean and extrema of `i_avg` over the successful rows of a phase sweep.
pub fn phase_mean_analysis(rows: &[SweepRow]) -> Result<PhaseStats> {
    let values: Vec<f64> = rows
        .iter()
        .filter(|r| r.is_ok())
        .map(|r| r.i_avg)
        .filter(|v| v.is_finite())
        .collect();
    if values.is_empty() {
        return Err(Error::EmptyRows);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PhaseStats { mean, min, max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig3e,
    Fig4a,
    Fig4bcd,
}

impl Figure {
    pub const ALL: [Figure; 11] = [
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig2c,
        Figure::Fig2d,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig3c,
        Figure::Fig3d,
        Figure::Fig3e,
        Figure::Fig4a,
        Figure::Fig4bcd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig2c => "fig2c",
            Figure::Fig2d => "fig2d",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig3c => "fig3c",
            Figure::Fig3d => "fig3d",
            Figure::Fig3e => "fig3e",
            Figure::Fig4a => "fig4a",
            Figure::Fig4bcd => "fig4bcd",
        }
    }

    pub fn axis(self) -> SweepAxis {
        match self {
            Figure::Fig2a | Figure::Fig2b | Figure::Fig2c | Figure::Fig2d => SweepAxis::RabiDiff,
            Figure::Fig3a | Figure::Fig3b | Figure::Fig3c => SweepAxis::DetuningDiff,
            Figure::Fig3d | Figure::Fig3e | Figure::Fig4a | Figure::Fig4bcd => SweepAxis::PhaseDiff,
        }
    }
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::UnknownPreset {
            name: s.to_string(),
            valid: Figure::ALL.map(Figure::name).join(", "),
        })
    }
}

/// Optional inputs that adjust a preset. `rabi` is mandatory for fig3d.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PresetInputs {
    /// (Omega_1, Omega_2), rad/s.
    pub rabi: Option<[f64; 2]>,
    /// Common detuning applied to both traps, rad/s.
    pub detuning: Option<f64>,
    pub points: Option<usize>,
}

/// Sweep reproducing one of the amplitude, frequency or phase figure families.
///
/// Rate axes span [-2pi 1200, 2pi 1200] rad/s except the single-beam
/// amplitude panels, which start at Omega_2 = 0; phase axes span [0, 2pi].
pub fn figure_preset(figure: Figure, inputs: &PresetInputs) -> Result<SweepSpec> {
    let mut base = CellParams::baseline();
    base.rabi = [hz(600.0); 2];
    base.detuning = [0.0; 2];
    base.phase = [0.0; 2];
    let rate_span = (-hz(1200.0), hz(1200.0));
    let phase_span = (0.0, TAU);

    let ((start, stop), symmetric_mode) = match figure {
        Figure::Fig2a | Figure::Fig2b => {
            base.rabi = [0.0, 0.0];
            ((0.0, hz(1200.0)), false)
        }
        Figure::Fig2c => (rate_span, true),
        Figure::Fig2d => {
            base.detuning = [hz(300.0); 2];
            (rate_span, true)
        }
        Figure::Fig3a | Figure::Fig3b | Figure::Fig3c => {
            base.detuning = [hz(300.0); 2];
            (rate_span, false)
        }
        Figure::Fig3d => {
            if inputs.rabi.is_none() {
                return Err(Error::MissingPresetInput {
                    preset: "fig3d",
                    input: "rabi",
                });
            }
            (phase_span, false)
        }
        Figure::Fig3e => {
            base.detuning = [0.0, hz(300.0)];
            (phase_span, false)
        }
        Figure::Fig4a | Figure::Fig4bcd => {
            base.detuning = [hz(300.0); 2];
            (phase_span, false)
        }
    };
    let axis = figure.axis();
    if let Some(rabi) = inputs.rabi {
        base.rabi = rabi;
    }
    if let Some(d) = inputs.detuning {
        base.detuning = [d; 2];
    }
    let spec = SweepSpec {
        base,
        axis,
        start,
        stop,
        points: inputs.points.unwrap_or(DEFAULT_POINTS),
        symmetric_mode,
    };
    spec.validate()?;
    Ok(spec)
}
