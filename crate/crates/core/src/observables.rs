//! Trap probabilities and atom currents extracted from a density matrix.
//!
//! Positive current flows from lead 1 (left) to lead 2 (right). With q = 1 the
//! currents are atoms per second.

use serde::{Deserialize, Serialize};

use crate::cell::CellParams;
use crate::error::Result;
use crate::qmodel::{annihilation, expectation, number, DensityMatrix, Level, Trap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapProbabilities {
    pub p10: f64,
    pub p20: f64,
    pub p1g: f64,
    pub p2g: f64,
    pub p1e: f64,
    pub p2e: f64,
}

impl TrapProbabilities {
    pub fn empty(&self, trap: Trap) -> f64 {
        match trap {
            Trap::One => self.p10,
            Trap::Two => self.p20,
        }
    }

    pub fn occupied(&self, trap: Trap, level: Level) -> f64 {
        match (trap, level) {
            (Trap::One, Level::Ground) => self.p1g,
            (Trap::One, Level::Excited) => self.p1e,
            (Trap::Two, Level::Ground) => self.p2g,
            (Trap::Two, Level::Excited) => self.p2e,
        }
    }

    /// Excited-state polarization p2e - p1e: the collected charge Q.
    pub fn charge_collection(&self) -> f64 {
        self.p2e - self.p1e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentReport {
    pub i1g: f64,
    pub i1e: f64,
    pub i2g: f64,
    pub i2e: f64,
    pub i1: f64,
    pub i2: f64,
    /// (i1 + i2) / 2.
    pub i_avg: f64,
    pub i_low_t: f64,
    pub i_simplified: f64,
}

/// Empty-trap probability uses a a^dagger, which is |0><0| on a hardcore site.
pub fn trap_probabilities(rho: &DensityMatrix) -> TrapProbabilities {
    let empty = |trap| {
        let a = annihilation(trap, Level::Ground);
        expectation(&(a * a.dagger()), rho).re
    };
    let occ = |trap, level| expectation(&number(trap, level), rho).re;
    TrapProbabilities {
        p10: empty(Trap::One),
        p20: empty(Trap::Two),
        p1g: occ(Trap::One, Level::Ground),
        p2g: occ(Trap::Two, Level::Ground),
        p1e: occ(Trap::One, Level::Excited),
        p2e: occ(Trap::Two, Level::Excited),
    }
}

/// Per-lead, per-level currents and the averaged total.
///
/// Lead 1 counts atoms entering trap 1 as positive; lead 2 counts atoms
/// leaving trap 2 as positive, so that both follow the left-to-right
/// convention.
pub fn lead_currents(rho: &DensityMatrix, params: &CellParams) -> Result<CurrentReport> {
    let occ = params.leads.resolve()?;
    let probs = trap_probabilities(rho);
    let inflow = |trap, level| {
        let f = occ.get(trap, level);
        params.gamma * (f * probs.empty(trap) - (1.0 - f) * probs.occupied(trap, level))
    };
    let i1g = inflow(Trap::One, Level::Ground);
    let i1e = inflow(Trap::One, Level::Excited);
    let i2g = -inflow(Trap::Two, Level::Ground);
    let i2e = -inflow(Trap::Two, Level::Excited);
    let i1 = i1g + i1e;
    let i2 = i2g + i2e;
    Ok(CurrentReport {
        i1g,
        i1e,
        i2g,
        i2e,
        i1,
        i2,
        i_avg: (i1 + i2) / 2.0,
        i_low_t: net_current_low_temperature(&probs, params.gamma),
        i_simplified: simplified_current(&probs, params.gamma),
    })
}

/// Net current with fully occupied ground and empty excited reservoir modes:
/// (gamma / 2) [(p2e - p1e) + (p10 - p20)].
pub fn net_current_low_temperature(probs: &TrapProbabilities, gamma: f64) -> f64 {
    gamma / 2.0 * ((probs.p2e - probs.p1e) + (probs.p10 - probs.p20))
}

/// Characteristic transfer time 2 / gamma.
pub fn transfer_time(gamma: f64) -> f64 {
    2.0 / gamma
}

/// Polarization-only current Q / tau = (gamma / 2) (p2e - p1e).
pub fn simplified_current(probs: &TrapProbabilities, gamma: f64) -> f64 {
    probs.charge_collection() * gamma / 2.0
}

/// Mean number of atoms in the double trap.
pub fn total_occupation(rho: &DensityMatrix) -> f64 {
    Trap::ALL
        .into_iter()
        .flat_map(|t| Level::ALL.map(|l| (t, l)))
        .map(|(t, l)| expectation(&number(t, l), rho).re)
        .sum()
}
