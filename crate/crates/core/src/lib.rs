//! Simulation of a driven double-trap atomic photovoltaic cell.
//!
//! Two hardcore traps, each holding at most one atom in a ground or excited
//! level, exchange atoms coherently with each other and incoherently with a
//! thermal reservoir on either side. Asymmetric optical drives on the two
//! traps polarize the excited-state population and sustain a net atom current
//! even though both reservoirs share one chemical potential.
//!
//! The crate is organised bottom-up:
//!
//! * [`qmodel`]: the nine-dimensional occupation basis, site operators and
//!   density matrices.
//! * [`cell`]: physical parameters, the rotating-frame cell Hamiltonian, the
//!   reservoir dissipators and the vectorized Liouvillian.
//! * [`solver`]: trace-constrained steady-state solve and fixed-step RK4
//!   time evolution.
//! * [`observables`]: trap probabilities, per-lead currents and the reduced
//!   low-temperature current formulas.
//! * [`sweeps`]: one-dimensional parameter scans and the figure presets.
//!
//! All rates and energies are angular frequencies (rad/s) with ħ = 1, and the
//! atom "charge" is q = 1, so currents are in atoms per second.

// Negated float comparisons are deliberate so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cell;
pub mod error;
pub mod observables;
pub mod qmodel;
pub mod solver;
pub mod sweeps;

pub use cell::{
    assemble_liouvillian, build_dissipator, build_hamiltonian, fermi_dirac, hz, CellParams,
    LeadLevels, LeadOccupations, ResolvedOccupations, Superoperator,
};
pub use error::{Error, Result};
pub use observables::{
    lead_currents, net_current_low_temperature, simplified_current, total_occupation,
    trap_probabilities, CurrentReport, TrapProbabilities,
};
pub use qmodel::{
    annihilation, creation, dagger, expectation, number, BasisState, DensityMatrix, Level,
    Operator, Trap, TrapState, C64, DIM,
};
pub use solver::{evolve, evolve_final, steady_state, Rk4Propagator, SteadyStateResult, Trajectory};
pub use sweeps::{
    figure_preset, phase_mean_analysis, run_sweep, zero_crossings, Figure, PhaseStats,
    PresetInputs, SweepAxis, SweepRow, SweepSpec,
};
