//! Physical parameters of the cell and assembly of its Liouvillian.
//!
//! The generator acts on column-stacked density matrices,
//! `vec(rho)[i + 9 j] = rho[i][j]`, so that `vec(A rho B) = (B^T kron A) vec(rho)`.

use std::ops::Add;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmodel::{annihilation, creation, number, Level, Mat9, Operator, Trap, C64, DIM};

/// Dimension of the vectorized state space.
pub const SUPER_DIM: usize = DIM * DIM;

/// Offset of the deep-Fermi reservoir levels from the chemical potential, in units of kT.
pub const DEEP_FERMI_OFFSET: f64 = 20.0;

/// 1 / (exp((energy - mu) / kT) + 1), evaluated without overflow.
pub fn fermi_dirac(energy: f64, mu: f64, kt: f64) -> Result<f64> {
    if !(kt > 0.0) || !kt.is_finite() {
        return Err(Error::invalid("kt", format!("must be positive and finite, got {kt}")));
    }
    let x = (energy - mu) / kt;
    if x.is_nan() {
        return Err(Error::invalid("energy", "energy and mu must be finite"));
    }
    // exp of the non-positive branch only; saturates to exactly 0 or 1.
    Ok(if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    })
}

/// Reservoir occupation of the ground and excited modes seen by one trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadLevels {
    pub ground: f64,
    pub excited: f64,
}

impl LeadLevels {
    pub fn get(&self, level: Level) -> f64 {
        match level {
            Level::Ground => self.ground,
            Level::Excited => self.excited,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedOccupations {
    pub leads: [LeadLevels; 2],
}

impl ResolvedOccupations {
    pub fn get(&self, trap: Trap, level: Level) -> f64 {
        self.leads[trap.slot()].get(level)
    }
}

/// How reservoir occupations are specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadOccupations {
    /// Occupations given directly, per lead.
    Explicit { lead1: LeadLevels, lead2: LeadLevels },
    /// Mode energies, shared chemical potential and temperature (rad/s).
    Thermal { u_g: f64, u_e: f64, mu: f64, kt: f64 },
}

impl LeadOccupations {
    /// Ground mode deep below, excited mode deep above the chemical potential,
    /// with kT = gamma / 10.
    pub fn deep_fermi(gamma: f64) -> Self {
        let kt = gamma / 10.0;
        LeadOccupations::Thermal {
            u_g: -DEEP_FERMI_OFFSET * kt,
            u_e: DEEP_FERMI_OFFSET * kt,
            mu: 0.0,
            kt,
        }
    }

    /// Both leads with the same explicit occupations.
    pub fn explicit(ground: f64, excited: f64) -> Self {
        let levels = LeadLevels { ground, excited };
        LeadOccupations::Explicit {
            lead1: levels,
            lead2: levels,
        }
    }

    pub fn resolve(&self) -> Result<ResolvedOccupations> {
        match *self {
            LeadOccupations::Explicit { lead1, lead2 } => {
                for (field, v) in [
                    ("lead1.ground", lead1.ground),
                    ("lead1.excited", lead1.excited),
                    ("lead2.ground", lead2.ground),
                    ("lead2.excited", lead2.excited),
                ] {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::invalid(field, format!("occupation {v} outside [0, 1]")));
                    }
                }
                Ok(ResolvedOccupations {
                    leads: [lead1, lead2],
                })
            }
            LeadOccupations::Thermal { u_g, u_e, mu, kt } => {
                for (field, v) in [("u_g", u_g), ("u_e", u_e), ("mu", mu)] {
                    if !v.is_finite() {
                        return Err(Error::invalid(field, "must be finite"));
                    }
                }
                let levels = LeadLevels {
                    ground: fermi_dirac(u_g, mu, kt)?,
                    excited: fermi_dirac(u_e, mu, kt)?,
                };
                Ok(ResolvedOccupations {
                    leads: [levels, levels],
                })
            }
        }
    }
}

/// All physical knobs of the cell, in rad/s and radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    /// Trap-lead exchange rate.
    pub gamma: f64,
    /// Coherent inter-trap tunneling rate.
    pub lambda_coupling: f64,
    /// Rabi frequencies of the drives on trap 1 and trap 2.
    pub rabi: [f64; 2],
    pub detuning: [f64; 2],
    pub phase: [f64; 2],
    pub leads: LeadOccupations,
}

impl CellParams {
    /// Baseline cell: Gamma = 2pi 400, Lambda = 2pi 800, single resonant beam
    /// Omega_2 = 2pi 600 on trap 2, deep-Fermi reservoirs.
    pub fn baseline() -> Self {
        let gamma = hz(400.0);
        CellParams {
            gamma,
            lambda_coupling: hz(800.0),
            rabi: [0.0, hz(600.0)],
            detuning: [0.0, 0.0],
            phase: [0.0, 0.0],
            leads: LeadOccupations::deep_fermi(gamma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::invalid("gamma", format!("must be finite and >= 0, got {}", self.gamma)));
        }
        if !self.lambda_coupling.is_finite() {
            return Err(Error::invalid("lambda_coupling", "must be finite"));
        }
        for (field, v) in [("rabi[0]", self.rabi[0]), ("rabi[1]", self.rabi[1])] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        for (field, v) in [
            ("detuning[0]", self.detuning[0]),
            ("detuning[1]", self.detuning[1]),
            ("phase[0]", self.phase[0]),
            ("phase[1]", self.phase[1]),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(field, "must be finite"));
            }
        }
        self.leads.resolve().map(|_| ())
    }

    /// Largest rate in the problem, floored at 1 rad/s.
    pub fn max_rate(&self) -> f64 {
        [
            self.gamma,
            self.lambda_coupling.abs(),
            self.rabi[0],
            self.rabi[1],
            self.detuning[0].abs(),
            self.detuning[1].abs(),
            1.0,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Exchange every trap-1 drive parameter with its trap-2 counterpart.
    pub fn mirrored(&self) -> Self {
        let swap = |[a, b]: [f64; 2]| [b, a];
        let leads = match self.leads {
            LeadOccupations::Explicit { lead1, lead2 } => LeadOccupations::Explicit {
                lead1: lead2,
                lead2: lead1,
            },
            thermal => thermal,
        };
        CellParams {
            rabi: swap(self.rabi),
            detuning: swap(self.detuning),
            phase: swap(self.phase),
            leads,
            ..*self
        }
    }
}

/// Frequency in Hz to angular frequency.
pub fn hz(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f
}

/// Rotating-frame cell Hamiltonian: detuning on the excited levels, tunneling
/// of both levels between traps, and the drives coupling g and e on each trap.
pub fn build_hamiltonian(params: &CellParams) -> Operator {
    let mut h = Operator::zero();
    for trap in Trap::ALL {
        let k = trap.slot();
        h = h + params.detuning[k] * number(trap, Level::Excited);

        let drive = creation(trap, Level::Ground) * annihilation(trap, Level::Excited);
        let drive = drive.scale(C64::from_polar(params.rabi[k] / 2.0, params.phase[k]));
        h = h + drive + drive.dagger();
    }
    for level in Level::ALL {
        let hop = creation(Trap::One, level) * annihilation(Trap::Two, level);
        let hop = params.lambda_coupling * hop;
        h = h + hop + hop.dagger();
    }
    h
}

/// Generator on column-stacked 9x9 matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    matrix: DMatrix<C64>,
    rate_scale: f64,
}

impl Superoperator {
    pub fn zero() -> Self {
        Superoperator {
            matrix: DMatrix::zeros(SUPER_DIM, SUPER_DIM),
            rate_scale: 1.0,
        }
    }

    /// Wraps an 81x81 matrix; the rate scale defaults to its largest entry.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != SUPER_DIM || matrix.ncols() != SUPER_DIM {
            return Err(Error::DimensionMismatch {
                expected: SUPER_DIM,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let rate_scale = max_abs(&matrix).max(1.0);
        Ok(Superoperator { matrix, rate_scale })
    }

    fn with_scale(matrix: DMatrix<C64>, rate_scale: f64) -> Self {
        Superoperator { matrix, rate_scale }
    }

    /// rho -> A rho B.
    pub fn sandwich(left: &Operator, right: &Operator) -> Self {
        let a = left.to_dmatrix();
        let b = right.to_dmatrix();
        Self::with_scale(b.transpose().kronecker(&a), 1.0)
    }

    /// rho -> -i [H, rho].
    pub fn coherent(h: &Operator) -> Self {
        let id = Operator::identity();
        let comm = Self::sandwich(h, &id).matrix - Self::sandwich(&id, h).matrix;
        Self::with_scale(comm * C64::new(0.0, -1.0), h.max_abs().max(1.0))
    }

    /// rate * (c rho c^dagger - {c^dagger c, rho} / 2).
    pub fn lindblad(jump: &Operator, rate: f64) -> Self {
        let id = Operator::identity();
        let cdc = jump.dagger() * *jump;
        let m = Self::sandwich(jump, &jump.dagger()).matrix
            - (Self::sandwich(&cdc, &id).matrix + Self::sandwich(&id, &cdc).matrix) * C64::new(0.5, 0.0);
        Self::with_scale(m * C64::new(rate, 0.0), rate.abs().max(1.0))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Characteristic rate used to scale solver tolerances.
    pub fn rate_scale(&self) -> f64 {
        self.rate_scale
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn apply(&self, rho: &Operator) -> Operator {
        let v = vectorize(&rho.0);
        unvectorize(&(&self.matrix * v))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::with_scale(&self.matrix * C64::new(c, 0.0), self.rate_scale * c.abs().max(1.0))
    }

    /// max |self - other| entrywise.
    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

impl Add for Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: Superoperator) -> Superoperator {
        Superoperator {
            matrix: self.matrix + rhs.matrix,
            rate_scale: self.rate_scale.max(rhs.rate_scale),
        }
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn vectorize(m: &Mat9) -> nalgebra::DVector<C64> {
    // nalgebra storage is column-major, which is exactly column stacking.
    nalgebra::DVector::from_column_slice(m.as_slice())
}

pub(crate) fn unvectorize(v: &nalgebra::DVector<C64>) -> Operator {
    Operator(Mat9::from_column_slice(v.as_slice()))
}

/// Reservoir coupling of one trap: injection with jump a^dagger at rate
/// gamma f and extraction with jump a at rate gamma (1 - f), for both levels.
pub fn build_dissipator(trap: Trap, params: &CellParams) -> Result<Superoperator> {
    params.validate()?;
    let occ = params.leads.resolve()?;
    let mut total = Superoperator::zero();
    for level in Level::ALL {
        let f = occ.get(trap, level);
        let a = annihilation(trap, level);
        total = total
            + Superoperator::lindblad(&a.dagger(), params.gamma * f)
            + Superoperator::lindblad(&a, params.gamma * (1.0 - f));
    }
    total.rate_scale = params.gamma.max(1.0);
    Ok(total)
}

/// Full generator: -i[H_cell, .] plus both reservoir dissipators.
pub fn assemble_liouvillian(params: &CellParams) -> Result<Superoperator> {
    params.validate()?;
    let coherent = Superoperator::coherent(&build_hamiltonian(params));
    let mut l = coherent + build_dissipator(Trap::One, params)? + build_dissipator(Trap::Two, params)?;
    l.rate_scale = params.max_rate();
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmodel::{BasisState, TrapState};

    #[test]
    fn fermi_dirac_examples() {
        let (mu, kt) = (3.0, 0.7);
        assert_eq!(fermi_dirac(mu, mu, kt).unwrap(), 0.5);
        let direct = 1.0 / (10f64.exp() + 1.0);
        let v = fermi_dirac(mu + 10.0 * kt, mu, kt).unwrap();
        assert!((v - 4.5398e-5).abs() < 1e-9);
        assert!((v - direct).abs() < 1e-18);
        assert_eq!(fermi_dirac(mu - 1000.0 * kt, mu, kt).unwrap(), 1.0);
        assert_eq!(fermi_dirac(mu + 1000.0 * kt, mu, kt).unwrap(), 0.0);
        assert!(fermi_dirac(0.0, 0.0, 0.0).is_err());
        assert!(fermi_dirac(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn deep_fermi_defaults_reach_the_limit() {
        let occ = LeadOccupations::deep_fermi(hz(400.0)).resolve().unwrap();
        for lead in occ.leads {
            assert!((lead.ground - 1.0).abs() < 1e-8);
            assert!(lead.excited.abs() < 1e-8);
        }
    }

    #[test]
    fn zero_params_give_zero_hamiltonian() {
        let p = CellParams {
            gamma: 0.0,
            lambda_coupling: 0.0,
            rabi: [0.0; 2],
            detuning: [0.0; 2],
            phase: [0.0; 2],
            leads: LeadOccupations::explicit(1.0, 0.0),
        };
        assert_eq!(build_hamiltonian(&p), Operator::zero());
    }

    #[test]
    fn tunneling_matrix_element() {
        let p = CellParams {
            rabi: [0.0; 2],
            ..CellParams::baseline()
        };
        let h = build_hamiltonian(&p);
        let g0 = BasisState::new(TrapState::Ground, TrapState::Empty);
        let og = BasisState::new(TrapState::Empty, TrapState::Ground);
        assert!((h.get(g0.index(), og.index()) - C64::new(hz(800.0), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn drive_carries_phase_on_g_from_e() {
        let p = CellParams {
            lambda_coupling: 0.0,
            rabi: [hz(100.0), 0.0],
            phase: [0.3, 0.0],
            ..CellParams::baseline()
        };
        let h = build_hamiltonian(&p);
        let g0 = BasisState::new(TrapState::Ground, TrapState::Empty);
        let e0 = BasisState::new(TrapState::Excited, TrapState::Empty);
        let expected = C64::from_polar(hz(100.0) / 2.0, 0.3);
        assert!((h.get(g0.index(), e0.index()) - expected).norm() < 1e-12);
        assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn pure_loss_leaves_vacuum_dark() {
        let p = CellParams {
            leads: LeadOccupations::explicit(0.0, 0.0),
            ..CellParams::baseline()
        };
        let vac = Operator::projector(BasisState::new(TrapState::Empty, TrapState::Empty));
        for trap in Trap::ALL {
            let d = build_dissipator(trap, &p).unwrap();
            assert_eq!(d.apply(&vac).max_abs(), 0.0);
        }
    }

    #[test]
    fn zero_gamma_gives_zero_dissipator() {
        let p = CellParams {
            gamma: 0.0,
            leads: LeadOccupations::explicit(1.0, 0.0),
            ..CellParams::baseline()
        };
        for trap in Trap::ALL {
            assert_eq!(build_dissipator(trap, &p).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn baseline_liouvillian_shape_and_trace() {
        let l = assemble_liouvillian(&CellParams::baseline()).unwrap();
        assert_eq!(l.matrix().shape(), (SUPER_DIM, SUPER_DIM));
        // Row image of the trace functional: sum of the population rows.
        for col in 0..SUPER_DIM {
            let s: C64 = (0..DIM).map(|i| l.matrix()[(i * (DIM + 1), col)]).sum();
            assert!(s.norm() < 1e-9, "column {col}: {s}");
        }
    }

    #[test]
    fn symmetric_liouvillian_commutes_with_trap_swap() {
        let p = CellParams {
            rabi: [hz(600.0); 2],
            detuning: [hz(250.0); 2],
            phase: [0.4; 2],
            ..CellParams::baseline()
        };
        let l = assemble_liouvillian(&p).unwrap();
        let swap = Operator::trap_swap();
        let s = Superoperator::sandwich(&swap, &swap.dagger());
        let ls = l.matrix() * s.matrix();
        let sl = s.matrix() * l.matrix();
        assert!(max_abs(&(ls - sl)) < 1e-9);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let mut p = CellParams::baseline();
        p.rabi[0] = -1.0;
        assert!(matches!(
            assemble_liouvillian(&p),
            Err(Error::InvalidParameter { field: "rabi[0]", .. })
        ));
        let mut p = CellParams::baseline();
        p.leads = LeadOccupations::Thermal {
            u_g: 0.0,
            u_e: 1.0,
            mu: 0.0,
            kt: 0.0,
        };
        assert!(matches!(p.validate(), Err(Error::InvalidParameter { field: "kt", .. })));
        p.leads = LeadOccupations::explicit(1.2, 0.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn mirror_swaps_trap_parameters() {
        let p = CellParams {
            rabi: [1.0, 2.0],
            detuning: [3.0, 4.0],
            phase: [5.0, 6.0],
            ..CellParams::baseline()
        };
        let m = p.mirrored();
        assert_eq!(m.rabi, [2.0, 1.0]);
        assert_eq!(m.detuning, [4.0, 3.0]);
        assert_eq!(m.phase, [6.0, 5.0]);
        assert_eq!(m.mirrored(), p);
    }
}
