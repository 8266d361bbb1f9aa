//! Occupation basis of the double trap and the operators built on it.
//!
//! Each trap is a three-level local space {empty, ground, excited}; double
//! occupancy is excluded. The composite space is the tensor product with trap 1
//! as the slow (left) factor, so basis index = 3 * trap1 + trap2.
//!
//! Site operators are local operators tensored with the identity on the other
//! trap. No sign string is attached across sites, so operators on different
//! traps commute.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as C64;

/// Dimension of the composite Hilbert space.
pub const DIM: usize = 9;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-8;

pub(crate) type Mat9 = SMatrix<C64, DIM, DIM>;

/// Local occupation of a single trap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrapState {
    Empty,
    Ground,
    Excited,
}

impl TrapState {
    pub const ALL: [TrapState; 3] = [TrapState::Empty, TrapState::Ground, TrapState::Excited];

    pub fn index(self) -> usize {
        match self {
            TrapState::Empty => 0,
            TrapState::Ground => 1,
            TrapState::Excited => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    fn symbol(self) -> char {
        match self {
            TrapState::Empty => '0',
            TrapState::Ground => 'g',
            TrapState::Excited => 'e',
        }
    }

    fn from_symbol(c: char) -> Option<Self> {
        match c {
            '0' => Some(TrapState::Empty),
            'g' => Some(TrapState::Ground),
            'e' => Some(TrapState::Excited),
            _ => None,
        }
    }
}

/// An occupied internal level; the label accepted by site operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    Ground,
    Excited,
}

impl Level {
    pub const ALL: [Level; 2] = [Level::Ground, Level::Excited];
}

impl From<Level> for TrapState {
    fn from(level: Level) -> Self {
        match level {
            Level::Ground => TrapState::Ground,
            Level::Excited => TrapState::Excited,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trap {
    One,
    Two,
}

impl Trap {
    pub const ALL: [Trap; 2] = [Trap::One, Trap::Two];

    /// Zero-based slot, used to index per-trap parameter pairs.
    pub fn slot(self) -> usize {
        match self {
            Trap::One => 0,
            Trap::Two => 1,
        }
    }
}

/// One of the nine composite kets |trap1, trap2>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub trap1: TrapState,
    pub trap2: TrapState,
}

impl BasisState {
    pub const fn new(trap1: TrapState, trap2: TrapState) -> Self {
        BasisState { trap1, trap2 }
    }

    pub fn index(self) -> usize {
        3 * self.trap1.index() + self.trap2.index()
    }

    pub fn from_index(i: usize) -> Option<Self> {
        if i >= DIM {
            return None;
        }
        Some(BasisState {
            trap1: TrapState::from_index(i / 3)?,
            trap2: TrapState::from_index(i % 3)?,
        })
    }

    pub fn all() -> impl Iterator<Item = BasisState> {
        (0..DIM).filter_map(BasisState::from_index)
    }

    pub fn on(self, trap: Trap) -> TrapState {
        match trap {
            Trap::One => self.trap1,
            Trap::Two => self.trap2,
        }
    }

    pub fn swapped(self) -> Self {
        BasisState::new(self.trap2, self.trap1)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.trap1.symbol(), self.trap2.symbol())
    }
}

impl std::str::FromStr for BasisState {
    type Err = Error;

    /// Two-character label such as `00`, `g0` or `ge`.
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let parsed = match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => TrapState::from_symbol(a).zip(TrapState::from_symbol(b)),
            _ => None,
        };
        parsed
            .map(|(a, b)| BasisState::new(a, b))
            .ok_or_else(|| Error::invalid("basis_state", format!("`{s}` is not one of 00,0g,..,ee")))
    }
}

/// Dense 9x9 complex operator on the composite space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator(pub(crate) Mat9);

impl Operator {
    pub fn zero() -> Self {
        Operator(Mat9::zeros())
    }

    pub fn identity() -> Self {
        Operator(Mat9::identity())
    }

    pub fn from_fn(f: impl FnMut(usize, usize) -> C64) -> Self {
        Operator(Mat9::from_fn(f))
    }

    /// Accepts a dynamically sized matrix; anything but 9x9 is rejected.
    pub fn from_dmatrix(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != DIM || m.ncols() != DIM {
            return Err(Error::DimensionMismatch {
                expected: DIM,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(Operator::from_fn(|i, j| m[(i, j)]))
    }

    /// |bra><ket| in the composite basis.
    pub fn transition(to: BasisState, from: BasisState) -> Self {
        let mut m = Mat9::zeros();
        m[(to.index(), from.index())] = C64::new(1.0, 0.0);
        Operator(m)
    }

    pub fn projector(state: BasisState) -> Self {
        Self::transition(state, state)
    }

    /// Permutation exchanging the roles of the two traps.
    pub fn trap_swap() -> Self {
        let mut m = Mat9::zeros();
        for b in BasisState::all() {
            m[(b.swapped().index(), b.index())] = C64::new(1.0, 0.0);
        }
        Operator(m)
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Operator(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Operator(self.0 * c)
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        Operator(self.0 * other.0 - other.0 * self.0)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |A - A^dagger| entrywise.
    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(DIM, DIM, |i, j| self.0[(i, j)])
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        Operator(self.0 + rhs.0)
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        Operator(self.0 - rhs.0)
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator(self.0 * rhs.0)
    }
}

impl Mul<Operator> for C64 {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator(rhs.0 * self)
    }
}

impl Mul<Operator> for f64 {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator(rhs.0 * C64::new(self, 0.0))
    }
}

/// Annihilation operator |0><s| on `trap`, identity on the other trap.
pub fn annihilation(trap: Trap, level: Level) -> Operator {
    let target: TrapState = level.into();
    let mut m = Mat9::zeros();
    for from in BasisState::all().filter(|b| b.on(trap) == target) {
        let to = match trap {
            Trap::One => BasisState::new(TrapState::Empty, from.trap2),
            Trap::Two => BasisState::new(from.trap1, TrapState::Empty),
        };
        m[(to.index(), from.index())] = C64::new(1.0, 0.0);
    }
    Operator(m)
}

pub fn creation(trap: Trap, level: Level) -> Operator {
    annihilation(trap, level).dagger()
}

/// Number operator a^dagger a = |s><s| on `trap`.
pub fn number(trap: Trap, level: Level) -> Operator {
    creation(trap, level) * annihilation(trap, level)
}

pub fn dagger(op: &Operator) -> Operator {
    op.dagger()
}

/// tr(op * rho).
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> C64 {
    (op.0 * rho.0).trace()
}

/// Hermitian, unit-trace, positive semidefinite 9x9 state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub(crate) Mat9);

impl DensityMatrix {
    /// Validates against the strict state tolerances.
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_positivity_tolerance(op, POSITIVITY_TOL)
    }

    /// Same checks with a caller-chosen floor on the smallest eigenvalue.
    pub fn with_positivity_tolerance(op: Operator, positivity_tol: f64) -> Result<Self> {
        let herm = op.hermiticity_error();
        if !(herm <= HERMITIAN_TOL) {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm:.3e})")));
        }
        let tr = op.trace();
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = min_eigenvalue(&op.0);
        if min_eig < -positivity_tol {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min_eig:.3e}")));
        }
        Ok(DensityMatrix(op.0))
    }

    pub(crate) fn from_raw(m: Mat9) -> Self {
        DensityMatrix(m)
    }

    pub fn pure(state: BasisState) -> Self {
        DensityMatrix(Operator::projector(state).0)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat9::identity() * C64::new(1.0 / DIM as f64, 0.0))
    }

    pub fn as_operator(&self) -> Operator {
        Operator(self.0)
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn population(&self, state: BasisState) -> f64 {
        self.0[(state.index(), state.index())].re
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.as_operator().hermiticity_error()
    }

    /// P rho P^dagger for the trap-exchange permutation P.
    pub fn trap_swapped(&self) -> Self {
        let p = Operator::trap_swap().0;
        DensityMatrix(p * self.0 * p.adjoint())
    }

    /// max |self - other| entrywise.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn min_eigenvalue(m: &Mat9) -> f64 {
    // Eigenvalues of the Hermitian part; callers check hermiticity separately.
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}
