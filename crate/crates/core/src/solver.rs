//! Stationary states and time evolution of a Liouvillian.

use nalgebra::{DMatrix, DVector};

use crate::cell::{unvectorize, vectorize, Superoperator, SUPER_DIM};
use crate::error::{Error, Result};
use crate::qmodel::{DensityMatrix, Mat9, Operator, C64, DIM};

/// Relative floor on the second-smallest singular value of L.
const DEGENERACY_TOL: f64 = 1e-10;
/// Residual tolerance relative to the Liouvillian's rate scale.
const RESIDUAL_TOL: f64 = 1e-8;
const POSITIVITY_TOL: f64 = 1e-8;
const TRANSIENT_POSITIVITY_TOL: f64 = 1e-6;
const TRACE_DRIFT_TOL: f64 = 1e-6;
const TRANSIENT_HERMITIAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    /// max |L vec(rho)|, rad/s.
    pub residual: f64,
    /// Second-smallest singular value of L, rad/s.
    pub spectral_gap_proxy: f64,
}

/// Singular values of L in ascending order.
pub fn singular_values(l: &Superoperator) -> Vec<f64> {
    let mut s: Vec<f64> = l.matrix().clone().singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Solves L vec(rho) = 0 with tr(rho) = 1.
///
/// One population equation is replaced by the trace constraint. The trace
/// functional is the left null vector of every trace-preserving L and is
/// supported on the population rows only, so the replaced row must be one of
/// those; among them the one with the smallest infinity norm is taken.
pub fn steady_state(l: &Superoperator) -> Result<SteadyStateResult> {
    let norm = l.max_abs();
    let sv = singular_values(l);
    let sigma2 = sv[1];
    let threshold = DEGENERACY_TOL * norm;
    if sigma2 <= threshold {
        return Err(Error::NonUniqueSteadyState {
            sigma: sigma2,
            threshold,
        });
    }

    let m = l.matrix();
    let row_norm = |r: usize| m.row(r).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let replaced = (0..DIM)
        .map(|i| i * (DIM + 1))
        .min_by(|&a, &b| row_norm(a).total_cmp(&row_norm(b)))
        .expect("DIM > 0");

    let mut a = m.clone();
    a.row_mut(replaced).fill(C64::new(0.0, 0.0));
    for i in 0..DIM {
        a[(replaced, i * (DIM + 1))] = C64::new(1.0, 0.0);
    }
    let mut b = DVector::zeros(SUPER_DIM);
    b[replaced] = C64::new(1.0, 0.0);

    let tolerance = RESIDUAL_TOL * l.rate_scale();
    let v = a.lu().solve(&b).ok_or(Error::SolverFailed {
        residual: f64::INFINITY,
        tolerance,
    })?;

    let raw = unvectorize(&v).0;
    let mut rho = (raw + raw.adjoint()) * C64::new(0.5, 0.0);
    rho /= C64::new(rho.trace().re, 0.0);

    let min_eig = crate::qmodel::min_eigenvalue(&rho);
    if min_eig < -POSITIVITY_TOL {
        return Err(Error::NotPositive {
            min_eigenvalue: min_eig,
        });
    }
    if min_eig < 0.0 {
        rho = clip_negative_eigenvalues(&rho);
    }

    let residual = residual_of(l, &rho);
    if !(residual <= tolerance) {
        return Err(Error::SolverFailed { residual, tolerance });
    }
    Ok(SteadyStateResult {
        rho: DensityMatrix::from_raw(rho),
        residual,
        spectral_gap_proxy: sigma2,
    })
}

fn residual_of(l: &Superoperator, rho: &Mat9) -> f64 {
    let r = l.matrix() * vectorize(rho);
    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn clip_negative_eigenvalues(rho: &Mat9) -> Mat9 {
    let eig = rho.symmetric_eigen();
    let clipped = eig.eigenvalues.map(|x| C64::new(x.max(0.0), 0.0));
    let u = eig.eigenvectors;
    let out = u * Mat9::from_diagonal(&clipped) * u.adjoint();
    out / C64::new(out.trace().re, 0.0)
}

/// One classical RK4 step of the linear system v' = L v, as a matrix.
#[derive(Debug, Clone)]
pub struct Rk4Propagator {
    step: DMatrix<C64>,
    dt: f64,
}

impl Rk4Propagator {
    pub fn new(l: &Superoperator, dt: f64) -> Self {
        let hl = l.matrix() * C64::new(dt, 0.0);
        let id = DMatrix::<C64>::identity(SUPER_DIM, SUPER_DIM);
        // I + hL (I + hL/2 (I + hL/3 (I + hL/4)))
        let mut acc = id.clone();
        for k in [4.0, 3.0, 2.0, 1.0] {
            acc = &id + &hl * acc * C64::new(1.0 / k, 0.0);
        }
        Rk4Propagator { step: acc, dt }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.step
    }

    pub fn advance(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.step * v
    }

    /// The step matrix raised to `n` by repeated squaring.
    pub fn power(&self, mut n: usize) -> DMatrix<C64> {
        let mut result = DMatrix::<C64>::identity(SUPER_DIM, SUPER_DIM);
        let mut base = self.step.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &DensityMatrix)> {
        self.times.last().copied().zip(self.states.last())
    }
}

/// Step count and adjusted step landing exactly on `t_end`.
fn step_plan(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt", format!("must be positive and finite, got {dt}")));
    }
    if !(t_end >= dt) || !t_end.is_finite() {
        return Err(Error::invalid("t_end", format!("must be finite and >= dt, got {t_end}")));
    }
    let n = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    Ok((n, t_end / n as f64))
}

fn checked_state(v: &DVector<C64>, time: f64) -> Result<DensityMatrix> {
    let op: Operator = unvectorize(v);
    if op.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::StepTooLarge {
            time,
            detail: "state diverged".into(),
        });
    }
    let drift = (op.trace() - C64::new(1.0, 0.0)).norm();
    if drift > TRACE_DRIFT_TOL {
        return Err(Error::StepTooLarge {
            time,
            detail: format!("trace drift {drift:.3e}"),
        });
    }
    let herm = op.hermiticity_error();
    if herm > TRANSIENT_HERMITIAN_TOL {
        return Err(Error::StepTooLarge {
            time,
            detail: format!("hermiticity error {herm:.3e}"),
        });
    }
    let min_eig = crate::qmodel::min_eigenvalue(&op.0);
    if min_eig < -TRANSIENT_POSITIVITY_TOL {
        return Err(Error::StepTooLarge {
            time,
            detail: format!("minimum eigenvalue {min_eig:.3e}"),
        });
    }
    Ok(DensityMatrix::from_raw(op.0))
}

/// Fixed-step RK4 from `rho0` to `t_end`, recording every `stride`-th step
/// plus the initial and final states. The step is shrunk so that an integer
/// number of steps lands exactly on `t_end`.
pub fn evolve(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    if stride == 0 {
        return Err(Error::invalid("stride", "must be at least 1"));
    }
    let (steps, h) = step_plan(t_end, dt)?;
    let prop = Rk4Propagator::new(l, h);
    let mut v = vectorize(&rho0.0);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![*rho0],
    };
    for k in 1..=steps {
        v = prop.advance(&v);
        if k % stride == 0 || k == steps {
            let t = k as f64 * h;
            traj.states.push(checked_state(&v, t)?);
            traj.times.push(t);
        }
    }
    Ok(traj)
}

/// Final state of the same RK4 scheme as [`evolve`], computed by powering the
/// one-step propagator instead of stepping.
pub fn evolve_final(l: &Superoperator, rho0: &DensityMatrix, t_end: f64, dt: f64) -> Result<DensityMatrix> {
    let (steps, h) = step_plan(t_end, dt)?;
    let prop = Rk4Propagator::new(l, h);
    let v = prop.power(steps) * vectorize(&rho0.0);
    checked_state(&v, t_end)
}

/// max |L vec(rho)|.
pub fn residual(l: &Superoperator, rho: &DensityMatrix) -> f64 {
    residual_of(l, &rho.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{assemble_liouvillian, hz, CellParams, LeadOccupations};
    use crate::qmodel::{BasisState, TrapState};

    const GG: BasisState = BasisState::new(TrapState::Ground, TrapState::Ground);

    #[test]
    fn filled_ground_state_without_drive_or_tunneling() {
        let p = CellParams {
            lambda_coupling: 0.0,
            rabi: [0.0; 2],
            leads: LeadOccupations::explicit(1.0, 0.0),
            ..CellParams::baseline()
        };
        let ss = steady_state(&assemble_liouvillian(&p).unwrap()).unwrap();
        assert!(ss.rho.max_abs_diff(&DensityMatrix::pure(GG)) < 1e-12);
        assert!(ss.spectral_gap_proxy > 0.0);
    }

    #[test]
    fn symmetric_drive_gives_swap_invariant_state() {
        let p = CellParams {
            rabi: [hz(500.0); 2],
            detuning: [hz(-200.0); 2],
            phase: [1.1; 2],
            ..CellParams::baseline()
        };
        let ss = steady_state(&assemble_liouvillian(&p).unwrap()).unwrap();
        assert!(ss.rho.max_abs_diff(&ss.rho.trap_swapped()) < 1e-9);
    }

    #[test]
    fn zero_liouvillian_is_degenerate() {
        let err = steady_state(&Superoperator::zero()).unwrap_err();
        assert!(matches!(err, Error::NonUniqueSteadyState { .. }));
        assert!(err.to_string().contains("non-unique steady state"));
    }

    #[test]
    fn unitary_limit_is_degenerate() {
        let p = CellParams {
            gamma: 0.0,
            leads: LeadOccupations::explicit(1.0, 0.0),
            ..CellParams::baseline()
        };
        let err = steady_state(&assemble_liouvillian(&p).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonUniqueSteadyState { .. }));
    }

    #[test]
    fn zero_generator_keeps_state_constant() {
        let rho0 = DensityMatrix::maximally_mixed();
        let traj = evolve(&Superoperator::zero(), &rho0, 1.0, 0.1, 1).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.states.iter().all(|s| s.max_abs_diff(&rho0) == 0.0));
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert!((traj.last().unwrap().0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stride_records_endpoints() {
        let l = assemble_liouvillian(&CellParams::baseline()).unwrap();
        let rho0 = DensityMatrix::pure(GG);
        let traj = evolve(&l, &rho0, 1e-3, 1e-5, 7).unwrap();
        assert_eq!(traj.times[0], 0.0);
        assert!((traj.times.last().unwrap() - 1e-3).abs() < 1e-15);
        assert_eq!(traj.len(), 1 + 100 / 7 + 1);
    }

    #[test]
    fn unitary_evolution_conserves_purity() {
        let p = CellParams {
            gamma: 0.0,
            rabi: [hz(300.0), hz(700.0)],
            detuning: [hz(150.0), hz(-50.0)],
            phase: [0.2, 1.3],
            leads: LeadOccupations::explicit(1.0, 0.0),
            ..CellParams::baseline()
        };
        let l = assemble_liouvillian(&p).unwrap();
        let rho0 = DensityMatrix::pure(BasisState::new(TrapState::Ground, TrapState::Empty));
        let t_end = 10.0 / p.lambda_coupling;
        let dt = 0.01 / p.max_rate();
        let traj = evolve(&l, &rho0, t_end, dt, 10).unwrap();
        for s in &traj.states {
            assert!((s.purity() - 1.0).abs() < 1e-8);
            assert!((s.trace().re - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn powered_propagator_matches_stepping() {
        let l = assemble_liouvillian(&CellParams::baseline()).unwrap();
        let rho0 = DensityMatrix::pure(GG);
        let stepped = evolve(&l, &rho0, 2e-3, 1e-5, 50).unwrap();
        let powered = evolve_final(&l, &rho0, 2e-3, 1e-5).unwrap();
        assert!(stepped.last().unwrap().1.max_abs_diff(&powered) < 1e-12);
    }

    #[test]
    fn oversized_step_is_reported() {
        let l = assemble_liouvillian(&CellParams::baseline()).unwrap();
        let rho0 = DensityMatrix::pure(GG);
        let err = evolve(&l, &rho0, 1.0, 1e-2, 1).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }), "{err}");
    }

    #[test]
    fn invalid_step_arguments() {
        let rho0 = DensityMatrix::maximally_mixed();
        let l = Superoperator::zero();
        assert!(evolve(&l, &rho0, 1.0, 0.0, 1).is_err());
        assert!(evolve(&l, &rho0, 0.01, 0.1, 1).is_err());
        assert!(evolve(&l, &rho0, 1.0, 0.1, 0).is_err());
    }
}
