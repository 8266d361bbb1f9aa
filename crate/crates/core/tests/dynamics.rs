//! Steady state against long-time evolution, integrator order and the
//! continuity equation along transients.

mod common;

use atomvolt::{
    assemble_liouvillian, evolve, evolve_final, lead_currents, steady_state, total_occupation,
    BasisState, CellParams, DensityMatrix, LeadOccupations, TrapState, C64,
};
use proptest::prelude::*;

const GG: BasisState = BasisState::new(TrapState::Ground, TrapState::Ground);
const VAC: BasisState = BasisState::new(TrapState::Empty, TrapState::Empty);

#[test]
fn baseline_steady_state_matches_long_time_evolution() {
    let p = CellParams::baseline();
    let l = assemble_liouvillian(&p).unwrap();
    let ss = steady_state(&l).unwrap();
    let late = evolve_final(&l, &DensityMatrix::pure(GG), 50.0 / p.gamma, 0.01 / p.max_rate()).unwrap();
    let diff = ss.rho.max_abs_diff(&late);
    assert!(diff < 1e-7, "difference {diff:e}");
}

#[test]
fn steady_state_matches_evolution_on_random_draws() {
    let mut rng = common::rng(21);
    for _ in 0..20 {
        let p = common::random_params(&mut rng);
        let l = assemble_liouvillian(&p).unwrap();
        let ss = steady_state(&l).unwrap();
        let late = evolve_final(&l, &DensityMatrix::pure(GG), 100.0 / p.gamma, 0.01 / p.max_rate()).unwrap();
        let diff = ss.rho.max_abs_diff(&late);
        assert!(diff < 1e-6, "{p:?}: difference {diff:e}");
    }
}

#[test]
fn steady_state_is_the_smallest_singular_vector() {
    let mut rng = common::rng(22);
    for _ in 0..5 {
        let p = common::random_params(&mut rng);
        let l = assemble_liouvillian(&p).unwrap();
        let ss = steady_state(&l).unwrap();
        let svd = l.matrix().clone().svd(false, true);
        let k = (0..svd.singular_values.len())
            .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
            .unwrap();
        let v_t = svd.v_t.unwrap();
        let v: Vec<C64> = v_t.row(k).iter().map(|z| z.conj()).collect();
        let op = atomvolt::Operator::from_fn(|i, j| v[i + 9 * j]);
        let rho = op.scale(C64::new(1.0, 0.0) / op.trace());
        let diff = (rho - ss.rho.as_operator()).max_abs();
        assert!(diff < 1e-9, "difference {diff:e}");
    }
}

#[test]
fn steady_currents_balance_and_mirror() {
    let mut rng = common::rng(23);
    for _ in 0..20 {
        let p = common::random_params(&mut rng);
        let ss = steady_state(&assemble_liouvillian(&p).unwrap()).unwrap();
        let c = lead_currents(&ss.rho, &p).unwrap();
        assert!((c.i1 - c.i2).abs() <= 1e-8 * p.gamma);

        let m = p.mirrored();
        let ssm = steady_state(&assemble_liouvillian(&m).unwrap()).unwrap();
        let cm = lead_currents(&ssm.rho, &m).unwrap();
        assert!((c.i_avg + cm.i_avg).abs() <= 1e-8 * p.gamma);
    }
}

#[test]
fn symmetric_drive_carries_no_current() {
    let mut rng = common::rng(24);
    for _ in 0..10 {
        let mut p = common::random_params(&mut rng);
        p.rabi[1] = p.rabi[0];
        p.detuning[1] = p.detuning[0];
        p.phase[1] = p.phase[0];
        let ss = steady_state(&assemble_liouvillian(&p).unwrap()).unwrap();
        assert!(ss.rho.max_abs_diff(&ss.rho.trap_swapped()) < 1e-9);
        let c = lead_currents(&ss.rho, &p).unwrap();
        assert!(c.i_avg.abs() <= 1e-9 * p.gamma);
    }
}

#[test]
fn rk4_is_fourth_order() {
    let p = CellParams::baseline();
    let l = assemble_liouvillian(&p).unwrap();
    let rho0 = DensityMatrix::pure(GG);
    let t_end = 2.0 / p.gamma;
    let h = 0.25 / p.max_rate();
    let run = |dt: f64| evolve_final(&l, &rho0, t_end, dt).unwrap();
    let reference = run(h / 8.0);
    let coarse = run(h).max_abs_diff(&reference);
    let fine = run(h / 2.0).max_abs_diff(&reference);
    let factor = coarse / fine;
    assert!((12.0..=20.0).contains(&factor), "convergence factor {factor}");
}

#[test]
fn continuity_holds_along_transients() {
    let mut rng = common::rng(25);
    let mut draws = vec![CellParams::baseline()];
    draws.extend((0..4).map(|_| common::random_params(&mut rng)));
    for p in draws {
        let l = assemble_liouvillian(&p).unwrap();
        let dt = 1e-3 / p.gamma;
        let traj = evolve(&l, &DensityMatrix::pure(VAC), 5.0 / p.gamma, dt, 1).unwrap();
        let n: Vec<f64> = traj.states.iter().map(total_occupation).collect();
        let h = traj.times[1] - traj.times[0];
        for k in 1..n.len() - 1 {
            let dndt = (n[k + 1] - n[k - 1]) / (2.0 * h);
            let c = lead_currents(&traj.states[k], &p).unwrap();
            let r = (dndt - (c.i1 - c.i2)).abs();
            assert!(r < 1e-4 * p.gamma, "t = {}: residual {r:e}", traj.times[k]);
        }
        for s in &traj.states {
            assert!((s.trace().re - 1.0).abs() < 1e-8);
            assert!(s.hermiticity_error() < 1e-8);
        }
    }
}

#[test]
fn occupation_rises_from_vacuum() {
    let p = CellParams::baseline();
    let l = assemble_liouvillian(&p).unwrap();
    let traj = evolve(&l, &DensityMatrix::pure(VAC), 10.0 / p.gamma, 1e-3 / p.gamma, 10).unwrap();
    let n: Vec<f64> = traj.states.iter().map(total_occupation).collect();
    let n_ss = total_occupation(&steady_state(&l).unwrap().rho);
    // Damped ringing around N_ss is allowed up to 1% of the steady value.
    let mut running_max = 0.0f64;
    for v in &n {
        assert!(*v >= running_max - 1e-2 * n_ss, "N dropped to {v} after reaching {running_max}");
        running_max = running_max.max(*v);
    }
    assert!(n[n.len() / 10] > 0.5 * n_ss);
    assert!((n.last().unwrap() - n_ss).abs() < 1e-2 * n_ss);
}

#[test]
fn no_lead_coupling_means_no_current() {
    let p = CellParams {
        gamma: 0.0,
        leads: LeadOccupations::explicit(1.0, 0.0),
        ..CellParams::baseline()
    };
    let l = assemble_liouvillian(&p).unwrap();
    let traj = evolve(&l, &DensityMatrix::pure(GG), 1e-2, 1e-5, 25).unwrap();
    for s in &traj.states {
        let c = lead_currents(s, &p).unwrap();
        assert_eq!((c.i1, c.i2), (0.0, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn steady_state_satisfies_state_invariants(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let p = common::random_params(&mut rng);
        let ss = steady_state(&assemble_liouvillian(&p).unwrap()).unwrap();
        prop_assert!(ss.residual <= 1e-8 * p.max_rate());
        prop_assert!((ss.rho.trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(ss.rho.hermiticity_error() <= 1e-10);
        prop_assert!(ss.rho.min_eigenvalue() >= -1e-8);
    }
}
