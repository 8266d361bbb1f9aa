mod common;

use atomvolt::{
    assemble_liouvillian, lead_currents, net_current_low_temperature, simplified_current,
    steady_state, trap_probabilities, CellParams, LeadOccupations,
};

#[test]
fn deep_fermi_average_current_is_the_low_temperature_formula() {
    let mut rng = common::rng(31);
    let params = CellParams {
        leads: LeadOccupations::explicit(1.0, 0.0),
        ..CellParams::baseline()
    };
    for _ in 0..100 {
        let rho = common::random_density_matrix(&mut rng);
        let probs = trap_probabilities(&rho);
        let c = lead_currents(&rho, &params).unwrap();
        let low_t = net_current_low_temperature(&probs, params.gamma);
        assert!((c.i_avg - low_t).abs() <= 1e-10 * params.gamma);
        assert_eq!(c.i_low_t, low_t);
    }
}

#[test]
fn probabilities_are_complete_per_trap() {
    let mut rng = common::rng(32);
    for _ in 0..100 {
        let p = trap_probabilities(&common::random_density_matrix(&mut rng));
        assert!((p.p10 + p.p1g + p.p1e - 1.0).abs() < 1e-9);
        assert!((p.p20 + p.p2g + p.p2e - 1.0).abs() < 1e-9);
    }
}

#[test]
fn single_beam_polarizes_toward_driven_trap() {
    let params = CellParams::baseline();
    let ss = steady_state(&assemble_liouvillian(&params).unwrap()).unwrap();
    let p = trap_probabilities(&ss.rho);
    assert!(p.p2e > p.p1e);
    let polarization = (p.p2e - p.p1e).abs();
    let empty_gap = (p.p10 - p.p20).abs();
    assert!(empty_gap < 0.1 * polarization, "{empty_gap} vs {polarization}");

    let c = lead_currents(&ss.rho, &params).unwrap();
    assert!(c.i_avg > 0.0);
    assert!((c.i1 - c.i2).abs() <= 1e-8 * params.gamma);

    let simplified = simplified_current(&p, params.gamma);
    let low_t = net_current_low_temperature(&p, params.gamma);
    assert!((simplified - low_t).abs() <= (params.gamma / 2.0 * (p.p10 - p.p20)).abs() + 1e-12);
    assert!((simplified - c.i_avg).abs() / c.i_avg.abs() < 0.1);
}
