use atomvolt::{figure_preset, hz, run_sweep, zero_crossings, Figure, PresetInputs};

fn inputs(points: usize) -> PresetInputs {
    PresetInputs {
        points: Some(points),
        ..Default::default()
    }
}

#[test]
fn sweeps_are_deterministic() {
    let spec = figure_preset(Figure::Fig3e, &inputs(25)).unwrap();
    let a = run_sweep(&spec).unwrap();
    let b = run_sweep(&spec).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.i_avg.to_bits(), y.i_avg.to_bits());
        assert_eq!(x.p2e.to_bits(), y.p2e.to_bits());
    }
}

#[test]
fn symmetric_amplitude_sweep_is_odd() {
    let spec = figure_preset(Figure::Fig2d, &inputs(41)).unwrap();
    let rows = run_sweep(&spec).unwrap();
    let gamma = spec.base.gamma;
    for (lo, hi) in rows.iter().zip(rows.iter().rev()) {
        assert!((lo.axis_value + hi.axis_value).abs() < 1e-9 * hz(1200.0));
        assert!((lo.i_avg + hi.i_avg).abs() < 1e-8 * gamma, "{} {}", lo.i_avg, hi.i_avg);
    }
    assert_eq!(zero_crossings(&rows, 1e-8 * gamma), vec![0.0]);
}

#[test]
fn one_sided_amplitude_sweep_starts_closed() {
    let spec = figure_preset(Figure::Fig2b, &inputs(13)).unwrap();
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows[0].axis_value, 0.0);
    assert!(rows[0].i_avg.abs() < 1e-8 * spec.base.gamma);
    assert!(rows[1..].iter().all(|r| r.i_avg > 0.0));
}
