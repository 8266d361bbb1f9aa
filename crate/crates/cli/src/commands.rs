use std::io::Write;

use atomvolt::sweeps::evaluate_point;
use atomvolt::{
    assemble_liouvillian, evolve, figure_preset, lead_currents, run_sweep, total_occupation,
    zero_crossings, DensityMatrix, PresetInputs, SweepRow, SweepSpec,
};

use crate::config::{InitialState, RunConfig};
use crate::csv::{evolve_csv, sweep_csv, EvolveSample};
use crate::CliError;

const DEFAULT_POINTS: usize = 241;

/// CSV goes to `--out` (summary to stdout) or to stdout (summary to stderr).
fn emit(cfg: &RunConfig, csv: &str, summary: &[(String, String)]) -> Result<(), CliError> {
    let mut text = String::new();
    for (k, v) in summary {
        text.push_str(format!("{k} = {v}").trim_end());
        text.push('\n');
    }
    match &cfg.output_path {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            print!("{text}");
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(csv.as_bytes())?;
            out.flush()?;
            eprint!("{text}");
        }
    }
    Ok(())
}

fn kv(key: &str, value: impl std::fmt::Display) -> (String, String) {
    (key.to_string(), value.to_string())
}

fn sci(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn cmd_steady(cfg: &RunConfig) -> Result<(), CliError> {
    let params = &cfg.params;
    let row = evaluate_point(0.0, params)?;
    let summary = vec![
        kv("i_avg", sci(row.i_avg)),
        kv("i_over_gamma", sci(row.i_over_gamma)),
        kv("p1e", sci(row.p1e)),
        kv("p2e", sci(row.p2e)),
        kv("total_occupation", sci(row.p1g + row.p1e + row.p2g + row.p2e)),
        kv("residual", sci(row.residual)),
    ];
    emit(cfg, &sweep_csv(std::slice::from_ref(&row)), &summary)
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<(), CliError> {
    let params = &cfg.params;
    let max_rate = params.max_rate();
    let dt = cfg.evolve.dt.unwrap_or(1e-3 / max_rate);
    let t_end = cfg.evolve.t_end.unwrap_or(if params.gamma > 0.0 {
        20.0 / params.gamma
    } else {
        20.0 / max_rate
    });
    let rho0 = match cfg.evolve.initial {
        InitialState::Basis(b) => DensityMatrix::pure(b),
        InitialState::MaximallyMixed => DensityMatrix::maximally_mixed(),
    };
    let l = assemble_liouvillian(params)?;
    let traj = evolve(&l, &rho0, t_end, dt, cfg.evolve.stride)?;
    let samples = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, rho)| {
            let c = lead_currents(rho, params)?;
            Ok(EvolveSample {
                t,
                n: total_occupation(rho),
                i1: c.i1,
                i2: c.i2,
            })
        })
        .collect::<Result<Vec<_>, atomvolt::Error>>()?;
    let (csv, worst) = evolve_csv(&samples);
    let last = samples.last().expect("trajectory holds the initial state");
    let mut summary = vec![
        kv("samples", samples.len()),
        kv("t_end", sci(last.t)),
        kv("final_N", sci(last.n)),
        kv("final_i1", sci(last.i1)),
        kv("final_i2", sci(last.i2)),
        kv("max_continuity_residual", sci(worst)),
    ];
    if params.gamma > 0.0 {
        summary.push(kv("max_continuity_residual_over_gamma", sci(worst / params.gamma)));
    }
    emit(cfg, &csv, &summary)
}

fn sweep_spec(cfg: &RunConfig) -> Result<SweepSpec, CliError> {
    let s = &cfg.sweep;
    let mut spec = match s.preset {
        Some(figure) => {
            let inputs = PresetInputs {
                rabi: s.rabi,
                detuning: s.detuning,
                points: s.points,
            };
            let mut spec = figure_preset(figure, &inputs)?;
            if let Some(axis) = s.axis {
                if axis != spec.axis {
                    return Err(CliError::Config(format!(
                        "sweep.axis: preset {} sweeps {}, not {axis}",
                        figure.name(),
                        spec.axis
                    )));
                }
            }
            spec.start = s.start.unwrap_or(spec.start);
            spec.stop = s.stop.unwrap_or(spec.stop);
            spec
        }
        None => {
            let missing = |field: &str| CliError::Config(format!("sweep.{field}: required without a preset"));
            SweepSpec {
                base: cfg.params,
                axis: s.axis.ok_or_else(|| missing("axis"))?,
                start: s.start.ok_or_else(|| missing("start"))?,
                stop: s.stop.ok_or_else(|| missing("stop"))?,
                points: s.points.unwrap_or(DEFAULT_POINTS),
                symmetric_mode: false,
            }
        }
    };
    if let Some(m) = s.symmetric_mode {
        spec.symmetric_mode = m;
    }
    spec.validate()?;
    Ok(spec)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = sweep_spec(cfg)?;
    let rows: Vec<SweepRow> = run_sweep(&spec)?;
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    let crossings = zero_crossings(&rows, 1e-8 * spec.base.gamma);
    let mut summary = vec![
        kv("axis", spec.axis),
        kv("rows", rows.len()),
        kv("failed_rows", failed),
        kv(
            "zero_crossings",
            crossings.iter().map(|&x| sci(x)).collect::<Vec<_>>().join(" "),
        ),
    ];
    if let Some(first) = rows.iter().find_map(|r| r.error.as_deref()) {
        summary.push(kv("first_error", first));
    }
    emit(cfg, &sweep_csv(&rows), &summary)
}
