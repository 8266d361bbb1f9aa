//! Plot-ready CSV. Values use `{:.11e}` (twelve significant digits), rows end
//! in `\n`, and failed sweep points write `NaN`.

use std::fmt::Write;

use atomvolt::SweepRow;

pub const SWEEP_HEADER: &str =
    "axis_value,p10,p20,p1g,p2g,p1e,p2e,i1g,i1e,i2g,i2e,i_avg,i_lowT,i_simplified,i_over_gamma,residual";

pub const EVOLVE_HEADER: &str = "t,N,i1,i2,dN_dt_fd,continuity_residual";

fn push_row(out: &mut String, values: &[f64]) {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        if v.is_nan() {
            out.push_str("NaN");
        } else {
            write!(out, "{v:.11e}").unwrap();
        }
    }
    out.push('\n');
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 16 * 20);
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        push_row(
            &mut out,
            &[
                r.axis_value,
                r.p10,
                r.p20,
                r.p1g,
                r.p2g,
                r.p1e,
                r.p2e,
                r.i1g,
                r.i1e,
                r.i2g,
                r.i2e,
                r.i_avg,
                r.i_low_t,
                r.i_simplified,
                r.i_over_gamma,
                r.residual,
            ],
        );
    }
    out
}

/// Derivative of samples `y` at times `t`: centred differences inside,
/// second-order one-sided differences at the ends. Handles uneven spacing.
pub fn finite_difference(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    match n {
        0 => return vec![],
        1 => return vec![0.0],
        2 => {
            let d = (y[1] - y[0]) / (t[1] - t[0]);
            return vec![d, d];
        }
        _ => {}
    }
    // Three-point derivative through (t0,y0),(t1,y1),(t2,y2) evaluated at `at`.
    let three = |i: usize, at: f64| {
        let (t0, t1, t2) = (t[i], t[i + 1], t[i + 2]);
        let (y0, y1, y2) = (y[i], y[i + 1], y[i + 2]);
        y0 * (2.0 * at - t1 - t2) / ((t0 - t1) * (t0 - t2))
            + y1 * (2.0 * at - t0 - t2) / ((t1 - t0) * (t1 - t2))
            + y2 * (2.0 * at - t0 - t1) / ((t2 - t0) * (t2 - t1))
    };
    let mut d = Vec::with_capacity(n);
    d.push(three(0, t[0]));
    d.extend((1..n - 1).map(|i| three(i - 1, t[i])));
    d.push(three(n - 3, t[n - 1]));
    d
}

pub struct EvolveSample {
    pub t: f64,
    pub n: f64,
    pub i1: f64,
    pub i2: f64,
}

/// Writes the series and returns it together with the largest
/// |dN/dt - (i1 - i2)| over the run.
pub fn evolve_csv(samples: &[EvolveSample]) -> (String, f64) {
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let n: Vec<f64> = samples.iter().map(|s| s.n).collect();
    let dn = finite_difference(&t, &n);
    let mut out = String::with_capacity(64 + samples.len() * 6 * 20);
    out.push_str(EVOLVE_HEADER);
    out.push('\n');
    let mut worst = 0.0f64;
    for (s, d) in samples.iter().zip(&dn) {
        let resid = d - (s.i1 - s.i2);
        worst = worst.max(resid.abs());
        push_row(&mut out, &[s.t, s.n, s.i1, s.i2, *d, resid]);
    }
    (out, worst)
}
