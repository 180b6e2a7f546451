//! Exponential decay of sup_{K_w}|u(t)| on a compact probe window.

use super::free::FreeSolver;
use super::grid::ModeState;
use crate::error::{LabError, Result};
use crate::geometry::SdSGeometry;
use crate::numerics::linear_fit;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub nu: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

/// Time series of sup_{x ∈ window}|v/r| along an evolution (either time direction).
pub fn sup_series(geom: &SdSGeometry, mut solver: FreeSolver, window: (f64, f64), t_end: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let nodes = &solver.state.grid.nodes;
    let idx: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i] >= window.0 && nodes[i] <= window.1).collect();
    if idx.is_empty() {
        return Err(LabError::WindowTooSmall("probe window contains no nodes".into()));
    }
    let inv_r = idx.iter().map(|&i| geom.radius_from_x(nodes[i]).map(|r| 1.0 / r)).collect::<Result<Vec<f64>>>()?;
    let sup = |st: &ModeState| idx.iter().zip(&inv_r).fold(0.0f64, |a, (&i, ir)| a.max((st.v[i] * ir).abs()));
    let mut times = vec![solver.state.time];
    let mut vals = vec![sup(&solver.state)];
    solver.run_to(t_end, |st| {
        times.push(st.time);
        vals.push(sup(st));
    });
    Ok((times, vals))
}

/// Least-squares fit of ln envelope against |t| over `fit_window` (in |t|), where the envelope
/// is the running maximum of the series from late to early times. Rejects fits below `min_r2`.
pub fn fit_decay_rate(times: &[f64], vals: &[f64], fit_window: (f64, f64), min_r2: f64) -> Result<DecayFit> {
    let n = times.len();
    let mut env = vec![0.0; n];
    let mut run: f64 = 0.0;
    for k in (0..n).rev() {
        run = run.max(vals[k].abs());
        env[k] = run;
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..n {
        let a = times[k].abs();
        if a >= fit_window.0 && a <= fit_window.1 && env[k] > 0.0 {
            xs.push(a);
            ys.push(env[k].ln());
        }
    }
    if xs.len() < 10 {
        return Err(LabError::WindowTooSmall("decay fit window has fewer than 10 samples".into()));
    }
    let fit = linear_fit(&xs, &ys);
    let out = DecayFit { nu: -fit.slope, r_squared: fit.r_squared, window: fit_window };
    if fit.r_squared < min_r2 {
        return Err(LabError::FitRejected(format!("r² = {:.4} below {min_r2}", fit.r_squared)));
    }
    Ok(out)
}
