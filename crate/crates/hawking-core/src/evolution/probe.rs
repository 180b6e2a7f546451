//! Sampling of an evolving field at fixed radii and at arbitrary space-time points.

use super::free::FreeSolver;
use super::grid::ModeState;
use crate::error::Result;
use crate::numerics::interp_uniform;

/// Time series of (v, v_t) at a fixed x, one sample per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSeries {
    pub x: f64,
    pub times: Vec<f64>,
    pub v: Vec<f64>,
    pub v_t: Vec<f64>,
}

/// Cubic spatial interpolation of (v, v_t) on a uniform-grid state.
pub fn sample_state(state: &ModeState, x: f64) -> (f64, f64) {
    let x0 = state.grid.first();
    let dx = state.grid.spacing();
    (interp_uniform(x0, dx, &state.v, x), interp_uniform(x0, dx, &state.v_t, x))
}

#[derive(Debug, Clone, Copy)]
struct Bracket {
    t: f64,
    v: f64,
    vt: f64,
}

/// Values at scattered (t, x) points, reconstructed by cubic Hermite interpolation in time
/// between the two bracketing steps.
#[derive(Debug, Clone)]
pub struct PointSampler {
    points: Vec<(f64, f64)>,
    order: Vec<usize>,
    below: Vec<Option<Bracket>>,
    above: Vec<Option<Bracket>>,
    window: f64,
}

impl PointSampler {
    pub fn new(points: Vec<(f64, f64)>, step: f64) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].0.partial_cmp(&points[b].0).unwrap());
        let n = points.len();
        Self { points, order, below: vec![None; n], above: vec![None; n], window: step.abs() * 1.000001 }
    }

    pub fn observe(&mut self, state: &ModeState) {
        let t = state.time;
        let lo = self.order.partition_point(|&i| self.points[i].0 < t - self.window);
        let hi = self.order.partition_point(|&i| self.points[i].0 <= t + self.window);
        for &i in &self.order[lo..hi] {
            let (tp, xp) = self.points[i];
            let (v, vt) = sample_state(state, xp);
            let b = Bracket { t, v, vt };
            if t <= tp {
                if self.below[i].map_or(true, |o| o.t < t) {
                    self.below[i] = Some(b);
                }
            }
            if t >= tp {
                if self.above[i].map_or(true, |o| o.t > t) {
                    self.above[i] = Some(b);
                }
            }
        }
    }

    /// (v, v_t) per point in the original order; points never bracketed return `None`.
    pub fn finish(&self) -> Vec<Option<(f64, f64)>> {
        (0..self.points.len())
            .map(|i| {
                let tp = self.points[i].0;
                match (self.below[i], self.above[i]) {
                    (Some(a), Some(b)) => Some(hermite(a, b, tp)),
                    _ => None,
                }
            })
            .collect()
    }
}

fn hermite(a: Bracket, b: Bracket, t: f64) -> (f64, f64) {
    let h = b.t - a.t;
    if h == 0.0 {
        return (a.v, a.vt);
    }
    let s = (t - a.t) / h;
    let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
    let h10 = s * s * s - 2.0 * s * s + s;
    let h01 = -2.0 * s * s * s + 3.0 * s * s;
    let h11 = s * s * s - s * s;
    let v = h00 * a.v + h10 * h * a.vt + h01 * b.v + h11 * h * b.vt;
    let d00 = 6.0 * s * s - 6.0 * s;
    let d10 = 3.0 * s * s - 4.0 * s + 1.0;
    let d01 = -6.0 * s * s + 6.0 * s;
    let d11 = 3.0 * s * s - 2.0 * s;
    let vt = (d00 * a.v + d01 * b.v) / h + d10 * a.vt + d11 * b.vt;
    (v, vt)
}

/// Output of [`run_sampled`].
#[derive(Debug, Clone)]
pub struct SampledRun {
    pub series: Vec<ProbeSeries>,
    pub points: Vec<Option<(f64, f64)>>,
    pub final_state: ModeState,
}

/// Runs `solver` to `t_end`, recording fixed-x series and scattered points.
pub fn run_sampled(mut solver: FreeSolver, t_end: f64, fixed_x: &[f64], points: Vec<(f64, f64)>) -> Result<SampledRun> {
    let mut series: Vec<ProbeSeries> =
        fixed_x.iter().map(|&x| ProbeSeries { x, times: vec![], v: vec![], v_t: vec![] }).collect();
    let mut sampler = PointSampler::new(points, solver.dt);
    let record = |state: &ModeState, series: &mut Vec<ProbeSeries>, sampler: &mut PointSampler| {
        for s in series.iter_mut() {
            let (v, vt) = sample_state(state, s.x);
            s.times.push(state.time);
            s.v.push(v);
            s.v_t.push(vt);
        }
        sampler.observe(state);
    };
    record(&solver.state, &mut series, &mut sampler);
    solver.run_to(t_end, |st| record(st, &mut series, &mut sampler));
    Ok(SampledRun { series, points: sampler.finish(), final_state: solver.state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{FreeOptions, Grid1D};

    #[test]
    fn point_samples_match_dalembert() {
        let f = |x: f64| (-(x * x)).exp();
        let df = |x: f64| -2.0 * x * (-(x * x)).exp();
        let grid = Grid1D::uniform_spacing(-30.0, 30.0, 0.01).unwrap();
        let state = ModeState::from_fn(0, 0.0, grid, |x| f(x), |_| 0.0);
        let n = state.v.len();
        let solver = FreeSolver::new(state, vec![0.0; n], -0.005, FreeOptions::default()).unwrap();
        let pts = vec![(-3.3337, 1.1), (-7.01, -2.0), (-0.0021, 0.3)];
        let run = run_sampled(solver, -8.0, &[2.0], pts.clone()).unwrap();
        for (p, got) in pts.iter().zip(&run.points) {
            let (v, vt) = got.unwrap();
            let ev = 0.5 * (f(p.1 - p.0) + f(p.1 + p.0));
            let evt = 0.5 * (-df(p.1 - p.0) + df(p.1 + p.0));
            assert!((v - ev).abs() < 1e-4, "{v} {ev}");
            assert!((vt - evt).abs() < 1e-3, "{vt} {evt}");
        }
        assert_eq!(run.series[0].v.len(), run.series[0].times.len());
    }
}
