//! Evolution with a moving Dirichlet wall in the co-moving coordinate ξ = x − z(t).

use super::free::rk4_step;
use super::grid::{Grid1D, ModeState};
use crate::charts::StarModel;
use crate::error::{LabError, Result};

/// A timelike wall trajectory x = z(t).
pub trait BoundaryPath {
    fn z(&self, t: f64) -> f64;
    fn zdot(&self, t: f64) -> f64;
    fn zddot(&self, t: f64) -> f64;
}

impl BoundaryPath for StarModel {
    fn z(&self, t: f64) -> f64 {
        self.z_star(t)
    }
    fn zdot(&self, t: f64) -> f64 {
        self.z_dot(t)
    }
    fn zddot(&self, t: f64) -> f64 {
        self.z_ddot(t)
    }
}

/// Wall at rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenWall(pub f64);

impl BoundaryPath for FrozenWall {
    fn z(&self, _t: f64) -> f64 {
        self.0
    }
    fn zdot(&self, _t: f64) -> f64 {
        0.0
    }
    fn zddot(&self, _t: f64) -> f64 {
        0.0
    }
}

/// Wall moving with constant velocity c from x0 at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformWall {
    pub x0: f64,
    pub speed: f64,
}

impl BoundaryPath for UniformWall {
    fn z(&self, t: f64) -> f64 {
        self.x0 + self.speed * t
    }
    fn zdot(&self, _t: f64) -> f64 {
        self.speed
    }
    fn zddot(&self, _t: f64) -> f64 {
        0.0
    }
}

/// RK4 solver for w_tt = 2ż w_tξ + (1 − ż²)w_ξξ + z̈ w_ξ − W(ξ + z)w with w = 0 at both ends.
pub struct CoMovingSolver<'a, B: BoundaryPath, P: Fn(f64) -> f64> {
    pub path: &'a B,
    pub potential: P,
    pub xi: Grid1D,
    pub w: Vec<f64>,
    pub q: Vec<f64>,
    pub time: f64,
    pub dt: f64,
    pub ell: u32,
}

impl<'a, B: BoundaryPath, P: Fn(f64) -> f64> CoMovingSolver<'a, B, P> {
    /// Starts from a lab-frame state whose grid is the ξ-grid shifted by z(state.time).
    pub fn new(path: &'a B, potential: P, xi: Grid1D, state_v: Vec<f64>, state_vt: Vec<f64>, time: f64, ell: u32) -> Result<Self> {
        let n = xi.len();
        if state_v.len() != n || state_vt.len() != n {
            return Err(LabError::InvalidParameter("state does not match grid".into()));
        }
        let zd = path.zdot(time);
        let mut q = vec![0.0; n];
        // q = w_t = v_t + ż v_x
        for i in 1..n - 1 {
            let vx = d1(&xi.nodes, &state_v, i);
            q[i] = state_vt[i] + zd * vx;
        }
        let mut w = state_v;
        w[0] = 0.0;
        w[n - 1] = 0.0;
        Ok(Self { path, potential, xi, w, q, time, dt: 0.0, ell })
    }

    /// Largest stable step for speeds up to `max_speed` = sup|ż|.
    pub fn cfl_limit(&self, cfl_factor: f64, max_speed: f64) -> Result<f64> {
        if max_speed >= 1.0 {
            return Err(LabError::BoundarySpeedViolation(max_speed));
        }
        Ok(cfl_factor * self.xi.dx_min / (1.0 + max_speed))
    }

    fn rhs(&self, t: f64, w: &[f64], q: &[f64], dw: &mut [f64], dq: &mut [f64]) {
        let n = w.len();
        let zd = self.path.zdot(t);
        let zdd = self.path.zddot(t);
        let z = self.path.z(t);
        let a = 1.0 - zd * zd;
        let x = &self.xi.nodes;
        dw[0] = 0.0;
        dq[0] = 0.0;
        dw[n - 1] = 0.0;
        dq[n - 1] = 0.0;
        if self.xi.is_uniform() {
            let h = self.xi.spacing();
            let inv2 = 1.0 / (h * h);
            let inv1 = 0.5 / h;
            for i in 1..n - 1 {
                let wxx = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv2;
                let wx = (w[i + 1] - w[i - 1]) * inv1;
                let qx = (q[i + 1] - q[i - 1]) * inv1;
                dw[i] = q[i];
                dq[i] = a * wxx + 2.0 * zd * qx + zdd * wx - (self.potential)(x[i] + z) * w[i];
            }
        } else {
            for i in 1..n - 1 {
                dw[i] = q[i];
                let (wx, wxx) = d12(x, w, i);
                let qx = d1(x, q, i);
                dq[i] = a * wxx + 2.0 * zd * qx + zdd * wx - (self.potential)(x[i] + z) * w[i];
            }
        }
    }

    pub fn step(&mut self, h: f64) {
        let t0 = self.time;
        let mut w = std::mem::take(&mut self.w);
        let mut q = std::mem::take(&mut self.q);
        let mut stage = 0usize;
        rk4_step(&mut w, &mut q, h, |ww, qq, dw, dq| {
            let t = match stage {
                0 => t0,
                1 | 2 => t0 + 0.5 * h,
                _ => t0 + h,
            };
            stage += 1;
            self.rhs(t, ww, qq, dw, dq);
        });
        self.w = w;
        self.q = q;
        self.time = t0 + h;
    }

    /// Integrates to `t_target` with steps no longer than `dt_max`; `observe` runs after each step.
    pub fn run_to<F: FnMut(&Self)>(&mut self, t_target: f64, dt_max: f64, mut observe: F) {
        let total = t_target - self.time;
        if total == 0.0 {
            return;
        }
        let steps = (total.abs() / dt_max).ceil() as usize;
        let h = total / steps as f64;
        self.dt = h;
        for _ in 0..steps {
            self.step(h);
            observe(self);
        }
        self.time = t_target;
    }

    /// Lab-frame snapshot: nodes x = ξ + z(t), v = w, v_t = w_t − ż w_ξ.
    pub fn lab_state(&self) -> ModeState {
        let z = self.path.z(self.time);
        let zd = self.path.zdot(self.time);
        let n = self.w.len();
        let nodes: Vec<f64> = self.xi.nodes.iter().map(|s| s + z).collect();
        let mut vt = vec![0.0; n];
        for i in 0..n {
            let wx = if i == 0 {
                (self.w[1] - self.w[0]) / (self.xi.nodes[1] - self.xi.nodes[0])
            } else if i == n - 1 {
                (self.w[n - 1] - self.w[n - 2]) / (self.xi.nodes[n - 1] - self.xi.nodes[n - 2])
            } else {
                d1(&self.xi.nodes, &self.w, i)
            };
            vt[i] = self.q[i] - zd * wx;
        }
        let grid = Grid1D { nodes, stretching: self.xi.stretching, dx_min: self.xi.dx_min };
        ModeState { ell: self.ell, time: self.time, grid, v: self.w.clone(), v_t: vt, boundary_x: Some(z) }
    }
}

/// Second-order first derivative on nonuniform nodes.
pub fn d1(x: &[f64], f: &[f64], i: usize) -> f64 {
    let hm = x[i] - x[i - 1];
    let hp = x[i + 1] - x[i];
    (-hp * hp * f[i - 1] + (hp * hp - hm * hm) * f[i] + hm * hm * f[i + 1]) / (hm * hp * (hm + hp))
}

/// First and second derivatives on nonuniform nodes.
pub fn d12(x: &[f64], f: &[f64], i: usize) -> (f64, f64) {
    let hm = x[i] - x[i - 1];
    let hp = x[i + 1] - x[i];
    let d2 = 2.0 * (f[i + 1] * hm - f[i] * (hm + hp) + f[i - 1] * hp) / (hm * hp * (hm + hp));
    (d1(x, f, i), d2)
}

/// Evolves a lab-frame state given on ξ-nodes (shifted by z(t₀)) with the star boundary.
pub fn evolve_with_star<B: BoundaryPath, P: Fn(f64) -> f64>(
    path: &B,
    potential: P,
    xi: Grid1D,
    v: Vec<f64>,
    v_t: Vec<f64>,
    t0: f64,
    t_target: f64,
    cfl_factor: f64,
    ell: u32,
) -> Result<ModeState> {
    let steps = 2000;
    let mut max_speed: f64 = 0.0;
    for k in 0..=steps {
        let t = t0 + (t_target - t0) * k as f64 / steps as f64;
        max_speed = max_speed.max(path.zdot(t).abs());
    }
    let mut solver = CoMovingSolver::new(path, potential, xi, v, v_t, t0, ell)?;
    let dt = solver.cfl_limit(cfl_factor, max_speed)?;
    solver.run_to(t_target, dt, |_| {});
    Ok(solver.lab_state())
}
