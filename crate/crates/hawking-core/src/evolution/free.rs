//! Boundary-less (or static-wall) evolution of ∂_t²v = ∂_x²v − W v on a uniform grid.

use super::grid::ModeState;
use crate::error::{LabError, Result};
use crate::numerics::solve_tridiagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScheme {
    /// Störmer-Verlet (kick-drift-kick leapfrog); symplectic and time-reversible.
    Leapfrog,
    /// Classical RK4 on (v, v_t); shares the integrator of the co-moving solver.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeOptions {
    pub cfl_factor: f64,
    pub scheme: TimeScheme,
}

impl Default for FreeOptions {
    fn default() -> Self {
        Self { cfl_factor: 0.9, scheme: TimeScheme::Leapfrog }
    }
}

/// Stepper with Dirichlet values at both grid ends.
#[derive(Debug, Clone)]
pub struct FreeSolver {
    pub state: ModeState,
    pub w: Vec<f64>,
    pub dt: f64,
    dx: f64,
    scheme: TimeScheme,
    acc: Vec<f64>,
}

fn apply_op(v: &[f64], w: &[f64], inv_dx2: f64, out: &mut [f64]) {
    let n = v.len();
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * inv_dx2 - w[i] * v[i];
    }
}

impl FreeSolver {
    pub fn new(mut state: ModeState, w: Vec<f64>, dt: f64, opts: FreeOptions) -> Result<Self> {
        if !state.grid.is_uniform() {
            return Err(LabError::InvalidParameter("free solver needs a uniform grid".into()));
        }
        let dx = state.grid.spacing();
        let limit = opts.cfl_factor * dx;
        if dt.abs() > limit || dt == 0.0 {
            return Err(LabError::CflViolation { dt: dt.abs(), limit });
        }
        let n = state.v.len();
        state.v[0] = 0.0;
        state.v[n - 1] = 0.0;
        state.v_t[0] = 0.0;
        state.v_t[n - 1] = 0.0;
        let mut acc = vec![0.0; n];
        apply_op(&state.v, &w, 1.0 / (dx * dx), &mut acc);
        Ok(Self { state, w, dt, dx, scheme: opts.scheme, acc })
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn step(&mut self) {
        let inv = 1.0 / (self.dx * self.dx);
        let h = self.dt;
        let n = self.state.v.len();
        match self.scheme {
            TimeScheme::Leapfrog => {
                let s = &mut self.state;
                for i in 1..n - 1 {
                    s.v_t[i] += 0.5 * h * self.acc[i];
                    s.v[i] += h * s.v_t[i];
                }
                apply_op(&s.v, &self.w, inv, &mut self.acc);
                for i in 1..n - 1 {
                    s.v_t[i] += 0.5 * h * self.acc[i];
                }
            }
            TimeScheme::Rk4 => {
                let w = &self.w;
                rk4_step(&mut self.state.v, &mut self.state.v_t, h, |v, p, dv, dp| {
                    dv.copy_from_slice(p);
                    dv[0] = 0.0;
                    dv[n - 1] = 0.0;
                    apply_op(v, w, inv, dp);
                });
            }
        }
        self.state.time += h;
    }

    /// Steps until `t_target` (the last step is shortened to land exactly), calling `observe` after each step.
    pub fn run_to<F: FnMut(&ModeState)>(&mut self, t_target: f64, mut observe: F) {
        let total = t_target - self.state.time;
        if total == 0.0 {
            return;
        }
        let steps = (total.abs() / self.dt.abs()).ceil() as usize;
        let h = total / steps as f64;
        let saved = self.dt;
        self.dt = h;
        for _ in 0..steps {
            self.step();
            observe(&self.state);
        }
        self.state.time = t_target;
        self.dt = saved;
    }

    /// Quadratic invariant of the leapfrog map: ½⟨p,(I + h²A/4)⁻¹p⟩ − ½⟨v, A v⟩, A = D² − W.
    pub fn discrete_energy(&self) -> Result<f64> {
        let n = self.state.v.len();
        let m = n - 2;
        let inv = 1.0 / (self.dx * self.dx);
        let c = self.dt * self.dt / 4.0;
        let sub = vec![c * inv; m];
        let sup = vec![c * inv; m];
        let diag: Vec<f64> = (1..n - 1).map(|i| 1.0 + c * (-2.0 * inv - self.w[i])).collect();
        let p = &self.state.v_t[1..n - 1];
        let y = solve_tridiagonal(&sub, &diag, &sup, p)?;
        let mut av = vec![0.0; n];
        apply_op(&self.state.v, &self.w, inv, &mut av);
        let kin: f64 = p.iter().zip(&y).map(|(a, b)| a * b).sum();
        let pot: f64 = (1..n - 1).map(|i| self.state.v[i] * av[i]).sum();
        Ok(0.5 * (kin - pot) * self.dx)
    }
}

/// Checks that walls at the grid ends cannot influence `window` within |Δt|.
pub fn check_padding(state: &ModeState, window: (f64, f64), dt_total: f64, margin: f64) -> Result<()> {
    let support = state.support(1e-14).unwrap_or(window);
    let lo = support.0.min(window.0);
    let hi = support.1.max(window.1);
    let need = dt_total.abs() + margin;
    let have = (lo - state.grid.first()).min(state.grid.last() - hi);
    if have < need {
        return Err(LabError::DomainTooSmall { need, have });
    }
    Ok(())
}

/// Convenience wrapper: evolves `state` to `t_target` with the given potential samples.
pub fn evolve_free(state: ModeState, w: Vec<f64>, t_target: f64, dt: f64, opts: FreeOptions) -> Result<ModeState> {
    let mut solver = FreeSolver::new(state, w, dt.abs(), opts)?;
    let sign = if t_target >= solver.state.time { 1.0 } else { -1.0 };
    solver.dt = dt.abs() * sign;
    solver.run_to(t_target, |_| {});
    Ok(solver.state)
}

/// One classical RK4 step for the pair (v, p) with right-hand side `rhs(v, p, dv, dp)`.
pub fn rk4_step<F: FnMut(&[f64], &[f64], &mut [f64], &mut [f64])>(v: &mut [f64], p: &mut [f64], h: f64, mut rhs: F) {
    let n = v.len();
    let mut k = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut kp = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut tv = vec![0.0; n];
    let mut tp = vec![0.0; n];
    rhs(v, p, &mut k[0], &mut kp[0]);
    for (stage, c) in [(1usize, 0.5), (2, 0.5), (3, 1.0)] {
        for i in 0..n {
            tv[i] = v[i] + c * h * k[stage - 1][i];
            tp[i] = p[i] + c * h * kp[stage - 1][i];
        }
        rhs(&tv, &tp, &mut k[stage], &mut kp[stage]);
    }
    for i in 0..n {
        v[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        p[i] += h / 6.0 * (kp[0][i] + 2.0 * kp[1][i] + 2.0 * kp[2][i] + kp[3][i]);
    }
}
