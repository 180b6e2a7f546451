//! Compactly supported Cauchy data in the region K and the free-run domain around it.

use super::free::{FreeOptions, FreeSolver};
use super::grid::{Grid1D, ModeState};
use crate::error::Result;
use crate::geometry::{PotentialTable, SdSGeometry};
use crate::numerics::bump;

/// u₀ = amp·bump((x − c)/w), u₁ = vel_amp·bump((x − c)/w); v = r·u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpData {
    pub center: f64,
    pub half_width: f64,
    pub amp: f64,
    pub vel_amp: f64,
}

impl BumpData {
    /// Bump filling the tortoise image of K = [k_lo, k_hi].
    pub fn filling(geom: &SdSGeometry, k: (f64, f64), amp: f64, vel_amp: f64) -> Result<Self> {
        let a = geom.tortoise_x(k.0)?;
        let b = geom.tortoise_x(k.1)?;
        Ok(Self { center: 0.5 * (a + b), half_width: 0.5 * (b - a), amp, vel_amp })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn u0(&self, x: f64) -> f64 {
        self.amp * bump((x - self.center) / self.half_width)
    }

    pub fn u1(&self, x: f64) -> f64 {
        self.vel_amp * bump((x - self.center) / self.half_width)
    }

    /// Mode state (v, v_t) = r·(u₀, u₁) at time `t` on `grid`.
    pub fn state(&self, geom: &SdSGeometry, ell: u32, t: f64, grid: Grid1D) -> Result<ModeState> {
        let mut st = ModeState::zeros(ell, t, grid);
        for (i, &x) in st.grid.nodes.iter().enumerate() {
            let (a, b) = (self.u0(x), self.u1(x));
            if a != 0.0 || b != 0.0 {
                let r = geom.radius_from_x(x)?;
                st.v[i] = r * a;
                st.v_t[i] = r * b;
            }
        }
        Ok(st)
    }
}

/// Uniform free-run domain whose far walls cannot reach [probe_lo, probe_hi] within |Δt|.
pub fn padded_grid(data: (f64, f64), probes: (f64, f64), duration: f64, dx: f64, margin: f64) -> Result<Grid1D> {
    let lo = data.0.min(probes.0) - duration - margin;
    let hi = data.1.max(probes.1) + duration + margin;
    Grid1D::uniform_spacing(lo, hi, dx)
}

/// Leapfrog solver for the given data on `grid` with the tabulated ℓ-potential.
pub fn free_solver(
    geom: &SdSGeometry,
    table: &PotentialTable,
    data: &BumpData,
    ell: u32,
    t0: f64,
    grid: Grid1D,
    dt: f64,
) -> Result<FreeSolver> {
    let w = grid.nodes.iter().map(|&x| table.eval(x)).collect();
    let state = data.state(geom, ell, t0, grid)?;
    FreeSolver::new(state, w, dt, FreeOptions::default())
}
