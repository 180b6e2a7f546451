//! One-dimensional grids and mode states.

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stretching {
    Uniform,
    /// Geometric refinement towards the left end with ratio `ratio` between last and first spacing.
    Clustered { ratio: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub nodes: Vec<f64>,
    pub stretching: Stretching,
    pub dx_min: f64,
}

impl Grid1D {
    pub fn uniform(a: f64, b: f64, n_intervals: usize) -> Result<Self> {
        if !(b > a) || n_intervals < 2 {
            return Err(LabError::InvalidParameter(format!("bad uniform grid [{a}, {b}] / {n_intervals}")));
        }
        let dx = (b - a) / n_intervals as f64;
        let nodes = (0..=n_intervals).map(|i| a + i as f64 * dx).collect();
        Ok(Self { nodes, stretching: Stretching::Uniform, dx_min: dx })
    }

    /// Uniform grid with spacing close to `dx` covering [a, b].
    pub fn uniform_spacing(a: f64, b: f64, dx: f64) -> Result<Self> {
        let n = ((b - a) / dx).round().max(2.0) as usize;
        Self::uniform(a, b, n)
    }

    /// Nodes a + L(e^{cη} − 1)/(e^{c} − 1), η uniform, c = ln(ratio).
    pub fn clustered(a: f64, b: f64, n_intervals: usize, ratio: f64) -> Result<Self> {
        if !(b > a) || n_intervals < 2 || !(ratio >= 1.0) {
            return Err(LabError::InvalidParameter("bad clustered grid".into()));
        }
        if ratio == 1.0 {
            return Self::uniform(a, b, n_intervals);
        }
        let c = ratio.ln();
        let l = b - a;
        let nodes: Vec<f64> = (0..=n_intervals)
            .map(|i| {
                let eta = i as f64 / n_intervals as f64;
                a + l * (c * eta).exp_m1() / c.exp_m1()
            })
            .collect();
        let dx_min = nodes[1] - nodes[0];
        Ok(Self { nodes, stretching: Stretching::Clustered { ratio }, dx_min })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.stretching, Stretching::Uniform)
    }

    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    /// Whether the smallest spacing resolves `scale`/8.
    pub fn resolves(&self, scale: f64) -> bool {
        self.dx_min <= scale / 8.0
    }
}

/// Per-mode field v = r·u and its time derivative on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    pub ell: u32,
    pub time: f64,
    pub grid: Grid1D,
    pub v: Vec<f64>,
    pub v_t: Vec<f64>,
    /// Current Dirichlet wall position, if any.
    pub boundary_x: Option<f64>,
}

impl ModeState {
    pub fn zeros(ell: u32, time: f64, grid: Grid1D) -> Self {
        let n = grid.len();
        Self { ell, time, grid, v: vec![0.0; n], v_t: vec![0.0; n], boundary_x: None }
    }

    pub fn from_fn<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(ell: u32, time: f64, grid: Grid1D, v: F, v_t: G) -> Self {
        let vv = grid.nodes.iter().map(|&x| v(x)).collect();
        let vt = grid.nodes.iter().map(|&x| v_t(x)).collect();
        Self { ell, time, grid, v: vv, v_t: vt, boundary_x: None }
    }

    /// Smallest interval containing all nodes where |v| or |v_t| exceeds `tol`·max.
    pub fn support(&self, tol: f64) -> Option<(f64, f64)> {
        let m = self.v.iter().chain(&self.v_t).fold(0.0f64, |a, b| a.max(b.abs()));
        if m == 0.0 {
            return None;
        }
        let on = |i: usize| self.v[i].abs() > tol * m || self.v_t[i].abs() > tol * m;
        let lo = (0..self.v.len()).find(|&i| on(i))?;
        let hi = (0..self.v.len()).rev().find(|&i| on(i))?;
        Some((self.grid.nodes[lo], self.grid.nodes[hi]))
    }
}
