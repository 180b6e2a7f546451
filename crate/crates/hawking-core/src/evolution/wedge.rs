//! Star-boundary problem on the wedge v ≤ 0 between the t = 0 line and the star surface,
//! marched on characteristics from free data on the line v = 0.
//!
//! For v > adv(T) the free solution is exact, so the free run supplies ψ on v = 0. Each row
//! below is anchored at a star node (u_k, adv(t_k)) where ψ = 0.

use super::moving::d1;
use super::null::{row_value_and_du, NullMarcher, NullRow, RowSpec};
use crate::charts::StarModel;
use crate::error::{LabError, Result};

/// t = 0 values on x ∈ [z_*(0), 0): ψ = r·u and ψ_t.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeProfile {
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_t: Vec<f64>,
}

/// Uniform u-grid covering the wedge for data time `t_data`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgePlan {
    pub t_data: f64,
    pub u0: f64,
    pub du: f64,
    pub n: usize,
}

impl WedgePlan {
    pub fn new(star: &StarModel, t_data: f64, du: f64) -> Result<Self> {
        if !(du > 0.0) || !(t_data > 0.0) {
            return Err(LabError::InvalidParameter("wedge needs du > 0 and T > 0".into()));
        }
        let u0 = -4.0 * du;
        let n = ((star.ret(t_data) - u0) / du).floor() as usize;
        Ok(Self { t_data, u0, du, n })
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u0 + i as f64 * self.du
    }

    /// Points (t, x) of the line v = 0 at u_0..u_n in the evolution's own time (t − shift).
    pub fn top_points(&self, shift: f64) -> Vec<(f64, f64)> {
        (0..=self.n).map(|i| (0.5 * self.u(i) - shift, -0.5 * self.u(i))).collect()
    }

    /// Marches all star rows with t_k ≥ 0 and reads off the t = 0 line.
    pub fn solve<P: Fn(f64) -> f64>(&self, star: &StarModel, potential: P, top: &[f64]) -> Result<WedgeProfile> {
        if top.len() != self.n + 1 {
            return Err(LabError::InvalidParameter("top row length mismatch".into()));
        }
        let m = NullMarcher::new(self.u0, self.du, potential)?;
        let mut row = NullRow { v: 0.0, i_lo: 0, vals: top.to_vec(), ext: None };
        let mut xs = Vec::new();
        let mut psi = Vec::new();
        let mut psi_u = Vec::new();
        let mut k = self.n;
        while k > 0 {
            k -= 1;
            let tk = star.t_of_ret(self.u(k));
            if tk < 0.0 {
                break;
            }
            let vk = star.adv(tk);
            let ustar = -vk;
            let i_lo = m.index_below(ustar).saturating_sub(3).max(row.i_lo);
            if k < i_lo + 4 {
                break;
            }
            let spec = RowSpec { v: vk, i_lo, i_hi: k, edge_value: 0.0, ext: None };
            row = m.next_row(&row, &spec)?;
            if let Some((p, pu)) = row_value_and_du(&m, &row, ustar) {
                xs.push(vk);
                psi.push(p);
                psi_u.push(pu);
            }
        }
        xs.push(-star.a0);
        psi.push(0.0);
        psi_u.push(*psi_u.last().unwrap_or(&0.0));
        xs.reverse();
        psi.reverse();
        psi_u.reverse();
        let n = xs.len();
        if n < 8 {
            return Err(LabError::ResolutionInsufficient(self.du));
        }
        let mut psi_t = vec![0.0; n];
        for i in 0..n {
            let px = if i == 0 {
                (psi[1] - psi[0]) / (xs[1] - xs[0])
            } else if i == n - 1 {
                (psi[n - 1] - psi[n - 2]) / (xs[n - 1] - xs[n - 2])
            } else {
                d1(&xs, &psi, i)
            };
            psi_t[i] = 2.0 * psi_u[i] + px;
        }
        Ok(WedgeProfile { x: xs, psi, psi_t })
    }
}

/// Merges the wedge profile (x < x_split) with a free t = 0 state given on uniform nodes.
pub fn merge_profiles(w: &WedgeProfile, free_x: &[f64], free_v: &[f64], free_vt: &[f64], x_split: f64) -> WedgeProfile {
    let mut out = WedgeProfile { x: vec![], psi: vec![], psi_t: vec![] };
    for i in 0..w.x.len() {
        if w.x[i] < x_split {
            out.x.push(w.x[i]);
            out.psi.push(w.psi[i]);
            out.psi_t.push(w.psi_t[i]);
        }
    }
    for i in 0..free_x.len() {
        if free_x[i] >= x_split {
            out.x.push(free_x[i]);
            out.psi.push(free_v[i]);
            out.psi_t.push(free_vt[i]);
        }
    }
    out
}
