//! Backward free run shared by a sweep of data times, the star wedge per data time, and the
//! comparison of the t = 0 state with its radiation-field prediction.

use super::data::{free_solver, padded_grid, BumpData};
use super::norms::sobolev_norm;
use super::probe::run_sampled;
use super::radiation::{extract_radiation, extraction_radius, RadiationField, Side};
use super::wedge::{merge_profiles, WedgePlan, WedgeProfile};
use crate::background::Background;
use crate::error::{LabError, Result};
use crate::geometry::PotentialTable;
use crate::numerics::interp_nodes;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsympSettings {
    pub dx: f64,
    pub du: f64,
    pub w_threshold: f64,
    /// Radiation fields are recorded until s reaches this value.
    pub s_max: f64,
    /// Right end of the recorded t = 0 state.
    pub x_max_offset: f64,
    pub snapshot_dx: f64,
}

impl Default for AsympSettings {
    fn default() -> Self {
        Self { dx: 0.02, du: 0.01, w_threshold: 1e-8, s_max: 450.0, x_max_offset: 40.0, snapshot_dx: 0.02 }
    }
}

/// Radiation fields from two radii per side.
#[derive(Debug, Clone)]
pub struct RadiationPair {
    pub minus: RadiationField,
    pub minus_alt: RadiationField,
    pub plus: RadiationField,
    pub plus_alt: RadiationField,
}

/// t = 0 state for one data time: ψ = r·u and ψ_t on increasing nodes from z_*(0).
#[derive(Debug, Clone)]
pub struct TimeZeroState {
    pub t_data: f64,
    pub profile: WedgeProfile,
    pub radii: Vec<f64>,
    /// Boundary-less solution at t = 0 on uniform nodes from z_*(0).
    pub free_x: Vec<f64>,
    pub free_psi: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AsympRun {
    pub ell: u32,
    pub fields: RadiationPair,
    pub states: Vec<TimeZeroState>,
}

/// One backward free run (data at run time 0) that serves every data time in `t_list`.
pub fn run_asymp_mode(bg: &Background, data: &BumpData, ell: u32, t_list: &[f64], st: &AsympSettings) -> Result<AsympRun> {
    let g = &bg.geom;
    let xm = extraction_radius(g, ell, Side::Minus, st.w_threshold)?;
    let xp = extraction_radius(g, ell, Side::Plus, st.w_threshold)?;
    let t_max = t_list.iter().cloned().fold(0.0, f64::max);
    let tau = (st.s_max + xp + 5.0).max(t_max + 1.0);
    let grid = padded_grid(data.support(), (-xm - 5.0, xp + 5.0), tau, st.dx, 2.0)?;
    let table = PotentialTable::new(g, ell, -xm - 10.0, xp + 10.0, 0.005)?;
    let solver = free_solver(g, &table, data, ell, 0.0, grid, -0.45 * st.dx)?;

    let mut plans = Vec::with_capacity(t_list.len());
    let mut points = Vec::new();
    let mut spans = Vec::new();
    for &t in t_list {
        let plan = WedgePlan::new(&bg.star, t, st.du)?;
        let top = plan.top_points(t);
        let a = points.len();
        points.extend(top);
        let b = points.len();
        let x0 = -bg.star.a0;
        let nx = ((t + st.x_max_offset - x0) / st.snapshot_dx).round() as usize;
        points.extend((0..=nx).map(|i| (-t, x0 + i as f64 * st.snapshot_dx)));
        spans.push((a, b, points.len()));
        plans.push(plan);
    }
    let run = run_sampled(solver, -tau, &[-xm, -xm - 5.0, xp, xp + 5.0], points.clone())?;
    let r_at = |x: f64| g.radius_from_x(x);
    let fields = RadiationPair {
        minus: extract_radiation(&run.series[0], Side::Minus, ell, r_at(-xm)?, 0.0)?,
        minus_alt: extract_radiation(&run.series[1], Side::Minus, ell, r_at(-xm - 5.0)?, 0.0)?,
        plus: extract_radiation(&run.series[2], Side::Plus, ell, r_at(xp)?, 0.0)?,
        plus_alt: extract_radiation(&run.series[3], Side::Plus, ell, r_at(xp + 5.0)?, 0.0)?,
    };

    let mut states = Vec::with_capacity(t_list.len());
    for (k, &t) in t_list.iter().enumerate() {
        let (a, b, c) = spans[k];
        // Points just after the data time lie outside the causal future of the data.
        let support = data.support();
        let top = run.points[a..b]
            .iter()
            .zip(&points[a..b])
            .map(|(p, &(tp, xp))| match p {
                Some(q) => Ok(q.0),
                None if tp > 0.0 && (xp < support.0 - tp || xp > support.1 + tp) => Ok(0.0),
                None => Err(LabError::DomainError("top row not sampled".into())),
            })
            .collect::<Result<Vec<f64>>>()?;
        let wedge = plans[k].solve(&bg.star, |x| table.eval(x), &top)?;
        let fx: Vec<f64> = points[b..c].iter().map(|p| p.1).collect();
        let mut fv = Vec::with_capacity(c - b);
        let mut fvt = Vec::with_capacity(c - b);
        for p in &run.points[b..c] {
            let (v, vt) = p.ok_or_else(|| LabError::DomainError("snapshot not sampled".into()))?;
            fv.push(v);
            fvt.push(vt);
        }
        let profile = merge_profiles(&wedge, &fx, &fv, &fvt, 0.0);
        let radii = profile.x.iter().map(|&x| r_at(x)).collect::<Result<Vec<f64>>>()?;
        states.push(TimeZeroState { t_data: t, profile, radii, free_x: fx, free_psi: fv });
    }
    Ok(AsympRun { ell, fields, states })
}

/// Reflected piece ψ_ref(x) = −r_minus·u*₋(κ₋⁻¹ln(γ₀x/h)) for z_*(0) < x < 0, with h = e^{−κ₋T}.
pub fn reflected_prediction(bg: &Background, u_minus: &RadiationField, t_data: f64, x: f64) -> f64 {
    if x >= 0.0 {
        return 0.0;
    }
    let k = bg.geom.kappa_minus();
    let h = (-k * t_data).exp();
    let arg = bg.star.gamma_0 * x / h;
    if arg <= 0.0 {
        return 0.0;
    }
    -bg.geom.r_minus() * u_minus.eval(arg.ln() / k)
}

/// Norms of the t = 0 residual against the theorem's right side.
#[derive(Debug, Clone, PartialEq)]
pub struct AsympResidual {
    pub t_data: f64,
    pub eps0_h_half: f64,
    pub eps1_h_minus_half: f64,
    pub sup_right: f64,
    pub far_field_rel_l2: f64,
    pub amplitude_factor: f64,
}

pub fn asymp_residual(bg: &Background, run: &AsympRun, state: &TimeZeroState) -> Result<AsympResidual> {
    let t = state.t_data;
    let p = &state.profile;
    let um = &run.fields.minus;
    let up = &run.fields.plus;
    let u_of = |i: usize| p.psi[i] / state.radii[i];
    let ut_of = |i: usize| p.psi_t[i] / state.radii[i];
    let pred = |i: usize| {
        let x = p.x[i];
        reflected_prediction(bg, um, t, x) / state.radii[i] + up.eval(t - x)
    };
    // ∂_t of the prediction: reflected piece depends on v = t + x, far piece on t − x.
    let n = p.x.len();
    let pr: Vec<f64> = (0..n).map(|i| reflected_prediction(bg, um, t, p.x[i])).collect();
    let mut pred_t = vec![0.0; n];
    for i in 1..n - 1 {
        let d = super::moving::d1(&p.x, &pr, i);
        let h = 1e-4;
        let dup = (up.eval(t - p.x[i] + h) - up.eval(t - p.x[i] - h)) / (2.0 * h);
        pred_t[i] = d / state.radii[i] + dup;
    }
    let (a, b) = (-bg.star.a0, 1.0);
    let m = 1 << 17;
    let dx = (b - a) / (m - 1) as f64;
    let mut e0 = vec![0.0; m];
    let mut e1 = vec![0.0; m];
    let eps0: Vec<f64> = (0..n).map(|i| u_of(i) - pred(i)).collect();
    let eps1: Vec<f64> = (0..n).map(|i| ut_of(i) - pred_t[i]).collect();
    let lo = p.x.partition_point(|&x| x < a - 1e-12);
    let hi = p.x.partition_point(|&x| x <= b + 0.5).min(n);
    let xs = &p.x[lo..hi];
    for k in 0..m {
        let x = a + k as f64 * dx;
        e0[k] = interp_nodes(xs, &eps0[lo..hi], x);
        e1[k] = interp_nodes(xs, &eps1[lo..hi], x);
    }
    let eps0_h_half = sobolev_norm(&e0, dx, 0.5)?;
    let eps1_h_minus_half = sobolev_norm(&e1, dx, -0.5)?;
    let mut sup_right: f64 = 0.0;
    let (mut num, mut den) = (0.0, 0.0);
    let (mut cu, mut cp) = (0.0, 0.0);
    // The reflected layer has width h next to the star; farther out the log map is pre-asymptotic.
    let layer = -2.0 * (-bg.geom.kappa_minus() * t).exp();
    for i in 0..n {
        let x = p.x[i];
        if x >= 0.0 {
            sup_right = sup_right.max(eps0[i].abs());
        }
        if x >= t - 10.0 && x <= t + 5.0 {
            let f = up.eval(t - x);
            num += (u_of(i) - f).powi(2);
            den += f * f;
        }
        if x < 0.0 && x >= layer && i > 0 {
            let q = pr[i] / state.radii[i];
            let w = x - p.x[i - 1];
            let refl = (p.psi[i] - interp_nodes(&state.free_x, &state.free_psi, x)) / state.radii[i];
            cu += refl * q * w;
            cp += q * q * w;
        }
    }
    let far = if den > 0.0 { (num / den).sqrt() } else { f64::INFINITY };
    let amp = if cp > 0.0 { cu / cp } else { 0.0 };
    Ok(AsympResidual { t_data: t, eps0_h_half, eps1_h_minus_half, sup_right, far_field_rel_l2: far, amplitude_factor: amp })
}
