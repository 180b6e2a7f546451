//! Wave-equation reflection of data v₀(r̂/h), ∂_t̂v = 0 on the slice t̂ = t̂_B, read at t = 0 and
//! compared with the WKB parametrix.
//!
//! Where the slice carries the data it satisfies t + x = r̂ (up to t̂_B + λ_K(r_minus)), so the data
//! is split into f(t − x) + g(t + x) along the slice. The potential is O(h) there, and the split
//! supplies ψ = r·v on the line t + x = 0, from which the star wedge is marched on characteristics.

use super::profile::ReflectionProfile;
use super::wkb::WkbApprox;
use crate::background::Background;
use crate::error::{LabError, Result};
use crate::evolution::norms::sobolev_norm;
use crate::evolution::wedge::WedgePlan;
use crate::geometry::{PotentialTable, RadialPoint};
use crate::numerics::{bisect, interp_nodes, GaussRule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionSettings {
    pub du: f64,
    /// Right end of the comparison window [z_*(0), x_hi].
    pub x_hi: f64,
    /// Uniform samples used for the Sobolev norms.
    pub norm_points: usize,
    /// Data below this fraction of ℓh is dropped (v₀ is flat to all orders there).
    pub support_floor: f64,
    pub ell_mode: u32,
}

impl Default for ReflectionSettings {
    fn default() -> Self {
        Self { du: 0.01, x_hi: 1.0, norm_points: 1 << 17, support_floor: 0.01, ell_mode: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionReport {
    pub h: f64,
    pub ell_support: f64,
    pub err_h_half: f64,
    pub err_dt_h_minus_half: f64,
}

/// d'Alembert split of the slice data, parametrised by r̂ ∈ (0, ℓh].
struct SliceSplit<'a> {
    bg: &'a Background,
    profile: ReflectionProfile,
    v_offset: f64,
    rule: GaussRule,
}

impl<'a> SliceSplit<'a> {
    fn point(&self, r_hat: f64) -> RadialPoint {
        let g = &self.bg.geom;
        let dm = r_hat / self.bg.chart.shooting_param;
        RadialPoint { r: g.r_minus() + dm, dm, dp: (g.r_plus() - g.r_minus()) - dm }
    }

    fn u_of(&self, r_hat: f64) -> f64 {
        let x = self.bg.geom.x_of_point(&self.point(r_hat));
        self.v_offset + r_hat - 2.0 * x
    }

    fn psi(&self, r_hat: f64) -> f64 {
        self.point(r_hat).r * self.profile.scaled(r_hat)
    }

    /// dg/dr̂ = ψ_r̂·sΔ_r/(2r²).
    fn dg(&self, r_hat: f64) -> f64 {
        let p = self.point(r_hat);
        let s = self.bg.chart.shooting_param;
        let h = self.profile.h;
        let psi_r = self.profile.scaled(r_hat) / s + p.r * self.profile.v0_prime(r_hat / h) / h;
        psi_r * s * self.bg.geom.delta_at(&p) / (2.0 * p.r * p.r)
    }

    fn g(&self, r_hat: f64) -> f64 {
        if r_hat <= 0.0 {
            return 0.0;
        }
        let top = r_hat.min(self.profile.scaled_support());
        self.rule.integrate_panels(|y| self.dg(y), 0.0, top, 16)
    }
}

/// ψ = r·v at t = 0 on increasing nodes from z_*(0), with ψ_t.
#[derive(Debug, Clone)]
pub struct ReflectedState {
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_t: Vec<f64>,
}

/// Marches the reflection problem for `profile` to t = 0.
pub fn reflected_state(bg: &Background, profile: &ReflectionProfile, st: &ReflectionSettings) -> Result<ReflectedState> {
    let s = bg.chart.shooting_param;
    let lh = profile.scaled_support();
    let rhat_a = s * (bg.chart.r_a - bg.geom.r_minus());
    if !(lh < 0.5 * rhat_a) {
        return Err(LabError::InvalidParameter(format!("ℓh = {lh} leaves the horizon zone (r̂ < {rhat_a})")));
    }
    let split = SliceSplit { bg, profile: *profile, v_offset: bg.star.t_hat_b + bg.chart.lambda_k_minus, rule: GaussRule::new(12) };
    let g_total = split.g(lh);
    let u_min = split.u_of(lh);
    let u_top = split.u_of(st.support_floor * lh);
    let t_data = bg.star.t_of_ret(u_top);
    let plan = WedgePlan::new(&bg.star, t_data, st.du)?;
    if plan.du * 20.0 > (u_top - u_min) {
        return Err(LabError::ResolutionInsufficient(plan.du));
    }
    let mut top = Vec::with_capacity(plan.n + 1);
    for i in 0..=plan.n {
        let u = plan.u(i);
        if u <= u_min {
            top.push(-g_total);
            continue;
        }
        let lo = (st.support_floor * lh * 1e-3).ln();
        let hi = lh.ln();
        let q = bisect(|l| split.u_of(l.exp()) - u, lo, hi, 1e-15, 200).unwrap_or(lo);
        let r_hat = q.exp();
        top.push(split.psi(r_hat) - split.g(r_hat));
    }
    let table = PotentialTable::new(&bg.geom, st.ell_mode, -0.5 * u_top - 10.0, 5.0, 0.005)?;
    let wedge = plan.solve(&bg.star, |x| table.eval(x), &top)?;
    let mut out = ReflectedState { x: wedge.x, psi: wedge.psi, psi_t: wedge.psi_t };
    // x ≥ 0: ψ = f(−x) + g(x) with f = −g_total there.
    let n_right = 4096;
    let dx = st.x_hi / n_right as f64;
    for i in 0..=n_right {
        let x = i as f64 * dx;
        let r_hat = x - split.v_offset;
        out.x.push(x);
        out.psi.push(split.g(r_hat) - g_total);
        out.psi_t.push(if r_hat > 0.0 && r_hat < lh { split.dg(r_hat) } else { 0.0 });
    }
    Ok(out)
}

/// ‖v − v_ap‖_{H^{1/2}} and ‖∂_t(v − v_ap)‖_{H^{−1/2}} on [z_*(0), x_hi] at t = 0 (where t̂ = t).
pub fn compare_reflection(bg: &Background, profile: &ReflectionProfile, st: &ReflectionSettings) -> Result<ReflectionReport> {
    let state = reflected_state(bg, profile, st)?;
    let w = WkbApprox::new(&bg.chart, &bg.star, *profile);
    let a = -bg.star.a0;
    let b = st.x_hi;
    let n = st.norm_points;
    let dx = (b - a) / (n - 1) as f64;
    let width = profile.scaled_support() / bg.star.beta_0.abs();
    if dx * 20.0 > width {
        return Err(LabError::ResolutionInsufficient(profile.h));
    }
    let tb = bg.star.t_hat_b;
    let mut e0 = vec![0.0; n];
    let mut e1 = vec![0.0; n];
    let (x_first, x_last) = (state.x[0], state.x[state.x.len() - 1]);
    for k in 0..n {
        let x = a + k as f64 * dx;
        let p = bg.geom.point_from_x(x)?;
        let r_hat = x + bg.chart.f_k_point(&p) + tb;
        let inside = x >= x_first && x <= x_last;
        let psi = if inside { interp_nodes(&state.x, &state.psi, x) } else { 0.0 };
        let psi_t = if inside { interp_nodes(&state.x, &state.psi_t, x) } else { 0.0 };
        e0[k] = psi / p.r - w.v_ap_at_radius(0.0, r_hat, p.r)?;
        e1[k] = psi_t / p.r - w.v_ap_dt_at_radius(0.0, r_hat, p.r)?;
    }
    Ok(ReflectionReport {
        h: profile.h,
        ell_support: profile.ell_support,
        err_h_half: sobolev_norm(&e0, dx, 0.5)?,
        err_dt_h_minus_half: sobolev_norm(&e1, dx, -0.5)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_profile_gives_zero_error() {
        let bg = Background::canonical().unwrap();
        let p = ReflectionProfile::new(1.0, 0.02, 0.0).unwrap();
        let st = ReflectionSettings { norm_points: 1 << 15, ..Default::default() };
        let r = compare_reflection(&bg, &p, &st).unwrap();
        assert_eq!(r.err_h_half, 0.0);
        assert_eq!(r.err_dt_h_minus_half, 0.0);
    }

    #[test]
    fn data_outside_the_horizon_zone_is_rejected() {
        let bg = Background::canonical().unwrap();
        let p = ReflectionProfile::new(1.0, 0.5, 1.0).unwrap();
        assert!(compare_reflection(&bg, &p, &ReflectionSettings::default()).is_err());
    }
}
