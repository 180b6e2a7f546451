//! Q(T) = Σ_ℓ ⟨ψ, φ₊(H₀)ψ⟩ + ⟨ψ_t, ψ₊(H₀)ψ_t⟩ for the t = 0 state ψ = r·u, and its limit
//! Σ_± r_±²(φ_± target of u*_± + ψ_± target of D_x u*_±).
//!
//! The operator is assembled on a graded grid whose spacing follows |x| down to the reflected layer
//! width h = e^{−κ₋T} next to x = 0. The state splits at x = T/2 into the near-star piece, whose
//! β₊-form is thermal at β₋, and the far piece, thermal at β₊.

use super::functional::{Kind, ThermalFunctional};
use super::operator::DiscreteOperator;
use super::thermal::{thermal_target, LineSamples};
use crate::background::Background;
use crate::error::{LabError, Result};
use crate::evolution::asymp::TimeZeroState;
use crate::evolution::radiation::RadiationField;
use crate::numerics::{bisect, interp_nodes, linear_fit, smooth_step};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HawkingSettings {
    /// Spacing grows like grading·|x| away from x = 0.
    pub grading: f64,
    /// Smallest spacing as a fraction of h.
    pub dx_min_over_h: f64,
    pub dx_max: f64,
    /// Near/far split at split·T, smoothed over `split_width`.
    pub split: f64,
    pub split_width: f64,
    /// Fraction of a radiation-field window tapered when its tail is not yet at the edge tolerance.
    pub taper: f64,
}

impl Default for HawkingSettings {
    fn default() -> Self {
        Self { grading: 0.02, dx_min_over_h: 0.02, dx_max: 0.05, split: 0.5, split_width: 4.0, taper: 0.05 }
    }
}

/// Quadratic forms of one mode at one data time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeForms {
    pub ell: u32,
    pub t_data: f64,
    pub nodes: usize,
    pub phi: f64,
    pub psi: f64,
    pub near: f64,
    pub far: f64,
}

impl ModeForms {
    pub fn total(&self) -> f64 {
        self.phi + self.psi
    }
}

/// Graded nodes on (z, X) for reflected-layer width h.
pub fn graded_operator(bg: &Background, ell: u32, x_max: f64, h: f64, st: &HawkingSettings) -> Result<DiscreteOperator> {
    let z = -bg.star.a0;
    let dx_min = st.dx_min_over_h * h;
    let spacing = |x: f64| (st.grading * x.abs()).clamp(dx_min, st.dx_max);
    let nodes = DiscreteOperator::graded(z, x_max, spacing, |_| 0.0)?.nodes;
    let op = DiscreteOperator::for_mode(&bg.geom, ell, z, x_max, nodes)?;
    let min_w = op.potential.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_w < 0.0 {
        return Err(LabError::PositivityGateFailed(min_w));
    }
    Ok(op)
}

/// Forms of the state at t = 0 for mode ℓ with inverse temperature β₊.
pub fn mode_forms(bg: &Background, ell: u32, state: &TimeZeroState, st: &HawkingSettings) -> Result<ModeForms> {
    let t = state.t_data;
    let p = &state.profile;
    let x_max = *p.x.last().ok_or_else(|| LabError::WindowTooSmall("empty state".into()))?;
    let h = (-bg.geom.kappa_minus() * t).exp();
    let op = graded_operator(bg, ell, x_max, h, st)?;
    let spec = op.spectrum();
    if spec.scaled_min() < -1e-10 {
        return Err(LabError::PositivityGateFailed(spec.scaled_min()));
    }
    let psi: Vec<f64> = op.nodes.iter().map(|&x| interp_nodes(&p.x, &p.psi, x)).collect();
    let psi_t: Vec<f64> = op.nodes.iter().map(|&x| interp_nodes(&p.x, &p.psi_t, x)).collect();
    let beta = bg.geom.horizons.beta_plus;
    let fphi = ThermalFunctional::phi(beta)?;
    let fpsi = ThermalFunctional::psi(beta)?;
    let pair = |a: &[f64], b: &[f64]| -> Result<(f64, f64)> {
        Ok((fphi.quad_form_spectral(&op, &spec, a)?, fpsi.quad_form_spectral(&op, &spec, b)?))
    };
    let (phi, psi_form) = pair(&psi, &psi_t)?;
    let xs = st.split * t;
    let far_weight = |x: f64| smooth_step((x - xs + 0.5 * st.split_width) / st.split_width);
    let cut = |v: &[f64], far: bool| -> Vec<f64> {
        op.nodes.iter().zip(v).map(|(&x, a)| if far { a * far_weight(x) } else { a * (1.0 - far_weight(x)) }).collect()
    };
    let (np, ns) = pair(&cut(&psi, false), &cut(&psi_t, false))?;
    let (fp, fs) = pair(&cut(&psi, true), &cut(&psi_t, true))?;
    Ok(ModeForms { ell, t_data: t, nodes: op.len(), phi, psi: psi_form, near: np + ns, far: fp + fs })
}

/// Radiation-field samples, tapered at both ends unless they already vanish there; the spectral
/// derivative turns any edge jump into a Gibbs tail.
fn field_samples(u: &RadiationField, taper: f64) -> LineSamples {
    let m = u.max_abs();
    let n = u.samples.len();
    if m > 0.0 && u.samples[n - 1].abs().max(u.samples[0].abs()) > 0.0 {
        let mut v = u.clone();
        v.taper(taper);
        let k1 = (taper * n as f64) as usize;
        for k in 0..k1 {
            v.samples[k] *= smooth_step(k as f64 / k1.max(1) as f64);
        }
        return LineSamples::from_radiation(&v);
    }
    LineSamples::from_radiation(u)
}

/// r²(φ_β target of u + ψ_β target of D_x u).
pub fn side_target(u: &RadiationField, r: f64, beta: f64, taper: f64) -> Result<f64> {
    if u.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let s = field_samples(u, taper).scaled(r);
    Ok(thermal_target(&s, beta, Kind::Phi)? + thermal_target(&s.derivative(), beta, Kind::Psi)?)
}

/// Per-side limits for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideTargets {
    pub minus: f64,
    pub plus: f64,
}

impl SideTargets {
    pub fn total(&self) -> f64 {
        self.minus + self.plus
    }
}

pub fn hawking_target(bg: &Background, minus: &RadiationField, plus: &RadiationField, st: &HawkingSettings) -> Result<SideTargets> {
    let hz = &bg.geom.horizons;
    Ok(SideTargets {
        minus: side_target(minus, hz.r_minus, hz.beta_minus, st.taper)?,
        plus: side_target(plus, hz.r_plus, hz.beta_plus, st.taper)?,
    })
}

/// β with Σ_ℓ side_target(u_ℓ, r, β) = measured; the target decreases in β.
pub fn fit_beta(fields: &[&RadiationField], r: f64, measured: f64, taper: f64) -> Result<f64> {
    let total = |beta: f64| -> f64 {
        fields.iter().map(|u| side_target(u, r, beta, taper).unwrap_or(f64::NAN)).sum::<f64>() - measured
    };
    let (lo, hi) = (0.5f64.ln(), 200f64.ln());
    let (a, b) = (total(lo.exp()), total(hi.exp()));
    if !(a.is_finite() && b.is_finite()) || a * b > 0.0 {
        return Err(LabError::FitRejected(format!("measured {measured} outside the thermal range [{}, {}]", b + measured, a + measured)));
    }
    Ok(bisect(|l| total(l.exp()), lo, hi, 1e-10, 200)?.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HawkingRow {
    pub t_data: f64,
    pub q: f64,
    pub q_target: f64,
    pub rel_err: f64,
    pub near: f64,
    pub far: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HawkingReport {
    pub rows: Vec<HawkingRow>,
    pub targets: SideTargets,
    /// −slope of ln(relative error) against T.
    pub rate: f64,
    pub monotone: bool,
    /// β fitted from the near and far pieces at the largest T.
    pub beta_minus_fit: Result<f64>,
    pub beta_plus_fit: Result<f64>,
}

/// Assembles the report from per-mode forms (indexed [mode][time]) and per-mode radiation fields.
pub fn hawking_report(
    bg: &Background,
    forms: &[Vec<ModeForms>],
    fields: &[(&RadiationField, &RadiationField)],
    st: &HawkingSettings,
) -> Result<HawkingReport> {
    let mut targets = SideTargets { minus: 0.0, plus: 0.0 };
    for (m, p) in fields {
        let t = hawking_target(bg, m, p, st)?;
        targets.minus += t.minus;
        targets.plus += t.plus;
    }
    let n_t = forms.first().map(|f| f.len()).unwrap_or(0);
    let mut rows = Vec::with_capacity(n_t);
    for k in 0..n_t {
        let q: f64 = forms.iter().map(|f| f[k].total()).sum();
        let near: f64 = forms.iter().map(|f| f[k].near).sum();
        let far: f64 = forms.iter().map(|f| f[k].far).sum();
        let qt = targets.total();
        let rel_err = if qt == 0.0 { if q == 0.0 { 0.0 } else { f64::INFINITY } } else { (q - qt).abs() / qt };
        rows.push(HawkingRow { t_data: forms[0][k].t_data, q, q_target: qt, rel_err, near, far });
    }
    let monotone = rows.windows(2).all(|w| w[1].rel_err < w[0].rel_err);
    let rate = if rows.len() >= 2 && rows.iter().all(|r| r.rel_err > 0.0) {
        let xs: Vec<f64> = rows.iter().map(|r| r.t_data).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.rel_err.ln()).collect();
        -linear_fit(&xs, &ys).slope
    } else {
        f64::NAN
    };
    let last = rows.last().copied();
    let minus: Vec<&RadiationField> = fields.iter().map(|f| f.0).collect();
    let plus: Vec<&RadiationField> = fields.iter().map(|f| f.1).collect();
    let hz = &bg.geom.horizons;
    let (beta_minus_fit, beta_plus_fit) = match last {
        Some(r) => (fit_beta(&minus, hz.r_minus, r.near, st.taper), fit_beta(&plus, hz.r_plus, r.far, st.taper)),
        None => (Err(LabError::FitRejected("no rows".into())), Err(LabError::FitRejected("no rows".into()))),
    };
    Ok(HawkingReport { rows, targets, rate, monotone, beta_minus_fit, beta_plus_fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::radiation::Side;
    use crate::evolution::wedge::WedgeProfile;

    fn bump_field(side: Side, amp: f64) -> RadiationField {
        let ds = 0.02;
        let samples = (0..3000).map(|k| {
            let s = k as f64 * ds;
            amp * smooth_step((s - 2.0) / 4.0) * (-0.3 * s).exp()
        }).collect();
        RadiationField { side, ell: 0, s0: 0.0, ds, samples, x_ext: 0.0, data_time: 0.0 }
    }

    #[test]
    fn trivial_data_gives_zero() {
        let bg = Background::canonical().unwrap();
        let x: Vec<f64> = (0..400).map(|i| -0.99 + 0.05 * i as f64).collect();
        let zeros = vec![0.0; x.len()];
        let state = TimeZeroState {
            t_data: 10.0,
            profile: WedgeProfile { x: x.clone(), psi: zeros.clone(), psi_t: zeros.clone() },
            radii: vec![1.0; x.len()],
            free_x: x,
            free_psi: zeros,
        };
        let f = mode_forms(&bg, 0, &state, &HawkingSettings::default()).unwrap();
        assert_eq!(f.total(), 0.0);
        let zero = RadiationField::zero(Side::Minus, 0);
        let t = hawking_target(&bg, &zero, &RadiationField::zero(Side::Plus, 0), &HawkingSettings::default()).unwrap();
        assert_eq!(t.total(), 0.0);
    }

    #[test]
    fn outgoing_only_data_keeps_the_plus_term() {
        let bg = Background::canonical().unwrap();
        let st = HawkingSettings::default();
        let plus = bump_field(Side::Plus, 1.0);
        let t = hawking_target(&bg, &RadiationField::zero(Side::Minus, 0), &plus, &st).unwrap();
        assert_eq!(t.minus, 0.0);
        let alone = side_target(&plus, bg.geom.horizons.r_plus, bg.geom.horizons.beta_plus, st.taper).unwrap();
        assert_eq!(t.total(), alone);
    }

    #[test]
    fn beta_fit_inverts_the_target() {
        let bg = Background::canonical().unwrap();
        let u = bump_field(Side::Minus, 0.7);
        let r = bg.geom.horizons.r_minus;
        let m = side_target(&u, r, 16.0, 0.05).unwrap();
        let b = fit_beta(&[&u], r, m, 0.05).unwrap();
        assert!((b - 16.0).abs() < 1e-6);
    }
}
