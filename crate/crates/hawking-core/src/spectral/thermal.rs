//! Whole-line thermal targets (1/2π)∫|ξ|^{±1}coth(β|ξ|)|û(ξ)|² dξ and the log-profile form
//! ⟨u_B, |D_{x,0}|u_B⟩ with u_B(x) = χ(x)·u(κ⁻¹ln(γ₀x/h)).

use super::functional::{Kind, ThermalFunctional};
use super::sine::{sine_form, HalfLineSamples, SineDomain};
use crate::error::{LabError, Result};
use crate::evolution::norms::power_spectrum;
use crate::evolution::radiation::RadiationField;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Samples u(x0 + k·dx) of a profile that vanishes outside the window.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSamples {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl LineSamples {
    pub fn from_fn<F: Fn(f64) -> f64>(x0: f64, dx: f64, n: usize, f: F) -> Self {
        Self { x0, dx, values: (0..n).map(|k| f(x0 + k as f64 * dx)).collect() }
    }

    pub fn from_radiation(u: &RadiationField) -> Self {
        Self { x0: u.s0, dx: u.ds, values: u.samples.clone() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { x0: self.x0, dx: self.dx, values: self.values.iter().map(|v| c * v).collect() }
    }

    /// Spectral derivative through a zero-padded FFT (the profile vanishes at the window edges).
    pub fn derivative(&self) -> Self {
        let n = self.values.len();
        let m = (2 * n).next_power_of_two();
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        buf.resize(m, Complex64::new(0.0, 0.0));
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(m).process(&mut buf);
        let dk = 2.0 * PI / (m as f64 * self.dx);
        for (k, c) in buf.iter_mut().enumerate() {
            let kk = if k < m / 2 { k as f64 } else if k == m / 2 { 0.0 } else { k as f64 - m as f64 };
            *c *= Complex64::new(0.0, kk * dk / m as f64);
        }
        planner.plan_fft_inverse(m).process(&mut buf);
        Self { x0: self.x0, dx: self.dx, values: buf[..n].iter().map(|c| c.re).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

/// Relative size of the window-edge samples that counts as a vanishing tail.
const EDGE_TOL: f64 = 1e-10;

fn weighted_spectrum_sum<W: Fn(f64) -> f64>(u: &LineSamples, pad: usize, weight: &W, singular_at_zero: bool) -> f64 {
    let (power, xi) = power_spectrum(&u.values, u.dx, pad);
    let mut sum = 0.0;
    for (p, k) in power.iter().zip(&xi) {
        if *k != 0.0 {
            sum += p * weight(*k);
        }
    }
    if singular_at_zero {
        // the integrand is even and smooth with a removable value at ξ = 0: g(0) ≈ (4g(ξ₁) − g(ξ₂))/3
        let g1 = power[1] * weight(xi[1]);
        let g2 = power[2] * weight(xi[2]);
        sum + (4.0 * g1 - g2) / 3.0
    } else {
        sum + power[0] * weight(0.0)
    }
}

/// (1/2π)∫ w(ξ)|û|² dξ with the edge, resolution and padding-doubling checks.
fn whole_line_form<W: Fn(f64) -> f64>(u: &LineSamples, weight: W, singular_at_zero: bool) -> Result<f64> {
    let n = u.values.len();
    let m = u.max_abs();
    if n < 16 {
        return Err(LabError::WindowTooSmall(format!("{n} samples")));
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    let edge = u.values[0].abs().max(u.values[n - 1].abs());
    if edge > EDGE_TOL * m {
        return Err(LabError::WindowTooSmall(format!("edge value {edge} against max {m}")));
    }
    // The weights have a kink or a removable point at ξ = 0, so the lattice sum carries an O(Δξ²)
    // error; padding doublings are combined by Richardson steps until two agree.
    let mut pad = 4;
    let mut prev = weighted_spectrum_sum(u, pad, &weight, singular_at_zero);
    let mut prev_rich: Option<f64> = None;
    while pad < 512 {
        pad *= 2;
        let cur = weighted_spectrum_sum(u, pad, &weight, singular_at_zero);
        let rich = (4.0 * cur - prev) / 3.0;
        if let Some(p) = prev_rich {
            if (rich - p).abs() <= 1e-10 * rich.abs() {
                return Ok(rich);
            }
        }
        prev = cur;
        prev_rich = Some(rich);
    }
    Err(LabError::QuadratureNotConverged(format!("padding factor {pad}")))
}

/// Thermal target of kind φ (weight |ξ|coth(β|ξ|)) or ψ (weight |ξ|⁻¹coth(β|ξ|)).
pub fn thermal_target(u: &LineSamples, beta: f64, kind: Kind) -> Result<f64> {
    let f = ThermalFunctional::new(beta, kind)?;
    match kind {
        Kind::Phi => whole_line_form(u, |k| f.eval(k * k), false),
        Kind::Psi => {
            let (power, _) = power_spectrum(&u.values, u.dx, 4);
            let peak = power.iter().cloned().fold(0.0, f64::max);
            if power[0] > 1e-12 * peak {
                return Err(LabError::InvalidParameter("psi target needs a profile with zero mean".into()));
            }
            whole_line_form(u, |k| f.eval(k * k), true)
        }
    }
}

/// Zero-temperature energy (1/2π)∫|ξ||û|² dξ.
pub fn zero_temperature_energy(u: &LineSamples) -> Result<f64> {
    whole_line_form(u, |k: f64| k.abs(), false)
}

/// Cutoff and profile data for the log-profile form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogProfileSettings {
    pub kappa: f64,
    /// γ₀ < 0; the profile lives on x < 0.
    pub gamma_0: f64,
    /// Wall position z < 0.
    pub z: f64,
    /// χ = 1 on [z_cut_hi, 0] and 0 below z_cut_lo, with z < z_cut_lo < z_cut_hi < 0.
    pub cut: (f64, f64),
    /// Grid points per smallest profile length h·e^{κ s_left}/|γ₀|.
    pub points_per_scale: f64,
    /// Right end of the profile support in s (tail level reached).
    pub s_left: f64,
}

/// ⟨u_B, |D_{x,0}|u_B⟩ for the profile u (a function of s), scale h.
pub fn log_profile_form<U: Fn(f64) -> f64>(u: U, h: f64, st: &LogProfileSettings) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) || !(st.gamma_0 < 0.0) || !(st.z < st.cut.0 && st.cut.0 < st.cut.1 && st.cut.1 < 0.0) {
        return Err(LabError::InvalidParameter(format!("h = {h}, gamma_0 = {}, cut {:?}", st.gamma_0, st.cut)));
    }
    let scale = h * (st.kappa * st.s_left).exp() / st.gamma_0.abs();
    let dx = scale / st.points_per_scale;
    let n = ((-st.z) / dx).ceil() as usize + 64;
    if n > 1 << 24 {
        return Err(LabError::ResolutionInsufficient(h));
    }
    let chi = |x: f64| crate::numerics::smooth_step((x - st.cut.0) / (st.cut.1 - st.cut.0));
    let ub = |x: f64| {
        if x >= 0.0 {
            return 0.0;
        }
        let arg = st.gamma_0 * x / h;
        chi(x) * u(arg.ln() / st.kappa)
    };
    let v = HalfLineSamples::from_fn(st.z, dx, n, ub);
    sine_form(|z: f64| z.max(0.0).sqrt(), &v, SineDomain::HalfLine { tol: 1e-7 })
}

/// Test profile S(s/4)·e^{−0.3s}: supported in s ≥ 0 with an exponential tail.
pub fn log_profile_test_fn(s: f64) -> f64 {
    crate::numerics::smooth_step(s / 4.0) * (-0.3 * s).exp()
}

/// (h, relative error) of the log-profile form of [`log_profile_test_fn`] against its φ target at
/// β = π/κ.
pub fn log_profile_convergence(st: &LogProfileSettings, hs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let target = thermal_target(&LineSamples::from_fn(-2.0, 0.01, 30000, log_profile_test_fn), PI / st.kappa, Kind::Phi)?;
    hs.iter()
        .map(|&h| Ok((h, (log_profile_form(log_profile_test_fn, h, st)? - target).abs() / target)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::GaussRule;

    fn gaussian(sigma: f64) -> LineSamples {
        LineSamples::from_fn(-12.0 * sigma, 0.01 * sigma, 2401, |x| (-x * x / (2.0 * sigma * sigma)).exp())
    }

    /// (1/2π)∫ w(ξ)·2πσ²e^{−σ²ξ²} dξ by Gauss panels on the analytic transform.
    fn gaussian_oracle<W: Fn(f64) -> f64>(sigma: f64, w: W) -> f64 {
        let rule = GaussRule::new(20);
        2.0 * rule.integrate_panels(|k| w(k) * sigma * sigma * (-sigma * sigma * k * k).exp(), 0.0, 10.0 / sigma, 200)
    }

    #[test]
    fn gaussian_phi_target_matches_closed_form() {
        for (sigma, beta) in [(1.0, 2.0), (0.5, 16.0), (2.0, 39.0)] {
            let f = ThermalFunctional::phi(beta).unwrap();
            let num = thermal_target(&gaussian(sigma), beta, Kind::Phi).unwrap();
            let exact = gaussian_oracle(sigma, |k| f.eval(k * k));
            assert!((num - exact).abs() < 1e-6 * exact, "{num} vs {exact}");
        }
    }

    #[test]
    fn psi_of_derivative_equals_phi() {
        let u = LineSamples::from_fn(-15.0, 0.005, 6001, |x| (-x * x / 2.0).exp() * (1.0 + 0.3 * x));
        let du = LineSamples::from_fn(-15.0, 0.005, 6001, |x| (-x * x / 2.0).exp() * (0.3 - x * (1.0 + 0.3 * x)));
        let a = thermal_target(&u, 5.0, Kind::Phi).unwrap();
        let b = thermal_target(&du, 5.0, Kind::Psi).unwrap();
        assert!((a - b).abs() < 1e-8 * a, "{a} vs {b}");
        let c = thermal_target(&u.derivative(), 5.0, Kind::Psi).unwrap();
        assert!((a - c).abs() < 1e-8 * a, "{a} vs {c}");
    }

    #[test]
    fn target_decreases_to_zero_temperature_energy() {
        let u = gaussian(1.0);
        let e0 = zero_temperature_energy(&u).unwrap();
        let mut prev = f64::INFINITY;
        for beta in [1.0, 4.0, 16.0, 64.0, 256.0] {
            let t = thermal_target(&u, beta, Kind::Phi).unwrap();
            assert!(t < prev && t >= e0);
            prev = t;
        }
        assert!((prev - e0) / e0 < 0.01);
        let exact = gaussian_oracle(1.0, |k| k);
        assert!((e0 - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn truncated_window_is_rejected() {
        let u = LineSamples::from_fn(-1.0, 0.01, 201, |x| (-x * x).exp());
        assert!(matches!(thermal_target(&u, 2.0, Kind::Phi), Err(LabError::WindowTooSmall(_))));
    }

    #[test]
    fn log_profile_form_approaches_the_thermal_target() {
        let st = LogProfileSettings {
            kappa: 0.19232512,
            gamma_0: -1.0,
            z: -1.0,
            cut: (-0.9, -0.6),
            points_per_scale: 40.0,
            s_left: 0.0,
        };
        let rows = log_profile_convergence(&st, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].1 < w[0].1), "{rows:?}");
        assert!(rows[2].1 < 0.02, "{rows:?}");
    }
}
