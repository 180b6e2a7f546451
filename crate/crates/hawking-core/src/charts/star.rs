//! Collapsing-star boundary z_*(t) = −t − A₀e^{−2κ₋t} in both charts and its reflection constants.

use super::foliation::FoliationChart;
use crate::error::{LabError, Result};
use crate::geometry::RadialPoint;
use crate::numerics::{bisect, extrapolate_to_zero};

/// Star surface and derived reflection data.
#[derive(Debug, Clone)]
pub struct StarModel {
    pub a0: f64,
    pub kappa: f64,
    pub t_hat_b: f64,
    /// d r/dt̂ at t̂_B (radius form of the boundary).
    pub alpha_0: f64,
    /// sup |dẑ/dt̂| for the r̂ form of the boundary over t̂ ∈ [0, t̂_B).
    pub c_b: f64,
    pub beta_0: f64,
    /// Log-profile constant of the reflected piece, β₀e^{κ₋(λ_K(r_minus) − t̂_B)}/λ_K′(r_minus).
    pub gamma_0: f64,
    /// β₀e^{κ₋λ_K(r_minus)}, kept for comparison.
    pub gamma_0_alt: f64,
    pub lambda_prime: f64,
    /// Successive t̂_B extrapolants used to certify the limit.
    pub t_hat_b_history: Vec<f64>,
}

impl StarModel {
    pub fn z_star(&self, t: f64) -> f64 {
        -t - self.a0 * (-2.0 * self.kappa * t).exp()
    }

    pub fn z_dot(&self, t: f64) -> f64 {
        -1.0 + 2.0 * self.kappa * self.a0 * (-2.0 * self.kappa * t).exp()
    }

    pub fn z_ddot(&self, t: f64) -> f64 {
        -4.0 * self.kappa * self.kappa * self.a0 * (-2.0 * self.kappa * t).exp()
    }

    /// Advanced time t + z_*(t) = −A₀e^{−2κt} of the surface.
    pub fn adv(&self, t: f64) -> f64 {
        -self.a0 * (-2.0 * self.kappa * t).exp()
    }

    /// Retarded time t − z_*(t) of the surface.
    pub fn ret(&self, t: f64) -> f64 {
        2.0 * t + self.a0 * (-2.0 * self.kappa * t).exp()
    }

    /// Surface time with the given retarded time (Newton on a convex function).
    pub fn t_of_ret(&self, u: f64) -> f64 {
        let mut t = 0.5 * u;
        for _ in 0..100 {
            let e = (-2.0 * self.kappa * t).exp();
            let f = 2.0 * t + self.a0 * e - u;
            let df = 2.0 - 2.0 * self.kappa * self.a0 * e;
            let dt = f / df;
            t -= dt;
            if dt.abs() < 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        t
    }

    /// Surface time with the given advanced time v < 0.
    pub fn t_of_adv(&self, v: f64) -> f64 {
        -(-v / self.a0).ln() / (2.0 * self.kappa)
    }

    pub fn point(&self, chart: &FoliationChart, t: f64) -> Result<RadialPoint> {
        chart.geom.point_from_x(self.z_star(t))
    }

    /// t̂ of the surface point at time t.
    pub fn t_hat_at(&self, chart: &FoliationChart, t: f64) -> Result<f64> {
        let p = self.point(chart, t)?;
        if p.r <= chart.r_a {
            // t − F_K = (t + z_*) − λ_K(r_minus) − s·(r − r_minus), free of the t + x cancellation.
            return Ok(self.adv(t) - chart.lambda_k_minus - chart.r_hat_near_horizon(p.dm));
        }
        Ok(chart.t_hat(t, &p))
    }

    /// ẑ in the r̂ convention at S_* time t: z_* + F_K + t̂_B, or s·(r − r_minus) below the transition.
    pub fn z_hat_at(&self, chart: &FoliationChart, t: f64) -> Result<f64> {
        let p = self.point(chart, t)?;
        if p.r <= chart.r_a {
            return Ok(chart.r_hat_near_horizon(p.dm));
        }
        Ok(self.z_star(t) + chart.f_k_point(&p) + self.t_hat_b)
    }

    /// ẑ(t̂₁(s)) = s − t̂₁(s), evaluated on the surface without cancellation.
    pub fn reflected_argument(&self, chart: &FoliationChart, s: f64) -> Result<f64> {
        self.t_hat_1(chart, s)?;
        if s >= self.t_hat_b {
            return Ok(0.0);
        }
        let e = ((self.t_hat_b - s) / self.a0).min(1.0);
        self.z_hat_at(chart, -e.ln() / (2.0 * self.kappa))
    }

    /// S_* time at which the surface reaches t̂.
    pub fn t_of_t_hat(&self, chart: &FoliationChart, t_hat: f64) -> Result<f64> {
        if !(t_hat < self.t_hat_b) {
            return Err(LabError::OutOfRange(format!("t_hat = {t_hat} >= t_hat_B")));
        }
        let f = |t: f64| self.t_hat_at(chart, t).unwrap() - t_hat;
        let mut lo = -1.0;
        while f(lo) > 0.0 {
            lo *= 2.0;
        }
        let mut hi = 1.0;
        while f(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e4 {
                return Err(LabError::OutOfRange(format!("t_hat = {t_hat}")));
            }
        }
        bisect(f, lo, hi, 1e-14, 300)
    }

    /// ẑ(t̂) in the r̂ convention.
    pub fn z_hat(&self, chart: &FoliationChart, t_hat: f64) -> Result<f64> {
        let t = self.t_of_t_hat(chart, t_hat)?;
        self.z_hat_at(chart, t)
    }

    /// Radius of the surface at t̂.
    pub fn z_hat_radius(&self, chart: &FoliationChart, t_hat: f64) -> Result<f64> {
        let t = self.t_of_t_hat(chart, t_hat)?;
        Ok(self.point(chart, t)?.r)
    }

    /// Root of ẑ(t̂₁) + t̂₁ = s through the surface parametrisation: t + z_*(t) = s − t̂_B.
    pub fn t_hat_1(&self, chart: &FoliationChart, s: f64) -> Result<f64> {
        let lo = self.t_hat_b - self.a0;
        if !(s >= lo - 1e-14 && s <= self.t_hat_b) {
            return Err(LabError::OutOfRange(format!("s = {s} outside [{lo}, {}]", self.t_hat_b)));
        }
        if s >= self.t_hat_b {
            return Ok(self.t_hat_b);
        }
        let e = ((self.t_hat_b - s) / self.a0).min(1.0);
        let t = -e.ln() / (2.0 * self.kappa);
        self.t_hat_at(chart, t)
    }
}

/// Builds the star model; requires 2κ₋A₀ < 1 so the surface stays timelike for t ≥ 0.
pub fn build_star(chart: &FoliationChart, a0: f64) -> Result<StarModel> {
    if !(a0 > 0.0) {
        return Err(LabError::InvalidParameter(format!("A0 = {a0} must be positive")));
    }
    let g = &chart.geom;
    let kappa = g.kappa_minus();
    let speed = (1.0 - 2.0 * kappa * a0).abs().max(1.0 - 2.0 * kappa * a0);
    let speed0 = (-1.0 + 2.0 * kappa * a0).abs();
    if 2.0 * kappa * a0 >= 1.0 || speed0 >= 1.0 || speed >= 1.0 + 1e-15 {
        return Err(LabError::TimelikeViolation(speed0.max(1.0)));
    }
    let mut star = StarModel {
        a0,
        kappa,
        t_hat_b: 0.0,
        alpha_0: 0.0,
        c_b: 0.0,
        beta_0: 0.0,
        gamma_0: 0.0,
        gamma_0_alt: 0.0,
        lambda_prime: chart.lambda_prime_minus(),
        t_hat_b_history: Vec::new(),
    };
    let x_a = g.x_of_point(&g.point_from_r(chart.r_a));
    // first time the surface is inside the ρ = 1 zone with margin
    let mut t0 = 0.0;
    while star.z_star(t0) > x_a - 5.0 {
        t0 += 0.5;
    }
    let step = std::f64::consts::LN_2 / (2.0 * kappa);
    let n = 14;
    let mut es = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut dms = Vec::with_capacity(n);
    for k in 0..n {
        let t = t0 + k as f64 * step;
        let p = star.point(chart, t)?;
        es.push((-2.0 * kappa * t).exp());
        ys.push(chart.t_hat(t, &p));
        dms.push(p.dm);
    }
    let window = 6;
    let mut history = Vec::new();
    for end in window..=n {
        history.push(extrapolate_to_zero(&es[end - window..end], &ys[end - window..end]));
    }
    let last = history[history.len() - 1];
    let prev = history[history.len() - 2];
    if (last - prev).abs() > 1e-9 {
        return Err(LabError::ExtrapolationFailure(format!("t_hat_B extrapolants differ by {}", (last - prev).abs())));
    }
    // Below the transition t̂ = adv − λ_K(r_minus) − s·(r − r_minus) → −λ_K(r_minus); the
    // extrapolants certify the limit and the closed form is stored.
    let exact = -chart.lambda_k_minus;
    if (last - exact).abs() > 1e-8 {
        return Err(LabError::ExtrapolationFailure(format!("t_hat_B = {last}, closed form {exact}")));
    }
    star.t_hat_b = exact;
    star.t_hat_b_history = history;

    let ratios: Vec<f64> = dms.iter().zip(&ys).map(|(dm, y)| dm / (y - star.t_hat_b)).collect();
    star.alpha_0 = extrapolate_to_zero(&es[n - window..], &ratios[n - window..]);
    let sa = star.lambda_prime * star.alpha_0;
    star.beta_0 = sa / (1.0 + sa);
    star.gamma_0 =
        star.beta_0 * (kappa * (chart.lambda_k_minus - star.t_hat_b)).exp() / star.lambda_prime;
    star.gamma_0_alt = star.beta_0 * (kappa * chart.lambda_k_minus).exp();

    // c_B from the S_* parametrisation: dẑ/dt̂ = 2κA₀e^{−2κt}/(dt̂/dt) − 1.
    let t_end = t0 + (n as f64 + 10.0) * step;
    let samples = 4000;
    let mut c_b: f64 = 0.0;
    for i in 0..=samples {
        let t = t_end * i as f64 / samples as f64;
        let p = star.point(chart, t)?;
        let e = 2.0 * kappa * a0 * (-2.0 * kappa * t).exp();
        let that_dot = chart.t_hat_rate(&p, e);
        let zp = e / that_dot - 1.0;
        c_b = c_b.max(zp.abs());
    }
    star.c_b = c_b.max(sa.abs());
    Ok(star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::foliation::{build_foliation, FoliationSettings};
    use crate::geometry::{SdSGeometry, SdSParams};

    fn setup() -> (FoliationChart, StarModel) {
        let g = SdSGeometry::new(SdSParams::new(1.0, 0.04, 0.5).unwrap()).unwrap();
        let c = build_foliation(&g, (3.0, 6.5), FoliationSettings::default()).unwrap();
        let s = build_star(&c, 1.0).unwrap();
        (c, s)
    }

    #[test]
    fn crossing_time_matches_closed_form() {
        let (c, s) = setup();
        assert!((s.t_hat_b + c.lambda_k_minus).abs() < 1e-9);
    }

    #[test]
    fn reflection_constants_have_expected_signs_and_values() {
        let (c, s) = setup();
        assert!(s.alpha_0 < 0.0 && s.beta_0 < 0.0 && s.gamma_0 < 0.0);
        // with μ_K(r_minus) = 0 the S_* reflection gives γ₀ = −1/A₀
        assert!((s.gamma_0 + 1.0 / s.a0).abs() < 1e-6, "gamma_0 = {}", s.gamma_0);
        let cr = (-2.0 * s.kappa * c.geom.x_reg_minus()).exp();
        let alpha = -cr / (s.a0 + c.shooting_param * cr);
        assert!((s.alpha_0 - alpha).abs() < 1e-6 * alpha.abs());
        assert!(s.c_b < 1.0);
    }

    #[test]
    fn t_hat_1_solves_its_equation() {
        let (c, s) = setup();
        for k in 0..20 {
            let arg = s.t_hat_b - s.a0 * (k as f64 + 0.5) / 20.0;
            let t1 = s.t_hat_1(&c, arg).unwrap();
            let z = s.z_hat(&c, t1).unwrap();
            assert!((z + t1 - arg).abs() < 1e-10);
        }
    }

    #[test]
    fn fast_star_is_rejected() {
        let g = SdSGeometry::new(SdSParams::new(1.0, 0.04, 0.5).unwrap()).unwrap();
        let c = build_foliation(&g, (3.0, 6.5), FoliationSettings::default()).unwrap();
        assert!(matches!(build_star(&c, 10.0), Err(LabError::TimelikeViolation(_))));
    }
}
