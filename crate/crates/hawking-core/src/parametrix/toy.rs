//! Constant-coefficient toy operator −∂_t̂∂_r̂ + ∂_t̂² with Dirichlet data on r̂ = ẑ(t̂).
//!
//! Its solution with data v₀(r̂/h) and zero velocity at t̂_B is a stationary incident piece
//! v₀(r̂/h) minus the reflected piece v₀(ẑ(t̂₁(r̂+t̂))/h) carried along r̂ + t̂ = const.

use super::profile::ReflectionProfile;
use crate::charts::{FoliationChart, StarModel};
use crate::error::{LabError, Result};
use crate::evolution::norms::sobolev_norm;
use crate::numerics::bisect;

#[derive(Debug, Clone, Copy)]
pub struct ToyModel<'a> {
    pub chart: &'a FoliationChart,
    pub star: &'a StarModel,
    pub profile: ReflectionProfile,
    /// Window constant c > c_B.
    pub c_window: f64,
}

impl<'a> ToyModel<'a> {
    /// Window constant defaults to 2c_B.
    pub fn new(chart: &'a FoliationChart, star: &'a StarModel, profile: ReflectionProfile) -> Self {
        Self { chart, star, profile, c_window: 2.0 * star.c_b }
    }

    pub fn with_window(mut self, c: f64) -> Result<Self> {
        if !(c > self.star.c_b) {
            return Err(LabError::InvalidParameter(format!("window constant {c} must exceed c_B = {}", self.star.c_b)));
        }
        self.c_window = c;
        Ok(self)
    }

    fn lh(&self) -> f64 {
        self.profile.scaled_support()
    }

    /// [t̂_B − cℓh, t̂_B].
    pub fn window(&self) -> (f64, f64) {
        (self.star.t_hat_b - self.c_window * self.lh(), self.star.t_hat_b)
    }

    /// [t̂_B − cℓh, t̂_B − c_Bℓh], where the linearised form applies.
    pub fn linear_window(&self) -> (f64, f64) {
        (self.star.t_hat_b - self.c_window * self.lh(), self.star.t_hat_b - self.star.c_b * self.lh())
    }

    fn check(&self, t_hat: f64, w: (f64, f64)) -> Result<()> {
        let tol = 1e-12 * (1.0 + w.1.abs());
        if t_hat < w.0 - tol || t_hat > w.1 + tol {
            return Err(LabError::OutOfRange(format!("t_hat = {t_hat} outside [{}, {}]", w.0, w.1)));
        }
        Ok(())
    }

    /// Boundary position ẑ(t̂); zero at and after t̂_B.
    pub fn boundary(&self, t_hat: f64) -> Result<f64> {
        if t_hat >= self.star.t_hat_b {
            return Ok(0.0);
        }
        self.star.z_hat(self.chart, t_hat)
    }

    /// Closed form through t̂₁ from the star's S_* parametrisation.
    pub fn closed_form(&self, t_hat: f64, r_hat: f64) -> Result<f64> {
        self.check(t_hat, self.window())?;
        let s = r_hat + t_hat;
        let incident = self.profile.scaled(r_hat);
        if s >= self.star.t_hat_b {
            return Ok(incident);
        }
        Ok(incident - self.profile.scaled(self.star.reflected_argument(self.chart, s)?))
    }

    /// Independent evaluation: the characteristic r̂ + t̂ = s is followed back to the boundary by
    /// bisection on ẑ(τ) + τ − s, with ẑ evaluated from the t̂ chart.
    pub fn characteristics(&self, t_hat: f64, r_hat: f64) -> Result<f64> {
        self.check(t_hat, self.window())?;
        let s = r_hat + t_hat;
        let tb = self.star.t_hat_b;
        let incident = self.profile.scaled(r_hat);
        if s >= tb {
            return Ok(incident);
        }
        let g = |tau: f64| self.boundary(tau).unwrap() + tau - s;
        let hi = 0.5 * (tb + s);
        let mut lo = t_hat.min(s);
        while g(lo) > 0.0 {
            lo -= (tb - s).max(1e-12);
        }
        let tau = bisect(g, lo, hi, 1e-15, 300)?;
        Ok(incident - self.profile.scaled(self.boundary(tau)?))
    }

    /// Argument y = β₀(r̂ + t̂ − t̂_B) of the linearised form.
    pub fn y(&self, t_hat: f64, r_hat: f64) -> f64 {
        self.star.beta_0 * (r_hat + t_hat - self.star.t_hat_b)
    }

    /// −v₀(y/h).
    pub fn linearized(&self, t_hat: f64, r_hat: f64) -> Result<f64> {
        self.check(t_hat, self.linear_window())?;
        Ok(-self.profile.scaled(self.y(t_hat, r_hat)))
    }

    /// ∂_t̂ of the linearised form, −(β₀/h)v₀′(y/h).
    pub fn linearized_dt(&self, t_hat: f64, r_hat: f64) -> Result<f64> {
        self.check(t_hat, self.linear_window())?;
        let h = self.profile.h;
        Ok(-self.star.beta_0 / h * self.profile.v0_prime(self.y(t_hat, r_hat) / h))
    }

    /// ‖closed form − linearised form‖_{H^{1/2}} in r̂ at time t̂, on [ẑ(t̂), ẑ(t̂) + (c + 2)ℓh].
    pub fn linearization_gap(&self, t_hat: f64, n: usize) -> Result<f64> {
        self.check(t_hat, self.linear_window())?;
        let z = self.boundary(t_hat)?;
        let len = (self.c_window + 2.0) * self.lh();
        let dx = len / (n - 1) as f64;
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let r = z + i as f64 * dx;
            d.push(self.closed_form(t_hat, r)? - self.linearized(t_hat, r)?);
        }
        sobolev_norm(&d, dx, 0.5)
    }

    /// Max |(−∂_t̂∂_r̂ + ∂_t̂²)v| by centred differences of step d over points away from the boundary.
    pub fn discrete_residual(&self, t_hat: f64, r_hats: &[f64], d: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &r in r_hats {
            let f = |a: f64, b: f64| self.closed_form(t_hat + a, r + b);
            let vtt = (f(d, 0.0)? - 2.0 * f(0.0, 0.0)? + f(-d, 0.0)?) / (d * d);
            let vtr = (f(d, d)? - f(d, -d)? - f(-d, d)? + f(-d, -d)?) / (4.0 * d * d);
            worst = worst.max((vtt - vtr).abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::Background;

    fn model(bg: &Background, h: f64) -> ToyModel<'_> {
        ToyModel::new(&bg.chart, &bg.star, ReflectionProfile::new(1.0, h, 1.0).unwrap())
    }

    #[test]
    fn data_is_reproduced_at_crossing_time() {
        let bg = Background::canonical().unwrap();
        let m = model(&bg, 0.01);
        for k in 0..20 {
            let r = 0.012 * k as f64 / 20.0;
            let v = m.closed_form(bg.star.t_hat_b, r).unwrap();
            assert_eq!(v, m.profile.scaled(r));
        }
    }

    #[test]
    fn solution_vanishes_on_the_boundary() {
        let bg = Background::canonical().unwrap();
        let m = model(&bg, 0.01);
        let (a, b) = m.window();
        for k in 1..10 {
            let t = a + (b - a) * k as f64 / 10.0;
            let z = m.boundary(t).unwrap();
            assert!(m.closed_form(t, z).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_characteristics() {
        let bg = Background::canonical().unwrap();
        let m = model(&bg, 0.01);
        let (a, b) = m.window();
        let mut worst: f64 = 0.0;
        for k in 0..8 {
            let t = a + (b - a) * k as f64 / 8.0;
            let z = m.boundary(t).unwrap();
            for j in 0..40 {
                let r = z + 0.04 * j as f64 / 40.0;
                worst = worst.max((m.closed_form(t, r).unwrap() - m.characteristics(t, r).unwrap()).abs());
            }
        }
        assert!(worst <= 1e-6, "{worst}");
    }

    #[test]
    fn residual_is_second_order() {
        let bg = Background::canonical().unwrap();
        let m = model(&bg, 0.05);
        let (a, b) = m.window();
        let t = 0.5 * (a + b);
        let z = m.boundary(t).unwrap();
        // Reflected profile, away from s = t̂_B where the derivatives of t̂₁ grow.
        let rs: Vec<f64> = (0..20).map(|j| z + 0.0005 + 0.003 * j as f64 / 20.0).collect();
        let e1 = m.discrete_residual(t, &rs, 2e-4).unwrap();
        let e2 = m.discrete_residual(t, &rs, 1e-4).unwrap();
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.3, "order {order} ({e1}, {e2})");
    }

    #[test]
    fn t_hat_1_slope_at_crossing() {
        let bg = Background::canonical().unwrap();
        let s = &bg.star;
        let e = 1e-5;
        let fd = (s.t_hat_b - s.t_hat_1(&bg.chart, s.t_hat_b - e).unwrap()) / e;
        let th = 1.0 / (1.0 + s.lambda_prime * s.alpha_0);
        assert!((fd - th).abs() < 1e-4 * th.abs(), "{fd} vs {th}");
    }

    #[test]
    fn arguments_differ_quadratically() {
        let bg = Background::canonical().unwrap();
        let mut ratios = Vec::new();
        for h in [0.02, 0.01, 0.005] {
            let m = model(&bg, h);
            let t = m.linear_window().1;
            let mut worst: f64 = 0.0;
            let z = m.boundary(t).unwrap();
            for j in 0..50 {
                let r = z + 3.0 * h * j as f64 / 50.0;
                let s = r + t;
                if s >= bg.star.t_hat_b {
                    continue;
                }
                let exact = bg.star.reflected_argument(&bg.chart, s).unwrap();
                worst = worst.max((exact - m.y(t, r)).abs());
            }
            ratios.push(worst / (h * h));
        }
        assert!(ratios.iter().all(|r| *r < 10.0 * ratios[0] + 1e-9), "{ratios:?}");
    }

    #[test]
    fn zero_profile_gives_zero() {
        let bg = Background::canonical().unwrap();
        let m = ToyModel::new(&bg.chart, &bg.star, ReflectionProfile::new(1.0, 0.01, 0.0).unwrap());
        let t = m.linear_window().0;
        assert_eq!(m.linearization_gap(t, 256).unwrap(), 0.0);
    }
}
