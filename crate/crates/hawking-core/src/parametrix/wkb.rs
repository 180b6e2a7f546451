//! WKB parametrix after the reflection: amplitude b = α(r̂ + t̂ − t̂_B + c_Bℓh)/α(r̂) with α(r̂) = r,
//! carried by the phase y = β₀(r̂ + t̂ − t̂_B).

use super::profile::ReflectionProfile;
use crate::charts::{FoliationChart, StarModel};
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy)]
pub struct WkbApprox<'a> {
    pub chart: &'a FoliationChart,
    pub star: &'a StarModel,
    pub profile: ReflectionProfile,
}

impl<'a> WkbApprox<'a> {
    pub fn new(chart: &'a FoliationChart, star: &'a StarModel, profile: ReflectionProfile) -> Self {
        Self { chart, star, profile }
    }

    /// Start of the WKB window, t̂_B − c_Bℓh.
    pub fn t_start(&self) -> f64 {
        self.star.t_hat_b - self.star.c_b * self.profile.scaled_support()
    }

    fn check(&self, t_hat: f64) -> Result<()> {
        let end = self.t_start();
        if t_hat < -1e-12 || t_hat > end + 1e-12 * (1.0 + end.abs()) {
            return Err(LabError::OutOfRange(format!("t_hat = {t_hat} outside [0, {end}]")));
        }
        Ok(())
    }

    /// α(r̂) = r.
    pub fn alpha(&self, r_hat: f64) -> Result<f64> {
        self.chart.radius_from_r_hat(self.star.t_hat_b, r_hat)
    }

    pub fn y(&self, t_hat: f64, r_hat: f64) -> f64 {
        self.star.beta_0 * (r_hat + t_hat - self.star.t_hat_b)
    }

    /// Transport amplitude; unrestricted in t̂ so that derivatives can be taken at the window ends.
    pub fn amplitude(&self, t_hat: f64, r_hat: f64) -> Result<f64> {
        let shift = self.star.c_b * self.profile.scaled_support();
        Ok(self.alpha(r_hat + t_hat - self.star.t_hat_b + shift)? / self.alpha(r_hat)?)
    }

    /// b·v₀(y/h) with the Dirichlet sign.
    pub fn full(&self, t_hat: f64, r_hat: f64) -> Result<f64> {
        self.check(t_hat)?;
        let h = self.profile.h;
        Ok(-self.amplitude(t_hat, r_hat)? * self.profile.v0(self.y(t_hat, r_hat) / h))
    }

    /// (r_minus/r)·v₀(y/h) with the Dirichlet sign.
    pub fn v_ap(&self, t_hat: f64, r_hat: f64) -> Result<f64> {
        self.v_ap_at_radius(t_hat, r_hat, self.alpha(r_hat)?)
    }

    /// v_ap when the radius α(r̂) = r is already known.
    pub fn v_ap_at_radius(&self, t_hat: f64, r_hat: f64, r: f64) -> Result<f64> {
        self.check(t_hat)?;
        let h = self.profile.h;
        Ok(-self.chart.geom.r_minus() / r * self.profile.v0(self.y(t_hat, r_hat) / h))
    }

    /// ∂_t̂ v_ap = −(r_minus/r)(β₀/h)v₀′(y/h).
    pub fn v_ap_dt(&self, t_hat: f64, r_hat: f64) -> Result<f64> {
        self.v_ap_dt_at_radius(t_hat, r_hat, self.alpha(r_hat)?)
    }

    pub fn v_ap_dt_at_radius(&self, t_hat: f64, r_hat: f64, r: f64) -> Result<f64> {
        self.check(t_hat)?;
        let h = self.profile.h;
        Ok(-self.chart.geom.r_minus() / r * self.star.beta_0 / h * self.profile.v0_prime(self.y(t_hat, r_hat) / h))
    }

    /// |(−∂_r̂ + ∂_t̂ − (∂_r̂r)/r)b| by Richardson-extrapolated centred differences of step d.
    pub fn transport_residual(&self, t_hat: f64, r_hat: f64, d: f64) -> Result<f64> {
        let central = |e: f64| -> Result<(f64, f64, f64)> {
            let bt = (self.amplitude(t_hat + e, r_hat)? - self.amplitude(t_hat - e, r_hat)?) / (2.0 * e);
            let br = (self.amplitude(t_hat, r_hat + e)? - self.amplitude(t_hat, r_hat - e)?) / (2.0 * e);
            let ar = (self.alpha(r_hat + e)? - self.alpha(r_hat - e)?) / (2.0 * e);
            Ok((bt, br, ar))
        };
        let (t1, r1, a1) = central(d)?;
        let (t2, r2, a2) = central(0.5 * d)?;
        let rich = |c: f64, f: f64| (4.0 * f - c) / 3.0;
        let (bt, br, ar) = (rich(t1, t2), rich(r1, r2), rich(a1, a2));
        let b = self.amplitude(t_hat, r_hat)?;
        Ok((-br + bt - ar / self.alpha(r_hat)? * b).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::background::Background;
    use crate::evolution::norms::sobolev_norm;

    fn approx(bg: &Background, h: f64) -> WkbApprox<'_> {
        WkbApprox::new(&bg.chart, &bg.star, ReflectionProfile::new(1.0, h, 1.0).unwrap())
    }

    #[test]
    fn amplitude_is_one_at_window_start() {
        let bg = Background::canonical().unwrap();
        let w = approx(&bg, 0.01);
        for k in 0..10 {
            let r = 0.1 * k as f64;
            assert!((w.amplitude(w.t_start(), r).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn transport_equation_holds() {
        let bg = Background::canonical().unwrap();
        let w = approx(&bg, 0.01);
        let mut worst: f64 = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                let t = 0.5 + i as f64;
                let r = 0.05 + 1.2 * j as f64;
                worst = worst.max(w.transport_residual(t, r, 1e-3).unwrap());
            }
        }
        assert!(worst <= 1e-8, "{worst}");
    }

    #[test]
    fn amplitude_times_radius_is_constant_on_characteristics() {
        let bg = Background::canonical().unwrap();
        let w = approx(&bg, 0.01);
        for k in 0..12 {
            let s = 1.0 + 0.5 * k as f64;
            let base = w.amplitude(s - 0.3, 0.3).unwrap() * w.alpha(0.3).unwrap();
            for j in 1..6 {
                let r = 0.3 + 0.4 * j as f64;
                let v = w.amplitude(s - r, r).unwrap() * w.alpha(r).unwrap();
                assert!((v - base).abs() <= 1e-10 * base.abs());
            }
        }
    }

    #[test]
    fn full_and_v_ap_differ_at_first_order_in_h() {
        let bg = Background::canonical().unwrap();
        let mut gaps = Vec::new();
        for h in [0.02, 0.01] {
            let w = approx(&bg, h);
            let n = 1 << 14;
            let (a, b) = (bg.star.t_hat_b - 2.0, bg.star.t_hat_b + 0.5);
            let dx = (b - a) / (n - 1) as f64;
            let d: Vec<f64> = (0..n)
                .map(|i| {
                    let r = a + i as f64 * dx;
                    w.full(0.0, r).unwrap() - w.v_ap(0.0, r).unwrap()
                })
                .collect();
            gaps.push(sobolev_norm(&d, dx, 0.5).unwrap());
        }
        let ratio = gaps[0] / gaps[1];
        assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn out_of_window_is_rejected() {
        let bg = Background::canonical().unwrap();
        let w = approx(&bg, 0.01);
        assert!(matches!(w.v_ap(bg.star.t_hat_b, 0.0), Err(LabError::OutOfRange(_))));
    }
}
