//! Data profiles v₀ supported in (0, ℓ) and rescaled by h.

use crate::error::{LabError, Result};
use crate::numerics::bump;

/// v₀(y) = amp·bump(2y/ℓ − 1) with the scale h of v₀(·/h).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionProfile {
    pub ell_support: f64,
    pub h: f64,
    pub amp: f64,
}

impl ReflectionProfile {
    pub fn new(ell_support: f64, h: f64, amp: f64) -> Result<Self> {
        if !(ell_support > 0.0) || !(h > 0.0 && h < 1.0) || !amp.is_finite() {
            return Err(LabError::InvalidParameter(format!("profile ell = {ell_support}, h = {h}, amp = {amp}")));
        }
        Ok(Self { ell_support, h, amp })
    }

    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::new(self.ell_support, h, self.amp)
    }

    pub fn v0(&self, y: f64) -> f64 {
        self.amp * bump(2.0 * y / self.ell_support - 1.0)
    }

    pub fn v0_prime(&self, y: f64) -> f64 {
        let z = 2.0 * y / self.ell_support - 1.0;
        if z.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - z * z;
        self.amp * bump(z) * (-2.0 * z / (q * q)) * 2.0 / self.ell_support
    }

    /// sup|v₀| + sup|v₀′| + sup|v₀″| on a sampling grid (second derivative by differences).
    pub fn c2_norm(&self) -> f64 {
        let n = 4000;
        let dy = self.ell_support / n as f64;
        let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..=n {
            let y = i as f64 * dy;
            a = a.max(self.v0(y).abs());
            b = b.max(self.v0_prime(y).abs());
            let e = 1e-4 * self.ell_support;
            c = c.max(((self.v0_prime(y + e) - self.v0_prime(y - e)) / (2.0 * e)).abs());
        }
        a + b + c
    }

    /// v₀(r̂/h).
    pub fn scaled(&self, r_hat: f64) -> f64 {
        self.v0(r_hat / self.h)
    }

    /// Upper end ℓh of the scaled support.
    pub fn scaled_support(&self) -> f64 {
        self.ell_support * self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matches_differences() {
        let p = ReflectionProfile::new(1.5, 0.01, 0.7).unwrap();
        for k in 1..30 {
            let y = 1.5 * k as f64 / 30.0;
            let e = 1e-6;
            let fd = (p.v0(y + e) - p.v0(y - e)) / (2.0 * e);
            assert!((fd - p.v0_prime(y)).abs() < 1e-6);
        }
        assert_eq!(p.v0(-0.1), 0.0);
        assert_eq!(p.v0(1.6), 0.0);
    }

    #[test]
    fn c2_norm_scales_with_amplitude() {
        let a = ReflectionProfile::new(1.0, 0.1, 1.0).unwrap().c2_norm();
        let b = ReflectionProfile::new(1.0, 0.1, 2.0).unwrap().c2_norm();
        assert!((b - 2.0 * a).abs() < 1e-9 * b);
    }
}
