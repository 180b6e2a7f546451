//! Schwarzschild-de Sitter background: horizons, surface gravities, tortoise map, mode potential.

use crate::error::{LabError, Result};
use crate::numerics::newton_bracketed;

/// Black-hole mass, cosmological constant and field mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdSParams {
    pub mass: f64,
    pub lambda: f64,
    pub m_field: f64,
}

impl SdSParams {
    pub fn new(mass: f64, lambda: f64, m_field: f64) -> Result<Self> {
        let p = Self { mass, lambda, m_field };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("M", self.mass), ("Lambda", self.lambda), ("m", self.m_field)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(LabError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let s = 9.0 * self.mass * self.mass * self.lambda;
        if s >= 1.0 {
            return Err(LabError::SubextremalViolation(s));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonData {
    pub r_neg: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    pub beta_minus: f64,
    pub beta_plus: f64,
}

/// Δ_r = r²(1 − Λr²/3) − 2Mr.
pub fn delta_r(p: &SdSParams, r: f64) -> f64 {
    r * r * (1.0 - p.lambda * r * r / 3.0) - 2.0 * p.mass * r
}

pub fn delta_r_prime(p: &SdSParams, r: f64) -> f64 {
    2.0 * r - 4.0 * p.lambda * r * r * r / 3.0 - 2.0 * p.mass
}

/// Nonzero roots of Δ_r from the trigonometric form of r³ − (3/Λ)r + 6M/Λ = 0.
pub fn horizon_roots(p: &SdSParams) -> Result<HorizonData> {
    p.validate()?;
    let pc = -3.0 / p.lambda;
    let qc = 6.0 * p.mass / p.lambda;
    let amp = 2.0 * (-pc / 3.0).sqrt();
    let arg = (3.0 * qc / (2.0 * pc) * (-3.0 / pc).sqrt()).clamp(-1.0, 1.0);
    let theta = arg.acos();
    let mut roots: Vec<f64> = (0..3)
        .map(|k| amp * (theta / 3.0 - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
        .collect();
    for r in roots.iter_mut() {
        let f = *r * *r * *r + pc * *r + qc;
        let df = 3.0 * *r * *r + pc;
        *r -= f / df;
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (r_neg, r_minus, r_plus) = (roots[0], roots[1], roots[2]);
    if !(r_neg < 0.0 && 0.0 < r_minus && r_minus < r_plus) {
        return Err(LabError::SubextremalViolation(9.0 * p.mass * p.mass * p.lambda));
    }
    let kappa_minus = delta_r_prime(p, r_minus) / (2.0 * r_minus * r_minus);
    let kappa_plus = -delta_r_prime(p, r_plus) / (2.0 * r_plus * r_plus);
    let pi = std::f64::consts::PI;
    Ok(HorizonData {
        r_neg,
        r_minus,
        r_plus,
        kappa_minus,
        kappa_plus,
        beta_minus: pi / kappa_minus,
        beta_plus: pi / kappa_plus,
    })
}

/// A radius together with accurate distances to both horizons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub r: f64,
    /// r − r_minus
    pub dm: f64,
    /// r_plus − r
    pub dp: f64,
}

/// Closed-form tortoise coordinate x(r) = Σ c_i ln|r − r_i| − x_anchor and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TortoiseMap {
    /// r_i²/Δ_r′(r_i) for r_neg, r_minus, r_plus.
    pub partial_fraction_coeffs: [f64; 3],
    pub anchor_radius: f64,
    offset: f64,
}

/// Background geometry bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdSGeometry {
    pub params: SdSParams,
    pub horizons: HorizonData,
    pub tortoise: TortoiseMap,
}

impl SdSGeometry {
    pub fn new(params: SdSParams) -> Result<Self> {
        let horizons = horizon_roots(&params)?;
        let roots = [horizons.r_neg, horizons.r_minus, horizons.r_plus];
        let mut c = [0.0; 3];
        for i in 0..3 {
            c[i] = roots[i] * roots[i] / delta_r_prime(&params, roots[i]);
        }
        let anchor = 0.5 * (horizons.r_minus + horizons.r_plus);
        let mut g = Self {
            params,
            horizons,
            tortoise: TortoiseMap { partial_fraction_coeffs: c, anchor_radius: anchor, offset: 0.0 },
        };
        let p = g.point_from_r(anchor);
        g.tortoise.offset = g.x_raw(&p);
        Ok(g)
    }

    pub fn r_minus(&self) -> f64 {
        self.horizons.r_minus
    }

    pub fn r_plus(&self) -> f64 {
        self.horizons.r_plus
    }

    pub fn kappa_minus(&self) -> f64 {
        self.horizons.kappa_minus
    }

    pub fn kappa_plus(&self) -> f64 {
        self.horizons.kappa_plus
    }

    pub fn delta_r(&self, r: f64) -> f64 {
        delta_r(&self.params, r)
    }

    pub fn delta_r_prime(&self, r: f64) -> f64 {
        delta_r_prime(&self.params, r)
    }

    /// Δ_r evaluated from the factored form, accurate near both horizons.
    pub fn delta_at(&self, p: &RadialPoint) -> f64 {
        self.params.lambda / 3.0 * p.r * (p.r - self.horizons.r_neg) * p.dm * p.dp
    }

    pub fn point_from_r(&self, r: f64) -> RadialPoint {
        RadialPoint { r, dm: r - self.horizons.r_minus, dp: self.horizons.r_plus - r }
    }

    fn x_raw(&self, p: &RadialPoint) -> f64 {
        let [cn, cm, cp] = self.tortoise.partial_fraction_coeffs;
        cn * (p.r - self.horizons.r_neg).ln() + cm * p.dm.ln() + cp * p.dp.ln()
    }

    pub fn x_of_point(&self, p: &RadialPoint) -> f64 {
        self.x_raw(p) - self.tortoise.offset
    }

    /// Tortoise coordinate; r must lie strictly between the horizons.
    pub fn tortoise_x(&self, r: f64) -> Result<f64> {
        if !(r > self.horizons.r_minus && r < self.horizons.r_plus) {
            return Err(LabError::DomainError(format!("r = {r} outside (r_minus, r_plus)")));
        }
        Ok(self.x_of_point(&self.point_from_r(r)))
    }

    /// x − (1/2κ₋)ln(r − r_minus) at r = r_minus.
    pub fn x_reg_minus(&self) -> f64 {
        let [cn, _, cp] = self.tortoise.partial_fraction_coeffs;
        let h = &self.horizons;
        cn * (h.r_minus - h.r_neg).ln() + cp * (h.r_plus - h.r_minus).ln() - self.tortoise.offset
    }

    /// x + (1/2κ₊)ln(r_plus − r) at r = r_plus.
    pub fn x_reg_plus(&self) -> f64 {
        let [cn, cm, _] = self.tortoise.partial_fraction_coeffs;
        let h = &self.horizons;
        cn * (h.r_plus - h.r_neg).ln() + cm * (h.r_plus - h.r_minus).ln() - self.tortoise.offset
    }

    fn point_from_logit(&self, y: f64) -> RadialPoint {
        let l = self.horizons.r_plus - self.horizons.r_minus;
        let (dm, dp) = if y <= 0.0 {
            let e = y.exp();
            (l * e / (1.0 + e), l / (1.0 + e))
        } else {
            let e = (-y).exp();
            (l / (1.0 + e), l * e / (1.0 + e))
        };
        let r = if dm < dp { self.horizons.r_minus + dm } else { self.horizons.r_plus - dp };
        RadialPoint { r, dm, dp }
    }

    fn x_of_logit(&self, y: f64) -> (f64, f64) {
        let l = self.horizons.r_plus - self.horizons.r_minus;
        let [cn, cm, cp] = self.tortoise.partial_fraction_coeffs;
        let p = self.point_from_logit(y);
        let sp = |z: f64| if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
        let ln_dm = l.ln() - sp(-y);
        let ln_dp = l.ln() - sp(y);
        let x = cn * (p.r - self.horizons.r_neg).ln() + cm * ln_dm + cp * ln_dp - self.tortoise.offset;
        let dxdy = 3.0 * p.r / (self.params.lambda * (p.r - self.horizons.r_neg) * l);
        (x, dxdy)
    }

    /// Inverse tortoise map with horizon offsets; Newton in the logit variable with bracketing.
    pub fn point_from_x(&self, x: f64) -> Result<RadialPoint> {
        if !x.is_finite() {
            return Err(LabError::DomainError(format!("x = {x} not finite")));
        }
        let cm = self.tortoise.partial_fraction_coeffs[1];
        let cp = -self.tortoise.partial_fraction_coeffs[2];
        let guess = if x < 0.0 { x / cm } else { x / cp };
        let (mut a, mut b) = (guess - 1.0, guess + 1.0);
        let mut k = 0;
        while self.x_of_logit(a).0 > x {
            a -= 2f64.powi(k);
            k += 1;
            if k > 60 {
                return Err(LabError::NonConvergence("tortoise bracket".into()));
            }
        }
        k = 0;
        while self.x_of_logit(b).0 < x {
            b += 2f64.powi(k);
            k += 1;
            if k > 60 {
                return Err(LabError::NonConvergence("tortoise bracket".into()));
            }
        }
        let y = newton_bracketed(
            |y| {
                let (v, d) = self.x_of_logit(y);
                (v - x, d)
            },
            a,
            b,
            guess,
            1e-15,
            200,
        )?;
        Ok(self.point_from_logit(y))
    }

    pub fn radius_from_x(&self, x: f64) -> Result<f64> {
        Ok(self.point_from_x(x)?.r)
    }

    /// ∂_x r = Δ_r/r².
    pub fn dr_dx(&self, p: &RadialPoint) -> f64 {
        self.delta_at(p) / (p.r * p.r)
    }

    /// W_ℓ = Δ_r ℓ(ℓ+1)/r² + (∂_x²r)/r + m²Δ_r at a radial point.
    pub fn potential_at(&self, ell: u32, p: &RadialPoint) -> f64 {
        let r = p.r;
        let d = self.delta_at(p);
        let dp = self.delta_r_prime(r);
        let l = ell as f64;
        let d2r = d / (r * r) * (dp / (r * r) - 2.0 * d / (r * r * r));
        d * l * (l + 1.0) / (r * r) + d2r / r + self.params.m_field * self.params.m_field * d
    }

    /// The ℓ-independent part V = (∂_x²r)/r + m²Δ_r.
    pub fn v_potential_at(&self, p: &RadialPoint) -> f64 {
        self.potential_at(0, p)
    }

    pub fn mode_potential(&self, ell: u32, x: f64) -> Result<f64> {
        Ok(self.potential_at(ell, &self.point_from_x(x)?))
    }
}

/// Uniformly tabulated W_ℓ(x) with cubic interpolation; zero outside the table.
#[derive(Debug, Clone)]
pub struct PotentialTable {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
    /// Exponential decay rates used beyond the left and right ends.
    pub tail_rates: (f64, f64),
}

impl PotentialTable {
    pub fn new(geom: &SdSGeometry, ell: u32, x_lo: f64, x_hi: f64, dx: f64) -> Result<Self> {
        let n = ((x_hi - x_lo) / dx).ceil() as usize + 1;
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            values.push(geom.mode_potential(ell, x_lo + i as f64 * dx)?);
        }
        let tail_rates = (2.0 * geom.kappa_minus(), 2.0 * geom.kappa_plus());
        Ok(Self { x0: x_lo, dx, values, tail_rates })
    }

    pub fn zero() -> Self {
        Self { x0: 0.0, dx: 1.0, values: vec![0.0; 4], tail_rates: (0.0, 0.0) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let end = self.x0 + (self.values.len() - 1) as f64 * self.dx;
        if x < self.x0 || x > end {
            let edge = if x < self.x0 { self.values[0] } else { *self.values.last().unwrap() };
            if edge == 0.0 {
                return 0.0;
            }
            return self.tail(x);
        }
        crate::numerics::interp_uniform(self.x0, self.dx, &self.values, x)
    }

    fn tail(&self, x: f64) -> f64 {
        let n = self.values.len();
        let (xa, va, rate) = if x < self.x0 {
            (self.x0, self.values[0], self.tail_rates.0)
        } else {
            (self.x0 + (n - 1) as f64 * self.dx, self.values[n - 1], self.tail_rates.1)
        };
        va * (-rate * (x - xa).abs()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical() -> SdSGeometry {
        SdSGeometry::new(SdSParams::new(1.0, 0.04, 0.5).unwrap()).unwrap()
    }

    #[test]
    fn canonical_roots_and_gravities() {
        let g = canonical();
        let h = g.horizons;
        assert!((h.r_minus - 2.128_592_75).abs() < 1e-7);
        assert!((h.r_plus - 7.397_489_47).abs() < 1e-7);
        assert!((h.r_neg + 9.526_082_22).abs() < 1e-7);
        assert!((h.kappa_minus - 0.192_325_121_49).abs() < 1e-9);
        assert!((h.kappa_plus - 0.080_359_291_09).abs() < 1e-9);
        assert!((h.r_neg + h.r_minus + h.r_plus).abs() < 1e-12);
    }

    #[test]
    fn partial_fraction_coefficient_at_r_minus_is_inverse_two_kappa() {
        let g = canonical();
        let c = g.tortoise.partial_fraction_coeffs;
        assert!((c[1] - 0.5 / g.kappa_minus()).abs() < 1e-12);
        assert!((c[2] + 0.5 / g.kappa_plus()).abs() < 1e-12);
    }

    #[test]
    fn subextremal_rejected() {
        let err = SdSParams::new(1.0, 1.2 / 9.0, 0.5).unwrap_err();
        assert!(matches!(err, LabError::SubextremalViolation(_)));
    }

    #[test]
    fn factored_delta_matches_polynomial() {
        let g = canonical();
        for i in 1..100 {
            let r = g.r_minus() + (g.r_plus() - g.r_minus()) * i as f64 / 100.0;
            let p = g.point_from_r(r);
            assert!((g.delta_at(&p) - g.delta_r(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn anchor_is_zero_and_inverse_is_accurate_near_horizons() {
        let g = canonical();
        assert_eq!(g.tortoise_x(g.tortoise.anchor_radius).unwrap(), 0.0);
        for &x in &[-300.0, -60.0, 60.0, 300.0] {
            let p = g.point_from_x(x).unwrap();
            assert!((g.x_of_point(&p) - x).abs() < 1e-10 * x.abs().max(1.0));
            assert!(p.dm > 0.0 && p.dp > 0.0);
        }
    }

    #[test]
    fn outside_domain_is_error() {
        let g = canonical();
        assert!(g.tortoise_x(1.0).is_err());
        assert!(g.tortoise_x(8.0).is_err());
    }

    #[test]
    fn potential_table_matches_direct() {
        let g = canonical();
        let t = PotentialTable::new(&g, 1, -20.0, 20.0, 0.01).unwrap();
        for &x in &[-13.337, 0.1234, 17.9] {
            let w = g.mode_potential(1, x).unwrap();
            assert!((t.eval(x) - w).abs() < 1e-9);
        }
        let far = g.mode_potential(1, 30.0).unwrap();
        assert!((t.eval(30.0) - far).abs() < 0.2 * far);
    }
}
