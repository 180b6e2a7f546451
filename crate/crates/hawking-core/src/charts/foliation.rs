//! Horizon-penetrating foliation t̂ = t − F_K(r) and the reflected-ray coordinate r̂.

use crate::error::{LabError, Result};
use crate::geometry::{RadialPoint, SdSGeometry};
use crate::numerics::{bisect, smooth_step, GaussRule};

/// Tunable shape of the foliation outside K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliationSettings {
    /// Fraction of the gap between K and each horizon used by the cutoff transition.
    pub transition_fraction: f64,
    /// Value −a(r_plus) > 0 of the profile on the cosmological side.
    pub a_plus: f64,
    /// Lower bound on r²/Δ_r − |F_K′| enforced on the validation grid.
    pub margin: f64,
    /// Number of validation radii.
    pub validation_points: usize,
}

impl Default for FoliationSettings {
    fn default() -> Self {
        Self { transition_fraction: 0.35, a_plus: 1.0, margin: 1e-3, validation_points: 10_000 }
    }
}

/// Cumulative Gauss-Legendre table of ∫ρ·r²/Δ_r and ∫ρ over one transition zone.
#[derive(Debug, Clone)]
struct TransitionTable {
    lo: f64,
    hi: f64,
    panel: f64,
    /// Integrals from `lo` to panel edge k.
    cum_q: Vec<f64>,
    cum_rho: Vec<f64>,
}

const PANELS: usize = 400;

impl TransitionTable {
    fn new<R: Fn(f64) -> f64, Q: Fn(f64) -> f64>(lo: f64, hi: f64, rho: &R, q: &Q, rule: &GaussRule) -> Self {
        let panel = (hi - lo) / PANELS as f64;
        let mut cum_q = vec![0.0; PANELS + 1];
        let mut cum_rho = vec![0.0; PANELS + 1];
        for k in 0..PANELS {
            let a = lo + k as f64 * panel;
            let b = a + panel;
            cum_q[k + 1] = cum_q[k] + rule.integrate(|r| rho(r) * q(r), a, b);
            cum_rho[k + 1] = cum_rho[k] + rule.integrate(rho, a, b);
        }
        Self { lo, hi, panel, cum_q, cum_rho }
    }

    /// (∫_lo^r ρq, ∫_lo^r ρ).
    fn partial<R: Fn(f64) -> f64, Q: Fn(f64) -> f64>(&self, r: f64, rho: &R, q: &Q, rule: &GaussRule) -> (f64, f64) {
        let r = r.clamp(self.lo, self.hi);
        let k = (((r - self.lo) / self.panel).floor() as usize).min(PANELS - 1);
        let a = self.lo + k as f64 * self.panel;
        let iq = self.cum_q[k] + rule.integrate(|s| rho(s) * q(s), a, r);
        let ir = self.cum_rho[k] + rule.integrate(rho, a, r);
        (iq, ir)
    }

    fn total(&self) -> (f64, f64) {
        (self.cum_q[PANELS], self.cum_rho[PANELS])
    }
}

/// F_K with F_K′ = ρ(σ r²/Δ_r + a): a ≡ s on the black-hole side (s shot so μ_K(r_minus) = 0)
/// and a ≡ −a_plus on the cosmological side.
#[derive(Debug, Clone)]
pub struct FoliationChart {
    pub geom: SdSGeometry,
    pub k_lo: f64,
    pub k_hi: f64,
    /// ρ = 1 for r ≤ r_a and r ≥ r_b.
    pub r_a: f64,
    pub r_b: f64,
    /// Shooting parameter; equals λ_K′(r_minus).
    pub shooting_param: f64,
    pub a_plus: f64,
    pub lambda_k_minus: f64,
    pub lambda_k_plus: f64,
    pub mu_k_minus: f64,
    pub mu_k_plus: f64,
    pub margin: f64,
    /// Smallest r²/Δ_r − |F_K′| observed on the validation grid.
    pub min_gap: f64,
    table_minus: TransitionTable,
    table_plus: TransitionTable,
    rule: GaussRule,
}

impl FoliationChart {
    fn rho(&self, r: f64) -> f64 {
        rho_profile(r, self.r_a, self.k_lo, self.k_hi, self.r_b)
    }

    fn q(&self, r: f64) -> f64 {
        let p = self.geom.point_from_r(r);
        r * r / self.geom.delta_at(&p)
    }

    pub fn lambda_prime_minus(&self) -> f64 {
        self.shooting_param
    }

    pub fn lambda_prime_plus(&self) -> f64 {
        -self.a_plus
    }

    /// F_K′(r).
    pub fn f_prime(&self, r: f64) -> f64 {
        let rho = self.rho(r);
        if rho == 0.0 {
            return 0.0;
        }
        let q = self.q(r);
        if r < self.k_lo {
            rho * (-q + self.shooting_param)
        } else {
            rho * (q - self.a_plus)
        }
    }

    /// dt̂/dt along a curve moving with dx/dt = ż, given 1 + ż; free of horizon cancellation.
    pub fn t_hat_rate(&self, p: &RadialPoint, one_plus_zdot: f64) -> f64 {
        let rho = self.rho(p.r);
        let zdot = one_plus_zdot - 1.0;
        let w = self.geom.dr_dx(p);
        if p.r < self.k_lo {
            (1.0 - rho) + rho * one_plus_zdot - rho * self.shooting_param * w * zdot
        } else {
            (1.0 - rho) + rho * (1.0 - zdot) + rho * self.a_plus * w * zdot
        }
    }

    /// F_K at a radial point; closed form where ρ = 1, tabulated quadrature in the transitions.
    pub fn f_k_point(&self, p: &RadialPoint) -> f64 {
        let r = p.r;
        let g = &self.geom;
        if r <= self.r_a {
            -g.x_of_point(p) + self.lambda_k_minus + self.shooting_param * p.dm
        } else if r < self.k_lo {
            let rho = |s: f64| self.rho(s);
            let q = |s: f64| self.q(s);
            let (iq_tot, ir_tot) = self.table_minus.total();
            let (iq, ir) = self.table_minus.partial(r, &rho, &q, &self.rule);
            // F(r) = −∫_r^{k_lo} ρ(−q + s)
            (iq_tot - iq) - self.shooting_param * (ir_tot - ir)
        } else if r <= self.k_hi {
            0.0
        } else if r < self.r_b {
            let rho = |s: f64| self.rho(s);
            let q = |s: f64| self.q(s);
            let (iq, ir) = self.table_plus.partial(r, &rho, &q, &self.rule);
            iq - self.a_plus * ir
        } else {
            g.x_of_point(p) + self.lambda_k_plus + self.a_plus * p.dp
        }
    }

    pub fn f_k(&self, r: f64) -> f64 {
        self.f_k_point(&self.geom.point_from_r(r))
    }

    pub fn f_k_of_x(&self, x: f64) -> Result<f64> {
        Ok(self.f_k_point(&self.geom.point_from_x(x)?))
    }

    /// λ_K = F_K + x, the regular part on the black-hole side.
    pub fn lambda_minus_at(&self, p: &RadialPoint) -> f64 {
        self.f_k_point(p) + self.geom.x_of_point(p)
    }

    /// λ_K = F_K − x, the regular part on the cosmological side.
    pub fn lambda_plus_at(&self, p: &RadialPoint) -> f64 {
        self.f_k_point(p) - self.geom.x_of_point(p)
    }

    /// t̂ = t − F_K(r).
    pub fn t_hat(&self, t: f64, p: &RadialPoint) -> f64 {
        t - self.f_k_point(p)
    }

    /// γ(t̂, r) = (−t̂ − 2F_K(r), r).
    pub fn gamma_reflect(&self, t_hat: f64, r: f64) -> (f64, f64) {
        (-t_hat - 2.0 * self.f_k(r), r)
    }

    /// r̂ = x + F_K(r(x)) + t̂_B.
    pub fn r_hat(&self, t_hat_b: f64, x: f64) -> Result<f64> {
        let p = self.geom.point_from_x(x)?;
        Ok(x + self.f_k_point(&p) + t_hat_b)
    }

    /// r̂ in the black-hole cutoff zone, continued smoothly across r_minus: s·(r − r_minus).
    pub fn r_hat_near_horizon(&self, dm: f64) -> f64 {
        self.shooting_param * dm
    }

    /// Radius with r̂(r) = value; below the transition the relation is linear and extends inside r_minus.
    pub fn radius_from_r_hat(&self, t_hat_b: f64, value: f64) -> Result<f64> {
        let g = &self.geom;
        let ra = g.point_from_r(self.r_a);
        let rhat_a = g.x_of_point(&ra) + self.f_k_point(&ra) + t_hat_b;
        if value <= rhat_a {
            return Ok(g.r_minus() + value / self.shooting_param);
        }
        let x_a = g.x_of_point(&ra);
        let mut hi = x_a + 1.0;
        while self.r_hat(t_hat_b, hi)? < value {
            hi += 2.0 * (hi - x_a);
            if hi > 1e4 {
                return Err(LabError::OutOfRange(format!("r_hat = {value}")));
            }
        }
        let x = bisect(|x| self.r_hat(t_hat_b, x).unwrap() - value, x_a, hi, 1e-14, 200)?;
        g.radius_from_x(x)
    }

    /// Smallest r²/Δ_r − |F_K′| on a uniform radial grid of `n` interior points.
    pub fn spacelike_gap_scan(&self, n: usize) -> (f64, f64) {
        scan_gap(self, n)
    }

    /// max |(∂_x φ)² − (∂_t φ)²| for φ = t̂ + r̂ at t = 0 over the tortoise points `xs`, with
    /// Richardson-extrapolated centred differences of step d (∂_r·Δ_r/r² = ∂_x).
    pub fn eikonal_residual(&self, t_hat_b: f64, xs: &[f64], d: f64) -> Result<f64> {
        let phi = |t: f64, x: f64| -> Result<f64> {
            let p = self.geom.point_from_x(x)?;
            Ok(self.t_hat(t, &p) + self.r_hat(t_hat_b, x)?)
        };
        let mut worst: f64 = 0.0;
        for &x in xs {
            let dx = |e: f64| -> Result<f64> { Ok((phi(0.0, x + e)? - phi(0.0, x - e)?) / (2.0 * e)) };
            let dt = |e: f64| -> Result<f64> { Ok((phi(e, x)? - phi(-e, x)?) / (2.0 * e)) };
            let px = (4.0 * dx(0.5 * d)? - dx(d)?) / 3.0;
            let pt = (4.0 * dt(0.5 * d)? - dt(d)?) / 3.0;
            worst = worst.max((px * px - pt * pt).abs());
        }
        Ok(worst)
    }
}

fn rho_profile(r: f64, r_a: f64, k_lo: f64, k_hi: f64, r_b: f64) -> f64 {
    if r <= r_a || r >= r_b {
        1.0
    } else if r < k_lo {
        1.0 - smooth_step((r - r_a) / (k_lo - r_a))
    } else if r <= k_hi {
        0.0
    } else {
        smooth_step((r - k_hi) / (r_b - k_hi))
    }
}

fn scan_gap(chart: &FoliationChart, n: usize) -> (f64, f64) {
    let g = &chart.geom;
    let (a, b) = (g.r_minus(), g.r_plus());
    let mut worst = (f64::INFINITY, a);
    for i in 0..n {
        let r = a + (b - a) * (i as f64 + 0.5) / n as f64;
        let gap = chart.q(r) - chart.f_prime(r).abs();
        if gap < worst.0 {
            worst = (gap, r);
        }
    }
    worst
}

/// Builds the foliation for K = [k_lo, k_hi], shooting the black-hole side amplitude so μ_K(r_minus) = 0.
pub fn build_foliation(geom: &SdSGeometry, k: (f64, f64), settings: FoliationSettings) -> Result<FoliationChart> {
    let (k_lo, k_hi) = k;
    let (rm, rp) = (geom.r_minus(), geom.r_plus());
    if !(rm < k_lo && k_lo < k_hi && k_hi < rp) {
        return Err(LabError::InvalidParameter(format!("K = [{k_lo}, {k_hi}] not inside ({rm}, {rp})")));
    }
    if !(settings.transition_fraction > 0.0 && settings.transition_fraction < 1.0) {
        return Err(LabError::InvalidParameter("transition_fraction must lie in (0, 1)".into()));
    }
    let r_a = k_lo - settings.transition_fraction * (k_lo - rm);
    let r_b = k_hi + settings.transition_fraction * (rp - k_hi);
    let rule = GaussRule::new(12);
    let rho = |r: f64| rho_profile(r, r_a, k_lo, k_hi, r_b);
    let q = |r: f64| {
        let p = geom.point_from_r(r);
        r * r / geom.delta_at(&p)
    };
    let table_minus = TransitionTable::new(r_a, k_lo, &rho, &q, &rule);
    let table_plus = TransitionTable::new(k_hi, r_b, &rho, &q, &rule);

    let pa = geom.point_from_r(r_a);
    let x_a = geom.x_of_point(&pa);
    let x_reg = geom.x_reg_minus();
    let (iq_m, ir_m) = table_minus.total();
    // λ_K(r_minus) = F(r_a) + x(r_a) − s(r_a − r_minus), F(r_a) = I_q − s I_ρ.
    let lambda_minus = |s: f64| iq_m - s * ir_m + x_a - s * pa.dm;
    let mu = |s: f64| lambda_minus(s) - x_reg;
    let s_max = 2.0 * q(r_a) * (1.0 - settings.margin);
    if !(mu(0.0) > 0.0 && mu(s_max) < 0.0) {
        return Err(LabError::ShootingFailure(format!(
            "mu(0) = {}, mu(s_max) = {}: no admissible amplitude",
            mu(0.0),
            mu(s_max)
        )));
    }
    let s = bisect(mu, 0.0, s_max, 1e-15, 400)?;
    let lambda_k_minus = lambda_minus(s);
    let mu_k_minus = mu(s);

    let pb = geom.point_from_r(r_b);
    let (iq_p, ir_p) = table_plus.total();
    let f_b = iq_p - settings.a_plus * ir_p;
    let lambda_k_plus = f_b - geom.x_of_point(&pb) - settings.a_plus * pb.dp;
    let mu_k_plus = lambda_k_plus - geom.x_reg_plus();

    let mut chart = FoliationChart {
        geom: *geom,
        k_lo,
        k_hi,
        r_a,
        r_b,
        shooting_param: s,
        a_plus: settings.a_plus,
        lambda_k_minus,
        lambda_k_plus,
        mu_k_minus,
        mu_k_plus,
        margin: settings.margin,
        min_gap: f64::INFINITY,
        table_minus,
        table_plus,
        rule,
    };
    let (gap, r_worst) = scan_gap(&chart, settings.validation_points);
    chart.min_gap = gap;
    if gap < settings.margin {
        return Err(LabError::SpacelikeViolation { r: r_worst, gap });
    }
    Ok(chart)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SdSParams;

    fn chart() -> FoliationChart {
        let g = SdSGeometry::new(SdSParams::new(1.0, 0.04, 0.5).unwrap()).unwrap();
        build_foliation(&g, (3.0, 6.5), FoliationSettings::default()).unwrap()
    }

    #[test]
    fn vanishes_on_k_and_is_continuous() {
        let c = chart();
        assert_eq!(c.f_k(4.75), 0.0);
        for &r in &[c.r_a, c.k_lo, c.k_hi, c.r_b] {
            let e = 1e-9;
            assert!((c.f_k(r - e) - c.f_k(r + e)).abs() < 1e-7, "jump at {r}");
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let c = chart();
        for &r in &[2.3, 2.75, 2.95, 6.6, 6.9, 7.2] {
            let h = 1e-6;
            let fd = (c.f_k(r + h) - c.f_k(r - h)) / (2.0 * h);
            assert!((fd - c.f_prime(r)).abs() < 1e-5 * c.f_prime(r).abs().max(1.0), "r = {r}");
        }
    }

    #[test]
    fn lambda_signs_and_mu() {
        let c = chart();
        assert!(c.lambda_prime_minus() > 0.0 && c.lambda_prime_plus() < 0.0);
        assert!(c.mu_k_minus.abs() < 1e-8);
        assert!(c.min_gap >= c.margin);
    }

    #[test]
    fn level_sets_of_t_hat_plus_r_hat_are_null() {
        let c = chart();
        let xs: Vec<f64> = (0..=60).map(|k| -30.0 + k as f64).collect();
        assert!(c.eikonal_residual(0.3, &xs, 1e-3).unwrap() <= 1e-8);
    }

    #[test]
    fn infeasible_transition_is_reported() {
        let g = SdSGeometry::new(SdSParams::new(1.0, 0.04, 0.5).unwrap()).unwrap();
        let s = FoliationSettings { transition_fraction: 0.95, ..Default::default() };
        let r = build_foliation(&g, (2.6, 6.5), s);
        assert!(matches!(r, Err(LabError::ShootingFailure(_))));
    }
}
