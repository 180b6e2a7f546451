//! Convergence fits for the two approximation estimates on symbols f ∈ S^{−δ}:
//!
//! - quadratic argument shift: F_h(y) = χ(y)(f((y + y²ζ(y))/h) − f(y/h)) with ‖F_h‖_{H^{1/2}} = O(h^δ),
//!   and G_h(y) = χ(y)f((y + y²ζ(y))/h) with ‖G_h‖_{H^{−1/2}} = O(h^δ);
//! - inner cutoff: F_{ℓ,h}(x) = χ₀(x)ρ(x/(ℓh))f(x/h) with ‖F_{ℓ,h}‖_{H^{1/2}} = O(h^{δ/2}) + O(ℓ^{−δ/2}).
//!
//! Norms are computed on uniform grids through [`sobolev_norm`].

use crate::error::{LabError, Result};
use crate::evolution::norms::sobolev_norm;
use crate::numerics::{linear_fit, smooth_step};

/// Test symbol ⟨y⟩^{−δ}(1 + tanh(y)/2).
pub fn test_symbol(delta: f64) -> impl Fn(f64) -> f64 + Copy {
    move |y: f64| (1.0 + y * y).powf(-0.5 * delta) * (1.0 + 0.5 * y.tanh())
}

/// χ = 1 on [0, 1/2], 0 beyond 1.
fn chi(y: f64) -> f64 {
    1.0 - smooth_step(2.0 * y - 1.0)
}

/// χ₀ = 1 on |x| ≤ 1/2, 0 for |x| ≥ 1.
fn chi_0(x: f64) -> f64 {
    chi(x.abs())
}

/// ρ = 0 on |t| ≤ 1, 1 for |t| ≥ 2.
fn rho(t: f64) -> f64 {
    smooth_step(t.abs() - 1.0)
}

/// sup_y ⟨y⟩^{δ+α}|∂^α f(y)| for α = 0, 1, 2 over |y| ≤ y_max; `FitRejected` when the weighted
/// derivative on the outer two decades exceeds 1.2 times its sup on the two decades before.
pub fn symbol_class_check<F: Fn(f64) -> f64>(f: F, delta: f64, y_max: f64) -> Result<[f64; 3]> {
    let n = 4000;
    let mut inner = [0.0f64; 3];
    let mut mid = [0.0f64; 3];
    let mut outer = [0.0f64; 3];
    for k in 0..=n {
        // log-spaced |y| from 1e−3 to y_max, both signs
        let a = 1e-3 * (y_max / 1e-3).powf(k as f64 / n as f64);
        for y in [a, -a] {
            let e = 1e-3 * (1.0 + y.abs());
            let d = [f(y), (f(y + e) - f(y - e)) / (2.0 * e), (f(y + e) - 2.0 * f(y) + f(y - e)) / (e * e)];
            for (alpha, dv) in d.iter().enumerate() {
                let w = (1.0 + y * y).powf(0.5 * (delta + alpha as f64)) * dv.abs();
                if !w.is_finite() {
                    return Err(LabError::FitRejected(format!("non-finite derivative of order {alpha} at {y}")));
                }
                if y.abs() >= 1e-2 * y_max {
                    outer[alpha] = outer[alpha].max(w);
                } else {
                    if y.abs() >= 1e-4 * y_max {
                        mid[alpha] = mid[alpha].max(w);
                    }
                    inner[alpha] = inner[alpha].max(w);
                }
            }
        }
    }
    for alpha in 0..3 {
        if outer[alpha] > 1.2 * mid[alpha] + 1e-12 {
            return Err(LabError::FitRejected(format!(
                "order {alpha}: weighted derivative grows to {} from {}",
                outer[alpha], mid[alpha]
            )));
        }
    }
    Ok([0, 1, 2].map(|a| inner[a].max(outer[a])))
}

/// Log-log slope of norms against a parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub params: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
    pub r_squared: f64,
}

fn fit(params: Vec<f64>, norms: Vec<f64>) -> Result<SlopeFit> {
    if norms.iter().any(|n| !(*n > 0.0 && n.is_finite())) {
        return Err(LabError::FitRejected(format!("norms {norms:?}")));
    }
    let lx: Vec<f64> = params.iter().map(|p| p.ln()).collect();
    let ly: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let lf = linear_fit(&lx, &ly);
    Ok(SlopeFit { params, norms, slope: lf.slope, r_squared: lf.r_squared })
}

/// Grid points per unit of the finest scale h.
const POINTS_PER_SCALE: f64 = 10.0;

/// Samples of g on [a, b] with spacing h/POINTS_PER_SCALE.
fn samples<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, h: f64) -> (Vec<f64>, f64) {
    let dx = h / POINTS_PER_SCALE;
    let n = ((b - a) / dx).ceil() as usize + 1;
    ((0..n).map(|k| g(a + k as f64 * dx)).collect(), dx)
}

/// ‖F_h‖_{H^{1/2}} and ‖G_h‖_{H^{−1/2}} for one h.
pub fn shifted_norms<F: Fn(f64) -> f64, Z: Fn(f64) -> f64>(f: &F, zeta: &Z, h: f64) -> Result<(f64, f64)> {
    let arg = |y: f64| y + y * y * zeta(y);
    let big_f = |y: f64| if y <= 0.0 { 0.0 } else { chi(y) * (f(arg(y) / h) - f(y / h)) };
    let big_g = |y: f64| if y <= 0.0 { 0.0 } else { chi(y) * f(arg(y) / h) };
    let (vf, dx) = samples(big_f, -0.5, 1.5, h);
    let (vg, _) = samples(big_g, -0.5, 1.5, h);
    Ok((sobolev_norm(&vf, dx, 0.5)?, sobolev_norm(&vg, dx, -0.5)?))
}

/// Slopes in h of ‖F_h‖_{H^{1/2}} and ‖G_h‖_{H^{−1/2}}.
pub fn shifted_fit<F: Fn(f64) -> f64, Z: Fn(f64) -> f64>(f: F, zeta: Z, delta: f64, hs: &[f64]) -> Result<(SlopeFit, SlopeFit)> {
    symbol_class_check(&f, delta, 1e4)?;
    let mut nf = Vec::with_capacity(hs.len());
    let mut ng = Vec::with_capacity(hs.len());
    for &h in hs {
        let (a, b) = shifted_norms(&f, &zeta, h)?;
        nf.push(a);
        ng.push(b);
    }
    Ok((fit(hs.to_vec(), nf)?, fit(hs.to_vec(), ng)?))
}

/// ‖F_{ℓ,h}‖_{H^{1/2}}.
pub fn cutoff_norm<F: Fn(f64) -> f64>(f: &F, ell: f64, h: f64) -> Result<f64> {
    let g = |x: f64| chi_0(x) * rho(x / (ell * h)) * f(x / h);
    let (v, dx) = samples(g, -1.5, 1.5, h);
    sobolev_norm(&v, dx, 0.5)
}

/// Slope in ℓ of ‖F_{ℓ,h}‖_{H^{1/2}} at fixed h; the decay rate is −slope.
pub fn cutoff_fit<F: Fn(f64) -> f64>(f: F, delta: f64, h: f64, ells: &[f64]) -> Result<SlopeFit> {
    symbol_class_check(&f, delta, 1e4)?;
    let norms = ells.iter().map(|&l| cutoff_norm(&f, l, h)).collect::<Result<Vec<_>>>()?;
    fit(ells.to_vec(), norms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shift_gives_zero() {
        let f = test_symbol(0.3);
        let (a, _) = shifted_norms(&f, &|_| 0.0, 1e-2).unwrap();
        assert_eq!(a, 0.0);
    }

    #[test]
    fn symbol_check_accepts_the_test_symbol_and_rejects_growth() {
        assert!(symbol_class_check(test_symbol(0.3), 0.3, 1e4).is_ok());
        // ⟨y⟩^{−0.1} is not in S^{−0.3}
        assert!(matches!(symbol_class_check(|y: f64| (1.0 + y * y).powf(-0.05), 0.3, 1e4), Err(LabError::FitRejected(_))));
    }

    #[test]
    fn shifted_norms_decay_at_least_like_h_delta() {
        let delta = 0.3;
        let (ff, fg) = shifted_fit(test_symbol(delta), |_| 0.5, delta, &[1e-1, 3e-2, 1e-2, 3e-3, 1e-3]).unwrap();
        assert!(ff.slope >= 0.8 * delta, "{ff:?}");
        assert!(fg.slope >= 0.8 * delta, "{fg:?}");
    }

    #[test]
    fn cutoff_norm_decays_in_ell() {
        let delta = 0.3;
        let fit = cutoff_fit(test_symbol(delta), delta, 1e-3, &[2.0, 4.0, 8.0, 16.0, 32.0]).unwrap();
        assert!(-fit.slope >= 0.8 * 0.5 * delta, "{fit:?}");
    }
}
