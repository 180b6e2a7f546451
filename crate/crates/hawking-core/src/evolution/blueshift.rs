//! Near-horizon log-profile of a backward free evolution on slices t̂ = T − τ.

use super::norms::sobolev_norm;
use super::radiation::RadiationField;
use crate::charts::FoliationChart;
use crate::error::Result;
use crate::numerics::smooth_step;

/// Space-time points (t, x) of the slice t̂ = t_hat at radii r_minus + δ_k, with the radii.
pub fn slice_points(chart: &FoliationChart, t_hat: f64, deltas: &[f64]) -> Result<(Vec<f64>, Vec<(f64, f64)>)> {
    let g = &chart.geom;
    let mut radii = Vec::with_capacity(deltas.len());
    let mut pts = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let r = g.r_minus() + d;
        let p = g.point_from_r(r);
        radii.push(r);
        pts.push((t_hat + chart.f_k_point(&p), g.x_of_point(&p)));
    }
    Ok((radii, pts))
}

/// Log-spaced offsets r − r_minus from `lo` to `hi`.
pub fn log_offsets(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// u₋(σ) := u*₋(σ + 2x_reg − λ_K(r_minus)), the profile in the variable κ₋⁻¹ln((r − r_minus)/h).
pub fn u_minus_profile(chart: &FoliationChart, u_star: &RadiationField, sigma: f64) -> f64 {
    u_star.eval(sigma + 2.0 * chart.geom.x_reg_minus() - chart.lambda_k_minus)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlueshiftError {
    pub tau: f64,
    pub h: f64,
    pub sup_error: f64,
    pub h_half_error: f64,
    /// ℓ(ℓ+1)·‖χ₋u‖_{L²(dr)} on the slice.
    pub angular_norm: f64,
}

/// Compares χ₋u on the slice t̂ = T − τ with u₋(κ₋⁻¹ln((r − r_minus)/h)), h = e^{−κ₋τ}.
/// `values[k]` is u at radius `radii[k]` on the slice (increasing radii); χ₋ = 1 up to r_a and
/// vanishes smoothly at k_lo.
pub fn blueshift_profile_error(
    chart: &FoliationChart,
    u_star: &RadiationField,
    tau: f64,
    radii: &[f64],
    values: &[f64],
    ell: u32,
) -> Result<BlueshiftError> {
    let g = &chart.geom;
    let kappa = g.kappa_minus();
    let h = (-kappa * tau).exp();
    let chi = |r: f64| 1.0 - smooth_step((r - chart.r_a) / (chart.k_lo - chart.r_a));
    let mut diff = Vec::with_capacity(radii.len());
    let mut sup: f64 = 0.0;
    for (&r, &u) in radii.iter().zip(values) {
        let sigma = ((r - g.r_minus()) / h).ln() / kappa;
        let d = chi(r) * (u - u_minus_profile(chart, u_star, sigma));
        sup = sup.max(d.abs());
        diff.push(d);
    }
    let (a, b) = (g.r_minus(), chart.k_lo);
    let n = 8192;
    let dr = (b - a) / (n - 1) as f64;
    let mut uniform = vec![0.0; n];
    let mut chi_u = vec![0.0; n];
    for k in 1..n {
        let r = a + k as f64 * dr;
        if r < radii[0] || r > radii[radii.len() - 1] {
            continue;
        }
        uniform[k] = crate::numerics::interp_nodes(radii, &diff, r);
        chi_u[k] = chi(r) * crate::numerics::interp_nodes(radii, values, r);
    }
    let h_half_error = sobolev_norm(&uniform, dr, 0.5)?;
    let l2: f64 = chi_u.iter().map(|v| v * v).sum::<f64>() * dr;
    let l = ell as f64;
    Ok(BlueshiftError { tau, h, sup_error: sup, h_half_error, angular_norm: l * (l + 1.0) * l2.sqrt() })
}
