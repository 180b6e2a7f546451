//! Energies and Fourier-weighted Sobolev norms.

use super::grid::ModeState;
use crate::error::{LabError, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// ∫(v_t² + v_x² + W v²)dx by the trapezoid rule with centred v_x (uniform grids).
pub fn energy(state: &ModeState, w: &[f64]) -> f64 {
    let n = state.v.len();
    if n < 3 {
        return 0.0;
    }
    let dx = state.grid.spacing();
    let mut vals = vec![0.0; n];
    for i in 0..n {
        let vx = if i == 0 {
            (state.v[1] - state.v[0]) / dx
        } else if i == n - 1 {
            (state.v[n - 1] - state.v[n - 2]) / dx
        } else {
            (state.v[i + 1] - state.v[i - 1]) / (2.0 * dx)
        };
        vals[i] = state.v_t[i] * state.v_t[i] + vx * vx + w[i] * state.v[i] * state.v[i];
    }
    crate::numerics::trapezoid(&vals, dx)
}

/// Squared Fourier weights: returns |f̂(ξ_k)|² (times dξ/2π) and ξ_k for zero-padded samples.
pub fn power_spectrum(samples: &[f64], dx: f64, pad_factor: usize) -> (Vec<f64>, Vec<f64>) {
    let n = (samples.len() * pad_factor.max(1)).next_power_of_two();
    let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let dxi = 2.0 * std::f64::consts::PI / (n as f64 * dx);
    let mut power = Vec::with_capacity(n);
    let mut xi = Vec::with_capacity(n);
    for (k, c) in buf.iter().enumerate() {
        let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        xi.push(kk * dxi);
        power.push(c.norm_sqr() * dx / n as f64);
    }
    (power, xi)
}

/// ‖f‖_{H^s} with weight (1+ξ²)^s for samples on a uniform grid, zero-extended outside the window.
pub fn sobolev_norm(samples: &[f64], dx: f64, s: f64) -> Result<f64> {
    if samples.len() < 8 {
        return Err(LabError::WindowTooSmall(format!("{} samples", samples.len())));
    }
    let (power, xi) = power_spectrum(samples, dx, 4);
    let sum: f64 = power.iter().zip(&xi).map(|(p, k)| p * (1.0 + k * k).powf(s)).sum();
    Ok(sum.sqrt())
}

/// Resamples values given on increasing nodes onto a uniform grid over [a, b]; zero outside the nodes.
pub fn resample_uniform(xs: &[f64], vals: &[f64], a: f64, b: f64, n: usize) -> (Vec<f64>, f64) {
    let dx = (b - a) / (n - 1) as f64;
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let out = (0..n)
        .map(|i| {
            let x = a + i as f64 * dx;
            if x < lo || x > hi {
                0.0
            } else {
                crate::numerics::interp_nodes(xs, vals, x)
            }
        })
        .collect();
    (out, dx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_case_is_parseval() {
        let dx = 0.01;
        let f: Vec<f64> = (0..1000).map(|i| (-(i as f64 * dx - 5.0).powi(2)).exp()).collect();
        let l2 = (f.iter().map(|v| v * v).sum::<f64>() * dx).sqrt();
        assert!((sobolev_norm(&f, dx, 0.0).unwrap() - l2).abs() < 1e-12 * l2);
    }

    #[test]
    fn h1_norm_of_gaussian_matches_closed_form() {
        let dx = 0.005;
        let f: Vec<f64> = (0..4000).map(|i| (-(i as f64 * dx - 10.0).powi(2)).exp()).collect();
        let pi = std::f64::consts::PI;
        // ∫e^{−2x²} = √(π/2), ∫(2x e^{−x²})² = √(π/2)
        let exact = (2.0 * (pi / 2.0).sqrt()).sqrt();
        assert!((sobolev_norm(&f, dx, 1.0).unwrap() - exact).abs() < 1e-9);
    }

    #[test]
    fn short_window_rejected() {
        assert!(sobolev_norm(&[1.0, 2.0], 0.1, 0.5).is_err());
    }
}
