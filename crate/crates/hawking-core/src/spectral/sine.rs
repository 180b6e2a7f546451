//! ⟨μ(D²_{x,0})v, v⟩ through the sine transform S(ξ) = ∫ sin((x − z)ξ) v(x) dx:
//! ⟨μ(D²_{x,0})v, v⟩ = (2/π)∫₀^∞ μ(ξ²)|S(ξ)|² dξ, the odd extension Ev(x) = −v(2z − x) turning the
//! half-line form into a whole-line one.
//!
//! Samples on a uniform grid x_j = z + j·dx give S on the lattice ξ_k = πk/L by a type-I DST; the
//! lattice sum is exact for the interval [z, z + L] with walls at both ends. For the half-line the
//! interval is padded with zeros and the O(L⁻²) dependence on L is removed by Richardson steps.

use crate::error::{LabError, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Samples v_j = v(z + j·dx), j = 1..n, with v vanishing at z.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineSamples {
    pub z: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SineDomain {
    /// Walls at z and z + (n + 1)dx.
    Interval,
    /// Half-line [z, ∞): zero padding with relative doubling tolerance.
    HalfLine { tol: f64 },
}

impl HalfLineSamples {
    pub fn from_fn<F: Fn(f64) -> f64>(z: f64, dx: f64, n: usize, f: F) -> Self {
        Self { z, dx, values: (1..=n).map(|j| f(z + j as f64 * dx)).collect() }
    }

    pub fn norm_sq(&self) -> f64 {
        self.dx * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    /// Odd extension −v(2z − x) on the symmetric grid z + j·dx, j = −n..n.
    pub fn odd_extension(&self) -> Vec<f64> {
        let n = self.values.len();
        let mut out = Vec::with_capacity(2 * n + 1);
        out.extend(self.values.iter().rev().map(|v| -v));
        out.push(0.0);
        out.extend_from_slice(&self.values);
        out
    }
}

/// S(ξ_k) for k = 1..m − 1 on the lattice ξ_k = πk/(m·dx), where m − 1 ≥ n is the padded length.
fn sine_coefficients(values: &[f64], dx: f64, m: usize) -> Vec<f64> {
    let len = 2 * m;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (j, v) in values.iter().enumerate() {
        buf[j + 1] = Complex64::new(*v, 0.0);
        buf[len - j - 1] = Complex64::new(-*v, 0.0);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    // F_k = −2i Σ v_j sin(πjk/m)
    (1..m).map(|k| -0.5 * buf[k].im * dx).collect()
}

fn lattice_sum<M: Fn(f64) -> f64>(mu: &M, values: &[f64], dx: f64, m: usize) -> f64 {
    let l = m as f64 * dx;
    let s = sine_coefficients(values, dx, m);
    let sum: f64 = s.iter().enumerate().map(|(i, sk)| {
        let xi = PI * (i + 1) as f64 / l;
        mu(xi * xi) * sk * sk
    }).sum();
    2.0 / l * sum
}

/// ⟨μ(D²_{x,0})v, v⟩ with μ given as a function of ξ².
pub fn sine_form<M: Fn(f64) -> f64>(mu: M, v: &HalfLineSamples, domain: SineDomain) -> Result<f64> {
    let n = v.values.len();
    if n < 4 {
        return Err(LabError::WindowTooSmall(format!("{n} samples")));
    }
    match domain {
        SineDomain::Interval => Ok(lattice_sum(&mu, &v.values, v.dx, n + 1)),
        SineDomain::HalfLine { tol } => {
            let mut m = (2 * (n + 1)).next_power_of_two();
            let mut prev = lattice_sum(&mu, &v.values, v.dx, m);
            let mut prev_rich: Option<f64> = None;
            for _ in 0..8 {
                m *= 2;
                let cur = lattice_sum(&mu, &v.values, v.dx, m);
                let rich = (4.0 * cur - prev) / 3.0;
                if let Some(p) = prev_rich {
                    if (rich - p).abs() <= tol * rich.abs().max(f64::MIN_POSITIVE) {
                        return Ok(rich);
                    }
                }
                prev = cur;
                prev_rich = Some(rich);
            }
            Err(LabError::QuadratureNotConverged(format!("padding to {m} points")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bump;

    fn sample() -> HalfLineSamples {
        HalfLineSamples::from_fn(-1.0, 0.01, 799, |x| bump((x - 2.0) / 2.5) * (1.0 + 0.4 * x))
    }

    #[test]
    fn parseval_for_unit_symbol() {
        let v = sample();
        let a = sine_form(|_| 1.0, &v, SineDomain::Interval).unwrap();
        assert!((a - v.norm_sq()).abs() < 1e-12 * a);
        let b = sine_form(|_| 1.0, &v, SineDomain::HalfLine { tol: 1e-10 }).unwrap();
        assert!((b - v.norm_sq()).abs() < 1e-10 * b);
    }

    #[test]
    fn odd_extension_doubles_the_norm() {
        let v = sample();
        let e = v.odd_extension();
        let ne: f64 = v.dx * e.iter().map(|a| a * a).sum::<f64>();
        assert!((ne - 2.0 * v.norm_sq()).abs() < 1e-12 * ne);
    }

    #[test]
    fn half_line_and_interval_agree_for_local_symbols() {
        let v = sample();
        let a = sine_form(|z| z, &v, SineDomain::Interval).unwrap();
        let b = sine_form(|z| z, &v, SineDomain::HalfLine { tol: 1e-10 }).unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }
}
