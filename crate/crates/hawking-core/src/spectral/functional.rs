//! φ(z) = z^{1/2}coth(βz^{1/2}) and ψ(z) = z^{−1/2}coth(βz^{1/2}) applied to a discrete operator.
//!
//! Route A diagonalises the operator. Route B uses coth(x) = Σ_{k∈ℤ} x/(x² + k²π²):
//! φ(z) = β⁻¹ + β⁻¹Σ_{k≠0} z/(z + c_k²) and ψ(z) = (βz)⁻¹ + β⁻¹Σ_{k≠0} 1/(z + c_k²) with c_k = πk/β.
//! Terms k ≤ K are tridiagonal solves; the rest is summed from the moments ⟨v, H^j v⟩ through the
//! alternating expansion 1/(z + c²) = Σ_j (−z)^j/c^{2j+2}, valid once c_K² exceeds the spectral radius.

use super::operator::{DiscreteOperator, Spectrum};
use crate::error::{LabError, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Phi,
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalFunctional {
    pub beta: f64,
    pub kind: Kind,
    /// Tolerance on the neglected series remainder relative to the computed value.
    pub tol: f64,
}

/// Route B result with its truncation data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub k_max: usize,
    /// Bound on the neglected remainder of the moment expansion.
    pub tail_bound: f64,
}

/// Terms kept in the moment expansion of the tail.
const TAIL_TERMS: usize = 8;

/// Σ_{k>K} k^{−p} by Euler-Maclaurin, accurate for K ≥ 20 and p ≥ 2.
pub fn zeta_tail(k: usize, p: f64) -> f64 {
    let kf = k as f64;
    let f = kf.powf(-p);
    kf.powf(1.0 - p) / (p - 1.0) - 0.5 * f + p / 12.0 * f / kf - p * (p + 1.0) * (p + 2.0) / 720.0 * f / kf.powi(3)
        + p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) / 30240.0 * f / kf.powi(5)
        - p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) * (p + 5.0) * (p + 6.0) / 1_209_600.0 * f / kf.powi(7)
}

/// x·coth(x), smooth through 0.
fn x_coth_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 3.0
    } else {
        x / x.tanh()
    }
}

impl ThermalFunctional {
    pub fn new(beta: f64, kind: Kind) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(LabError::InvalidParameter(format!("beta = {beta}")));
        }
        Ok(Self { beta, kind, tol: 1e-8 })
    }

    pub fn phi(beta: f64) -> Result<Self> {
        Self::new(beta, Kind::Phi)
    }

    pub fn psi(beta: f64) -> Result<Self> {
        Self::new(beta, Kind::Psi)
    }

    /// Pointwise value at z ≥ 0 (ψ requires z > 0).
    pub fn eval(&self, z: f64) -> f64 {
        let z = z.max(0.0);
        let s = z.sqrt();
        let xc = x_coth_x(self.beta * s);
        match self.kind {
            Kind::Phi => xc / self.beta,
            Kind::Psi => xc / (self.beta * z),
        }
    }

    /// Lattice point c_k = πk/β.
    pub fn lattice(&self, k: usize) -> f64 {
        PI * k as f64 / self.beta
    }

    /// Smallest K with ρ/c_K² ≤ tol^{1/(J+1)}, so that the first dropped expansion term is below tol.
    fn k_max(&self, rho: f64) -> usize {
        let q_max = self.tol.powf(1.0 / (TAIL_TERMS as f64 + 1.0)).min(0.5);
        let c = (rho / q_max).sqrt();
        ((c * self.beta / PI).ceil() as usize).max(20)
    }

    /// Route A: Σ_j f(λ_j)·c_j² from a precomputed spectrum.
    pub fn quad_form_spectral(&self, op: &DiscreteOperator, spec: &Spectrum, v: &[f64]) -> Result<f64> {
        let coef = op.coefficients(spec, v);
        let mut sum = 0.0;
        for (lam, c) in spec.values.iter().zip(&coef) {
            if self.kind == Kind::Psi && *lam <= 0.0 {
                return Err(LabError::SingularOperator(format!("eigenvalue {lam} for psi")));
            }
            sum += self.eval(*lam) * c * c;
        }
        Ok(sum)
    }

    /// Route A with its own eigendecomposition.
    pub fn quad_form_eigen(&self, op: &DiscreteOperator, v: &[f64]) -> Result<f64> {
        self.quad_form_spectral(op, &op.spectrum(), v)
    }

    /// Route B: partial-fraction series with tridiagonal solves and the moment tail.
    pub fn quad_form_series(&self, op: &DiscreteOperator, v: &[f64]) -> Result<SeriesValue> {
        let rho = op.spectral_radius_bound();
        let k_max = self.k_max(rho);
        let b = self.beta;
        let norm = op.norm_sq(v);
        // moments m_j = ⟨v, H^j v⟩ for j ≤ TAIL_TERMS + 1
        let mut moments = vec![norm];
        let mut w = v.to_vec();
        for _ in 0..=TAIL_TERMS {
            w = op.apply(&w);
            moments.push(op.inner(v, &w));
        }
        let mut sum = 0.0;
        for k in 1..=k_max {
            let c2 = self.lattice(k).powi(2);
            let g = op.solve_shifted(c2, v)?;
            let r = op.inner(v, &g);
            sum += match self.kind {
                Kind::Phi => norm - c2 * r,
                Kind::Psi => r,
            };
        }
        // Σ_{k>K} c_k^{−2(j+1)} = (β/π)^{2(j+1)} ζ_K(2j + 2)
        let scale = (b / PI).powi(2);
        let mut tail = 0.0;
        for j in 0..TAIL_TERMS {
            let zk = zeta_tail(k_max, 2.0 * (j + 1) as f64) * scale.powi(j as i32 + 1);
            let m = match self.kind {
                Kind::Phi => moments[j + 1],
                Kind::Psi => moments[j],
            };
            tail += if j % 2 == 0 { m * zk } else { -m * zk };
        }
        let j = TAIL_TERMS;
        let next = match self.kind {
            Kind::Phi => moments[j + 1],
            Kind::Psi => moments[j],
        };
        let tail_bound = 2.0 / b * next.abs() * zeta_tail(k_max, 2.0 * (j + 1) as f64) * scale.powi(j as i32 + 1);
        let head = match self.kind {
            Kind::Phi => norm / b,
            Kind::Psi => op.inner(v, &op.solve_shifted(0.0, v)?) / b,
        };
        let value = head + 2.0 / b * (sum + tail);
        if !value.is_finite() || tail_bound > self.tol * value.abs().max(f64::MIN_POSITIVE) {
            return Err(LabError::SeriesNotConverged(format!("K = {k_max}, tail bound {tail_bound}, value {value}")));
        }
        Ok(SeriesValue { value, k_max, tail_bound })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_tail_matches_direct_sum() {
        for p in [2.0, 4.0, 10.0] {
            let direct: f64 = (31..=5000).map(|k| (k as f64).powf(-p)).sum();
            let diff = zeta_tail(30, p) - zeta_tail(5000, p);
            assert!((diff - direct).abs() < 1e-11 * direct, "p = {p}: {}", (diff - direct) / direct);
        }
    }

    #[test]
    fn pointwise_values_match_series() {
        let f = ThermalFunctional::phi(3.0).unwrap();
        let g = ThermalFunctional::psi(3.0).unwrap();
        for z in [0.01, 0.5, 4.0] {
            let mut sp = 1.0 / 3.0;
            let mut ss = 1.0 / (3.0 * z);
            for k in 1..200_000 {
                let c2 = f.lattice(k).powi(2);
                sp += 2.0 / 3.0 * z / (z + c2);
                ss += 2.0 / 3.0 / (z + c2);
            }
            assert!((f.eval(z) - sp).abs() < 1e-4 * sp);
            assert!((g.eval(z) - ss).abs() < 1e-4 * ss);
        }
    }

    #[test]
    fn phi_at_zero_is_inverse_beta() {
        let f = ThermalFunctional::phi(2.5).unwrap();
        assert!((f.eval(0.0) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn routes_agree_on_small_operator() {
        let op = DiscreteOperator::uniform(0.0, 10.0, 120, |x| 0.25 + 0.5 * (-(x - 4.0) * (x - 4.0)).exp()).unwrap();
        let v: Vec<f64> = op.nodes.iter().map(|x| (x * (10.0 - x)).sqrt() * (-(x - 5.0f64).powi(2)).exp()).collect();
        for kind in [Kind::Phi, Kind::Psi] {
            let f = ThermalFunctional::new(12.0, kind).unwrap();
            let a = f.quad_form_eigen(&op, &v).unwrap();
            let b = f.quad_form_series(&op, &v).unwrap();
            assert!((a - b.value).abs() < 1e-8 * a.abs(), "{kind:?}: {a} vs {}", b.value);
        }
    }
}
