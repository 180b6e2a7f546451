//! Half-line operators D²_{x,0} + W on [z, X] with Dirichlet walls at both ends.
//!
//! Nodes may be graded. With h_{i±1/2} the neighbouring spacings and w_i their mean, the
//! second difference is symmetric in ⟨u, v⟩ = Σ w_i u_i v_i; the symmetric matrix S = W^{1/2}HW^{−1/2}
//! carries the spectrum.

use crate::error::{LabError, Result};
use crate::geometry::SdSGeometry;
use crate::numerics::solve_tridiagonal;
use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    /// Wall position z.
    pub z: f64,
    /// Right wall X.
    pub x_max: f64,
    /// Interior nodes, strictly increasing inside (z, X).
    pub nodes: Vec<f64>,
    /// Quadrature weights w_i.
    pub weights: Vec<f64>,
    pub potential: Vec<f64>,
    /// Symmetric tridiagonal form: diagonal and off-diagonal (i, i+1).
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// Eigenpairs of the symmetric form; columns of `vectors` are orthonormal in the Euclidean product.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl DiscreteOperator {
    /// Builds the operator on the given interior nodes with potential samples.
    pub fn on_nodes(z: f64, x_max: f64, nodes: Vec<f64>, potential: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        if n < 3 || potential.len() != n {
            return Err(LabError::InvalidParameter(format!("{n} nodes, {} potential samples", potential.len())));
        }
        if !(nodes[0] > z && nodes[n - 1] < x_max) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::InvalidParameter("nodes must increase strictly inside (z, X)".into()));
        }
        let gap = |i: usize| -> f64 {
            // spacing between node i-1 and node i, with the walls as nodes -1 and n
            let left = if i == 0 { z } else { nodes[i - 1] };
            let right = if i == n { x_max } else { nodes[i] };
            right - left
        };
        let weights: Vec<f64> = (0..n).map(|i| 0.5 * (gap(i) + gap(i + 1))).collect();
        let diag: Vec<f64> = (0..n).map(|i| (1.0 / gap(i) + 1.0 / gap(i + 1)) / weights[i] + potential[i]).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| -1.0 / (gap(i + 1) * (weights[i] * weights[i + 1]).sqrt())).collect();
        Ok(Self { z, x_max, nodes, weights, potential, diag, off })
    }

    /// n interior nodes with uniform spacing (X − z)/(n + 1).
    pub fn uniform<F: Fn(f64) -> f64>(z: f64, x_max: f64, n: usize, potential: F) -> Result<Self> {
        let dx = (x_max - z) / (n + 1) as f64;
        let nodes: Vec<f64> = (1..=n).map(|i| z + i as f64 * dx).collect();
        let pot = nodes.iter().map(|&x| potential(x)).collect();
        Self::on_nodes(z, x_max, nodes, pot)
    }

    /// Nodes from the local spacing function `spacing(x)`, marched from z to X.
    pub fn graded<S: Fn(f64) -> f64, F: Fn(f64) -> f64>(z: f64, x_max: f64, spacing: S, potential: F) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut x = z;
        loop {
            let d = spacing(x);
            if !(d > 0.0) {
                return Err(LabError::InvalidParameter(format!("spacing {d} at x = {x}")));
            }
            x += d;
            if x >= x_max - 0.5 * spacing(x_max) {
                break;
            }
            nodes.push(x);
        }
        let pot = nodes.iter().map(|&x| potential(x)).collect();
        Self::on_nodes(z, x_max, nodes, pot)
    }

    /// H₀ for angular mode ℓ, W_ℓ evaluated from the geometry at each node.
    pub fn for_mode(geom: &SdSGeometry, ell: u32, z: f64, x_max: f64, nodes: Vec<f64>) -> Result<Self> {
        let pot = nodes.iter().map(|&x| geom.mode_potential(ell, x)).collect::<Result<Vec<f64>>>()?;
        Self::on_nodes(z, x_max, nodes, pot)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Copy with `extra` added to the potential.
    pub fn shifted_potential(&self, extra: &[f64]) -> Result<Self> {
        let pot = self.potential.iter().zip(extra).map(|(a, b)| a + b).collect();
        Self::on_nodes(self.z, self.x_max, self.nodes.clone(), pot)
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.weights.iter().zip(u).zip(v).map(|((w, a), b)| w * a * b).sum()
    }

    pub fn norm_sq(&self, u: &[f64]) -> f64 {
        self.inner(u, u)
    }

    fn to_sym(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.weights).map(|(a, w)| a * w.sqrt()).collect()
    }

    fn from_sym(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.weights).map(|(a, w)| a / w.sqrt()).collect()
    }

    fn apply_sym(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * u[i];
                if i > 0 {
                    s += self.off[i - 1] * u[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * u[i + 1];
                }
                s
            })
            .collect()
    }

    /// H u.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.from_sym(&self.apply_sym(&self.to_sym(u)))
    }

    /// (H + σ)⁻¹ f by one tridiagonal solve.
    pub fn solve_shifted(&self, sigma: f64, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        let diag: Vec<f64> = self.diag.iter().map(|d| d + sigma).collect();
        let mut sub = vec![0.0; n];
        let mut sup = vec![0.0; n];
        sub[1..].copy_from_slice(&self.off);
        sup[..n - 1].copy_from_slice(&self.off);
        let g = solve_tridiagonal(&sub, &diag, &sup, &self.to_sym(f))?;
        if g.iter().any(|v| !v.is_finite()) {
            return Err(LabError::SingularOperator(format!("shift {sigma}")));
        }
        Ok(self.from_sym(&g))
    }

    /// Gershgorin bound on the spectral radius.
    pub fn spectral_radius_bound(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut r = self.diag[i].abs();
                if i > 0 {
                    r += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    r += self.off[i].abs();
                }
                r
            })
            .fold(0.0, f64::max)
    }

    /// Dense symmetric eigendecomposition.
    pub fn spectrum(&self) -> Spectrum {
        let n = self.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        let eig = SymmetricEigen::new(m);
        Spectrum { values: eig.eigenvalues.iter().cloned().collect(), vectors: eig.eigenvectors }
    }

    /// Coefficients of u in the eigenbasis of the symmetric form.
    pub fn coefficients(&self, spec: &Spectrum, u: &[f64]) -> Vec<f64> {
        let s = nalgebra::DVector::from_vec(self.to_sym(u));
        (spec.vectors.transpose() * s).iter().cloned().collect()
    }

    /// Eigenvector j as a grid function.
    pub fn eigenvector(&self, spec: &Spectrum, j: usize) -> Vec<f64> {
        let col: Vec<f64> = spec.vectors.column(j).iter().cloned().collect();
        self.from_sym(&col)
    }
}

impl Spectrum {
    /// Smallest eigenvalue divided by the largest magnitude; the nonnegativity gate uses −1e−10.
    pub fn scaled_min(&self) -> f64 {
        let lo = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_free_spectrum_matches_sine_modes() {
        let n = 50;
        let op = DiscreteOperator::uniform(0.0, 1.0, n, |_| 0.0).unwrap();
        let spec = op.spectrum();
        let dx = 1.0 / (n + 1) as f64;
        let mut vals = spec.values.clone();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (k, v) in vals.iter().enumerate() {
            let th = 4.0 / (dx * dx) * (std::f64::consts::PI * (k + 1) as f64 * dx / 2.0).sin().powi(2);
            assert!((v - th).abs() < 1e-9 * th, "{k}: {v} vs {th}");
        }
    }

    #[test]
    fn graded_operator_is_symmetric_in_weighted_product() {
        let op = DiscreteOperator::graded(-1.0, 3.0, |x| 0.01 + 0.05 * x.abs(), |x| (-x * x).exp()).unwrap();
        let u: Vec<f64> = op.nodes.iter().map(|x| (x * 1.3).sin()).collect();
        let v: Vec<f64> = op.nodes.iter().map(|x| (x * 0.7 + 0.2).cos()).collect();
        let a = op.inner(&op.apply(&u), &v);
        let b = op.inner(&u, &op.apply(&v));
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn shifted_solve_inverts_apply() {
        let op = DiscreteOperator::graded(0.0, 2.0, |x| 0.02 + 0.03 * x, |x| 1.0 + x).unwrap();
        let f: Vec<f64> = op.nodes.iter().map(|x| x * (2.0 - x)).collect();
        let g = op.solve_shifted(0.5, &f).unwrap();
        let back: Vec<f64> = op.apply(&g).iter().zip(&g).map(|(a, b)| a + 0.5 * b).collect();
        for (a, b) in back.iter().zip(&f) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn unsorted_nodes_are_rejected() {
        assert!(DiscreteOperator::on_nodes(0.0, 1.0, vec![0.2, 0.1, 0.5], vec![0.0; 3]).is_err());
    }
}
