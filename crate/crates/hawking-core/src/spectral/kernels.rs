//! Explicit half-line kernels with a Dirichlet wall at z.
//!
//! Resolvent (D²_{x,0} − λ²)⁻¹: (i/2λ)(e^{iλ|x−y|} − e^{iλ|x+y−2z|}); at λ = i this is the kernel of
//! (D²_{x,0} + 1)⁻¹. The λ → 0 limit of D⁻²_{x,0} is min(x, y) − z.

use super::operator::DiscreteOperator;
use crate::error::Result;
use crate::numerics::GaussRule;
use num_complex::Complex64;

/// Panels per unit length of the integration window, at least 8 per piece.
const PANELS_PER_UNIT: f64 = 8.0;

fn integrate_split<F: Fn(f64) -> f64>(rule: &GaussRule, f: F, a: f64, b: f64, split: f64) -> f64 {
    let piece = |lo: f64, hi: f64| {
        if hi <= lo {
            return 0.0;
        }
        let panels = ((hi - lo) * PANELS_PER_UNIT).ceil().max(8.0) as usize;
        rule.integrate_panels(&f, lo, hi, panels)
    };
    let s = split.clamp(a, b);
    piece(a, s) + piece(s, b)
}

pub fn resolvent_kernel(z: f64, lambda: Complex64, x: f64, y: f64) -> Complex64 {
    let i = Complex64::i();
    let direct = (i * lambda * (x - y).abs()).exp();
    let image = (i * lambda * (x + y - 2.0 * z).abs()).exp();
    i / (2.0 * lambda) * (direct - image)
}

/// g(x) = ∫ K_λ(x, y) f(y) dy at each x, with f supported in `support` ⊂ [z, ∞).
pub fn dirichlet_resolvent_apply<F: Fn(f64) -> f64>(
    z: f64,
    lambda: Complex64,
    f: F,
    support: (f64, f64),
    xs: &[f64],
) -> Vec<Complex64> {
    let rule = GaussRule::new(16);
    xs.iter()
        .map(|&x| {
            let re = integrate_split(&rule, |y| (resolvent_kernel(z, lambda, x, y) * f(y)).re, support.0, support.1, x);
            let im = integrate_split(&rule, |y| (resolvent_kernel(z, lambda, x, y) * f(y)).im, support.0, support.1, x);
            Complex64::new(re, im)
        })
        .collect()
}

/// g(x) = ∫ (min(x, y) − z) f(y) dy at each x.
pub fn dx0_inverse_sq<F: Fn(f64) -> f64>(z: f64, f: F, support: (f64, f64), xs: &[f64]) -> Vec<f64> {
    let rule = GaussRule::new(16);
    xs.iter().map(|&x| integrate_split(&rule, |y| (x.min(y) - z) * f(y), support.0, support.1, x)).collect()
}

/// ⟨D⁻²_{x,0}f, f⟩ and the majorant (1 + |z|)(∫⟨x⟩|f|)² from min(x, y) − z ≤ (1 + |z|)⟨x⟩⟨y⟩.
pub fn inverse_sq_form_and_bound<F: Fn(f64) -> f64>(z: f64, f: F, support: (f64, f64)) -> (f64, f64) {
    let rule = GaussRule::new(16);
    let (a, b) = support;
    let panels = ((b - a) * PANELS_PER_UNIT).ceil().max(8.0) as usize;
    // ⟨D⁻²f, f⟩ = ∫_z^∞ (∫_x^∞ f)² dx
    let tail = |x: f64| rule.integrate_panels(&f, x.max(a), b, 8);
    let form = rule.integrate_panels(|x| tail(x).powi(2), a, b, panels) + (a - z).max(0.0) * tail(a).powi(2);
    let m1 = rule.integrate_panels(|x| (1.0 + x * x).sqrt() * f(x).abs(), a, b, panels);
    (form, (1.0 + z.abs()) * m1 * m1)
}

/// (D²_{x,0} + 1)g = f at each x by the three-point scheme on [z, z + length] with a Dirichlet end,
/// Richardson-extrapolated from spacings 0.01 and 0.005. Nodes must fall on the coarse grid.
pub fn tridiagonal_resolvent_at_i<F: Fn(f64) -> f64>(z: f64, f: F, xs: &[f64], length: f64) -> Result<Vec<f64>> {
    let solve = |cells: usize| -> Result<Vec<f64>> {
        let op = DiscreteOperator::uniform(z, z + length, cells - 1, |_| 0.0)?;
        let rhs: Vec<f64> = op.nodes.iter().map(|&x| f(x)).collect();
        let g = op.solve_shifted(1.0, &rhs)?;
        let dx = length / cells as f64;
        Ok(xs.iter().map(|&x| g[((x - z) / dx).round() as usize - 1]).collect())
    };
    let cells = (length * 100.0).round() as usize;
    let (a, b) = (solve(cells)?, solve(2 * cells)?);
    Ok(a.iter().zip(&b).map(|(a, b)| (4.0 * b - a) / 3.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bump;

    fn f(y: f64) -> f64 {
        bump((y - 1.5) / 1.0) * (1.0 + 0.3 * y)
    }

    #[test]
    fn kernel_vanishes_on_the_wall() {
        let k = resolvent_kernel(-1.0, Complex64::new(0.7, 0.2), -1.0, 2.3);
        assert!(k.norm() < 1e-15);
    }

    #[test]
    fn inverse_square_inverts_second_derivative() {
        let z = -1.0;
        let xs = [0.9, 1.2, 1.7, 2.1];
        let d = 1e-3;
        for &x in &xs {
            let g = |e: f64| {
                let v = dx0_inverse_sq(z, f, (0.5, 2.5), &[x - e, x, x + e]);
                -(v[0] - 2.0 * v[1] + v[2]) / (e * e)
            };
            let rich = (4.0 * g(0.5 * d) - g(d)) / 3.0;
            assert!((rich - f(x)).abs() < 1e-8, "{x}: {rich} vs {}", f(x));
        }
    }

    #[test]
    fn inverse_square_form_respects_the_majorant() {
        let (form, bound) = inverse_sq_form_and_bound(-1.0, f, (0.5, 2.5));
        let g = dx0_inverse_sq(-1.0, f, (0.5, 2.5), &[1.0]);
        assert!(form > 0.0 && form <= bound);
        assert!(g[0] > 0.0);
    }

    #[test]
    fn resolvent_at_i_matches_tridiagonal_solve() {
        let z = -1.0;
        let xs = [-0.5, 0.3, 0.9, 1.5, 2.2, 3.0];
        let kernel = dirichlet_resolvent_apply(z, Complex64::i(), f, (0.5, 2.5), &xs);
        let oracle = tridiagonal_resolvent_at_i(z, f, &xs, 42.0).unwrap();
        for (k, o) in kernel.iter().zip(&oracle) {
            assert!(k.im.abs() < 1e-12);
            assert!((k.re - o).abs() < 1e-8, "{} vs {o}", k.re);
        }
    }
}
