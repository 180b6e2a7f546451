//! Small numerical kernels: quadrature, root finding, fits, interpolation, banded solves.

use crate::error::{LabError, Result};

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed-order Gauss-Legendre rule reused across many integrals.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    pub fn integrate_panels<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| self.integrate(&f, a + k as f64 * h, a + (k + 1) as f64 * h))
            .sum()
    }
}

/// Bisection on a sign-changing bracket.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(LabError::NonConvergence(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(LabError::NonConvergence("bisection iteration cap".into()))
}

/// Newton iteration safeguarded by a bracket; falls back to bisection steps.
pub fn newton_bracketed<F: Fn(f64) -> (f64, f64)>(
    f: F,
    mut a: f64,
    mut b: f64,
    x0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(LabError::NonConvergence(format!("no sign change on [{a}, {b}]")));
    }
    let sa = fa.signum();
    let mut x = x0.clamp(a.min(b), a.max(b));
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == sa {
            a = x;
        } else {
            b = x;
        }
        let mut xn = x - fx / dfx;
        let (lo, hi) = (a.min(b), a.max(b));
        if !xn.is_finite() || xn <= lo || xn >= hi {
            xn = 0.5 * (a + b);
        }
        if (xn - x).abs() <= tol * (1.0 + x.abs()) {
            return Ok(xn);
        }
        x = xn;
    }
    Err(LabError::NonConvergence("safeguarded Newton iteration cap".into()))
}

/// Ordinary least squares y = slope*x + intercept with coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LinearFit { slope, intercept, r_squared }
}

/// Four-point Lagrange interpolation on a uniform grid x_k = x0 + k*dx.
pub fn interp_uniform(x0: f64, dx: f64, vals: &[f64], x: f64) -> f64 {
    let n = vals.len();
    if n < 4 {
        return interp_linear_uniform(x0, dx, vals, x);
    }
    let s = (x - x0) / dx;
    let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = s - i as f64;
    let (f0, f1, f2, f3) = (vals[i], vals[i + 1], vals[i + 2], vals[i + 3]);
    let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    f0 * l0 + f1 * l1 + f2 * l2 + f3 * l3
}

fn interp_linear_uniform(x0: f64, dx: f64, vals: &[f64], x: f64) -> f64 {
    let n = vals.len();
    if n == 1 {
        return vals[0];
    }
    let s = (x - x0) / dx;
    let i = (s.floor() as isize).clamp(0, n as isize - 2) as usize;
    let t = s - i as f64;
    vals[i] * (1.0 - t) + vals[i + 1] * t
}

/// Four-point Lagrange interpolation on arbitrary increasing nodes.
pub fn interp_nodes(xs: &[f64], vals: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let j = xs.partition_point(|&v| v < x);
    let lo = (j as isize - 2).clamp(0, n.saturating_sub(4) as isize) as usize;
    let hi = (lo + 4).min(n);
    let mut s = 0.0;
    for a in lo..hi {
        let mut l = 1.0;
        for b in lo..hi {
            if a != b {
                l *= (x - xs[b]) / (xs[a] - xs[b]);
            }
        }
        s += l * vals[a];
    }
    s
}

/// Neville extrapolation of samples (e_k, y_k) to e = 0.
pub fn extrapolate_to_zero(es: &[f64], ys: &[f64]) -> f64 {
    let n = es.len();
    let mut p = ys.to_vec();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (es[i + m] * p[i] - es[i] * p[i + 1]) / (es[i + m] - es[i]);
        }
    }
    p[0]
}

/// Thomas algorithm for a tridiagonal system; sub[i] couples row i to i-1, sup[i] to i+1.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if piv == 0.0 || !piv.is_finite() {
        return Err(LabError::SingularOperator("zero pivot in row 0".into()));
    }
    c[0] = if n > 1 { sup[0] / piv } else { 0.0 };
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - sub[i] * c[i - 1];
        if piv == 0.0 || !piv.is_finite() {
            return Err(LabError::SingularOperator(format!("zero pivot in row {i}")));
        }
        if i + 1 < n {
            c[i] = sup[i] / piv;
        }
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_prime(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        let da = a / (t * t);
        let db = b / ((1.0 - t) * (1.0 - t));
        (da * b + a * db) / ((a + b) * (a + b))
    }
}

/// Compactly supported C-infinity bump on (-1, 1) with value 1 at the origin.
pub fn bump(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}

/// Composite trapezoid on a uniform grid.
pub fn trapezoid(vals: &[f64], dx: f64) -> f64 {
    let n = vals.len();
    if n < 2 {
        return 0.0;
    }
    dx * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[n - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let g = GaussRule::new(10);
        let v = g.integrate(|x| x.powi(19) + 3.0 * x.powi(6), -1.0, 2.0);
        let exact = (2f64.powi(20) - 1.0) / 20.0 + 3.0 * (2f64.powi(7) + 1.0) / 7.0;
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn bisect_and_newton_find_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let r = newton_bracketed(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1.0, 1e-15, 100).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let f = linear_fit(&xs, &ys);
        assert!((f.slope - 3.0).abs() < 1e-12 && (f.intercept + 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let vals: Vec<f64> = (0..20).map(|i| (0.1 * i as f64).powi(3)).collect();
        let v = interp_uniform(0.0, 0.1, &vals, 0.537);
        assert!((v - 0.537f64.powi(3)).abs() < 1e-13);
        let xs: Vec<f64> = (0..20).map(|i| (0.1 * i as f64).powi(2)).collect();
        let vals: Vec<f64> = xs.iter().map(|x| x * x * x - x).collect();
        let v = interp_nodes(&xs, &vals, 0.77);
        assert!((v - (0.77f64.powi(3) - 0.77)).abs() < 1e-12);
    }

    #[test]
    fn neville_removes_polynomial_error() {
        let es = [0.1, 0.05, 0.025, 0.0125];
        let ys: Vec<f64> = es.iter().map(|e| 2.0 + e - 3.0 * e * e).collect();
        assert!((extrapolate_to_zero(&es, &ys) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn tridiagonal_matches_direct_product() {
        let n = 8;
        let sub = vec![-1.0; n];
        let sup = vec![-1.0; n];
        let diag = vec![3.0; n];
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = diag[i] * x[i];
            if i > 0 {
                b[i] += sub[i] * x[i - 1];
            }
            if i + 1 < n {
                b[i] += sup[i] * x[i + 1];
            }
        }
        let y = solve_tridiagonal(&sub, &diag, &sup, &b).unwrap();
        for i in 0..n {
            assert!((x[i] - y[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn smooth_step_derivative_matches_difference() {
        for &t in &[0.2, 0.5, 0.8] {
            let h = 1e-6;
            let fd = (smooth_step(t + h) - smooth_step(t - h)) / (2.0 * h);
            assert!((fd - smooth_step_prime(t)).abs() < 1e-7);
        }
    }
}
