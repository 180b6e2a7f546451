//! Characteristic (double-null) solver for ψ_uv = −W ψ/4 with u = t − x, v = t + x.
//!
//! Rows are lines of constant v marched towards decreasing v; each row is swept towards
//! decreasing u from a boundary node where the value is prescribed.

use crate::error::{LabError, Result};

/// Values on a line of constant v at u-indices i_lo..=i_hi, plus an optional value one node past i_hi.
#[derive(Debug, Clone, PartialEq)]
pub struct NullRow {
    pub v: f64,
    pub i_lo: usize,
    pub vals: Vec<f64>,
    pub ext: Option<f64>,
}

impl NullRow {
    pub fn zeros(v: f64, i_lo: usize, i_hi: usize, ext: Option<f64>) -> Self {
        Self { v, i_lo, vals: vec![0.0; i_hi + 1 - i_lo], ext }
    }

    pub fn i_hi(&self) -> usize {
        self.i_lo + self.vals.len() - 1
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        if i < self.i_lo {
            None
        } else if i <= self.i_hi() {
            Some(self.vals[i - self.i_lo])
        } else if i == self.i_hi() + 1 {
            self.ext
        } else {
            None
        }
    }
}

/// Geometry of the next row: prescribed value at i_hi, sweep down to i_lo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSpec {
    pub v: f64,
    pub i_lo: usize,
    pub i_hi: usize,
    pub edge_value: f64,
    pub ext: Option<f64>,
}

/// Uniform u-grid u_i = u0 + i·du with a potential W(x).
pub struct NullMarcher<P: Fn(f64) -> f64> {
    pub u0: f64,
    pub du: f64,
    pub potential: P,
}

impl<P: Fn(f64) -> f64> NullMarcher<P> {
    pub fn new(u0: f64, du: f64, potential: P) -> Result<Self> {
        if !(du > 0.0) {
            return Err(LabError::InvalidParameter(format!("du = {du}")));
        }
        Ok(Self { u0, du, potential })
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u0 + i as f64 * self.du
    }

    /// Largest index with u_i ≤ u (saturating at 0).
    pub fn index_below(&self, u: f64) -> usize {
        let k = ((u - self.u0) / self.du).floor();
        if k < 0.0 {
            0
        } else {
            k as usize
        }
    }

    /// Diamond update for every cell between `prev` and the new row.
    pub fn next_row(&self, prev: &NullRow, spec: &RowSpec) -> Result<NullRow> {
        let dv = prev.v - spec.v;
        if !(dv > 0.0) {
            return Err(LabError::DomainError(format!("rows must descend in v (dv = {dv})")));
        }
        if spec.i_lo < prev.i_lo || spec.i_hi < spec.i_lo {
            return Err(LabError::DomainError("row range not contained in previous row".into()));
        }
        if prev.get(spec.i_hi).is_none() {
            return Err(LabError::DomainError(format!(
                "previous row does not reach index {} (ends at {})",
                spec.i_hi,
                prev.i_hi()
            )));
        }
        let n = spec.i_hi + 1 - spec.i_lo;
        let mut vals = vec![0.0; n];
        vals[n - 1] = spec.edge_value;
        let vc = 0.5 * (prev.v + spec.v);
        let c = self.du * dv / 8.0;
        let prev_at = |i: usize| prev.get(i).unwrap_or(0.0);
        let mut ne = prev_at(spec.i_hi);
        for i in (spec.i_lo..spec.i_hi).rev() {
            let north = prev_at(i);
            let east = vals[i + 1 - spec.i_lo];
            let uc = self.u(i) + 0.5 * self.du;
            let w = (self.potential)(0.5 * (vc - uc));
            vals[i - spec.i_lo] = north + east - ne - c * w * (north + east);
            ne = north;
        }
        Ok(NullRow { v: spec.v, i_lo: spec.i_lo, vals, ext: spec.ext })
    }
}

/// Cubic Lagrange interpolation of a row at u, with the one-sided derivative.
pub fn row_value_and_du<P: Fn(f64) -> f64>(m: &NullMarcher<P>, row: &NullRow, u: f64) -> Option<(f64, f64)> {
    let hi = row.i_hi();
    if hi < row.i_lo + 3 {
        return None;
    }
    let s = (u - m.u0) / m.du;
    if s < row.i_lo as f64 - 1e-9 || s > hi as f64 + 1e-9 {
        return None;
    }
    let k = (s.floor() as isize - 1).clamp(row.i_lo as isize, hi as isize - 3) as usize;
    let t = s - k as f64;
    let f: Vec<f64> = (0..4).map(|j| row.vals[k + j - row.i_lo]).collect();
    let l = [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ];
    let dl = [
        -(3.0 * t * t - 12.0 * t + 11.0) / 6.0,
        (3.0 * t * t - 10.0 * t + 6.0) / 2.0,
        -(3.0 * t * t - 8.0 * t + 3.0) / 2.0,
        (3.0 * t * t - 6.0 * t + 2.0) / 6.0,
    ];
    let val = (0..4).map(|j| l[j] * f[j]).sum();
    let der = (0..4).map(|j| dl[j] * f[j]).sum::<f64>() / m.du;
    Some((val, der))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_wave_is_exact() {
        // ψ = f(u) + g(v) is reproduced exactly by the diamond rule when W = 0.
        let f = |u: f64| (0.3 * u).sin();
        let g = |v: f64| (-(v * v)).exp();
        let m = NullMarcher::new(0.0, 0.05, |_| 0.0).unwrap();
        let n = 200;
        let mut row = NullRow { v: 1.0, i_lo: 0, vals: (0..=n).map(|i| f(m.u(i)) + g(1.0)).collect(), ext: None };
        for j in 1..40 {
            let v = 1.0 - 0.05 * j as f64;
            let spec = RowSpec { v, i_lo: 0, i_hi: n, edge_value: f(m.u(n)) + g(v), ext: None };
            row = m.next_row(&row, &spec).unwrap();
        }
        for i in 0..=n {
            assert!((row.vals[i] - f(m.u(i)) - g(row.v)).abs() < 1e-12);
        }
    }

    #[test]
    fn second_order_with_potential() {
        // ψ = sin(a u + b v) with ψ_uv = −W ψ/4 requires W = 4ab constant.
        let (a, b) = (0.7, 0.4);
        let exact = |u: f64, v: f64| (a * u + b * v).sin();
        let err = |du: f64| {
            let m = NullMarcher::new(0.0, du, |_| 4.0 * a * b).unwrap();
            let n = (4.0 / du).round() as usize;
            let mut row = NullRow { v: 0.0, i_lo: 0, vals: (0..=n).map(|i| exact(m.u(i), 0.0)).collect(), ext: None };
            let steps = (4.0 / du).round() as usize;
            for j in 1..=steps {
                let v = -(j as f64) * du;
                let spec = RowSpec { v, i_lo: 0, i_hi: n, edge_value: exact(m.u(n), v), ext: None };
                row = m.next_row(&row, &spec).unwrap();
            }
            (0..=n).map(|i| (row.vals[i] - exact(m.u(i), row.v)).abs()).fold(0.0, f64::max)
        };
        let e1 = err(0.04);
        let e2 = err(0.02);
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.2, "order {order}");
    }
}
