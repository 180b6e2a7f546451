//! Radiation fields u*_± extracted from free evolutions at large |x|.

use super::probe::ProbeSeries;
use crate::error::{LabError, Result};
use crate::geometry::SdSGeometry;
use crate::numerics::{interp_uniform, linear_fit, smooth_step};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }
}

/// u*_±(s) on the uniform grid s_k = s0 + k·ds; zero outside the sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationField {
    pub side: Side,
    pub ell: u32,
    pub s0: f64,
    pub ds: f64,
    pub samples: Vec<f64>,
    pub x_ext: f64,
    pub data_time: f64,
}

impl RadiationField {
    pub fn zero(side: Side, ell: u32) -> Self {
        Self { side, ell, s0: 0.0, ds: 1.0, samples: vec![0.0; 8], x_ext: 0.0, data_time: 0.0 }
    }

    pub fn s_end(&self) -> f64 {
        self.s0 + (self.samples.len() - 1) as f64 * self.ds
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s < self.s0 || s > self.s_end() {
            return 0.0;
        }
        interp_uniform(self.s0, self.ds, &self.samples, s)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    /// First s where |u*| exceeds tol·max.
    pub fn left_support(&self, tol: f64) -> Option<f64> {
        let m = self.max_abs();
        if m == 0.0 {
            return None;
        }
        let k = self.samples.iter().position(|v| v.abs() > tol * m)?;
        Some(self.s0 + k as f64 * self.ds)
    }

    /// Log-linear fit of the running right envelope max_{s' ≥ s}|u*(s')| between the peak
    /// region and the level floor·max. Returns (slope, r²).
    pub fn tail_fit(&self, floor: f64) -> Result<(f64, f64)> {
        let m = self.max_abs();
        if m == 0.0 {
            return Err(LabError::FitRejected("zero radiation field".into()));
        }
        let n = self.samples.len();
        let mut env = vec![0.0; n];
        let mut run: f64 = 0.0;
        for k in (0..n).rev() {
            run = run.max(self.samples[k].abs());
            env[k] = run;
        }
        let start = env.iter().position(|&e| e < 0.1 * m).unwrap_or(n);
        let stop = env.iter().position(|&e| e < floor * m).unwrap_or(n);
        if stop < start + 10 {
            return Err(LabError::FitRejected("tail window too short".into()));
        }
        let xs: Vec<f64> = (start..stop).map(|k| self.s0 + k as f64 * self.ds).collect();
        let ys: Vec<f64> = (start..stop).map(|k| env[k].ln()).collect();
        let fit = linear_fit(&xs, &ys);
        Ok((fit.slope, fit.r_squared))
    }

    /// Relative L² difference on the common s-range.
    pub fn relative_l2_difference(&self, other: &RadiationField) -> f64 {
        let a = self.s0.max(other.s0);
        let b = self.s_end().min(other.s_end());
        let ds = self.ds.min(other.ds);
        let n = ((b - a) / ds).floor() as usize;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..=n {
            let s = a + k as f64 * ds;
            let (p, q) = (self.eval(s), other.eval(s));
            num += (p - q) * (p - q);
            den += p * p;
        }
        if den == 0.0 {
            return if num == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (num / den).sqrt()
    }

    /// Multiplies the last `fraction` of the window by a smooth step down to zero.
    pub fn taper(&mut self, fraction: f64) {
        let n = self.samples.len();
        let k0 = ((1.0 - fraction) * n as f64) as usize;
        let len = (n - k0).max(1) as f64;
        for k in k0..n {
            self.samples[k] *= 1.0 - smooth_step((k - k0) as f64 / len);
        }
    }
}

/// Smallest |x| beyond which W_ℓ ≤ `threshold` on the given side (scanned outward in steps of 0.5).
pub fn extraction_radius(geom: &SdSGeometry, ell: u32, side: Side, threshold: f64) -> Result<f64> {
    let sign = side.sign();
    let mut last_bad = 0.0;
    let mut x = 0.0;
    while x < 400.0 {
        let w = geom.mode_potential(ell, sign * x)?;
        if w.abs() > threshold {
            last_bad = x;
        }
        x += 0.5;
        // W decays monotonically far out; stop one e-fold past the last violation.
        if x > last_bad + 20.0 {
            break;
        }
    }
    Ok(last_bad + 0.5)
}

/// u*(s) = v(t, x_ext)/r(x_ext) along s = (T − t) − |x_ext| from a backward series.
pub fn extract_radiation(
    series: &ProbeSeries,
    side: Side,
    ell: u32,
    r_ext: f64,
    data_time: f64,
) -> Result<RadiationField> {
    if series.times.len() < 8 {
        return Err(LabError::WindowTooSmall("probe series too short".into()));
    }
    let ds = (series.times[1] - series.times[0]).abs();
    for w in series.times.windows(2) {
        if ((w[0] - w[1]).abs() - ds).abs() > 1e-9 * ds {
            return Err(LabError::InvalidParameter("probe series must be uniform in time".into()));
        }
    }
    let x_ext = series.x.abs();
    let s0 = (data_time - series.times[0]) - x_ext;
    let samples = series.v.iter().map(|v| v / r_ext).collect();
    Ok(RadiationField { side, ell, s0, ds, samples, x_ext, data_time })
}

/// Two-radius extraction check; fails with `ExtractionInconsistent` above `tol`.
pub fn check_two_radius(a: &RadiationField, b: &RadiationField, tol: f64) -> Result<f64> {
    let d = a.relative_l2_difference(b);
    if d > tol {
        return Err(LabError::ExtractionInconsistent(d));
    }
    Ok(d)
}
