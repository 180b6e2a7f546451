//! Sectioned `key = value` run configuration.
//!
//! Units are geometric (G = c = 1) with lengths in units of the black-hole mass scale; the
//! canonical file in `configs/` documents each key.

use crate::error::RunError;
use ini::Ini;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// [geometry] mass: black-hole mass M (length).
    pub mass: f64,
    /// [geometry] lambda: cosmological constant Λ (1/length²).
    pub lambda: f64,
    /// [geometry] field_mass: Klein-Gordon mass m (1/length).
    pub field_mass: f64,
    /// [foliation] k_lo, k_hi: radii bounding the compact set K (length).
    pub k: (f64, f64),
    /// [foliation] transition_fraction: share of each gap between K and a horizon used by the cutoff.
    pub transition_fraction: f64,
    /// [foliation] a_plus: profile value −a(r₊) on the cosmological side (dimensionless).
    pub a_plus: f64,
    /// [foliation] margin: lower bound on r²/Δ_r − |F_K′| (dimensionless).
    pub margin: f64,
    /// [star] a0: amplitude A₀ of the surface z_* = −t − A₀e^{−2κ₋t} (length).
    pub a0: f64,
    /// [modes] ell: angular modes.
    pub modes: Vec<u32>,
    /// [modes] kappa_t: data times as multiples κ₋T (dimensionless).
    pub kappa_t: Vec<f64>,
    /// [evolution] dx: tortoise grid spacing (length).
    pub dx: f64,
    /// [evolution] du: null-grid spacing of the wedge solver (length).
    pub du: f64,
    /// [evolution] s_max: length of the recorded radiation fields (length).
    pub s_max: f64,
    /// [evolution] data_amp, data_vel: amplitude of the bump and of its time derivative.
    pub data_amp: f64,
    pub data_vel: f64,
    /// [decay] t_max: run length (length); fit_lo, fit_hi: fit window (length); min_r2; ell;
    /// data_vel: velocity amplitude of the decay data.
    pub decay_t_max: f64,
    pub decay_window: (f64, f64),
    pub decay_min_r2: f64,
    pub decay_modes: Vec<u32>,
    pub decay_vel: f64,
    /// [radiation] tau: backward run length (length); threshold: potential level at extraction.
    pub radiation_tau: f64,
    pub radiation_threshold: f64,
    /// [blueshift] tau: backward run length (length); offsets: radial samples per slice; slices: T − t list (length).
    pub blueshift_tau: f64,
    pub blueshift_offsets: usize,
    pub blueshift_slices: Vec<f64>,
    /// [parametrix] toy_h, wkb_h: semiclassical scales; ell_support: data support ℓ.
    pub toy_h: Vec<f64>,
    pub wkb_h: Vec<f64>,
    pub ell_support: f64,
    /// [spectral] log_profile_h: scales of the log-profile check.
    pub log_profile_h: Vec<f64>,
    /// [appendix] delta: symbol order; h: scales of the shift fit; cutoff_h: scale of the ℓ fit; ell: cutoff ratios.
    pub appendix_delta: f64,
    pub appendix_h: Vec<f64>,
    pub appendix_cutoff_h: f64,
    pub appendix_ell: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            lambda: 0.04,
            field_mass: 0.5,
            k: (3.0, 6.5),
            transition_fraction: 0.35,
            a_plus: 1.0,
            margin: 1e-3,
            a0: 1.0,
            modes: vec![0, 1, 2],
            kappa_t: vec![2.0, 3.0, 4.0, 5.0],
            dx: 0.02,
            du: 0.01,
            s_max: 450.0,
            data_amp: 1.0,
            data_vel: 0.0,
            decay_t_max: 300.0,
            decay_window: (40.0, 280.0),
            decay_min_r2: 0.98,
            decay_modes: vec![0, 1],
            decay_vel: 0.7,
            radiation_tau: 300.0,
            radiation_threshold: 1e-8,
            blueshift_tau: 400.0,
            blueshift_offsets: 3000,
            blueshift_slices: vec![3.0, 5.0, 8.0, 10.0],
            toy_h: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
            wkb_h: vec![0.04, 0.02, 0.01, 0.005],
            ell_support: 1.0,
            log_profile_h: vec![1e-1, 1e-2, 1e-3],
            appendix_delta: 0.3,
            appendix_h: vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
            appendix_cutoff_h: 1e-3,
            appendix_ell: vec![2.0, 4.0, 8.0, 16.0, 32.0],
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, RunError> {
    v.trim().parse::<f64>().map_err(|_| RunError::Validation(format!("{key}: cannot parse {v:?} as a number")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, RunError> {
    let out: Result<Vec<T>, _> = v.split(',').map(|s| s.trim().parse::<T>()).collect();
    match out {
        Ok(l) if !l.is_empty() => Ok(l),
        _ => Err(RunError::Validation(format!("{key}: cannot parse {v:?} as a list"))),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::Validation(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a config; keys absent from the text keep their canonical values.
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let ini = Ini::load_from_str(text).map_err(|e| RunError::Validation(format!("config syntax: {e}")))?;
        let mut c = Self::default();
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("");
            for (key, v) in props.iter() {
                c.set(section, key, v)?;
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, section: &str, key: &str, v: &str) -> Result<(), RunError> {
        let name = format!("{section}.{key}");
        let f = |v: &str| parse_f64(&name, v);
        match (section, key) {
            ("geometry", "mass") => self.mass = f(v)?,
            ("geometry", "lambda") => self.lambda = f(v)?,
            ("geometry", "field_mass") => self.field_mass = f(v)?,
            ("foliation", "k_lo") => self.k.0 = f(v)?,
            ("foliation", "k_hi") => self.k.1 = f(v)?,
            ("foliation", "transition_fraction") => self.transition_fraction = f(v)?,
            ("foliation", "a_plus") => self.a_plus = f(v)?,
            ("foliation", "margin") => self.margin = f(v)?,
            ("star", "a0") => self.a0 = f(v)?,
            ("modes", "ell") => self.modes = parse_list(&name, v)?,
            ("modes", "kappa_t") => self.kappa_t = parse_list(&name, v)?,
            ("evolution", "dx") => self.dx = f(v)?,
            ("evolution", "du") => self.du = f(v)?,
            ("evolution", "s_max") => self.s_max = f(v)?,
            ("evolution", "data_amp") => self.data_amp = f(v)?,
            ("evolution", "data_vel") => self.data_vel = f(v)?,
            ("decay", "t_max") => self.decay_t_max = f(v)?,
            ("decay", "fit_lo") => self.decay_window.0 = f(v)?,
            ("decay", "fit_hi") => self.decay_window.1 = f(v)?,
            ("decay", "min_r2") => self.decay_min_r2 = f(v)?,
            ("decay", "ell") => self.decay_modes = parse_list(&name, v)?,
            ("decay", "data_vel") => self.decay_vel = f(v)?,
            ("radiation", "tau") => self.radiation_tau = f(v)?,
            ("radiation", "threshold") => self.radiation_threshold = f(v)?,
            ("blueshift", "tau") => self.blueshift_tau = f(v)?,
            ("blueshift", "offsets") => {
                self.blueshift_offsets = v.trim().parse().map_err(|_| RunError::Validation(format!("{name}: {v:?}")))?
            }
            ("blueshift", "slices") => self.blueshift_slices = parse_list(&name, v)?,
            ("parametrix", "toy_h") => self.toy_h = parse_list(&name, v)?,
            ("parametrix", "wkb_h") => self.wkb_h = parse_list(&name, v)?,
            ("parametrix", "ell_support") => self.ell_support = f(v)?,
            ("spectral", "log_profile_h") => self.log_profile_h = parse_list(&name, v)?,
            ("appendix", "delta") => self.appendix_delta = f(v)?,
            ("appendix", "h") => self.appendix_h = parse_list(&name, v)?,
            ("appendix", "cutoff_h") => self.appendix_cutoff_h = f(v)?,
            ("appendix", "ell") => self.appendix_ell = parse_list(&name, v)?,
            _ => return Err(RunError::Validation(format!("unknown key {name}"))),
        }
        Ok(())
    }

    /// Checks ranges that do not need the geometry; the subextremal condition is checked when the
    /// background is built.
    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Validation(m));
        let positive = [
            ("evolution.dx", self.dx),
            ("evolution.du", self.du),
            ("evolution.s_max", self.s_max),
            ("star.a0", self.a0),
            ("foliation.margin", self.margin),
            ("decay.t_max", self.decay_t_max),
            ("radiation.tau", self.radiation_tau),
            ("radiation.threshold", self.radiation_threshold),
            ("blueshift.tau", self.blueshift_tau),
            ("parametrix.ell_support", self.ell_support),
            ("appendix.delta", self.appendix_delta),
            ("appendix.cutoff_h", self.appendix_cutoff_h),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{k} must be positive, got {v}"));
            }
        }
        if !(self.k.0 < self.k.1) {
            return bad(format!("foliation: k_lo = {} must be below k_hi = {}", self.k.0, self.k.1));
        }
        if !(self.transition_fraction > 0.0 && self.transition_fraction < 0.5) {
            return bad(format!("foliation.transition_fraction must lie in (0, 0.5), got {}", self.transition_fraction));
        }
        if !(self.decay_window.0 < self.decay_window.1 && self.decay_window.1 <= self.decay_t_max) {
            return bad(format!("decay window {:?} must lie inside [0, t_max]", self.decay_window));
        }
        if self.kappa_t.iter().any(|t| !(*t > 0.0 && *t <= 8.0)) {
            return bad(format!("modes.kappa_t entries must lie in (0, 8], got {:?}", self.kappa_t));
        }
        if self.modes.iter().chain(&self.decay_modes).any(|l| *l > 20) {
            return bad("angular modes above 20 are not supported".into());
        }
        for (k, l) in [("parametrix.toy_h", &self.toy_h), ("parametrix.wkb_h", &self.wkb_h), ("spectral.log_profile_h", &self.log_profile_h), ("appendix.h", &self.appendix_h)] {
            if l.iter().any(|h| !(*h > 0.0 && *h < 1.0)) {
                return bad(format!("{k} entries must lie in (0, 1), got {l:?}"));
            }
        }
        if self.appendix_ell.iter().any(|l| !(*l > 1.0)) {
            return bad(format!("appendix.ell entries must exceed 1, got {:?}", self.appendix_ell));
        }
        if self.blueshift_offsets < 16 {
            return bad("blueshift.offsets must be at least 16".into());
        }
        Ok(())
    }

    /// Flat `section.key → value` echo used by manifests.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        let ilist = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let pairs = [
            ("geometry.mass", self.mass.to_string()),
            ("geometry.lambda", self.lambda.to_string()),
            ("geometry.field_mass", self.field_mass.to_string()),
            ("foliation.k_lo", self.k.0.to_string()),
            ("foliation.k_hi", self.k.1.to_string()),
            ("foliation.transition_fraction", self.transition_fraction.to_string()),
            ("foliation.a_plus", self.a_plus.to_string()),
            ("foliation.margin", self.margin.to_string()),
            ("star.a0", self.a0.to_string()),
            ("modes.ell", ilist(&self.modes)),
            ("modes.kappa_t", list(&self.kappa_t)),
            ("evolution.dx", self.dx.to_string()),
            ("evolution.du", self.du.to_string()),
            ("evolution.s_max", self.s_max.to_string()),
            ("evolution.data_amp", self.data_amp.to_string()),
            ("evolution.data_vel", self.data_vel.to_string()),
            ("decay.t_max", self.decay_t_max.to_string()),
            ("decay.fit_lo", self.decay_window.0.to_string()),
            ("decay.fit_hi", self.decay_window.1.to_string()),
            ("decay.min_r2", self.decay_min_r2.to_string()),
            ("decay.ell", ilist(&self.decay_modes)),
            ("decay.data_vel", self.decay_vel.to_string()),
            ("radiation.tau", self.radiation_tau.to_string()),
            ("radiation.threshold", self.radiation_threshold.to_string()),
            ("blueshift.tau", self.blueshift_tau.to_string()),
            ("blueshift.offsets", self.blueshift_offsets.to_string()),
            ("blueshift.slices", list(&self.blueshift_slices)),
            ("parametrix.toy_h", list(&self.toy_h)),
            ("parametrix.wkb_h", list(&self.wkb_h)),
            ("parametrix.ell_support", self.ell_support.to_string()),
            ("spectral.log_profile_h", list(&self.log_profile_h)),
            ("appendix.delta", self.appendix_delta.to_string()),
            ("appendix.h", list(&self.appendix_h)),
            ("appendix.cutoff_h", self.appendix_cutoff_h.to_string()),
            ("appendix.ell", list(&self.appendix_ell)),
        ];
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Applies `--t-sweep` and `--mode-list` overrides.
    pub fn with_overrides(mut self, t_sweep: Option<&str>, modes: Option<&str>) -> Result<Self, RunError> {
        if let Some(t) = t_sweep {
            self.kappa_t = parse_list("--t-sweep", t)?;
        }
        if let Some(m) = modes {
            self.modes = parse_list("--mode-list", m)?;
        }
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_config_is_the_default() {
        let text = include_str!("../../../configs/canonical.conf");
        assert_eq!(RunConfig::parse(text).unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::parse("[geometry]\nmas = 1\n"), Err(RunError::Validation(_))));
    }

    #[test]
    fn lists_and_overrides_parse() {
        let c = RunConfig::parse("[modes]\nell = 0, 2\nkappa_t = 2.5,3\n").unwrap();
        assert_eq!(c.modes, vec![0, 2]);
        assert_eq!(c.kappa_t, vec![2.5, 3.0]);
        let c = c.with_overrides(Some("4"), Some("1")).unwrap();
        assert_eq!((c.kappa_t, c.modes), (vec![4.0], vec![1]));
    }

    #[test]
    fn bad_ranges_are_rejected() {
        assert!(RunConfig::parse("[foliation]\nk_lo = 7\n").is_err());
        assert!(RunConfig::parse("[evolution]\ndx = -1\n").is_err());
        assert!(RunConfig::parse("[decay]\nfit_hi = 400\n").is_err());
    }
}
