//! One driver per subcommand. Each returns a [`Report`] of checks and tables; per-mode work runs on
//! the rayon pool and is collected in mode order.

use crate::config::RunConfig;
use crate::error::RunError;
use crate::report::{Check, Report, Table};
use hawking_core::background::Background;
use hawking_core::charts::FoliationSettings;
use hawking_core::evolution::asymp::{asymp_residual, run_asymp_mode, AsympRun, AsympSettings};
use hawking_core::evolution::blueshift::{blueshift_profile_error, log_offsets, slice_points};
use hawking_core::evolution::data::{free_solver, padded_grid, BumpData};
use hawking_core::evolution::decay::{fit_decay_rate, sup_series};
use hawking_core::evolution::norms::energy;
use hawking_core::evolution::probe::run_sampled;
use hawking_core::evolution::radiation::{extract_radiation, extraction_radius, Side};
use hawking_core::evolution::{evolve_free, CoMovingSolver, FreeOptions, FreeSolver, FrozenWall, Grid1D, ModeState, TimeScheme, UniformWall};
use hawking_core::geometry::{delta_r, PotentialTable, RadialPoint, SdSParams};
use hawking_core::numerics::{bisect, bump, linear_fit};
use hawking_core::parametrix::{compare_reflection, ReflectionProfile, ReflectionSettings, ToyModel, WkbApprox};
use hawking_core::spectral::appendix::{cutoff_fit, shifted_fit, shifted_norms, test_symbol};
use hawking_core::spectral::{
    dirichlet_resolvent_apply, hawking_report, log_profile_convergence, mode_forms, sine_form, thermal_target,
    tridiagonal_resolvent_at_i, zero_temperature_energy, DiscreteOperator, HalfLineSamples, HawkingSettings, Kind,
    LineSamples, LogProfileSettings, SineDomain, ThermalFunctional,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Subcommands in canonical order.
pub const EXPERIMENTS: [&str; 13] = [
    "geometry",
    "foliation",
    "star",
    "evolve-free",
    "evolve-star",
    "decay",
    "radiation",
    "blueshift",
    "wkb-check",
    "asymp",
    "hawking",
    "spectral-selftest",
    "appendix-check",
];

/// Validated configuration with its background.
pub struct Lab {
    pub cfg: RunConfig,
    pub bg: Background,
}

impl Lab {
    pub fn new(cfg: RunConfig) -> Result<Self, RunError> {
        cfg.validate()?;
        let params = SdSParams::new(cfg.mass, cfg.lambda, cfg.field_mass)?;
        let settings = FoliationSettings {
            transition_fraction: cfg.transition_fraction,
            a_plus: cfg.a_plus,
            margin: cfg.margin,
            ..FoliationSettings::default()
        };
        let bg = Background::new(params, cfg.k, cfg.a0, settings)?;
        Ok(Self { cfg, bg })
    }

    fn data(&self, vel: f64) -> Result<BumpData, RunError> {
        Ok(BumpData::filling(&self.bg.geom, self.cfg.k, self.cfg.data_amp, vel)?)
    }

    fn table(&self, ell: u32) -> Result<PotentialTable, RunError> {
        Ok(PotentialTable::new(&self.bg.geom, ell, -80.0, 160.0, 0.005)?)
    }

    fn data_times(&self) -> Vec<f64> {
        let k = self.bg.geom.kappa_minus();
        self.cfg.kappa_t.iter().map(|c| c / k).collect()
    }
}

/// Runs one experiment by name.
pub fn run(lab: &Lab, name: &str) -> Result<Report, RunError> {
    match name {
        "geometry" => geometry(lab),
        "foliation" => foliation(lab),
        "star" => star(lab),
        "evolve-free" => evolve_free_checks(lab),
        "evolve-star" => evolve_star_checks(lab),
        "decay" => decay(lab),
        "radiation" => radiation(lab),
        "blueshift" => blueshift(lab),
        "wkb-check" => wkb_check(lab),
        "asymp" => asymp(lab, &asymp_runs(lab)?),
        "hawking" => hawking(lab, &asymp_runs(lab)?),
        "spectral-selftest" => spectral_selftest(lab),
        "appendix-check" => appendix_check(lab),
        "selftest" => selftest(lab),
        other => Err(RunError::Validation(format!("unknown experiment {other}"))),
    }
}

/// Log-log slope of ys against xs.
fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly).slope
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn geometry(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("geometry");
    let g = &lab.bg.geom;
    let p = g.params;
    let hz = g.horizons;
    let m = p.mass;
    // bracketed bisection oracle for both roots
    let f = |r: f64| delta_r(&p, r);
    let rm = bisect(f, 2.0 * m, 3.0 * m, 1e-15, 500)?;
    let rp = bisect(f, 3.0 * m, (3.0 / p.lambda).sqrt(), 1e-15, 500)?;
    let root_err = (rm - hz.r_minus).abs().max((rp - hz.r_plus).abs());
    rep.check(Check::at_most(Some(1), "roots vs bisection", root_err, 1e-12));
    // surface gravities against Richardson-extrapolated differences of Δ_r
    let fd = |r: f64| {
        let d = |e: f64| (f(r + e) - f(r - e)) / (2.0 * e);
        (4.0 * d(5e-4) - d(1e-3)) / 3.0
    };
    let km = fd(hz.r_minus) / (2.0 * hz.r_minus * hz.r_minus);
    let kp = -fd(hz.r_plus) / (2.0 * hz.r_plus * hz.r_plus);
    let kerr = ((km - hz.kappa_minus) / hz.kappa_minus).abs().max(((kp - hz.kappa_plus) / hz.kappa_plus).abs());
    rep.check(Check::at_most(Some(1), "kappa vs finite differences (relative)", kerr, 1e-6));
    // r_minus → 2M as Λ → 0
    let mut sweep = Table::new("lambda_sweep", &["lambda", "r_minus", "r_plus", "kappa_minus", "kappa_plus"]);
    let lambdas = [p.lambda, 0.5 * p.lambda, 0.1 * p.lambda, 1e-2 * p.lambda, 1e-3 * p.lambda, 1e-4 * p.lambda];
    let mut rms = Vec::new();
    for l in lambdas {
        let h = hawking_core::geometry::horizon_roots(&SdSParams::new(m, l, p.m_field)?)?;
        rms.push(h.r_minus);
        sweep.push(vec![l, h.r_minus, h.r_plus, h.kappa_minus, h.kappa_plus]);
    }
    rep.check(Check::holds(Some(1), "r_minus decreases as Lambda decreases", strictly_decreasing(&rms)));
    rep.check(Check::at_most(Some(1), "r_minus - 2M at smallest Lambda", rms[rms.len() - 1] - 2.0 * m, 1e-3 * m));
    rep.table(sweep);
    // tortoise roundtrip x → r → x
    let mut worst: f64 = 0.0;
    for k in 0..=800 {
        let x = -40.0 + 0.1 * k as f64;
        let q = g.point_from_x(x)?;
        worst = worst.max((g.x_of_point(&q) - x).abs());
    }
    rep.check(Check::at_most(Some(2), "tortoise roundtrip on [-40, 40]", worst, 1e-10));
    // log slopes at both horizons
    let offs: Vec<f64> = (0..=20).map(|k| 1e-8 * 1e4f64.powf(k as f64 / 20.0)).collect();
    let ln: Vec<f64> = offs.iter().map(|d| d.ln()).collect();
    let near = |d: f64, minus: bool| {
        let q = if minus {
            RadialPoint { r: hz.r_minus + d, dm: d, dp: hz.r_plus - hz.r_minus - d }
        } else {
            RadialPoint { r: hz.r_plus - d, dm: hz.r_plus - hz.r_minus - d, dp: d }
        };
        g.x_of_point(&q)
    };
    let xm: Vec<f64> = offs.iter().map(|&d| near(d, true)).collect();
    let xp: Vec<f64> = offs.iter().map(|&d| near(d, false)).collect();
    let sm = linear_fit(&ln, &xm).slope;
    let sp = linear_fit(&ln, &xp).slope;
    let tm = 1.0 / (2.0 * hz.kappa_minus);
    let tp = -1.0 / (2.0 * hz.kappa_plus);
    rep.check(Check::at_most(Some(2), "tortoise slope at r_minus vs 1/(2 kappa_minus) (relative)", ((sm - tm) / tm).abs(), 1e-3));
    rep.check(Check::at_most(Some(2), "tortoise slope at r_plus vs -1/(2 kappa_plus) (relative)", ((sp - tp) / tp).abs(), 1e-3));
    let mut hor = Table::new("horizons", &["r_neg", "r_minus", "r_plus", "kappa_minus", "kappa_plus", "beta_minus", "beta_plus"]);
    hor.push(vec![hz.r_neg, hz.r_minus, hz.r_plus, hz.kappa_minus, hz.kappa_plus, hz.beta_minus, hz.beta_plus]);
    rep.table(hor);
    let mut tort = Table::new("tortoise", &["x", "r", "potential_l0"]);
    for k in 0..=160 {
        let x = -40.0 + 0.5 * k as f64;
        tort.push(vec![x, g.radius_from_x(x)?, g.mode_potential(0, x)?]);
    }
    rep.table(tort);
    Ok(rep)
}

pub fn foliation(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("foliation");
    let ch = &lab.bg.chart;
    let (gap, r_at) = ch.spacelike_gap_scan(10_000);
    rep.check(Check::at_least(Some(3), "spacelike gap on 1e4 radii", gap, lab.cfg.margin));
    rep.check(Check::at_most(Some(3), "|mu_K(r_minus)|", ch.mu_k_minus.abs(), 1e-8));
    let xs: Vec<f64> = (0..=120).map(|k| -30.0 + 0.5 * k as f64).collect();
    let eik = ch.eikonal_residual(lab.bg.star.t_hat_b, &xs, 1e-3)?;
    rep.check(Check::at_most(Some(3), "eikonal residual of t_hat + r_hat", eik, 1e-8));
    let mut t = Table::new("foliation_profile", &["r", "f_k", "gap_radius"]);
    let (lo, hi) = (lab.bg.geom.r_minus(), lab.bg.geom.r_plus());
    for k in 1..200 {
        let r = lo + (hi - lo) * k as f64 / 200.0;
        t.push(vec![r, ch.f_k(r), r_at]);
    }
    rep.table(t);
    Ok(rep)
}

pub fn star(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("star");
    let s = &lab.bg.star;
    rep.check(Check::at_most(None, "c_B (boundary speed in the r_hat chart)", s.c_b, 1.0 - 1e-12));
    rep.check(Check::at_most(None, "gamma_0 vs -1/A0", (s.gamma_0 + 1.0 / s.a0).abs(), 1e-6));
    rep.check(Check::holds(None, "t_hat_B finite", s.t_hat_b.is_finite()));
    let mut t = Table::new("star_constants", &["a0", "t_hat_b", "alpha_0", "beta_0", "gamma_0", "gamma_0_alt", "c_b", "lambda_prime"]);
    t.push(vec![s.a0, s.t_hat_b, s.alpha_0, s.beta_0, s.gamma_0, s.gamma_0_alt, s.c_b, s.lambda_prime]);
    rep.table(t);
    let mut path = Table::new("star_path", &["t", "z_star", "t_hat", "z_hat"]);
    for k in 0..=60 {
        let tt = 0.5 * k as f64;
        path.push(vec![tt, s.z_star(tt), s.t_hat_at(&lab.bg.chart, tt)?, s.z_hat_at(&lab.bg.chart, tt)?]);
    }
    rep.table(path);
    Ok(rep)
}

fn gaussian_state(grid: Grid1D, c: f64, w: f64) -> ModeState {
    let g = move |x: f64| (-((x - c) / w).powi(2)).exp();
    ModeState::from_fn(0, 0.0, grid, g, move |x| -2.0 * (x - c) / (w * w) * g(x) * 0.3)
}

fn potential_on(table: &PotentialTable, grid: &Grid1D) -> Vec<f64> {
    grid.nodes.iter().map(|&x| table.eval(x)).collect()
}

pub fn evolve_free_checks(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("evolve-free");
    let table = PotentialTable::new(&lab.bg.geom, 1, -60.0, 120.0, 0.01)?;
    // energy drift over Δt = 20
    let grid = Grid1D::uniform_spacing(-40.0, 40.0, 0.02)?;
    let w = potential_on(&table, &grid);
    let mut solver = FreeSolver::new(gaussian_state(grid, 2.0, 1.0), w, 0.01, FreeOptions::default())?;
    let e0 = solver.discrete_energy()?;
    let mut drift = Table::new("energy_drift", &["t", "relative_drift"]);
    let mut worst: f64 = 0.0;
    let mut k = 0;
    while solver.state.time < 20.0 - 1e-12 {
        solver.step();
        k += 1;
        if k % 100 == 0 {
            let d = ((solver.discrete_energy()? - e0) / e0).abs();
            worst = worst.max(d);
            drift.push(vec![solver.state.time, d]);
        }
    }
    rep.check(Check::at_most(Some(4), "energy drift over 20 time units", worst, 1e-6));
    let cont = 0.5 * energy(&solver.state, &solver.w);
    rep.check(Check::at_most(None, "continuum energy vs discrete invariant", ((cont - e0) / e0).abs(), 1e-2));
    rep.table(drift);
    // reversibility
    let grid = Grid1D::uniform_spacing(-40.0, 40.0, 0.02)?;
    let w0 = potential_on(&lab.table(0)?, &grid);
    let state = gaussian_state(grid, 0.0, 1.5);
    let v0 = state.v.clone();
    let fwd = evolve_free(state, w0.clone(), 20.0, 0.01, FreeOptions::default())?;
    let back = evolve_free(fwd, w0, 0.0, 0.01, FreeOptions::default())?;
    let rev = back.v.iter().zip(&v0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    rep.check(Check::at_most(Some(4), "forward-backward reversibility", rev, 1e-8));
    // Richardson order
    let runs = [0.08, 0.04, 0.02]
        .iter()
        .map(|&dx| {
            let grid = Grid1D::uniform_spacing(-30.0, 30.0, dx)?;
            let w = potential_on(&table, &grid);
            let out = evolve_free(gaussian_state(grid, 0.0, 1.0), w, 5.0, 0.5 * dx, FreeOptions::default())?;
            let stride = (0.08 / dx).round() as usize;
            Ok(out.v.iter().step_by(stride).copied().collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let order = (diff(&runs[0], &runs[1]) / diff(&runs[1], &runs[2])).log2();
    rep.check(Check::within(Some(4), "Richardson order in dx", order, 2.0, 0.2));
    Ok(rep)
}

pub fn evolve_star_checks(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("evolve-star");
    let table = PotentialTable::new(&lab.bg.geom, 1, -60.0, 120.0, 0.01)?;
    // a frozen wall reproduces the static Dirichlet evolution
    let x_wall = -10.0;
    let grid = Grid1D::uniform(x_wall, 30.0, 2000)?;
    let w = potential_on(&table, &grid);
    let state = gaussian_state(grid, -4.0, 1.0);
    let opts = FreeOptions { cfl_factor: 0.9, scheme: TimeScheme::Rk4 };
    let free = evolve_free(state.clone(), w, 12.0, 0.01, opts)?;
    let wall = FrozenWall(x_wall);
    let pot = |x: f64| table.eval(x);
    let xi = Grid1D::uniform(0.0, 40.0, 2000)?;
    let mut solver = CoMovingSolver::new(&wall, pot, xi, state.v.clone(), state.v_t.clone(), 0.0, 1)?;
    solver.run_to(12.0, 0.01, |_| {});
    let lab_state = solver.lab_state();
    let err = lab_state.v.iter().zip(&free.v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    rep.check(Check::at_most(Some(4), "frozen wall vs static Dirichlet", err, 1e-8));
    // receding wall: reflection with the Doppler factor (1 − c)/(1 + c)
    let c = 0.3;
    let k = (1.0 - c) / (1.0 + c);
    let f = |s: f64| (-(s - 8.0).powi(2)).exp();
    let moving = UniformWall { x0: 0.0, speed: -c };
    let xi = Grid1D::uniform(0.0, 40.0, 8000)?;
    let v: Vec<f64> = xi.nodes.iter().map(|&x| f(x)).collect();
    let vt: Vec<f64> = xi.nodes.iter().map(|&x| -2.0 * (x - 8.0) * f(x)).collect();
    let mut solver = CoMovingSolver::new(&moving, |_| 0.0, xi, v, vt, 0.0, 0)?;
    let dt = solver.cfl_limit(0.9, c)?;
    solver.run_to(20.0, dt, |_| {});
    let out = solver.lab_state();
    let t = out.time;
    let mut profile = Table::new("moving_wall", &["x", "v", "exact"]);
    let mut worst: f64 = 0.0;
    for (i, (&x, &val)) in out.grid.nodes.iter().zip(&out.v).enumerate() {
        let exact = f(t + x) - f(k * (t - x));
        worst = worst.max((val - exact).abs());
        if i % 40 == 0 {
            profile.push(vec![x, val, exact]);
        }
    }
    rep.check(Check::at_most(None, "receding wall vs Doppler-shifted reflection", worst, 1e-4));
    rep.table(profile);
    Ok(rep)
}

pub fn decay(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("decay");
    let cfg = &lab.cfg;
    let g = &lab.bg.geom;
    let xa = g.tortoise_x(cfg.k.0)?;
    let xb = g.tortoise_x(cfg.k.1)?;
    let vel = cfg.decay_vel;
    let jobs: Vec<(u32, f64)> = cfg.decay_modes.iter().flat_map(|&l| [(l, 1.0), (l, -1.0)]).collect();
    let fits = jobs
        .par_iter()
        .map(|&(ell, dir)| {
            let table = lab.table(ell)?;
            let data = lab.data(vel)?;
            let grid = padded_grid(data.support(), (xa, xb), cfg.decay_t_max, cfg.dx, 2.0)?;
            let s = free_solver(g, &table, &data, ell, 0.0, grid, dir * 0.45 * cfg.dx)?;
            let (t, v) = sup_series(g, s, (xa, xb), dir * cfg.decay_t_max)?;
            let fit = fit_decay_rate(&t, &v, cfg.decay_window, 0.0)?;
            Ok((fit, t, v))
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let mut rates = Table::new("decay_rates", &["ell", "direction", "nu", "r_squared"]);
    let mut series = Table::new("sup_series", &["ell", "direction", "t", "sup"]);
    for (((ell, dir), (fit, t, v)), k) in jobs.iter().zip(&fits).zip(0..) {
        rates.push(vec![*ell as f64, *dir, fit.nu, fit.r_squared]);
        let stride = (t.len() / 300).max(1);
        for i in (0..t.len()).step_by(stride) {
            series.push(vec![*ell as f64, *dir, t[i], v[i]]);
        }
        let label = if *dir > 0.0 { "forward" } else { "backward" };
        rep.check(Check::at_least(Some(5), &format!("l={ell} {label} decay rate"), fit.nu, 1e-12));
        rep.check(Check::at_least(Some(5), &format!("l={ell} {label} fit r^2"), fit.r_squared, cfg.decay_min_r2));
        if *dir < 0.0 {
            let fwd = &fits[k - 1].0;
            rep.check(Check::at_most(Some(5), &format!("l={ell} backward vs forward rate (relative)"), ((fit.nu - fwd.nu) / fwd.nu).abs(), 0.1));
        }
    }
    rep.table(rates);
    rep.table(series);
    Ok(rep)
}

pub fn radiation(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("radiation");
    let cfg = &lab.cfg;
    let g = &lab.bg.geom;
    let results = cfg
        .modes
        .par_iter()
        .map(|&ell| {
            let xm = extraction_radius(g, ell, Side::Minus, cfg.radiation_threshold)?;
            let xp = extraction_radius(g, ell, Side::Plus, cfg.radiation_threshold)?;
            let data = lab.data(cfg.data_vel)?;
            let tau = cfg.radiation_tau;
            let grid = padded_grid(data.support(), (-xm - 5.0, xp + 5.0), tau, cfg.dx, 2.0)?;
            let solver = free_solver(g, &lab.table(ell)?, &data, ell, 0.0, grid, -0.45 * cfg.dx)?;
            let run = run_sampled(solver, -tau, &[-xm, -xm - 5.0, xp, xp + 5.0], vec![])?;
            let r = |x: f64| g.radius_from_x(x);
            let a = extract_radiation(&run.series[0], Side::Minus, ell, r(-xm)?, 0.0)?;
            let b = extract_radiation(&run.series[1], Side::Minus, ell, r(-xm - 5.0)?, 0.0)?;
            let c = extract_radiation(&run.series[2], Side::Plus, ell, r(xp)?, 0.0)?;
            let d = extract_radiation(&run.series[3], Side::Plus, ell, r(xp + 5.0)?, 0.0)?;
            Ok((ell, xm, xp, a, b, c, d))
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let mut summary = Table::new(
        "radiation_summary",
        &["ell", "x_ext_minus", "x_ext_plus", "two_radius_minus", "two_radius_plus", "left_support_minus", "left_support_plus", "tail_rate_minus", "tail_rate_plus"],
    );
    let mut fields = Table::new("radiation_fields", &["ell", "s", "u_minus", "u_plus"]);
    for (ell, xm, xp, a, b, c, d) in results {
        let dm = a.relative_l2_difference(&b);
        let dp = c.relative_l2_difference(&d);
        rep.check(Check::at_most(Some(6), &format!("l={ell} two-radius consistency minus"), dm, 0.02));
        rep.check(Check::at_most(Some(6), &format!("l={ell} two-radius consistency plus"), dp, 0.02));
        let lm = a.left_support(1e-10);
        let lp = c.left_support(1e-10);
        rep.check(Check::holds(Some(6), &format!("l={ell} left support found"), lm.is_some() && lp.is_some()));
        let mut tails = [f64::NAN; 2];
        for (k, (u, name)) in [(&a, "minus"), (&c, "plus")].into_iter().enumerate() {
            match u.tail_fit(1e-8) {
                Ok((rate, r2)) => {
                    tails[k] = rate;
                    rep.check(Check::holds(Some(6), &format!("l={ell} {name} tail decays"), rate < 0.0));
                    rep.check(Check::at_least(Some(6), &format!("l={ell} {name} tail fit r^2"), r2, 0.98));
                }
                Err(e) => rep.check(Check::failed(Some(6), &format!("l={ell} {name} tail fit"), &e)),
            }
        }
        summary.push(vec![ell as f64, xm, xp, dm, dp, lm.unwrap_or(f64::NAN), lp.unwrap_or(f64::NAN), tails[0], tails[1]]);
        let mut s = a.s0.min(c.s0);
        while s <= a.s_end().max(c.s_end()) {
            fields.push(vec![ell as f64, s, a.eval(s), c.eval(s)]);
            s += 0.5;
        }
    }
    rep.table(summary);
    rep.table(fields);
    Ok(rep)
}

pub fn blueshift(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("blueshift");
    let cfg = &lab.cfg;
    let g = &lab.bg.geom;
    let ch = &lab.bg.chart;
    let ell = 0;
    let data = lab.data(cfg.data_vel)?;
    let xm = extraction_radius(g, ell, Side::Minus, cfg.radiation_threshold)?;
    let tau = cfg.blueshift_tau;
    let grid = padded_grid(data.support(), (-xm, 0.0), tau, cfg.dx, 2.0)?;
    let offs = log_offsets(1e-13, cfg.k.0 - g.r_minus(), cfg.blueshift_offsets);
    let mut points = Vec::new();
    let mut radii = Vec::new();
    for &ts in &cfg.blueshift_slices {
        let (r, p) = slice_points(ch, -ts, &offs)?;
        radii.push(r);
        points.extend(p);
    }
    let solver = free_solver(g, &lab.table(ell)?, &data, ell, 0.0, grid, -0.45 * cfg.dx)?;
    let run = run_sampled(solver, -tau, &[-xm], points.clone())?;
    let us = extract_radiation(&run.series[0], Side::Minus, ell, g.radius_from_x(-xm)?, 0.0)?;
    let n = offs.len();
    let mut t = Table::new("blueshift_errors", &["t_minus_tau", "h", "sup_error", "h_half_error", "angular_norm"]);
    let mut sup = Vec::new();
    for (k, &ts) in cfg.blueshift_slices.iter().enumerate() {
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let (time, _) = points[k * n + i];
                if time > 0.0 {
                    0.0
                } else {
                    run.points[k * n + i].map(|p| p.0).unwrap_or(f64::NAN) / radii[k][i]
                }
            })
            .collect();
        let e = blueshift_profile_error(ch, &us, ts, &radii[k], &vals, ell)?;
        sup.push(e.sup_error);
        t.push(vec![ts, e.h, e.sup_error, e.h_half_error, e.angular_norm]);
    }
    rep.check(Check::holds(Some(7), "profile error strictly decreasing in T - t", strictly_decreasing(&sup)));
    rep.table(t);
    Ok(rep)
}

pub fn wkb_check(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("wkb-check");
    let cfg = &lab.cfg;
    let bg = &lab.bg;
    // toy model: closed form vs characteristics, and the linearisation gap
    let mut toy = Table::new("toy_gap", &["h", "closed_vs_characteristics", "gap_h_half"]);
    let mut gaps = Vec::new();
    let mut worst_all: f64 = 0.0;
    for &h in &cfg.toy_h {
        let m = ToyModel::new(&bg.chart, &bg.star, ReflectionProfile::new(cfg.ell_support, h, 1.0)?);
        let (a, b) = m.window();
        let mut worst: f64 = 0.0;
        for k in 0..8 {
            let t = a + (b - a) * k as f64 / 8.0;
            let z = m.boundary(t)?;
            for j in 0..40 {
                let r = z + 4.0 * h * cfg.ell_support * j as f64 / 40.0;
                worst = worst.max((m.closed_form(t, r)? - m.characteristics(t, r)?).abs());
            }
        }
        worst_all = worst_all.max(worst);
        let gap = m.linearization_gap(m.linear_window().0, 2048)?;
        gaps.push(gap);
        toy.push(vec![h, worst, gap]);
    }
    rep.check(Check::at_most(Some(8), "toy closed form vs characteristics", worst_all, 1e-6));
    rep.check(Check::within(Some(8), "toy linearisation gap slope in h", log_slope(&cfg.toy_h, &gaps), 0.5, 0.15));
    rep.table(toy);
    // WKB parametrix against the wedge solver
    let st = ReflectionSettings { du: cfg.du, ..ReflectionSettings::default() };
    let reports = cfg
        .wkb_h
        .par_iter()
        .map(|&h| Ok(compare_reflection(bg, &ReflectionProfile::new(cfg.ell_support, h, 1.0)?, &st)?))
        .collect::<Result<Vec<_>, RunError>>()?;
    let errs: Vec<f64> = reports.iter().map(|r| r.err_h_half).collect();
    let mut wkb = Table::new("wkb_errors", &["h", "err_h_half", "err_dt_h_minus_half"]);
    for r in &reports {
        wkb.push(vec![r.h, r.err_h_half, r.err_dt_h_minus_half]);
    }
    rep.check(Check::holds(Some(9), "WKB error strictly decreasing in h", strictly_decreasing(&errs)));
    rep.check(Check::at_least(Some(9), "WKB error slope in h", log_slope(&cfg.wkb_h, &errs), 0.5));
    let w = WkbApprox::new(&bg.chart, &bg.star, ReflectionProfile::new(cfg.ell_support, cfg.wkb_h[0], 1.0)?);
    let mut transport: f64 = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            transport = transport.max(w.transport_residual(0.5 + i as f64, 0.05 + 1.2 * j as f64, 1e-3)?);
        }
    }
    rep.check(Check::at_most(Some(9), "transport equation residual", transport, 1e-8));
    rep.table(wkb);
    Ok(rep)
}

/// Wedge runs for every configured mode at the configured data times.
pub fn asymp_runs(lab: &Lab) -> Result<Vec<AsympRun>, RunError> {
    let cfg = &lab.cfg;
    let st = AsympSettings { dx: cfg.dx, du: cfg.du, s_max: cfg.s_max, ..AsympSettings::default() };
    let data = lab.data(cfg.data_vel)?;
    let ts = lab.data_times();
    cfg.modes.par_iter().map(|&ell| Ok(run_asymp_mode(&lab.bg, &data, ell, &ts, &st)?)).collect()
}

pub fn asymp(lab: &Lab, runs: &[AsympRun]) -> Result<Report, RunError> {
    let mut rep = Report::new("asymp");
    let kt = &lab.cfg.kappa_t;
    let mut t = Table::new(
        "asymp_residuals",
        &["ell", "kappa_t", "t_data", "eps0_h_half", "eps1_h_minus_half", "sup_right", "far_field_rel_l2", "amplitude_factor"],
    );
    let far_index = kt.iter().enumerate().min_by(|a, b| (a.1 - 4.0).abs().total_cmp(&(b.1 - 4.0).abs())).map(|(i, _)| i).unwrap_or(0);
    for run in runs {
        let ell = run.ell;
        let res = run.states.par_iter().map(|s| asymp_residual(&lab.bg, run, s)).collect::<Result<Vec<_>, _>>()?;
        let ts: Vec<f64> = res.iter().map(|r| r.t_data).collect();
        let e0: Vec<f64> = res.iter().map(|r| r.eps0_h_half).collect();
        let e1: Vec<f64> = res.iter().map(|r| r.eps1_h_minus_half).collect();
        for (k, r) in res.iter().enumerate() {
            t.push(vec![ell as f64, kt[k], r.t_data, r.eps0_h_half, r.eps1_h_minus_half, r.sup_right, r.far_field_rel_l2, r.amplitude_factor]);
        }
        for (name, e) in [("eps0", &e0), ("eps1", &e1)] {
            rep.check(Check::holds(Some(10), &format!("l={ell} {name} strictly decreasing in T"), strictly_decreasing(e)));
            let ln: Vec<f64> = e.iter().map(|v| v.ln()).collect();
            rep.check(Check::at_least(Some(10), &format!("l={ell} {name} fitted decay rate"), -linear_fit(&ts, &ln).slope, 1e-12));
        }
        rep.check(Check::at_most(
            Some(10),
            &format!("l={ell} far-field relative L2 at kappa_minus T = {}", kt[far_index]),
            res[far_index].far_field_rel_l2,
            0.02,
        ));
        let f = &run.fields;
        rep.check(Check::at_most(None, &format!("l={ell} two-radius consistency minus"), f.minus.relative_l2_difference(&f.minus_alt), 0.02));
        rep.check(Check::at_most(None, &format!("l={ell} two-radius consistency plus"), f.plus.relative_l2_difference(&f.plus_alt), 0.02));
    }
    rep.table(t);
    Ok(rep)
}

fn log_profile_settings(lab: &Lab) -> LogProfileSettings {
    LogProfileSettings {
        kappa: lab.bg.geom.kappa_minus(),
        gamma_0: lab.bg.star.gamma_0,
        z: -lab.bg.star.a0,
        cut: (-0.9, -0.6),
        points_per_scale: 40.0,
        s_left: 0.0,
    }
}

pub fn hawking(lab: &Lab, runs: &[AsympRun]) -> Result<Report, RunError> {
    let mut rep = Report::new("hawking");
    let st = HawkingSettings::default();
    let hz = &lab.bg.geom.horizons;
    let jobs: Vec<(usize, usize)> = runs.iter().enumerate().flat_map(|(i, r)| (0..r.states.len()).map(move |k| (i, k))).collect();
    let flat = jobs
        .par_iter()
        .map(|&(i, k)| mode_forms(&lab.bg, runs[i].ell, &runs[i].states[k], &st))
        .collect::<Result<Vec<_>, _>>()?;
    let mut forms: Vec<Vec<_>> = runs.iter().map(|_| Vec::new()).collect();
    for ((i, _), f) in jobs.iter().zip(flat) {
        forms[*i].push(f);
    }
    let fields: Vec<_> = runs.iter().map(|r| (&r.fields.minus, &r.fields.plus)).collect();
    let hr = hawking_report(&lab.bg, &forms, &fields, &st)?;
    let mut t = Table::new("hawking", &["T", "Q", "Q_target", "relative_error", "fitted_rate", "near", "far"]);
    for r in &hr.rows {
        t.push(vec![r.t_data, r.q, r.q_target, r.rel_err, hr.rate, r.near, r.far]);
    }
    rep.table(t);
    let mut m = Table::new("hawking_modes", &["ell", "T", "nodes", "phi", "psi", "near", "far"]);
    for (run, fs) in runs.iter().zip(&forms) {
        for f in fs {
            m.push(vec![run.ell as f64, f.t_data, f.nodes as f64, f.phi, f.psi, f.near, f.far]);
        }
    }
    rep.table(m);
    let mut tg = Table::new("hawking_targets", &["minus", "plus", "total", "beta_minus", "beta_plus", "beta_minus_fit", "beta_plus_fit"]);
    tg.push(vec![
        hr.targets.minus,
        hr.targets.plus,
        hr.targets.total(),
        hz.beta_minus,
        hz.beta_plus,
        hr.beta_minus_fit.clone().unwrap_or(f64::NAN),
        hr.beta_plus_fit.clone().unwrap_or(f64::NAN),
    ]);
    rep.table(tg);
    rep.check(Check::holds(Some(13), "Q relative error monotone decreasing in T", hr.monotone));
    for (name, fit, target) in [("beta_minus", &hr.beta_minus_fit, hz.beta_minus), ("beta_plus", &hr.beta_plus_fit, hz.beta_plus)] {
        match fit {
            Ok(b) => rep.check(Check::at_most(Some(13), &format!("fitted {name} (relative error)"), ((b - target) / target).abs(), 0.05)),
            Err(e) => rep.check(Check::failed(Some(13), &format!("fitted {name}"), e)),
        }
    }
    // log-profile fallback at the horizon temperature
    let conv = log_profile_convergence(&log_profile_settings(lab), &lab.cfg.log_profile_h)?;
    let mut lp = Table::new("log_profile", &["h", "relative_error"]);
    for (h, e) in &conv {
        lp.push(vec![*h, *e]);
    }
    rep.table(lp);
    rep.check(Check::at_most(None, "log-profile fallback at the smallest h", conv[conv.len() - 1].1, 0.02));
    Ok(rep)
}

/// Random combination of four bumps, seeded.
fn random_vector(nodes: &[f64], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(f64, f64, f64)> =
        (0..4).map(|_| (rng.gen_range(-15.0..30.0), rng.gen_range(1.0..6.0), rng.gen_range(-1.0..1.0))).collect();
    nodes.iter().map(|&x| bumps.iter().map(|&(c, w, a)| a * bump((x - c) / w)).sum()).collect()
}

pub fn spectral_selftest(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("spectral-selftest");
    let g = &lab.bg.geom;
    let hz = &g.horizons;
    // Route A (eigendecomposition) against Route B (partial fractions) on each mode operator, for
    // 20 seeded random smooth vectors
    let (z, x_max, dx): (f64, f64, f64) = (-20.0, 40.0, 0.1);
    let n = ((x_max - z) / dx).round() as usize;
    let nodes: Vec<f64> = (1..n).map(|k| z + k as f64 * dx).collect();
    let vectors: Vec<Vec<f64>> = (0..20u64).map(|seed| random_vector(&nodes, seed)).collect();
    let betas = [hz.beta_minus, hz.beta_plus];
    let per_mode = lab
        .cfg
        .modes
        .par_iter()
        .map(|&ell| {
            let op = DiscreteOperator::for_mode(g, ell, z, x_max, nodes.clone())?;
            let spec = op.spectrum();
            let mut rows = Vec::new();
            for (i, v) in vectors.iter().enumerate() {
                for beta in betas {
                    for kind in [Kind::Phi, Kind::Psi] {
                        let f = ThermalFunctional::new(beta, kind)?;
                        let a = f.quad_form_spectral(&op, &spec, v)?;
                        let b = f.quad_form_series(&op, v)?;
                        let k = if kind == Kind::Phi { 0.0 } else { 1.0 };
                        rows.push(vec![ell as f64, i as f64, beta, k, a, b.value, b.k_max as f64, ((a - b.value) / a).abs()]);
                    }
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let mut routes = Table::new("route_comparison", &["ell", "vector", "beta", "kind", "route_a", "route_b", "k_max", "relative_difference"]);
    let mut worst: f64 = 0.0;
    for row in per_mode.into_iter().flatten() {
        worst = worst.max(row[7]);
        routes.push(row);
    }
    rep.check(Check::at_most(Some(11), "route A vs route B on 20 random vectors (relative)", worst, 1e-6));
    rep.table(routes);
    // Parseval for the unit symbol
    let hv = HalfLineSamples::from_fn(-1.0, 0.01, 799, |x| bump((x - 2.0) / 2.5) * (1.0 + 0.4 * x));
    let norm = hv.norm_sq();
    let pi = ((sine_form(|_| 1.0, &hv, SineDomain::Interval)? - norm) / norm).abs();
    let ph = ((sine_form(|_| 1.0, &hv, SineDomain::HalfLine { tol: 1e-10 })? - norm) / norm).abs();
    rep.check(Check::at_most(Some(11), "Parseval on the interval", pi, 1e-8));
    rep.check(Check::at_most(Some(11), "Parseval on the half line", ph, 1e-8));
    // resolvent kernel at λ = i against a tridiagonal solve
    let f = |y: f64| bump(y - 1.5) * (1.0 + 0.3 * y);
    let xs = [-0.5, 0.3, 0.9, 1.5, 2.2, 3.0];
    let kernel = dirichlet_resolvent_apply(-1.0, Complex64::i(), f, (0.5, 2.5), &xs);
    let oracle = tridiagonal_resolvent_at_i(-1.0, f, &xs, 42.0)?;
    let kerr = kernel.iter().zip(&oracle).map(|(k, o)| (k.re - o).abs().max(k.im.abs())).fold(0.0, f64::max);
    rep.check(Check::at_most(Some(11), "resolvent kernel at i vs tridiagonal solve", kerr, 1e-8));
    // thermal expectation dominates the zero-temperature energy
    let ls = LineSamples::from_fn(-2.0, 0.01, 30000, hawking_core::spectral::thermal::log_profile_test_fn);
    let th = thermal_target(&ls, hz.beta_minus, Kind::Phi)?;
    let zt = zero_temperature_energy(&ls)?;
    rep.check(Check::holds(None, "thermal target exceeds the zero-temperature energy", th >= zt));
    // log-profile form against the thermal target
    let conv = log_profile_convergence(&log_profile_settings(lab), &lab.cfg.log_profile_h)?;
    let errs: Vec<f64> = conv.iter().map(|c| c.1).collect();
    rep.check(Check::at_most(Some(12), "log-profile relative error at the smallest h", errs[errs.len() - 1], 0.02));
    rep.check(Check::holds(Some(12), "log-profile error strictly decreasing in h", strictly_decreasing(&errs)));
    let mut lp = Table::new("log_profile", &["h", "relative_error"]);
    for (h, e) in &conv {
        lp.push(vec![*h, *e]);
    }
    rep.table(lp);
    Ok(rep)
}

pub fn appendix_check(lab: &Lab) -> Result<Report, RunError> {
    let mut rep = Report::new("appendix-check");
    let cfg = &lab.cfg;
    let delta = cfg.appendix_delta;
    let f = test_symbol(delta);
    let (ff, fg) = shifted_fit(f, |_| 0.5, delta, &cfg.appendix_h)?;
    rep.check(Check::at_least(Some(14), "shifted argument: H^1/2 slope in h", ff.slope, 0.8 * delta));
    rep.check(Check::at_least(Some(14), "shifted argument: H^-1/2 slope in h", fg.slope, 0.8 * delta));
    let cf = cutoff_fit(f, delta, cfg.appendix_cutoff_h, &cfg.appendix_ell)?;
    rep.check(Check::at_least(Some(14), "inner cutoff: decay rate in l", -cf.slope, 0.8 * delta / 2.0));
    let (zero, _) = shifted_norms(&f, &|_| 0.0, cfg.appendix_h[0])?;
    rep.check(Check::at_most(None, "zero shift gives zero", zero, 0.0));
    let mut t = Table::new("shifted_norms", &["h", "f_h_half", "g_h_minus_half"]);
    for k in 0..ff.params.len() {
        t.push(vec![ff.params[k], ff.norms[k], fg.norms[k]]);
    }
    rep.table(t);
    let mut c = Table::new("cutoff_norms", &["ell", "norm"]);
    for (l, n) in cf.params.iter().zip(&cf.norms) {
        c.push(vec![*l, *n]);
    }
    rep.table(c);
    let mut s = Table::new("slopes", &["fit", "slope", "r_squared"]);
    s.push(vec![0.0, ff.slope, ff.r_squared]);
    s.push(vec![1.0, fg.slope, fg.r_squared]);
    s.push(vec![2.0, cf.slope, cf.r_squared]);
    rep.table(s);
    Ok(rep)
}

/// Every experiment once, sharing the wedge runs between `asymp` and `hawking`. An experiment that
/// stops with an error contributes a failed check instead of aborting the others.
pub fn selftest_reports(lab: &Lab) -> Vec<Report> {
    let mut out = Vec::new();
    let runs = asymp_runs(lab);
    for name in EXPERIMENTS {
        let r = match (name, &runs) {
            ("asymp", Ok(runs)) => asymp(lab, runs),
            ("hawking", Ok(runs)) => hawking(lab, runs),
            ("asymp" | "hawking", Err(e)) => Err(e.clone()),
            _ => run(lab, name),
        };
        out.push(r.unwrap_or_else(|e| {
            let mut rep = Report::new(name);
            rep.check(Check::failed(criterion_of(name), "run", &e));
            rep
        }));
    }
    out
}

/// Acceptance criterion covered by an experiment, for errors raised before any check.
fn criterion_of(name: &str) -> Option<u8> {
    Some(match name {
        "geometry" => 1,
        "foliation" => 3,
        "evolve-free" | "evolve-star" => 4,
        "decay" => 5,
        "radiation" => 6,
        "blueshift" => 7,
        "wkb-check" => 9,
        "asymp" => 10,
        "hawking" => 13,
        "spectral-selftest" => 11,
        "appendix-check" => 14,
        _ => return None,
    })
}

/// Criterion number, pass flag and the failing check names, for criteria 1 through 14.
pub fn criteria(reports: &[Report]) -> Vec<(u8, bool, Vec<String>)> {
    (1..=14)
        .map(|c| {
            let checks: Vec<_> = reports.iter().flat_map(|r| &r.checks).filter(|k| k.criterion == Some(c)).collect();
            let failing: Vec<String> = checks.iter().filter(|k| !k.pass).map(|k| format!("{} = {:e} ({})", k.name, k.measured, k.limit)).collect();
            (c, !checks.is_empty() && failing.is_empty(), failing)
        })
        .collect()
}

pub fn selftest(lab: &Lab) -> Result<Report, RunError> {
    let reports = selftest_reports(lab);
    let mut rep = Report::new("selftest");
    let mut matrix = Table::new("criteria", &["criterion", "pass", "checks", "failing"]);
    for (c, pass, failing) in criteria(&reports) {
        let n = reports.iter().flat_map(|r| &r.checks).filter(|k| k.criterion == Some(c)).count();
        matrix.push(vec![c as f64, if pass { 1.0 } else { 0.0 }, n as f64, failing.len() as f64]);
    }
    for r in reports {
        rep.merge(r);
    }
    rep.table(matrix);
    Ok(rep)
}
