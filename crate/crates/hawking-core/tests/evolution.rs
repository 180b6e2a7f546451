use hawking_core::background::Background;
use hawking_core::evolution::norms::energy;
use hawking_core::evolution::{
    evolve_free, CoMovingSolver, FreeOptions, FreeSolver, FrozenWall, Grid1D, ModeState, TimeScheme, UniformWall,
};
use hawking_core::geometry::PotentialTable;

fn gaussian_state(grid: Grid1D, c: f64, w: f64) -> ModeState {
    ModeState::from_fn(0, 0.0, grid, |x| (-((x - c) / w).powi(2)).exp(), |x| {
        -2.0 * (x - c) / (w * w) * (-((x - c) / w).powi(2)).exp() * 0.3
    })
}

fn potential_samples(grid: &Grid1D, ell: u32) -> (Vec<f64>, PotentialTable) {
    let bg = Background::canonical().unwrap();
    let table = PotentialTable::new(&bg.geom, ell, -60.0, 120.0, 0.01).unwrap();
    (grid.nodes.iter().map(|&x| table.eval(x)).collect(), table)
}

#[test]
fn leapfrog_invariant_is_conserved_over_twenty_time_units() {
    let grid = Grid1D::uniform_spacing(-40.0, 40.0, 0.02).unwrap();
    let (w, _) = potential_samples(&grid, 1);
    let state = gaussian_state(grid, 2.0, 1.0);
    let mut solver = FreeSolver::new(state, w, 0.01, FreeOptions::default()).unwrap();
    let e0 = solver.discrete_energy().unwrap();
    let mut worst: f64 = 0.0;
    let mut k = 0;
    let target = 20.0;
    while solver.state.time < target - 1e-12 {
        solver.step();
        k += 1;
        if k % 100 == 0 {
            worst = worst.max(((solver.discrete_energy().unwrap() - e0) / e0).abs());
        }
    }
    assert!(worst <= 1e-6, "relative drift {worst}");
    let cont = 0.5 * energy(&solver.state, &solver.w);
    assert!(((cont - e0) / e0).abs() < 1e-2, "{cont} {e0}");
}

#[test]
fn leapfrog_is_reversible() {
    let grid = Grid1D::uniform_spacing(-40.0, 40.0, 0.02).unwrap();
    let (w, _) = potential_samples(&grid, 0);
    let state = gaussian_state(grid, 0.0, 1.5);
    let v0 = state.v.clone();
    let fwd = evolve_free(state, w.clone(), 20.0, 0.01, FreeOptions::default()).unwrap();
    let back = evolve_free(fwd, w, 0.0, 0.01, FreeOptions::default()).unwrap();
    let err = back.v.iter().zip(&v0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn richardson_order_is_two() {
    let run = |dx: f64| {
        let grid = Grid1D::uniform_spacing(-30.0, 30.0, dx).unwrap();
        let (w, _) = potential_samples(&grid, 1);
        let state = gaussian_state(grid, 0.0, 1.0);
        let out = evolve_free(state, w, 5.0, 0.5 * dx, FreeOptions::default()).unwrap();
        let stride = (0.08 / dx).round() as usize;
        out.v.iter().step_by(stride).copied().collect::<Vec<f64>>()
    };
    let a = run(0.08);
    let b = run(0.04);
    let c = run(0.02);
    let d1 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let d2 = b.iter().zip(&c).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let order = (d1 / d2).log2();
    assert!((order - 2.0).abs() <= 0.2, "order {order}");
}

#[test]
fn frozen_wall_matches_static_dirichlet_evolution() {
    let x_wall = -10.0;
    let grid = Grid1D::uniform(x_wall, 30.0, 2000).unwrap();
    let (w, table) = potential_samples(&grid, 1);
    let state = gaussian_state(grid.clone(), -4.0, 1.0);
    let opts = FreeOptions { cfl_factor: 0.9, scheme: TimeScheme::Rk4 };
    let free = evolve_free(state.clone(), w, 12.0, 0.01, opts).unwrap();
    let wall = FrozenWall(x_wall);
    let xi = Grid1D::uniform(0.0, 40.0, 2000).unwrap();
    let pot = |x: f64| table.eval(x);
    let mut solver = CoMovingSolver::new(&wall, pot, xi, state.v.clone(), state.v_t.clone(), 0.0, 1).unwrap();
    solver.run_to(12.0, 0.01, |_| {});
    let lab = solver.lab_state();
    let err = lab.v.iter().zip(&free.v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn uniformly_moving_wall_reflects_with_doppler_factor() {
    // A wall x = −c t receding from a left-moving pulse f(t + x) reflects it as
    // −f(k(t − x)) with k = (1 − c)/(1 + c).
    let c = 0.3;
    let k = (1.0 - c) / (1.0 + c);
    let f = |s: f64| (-(s - 8.0).powi(2)).exp();
    let wall = UniformWall { x0: 0.0, speed: -c };
    let xi = Grid1D::uniform(0.0, 40.0, 8000).unwrap();
    let v: Vec<f64> = xi.nodes.iter().map(|&x| f(x)).collect();
    let vt: Vec<f64> = xi.nodes.iter().map(|&x| -2.0 * (x - 8.0) * f(x)).collect();
    let mut solver = CoMovingSolver::new(&wall, |_| 0.0, xi, v, vt, 0.0, 0).unwrap();
    let dt = solver.cfl_limit(0.9, c).unwrap();
    solver.run_to(20.0, dt, |_| {});
    let lab = solver.lab_state();
    let t = lab.time;
    let err = lab
        .grid
        .nodes
        .iter()
        .zip(&lab.v)
        .map(|(&x, &val)| (val - (f(t + x) - f(k * (t - x)))).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-4, "{err}");
}

#[test]
fn wedge_reproduces_reflection_off_the_star_without_potential() {
    // With W = 0 the wedge solution is F(u) − F(ret(t_adv(v))).
    let bg = Background::canonical().unwrap();
    let star = &bg.star;
    let f = |u: f64| hawking_core::numerics::bump((u - 8.0) / 4.0);
    let t_data = 12.0;
    let plan = hawking_core::evolution::wedge::WedgePlan::new(star, t_data, 0.01).unwrap();
    let top: Vec<f64> = (0..=plan.n).map(|i| f(plan.u(i))).collect();
    let prof = plan.solve(star, |_| 0.0, &top).unwrap();
    let mut worst: f64 = 0.0;
    for (&x, &p) in prof.x.iter().zip(&prof.psi) {
        if x <= -star.a0 + 1e-12 {
            assert_eq!(p, 0.0);
            continue;
        }
        let exact = f(-x) - f(star.ret(star.t_of_adv(x)));
        worst = worst.max((p - exact).abs());
    }
    assert!(worst < 1e-6, "{worst}");
}
