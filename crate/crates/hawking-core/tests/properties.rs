use hawking_core::background::Background;
use hawking_core::geometry::{horizon_roots, SdSGeometry, SdSParams};
use hawking_core::numerics::bump;
use hawking_core::spectral::{
    sine_form, thermal_target, zero_temperature_energy, DiscreteOperator, HalfLineSamples, Kind, LineSamples,
    SineDomain, ThermalFunctional,
};
use hawking_core::LabError;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn canonical() -> &'static Background {
    static BG: OnceLock<Background> = OnceLock::new();
    BG.get_or_init(|| Background::canonical().unwrap())
}

/// Smooth random vector: a random combination of bumps on the operator nodes.
fn random_vector(nodes: &[f64], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(f64, f64, f64)> =
        (0..4).map(|_| (rng.gen_range(-8.0..20.0), rng.gen_range(1.0..5.0), rng.gen_range(-1.0..1.0))).collect();
    nodes.iter().map(|&x| bumps.iter().map(|&(c, w, a)| a * bump((x - c) / w)).sum()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn subextremal_parameters_have_ordered_roots(m in 0.2f64..3.0, s in 0.01f64..0.95) {
        let lambda = s / (9.0 * m * m);
        let h = horizon_roots(&SdSParams::new(m, lambda, 0.5).unwrap()).unwrap();
        prop_assert!(h.r_neg < 0.0 && 2.0 * m < h.r_minus && h.r_minus < 3.0 * m && 3.0 * m < h.r_plus);
        prop_assert!(h.kappa_minus > h.kappa_plus && h.kappa_plus > 0.0);
    }

    #[test]
    fn superextremal_parameters_are_rejected(m in 0.2f64..3.0, s in 1.0f64..3.0) {
        let lambda = s / (9.0 * m * m);
        prop_assert!(matches!(SdSParams::new(m, lambda, 0.5), Err(LabError::SubextremalViolation(_))));
    }

    #[test]
    fn tortoise_roundtrip(x in -40.0f64..40.0) {
        let g = &canonical().geom;
        let p = g.point_from_x(x).unwrap();
        prop_assert!((g.x_of_point(&p) - x).abs() <= 1e-10);
    }

    #[test]
    fn tortoise_is_increasing(r in 2.2f64..7.3, d in 1e-6f64..0.05) {
        let g: &SdSGeometry = &canonical().geom;
        prop_assert!(g.tortoise_x(r + d).unwrap() > g.tortoise_x(r).unwrap());
    }

    #[test]
    fn parseval_for_unit_symbol(c in 1.0f64..4.0, w in 0.5f64..2.5, a in -1.0f64..1.0) {
        let v = HalfLineSamples::from_fn(-1.0, 0.01, 799, |x| bump((x - c) / w) * (1.0 + a * x));
        let n = v.norm_sq();
        let s = sine_form(|_| 1.0, &v, SineDomain::Interval).unwrap();
        prop_assert!((s - n).abs() <= 1e-8 * n);
    }

    #[test]
    fn sine_form_is_monotone_in_the_symbol(c in 1.0f64..4.0, w in 0.5f64..2.5) {
        let v = HalfLineSamples::from_fn(-1.0, 0.01, 799, |x| bump((x - c) / w));
        let a = sine_form(|z| z, &v, SineDomain::Interval).unwrap();
        let b = sine_form(|z| z + 0.5, &v, SineDomain::Interval).unwrap();
        prop_assert!(b >= a);
    }

    #[test]
    fn psi_exceeds_its_zero_mode_term(beta in 0.5f64..60.0, z in 1e-4f64..10.0) {
        // ψ(z) − 1/(βz) = (2/β)Σ 1/(z + c_k²) lies in (0, β/3]
        let f = ThermalFunctional::psi(beta).unwrap();
        let d = f.eval(z) - 1.0 / (beta * z);
        prop_assert!(d > 0.0 && d <= beta / 3.0 * (1.0 + 1e-9));
    }

    #[test]
    fn phi_dominates_the_square_root(beta in 0.5f64..60.0, z in 0.0f64..10.0) {
        let f = ThermalFunctional::phi(beta).unwrap();
        prop_assert!(f.eval(z) >= z.sqrt() * (1.0 - 4.0 * f64::EPSILON));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn routes_agree_on_mode_operators(seed in any::<u64>(), ell in 0u32..3, plus in any::<bool>()) {
        let bg = canonical();
        let (z, x_max, dx): (f64, f64, f64) = (-12.0, 30.0, 0.1);
        let n = ((x_max - z) / dx).round() as usize;
        let nodes: Vec<f64> = (1..n).map(|k| z + k as f64 * dx).collect();
        let v = random_vector(&nodes, seed);
        let op = DiscreteOperator::for_mode(&bg.geom, ell, z, x_max, nodes).unwrap();
        let h = bg.geom.horizons;
        let beta = if plus { h.beta_plus } else { h.beta_minus };
        for kind in [Kind::Phi, Kind::Psi] {
            let f = ThermalFunctional::new(beta, kind).unwrap();
            let a = f.quad_form_eigen(&op, &v).unwrap();
            let b = f.quad_form_series(&op, &v).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-6 * a.abs(), "{:?}: {} vs {}", kind, a, b);
        }
    }

    #[test]
    fn thermal_target_exceeds_zero_temperature_energy(c in -1.0f64..1.0, w in 1.0f64..4.0, beta in 2.0f64..40.0) {
        let u = LineSamples::from_fn(-20.0, 0.01, 4000, |s| bump((s - c) / w));
        let t = thermal_target(&u, beta, Kind::Phi).unwrap();
        let e = zero_temperature_energy(&u).unwrap();
        prop_assert!(t >= e);
    }
}
