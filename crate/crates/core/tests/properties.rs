use std::f64::consts::PI;

use proptest::prelude::*;

use mkdv_imethod::cli::ConfigFile;
use mkdv_imethod::experiments::gwp_plan;
use mkdv_imethod::imethod::{e1, e2, lambda_n, m4, ConstantsTable, FrequencyTuple, IMultiplierProfile, Unit};
use mkdv_imethod::solver::{energy, ENERGY_ALPHA};
use mkdv_imethod::spectral::{exact_integral_of_product, integral_of_product, read_field, write_field, Field, SpectralGrid};
use mkdv_imethod::verify::{check_cubic_identity, random_band_limited};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn grid(points: usize) -> SpectralGrid {
    SpectralGrid::new(2.0 * PI, points).unwrap()
}

/// Random real samples with the alternating (Nyquist) component removed,
/// since that mode is not representable.
fn samples_strategy(points: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, points).prop_map(|mut v| {
        let n = v.len() as f64;
        let alternating = v.iter().enumerate().map(|(j, x)| if j % 2 == 0 { *x } else { -*x }).sum::<f64>() / n;
        for (j, x) in v.iter_mut().enumerate() {
            *x -= if j % 2 == 0 { alternating } else { -alternating };
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trips(samples in samples_strategy(32)) {
        let g = grid(32);
        let back = Field::from_samples(&g, &samples).unwrap().samples();
        let scale = samples.iter().map(|x| x.abs()).fold(1e-300, f64::max);
        for (a, b) in samples.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn parseval(samples in samples_strategy(64), length in 0.5f64..50.0) {
        let g = SpectralGrid::new(length, 64).unwrap();
        let f = Field::from_samples(&g, &samples).unwrap();
        let physical = samples.iter().map(|x| x * x).sum::<f64>() / 64.0;
        let spectral: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!(rel(physical, spectral) < 1e-12);
    }

    #[test]
    fn derivative_commutes_with_dealias(samples in samples_strategy(64), order in 1u32..4) {
        let f = Field::from_samples(&grid(64), &samples).unwrap();
        let a = f.derivative(order).unwrap().dealias();
        let b = f.dealias().derivative(order).unwrap();
        prop_assert!(a.sub(&b).unwrap().l2_norm() <= 1e-12 * a.l2_norm().max(1.0));
    }

    #[test]
    fn l2_norm_matches_product_integral(seed in any::<u64>(), band in 1i64..10) {
        let f = random_band_limited(&grid(32), band, 1.0, seed).unwrap();
        let integral = integral_of_product(&[&f, &f]).unwrap();
        prop_assert!(rel(f.sobolev_norm(0.0), integral.sqrt()) < 1e-10);
    }

    #[test]
    fn field_text_round_trips(seed in any::<u64>(), length in 0.1f64..100.0) {
        let g = SpectralGrid::new(length, 16).unwrap();
        let f = random_band_limited(&g, 5, 2.0, seed).unwrap();
        let back = read_field(&write_field(&f)).unwrap();
        prop_assert_eq!(back.grid(), f.grid());
        prop_assert_eq!(back.coeffs(), f.coeffs());
    }

    #[test]
    fn multiplier_shape(n in 0.5f64..100.0, s in 0.26f64..0.99, xi in -1e4f64..1e4, blend in any::<bool>()) {
        let p = if blend { IMultiplierProfile::blend(n, s) } else { IMultiplierProfile::sharp(n, s) }.unwrap();
        prop_assert_eq!(p.m(xi), p.m(-xi));
        prop_assert!(p.m(xi.abs() * 1.01 + 1e-9) <= p.m(xi) + 1e-15);
        if xi.abs() <= n {
            prop_assert_eq!(p.m(xi), 1.0);
        }
        if xi.abs() >= 2.0 * n {
            prop_assert!(rel(p.m(xi), (n / xi.abs()).powf(1.0 - s)) < 1e-12);
        }
    }

    #[test]
    fn quartic_multiplier_symmetries(
        head in prop::collection::vec(-200.0f64..200.0, 3),
        perm in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let p = IMultiplierProfile::sharp(16.0, 0.5).unwrap();
        let t = FrequencyTuple::closing(head).unwrap();
        let base = m4(&t, &p).unwrap();
        let permuted = FrequencyTuple::new(perm.iter().map(|&i| t.xi()[i]).collect()).unwrap();
        let negated = FrequencyTuple::new(t.xi().iter().map(|x| -x).collect()).unwrap();
        prop_assert!(rel(base, m4(&permuted, &p).unwrap()) < 1e-10);
        prop_assert!(rel(base, m4(&negated, &p).unwrap()) < 1e-10);
    }

    #[test]
    fn quartic_multiplier_is_one_below_cutoff(head in prop::collection::vec(-5.3f64..5.3, 3)) {
        let p = IMultiplierProfile::sharp(16.0, 0.5).unwrap();
        let t = FrequencyTuple::closing(head).unwrap();
        prop_assert!((m4(&t, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_identity_holds(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000, c in -1_000_000i64..1_000_000) {
        prop_assert!(check_cubic_identity([a, b, c, -(a + b + c)]).unwrap());
    }

    #[test]
    fn gwp_plan_satisfies_its_constraint(s in 0.26f64..0.99, t in 1.0f64..1e4, c in 0.1f64..10.0) {
        // very large N (N^3 beyond u64) is reported as an error
        if let Ok(plan) = gwp_plan(s, t, 0.5, c, 0.1) {
            prop_assert!(plan.feasible);
            let n = plan.n.unwrap();
            prop_assert!(plan.constraint_value().unwrap() <= c * (1.0 + 1e-12));
            prop_assert_eq!(plan.steps, Some(n.pow(3)));
        }
    }

    #[test]
    fn config_render_round_trips(
        entries in prop::collection::btree_map("[a-z][a-z0-9_]{0,6}\\.[a-zA-Z][a-zA-Z0-9_]{0,6}", "[a-zA-Z0-9.,+-][a-zA-Z0-9 .,+-]{0,10}[a-zA-Z0-9.,+-]", 0..12),
    ) {
        let mut cfg = ConfigFile::default();
        for (k, v) in &entries {
            cfg.set(k, v.clone());
        }
        let again = ConfigFile::parse(&cfg.render()).unwrap();
        prop_assert_eq!(again, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unit_functional_is_power_integral(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 3, 4, 6])) {
        let f = random_band_limited(&SpectralGrid::new(2.0 * PI, 16).unwrap(), 3, 0.7, seed).unwrap();
        let slots = vec![&f; n];
        let exact = exact_integral_of_product(&slots).unwrap();
        prop_assert!(rel(lambda_n(&Unit, &slots).unwrap(), exact) < 1e-10);
    }

    #[test]
    fn energies_agree_above_every_active_mode(seed in any::<u64>(), amplitude in 0.05f64..1.0) {
        let g = SpectralGrid::new(2.0 * PI, 16).unwrap();
        let u = random_band_limited(&g, 4, amplitude, seed).unwrap();
        let p = IMultiplierProfile::sharp(g.max_xi() + 1.0, 0.5).unwrap();
        let plain = energy(&u, ENERGY_ALPHA);
        prop_assert!(rel(e1(&u, &p).unwrap(), plain) < 1e-10);
        prop_assert!(rel(e2(&u, &p, &ConstantsTable::default()).unwrap(), plain) < 1e-10);
    }
}
