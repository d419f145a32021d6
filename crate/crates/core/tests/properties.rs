use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sdnlw::coupling::{d_n, epsilon_scale, mollify, tv_bound, CouplingConfig, EpsilonNorms};
use sdnlw::dynamics::{FlowStepper, Integrator, SimConfig};
use sdnlw::ergodics::{birkhoff_average, observable_registry, ObservableSeries, OBSERVABLE_XALPHA};
use sdnlw::harness::{parse_config, Checkpoint, RunConfig};
use sdnlw::noise::{sample_increment, step_covariance, BrownianPath};
use sdnlw::propagator::{apply_s, mode_matrix};
use sdnlw::spectral::{dealiased_product, ModeIndex, PairField, SpectralField, SpectralGrid};

fn field(n: usize, seed: u64, decay: f64) -> SpectralField {
    SpectralField::random(SpectralGrid::with_default_resolution(n), &mut ChaCha8Rng::seed_from_u64(seed), decay)
}

fn pair(n: usize, seed: u64) -> PairField {
    PairField::new(field(n, seed, 1.0), field(n, seed ^ 0xabcd, 0.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagator_semigroup(n in 1usize..6, seed in any::<u64>(), t in 0.0f64..4.0, s in 0.0f64..4.0) {
        let v = pair(n, seed);
        let diff = &apply_s(&apply_s(&v, s), t) - &apply_s(&v, t + s);
        prop_assert!(diff.h1_norm() <= 1e-11 * v.h1_norm());
    }

    #[test]
    fn propagator_determinant(k1 in -20i64..20, k2 in -20i64..20, t in 0.0f64..20.0) {
        let det = mode_matrix(ModeIndex::new(k1, k2), t).det();
        prop_assert!((det - (-t).exp()).abs() <= 1e-12);
    }

    #[test]
    fn products_stay_real(n in 1usize..5, a in any::<u64>(), b in any::<u64>()) {
        let (f, g) = (field(n, a, 0.5), field(n, b, 0.5));
        prop_assert!(dealiased_product(&f, &g, Some(&f)).unwrap().is_hermitian());
        prop_assert!(apply_s(&PairField::position(f), 0.3).is_hermitian());
    }

    #[test]
    fn products_commute(n in 1usize..5, a in any::<u64>(), b in any::<u64>()) {
        let (f, g) = (field(n, a, 0.5), field(n, b, 0.5));
        let d = &dealiased_product(&f, &g, None).unwrap() - &dealiased_product(&g, &f, None).unwrap();
        prop_assert!(d.max_abs_coeff() <= 1e-14);
    }

    #[test]
    fn increments_are_reproducible_and_real(n in 1usize..5, seed in any::<u64>(), step in 0u64..1_000_000) {
        let grid = SpectralGrid::with_default_resolution(n);
        let a = sample_increment(grid, 0.01, seed, step).unwrap();
        let b = sample_increment(grid, 0.01, seed, step).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.field.is_hermitian());
    }

    #[test]
    fn path_increments_are_additive(seed in any::<u64>(), k in 0u64..1000, level in 1u32..4) {
        let path = BrownianPath::new(SpectralGrid::with_default_resolution(2), seed, 1e-3);
        let (first, full) = path.split_increment(k, level);
        let second = path.increment(2 * k + 1, level - 1);
        let joined = first.join(&second);
        prop_assert!((&joined.field - &full.field).max_abs_coeff() <= 1e-15);
    }

    #[test]
    fn covariance_is_positive(k1 in -12i64..12, k2 in -12i64..12, dt in 1e-4f64..5.0, s in 0.1f64..2.0) {
        let c = step_covariance(ModeIndex::new(k1, k2), dt, s);
        let (lo, hi) = c.eigenvalues();
        prop_assert!(lo >= -1e-15 * hi && hi > 0.0);
        let stationary = step_covariance(ModeIndex::new(k1, k2), f64::INFINITY, s);
        prop_assert!(c.s11 <= stationary.s11 * (1.0 + 1e-12));
    }

    #[test]
    fn mollifier_composes(seed in any::<u64>(), a in 0.0f64..0.05, b in 0.0f64..0.05) {
        let f = field(5, seed, 0.5);
        let d = &mollify(&mollify(&f, a).unwrap(), b).unwrap() - &mollify(&f, a + b).unwrap();
        prop_assert!(d.max_abs_coeff() <= 1e-15 * f.max_abs_coeff());
    }

    #[test]
    fn epsilon_is_a_scale(w in 0.0f64..10.0, x in 0.0f64..10.0, y in 0.0f64..10.0, q in 0.0f64..10.0, c in 1.0f64..4.0) {
        let cfg = CouplingConfig { c_univ: c, ..CouplingConfig::default() };
        let e = epsilon_scale(&cfg, 0.25, &EpsilonNorms { w_h1: w, diff_xalpha: x, u1_xalpha: y, q_norm: q }).value();
        prop_assert!(e > 0.0 && e <= 1.0);
        let bigger = epsilon_scale(&cfg, 0.25, &EpsilonNorms { w_h1: w + 1.0, diff_xalpha: x, u1_xalpha: y, q_norm: q }).value();
        prop_assert!(bigger <= e);
    }

    #[test]
    fn tv_bound_range(p in 1.0f64..8.0, m in 0.0f64..100.0, l in 0.01f64..20.0) {
        let b = tv_bound(p, m, l).unwrap();
        prop_assert!((0.0..=2.0).contains(&b));
        prop_assert!(tv_bound(p, m + 1.0, l).unwrap() >= b);
    }

    #[test]
    fn d_n_is_a_bounded_pseudometric(a in any::<u64>(), b in any::<u64>(), n in 1u32..50) {
        let (x, y) = (pair(2, a), pair(2, b));
        let dxy = d_n(&x, &y, n, 0.25, &OBSERVABLE_XALPHA).unwrap();
        prop_assert!((0.0..=1.0).contains(&dxy));
        prop_assert_eq!(dxy, d_n(&y, &x, n, 0.25, &OBSERVABLE_XALPHA).unwrap());
        prop_assert_eq!(d_n(&x, &x, n, 0.25, &OBSERVABLE_XALPHA).unwrap(), 0.0);
    }

    #[test]
    fn birkhoff_is_linear(values in prop::collection::vec(-5.0f64..5.0, 2..40), a in -3.0f64..3.0, c in -3.0f64..3.0) {
        let mut f = ObservableSeries::new("f");
        let mut g = ObservableSeries::new("g");
        let mut shifted = ObservableSeries::new("shifted");
        for (i, &x) in values.iter().enumerate() {
            let t = 0.25 * i as f64;
            f.push(t, x);
            g.push(t, a * x + c);
            shifted.push(t, x + c);
        }
        let horizon = *f.times.last().unwrap();
        let bf = birkhoff_average(&f, horizon).unwrap();
        prop_assert!((birkhoff_average(&g, horizon).unwrap() - (a * bf + c)).abs() <= 1e-12 * (1.0 + bf.abs()));
        prop_assert!((birkhoff_average(&shifted, horizon).unwrap() - c - bf).abs() <= 1e-12 * (1.0 + bf.abs()));
        prop_assert!((f.running_average().last().unwrap() - bf).abs() <= 1e-12 * (1.0 + bf.abs()));
    }

    #[test]
    fn clipped_norm_at_most_one(seed in any::<u64>(), scale in 0.0f64..100.0) {
        let obs = observable_registry(0.25).get("clipped_h_alpha").unwrap();
        let value = obs.eval(&(&pair(3, seed) * scale));
        prop_assert!((0.0..=1.0).contains(&value));
    }

    #[test]
    fn config_text_round_trips(n in 1usize..12, s in 0.35f64..3.0, alpha in 0.01f64..0.33, dt in 1e-4f64..0.1,
                               seed in any::<u64>(), integrator in 0usize..3, cubic in any::<bool>()) {
        let mut cfg = RunConfig::default();
        cfg.sim = SimConfig {
            dt, seed, cubic, s, alpha,
            integrator: [Integrator::Lawson, Integrator::Etd1, Integrator::Midpoint][integrator],
            ..SimConfig::with_n(n)
        };
        prop_assert_eq!(parse_config(&cfg.to_text()).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn checkpoints_round_trip(seed in any::<u64>(), steps in 0usize..12, integrator in 0usize..3) {
        let sim = SimConfig {
            dt: 0.05, seed,
            integrator: [Integrator::Lawson, Integrator::Etd1, Integrator::Midpoint][integrator],
            ..SimConfig::with_n(2)
        };
        let stepper = FlowStepper::new(sim).unwrap();
        let mut state = stepper.start(pair(2, seed)).unwrap();
        for _ in 0..steps {
            stepper.step(&mut state).unwrap();
        }
        let bytes = Checkpoint::Flow(state.clone()).to_bytes();
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
        // Resuming continues exactly where the run would have gone.
        let Checkpoint::Flow(mut resumed) = back else { unreachable!() };
        let mut continued = state;
        stepper.step(&mut continued).unwrap();
        stepper.step(&mut resumed).unwrap();
        prop_assert_eq!(resumed, continued);
    }
}
