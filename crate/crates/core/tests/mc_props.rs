use liftdiff::crw::exact_diffusion;
use liftdiff::map::MapParams;
use liftdiff::mc::{simulate_msd, SimConfig, DEFAULT_FIT_WINDOW};
use proptest::prelude::*;

fn cfg(n_particles: usize, n_steps: usize, seed: u64) -> SimConfig {
    SimConfig { n_particles, n_steps, seed, fit_window: DEFAULT_FIT_WINDOW }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn same_seed_same_series(h in 0.0f64..=1.0, seed in any::<u64>()) {
        let p = MapParams::new(h).unwrap();
        let c = cfg(1000, 100, seed);
        prop_assert_eq!(simulate_msd(&p, &c).unwrap(), simulate_msd(&p, &c).unwrap());
    }

    #[test]
    fn schedule_does_not_change_the_result(h in 0.0f64..=1.0, seed in any::<u64>()) {
        let p = MapParams::new(h).unwrap();
        let c = cfg(1000, 100, seed);
        let one = in_pool(1, || simulate_msd(&p, &c).unwrap());
        let four = in_pool(4, || simulate_msd(&p, &c).unwrap());
        prop_assert_eq!(one, four);
    }

    #[test]
    fn msd_is_nonnegative_and_starts_at_zero(h in 0.0f64..=1.0, seed in any::<u64>()) {
        let s = simulate_msd(&MapParams::new(h).unwrap(), &cfg(1000, 100, seed)).unwrap();
        prop_assert_eq!(s.msd[0], 0.0);
        prop_assert!(s.msd.iter().all(|&m| m >= 0.0));
        prop_assert_eq!(s.times.len(), 101);
        prop_assert_eq!(s.block_d.len(), 10);
    }

    #[test]
    fn zero_lift_is_frozen(seed in any::<u64>()) {
        let s = simulate_msd(&MapParams::new(0.0).unwrap(), &cfg(1000, 100, seed)).unwrap();
        prop_assert!(s.msd.iter().all(|&m| m == 0.0));
        prop_assert_eq!(s.mean_displacement, 0.0);
    }
}

#[test]
fn ensemble_has_no_drift_and_matches_series() {
    for (h, seed) in [(0.2, 1), (0.37, 2), (0.5, 3), (0.8, 4), (1.0, 5)] {
        let p = MapParams::new(h).unwrap();
        let s = simulate_msd(&p, &cfg(20_000, 400, seed)).unwrap();
        assert!(
            s.mean_displacement.abs() <= 3.0 * s.mean_displacement_err,
            "h = {h}: drift {} +- {}",
            s.mean_displacement,
            s.mean_displacement_err
        );
        let exact = exact_diffusion(&p, 1e-14).unwrap().value;
        assert!((s.d_hat - exact).abs() <= 3.0 * s.std_err, "h = {h}: {} +- {} vs {exact}", s.d_hat, s.std_err);
    }
}

#[test]
fn rejects_undersized_runs() {
    let p = MapParams::new(0.5).unwrap();
    assert!(simulate_msd(&p, &cfg(999, 1000, 0)).is_err());
    assert!(simulate_msd(&p, &cfg(1000, 50, 0)).is_err());
}
