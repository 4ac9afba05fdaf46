mod common;

use liftdiff::cylinder::{cylinder_intervals, enumerate_cylinders, exact_autocorrelation};
use liftdiff::map::{self, MapParams, Velocity};
use proptest::prelude::*;

fn params(h: f64) -> MapParams {
    MapParams::new(h).unwrap()
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

proptest! {
    #[test]
    fn velocity_is_the_cell_change(h in 0.0f64..=1.0, x in 0.0f64..1.0) {
        let p = params(h);
        let lifted = map::step_lifted(x, &p);
        let v = map::velocity(x, &p).unwrap().value() as f64;
        prop_assert_eq!(v, lifted.floor() - x.floor());
        let reduced = map::step_mod1(x, &p).unwrap();
        prop_assert!((lifted - reduced - v).abs() < 1e-15);
        prop_assert_eq!(v, common::velocity(x, h));
    }

    #[test]
    fn lift_commutes_with_unit_translation(h in 0.0f64..=1.0, x in 0.0f64..1.0, z in -50i32..50) {
        let p = params(h);
        let shifted = map::step_lifted(x + z as f64, &p);
        prop_assert!((shifted - map::step_lifted(x, &p) - z as f64).abs() < 1e-12);
    }

    #[test]
    fn branch_points_are_ordered(h in 0.0f64..=1.0) {
        let [a, b, c] = params(h).branch_points();
        prop_assert!(0.0 <= a && a <= b && b <= c && c <= 1.0);
        prop_assert!(((c - a) - h).abs() < 1e-15);
    }

    #[test]
    fn reduced_map_stays_in_unit_interval(h in 0.0f64..=1.0, x in 0.0f64..1.0) {
        let y = map::step_mod1(x, &params(h)).unwrap();
        prop_assert!((0.0..1.0).contains(&y));
    }

    #[test]
    // Until the orbit reaches the discontinuity at 0 = 1, where rounding may
    // legitimately send the floating orbit to the other branch.
    fn exact_orbits_track_floating_orbits(num in 0u64..=97, k0 in 0u64..97) {
        let lift = MapParams::rational(num, 97).unwrap();
        let exact = lift.exact().unwrap();
        let k0 = k0 % exact.den();
        let den = exact.den() as f64;
        let mut x = k0 as f64 / den;
        let mut k = k0;
        for step in 0..20 {
            prop_assert!(circle_distance(x, k as f64 / den) < 1e-15 * 2f64.powi(step + 2));
            if k == 0 && step > 0 {
                break;
            }
            x = map::step_mod1(x, &lift).unwrap();
            k = exact.step(k);
        }
    }

    #[test]
    fn cylinders_refine_consistently(h in 0.0f64..=1.0, a in 0usize..3, b in 0usize..3) {
        let p = params(h);
        let (a, b) = (Velocity::ALL[a], Velocity::ALL[b]);
        let parent = cylinder_intervals(&[a, b], &p).unwrap().measure;
        let children: f64 = Velocity::ALL
            .iter()
            .map(|&c| cylinder_intervals(&[a, b, c], &p).unwrap().measure)
            .sum();
        prop_assert!((parent - children).abs() <= 1e-13);
    }

    #[test]
    fn autocorrelation_matches_density_transport(h in 0.0f64..=1.0, n in 0usize..10) {
        let cyl = exact_autocorrelation(&params(h), n).unwrap();
        let transport = common::transfer_autocorrelations(h, n)[n];
        prop_assert!((cyl - transport).abs() <= 1e-12, "{} vs {}", cyl, transport);
    }
}

#[test]
fn cylinders_partition_the_interval_without_drift() {
    for h in common::uniform_grid(21) {
        let p = params(h);
        for m in 1..=12 {
            let cyls = enumerate_cylinders(m, &p).unwrap();
            let total = common::compensated_sum(cyls.iter().map(|c| c.measure));
            assert!((total - 1.0).abs() <= 1e-12, "h = {h}, m = {m}: total {total}");
            let drift = common::compensated_sum(cyls.iter().map(|c| c.symbols[0].as_f64() * c.measure));
            assert!(drift.abs() <= 1e-14, "h = {h}, m = {m}: drift {drift}");
        }
    }
}

#[test]
fn autocorrelation_matches_riemann_sum() {
    for h in [0.1, 0.3, 0.45, 0.7, 0.95] {
        let p = params(h);
        for n in 0..5 {
            let exact = exact_autocorrelation(&p, n).unwrap();
            let riemann = common::riemann_autocorrelation(h, n, 1_000_000);
            assert!((exact - riemann).abs() <= 1e-4, "h = {h}, n = {n}: {exact} vs {riemann}");
        }
    }
}
