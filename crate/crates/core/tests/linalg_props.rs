use liftdiff::linalg::{self, DenseMatrix, Lu};
use liftdiff::map::MapParams;
use liftdiff::markov;
use nalgebra::DMatrix;
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn positive_matrix() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (3usize..=20).prop_flat_map(|n| (Just(n), prop::collection::vec(0.01f64..1.0, n * n)))
}

fn oracle_spectrum(n: usize, entries: &[f64]) -> Vec<(f64, f64)> {
    let m = DMatrix::from_row_slice(n, n, entries);
    m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
}

fn residual(a: &DenseMatrix, lambda: f64, v: &[f64]) -> f64 {
    let av = linalg::matvec(a, v).unwrap();
    av.iter().zip(v).fold(0.0f64, |m, (x, y)| m.max((x - lambda * y).abs()))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Matches two spectra as multisets by greedy nearest pairing.
fn same_spectrum(mut ours: Vec<(f64, f64)>, theirs: Vec<(f64, f64)>, tol: f64) -> bool {
    ours.len() == theirs.len()
        && theirs.iter().all(|&(re, im)| {
            let best = ours
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    let da = (a.1 .0 - re).hypot(a.1 .1 - im);
                    let db = (b.1 .0 - re).hypot(b.1 .1 - im);
                    da.total_cmp(&db)
                })
                .map(|(i, z)| (i, (z.0 - re).hypot(z.1 - im)));
            match best {
                Some((i, d)) if d <= tol => {
                    ours.swap_remove(i);
                    true
                }
                _ => false,
            }
        })
}

proptest! {
    #[test]
    fn leading_pair_is_certified((n, entries) in positive_matrix()) {
        let a = DenseMatrix::new(n, entries.clone()).unwrap();
        let lead = linalg::leading_pair(&a, TOL, linalg::DEFAULT_MAX_ITER).unwrap();
        prop_assert!(residual(&a, lead.lambda, &lead.v_right) <= 10.0 * TOL * inf_norm(&lead.v_right));
        let at = a.transpose();
        prop_assert!(residual(&at, lead.lambda, &lead.v_left) <= 10.0 * TOL * inf_norm(&lead.v_left));
        let perron = oracle_spectrum(n, &entries).into_iter().map(|z| z.0).fold(f64::MIN, f64::max);
        prop_assert!((lead.lambda - perron).abs() <= 1e-10 * perron);
    }

    #[test]
    fn subleading_eigenvalue_matches_oracle((n, entries) in positive_matrix()) {
        let a = DenseMatrix::new(n, entries.clone()).unwrap();
        let lead = linalg::leading_pair(&a, TOL, linalg::DEFAULT_MAX_ITER).unwrap();
        let s = linalg::subdominant_modulus(&a, &lead, TOL, linalg::DEFAULT_MAX_ITER).unwrap();
        if !s.used_fallback {
            prop_assert!(s.residual <= 10.0 * TOL);
        }
        let mut spectrum = oracle_spectrum(n, &entries);
        let top = spectrum
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
            .map(|(i, _)| i)
            .unwrap();
        let (l1, _) = spectrum.swap_remove(top);
        let dist = |z: &(f64, f64)| (z.0 - l1).hypot(z.1);
        spectrum.sort_by(|x, y| dist(x).total_cmp(&dist(y)));
        // Skip draws whose two nearest candidates are not separated.
        let separated = spectrum.len() < 2
            || dist(&spectrum[1]) - dist(&spectrum[0]) > 1e-6
            || (spectrum[1].0 - spectrum[0].0).abs() < 1e-9;
        prop_assume!(separated);
        let nearest = spectrum[0];
        prop_assert!((s.chi1 - nearest.0.hypot(nearest.1)).abs() <= 1e-9, "{} vs {:?}", s.chi1, nearest);
        prop_assert_eq!(s.is_complex_pair, nearest.1.abs() > 1e-9);
    }

    #[test]
    fn qr_spectrum_matches_oracle((n, entries) in positive_matrix()) {
        let a = DenseMatrix::new(n, entries.clone()).unwrap();
        let ours: Vec<(f64, f64)> = linalg::eigenvalues(&a).unwrap().iter().map(|z| (z.re, z.im)).collect();
        prop_assert!(same_spectrum(ours, oracle_spectrum(n, &entries), 1e-8));
    }

    #[test]
    fn lu_solves_to_small_residual((n, entries) in positive_matrix(), seed in 0u64..1000) {
        let a = DenseMatrix::new(n, entries).unwrap();
        let b: Vec<f64> = (0..n).map(|i| ((i as u64 * 7919 + seed) % 101) as f64 / 50.0 - 1.0).collect();
        let lu = Lu::factor(&a);
        let x = lu.solve(&b);
        let ax = linalg::matvec(&a, &x).unwrap();
        let scale = a.max_abs() * inf_norm(&x) * n as f64 + inf_norm(&b);
        prop_assert!(ax.iter().zip(&b).all(|(p, q)| (p - q).abs() <= 1e-10 * scale));
        let y = lu.solve_transpose(&b);
        let aty = linalg::matvec(&a.transpose(), &y).unwrap();
        prop_assert!(aty.iter().zip(&b).all(|(p, q)| (p - q).abs() <= 1e-10 * scale));
    }
}

#[test]
fn circulant_spectra_match_closed_form() {
    for h in [0.05, 0.3, 0.5, 0.85, 1.0] {
        let p = MapParams::new(h).unwrap();
        for l in [3, 4, 7, 16, 33] {
            let (tm, s) = markov::spectrum(&p, 0, l, TOL).unwrap();
            let closed: Vec<(f64, f64)> = (0..l)
                .map(|m| (2.0 - 2.0 * h + 2.0 * h * (2.0 * std::f64::consts::PI * m as f64 / l as f64).cos(), 0.0))
                .collect();
            let ours: Vec<(f64, f64)> = linalg::eigenvalues(&tm.a).unwrap().iter().map(|z| (z.re, z.im)).collect();
            assert!(same_spectrum(ours, closed, 1e-10), "h = {h}, L = {l}");
            assert!((s.lambda1 - 2.0).abs() <= 1e-10);
            assert!((s.chi1 - markov::analytic_zeroth(&p, l).unwrap().abs()).abs() <= 1e-10);
        }
    }
}
