//! Pattern-mixture estimates against a second, line-by-line transcription
//! of the closed forms, plus the algebraic properties of the estimator.

mod common;

use common::*;
use nrba_core::ppmm::{
    g_coefficient, nrba_index, ppmm_mle, sensitivity_sweep, subgroup_nrba, ProxySeries,
};
use proptest::prelude::*;

#[test]
fn frozen_fixture_matches_reference_transcription() {
    let (x, y) = ppmm_fixture();
    assert_eq!(x.len(), 12);
    let proxy = ProxySeries::new(x.clone(), y.clone()).unwrap();
    assert!(!proxy.sign_flipped);
    for (phi, lambda) in [(0.0, 0.0), (0.5, 1.0), (1.0, f64::INFINITY)] {
        let e = ppmm_mle(&proxy, phi).unwrap();
        let (mu, var) = reference_mle(&x, &y, lambda);
        assert!((e.mu_y - mu).abs() < 1e-10, "phi {phi}: {} vs {mu}", e.mu_y);
        assert!((e.mu_y_var - var).abs() < 1e-10, "phi {phi}: {} vs {var}", e.mu_y_var);
    }
}

#[test]
fn rho_hat_is_the_respondent_pearson_correlation() {
    let (x, y) = ppmm_fixture();
    let proxy = ProxySeries::new(x.clone(), y.clone()).unwrap();
    let (xr, yr): (Vec<f64>, Vec<f64>) =
        x.iter().zip(&y).filter_map(|(a, b)| b.map(|v| (*a, v))).unzip();
    assert!((proxy.rho_hat - pearson(&xr, &yr)).abs() < 1e-12);
}

#[test]
fn subgroup_estimates_equal_per_group_reruns() {
    let (x, y) = ppmm_fixture();
    let proxy = ProxySeries::new(x.clone(), y.clone()).unwrap();
    let groups: Vec<Option<u32>> = (0..12).map(|i| Some((i % 2) as u32)).collect();
    let sub = subgroup_nrba(&proxy, &groups, 0.5).unwrap();
    for g in 0..2u32 {
        let rows: Vec<usize> = (0..12).filter(|i| i % 2 == g as usize).collect();
        let alone = ProxySeries::new(
            rows.iter().map(|&i| x[i]).collect(),
            rows.iter().map(|&i| y[i]).collect(),
        )
        .unwrap();
        let e = ppmm_mle(&alone, 0.5).unwrap();
        assert_eq!(sub.estimates[&g].mu_y, e.mu_y);
    }
}

/// Random proxy data with at least a handful of respondents and
/// nonrespondents and positive correlation.
fn proxy_data() -> impl Strategy<Value = (Vec<f64>, Vec<Option<f64>>)> {
    (8usize..60, any::<u64>()).prop_map(|(n, seed)| {
        let mut r = rng(seed);
        loop {
            let x = normals(&mut r, n);
            let e = normals(&mut r, n);
            let u = normals(&mut r, n);
            let y: Vec<Option<f64>> = (0..n)
                .map(|i| {
                    let v = 0.8 * x[i] + 0.6 * e[i];
                    (i < 4 || (u[i] > -0.3 && i >= 7)).then_some(v)
                })
                .collect();
            let (xr, yr): (Vec<f64>, Vec<f64>) =
                x.iter().zip(&y).filter_map(|(a, b)| b.map(|v| (*a, v))).unzip();
            if pearson(&xr, &yr) > 0.05 {
                return (x, y);
            }
        }
    })
}

proptest! {
    #[test]
    fn g_is_anchored_and_increasing(rho in 0.001f64..0.999, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        prop_assert!((g_coefficient(rho, 0.0).unwrap() - rho).abs() < 1e-12);
        prop_assert!((g_coefficient(rho, 0.5).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((g_coefficient(rho, 1.0).unwrap() - 1.0 / rho).abs() < 1e-12 / rho);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        prop_assert!(g_coefficient(rho, lo).unwrap() < g_coefficient(rho, hi).unwrap());
    }

    #[test]
    fn outcome_affine_maps_are_equivariant(
        (x, y) in proxy_data(), a in 0.1f64..10.0, b in -50.0f64..50.0, phi in 0.0f64..=1.0
    ) {
        let base = ppmm_mle(&ProxySeries::new(x.clone(), y.clone()).unwrap(), phi).unwrap();
        let ty: Vec<Option<f64>> = y.iter().map(|v| v.map(|v| a * v + b)).collect();
        let t = ppmm_mle(&ProxySeries::new(x, ty).unwrap(), phi).unwrap();
        prop_assert!(close(t.mu_y, a * base.mu_y + b, 1e-9));
        prop_assert!(close(t.mu_y_var, a * a * base.mu_y_var, 1e-8));
    }

    #[test]
    fn proxy_affine_maps_leave_estimates_unchanged(
        (x, y) in proxy_data(), a in 0.1f64..10.0, b in -50.0f64..50.0, phi in 0.0f64..=1.0
    ) {
        let base = ppmm_mle(&ProxySeries::new(x.clone(), y.clone()).unwrap(), phi).unwrap();
        let tx: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let t = ppmm_mle(&ProxySeries::new(tx, y).unwrap(), phi).unwrap();
        prop_assert!(close(t.mu_y, base.mu_y, 1e-9));
        prop_assert!(close(t.mu_y_var, base.mu_y_var, 1e-8));
    }

    #[test]
    fn index_equals_shift_of_the_mean((x, y) in proxy_data(), phi in 0.0f64..=1.0) {
        let p = ProxySeries::new(x, y).unwrap();
        let e = ppmm_mle(&p, phi).unwrap();
        let idx = nrba_index(&p, phi).unwrap();
        prop_assert!((idx - (e.mu_y - p.respondent_mean())).abs() < 1e-10 * (1.0 + idx.abs()));
    }

    #[test]
    fn complete_response_collapses_to_respondent_statistics(
        x in prop::collection::vec(-5.0f64..5.0, 5..40), seed in any::<u64>()
    ) {
        let mut r = rng(seed);
        let e = normals(&mut r, x.len());
        let y: Vec<Option<f64>> = x.iter().zip(&e).map(|(a, b)| Some(a + 0.5 * b)).collect();
        let p = match ProxySeries::new(x, y.clone()) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        let ybar = y.iter().flatten().sum::<f64>() / y.len() as f64;
        let table = sensitivity_sweep(&p, &[0.0, 0.5, 1.0]).unwrap();
        for row in table.rows {
            prop_assert!((row.mu_y - ybar).abs() < 1e-10 * (1.0 + ybar.abs()));
            prop_assert!(row.nrba.abs() < 1e-10);
        }
    }
}
