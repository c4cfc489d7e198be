//! Design-based estimators against replication and brute-force oracles.

mod common;

use std::collections::BTreeMap;

use common::*;
use nrba_core::survey::{
    design_effect, rake, weighted_mean, weighting_class_adjust, Margin, SurveyDesign,
};
use proptest::prelude::*;
use rand::Rng;

/// Stratified clustered sample: `h` strata, `a` PSUs each, `m` units per
/// PSU, with a PSU random effect and unequal weights.
fn clustered(seed: u64, h: u64, a: u64, m: usize) -> (Vec<Option<f64>>, SurveyDesign) {
    let mut r = rng(seed);
    let (mut y, mut w, mut psu, mut st) = (vec![], vec![], vec![], vec![]);
    for s in 0..h {
        for c in 0..a {
            let effect: f64 = normals(&mut r, 1)[0];
            for e in normals(&mut r, m) {
                y.push(Some(10.0 + s as f64 + effect + e));
                w.push(r.random_range(0.5..3.0));
                psu.push(s * 1000 + c);
                st.push(s);
            }
        }
    }
    (y, SurveyDesign::new(w, Some(psu), Some(st)).unwrap())
}

fn ratio_mean(y: &[Option<f64>], w: &[f64]) -> f64 {
    let (num, den) = y
        .iter()
        .zip(w)
        .fold((0.0, 0.0), |(a, b), (v, w)| (a + w * v.unwrap(), b + w));
    num / den
}

/// Stratified delete-one-PSU jackknife.
fn jackknife_se(y: &[Option<f64>], d: &SurveyDesign) -> f64 {
    let strata = d.stratum.as_ref().unwrap();
    let mut by_stratum: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for (&s, &p) in strata.iter().zip(&d.psu) {
        let v = by_stratum.entry(s).or_default();
        if !v.contains(&p) {
            v.push(p);
        }
    }
    let mut var = 0.0;
    for (h, psus) in &by_stratum {
        let a = psus.len() as f64;
        let reps: Vec<f64> = psus
            .iter()
            .map(|&drop| {
                let w: Vec<f64> = (0..y.len())
                    .map(|i| match (strata[i] == *h, d.psu[i] == drop) {
                        (true, true) => 0.0,
                        (true, false) => d.weights[i] * a / (a - 1.0),
                        _ => d.weights[i],
                    })
                    .collect();
                ratio_mean(y, &w)
            })
            .collect();
        let m = reps.iter().sum::<f64>() / a;
        var += (a - 1.0) / a * reps.iter().map(|t| (t - m).powi(2)).sum::<f64>();
    }
    var.sqrt()
}

#[test]
fn linearized_se_agrees_with_psu_jackknife() {
    for seed in 0..5 {
        let (y, d) = clustered(seed, 10, 8, 20);
        let est = weighted_mean(&y, &d, None).unwrap();
        let jk = jackknife_se(&y, &d);
        assert!((est.mean - ratio_mean(&y, &d.weights)).abs() < 1e-12);
        let rel = (est.se - jk).abs() / jk;
        assert!(rel < 0.15, "seed {seed}: linearized {} vs jackknife {jk}", est.se);
    }
}

#[test]
fn raking_matches_cell_table_ipf() {
    let mut r = rng(11);
    let n = 400;
    let a: Vec<u64> = (0..n).map(|i| (i % 4) as u64).collect();
    let b: Vec<u64> = (0..n).map(|i| ((i / 4 + i / 7) % 4) as u64).collect();
    let w: Vec<f64> = (0..n).map(|_| r.random_range(0.5..2.0)).collect();
    let rows = [120.0, 80.0, 110.0, 90.0];
    let cols = [95.0, 105.0, 100.0, 100.0];
    let margin = |name: &str, cats: &[u64], t: [f64; 4]| Margin {
        name: name.into(),
        categories: cats.to_vec(),
        targets: (0..4u64).zip(t).collect(),
    };
    let d = SurveyDesign::new(w.clone(), None, None).unwrap();
    let (raked, rec) = rake(
        &d,
        &[margin("a", &a, rows), margin("b", &b, cols)],
        100,
        1e-8,
    )
    .unwrap();
    assert!(rec.converged && rec.iterations <= 100);

    let mut cells = [[0.0; 4]; 4];
    for i in 0..n {
        cells[a[i] as usize][b[i] as usize] += w[i];
    }
    let fitted = ipf_cells(cells, rows, cols);
    for i in 0..n {
        let (p, q) = (a[i] as usize, b[i] as usize);
        let expect = w[i] * fitted[p][q] / cells[p][q];
        assert!((raked.weights[i] - expect).abs() < 1e-8, "row {i}");
    }
    for k in 0..4u64 {
        let ta: f64 = (0..n).filter(|&i| a[i] == k).map(|i| raked.weights[i]).sum();
        let tb: f64 = (0..n).filter(|&i| b[i] == k).map(|i| raked.weights[i]).sum();
        assert!((ta - rows[k as usize]).abs() < 1e-8);
        assert!((tb - cols[k as usize]).abs() < 1e-8);
    }
}

#[test]
fn equal_weights_and_singleton_psus_give_unit_design_effect() {
    let mut r = rng(3);
    let y: Vec<Option<f64>> = normals(&mut r, 250).into_iter().map(Some).collect();
    let d = SurveyDesign::new(vec![2.5; 250], None, None).unwrap();
    let deff = design_effect(&y, &d).unwrap();
    assert!((deff - 1.0).abs() < 1e-9);
}

proptest! {
    #[test]
    fn rescaling_weights_changes_nothing(seed in any::<u64>(), c in 0.01f64..100.0) {
        let (y, d) = clustered(seed, 3, 4, 5);
        let scaled = d.with_weights(d.weights.iter().map(|w| c * w).collect()).unwrap();
        let a = weighted_mean(&y, &d, None).unwrap();
        let b = weighted_mean(&y, &scaled, None).unwrap();
        prop_assert!(close(a.mean, b.mean, 1e-12));
        prop_assert!(close(a.se, b.se, 1e-10));
        prop_assert!(close(a.deff.unwrap(), b.deff.unwrap(), 1e-10));
    }

    #[test]
    fn class_adjustment_preserves_class_totals(
        cells in prop::collection::vec((0.1f64..5.0, 0u64..4, any::<bool>()), 8..120)
    ) {
        let w: Vec<f64> = cells.iter().map(|c| c.0).collect();
        let class: Vec<u64> = cells.iter().map(|c| c.1).collect();
        let resp: Vec<bool> = cells.iter().map(|c| c.2).collect();
        let d = SurveyDesign::new(w.clone(), None, None).unwrap();
        match weighting_class_adjust(&d, &resp, &class) {
            Ok(adj) => {
                for k in 0..4u64 {
                    let before: f64 = (0..w.len()).filter(|&i| class[i] == k).map(|i| w[i]).sum();
                    let after: f64 = (0..w.len()).filter(|&i| class[i] == k).map(|i| adj.weights[i]).sum();
                    prop_assert!(close(before, after, 1e-12));
                }
                for i in 0..w.len() {
                    prop_assert!(resp[i] || adj.weights[i] == 0.0);
                }
            }
            Err(_) => {
                let has_empty = (0..4u64).any(|k| {
                    class.contains(&k) && !(0..w.len()).any(|i| class[i] == k && resp[i])
                });
                prop_assert!(has_empty);
            }
        }
    }
}
