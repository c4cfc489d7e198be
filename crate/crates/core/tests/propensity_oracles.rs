//! Propensity strata and composition against direct recomputation.

mod common;

use common::*;
use nrba_core::propensity::{
    compose_propensities, quintile_strata, stratum_outcome_summary, ClampPolicy,
};
use proptest::prelude::*;

/// Breaks by the `1 + (n − 1)p` order-statistic rule, assigned by
/// counting the sorted values at or below each unit.
fn oracle_ids(p: &[f64]) -> Vec<u8> {
    let mut s = p.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    let brk = |q: f64| {
        let h = 1.0 + (n as f64 - 1.0) * q;
        let lo = h.floor() as usize;
        let below = s[lo - 1];
        let above = s[lo.min(n - 1)];
        below + (h - lo as f64) * (above - below)
    };
    let breaks = [brk(0.2), brk(0.4), brk(0.6), brk(0.8)];
    p.iter()
        .map(|&v| {
            let mut id = 1;
            for b in breaks {
                if v > b {
                    id += 1;
                }
            }
            id
        })
        .collect()
}

#[test]
fn constant_stages_multiply() {
    let a = vec![0.69; 10];
    let b = vec![0.87; 10];
    let c = compose_propensities(&[&a, &b], ClampPolicy::default()).unwrap();
    for p in c.probability {
        assert!((p - 0.6003).abs() < 1e-12);
    }
}

#[test]
fn stratum_correlation_is_pearson() {
    let mut r = rng(5);
    let p: Vec<f64> = normals(&mut r, 300).iter().map(|z| 1.0 / (1.0 + (-z).exp())).collect();
    let y: Vec<f64> = p
        .iter()
        .zip(normals(&mut r, 300))
        .map(|(a, e)| 3.0 * a + e)
        .collect();
    let strata = quintile_strata(&p).unwrap();
    let s = stratum_outcome_summary(&strata, &p, &y).unwrap();
    assert!((s.correlation - pearson(&p, &y)).abs() < 1e-12);
    let counted: usize = s.strata.iter().flatten().map(|f| f.n).sum();
    assert_eq!(counted, 300);
}

proptest! {
    #[test]
    fn quintiles_match_order_statistics(p in prop::collection::vec(0.0f64..1.0, 5..300)) {
        let s = quintile_strata(&p).unwrap();
        prop_assert_eq!(s.ids, oracle_ids(&p));
    }

    #[test]
    fn quintiles_depend_only_on_ranks(p in prop::collection::vec(0.001f64..0.999, 5..200)) {
        let logit: Vec<f64> = p.iter().map(|v| (v / (1.0 - v)).ln()).collect();
        prop_assert_eq!(quintile_strata(&p).unwrap().ids, quintile_strata(&logit).unwrap().ids);
    }

    #[test]
    fn a_certain_stage_leaves_the_product_unchanged(
        st in prop::collection::vec((0.05f64..0.95, 0.05f64..0.95), 1..50)
    ) {
        let a: Vec<f64> = st.iter().map(|s| s.0).collect();
        let b: Vec<f64> = st.iter().map(|s| s.1).collect();
        let one = vec![1.0; a.len()];
        let two = compose_propensities(&[&a, &b], ClampPolicy::default()).unwrap();
        let three = compose_propensities(&[&a, &one, &b], ClampPolicy::default()).unwrap();
        prop_assert_eq!(&two.probability, &three.probability);
        for i in 0..a.len() {
            prop_assert_eq!(two.probability[i], a[i] * b[i]);
        }
    }
}
