//! Missingness summaries checked against brute force.

mod common;

use nrba_core::dataset::{
    is_monotone, missingness_summary, monotone_greedy, Column, ColumnSpec, RectDataset, Role,
    TableBuilder,
};
use proptest::prelude::*;

fn masked(mask: &[Vec<bool>]) -> RectDataset {
    let p = mask[0].len();
    let cols = (0..p)
        .map(|j| {
            Column::continuous(
                ColumnSpec::continuous(format!("v{j}"), Role::Auxiliary),
                mask.iter()
                    .enumerate()
                    .map(|(i, r)| r[j].then_some(i as f64))
                    .collect(),
            )
        })
        .collect();
    RectDataset::from_columns(cols).unwrap()
}

fn permutations(p: usize) -> Vec<Vec<usize>> {
    if p == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(p - 1) {
        for k in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(k, p - 1);
            out.push(v);
        }
    }
    out
}

fn brute_monotone(rows: &[Vec<bool>], p: usize) -> bool {
    permutations(p).iter().any(|order| {
        rows.iter().all(|r| {
            let seq: Vec<bool> = order.iter().map(|&j| r[j]).collect();
            seq.windows(2).all(|w| w[0] || !w[1])
        })
    })
}

fn mask_strategy() -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1usize..=5).prop_flat_map(|p| prop::collection::vec(prop::collection::vec(any::<bool>(), p), 1..30))
}

/// Staircase patterns with the columns shuffled.
fn monotone_strategy() -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1usize..=6)
        .prop_flat_map(|p| {
            (
                prop::collection::vec(0..=p, 1..30),
                Just((0..p).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
        .prop_map(|(cuts, order)| {
            cuts.iter()
                .map(|&c| {
                    let mut row = vec![false; order.len()];
                    order.iter().take(c).for_each(|&j| row[j] = true);
                    row
                })
                .collect()
        })
}

proptest! {
    #[test]
    fn missing_rates_count_cells(mask in mask_strategy()) {
        let s = missingness_summary(&masked(&mask)).unwrap();
        let n = mask.len() as f64;
        for (j, rate) in s.missing_rates.iter().enumerate() {
            let m = mask.iter().filter(|r| !r[j]).count() as f64;
            prop_assert_eq!(*rate, m / n);
        }
        let total: usize = s.classes.iter().map(|c| c.count).sum();
        prop_assert_eq!(total, mask.len());
    }

    #[test]
    fn monotone_detection_matches_all_orderings(mask in mask_strategy()) {
        let p = mask[0].len();
        let s = missingness_summary(&masked(&mask)).unwrap();
        prop_assert_eq!(s.monotone, brute_monotone(&mask, p));
        let pats: Vec<&[bool]> = mask.iter().map(Vec::as_slice).collect();
        prop_assert_eq!(monotone_greedy(&pats, p), brute_monotone(&mask, p));
    }

    #[test]
    fn shuffled_staircases_are_monotone(mask in monotone_strategy()) {
        let pats: Vec<&[bool]> = mask.iter().map(Vec::as_slice).collect();
        prop_assert!(is_monotone(&pats, mask[0].len()));
        prop_assert!(monotone_greedy(&pats, mask[0].len()));
    }

    #[test]
    fn sentinel_recoding_is_idempotent(
        cells in prop::collection::vec(prop_oneof![Just(-9i32), -3i32..20, Just(i32::MIN)], 1..40)
    ) {
        let schema = || vec![ColumnSpec::continuous("y", Role::Outcome).with_sentinels(["-9"])];
        let raw: Vec<String> = cells
            .iter()
            .map(|&c| if c == i32::MIN { String::new() } else { c.to_string() })
            .collect();
        let mut b = TableBuilder::new(schema(), &["y"]).unwrap();
        raw.iter().for_each(|f| b.push_row(&[f]).unwrap());
        let once = b.finish().unwrap();
        let mut b = TableBuilder::new(schema(), &["y"]).unwrap();
        for i in 0..once.n_rows() {
            b.push_row(&[once.column(0).display(i).unwrap_or_default()]).unwrap();
        }
        let twice = b.finish().unwrap();
        prop_assert_eq!(once.values(0), twice.values(0));
        let expected = cells.iter().filter(|&&c| c == -9 || c == i32::MIN).count();
        prop_assert_eq!(once.column(0).missing_count(), expected);
    }
}
