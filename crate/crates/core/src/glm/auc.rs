use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Area under the ROC curve as the Mann–Whitney probability
/// `P(score₁ > score₀) + ½·P(tie)`.
///
/// The count of concordant pairs is accumulated in half-units as an
/// integer, so the result is exact up to the final division.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument(alloc::format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let (n1, n0) = class_counts(labels)?;
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut twice_u: u128 = 0;
    let mut neg_below: u128 = 0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u128, 0u128);
        while j < idx.len() && scores[idx[j]] == scores[idx[i]] {
            if labels[idx[j]] {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        twice_u += 2 * pos * neg_below + pos * neg;
        neg_below += neg;
        i = j;
    }
    Ok(twice_u as f64 / (2 * n1 * n0) as f64)
}

fn class_counts(labels: &[bool]) -> Result<(u128, u128)> {
    let n1 = labels.iter().filter(|&&l| l).count() as u128;
    let n0 = labels.len() as u128 - n1;
    if n1 == 0 || n0 == 0 {
        return Err(Error::DegenerateResponse);
    }
    Ok((n1, n0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn perfect_and_flat() {
        let s = [0.1, 0.2, 0.8, 0.9];
        let l = [false, false, true, true];
        assert_eq!(auc(&s, &l).unwrap(), 1.0);
        assert_eq!(auc(&[0.3; 4], &l).unwrap(), 0.5);
        assert!(auc(&s, &[true; 4]).is_err());
    }

    #[test]
    fn complement_labels_sum_to_one() {
        let s = [0.3, 0.1, 0.7, 0.5, 0.9, 0.2];
        let l = vec![true, false, true, false, false, true];
        let flipped: Vec<bool> = l.iter().map(|b| !b).collect();
        assert_eq!(auc(&s, &l).unwrap() + auc(&s, &flipped).unwrap(), 1.0);
    }
}
