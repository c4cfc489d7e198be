use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::Serialize;

use super::rng_for;
use crate::error::{Error, Result};
use crate::glm::least_squares;
use crate::glm::linalg::Matrix;
use crate::stats::sqrt;

/// Multiple imputation of a continuous outcome from a normal linear model
/// fitted on the rows where `y` is observed.
///
/// Before each pass the parameters are drawn from their approximate
/// posterior: `σ*² = RSS/χ²_{r−k}` and `β* = β̂ + σ*·R⁻¹z`, where `R` is the
/// triangular QR factor of the respondent design. Missing values are then
/// `x'β* + σ*·ε`. Returns `m` completed outcome vectors.
pub fn mi_impute(x: &Matrix, y: &[Option<f64>], m: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    mi_impute_with(x, y, m, &mut rng_for(seed, 0))
}

pub fn mi_impute_with<R: Rng + ?Sized>(
    x: &Matrix,
    y: &[Option<f64>],
    m: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 imputations, got {m}")));
    }
    if x.rows() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "{} design rows for {} outcomes",
            x.rows(),
            y.len()
        )));
    }
    let obs: Vec<usize> = (0..y.len()).filter(|&i| y[i].is_some()).collect();
    let xr = subset_rows(x, &obs);
    let yr: Vec<f64> = obs.iter().map(|&i| y[i].unwrap()).collect();
    let ls = least_squares(&xr, &yr);
    let k = ls.qr.rank();
    if obs.len() <= k {
        return Err(Error::InsufficientData {
            what: "respondents for residual variance",
            needed: k + 1,
            found: obs.len(),
        });
    }
    if !ls.rss.is_finite() {
        return Err(Error::ZeroVariance("imputation model residuals"));
    }
    let df = (obs.len() - k) as f64;
    let chi = ChiSquared::new(df).map_err(|e| Error::InvalidArgument(format!("{e}")))?;
    let rinv = ls.qr.r_inverse();
    let kept = &ls.qr.kept;

    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let sigma = if ls.rss > 0.0 {
            sqrt(ls.rss / chi.sample(rng))
        } else {
            0.0
        };
        let z: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let mut beta = ls.coefficients.clone();
        for (i, &j) in kept.iter().enumerate() {
            let shift: f64 = (i..k).map(|l| rinv[i][l] * z[l]).sum();
            beta[j] += sigma * shift;
        }
        let completed = (0..y.len())
            .map(|i| match y[i] {
                Some(v) => v,
                None => {
                    let pred: f64 = (0..x.cols()).map(|j| x.get(i, j) * beta[j]).sum();
                    let e: f64 = rng.sample(StandardNormal);
                    pred + sigma * e
                }
            })
            .collect();
        out.push(completed);
    }
    Ok(out)
}

fn subset_rows(x: &Matrix, rows: &[usize]) -> Matrix {
    let cols: Vec<Vec<f64>> = (0..x.cols())
        .map(|j| rows.iter().map(|&i| x.get(i, j)).collect())
        .collect();
    Matrix::from_columns(rows.len(), &cols)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pooled {
    pub estimate: f64,
    pub within: f64,
    pub between: f64,
    /// `W̄ + (1 + 1/m)·B`.
    pub total: f64,
    pub m: usize,
}

/// Rubin's combining rules.
pub fn rubin_combine(estimates: &[f64], variances: &[f64]) -> Result<Pooled> {
    let m = estimates.len();
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 estimates, got {m}")));
    }
    if variances.len() != m {
        return Err(Error::InvalidArgument(format!(
            "{m} estimates but {} variances",
            variances.len()
        )));
    }
    let mf = m as f64;
    let estimate = estimates.iter().sum::<f64>() / mf;
    let within = variances.iter().sum::<f64>() / mf;
    let between = estimates
        .iter()
        .map(|e| (e - estimate) * (e - estimate))
        .sum::<f64>()
        / (mf - 1.0);
    Ok(Pooled {
        estimate,
        within,
        between,
        total: within + (1.0 + 1.0 / mf) * between,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rubin_hand_values() {
        let p = rubin_combine(&[1.0, 3.0], &[1.0, 1.0]).unwrap();
        assert_eq!(p.estimate, 2.0);
        assert_eq!(p.total, 4.0);
        let same = rubin_combine(&[2.0, 2.0, 2.0], &[0.5, 0.7, 0.9]).unwrap();
        assert_eq!(same.between, 0.0);
        assert!((same.total - 0.7).abs() < 1e-15);
        assert!(rubin_combine(&[1.0], &[1.0]).is_err());
    }

    fn design(xs: &[f64]) -> Matrix {
        Matrix::from_columns(xs.len(), &[vec![1.0; xs.len()], xs.to_vec()])
    }

    #[test]
    fn exact_model_imputes_predictions() {
        let x = design(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let y = vec![Some(1.0), Some(3.0), Some(5.0), None, None];
        let imps = mi_impute(&x, &y, 4, 1).unwrap();
        for c in &imps {
            assert!((c[3] - 7.0).abs() < 1e-9);
            assert!((c[4] - 9.0).abs() < 1e-9);
        }
    }

    #[test]
    fn imputations_vary_with_noise() {
        let x = design(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = vec![Some(1.0), Some(3.5), Some(4.0), Some(7.5), None, None];
        let imps = mi_impute(&x, &y, 3, 2).unwrap();
        assert_ne!(imps[0][4], imps[1][4]);
        assert_eq!(imps[0][..4], imps[1][..4]);
    }
}
