use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::design::{complete_rows, DesignMatrixSpec, FittedDesign};
use super::linalg::{Matrix, Qr};
use super::{Family, FittedModel};
use crate::dataset::RectDataset;
use crate::error::{Error, Result};
use crate::stats::{ln, sqrt};

/// Least squares on a raw matrix, with dependent columns dropped in order.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// Full-width coefficients; dropped columns hold 0.
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub qr: Qr,
}

pub fn least_squares(x: &Matrix, y: &[f64]) -> LeastSquares {
    let qr = Qr::new(x);
    let b = qr.solve(y);
    let mut coefficients = vec![0.0; x.cols()];
    for (&j, v) in qr.kept.iter().zip(b) {
        coefficients[j] = v;
    }
    let fitted = x.mul_vec(&coefficients);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss = residuals.iter().map(|r| r * r).sum();
    LeastSquares {
        coefficients,
        residuals,
        rss,
        qr,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub design: FittedDesign,
    pub coefficients: Vec<f64>,
    /// NaN for dropped columns or when no residual degrees of freedom.
    pub std_errors: Vec<f64>,
    /// Names of design columns dropped for rank deficiency.
    pub dropped: Vec<String>,
    pub rss: f64,
    pub sigma2: f64,
    pub n: usize,
    /// Retained coefficient count.
    pub k: usize,
    /// `-inf` for a perfect fit; see [`FittedModel::aic`].
    pub aic: f64,
    pub rows: Vec<usize>,
    pub residuals: Vec<f64>,
}

impl LinearFit {
    pub fn is_perfect(&self) -> bool {
        self.aic == f64::NEG_INFINITY
    }
}

impl FittedModel for LinearFit {
    fn design(&self) -> &FittedDesign {
        &self.design
    }

    fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn family(&self) -> Family {
        Family::Linear
    }

    fn aic(&self) -> Result<f64> {
        if self.is_perfect() {
            Err(Error::PerfectFit)
        } else {
            Ok(self.aic)
        }
    }
}

pub(crate) fn linear_aic(n: usize, k: usize, rss: f64) -> f64 {
    let nf = n as f64;
    nf * ln(rss / nf) + 2.0 * (k as f64 + 1.0)
}

/// Ordinary least squares of `response` on the expanded `spec`, using the
/// rows of `rows` that have the response and every term column observed.
pub fn fit_ols(
    d: &RectDataset,
    spec: &DesignMatrixSpec,
    response: usize,
    rows: &[usize],
) -> Result<LinearFit> {
    if d.column(response).is_categorical() {
        return Err(Error::InvalidArgument(format!(
            "response {} must be continuous",
            d.column(response).name()
        )));
    }
    let mut cols = spec.columns();
    cols.push(response);
    let used = complete_rows(d, rows, &cols);
    if used.is_empty() {
        return Err(Error::NoUsableRows);
    }
    let design = FittedDesign::learn(d, spec, &used);
    let x = design.matrix(d, &used)?;
    let y: Vec<f64> = used.iter().map(|&i| d.value(i, response).unwrap()).collect();
    let ls = least_squares(&x, &y);
    let n = used.len();
    let k = ls.qr.rank();
    if ls.qr.exhausted > 0 || k == 0 {
        return Err(Error::Singular {
            rows: n,
            columns: k + ls.qr.exhausted,
        });
    }
    let ybar = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let rss = ls.rss;
    let perfect = rss <= 1e-28 * tss.max(1.0);
    let rss = if perfect { 0.0 } else { rss };
    let sigma2 = if n > k { rss / (n - k) as f64 } else { f64::NAN };
    let cov = ls.qr.unscaled_covariance();
    let mut std_errors = vec![f64::NAN; x.cols()];
    for (a, &j) in ls.qr.kept.iter().enumerate() {
        std_errors[j] = sqrt(sigma2 * cov[a][a]);
    }
    let dropped = ls.qr.dropped.iter().map(|&j| design.names[j].clone()).collect();
    let aic = if perfect {
        f64::NEG_INFINITY
    } else {
        linear_aic(n, k, rss)
    };
    Ok(LinearFit {
        design,
        coefficients: ls.coefficients,
        std_errors,
        dropped,
        rss,
        sigma2,
        n,
        k,
        aic,
        rows: used,
        residuals: ls.residuals,
    })
}
