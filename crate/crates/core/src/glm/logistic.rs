use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::design::{complete_rows, DesignMatrixSpec, FittedDesign};
use super::linalg::{Matrix, Qr};
use super::{Family, FittedModel};
use crate::dataset::RectDataset;
use crate::error::{Error, Result};
use crate::stats::{expit, ln, sqrt};

pub const MAX_IRLS_ITER: usize = 50;
const REL_DEVIANCE_TOL: f64 = 1e-10;
/// Linear predictors beyond this magnitude signal (quasi-)separation.
pub const SEPARATION_ETA: f64 = 30.0;
const PROB_EPS: f64 = 1e-15;

/// Result of IRLS on a raw design matrix.
#[derive(Debug, Clone)]
pub struct IrlsFit {
    /// Full-width coefficients; dropped columns hold 0.
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    pub fitted: Vec<f64>,
    pub eta: Vec<f64>,
    pub deviance: f64,
    pub converged: bool,
    pub separation: bool,
    pub iterations: usize,
    /// (XᵀŴX)⁻¹ over the kept columns at the final estimate.
    pub covariance: Vec<Vec<f64>>,
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

fn deviance(y: &[f64], p: &[f64]) -> f64 {
    -2.0 * y
        .iter()
        .zip(p)
        .map(|(&yi, &pi)| {
            let pi = clamp_prob(pi);
            yi * ln(pi) + (1.0 - yi) * ln(1.0 - pi)
        })
        .sum::<f64>()
}

/// Logistic regression by iteratively reweighted least squares.
///
/// Columns dependent on earlier ones are dropped once, from the unweighted
/// matrix. Iteration stops when the relative deviance change falls below
/// 1e-10 or after [`MAX_IRLS_ITER`] passes.
pub fn irls(x: &Matrix, y: &[f64]) -> IrlsFit {
    let base = Qr::new(x);
    let kept = base.kept.clone();
    let dropped = base.dropped.clone();
    let xk = x.select_columns(&kept);

    let mut p: Vec<f64> = y.iter().map(|&v| (v + 0.5) / 2.0).collect();
    let mut eta: Vec<f64> = p.iter().map(|&pi| crate::stats::logit(pi)).collect();
    let mut dev = deviance(y, &p);
    let mut beta = vec![0.0; kept.len()];
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=MAX_IRLS_ITER {
        iterations = it;
        let w: Vec<f64> = p.iter().map(|&pi| (pi * (1.0 - pi)).max(1e-300)).collect();
        let sw: Vec<f64> = w.iter().map(|&wi| sqrt(wi)).collect();
        let z: Vec<f64> = (0..y.len())
            .map(|i| (eta[i] + (y[i] - p[i]) / w[i]) * sw[i])
            .collect();
        let qr = Qr::with_tolerance(&xk.scale_rows(&sw), 0.0);
        let b = qr.solve(&z);
        beta.iter_mut().for_each(|v| *v = 0.0);
        for (&j, v) in qr.kept.iter().zip(b) {
            beta[j] = v;
        }
        eta = xk.mul_vec(&beta);
        p = eta.iter().map(|&e| clamp_prob(expit(e))).collect();
        let new_dev = deviance(y, &p);
        let rel = (new_dev - dev).abs() / (new_dev.abs() + 0.1);
        dev = new_dev;
        if rel < REL_DEVIANCE_TOL {
            converged = true;
            break;
        }
    }

    let separation = eta.iter().any(|e| e.abs() > SEPARATION_ETA);
    if separation {
        converged = false;
    }
    let sw: Vec<f64> = p.iter().map(|&pi| sqrt(pi * (1.0 - pi))).collect();
    let final_qr = Qr::with_tolerance(&xk.scale_rows(&sw), 0.0);
    let covariance = if final_qr.rank() == kept.len() {
        final_qr.unscaled_covariance()
    } else {
        vec![vec![f64::NAN; kept.len()]; kept.len()]
    };

    let mut coefficients = vec![0.0; x.cols()];
    let mut std_errors = vec![f64::NAN; x.cols()];
    for (a, &j) in kept.iter().enumerate() {
        coefficients[j] = beta[a];
        std_errors[j] = sqrt(covariance[a][a]);
    }
    IrlsFit {
        coefficients,
        std_errors,
        kept,
        dropped,
        fitted: p,
        eta,
        deviance: dev,
        converged,
        separation,
        iterations,
        covariance,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub design: FittedDesign,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub dropped: Vec<String>,
    pub deviance: f64,
    pub aic: f64,
    pub converged: bool,
    pub separation: bool,
    pub iterations: usize,
    pub n: usize,
    pub k: usize,
    pub rows: Vec<usize>,
    /// Fitted probabilities for `rows`.
    pub fitted: Vec<f64>,
}

impl FittedModel for LogisticFit {
    fn design(&self) -> &FittedDesign {
        &self.design
    }

    fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    fn family(&self) -> Family {
        Family::Logistic
    }

    fn aic(&self) -> Result<f64> {
        Ok(self.aic)
    }
}

/// Binary 0/1 response values for `rows`.
pub(crate) fn binary_response(d: &RectDataset, response: usize, rows: &[usize]) -> Result<Vec<f64>> {
    rows.iter()
        .map(|&i| {
            let c = d.column(response);
            let v = if c.is_categorical() {
                c.display(i).and_then(|s| s.trim().parse::<f64>().ok())
            } else {
                c.value(i)
            };
            match v {
                Some(x) if x == 0.0 || x == 1.0 => Ok(x),
                _ => Err(Error::InvalidArgument(format!(
                    "response {} must be coded 0/1 (row {})",
                    c.name(),
                    i + 1
                ))),
            }
        })
        .collect()
}

pub fn fit_logistic(
    d: &RectDataset,
    spec: &DesignMatrixSpec,
    response: usize,
    rows: &[usize],
) -> Result<LogisticFit> {
    let mut cols = spec.columns();
    cols.push(response);
    let used = complete_rows(d, rows, &cols);
    if used.is_empty() {
        return Err(Error::NoUsableRows);
    }
    let y = binary_response(d, response, &used)?;
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == y.len() {
        return Err(Error::DegenerateResponse);
    }
    let design = FittedDesign::learn(d, spec, &used);
    let x = design.matrix(d, &used)?;
    let fit = irls(&x, &y);
    let k = fit.kept.len();
    if k == 0 || Qr::new(&x).exhausted > 0 {
        return Err(Error::Singular {
            rows: used.len(),
            columns: x.cols(),
        });
    }
    let dropped = fit.dropped.iter().map(|&j| design.names[j].clone()).collect();
    Ok(LogisticFit {
        design,
        coefficients: fit.coefficients,
        std_errors: fit.std_errors,
        dropped,
        deviance: fit.deviance,
        aic: fit.deviance + 2.0 * k as f64,
        converged: fit.converged,
        separation: fit.separation,
        iterations: fit.iterations,
        n: used.len(),
        k,
        rows: used,
        fitted: fit.fitted,
    })
}
