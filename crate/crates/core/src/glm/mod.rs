//! Regression numerics: least squares, logistic regression, AIC, forward
//! stepwise selection, an interaction-screening tree and ROC AUC.

mod auc;
pub mod design;
pub mod linalg;
mod logistic;
mod ols;
mod stepwise;
mod tree;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use auc::auc;
pub use design::{complete_rows, DesignMatrixSpec, FittedDesign, Term};
pub use logistic::{fit_logistic, irls, IrlsFit, LogisticFit, MAX_IRLS_ITER, SEPARATION_ETA};
pub use ols::{fit_ols, least_squares, LeastSquares, LinearFit};
pub use stepwise::{stepwise_forward, StepRecord, StepwiseResult};
pub use tree::{grow_tree, Split, Tree, TreeNode};

use crate::dataset::RectDataset;
use crate::error::Result;
use crate::stats::expit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Linear,
    Logistic,
}

/// Prediction scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Response,
}

pub trait FittedModel {
    fn design(&self) -> &FittedDesign;
    /// One coefficient per expanded design column; dropped columns are 0.
    fn coefficients(&self) -> &[f64];
    fn family(&self) -> Family;
    fn aic(&self) -> Result<f64>;
}

/// Scores `rows` with a fitted model. Rows must have every model column
/// observed; categorical levels unseen at fit time are an error.
pub fn predict<M: FittedModel + ?Sized>(
    fit: &M,
    d: &RectDataset,
    rows: &[usize],
    scale: Scale,
) -> Result<Vec<f64>> {
    let x = fit.design().matrix(d, rows)?;
    let eta = x.mul_vec(fit.coefficients());
    Ok(match (fit.family(), scale) {
        (Family::Logistic, Scale::Response) => eta.into_iter().map(expit).collect(),
        _ => eta,
    })
}

/// Either kind of fit, for code that selects the family at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum Fit {
    Linear(LinearFit),
    Logistic(LogisticFit),
}

impl Fit {
    pub fn fit(
        d: &RectDataset,
        spec: &DesignMatrixSpec,
        response: usize,
        rows: &[usize],
        family: Family,
    ) -> Result<Fit> {
        Ok(match family {
            Family::Linear => Fit::Linear(fit_ols(d, spec, response, rows)?),
            Family::Logistic => Fit::Logistic(fit_logistic(d, spec, response, rows)?),
        })
    }

    pub fn n(&self) -> usize {
        match self {
            Fit::Linear(f) => f.n,
            Fit::Logistic(f) => f.n,
        }
    }
}

impl FittedModel for Fit {
    fn design(&self) -> &FittedDesign {
        match self {
            Fit::Linear(f) => f.design(),
            Fit::Logistic(f) => f.design(),
        }
    }

    fn coefficients(&self) -> &[f64] {
        match self {
            Fit::Linear(f) => f.coefficients(),
            Fit::Logistic(f) => f.coefficients(),
        }
    }

    fn family(&self) -> Family {
        match self {
            Fit::Linear(_) => Family::Linear,
            Fit::Logistic(_) => Family::Logistic,
        }
    }

    fn aic(&self) -> Result<f64> {
        match self {
            Fit::Linear(f) => f.aic(),
            Fit::Logistic(f) => f.aic(),
        }
    }
}

/// AIC of a fitted model: `n·ln(rss/n) + 2(k+1)` for linear fits,
/// `deviance + 2k` for logistic fits.
pub fn aic<M: FittedModel + ?Sized>(fit: &M) -> Result<f64> {
    fit.aic()
}
