//! Numerical core for survey nonresponse bias analysis.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the whole
//! analytical side of a nonresponse bias study:
//!
//! * [`dataset`]: rectangular data with an explicit missingness mask and
//!   response-pattern summaries.
//! * [`glm`]: least squares, logistic regression by IRLS, AIC, forward
//!   stepwise selection, a greedy regression tree and ROC AUC.
//! * [`propensity`]: response propensity models, monotone stage
//!   composition, quintile strata and inverse-propensity weights.
//! * [`ppmm`]: proxy pattern-mixture estimates, the NRBA index and
//!   sensitivity sweeps over the selection parameter.
//! * [`survey`]: weighted means with linearized standard errors, design
//!   effects, weighting-class adjustment and raking.
//! * [`simlab`]: synthetic populations under MCAR/MAR/MNAR mechanisms and
//!   the complete-case / IPW / MI comparison harness.
//!
//! File formats, configuration and the command-line pipeline live in the
//! companion `nrba` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod dataset;
pub mod error;
pub mod glm;
pub mod ppmm;
pub mod propensity;
pub mod simlab;
pub mod stats;
pub mod survey;
pub mod warning;

pub use error::{Error, Result};
pub use warning::{Warning, WarningCode};
