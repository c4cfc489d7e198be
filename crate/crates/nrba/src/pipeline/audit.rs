//! Comparison against external estimates, and the item-missingness audit.

use nrba_core::dataset::RectDataset;
use serde::Serialize;

use crate::config::Benchmark;
use crate::error::{NrbaError, Result};

pub const HETEROGENEITY_CAVEAT: &str = "differences in the estimates could be due to other sources of heterogeneity \
     (population definitions, reference periods, modes and measurement), not only nonresponse";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyEstimate {
    pub label: String,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExternalComparisonRow {
    pub label: String,
    pub survey_mean: f64,
    pub survey_se: f64,
    pub benchmark_mean: f64,
    pub benchmark_se: f64,
    pub difference: f64,
    /// `sqrt(se_survey² + se_benchmark²)`.
    pub se: f64,
    /// `|difference| > 2·se`.
    pub flagged: bool,
    pub caveat: &'static str,
}

/// Pairs each benchmark with the survey estimate of the same label.
pub fn external_comparison(
    estimates: &[SurveyEstimate],
    benchmarks: &[Benchmark],
) -> Result<Vec<ExternalComparisonRow>> {
    benchmarks
        .iter()
        .map(|b| {
            let e = estimates
                .iter()
                .find(|e| e.label == b.label)
                .ok_or_else(|| NrbaError::Invalid(format!("benchmark {} has no survey estimate", b.label)))?;
            let difference = e.mean - b.mean;
            let se = (e.se * e.se + b.se * b.se).sqrt();
            Ok(ExternalComparisonRow {
                label: b.label.clone(),
                survey_mean: e.mean,
                survey_se: e.se,
                benchmark_mean: b.mean,
                benchmark_se: b.se,
                difference,
                se,
                flagged: difference.abs() > 2.0 * se,
                caveat: HETEROGENEITY_CAVEAT,
            })
        })
        .collect()
}

pub const RESPONDENT_NOTE: &str = "sensitivity analysis treats unit respondents with this item missing as nonrespondents";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemAudit {
    pub outcome: String,
    pub unit_respondents: usize,
    pub unit_nonrespondents: usize,
    /// Missing among unit respondents.
    pub item_missing: usize,
    /// All missing cells in the column.
    pub total_missing: usize,
    pub note: &'static str,
}

pub fn item_missingness_audit(d: &RectDataset, outcomes: &[usize], indicator: usize) -> Result<Vec<ItemAudit>> {
    let responded = d.indicator(indicator)?;
    let unit_respondents = responded.iter().filter(|&&r| r).count();
    Ok(outcomes
        .iter()
        .map(|&c| {
            let missing = |i: usize| !d.is_observed(i, c);
            ItemAudit {
                outcome: d.column(c).name().to_string(),
                unit_respondents,
                unit_nonrespondents: d.n_rows() - unit_respondents,
                item_missing: (0..d.n_rows()).filter(|&i| responded[i] && missing(i)).count(),
                total_missing: (0..d.n_rows()).filter(|&i| missing(i)).count(),
                note: RESPONDENT_NOTE,
            }
        })
        .collect())
}
