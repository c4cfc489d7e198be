//! Design-based estimation: weighted means with Taylor-linearized standard
//! errors, design effects, weighting-class nonresponse adjustment and
//! raking.
//!
//! Variances use the with-replacement approximation: residual totals per
//! PSU, `a_h/(a_h − 1)` times their spread within each stratum, no finite
//! population correction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::sqrt;

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyDesign {
    pub weights: Vec<f64>,
    pub psu: Vec<u64>,
    pub stratum: Option<Vec<u64>>,
}

impl SurveyDesign {
    /// Validates lengths and weights. Weights must be finite and
    /// non-negative with at least one positive; a zero weight removes the
    /// row from estimation.
    pub fn new(weights: Vec<f64>, psu: Option<Vec<u64>>, stratum: Option<Vec<u64>>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::Empty("design"));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "weight {} in row {} is not a non-negative number",
                weights[i],
                i + 1
            )));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::InvalidArgument("all weights are zero".into()));
        }
        let psu = psu.unwrap_or_else(|| (0..n as u64).collect());
        if psu.len() != n || stratum.as_ref().is_some_and(|s| s.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "design columns differ in length from the {n} weights"
            )));
        }
        Ok(SurveyDesign {
            weights,
            psu,
            stratum,
        })
    }

    /// Unit weights, each row its own PSU.
    pub fn unweighted(n: usize) -> Result<Self> {
        SurveyDesign::new(alloc::vec![1.0; n], None, None)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        SurveyDesign::new(weights, Some(self.psu.clone()), self.stratum.clone())
    }

    fn stratum_of(&self, i: usize) -> u64 {
        self.stratum.as_ref().map_or(0, |s| s[i])
    }

    /// Linearized variance of a statistic with per-row influence values `z`.
    fn linearized_variance(&self, z: &[f64]) -> Result<f64> {
        let mut totals: BTreeMap<u64, BTreeMap<u64, f64>> = BTreeMap::new();
        for i in 0..self.len() {
            if self.weights[i] <= 0.0 {
                continue;
            }
            *totals
                .entry(self.stratum_of(i))
                .or_default()
                .entry(self.psu[i])
                .or_insert(0.0) += z[i];
        }
        let mut var = 0.0;
        for (h, psus) in &totals {
            let a = psus.len();
            if a < 2 {
                return Err(Error::SinglePsu { stratum: *h });
            }
            let af = a as f64;
            let m = psus.values().sum::<f64>() / af;
            let ss: f64 = psus.values().map(|t| (t - m) * (t - m)).sum();
            var += af / (af - 1.0) * ss;
        }
        Ok(var)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub label: String,
    pub mean: f64,
    pub se: f64,
    pub deff: Option<f64>,
    pub n_eff: Option<f64>,
    /// Rows contributing to the estimate.
    pub n: usize,
}

struct Analyzed {
    mean: f64,
    var: f64,
    srs_var: f64,
    n: usize,
}

fn analyze(values: &[Option<f64>], design: &SurveyDesign, domain: Option<&[bool]>) -> Result<Analyzed> {
    let n_rows = design.len();
    if values.len() != n_rows || domain.is_some_and(|d| d.len() != n_rows) {
        return Err(Error::InvalidArgument(format!(
            "{} values for a design of {n_rows} rows",
            values.len()
        )));
    }
    let used: Vec<usize> = (0..n_rows)
        .filter(|&i| {
            design.weights[i] > 0.0 && values[i].is_some() && domain.is_none_or(|d| d[i])
        })
        .collect();
    if used.is_empty() {
        return Err(Error::NoUsableRows);
    }
    let sw: f64 = used.iter().map(|&i| design.weights[i]).sum();
    let mean = used
        .iter()
        .map(|&i| design.weights[i] * values[i].unwrap())
        .sum::<f64>()
        / sw;
    let mut z = alloc::vec![0.0; n_rows];
    for &i in &used {
        z[i] = design.weights[i] * (values[i].unwrap() - mean) / sw;
    }
    let var = design.linearized_variance(&z)?;
    let n = used.len();
    let srs_var = if n > 1 {
        let nf = n as f64;
        let s2 = nf / (nf - 1.0)
            * used
                .iter()
                .map(|&i| {
                    let r = values[i].unwrap() - mean;
                    design.weights[i] * r * r
                })
                .sum::<f64>()
            / sw;
        s2 / nf
    } else {
        0.0
    };
    Ok(Analyzed {
        mean,
        var,
        srs_var,
        n,
    })
}

/// Weighted mean `Σwy/Σw` with its linearized standard error. With a
/// domain, rows outside it keep their PSUs but contribute zero residual.
/// Rows with a missing value are treated as outside the domain.
pub fn weighted_mean(
    values: &[Option<f64>],
    design: &SurveyDesign,
    domain: Option<&[bool]>,
) -> Result<EstimateRow> {
    let a = analyze(values, design, domain)?;
    let (deff, n_eff) = if a.srs_var > 0.0 {
        let deff = a.var / a.srs_var;
        (Some(deff), (deff > 0.0).then(|| a.n as f64 / deff))
    } else {
        (None, None)
    };
    Ok(EstimateRow {
        label: String::new(),
        mean: a.mean,
        se: sqrt(a.var),
        deff,
        n_eff,
        n: a.n,
    })
}

/// Linearized variance over the weighted simple-random-sampling variance
/// `s²_w/n` of the analyzed rows.
pub fn design_effect(values: &[Option<f64>], design: &SurveyDesign) -> Result<f64> {
    let a = analyze(values, design, None)?;
    if !(a.srs_var > 0.0) {
        return Err(Error::ZeroVariance("outcome under simple random sampling"));
    }
    Ok(a.var / a.srs_var)
}

/// Scales respondent weights so each class keeps its eligible weight total;
/// nonrespondents get weight zero.
pub fn weighting_class_adjust(
    design: &SurveyDesign,
    responded: &[bool],
    classes: &[u64],
) -> Result<SurveyDesign> {
    let n = design.len();
    if responded.len() != n || classes.len() != n {
        return Err(Error::InvalidArgument(format!(
            "response and class vectors must have {n} entries"
        )));
    }
    let mut eligible: BTreeMap<u64, f64> = BTreeMap::new();
    let mut resp: BTreeMap<u64, f64> = BTreeMap::new();
    for i in 0..n {
        *eligible.entry(classes[i]).or_insert(0.0) += design.weights[i];
        let r = resp.entry(classes[i]).or_insert(0.0);
        if responded[i] {
            *r += design.weights[i];
        }
    }
    let empty: Vec<u64> = resp
        .iter()
        .filter(|(c, &r)| r <= 0.0 && eligible[*c] > 0.0)
        .map(|(c, _)| *c)
        .collect();
    if !empty.is_empty() {
        return Err(Error::EmptyClasses { classes: empty });
    }
    let weights = (0..n)
        .map(|i| {
            if responded[i] {
                design.weights[i] * eligible[&classes[i]] / resp[&classes[i]]
            } else {
                0.0
            }
        })
        .collect();
    design.with_weights(weights)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub name: String,
    /// Category per row.
    pub categories: Vec<u64>,
    pub targets: BTreeMap<u64, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RakeRecord {
    pub converged: bool,
    pub iterations: usize,
    /// Largest absolute gap between weighted margin and target, per margin.
    pub discrepancies: Vec<f64>,
}

pub const RAKE_TOL: f64 = 1e-8;
pub const RAKE_MAX_ITER: usize = 100;

fn margin_totals(weights: &[f64], m: &Margin) -> BTreeMap<u64, f64> {
    let mut t: BTreeMap<u64, f64> = m.targets.keys().map(|&k| (k, 0.0)).collect();
    for (w, c) in weights.iter().zip(&m.categories) {
        *t.get_mut(c).expect("categories validated") += w;
    }
    t
}

fn discrepancy(weights: &[f64], m: &Margin) -> f64 {
    margin_totals(weights, m)
        .iter()
        .map(|(k, t)| (t - m.targets[k]).abs())
        .fold(0.0, f64::max)
}

/// Iterative proportional fitting of the weights to every margin in turn.
/// Non-convergence is reported in the record, not as an error.
pub fn rake(
    design: &SurveyDesign,
    margins: &[Margin],
    max_iter: usize,
    tol: f64,
) -> Result<(SurveyDesign, RakeRecord)> {
    if margins.is_empty() {
        return Err(Error::Empty("raking margins"));
    }
    let n = design.len();
    for m in margins {
        if m.categories.len() != n {
            return Err(Error::InvalidArgument(format!(
                "margin {} has {} categories for {n} rows",
                m.name,
                m.categories.len()
            )));
        }
        if let Some((k, t)) = m.targets.iter().find(|(_, t)| !(**t > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "margin {} target for category {k} is {t}",
                m.name
            )));
        }
        let present: BTreeSet<u64> = (0..n)
            .filter(|&i| design.weights[i] > 0.0)
            .map(|i| m.categories[i])
            .collect();
        if let Some(c) = present.iter().find(|c| !m.targets.contains_key(c)) {
            return Err(Error::Infeasible(format!(
                "margin {}: category {c} has no target",
                m.name
            )));
        }
        if let Some(c) = m.targets.keys().find(|c| !present.contains(c)) {
            return Err(Error::Infeasible(format!(
                "margin {}: category {c} has no positive-weight rows",
                m.name
            )));
        }
    }
    let mut w = design.weights.clone();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        for m in margins {
            let totals = margin_totals(&w, m);
            for (wi, c) in w.iter_mut().zip(&m.categories) {
                if *wi > 0.0 {
                    *wi *= m.targets[c] / totals[c];
                }
            }
        }
        if margins.iter().all(|m| discrepancy(&w, m) <= tol) {
            converged = true;
            break;
        }
    }
    let discrepancies = margins.iter().map(|m| discrepancy(&w, m)).collect();
    Ok((
        design.with_weights(w)?,
        RakeRecord {
            converged,
            iterations,
            discrepancies,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subgroups {
    pub name: String,
    pub labels: Vec<String>,
    /// Index into `labels` per row.
    pub codes: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub design: String,
    /// `None` for the overall estimate.
    pub subgroup: Option<String>,
    pub estimate: EstimateRow,
}

/// One estimate per design, overall and then per subgroup level.
pub fn comparison_table(
    values: &[Option<f64>],
    designs: &[(String, SurveyDesign)],
    subgroups: Option<&Subgroups>,
) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::new();
    for (label, design) in designs {
        let mut est = weighted_mean(values, design, None)?;
        est.label = label.clone();
        rows.push(ComparisonRow {
            design: label.clone(),
            subgroup: None,
            estimate: est,
        });
        if let Some(g) = subgroups {
            for (k, level) in g.labels.iter().enumerate() {
                let dom: Vec<bool> = g.codes.iter().map(|c| *c == Some(k)).collect();
                let mut est = weighted_mean(values, design, Some(&dom))?;
                est.label = format!("{}={level}", g.name);
                rows.push(ComparisonRow {
                    design: label.clone(),
                    subgroup: Some(level.clone()),
                    estimate: est,
                });
            }
        }
    }
    Ok(rows)
}
