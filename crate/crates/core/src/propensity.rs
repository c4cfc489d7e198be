//! Response propensity models, their composition across nested response
//! stages, propensity quintile strata and inverse-propensity weights.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::RectDataset;
use crate::error::{Error, Result};
use crate::glm::{auc, fit_logistic, predict, DesignMatrixSpec, LogisticFit, Scale};
use crate::stats::{mean, pearson, quantile_sorted, sorted_copy};
use crate::warning::{Warning, WarningCode};

/// Bounds applied to probabilities before they are inverted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClampPolicy {
    pub lower: f64,
    pub upper: f64,
}

impl Default for ClampPolicy {
    fn default() -> Self {
        ClampPolicy {
            lower: 0.01,
            upper: 0.99,
        }
    }
}

impl ClampPolicy {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && lower < upper && upper < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "clamp bounds [{lower}, {upper}] must satisfy 0 < lower < upper < 1"
            )));
        }
        Ok(ClampPolicy { lower, upper })
    }

    pub fn apply(&self, p: f64) -> f64 {
        p.clamp(self.lower, self.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageLevel {
    SingleStage,
    /// Fitted only on units that responded at every earlier stage.
    ConditionalStage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropensityModel {
    pub fit: LogisticFit,
    pub level: StageLevel,
    /// Eligible rows, in the order of `phat` and `responded`.
    pub rows: Vec<usize>,
    pub phat: Vec<f64>,
    pub responded: Vec<bool>,
    pub auc: f64,
    pub warnings: Vec<Warning>,
}

impl PropensityModel {
    /// Predicted response probabilities for arbitrary rows.
    pub fn score(&self, d: &RectDataset, rows: &[usize]) -> Result<Vec<f64>> {
        predict(&self.fit, d, rows, Scale::Response)
    }

    pub fn response_rate(&self) -> f64 {
        self.responded.iter().filter(|&&r| r).count() as f64 / self.rows.len() as f64
    }
}

/// Fits a logistic response model for `indicator` on the eligible rows and
/// scores every one of them.
pub fn fit_stage_propensity(
    d: &RectDataset,
    eligible: &[usize],
    indicator: usize,
    spec: &DesignMatrixSpec,
    level: StageLevel,
) -> Result<PropensityModel> {
    if eligible.is_empty() {
        return Err(Error::NoUsableRows);
    }
    let responded = eligible
        .iter()
        .map(|&r| match d.value(r, indicator) {
            Some(v) if v == 0.0 || v == 1.0 => Ok(v == 1.0),
            _ => Err(Error::ResponseIndicator {
                row: r + 1,
                column: d.column(indicator).name().into(),
            }),
        })
        .collect::<Result<Vec<bool>>>()?;
    let fit = fit_logistic(d, spec, indicator, eligible)?;
    let phat = predict(&fit, d, eligible, Scale::Response)?;
    let auc = auc(&phat, &responded)?;
    let mut warnings = Vec::new();
    if fit.separation {
        warnings.push(Warning::new(
            WarningCode::Separation,
            "response model shows separation; fitted probabilities reach 0 or 1",
        ));
    } else if !fit.converged {
        warnings.push(Warning::new(
            WarningCode::NotConverged,
            format!("response model did not converge in {} iterations", fit.iterations),
        ));
    }
    Ok(PropensityModel {
        fit,
        level,
        rows: eligible.to_vec(),
        phat,
        responded,
        auc,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComposedPropensity {
    pub probability: Vec<f64>,
    /// Units whose product reached 0 or 1 and was clamped.
    pub flagged: Vec<usize>,
}

/// Overall response probability as the product of per-stage probabilities,
/// each vector scored on the same units in the same order.
pub fn compose_propensities(stages: &[&[f64]], clamp: ClampPolicy) -> Result<ComposedPropensity> {
    let Some(first) = stages.first() else {
        return Err(Error::Empty("propensity stages"));
    };
    let n = first.len();
    if let Some(s) = stages.iter().find(|s| s.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "stage scored on {} units, expected {n}",
            s.len()
        )));
    }
    let mut probability = Vec::with_capacity(n);
    let mut flagged = Vec::new();
    for i in 0..n {
        let p = stages.iter().fold(1.0, |acc, s| acc * s[i]);
        if !(p > 0.0 && p < 1.0) {
            flagged.push(i);
            probability.push(clamp.apply(if p.is_nan() { 0.0 } else { p }));
        } else {
            probability.push(p);
        }
    }
    Ok(ComposedPropensity {
        probability,
        flagged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropensityStrata {
    /// The 0.2, 0.4, 0.6, 0.8 quantiles.
    pub breaks: Vec<f64>,
    /// Stratum 1..=5 per unit; a value equal to a break goes to the lower
    /// stratum.
    pub ids: Vec<u8>,
    /// Number of nonempty strata.
    pub groups: usize,
    pub warnings: Vec<Warning>,
}

pub const QUINTILE_PROBS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

pub fn quintile_strata(phat: &[f64]) -> Result<PropensityStrata> {
    if phat.len() < 5 {
        return Err(Error::InsufficientData {
            what: "respondents for quintile strata",
            needed: 5,
            found: phat.len(),
        });
    }
    let sorted = sorted_copy(phat);
    let breaks: Vec<f64> = QUINTILE_PROBS
        .iter()
        .map(|&q| quantile_sorted(&sorted, q))
        .collect();
    let ids: Vec<u8> = phat
        .iter()
        .map(|&p| 1 + breaks.iter().filter(|&&b| p > b).count() as u8)
        .collect();
    let mut present = [false; 5];
    ids.iter().for_each(|&id| present[id as usize - 1] = true);
    let groups = present.iter().filter(|&&b| b).count();
    let mut distinct = sorted.clone();
    distinct.dedup();
    let mut warnings = Vec::new();
    if distinct.len() < 5 || groups < 5 {
        warnings.push(Warning::new(
            WarningCode::DegenerateStrata,
            format!(
                "{} distinct propensities give {groups} nonempty strata",
                distinct.len()
            ),
        ));
    }
    Ok(PropensityStrata {
        breaks,
        ids,
        groups,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub n: usize,
}

impl FiveNumber {
    pub fn of(values: &[f64]) -> Option<FiveNumber> {
        if values.is_empty() {
            return None;
        }
        let s = sorted_copy(values);
        Some(FiveNumber {
            min: s[0],
            q1: quantile_sorted(&s, 0.25),
            median: quantile_sorted(&s, 0.5),
            q3: quantile_sorted(&s, 0.75),
            max: s[s.len() - 1],
            mean: mean(values),
            n: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumSummary {
    /// Index i holds stratum i + 1; `None` marks an empty stratum.
    pub strata: Vec<Option<FiveNumber>>,
    pub empty: Vec<u8>,
    /// Pearson correlation of propensity and outcome over respondents.
    pub correlation: f64,
    /// Set when the correlation was undefined and reported as 0.
    pub correlation_undefined: bool,
    pub warnings: Vec<Warning>,
}

/// Outcome distribution per propensity stratum, plus the
/// propensity-outcome correlation.
pub fn stratum_outcome_summary(
    strata: &PropensityStrata,
    phat: &[f64],
    outcome: &[f64],
) -> Result<StratumSummary> {
    if phat.len() != strata.ids.len() || outcome.len() != strata.ids.len() {
        return Err(Error::InvalidArgument(format!(
            "{} strata ids, {} propensities, {} outcomes",
            strata.ids.len(),
            phat.len(),
            outcome.len()
        )));
    }
    let mut buckets: [Vec<f64>; 5] = Default::default();
    for (&id, &y) in strata.ids.iter().zip(outcome) {
        buckets[id as usize - 1].push(y);
    }
    let summaries: Vec<Option<FiveNumber>> = buckets.iter().map(|b| FiveNumber::of(b)).collect();
    let empty: Vec<u8> = (1..=5u8).filter(|&i| summaries[i as usize - 1].is_none()).collect();
    let mut warnings = Vec::new();
    if !empty.is_empty() {
        warnings.push(Warning::new(
            WarningCode::EmptyStratum,
            format!("empty propensity strata: {empty:?}"),
        ));
    }
    let (correlation, undefined) = match pearson(phat, outcome) {
        Some(r) => (r, false),
        None => {
            warnings.push(Warning::new(
                WarningCode::ZeroVarianceCorrelation,
                "propensity or outcome is constant; correlation reported as 0",
            ));
            (0.0, true)
        }
    };
    Ok(StratumSummary {
        strata: summaries,
        empty,
        correlation,
        correlation_undefined: undefined,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpwWeights {
    pub weights: Vec<f64>,
    /// Positions whose probability was moved by the clamp.
    pub clamped: Vec<usize>,
    pub warnings: Vec<Warning>,
}

/// `base / clamp(p)` per unit; `base` defaults to 1.
pub fn ipw_weights(probability: &[f64], base: Option<&[f64]>, clamp: ClampPolicy) -> Result<IpwWeights> {
    if let Some(b) = base {
        if b.len() != probability.len() {
            return Err(Error::InvalidArgument(format!(
                "{} base weights for {} probabilities",
                b.len(),
                probability.len()
            )));
        }
    }
    let mut clamped = Vec::new();
    let weights = probability
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let c = clamp.apply(p);
            if c != p {
                clamped.push(i);
            }
            base.map_or(1.0, |b| b[i]) / c
        })
        .collect();
    let mut warnings = Vec::new();
    if !clamped.is_empty() {
        warnings.push(Warning::new(
            WarningCode::ClampedProbability,
            format!(
                "{} probabilities clamped to [{}, {}]",
                clamped.len(),
                clamp.lower,
                clamp.upper
            ),
        ));
    }
    Ok(IpwWeights {
        weights,
        clamped,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub respondents: Vec<usize>,
    pub nonrespondents: Vec<usize>,
}

/// Equal-width bins over [lo, hi]; the last bin is closed on the right.
pub fn propensity_histogram(
    phat: &[f64],
    responded: &[bool],
    bins: usize,
    lo: f64,
    hi: f64,
) -> Result<Histogram> {
    if bins == 0 || !(hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "histogram needs bins > 0 and hi > lo, got {bins} bins on [{lo}, {hi}]"
        )));
    }
    if phat.len() != responded.len() {
        return Err(Error::InvalidArgument(String::from(
            "propensity and response vectors differ in length",
        )));
    }
    let width = (hi - lo) / bins as f64;
    let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut h = Histogram {
        edges,
        respondents: alloc::vec![0; bins],
        nonrespondents: alloc::vec![0; bins],
    };
    for (&p, &r) in phat.iter().zip(responded) {
        if !(lo..=hi).contains(&p) {
            continue;
        }
        let b = (((p - lo) / width) as usize).min(bins - 1);
        if r {
            h.respondents[b] += 1;
        } else {
            h.nonrespondents[b] += 1;
        }
    }
    Ok(h)
}
