//! The ten-step nonresponse bias analysis, run end to end from one
//! configuration.
//!
//! Steps run strictly in order and each writes its tables before the next
//! starts, so a failure leaves every earlier artifact on disk. Hard errors
//! abort with the step number; soft diagnostics accumulate in the report.

mod audit;
mod bundle;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nrba_core::dataset::{cross_pattern_table, missingness_summary, RectDataset};
use nrba_core::glm::{
    auc, complete_rows, fit_ols, grow_tree, stepwise_forward, Family, LinearFit, Term,
};
use nrba_core::ppmm::{
    build_proxy, classify_strength, sensitivity_sweep, standardized_deviation, subgroup_sweep,
    DeviationClass, ProxySeries, RhoClass, SensitivityTable,
};
use nrba_core::propensity::{
    compose_propensities, fit_stage_propensity, ipw_weights, propensity_histogram,
    quintile_strata, stratum_outcome_summary, ClampPolicy, FiveNumber, PropensityStrata,
    StageLevel,
};
use nrba_core::simlab::{Cell, Strength};
use nrba_core::survey::{
    rake, weighted_mean, weighting_class_adjust, EstimateRow, Margin, RakeRecord, SurveyDesign,
    RAKE_MAX_ITER, RAKE_TOL,
};
use nrba_core::{Warning, WarningCode};
use serde::Serialize;

use crate::config::NrbaConfig;
use crate::error::{NrbaError, Result};
use crate::export::{num, opt_num, write_json, Table};
use crate::io::load_table;

pub use audit::{
    external_comparison, item_missingness_audit, ExternalComparisonRow, ItemAudit,
    SurveyEstimate, HETEROGENEITY_CAVEAT, RESPONDENT_NOTE,
};
pub use bundle::{synthetic_config, write_synthetic_bundle, BUNDLE_CONFIG, BUNDLE_DATA};

pub const STEP_NAMES: [&str; 10] = [
    "missing-data patterns",
    "key survey variables",
    "outcome models",
    "external predictors",
    "response propensity",
    "potential for bias adjustment",
    "weighting adjustments",
    "external comparison",
    "sensitivity analysis",
    "item nonresponse",
];

pub const REPORT_FILE: &str = "report.json";
pub const WARNINGS_FILE: &str = "warnings.csv";

/// Placement thresholds for the bias-adjustment table cell.
pub const AUC_HIGH: f64 = 0.7;
pub const CORRELATION_HIGH: f64 = 0.4;
pub const RHO_HIGH: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportWarning {
    pub step: u8,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnMissing {
    pub column: String,
    pub missing: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternRow {
    /// One character per column: `1` observed, `0` missing.
    pub pattern: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstrumentCell {
    pub responding: Vec<bool>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstrumentTable {
    pub groups: Vec<String>,
    pub cells: Vec<InstrumentCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternSummary {
    pub n: usize,
    pub respondents: usize,
    pub response_rate: f64,
    pub columns: Vec<ColumnMissing>,
    pub patterns: Vec<PatternRow>,
    pub monotone: bool,
    pub instruments: Option<InstrumentTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeSummary {
    pub outcome: String,
    pub observed: usize,
    pub missing: usize,
    /// Observed among unit respondents.
    pub respondents_observed: usize,
    pub respondent_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeModel {
    pub outcome: String,
    pub n_fit: usize,
    pub terms: Vec<String>,
    pub screened_interactions: Vec<String>,
    pub aic: f64,
    pub r2: f64,
    pub rho_hat: f64,
    pub sign_flipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictorGain {
    pub outcome: String,
    pub rho_base: f64,
    pub rho_extended: Option<f64>,
    pub gain: Option<f64>,
    pub late_terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageSummary {
    pub indicator: String,
    pub level: StageLevel,
    pub eligible: usize,
    pub respondents: usize,
    pub response_rate: f64,
    /// `None` when every eligible unit responded and no model was fitted.
    pub auc: Option<f64>,
    pub aic: Option<f64>,
    pub terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumRow {
    pub stratum: u8,
    pub lower: f64,
    pub upper: f64,
    pub units: usize,
    pub respondents: usize,
    pub response_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropensitySummary {
    pub stages: Vec<StageSummary>,
    /// AUC of the composed probability against final response.
    pub auc: f64,
    pub flagged: usize,
    pub clamped: usize,
    pub breaks: Vec<f64>,
    pub strata: Vec<StratumRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthRow {
    pub outcome: String,
    pub rho: f64,
    pub rho_class: RhoClass,
    pub d: f64,
    pub d_class: DeviationClass,
    pub auc: Option<f64>,
    pub corr_propensity_outcome: Option<f64>,
    /// Cell label of the bias-adjustment table, e.g. `LLH`.
    pub cell: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignEstimate {
    pub design: String,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightingRow {
    pub outcome: String,
    /// `overall`, or the subgroup column.
    pub group: String,
    pub level: String,
    pub n: usize,
    pub estimates: Vec<DesignEstimate>,
    /// Design effect under the final design.
    pub deff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightingSummary {
    pub designs: Vec<String>,
    pub final_design: String,
    pub rake: Option<RakeRecord>,
    pub rows: Vec<WeightingRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupSensitivity {
    pub column: String,
    pub level: String,
    pub table: SensitivityTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeSensitivity {
    pub outcome: String,
    /// `base`, or `extended` when late auxiliaries were used.
    pub proxy: &'static str,
    pub table: SensitivityTable,
    pub subgroups: Vec<SubgroupSensitivity>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NrbaReport {
    pub seed: u64,
    pub phis: Vec<f64>,
    pub patterns: PatternSummary,
    pub outcomes: Vec<OutcomeSummary>,
    pub outcome_models: Vec<OutcomeModel>,
    pub external_predictors: Vec<PredictorGain>,
    /// `None` when there were no nonrespondents.
    pub propensity: Option<PropensitySummary>,
    pub strength: Vec<StrengthRow>,
    pub weighting: WeightingSummary,
    pub external: Vec<ExternalComparisonRow>,
    pub sensitivity: Vec<OutcomeSensitivity>,
    pub item_missingness: Vec<ItemAudit>,
    /// File names written, in order, relative to the output directory.
    pub artifacts: Vec<String>,
    pub warnings: Vec<ReportWarning>,
}

struct Run<'a> {
    cfg: &'a NrbaConfig,
    d: RectDataset,
    out: PathBuf,
    step: u8,
    artifacts: Vec<String>,
    warnings: Vec<ReportWarning>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, table: &Table) -> Result<()> {
        table.write(&self.out.join(name))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn warn(&mut self, w: Warning) {
        self.warnings.push(ReportWarning {
            step: self.step,
            code: w.code.as_str(),
            message: w.message,
        });
    }

    fn warn_all(&mut self, ws: impl IntoIterator<Item = Warning>) {
        ws.into_iter().for_each(|w| self.warn(w));
    }

    fn col(&self, name: &str) -> Result<usize> {
        Ok(self.d.require(name)?)
    }

    fn cols(&self, names: &[String]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.col(n)).collect()
    }
}

fn in_step<T>(step: u8, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().map_err(|e| NrbaError::Step {
        step,
        name: STEP_NAMES[step as usize - 1],
        source: Box::new(e),
    })
}

fn load(cfg: &NrbaConfig) -> Result<RectDataset> {
    load_table(&cfg.input, &cfg.columns, cfg.delimiter_byte())
}

fn prepare_output(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| NrbaError::io(dir, e))
}

/// Step 1 alone: pattern tables written to the output directory.
pub fn run_patterns(cfg: &NrbaConfig) -> Result<PatternSummary> {
    let d = load(cfg)?;
    prepare_output(&cfg.output_dir)?;
    let mut run = Run {
        cfg,
        d,
        out: cfg.output_dir.clone(),
        step: 1,
        artifacts: Vec::new(),
        warnings: Vec::new(),
    };
    in_step(1, || step_patterns(&mut run))
}

/// Runs all ten steps and writes the report tree under `output_dir`.
pub fn run_pipeline(cfg: &NrbaConfig) -> Result<NrbaReport> {
    let d = load(cfg)?;
    prepare_output(&cfg.output_dir)?;
    let mut run = Run {
        cfg,
        d,
        out: cfg.output_dir.clone(),
        step: 1,
        artifacts: Vec::new(),
        warnings: Vec::new(),
    };

    let patterns = in_step(1, || step_patterns(&mut run))?;
    run.step = 2;
    let outcomes = in_step(2, || step_outcomes(&mut run))?;
    run.step = 3;
    let models = in_step(3, || step_outcome_models(&mut run))?;
    run.step = 4;
    let (gains, extended) = in_step(4, || step_external_predictors(&mut run, &models))?;
    // The sensitivity analysis uses the richest proxy available.
    let proxies: Vec<(ProxySeries, &'static str)> = models
        .iter()
        .zip(extended)
        .map(|(m, e)| match e {
            Some(p) => (p, "extended"),
            None => (m.proxy.clone(), "base"),
        })
        .collect();
    run.step = 5;
    let propensity = in_step(5, || step_propensity(&mut run))?;
    run.step = 6;
    let strength = in_step(6, || step_strength(&mut run, &proxies, propensity.as_ref()))?;
    run.step = 7;
    let (weighting, final_estimates) =
        in_step(7, || step_weighting(&mut run, propensity.as_ref()))?;
    run.step = 8;
    let external = in_step(8, || step_external(&mut run, &final_estimates))?;
    run.step = 9;
    let sensitivity = in_step(9, || step_sensitivity(&mut run, &proxies))?;
    run.step = 10;
    let item_missingness = in_step(10, || step_item_missingness(&mut run))?;

    let mut warnings_table = Table::new(["step", "code", "message"]);
    for w in &run.warnings {
        warnings_table.push(vec![w.step.to_string(), w.code.into(), w.message.clone()]);
    }
    run.write(WARNINGS_FILE, &warnings_table)?;
    run.artifacts.push(REPORT_FILE.into());

    let report = NrbaReport {
        seed: cfg.seed,
        phis: cfg.phis.clone(),
        patterns,
        outcomes,
        outcome_models: models.into_iter().map(|m| m.summary).collect(),
        external_predictors: gains,
        propensity: propensity.map(|p| p.summary),
        strength,
        weighting,
        external,
        sensitivity,
        item_missingness,
        artifacts: run.artifacts,
        warnings: run.warnings,
    };
    write_json(&run.out.join(REPORT_FILE), &report)?;
    Ok(report)
}

fn step_patterns(run: &mut Run) -> Result<PatternSummary> {
    let d = &run.d;
    let summary = missingness_summary(d)?;
    let resp = run.col(&run.cfg.response_indicator)?;
    let responded = d.indicator(resp)?;
    let respondents = responded.iter().filter(|&&r| r).count();
    let n = d.n_rows();

    let columns: Vec<ColumnMissing> = d
        .columns()
        .iter()
        .zip(&summary.missing_rates)
        .map(|(c, &rate)| ColumnMissing {
            column: c.name().to_string(),
            missing: c.missing_count(),
            rate,
        })
        .collect();
    let patterns: Vec<PatternRow> = summary
        .classes
        .iter()
        .map(|c| PatternRow {
            pattern: c.pattern.iter().map(|&o| if o { '1' } else { '0' }).collect(),
            count: c.count,
        })
        .collect();

    let instruments = if run.cfg.instrument_groups.is_empty() {
        None
    } else {
        let names: Vec<String> = run.cfg.instrument_groups.keys().cloned().collect();
        let groups = run
            .cfg
            .instrument_groups
            .values()
            .map(|cols| run.cols(cols))
            .collect::<Result<Vec<_>>>()?;
        let cross = cross_pattern_table(d, &groups)?;
        let cells = (0..cross.counts.len())
            .map(|idx| InstrumentCell {
                responding: (0..groups.len()).map(|i| idx >> i & 1 == 1).collect(),
                count: cross.counts[idx],
            })
            .collect();
        Some(InstrumentTable {
            groups: names,
            cells,
        })
    };

    let mut t = Table::new(["column", "missing", "missing_rate"]);
    for c in &columns {
        t.push(vec![c.column.clone(), c.missing.to_string(), num(c.rate)]);
    }
    run.write("step01_missingness.csv", &t)?;

    let mut t = Table::new(["pattern", "count", "share"]);
    for p in &patterns {
        t.push(vec![
            p.pattern.clone(),
            p.count.to_string(),
            num(p.count as f64 / n as f64),
        ]);
    }
    run.write("step01_patterns.csv", &t)?;

    if let Some(inst) = &instruments {
        let mut header = inst.groups.clone();
        header.push("count".into());
        let mut t = Table::new(header);
        for c in &inst.cells {
            let mut row: Vec<String> = c
                .responding
                .iter()
                .map(|&r| if r { "1" } else { "0" }.to_string())
                .collect();
            row.push(c.count.to_string());
            t.push(row);
        }
        run.write("step01_instrument_patterns.csv", &t)?;
    }

    if respondents == n {
        run.warn(Warning::new(
            WarningCode::NoNonrespondents,
            "every unit responded; adjustments and sensitivity indices are null",
        ));
    }
    if respondents == 0 {
        return Err(NrbaError::Invalid("no unit respondents".into()));
    }

    Ok(PatternSummary {
        n,
        respondents,
        response_rate: respondents as f64 / n as f64,
        columns,
        patterns,
        monotone: summary.monotone,
        instruments,
    })
}

fn respondents_of(run: &Run) -> Result<Vec<bool>> {
    let resp = run.col(&run.cfg.response_indicator)?;
    Ok(run.d.indicator(resp)?)
}

fn step_outcomes(run: &mut Run) -> Result<Vec<OutcomeSummary>> {
    let responded = respondents_of(run)?;
    let mut out = Vec::new();
    for name in &run.cfg.outcomes {
        let c = run.col(name)?;
        let col = run.d.column(c);
        if col.is_categorical() {
            return Err(NrbaError::Invalid(format!("outcome {name} must be continuous")));
        }
        let vals: Vec<f64> = (0..run.d.n_rows())
            .filter(|&i| responded[i])
            .filter_map(|i| col.value(i))
            .collect();
        let observed = run.d.n_rows() - col.missing_count();
        out.push(OutcomeSummary {
            outcome: name.clone(),
            observed,
            missing: col.missing_count(),
            respondents_observed: vals.len(),
            respondent_mean: vals.iter().sum::<f64>() / vals.len() as f64,
        });
    }
    let mut t = Table::new([
        "outcome",
        "observed",
        "missing",
        "respondents_observed",
        "respondent_mean",
    ]);
    for o in &out {
        t.push(vec![
            o.outcome.clone(),
            o.observed.to_string(),
            o.missing.to_string(),
            o.respondents_observed.to_string(),
            num(o.respondent_mean),
        ]);
    }
    run.write("step02_outcomes.csv", &t)?;
    Ok(out)
}

struct FittedOutcome {
    summary: OutcomeModel,
    fit: LinearFit,
    proxy: ProxySeries,
}

/// Main effects, configured interactions, then tree-screened pairs.
fn candidate_terms(
    run: &Run,
    rows: &[usize],
    response: usize,
    auxiliaries: &[usize],
) -> Result<(Vec<Term>, Vec<Term>)> {
    let mut terms: Vec<Term> = auxiliaries.iter().map(|&c| Term::Main(c)).collect();
    for [a, b] in &run.cfg.interactions {
        let t = Term::Interaction(run.col(a)?, run.col(b)?);
        if !terms.contains(&t) {
            terms.push(t);
        }
    }
    let mut screened = Vec::new();
    if let Some(screen) = run.cfg.interaction_screen {
        let tree = grow_tree(
            &run.d,
            rows,
            response,
            auxiliaries,
            screen.max_depth,
            screen.min_node,
        )?;
        for (a, b) in tree.interaction_pairs {
            if a == b {
                continue;
            }
            let t = Term::Interaction(a.min(b), a.max(b));
            let flipped = Term::Interaction(a.max(b), a.min(b));
            if !terms.contains(&t) && !terms.contains(&flipped) {
                terms.push(t);
                screened.push(t);
            }
        }
    }
    Ok((terms, screened))
}

/// Scores every unit; a proxy needs all of them.
fn proxy_for(
    run: &Run,
    fit: &LinearFit,
    outcome: usize,
    responded: &[bool],
) -> Result<ProxySeries> {
    let all = run.d.all_rows();
    let used = fit.design.spec.columns();
    let scored = complete_rows(&run.d, &all, &used);
    if scored.len() != all.len() {
        return Err(NrbaError::Invalid(format!(
            "model for {} uses predictors missing for {} units; auxiliaries must be observed for every unit",
            run.d.column(outcome).name(),
            all.len() - scored.len()
        )));
    }
    let mut proxy = build_proxy(fit, &run.d, &all, outcome)?;
    // item-missing respondents count as nonrespondents, and unit
    // nonrespondents never contribute an outcome
    if proxy.y.iter().zip(responded).any(|(y, &r)| y.is_some() && !r) {
        let x = proxy.x.clone();
        let y = proxy
            .y
            .iter()
            .zip(responded)
            .map(|(y, &r)| if r { *y } else { None })
            .collect();
        proxy = ProxySeries::new(x, y)?;
    }
    Ok(proxy)
}

fn fit_outcome(
    run: &Run,
    outcome: usize,
    auxiliaries: &[usize],
    responded: &[bool],
) -> Result<(FittedOutcome, Vec<Warning>)> {
    let rows: Vec<usize> = (0..run.d.n_rows()).filter(|&i| responded[i]).collect();
    let (candidates, screened) = candidate_terms(run, &rows, outcome, auxiliaries)?;
    let sw = stepwise_forward(&run.d, &rows, outcome, &candidates, Family::Linear)?;
    let fit = fit_ols(&run.d, &sw.spec, outcome, &sw.rows)?;
    let mut warnings = sw.warnings;
    if !fit.dropped.is_empty() {
        warnings.push(Warning::new(
            WarningCode::DroppedColumns,
            format!(
                "{}: aliased design columns dropped: {}",
                run.d.column(outcome).name(),
                fit.dropped.join(", ")
            ),
        ));
    }
    let proxy = proxy_for(run, &fit, outcome, responded)?;
    let y: Vec<f64> = fit.rows.iter().map(|&i| run.d.value(i, outcome).unwrap()).collect();
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    let tss: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let name = run.d.column(outcome).name().to_string();
    let summary = OutcomeModel {
        outcome: name,
        n_fit: fit.n,
        terms: sw.spec.terms.iter().map(|t| t.label(&run.d)).collect(),
        screened_interactions: screened.iter().map(|t| t.label(&run.d)).collect(),
        aic: fit.aic,
        r2: if tss > 0.0 { 1.0 - fit.rss / tss } else { f64::NAN },
        rho_hat: proxy.rho_hat,
        sign_flipped: proxy.sign_flipped,
    };
    Ok((
        FittedOutcome {
            summary,
            fit,
            proxy,
        },
        warnings,
    ))
}

fn proxy_warnings(name: &str, proxy: &ProxySeries) -> Vec<Warning> {
    let mut w = Vec::new();
    if proxy.sign_flipped {
        w.push(Warning::new(
            WarningCode::SignFlipped,
            format!("{name}: proxy negatively correlated with the outcome; sign flipped"),
        ));
    }
    if proxy.rho_hat < RHO_HIGH {
        w.push(Warning::new(
            WarningCode::WeakProxy,
            format!(
                "{name}: weak proxy (rho = {:.3}); sensitivity evidence is weak",
                proxy.rho_hat
            ),
        ));
    }
    w
}

fn step_outcome_models(run: &mut Run) -> Result<Vec<FittedOutcome>> {
    let responded = respondents_of(run)?;
    let aux = run.cols(&run.cfg.auxiliaries)?;
    let mut models = Vec::new();
    for name in run.cfg.outcomes.clone() {
        let c = run.col(&name)?;
        let (m, ws) = fit_outcome(run, c, &aux, &responded)?;
        run.warn_all(ws);
        run.warn_all(proxy_warnings(&name, &m.proxy));
        models.push(m);
    }

    let mut t = Table::new(["outcome", "n_fit", "rho_hat", "r2", "aic", "terms"]);
    let mut coef = Table::new(["outcome", "term", "estimate", "std_error"]);
    for m in &models {
        let s = &m.summary;
        t.push(vec![
            s.outcome.clone(),
            s.n_fit.to_string(),
            num(s.rho_hat),
            num(s.r2),
            num(s.aic),
            s.terms.join(" + "),
        ]);
        for (j, name) in m.fit.design.names.iter().enumerate() {
            coef.push(vec![
                s.outcome.clone(),
                name.clone(),
                num(m.fit.coefficients[j]),
                num(m.fit.std_errors[j]),
            ]);
        }
    }
    run.write("step03_outcome_models.csv", &t)?;
    run.write("step03_coefficients.csv", &coef)?;
    Ok(models)
}

type ExtendedProxies = Vec<Option<ProxySeries>>;

fn step_external_predictors(
    run: &mut Run,
    models: &[FittedOutcome],
) -> Result<(Vec<PredictorGain>, ExtendedProxies)> {
    let responded = respondents_of(run)?;
    let late = run.cols(&run.cfg.late_auxiliaries)?;
    let mut gains = Vec::new();
    let mut proxies = Vec::new();
    for m in models {
        let base = m.summary.rho_hat;
        if late.is_empty() {
            gains.push(PredictorGain {
                outcome: m.summary.outcome.clone(),
                rho_base: base,
                rho_extended: None,
                gain: None,
                late_terms: Vec::new(),
            });
            proxies.push(None);
            continue;
        }
        let mut aux = run.cols(&run.cfg.auxiliaries)?;
        aux.extend(&late);
        let c = run.col(&m.summary.outcome)?;
        let (ext, ws) = fit_outcome(run, c, &aux, &responded)?;
        run.warn_all(ws);
        let late_terms = ext
            .fit
            .design
            .spec
            .terms
            .iter()
            .filter(|t| t.columns().iter().any(|c| late.contains(c)))
            .map(|t| t.label(&run.d))
            .collect();
        let rho = ext.proxy.rho_hat;
        gains.push(PredictorGain {
            outcome: m.summary.outcome.clone(),
            rho_base: base,
            rho_extended: Some(rho),
            gain: Some(rho - base),
            late_terms,
        });
        proxies.push(Some(ext.proxy));
    }
    let mut t = Table::new(["outcome", "rho_base", "rho_extended", "gain", "late_terms"]);
    for g in &gains {
        t.push(vec![
            g.outcome.clone(),
            num(g.rho_base),
            opt_num(g.rho_extended),
            opt_num(g.gain),
            g.late_terms.join(" + "),
        ]);
    }
    run.write("step04_external_predictors.csv", &t)?;
    Ok((gains, proxies))
}

struct Propensity {
    summary: PropensitySummary,
    /// Composed probability per unit.
    probability: Vec<f64>,
    strata: PropensityStrata,
    /// Correlation of propensity and outcome among respondents, per outcome.
    correlations: Vec<Option<f64>>,
}

fn clamp_policy(cfg: &NrbaConfig) -> Result<ClampPolicy> {
    Ok(ClampPolicy::new(cfg.clamp[0], cfg.clamp[1])?)
}

fn five_cells(f: &Option<FiveNumber>) -> Vec<String> {
    match f {
        Some(f) => vec![
            f.n.to_string(),
            num(f.min),
            num(f.q1),
            num(f.median),
            num(f.q3),
            num(f.max),
            num(f.mean),
        ],
        None => {
            let mut v = vec!["0".to_string()];
            v.extend(std::iter::repeat_n("NA".to_string(), 6));
            v
        }
    }
}

fn step_propensity(run: &mut Run) -> Result<Option<Propensity>> {
    let responded = respondents_of(run)?;
    let n = run.d.n_rows();
    let all = run.d.all_rows();
    let mut stage_table = Table::new([
        "stage",
        "indicator",
        "level",
        "eligible",
        "respondents",
        "response_rate",
        "auc",
        "aic",
        "terms",
    ]);
    let mut coef = Table::new(["stage", "indicator", "term", "estimate", "std_error"]);
    let mut strata_table = Table::new([
        "stratum",
        "lower",
        "upper",
        "units",
        "respondents",
        "response_rate",
    ]);
    let mut hist = Table::new(["bin_lower", "bin_upper", "respondents", "nonrespondents"]);
    let mut boxes = Table::new([
        "outcome", "stratum", "n", "min", "q1", "median", "q3", "max", "mean",
    ]);

    if responded.iter().all(|&r| r) {
        for (name, t) in [
            ("step05_propensity.csv", &stage_table),
            ("step05_coefficients.csv", &coef),
            ("step05_strata.csv", &strata_table),
            ("step05_propensity_histogram.csv", &hist),
            ("step05_quintile_boxplots.csv", &boxes),
        ] {
            run.write(name, t)?;
        }
        return Ok(None);
    }

    let clamp = clamp_policy(run.cfg)?;
    let aux = run.cols(&run.cfg.auxiliaries)?;
    let mut indicators = run.cols(&run.cfg.prior_stages)?;
    indicators.push(run.col(&run.cfg.response_indicator)?);

    let mut eligible = all.clone();
    let mut scores: Vec<Vec<f64>> = Vec::new();
    let mut stages = Vec::new();
    for (k, &ind) in indicators.iter().enumerate() {
        let level = if k == 0 {
            StageLevel::SingleStage
        } else {
            StageLevel::ConditionalStage
        };
        let stage_resp = run.d.indicator(ind)?;
        let name = run.d.column(ind).name().to_string();
        let resp_count = eligible.iter().filter(|&&i| stage_resp[i]).count();
        if resp_count == 0 {
            return Err(NrbaError::Invalid(format!(
                "stage {name}: no eligible unit responded"
            )));
        }
        let rate = resp_count as f64 / eligible.len() as f64;
        let summary = if resp_count == eligible.len() {
            run.warn(Warning::new(
                WarningCode::NoNonrespondents,
                format!("stage {name}: every eligible unit responded; probability set to 1"),
            ));
            scores.push(vec![1.0; n]);
            StageSummary {
                indicator: name,
                level,
                eligible: eligible.len(),
                respondents: resp_count,
                response_rate: rate,
                auc: None,
                aic: None,
                terms: Vec::new(),
            }
        } else {
            let (candidates, _) = candidate_terms(run, &eligible, ind, &aux)?;
            let sw = stepwise_forward(&run.d, &eligible, ind, &candidates, Family::Logistic)?;
            run.warn_all(sw.warnings.clone());
            let model = fit_stage_propensity(&run.d, &eligible, ind, &sw.spec, level)?;
            run.warn_all(model.warnings.clone());
            if !model.fit.dropped.is_empty() {
                run.warn(Warning::new(
                    WarningCode::DroppedColumns,
                    format!(
                        "stage {name}: aliased design columns dropped: {}",
                        model.fit.dropped.join(", ")
                    ),
                ));
            }
            scores.push(model.score(&run.d, &all)?);
            for (j, term) in model.fit.design.names.iter().enumerate() {
                coef.push(vec![
                    (k + 1).to_string(),
                    name.clone(),
                    term.clone(),
                    num(model.fit.coefficients[j]),
                    num(model.fit.std_errors[j]),
                ]);
            }
            StageSummary {
                indicator: name,
                level,
                eligible: eligible.len(),
                respondents: resp_count,
                response_rate: rate,
                auc: Some(model.auc),
                aic: Some(model.fit.aic),
                terms: sw.spec.terms.iter().map(|t| t.label(&run.d)).collect(),
            }
        };
        stage_table.push(vec![
            (k + 1).to_string(),
            summary.indicator.clone(),
            match summary.level {
                StageLevel::SingleStage => "single",
                StageLevel::ConditionalStage => "conditional",
            }
            .into(),
            summary.eligible.to_string(),
            summary.respondents.to_string(),
            num(summary.response_rate),
            opt_num(summary.auc),
            opt_num(summary.aic),
            summary.terms.join(" + "),
        ]);
        stages.push(summary);
        eligible.retain(|&i| stage_resp[i]);
    }

    let stage_refs: Vec<&[f64]> = scores.iter().map(Vec::as_slice).collect();
    let composed = compose_propensities(&stage_refs, clamp)?;
    if !composed.flagged.is_empty() {
        run.warn(Warning::new(
            WarningCode::FlaggedPropensity,
            format!(
                "{} composed probabilities reached 0 or 1 and were clamped",
                composed.flagged.len()
            ),
        ));
    }
    let prob = composed.probability;
    let overall_auc = auc(&prob, &responded)?;
    let clamped = prob
        .iter()
        .filter(|&&p| clamp.apply(p) != p)
        .count();
    stage_table.push(vec![
        "overall".into(),
        run.cfg.response_indicator.clone(),
        "composed".into(),
        n.to_string(),
        responded.iter().filter(|&&r| r).count().to_string(),
        num(responded.iter().filter(|&&r| r).count() as f64 / n as f64),
        num(overall_auc),
        "NA".into(),
        String::new(),
    ]);
    run.write("step05_propensity.csv", &stage_table)?;
    run.write("step05_coefficients.csv", &coef)?;

    let strata = quintile_strata(&prob)?;
    run.warn_all(strata.warnings.clone());
    let mut strata_rows = Vec::new();
    for s in 1..=5u8 {
        let members: Vec<usize> = (0..n).filter(|&i| strata.ids[i] == s).collect();
        let resp = members.iter().filter(|&&i| responded[i]).count();
        let lower = members.iter().map(|&i| prob[i]).fold(f64::INFINITY, f64::min);
        let upper = members.iter().map(|&i| prob[i]).fold(f64::NEG_INFINITY, f64::max);
        let row = StratumRow {
            stratum: s,
            lower: if members.is_empty() { f64::NAN } else { lower },
            upper: if members.is_empty() { f64::NAN } else { upper },
            units: members.len(),
            respondents: resp,
            response_rate: if members.is_empty() {
                f64::NAN
            } else {
                resp as f64 / members.len() as f64
            },
        };
        strata_table.push(vec![
            s.to_string(),
            num(row.lower),
            num(row.upper),
            row.units.to_string(),
            row.respondents.to_string(),
            num(row.response_rate),
        ]);
        strata_rows.push(row);
    }
    run.write("step05_strata.csv", &strata_table)?;

    let h = propensity_histogram(&prob, &responded, run.cfg.histogram_bins, 0.0, 1.0)?;
    for b in 0..h.respondents.len() {
        hist.push(vec![
            num(h.edges[b]),
            num(h.edges[b + 1]),
            h.respondents[b].to_string(),
            h.nonrespondents[b].to_string(),
        ]);
    }
    run.write("step05_propensity_histogram.csv", &hist)?;

    let mut correlations = Vec::new();
    for name in run.cfg.outcomes.clone() {
        let c = run.col(&name)?;
        let rows: Vec<usize> = (0..n)
            .filter(|&i| responded[i] && run.d.is_observed(i, c))
            .collect();
        let sub = PropensityStrata {
            breaks: strata.breaks.clone(),
            ids: rows.iter().map(|&i| strata.ids[i]).collect(),
            groups: strata.groups,
            warnings: Vec::new(),
        };
        let p: Vec<f64> = rows.iter().map(|&i| prob[i]).collect();
        let y: Vec<f64> = rows.iter().map(|&i| run.d.value(i, c).unwrap()).collect();
        let s = stratum_outcome_summary(&sub, &p, &y)?;
        run.warn_all(s.warnings.iter().map(|w| {
            Warning::new(w.code, format!("{name}: {}", w.message))
        }));
        for (k, f) in s.strata.iter().enumerate() {
            let mut row = vec![name.clone(), (k + 1).to_string()];
            row.extend(five_cells(f));
            boxes.push(row);
        }
        correlations.push((!s.correlation_undefined).then_some(s.correlation));
    }
    run.write("step05_quintile_boxplots.csv", &boxes)?;

    Ok(Some(Propensity {
        summary: PropensitySummary {
            stages,
            auc: overall_auc,
            flagged: composed.flagged.len(),
            clamped,
            breaks: strata.breaks.clone(),
            strata: strata_rows,
        },
        probability: prob,
        strata,
        correlations,
    }))
}

fn strength_of(high: bool) -> Strength {
    if high {
        Strength::High
    } else {
        Strength::Low
    }
}

fn class_name<T: std::fmt::Debug>(c: T) -> String {
    format!("{c:?}").to_lowercase()
}

fn step_strength(
    run: &mut Run,
    proxies: &[(ProxySeries, &'static str)],
    propensity: Option<&Propensity>,
) -> Result<Vec<StrengthRow>> {
    let mut rows = Vec::new();
    for (k, name) in run.cfg.outcomes.iter().enumerate() {
        let proxy = &proxies[k].0;
        let d = standardized_deviation(proxy)?;
        let v = classify_strength(proxy.rho_hat, d);
        let auc = propensity.map(|p| p.summary.auc);
        let corr = propensity.and_then(|p| p.correlations[k]);
        let cell = Cell {
            response: strength_of(auc.is_some_and(|a| a >= AUC_HIGH)),
            propensity_outcome: strength_of(corr.is_some_and(|c| c.abs() >= CORRELATION_HIGH)),
            other_outcome: strength_of(proxy.rho_hat >= RHO_HIGH),
        };
        rows.push(StrengthRow {
            outcome: name.clone(),
            rho: v.rho,
            rho_class: v.rho_class,
            d: v.d,
            d_class: v.d_class,
            auc,
            corr_propensity_outcome: corr,
            cell: cell.label(),
        });
    }
    let mut t = Table::new([
        "outcome",
        "rho_hat",
        "rho_class",
        "d",
        "d_class",
        "auc",
        "corr_propensity_outcome",
        "cell",
    ]);
    for r in &rows {
        t.push(vec![
            r.outcome.clone(),
            num(r.rho),
            class_name(r.rho_class),
            num(r.d),
            class_name(r.d_class),
            opt_num(r.auc),
            opt_num(r.corr_propensity_outcome),
            r.cell.clone(),
        ]);
    }
    run.write("step06_strength.csv", &t)?;
    Ok(rows)
}

/// Level labels and per-row codes of a grouping column.
struct Grouping {
    labels: Vec<String>,
    codes: Vec<Option<u32>>,
}

fn grouping(d: &RectDataset, col: usize) -> Grouping {
    let c = d.column(col);
    if c.is_categorical() {
        return Grouping {
            labels: c.levels().to_vec(),
            codes: (0..d.n_rows()).map(|i| c.code(i)).collect(),
        };
    }
    let mut distinct: Vec<f64> = (0..d.n_rows()).filter_map(|i| c.value(i)).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    Grouping {
        labels: distinct.iter().map(|&v| num(v)).collect(),
        codes: (0..d.n_rows())
            .map(|i| {
                c.value(i)
                    .map(|v| distinct.binary_search_by(|p| p.total_cmp(&v)).unwrap() as u32)
            })
            .collect(),
    }
}

fn ids_of(d: &RectDataset, name: &str, col: usize) -> Result<Vec<u64>> {
    grouping(d, col)
        .codes
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.map(u64::from).ok_or_else(|| {
                NrbaError::Invalid(format!("design column {name} is missing in row {}", i + 1))
            })
        })
        .collect()
}

fn base_design(run: &Run) -> Result<SurveyDesign> {
    let n = run.d.n_rows();
    let cfg = &run.cfg.design;
    let weights = match &cfg.base_weight {
        Some(w) => {
            let c = run.col(w)?;
            (0..n)
                .map(|i| {
                    run.d.value(i, c).ok_or_else(|| {
                        NrbaError::Invalid(format!("base weight missing in row {}", i + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?
        }
        None => vec![1.0; n],
    };
    let psu = match &cfg.psu {
        Some(p) => Some(ids_of(&run.d, p, run.col(p)?)?),
        None => None,
    };
    let stratum = match &cfg.stratum {
        Some(s) => Some(ids_of(&run.d, s, run.col(s)?)?),
        None => None,
    };
    Ok(SurveyDesign::new(weights, psu, stratum)?)
}

/// Weighting classes from the configured columns, or the propensity
/// quintiles; a single class when neither is available.
fn weighting_classes(run: &Run, propensity: Option<&Propensity>) -> Result<Vec<u64>> {
    let n = run.d.n_rows();
    if run.cfg.weighting_classes.is_empty() {
        return Ok(match propensity {
            Some(p) => p.strata.ids.iter().map(|&s| u64::from(s)).collect(),
            None => vec![0; n],
        });
    }
    let groupings = run
        .cols(&run.cfg.weighting_classes)?
        .into_iter()
        .map(|c| grouping(&run.d, c))
        .collect::<Vec<_>>();
    let mut ids: BTreeMap<Vec<Option<u32>>, u64> = BTreeMap::new();
    let keys: Vec<Vec<Option<u32>>> = (0..n)
        .map(|i| groupings.iter().map(|g| g.codes[i]).collect())
        .collect();
    for k in &keys {
        let next = ids.len() as u64;
        ids.entry(k.clone()).or_insert(next);
    }
    // renumber in key order so class ids do not depend on row order
    let order: BTreeMap<Vec<Option<u32>>, u64> = ids
        .keys()
        .enumerate()
        .map(|(i, k)| (k.clone(), i as u64))
        .collect();
    Ok(keys.iter().map(|k| order[k]).collect())
}

fn margins(run: &Run) -> Result<Vec<Margin>> {
    run.cfg
        .margins
        .iter()
        .map(|m| {
            let g = grouping(&run.d, run.col(&m.column)?);
            let mut targets = BTreeMap::new();
            for (label, &total) in &m.targets {
                let code = g.labels.iter().position(|l| l == label).ok_or_else(|| {
                    NrbaError::Invalid(format!("margin {}: unknown category {label}", m.column))
                })?;
                targets.insert(code as u64, total);
            }
            Ok(Margin {
                name: m.column.clone(),
                categories: g
                    .codes
                    .iter()
                    .map(|c| c.map_or(u64::MAX, u64::from))
                    .collect(),
                targets,
            })
        })
        .collect()
}

fn zero_nonrespondents(weights: &[f64], responded: &[bool]) -> Vec<f64> {
    weights
        .iter()
        .zip(responded)
        .map(|(&w, &r)| if r { w } else { 0.0 })
        .collect()
}

fn step_weighting(
    run: &mut Run,
    propensity: Option<&Propensity>,
) -> Result<(WeightingSummary, Vec<SurveyEstimate>)> {
    let n = run.d.n_rows();
    let responded = respondents_of(run)?;
    let base = base_design(run)?;
    let mut designs: Vec<(String, SurveyDesign)> = vec![
        ("unweighted".into(), base.with_weights(vec![1.0; n])?),
        ("base_weighted".into(), base.clone()),
    ];

    let classes = weighting_classes(run, propensity)?;
    let adjusted = weighting_class_adjust(&base, &responded, &classes)?;
    designs.push(("nonresponse_adjusted".into(), adjusted.clone()));

    let ipw = match propensity {
        Some(p) => {
            let w = ipw_weights(&p.probability, Some(&base.weights), clamp_policy(run.cfg)?)?;
            run.warn_all(w.warnings);
            zero_nonrespondents(&w.weights, &responded)
        }
        None => zero_nonrespondents(&base.weights, &responded),
    };
    designs.push(("ipw".into(), base.with_weights(ipw)?));

    let mut final_design = "nonresponse_adjusted".to_string();
    let mut rake_record = None;
    if !run.cfg.margins.is_empty() {
        let (raked, rec) = rake(&adjusted, &margins(run)?, RAKE_MAX_ITER, RAKE_TOL)?;
        if !rec.converged {
            run.warn(Warning::new(
                WarningCode::RakeNotConverged,
                format!("raking stopped after {} iterations", rec.iterations),
            ));
        }
        designs.push(("raked".into(), raked));
        final_design = "raked".into();
        rake_record = Some(rec);
    }
    if let Some(w) = &run.cfg.design.weight {
        let c = run.col(w)?;
        let weights = (0..n)
            .map(|i| if responded[i] { run.d.value(i, c).unwrap_or(0.0) } else { 0.0 })
            .collect();
        designs.push(("provided_weight".into(), base.with_weights(weights)?));
    }
    let final_idx = designs.iter().position(|(l, _)| *l == final_design).unwrap();

    let subgroups: Vec<(String, Grouping)> = run
        .cfg
        .subgroups
        .iter()
        .map(|s| Ok((s.clone(), grouping(&run.d, run.col(s)?))))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut finals = Vec::new();
    for name in &run.cfg.outcomes {
        let c = run.col(name)?;
        let values: Vec<Option<f64>> = (0..n)
            .map(|i| if responded[i] { run.d.value(i, c) } else { None })
            .collect();
        let mut domains: Vec<(String, String, Option<Vec<bool>>)> =
            vec![("overall".into(), "overall".into(), None)];
        for (col, g) in &subgroups {
            for (k, label) in g.labels.iter().enumerate() {
                let dom = g.codes.iter().map(|&c| c == Some(k as u32)).collect();
                domains.push((col.clone(), label.clone(), Some(dom)));
            }
        }
        for (group, level, dom) in domains {
            let ests = designs
                .iter()
                .map(|(_, des)| weighted_mean(&values, des, dom.as_deref()))
                .collect::<nrba_core::Result<Vec<EstimateRow>>>()?;
            let fin = &ests[final_idx];
            if group == "overall" {
                finals.push(SurveyEstimate {
                    label: name.clone(),
                    mean: fin.mean,
                    se: fin.se,
                });
            }
            rows.push(WeightingRow {
                outcome: name.clone(),
                group,
                level,
                n: fin.n,
                deff: fin.deff,
                estimates: designs
                    .iter()
                    .zip(&ests)
                    .map(|((l, _), e)| DesignEstimate {
                        design: l.clone(),
                        mean: e.mean,
                        se: e.se,
                    })
                    .collect(),
            });
        }
    }

    let mut header = vec!["outcome".to_string(), "group".into(), "level".into(), "n".into()];
    for (l, _) in &designs {
        header.push(format!("{l}_mean"));
        header.push(format!("{l}_se"));
    }
    header.push("deff".into());
    let mut t = Table::new(header);
    for r in &rows {
        let mut cells = vec![r.outcome.clone(), r.group.clone(), r.level.clone(), r.n.to_string()];
        for e in &r.estimates {
            cells.push(num(e.mean));
            cells.push(num(e.se));
        }
        cells.push(opt_num(r.deff));
        t.push(cells);
    }
    run.write("step07_weighting_comparison.csv", &t)?;

    Ok((
        WeightingSummary {
            designs: designs.into_iter().map(|(l, _)| l).collect(),
            final_design,
            rake: rake_record,
            rows,
        },
        finals,
    ))
}

fn step_external(run: &mut Run, estimates: &[SurveyEstimate]) -> Result<Vec<ExternalComparisonRow>> {
    let rows = external_comparison(estimates, &run.cfg.benchmarks)?;
    let mut t = Table::new([
        "label",
        "survey_mean",
        "survey_se",
        "benchmark_mean",
        "benchmark_se",
        "difference",
        "se",
        "flagged",
        "caveat",
    ]);
    for r in &rows {
        t.push(vec![
            r.label.clone(),
            num(r.survey_mean),
            num(r.survey_se),
            num(r.benchmark_mean),
            num(r.benchmark_se),
            num(r.difference),
            num(r.se),
            r.flagged.to_string(),
            r.caveat.to_string(),
        ]);
    }
    run.write("step08_external_comparison.csv", &t)?;
    Ok(rows)
}

fn phi_header(phis: &[f64]) -> Vec<String> {
    phis.iter()
        .flat_map(|p| [format!("mu_phi_{}", num(*p)), format!("se_phi_{}", num(*p))])
        .collect()
}

fn sweep_cells(t: &SensitivityTable) -> Vec<String> {
    let mut v = vec![
        num(t.rho_hat),
        num(t.d),
        num(t.respondent_mean),
        t.respondents.to_string(),
        t.n.to_string(),
    ];
    for r in &t.rows {
        v.push(num(r.mu_y));
        v.push(num(r.se));
    }
    v
}

fn step_sensitivity(
    run: &mut Run,
    proxies: &[(ProxySeries, &'static str)],
) -> Result<Vec<OutcomeSensitivity>> {
    let phis = run.cfg.phis.clone();
    let subgroups: Vec<(String, Grouping)> = run
        .cfg
        .subgroups
        .iter()
        .map(|s| Ok((s.clone(), grouping(&run.d, run.col(s)?))))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (k, name) in run.cfg.outcomes.clone().into_iter().enumerate() {
        let (proxy, kind) = &proxies[k];
        let table = sensitivity_sweep(proxy, &phis)?;
        let mut subs = Vec::new();
        for (col, g) in &subgroups {
            let (tables, ws) = subgroup_sweep(proxy, &g.codes, &phis)?;
            run.warn_all(
                ws.into_iter()
                    .map(|w| Warning::new(w.code, format!("{name} by {col}: {}", w.message))),
            );
            for (code, t) in tables {
                subs.push(SubgroupSensitivity {
                    column: col.clone(),
                    level: g.labels[code as usize].clone(),
                    table: t,
                });
            }
        }
        out.push(OutcomeSensitivity {
            outcome: name,
            proxy: kind,
            table,
            subgroups: subs,
        });
    }

    let lead = ["rho_hat", "d", "respondent_mean", "respondents", "n"];
    let mut header: Vec<String> = vec!["outcome".into(), "proxy".into()];
    header.extend(lead.iter().map(|s| s.to_string()));
    header.extend(phi_header(&phis));
    let mut t = Table::new(header);
    let mut header: Vec<String> = vec!["outcome".into(), "subgroup".into(), "level".into()];
    header.extend(lead.iter().map(|s| s.to_string()));
    header.extend(phi_header(&phis));
    let mut ts = Table::new(header);
    for o in &out {
        let mut row = vec![o.outcome.clone(), o.proxy.to_string()];
        row.extend(sweep_cells(&o.table));
        t.push(row);
        for s in &o.subgroups {
            let mut row = vec![o.outcome.clone(), s.column.clone(), s.level.clone()];
            row.extend(sweep_cells(&s.table));
            ts.push(row);
        }
    }
    run.write("step09_sensitivity.csv", &t)?;
    run.write("step09_sensitivity_subgroups.csv", &ts)?;
    Ok(out)
}

fn step_item_missingness(run: &mut Run) -> Result<Vec<ItemAudit>> {
    let outcomes = run.cols(&run.cfg.outcomes)?;
    let resp = run.col(&run.cfg.response_indicator)?;
    let audit = item_missingness_audit(&run.d, &outcomes, resp)?;
    let mut t = Table::new([
        "outcome",
        "unit_respondents",
        "unit_nonrespondents",
        "item_missing",
        "total_missing",
        "note",
    ]);
    for a in &audit {
        t.push(vec![
            a.outcome.clone(),
            a.unit_respondents.to_string(),
            a.unit_nonrespondents.to_string(),
            a.item_missing.to_string(),
            a.total_missing.to_string(),
            a.note.to_string(),
        ]);
    }
    run.write("step10_item_missingness.csv", &t)?;
    Ok(audit)
}
