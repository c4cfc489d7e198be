//! Monte Carlo comparison of complete-case, inverse-propensity-weighted and
//! multiply-imputed means across the eight strength combinations of
//! (x1–R, x1–Y, x2–Y), where x1 drives response and x2 affects only Y.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{
    apply_mechanism_with, gen_population_with, mi_impute_with, rng_for, rubin_combine,
    tune_intercept, MechanismSpec, PopulationSpec, XSplit,
};
use crate::error::{Error, Result};
use crate::glm::irls;
use crate::glm::linalg::Matrix;
use crate::propensity::ClampPolicy;
use crate::stats::{mean, sample_variance, sqrt};
use crate::warning::{Warning, WarningCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strength {
    Low,
    High,
}

impl Strength {
    fn letter(self) -> char {
        match self {
            Strength::Low => 'L',
            Strength::High => 'H',
        }
    }
}

/// A design cell: strengths of (x1 with R, x1 with Y, x2 with Y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub response: Strength,
    pub propensity_outcome: Strength,
    pub other_outcome: Strength,
}

impl Cell {
    /// Parses labels such as `"HLL"`.
    pub fn parse(label: &str) -> Result<Cell> {
        let s: Vec<Strength> = label
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'L' => Ok(Strength::Low),
                'H' => Ok(Strength::High),
                _ => Err(Error::InvalidArgument(format!("bad cell label {label:?}"))),
            })
            .collect::<Result<_>>()?;
        if s.len() != 3 {
            return Err(Error::InvalidArgument(format!("bad cell label {label:?}")));
        }
        Ok(Cell {
            response: s[0],
            propensity_outcome: s[1],
            other_outcome: s[2],
        })
    }

    pub fn label(&self) -> String {
        [self.response, self.propensity_outcome, self.other_outcome]
            .iter()
            .map(|s| s.letter())
            .collect()
    }

    /// All eight cells, LLL first, R association outermost.
    pub fn all() -> Vec<Cell> {
        let mut out = Vec::with_capacity(8);
        for r in [Strength::Low, Strength::High] {
            for p in [Strength::Low, Strength::High] {
                for o in [Strength::Low, Strength::High] {
                    out.push(Cell {
                        response: r,
                        propensity_outcome: p,
                        other_outcome: o,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub n: usize,
    pub reps: usize,
    /// Imputations per replicate.
    pub m: usize,
    pub low: f64,
    pub high: f64,
    pub response_rate: f64,
    pub seed: u64,
    pub clamp: ClampPolicy,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        ComparisonConfig {
            n: 1000,
            reps: 500,
            m: 20,
            low: 0.05,
            high: 1.0,
            response_rate: 0.6,
            seed: 20_240_601,
            clamp: ClampPolicy::default(),
        }
    }
}

impl ComparisonConfig {
    fn magnitude(&self, s: Strength) -> f64 {
        match s {
            Strength::Low => self.low,
            Strength::High => self.high,
        }
    }

    pub fn population(&self, cell: Cell) -> PopulationSpec {
        PopulationSpec {
            n: self.n,
            mu_x: 0.0,
            mu_y: 0.0,
            sigma_xx: 1.0,
            sigma_yy: 1.0,
            rho: 0.0,
            split: Some(XSplit {
                propensity_slope: self.magnitude(cell.propensity_outcome),
                other_slope: self.magnitude(cell.other_outcome),
            }),
        }
    }

    pub fn mechanism(&self, cell: Cell) -> Result<MechanismSpec> {
        tune_intercept(
            &self.population(cell),
            &MechanismSpec::mar(0.0, self.magnitude(cell.response)),
            self.response_rate,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "CC")]
    CompleteCase,
    #[serde(rename = "IPW")]
    Ipw,
    #[serde(rename = "MI")]
    Mi,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::CompleteCase, Method::Ipw, Method::Mi];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::CompleteCase => "CC",
            Method::Ipw => "IPW",
            Method::Mi => "MI",
        }
    }

    fn idx(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellResult {
    pub method: Method,
    /// Mean estimate minus the population mean.
    pub bias: f64,
    /// Monte Carlo variance of the estimates.
    pub variance: f64,
    /// Monte Carlo standard error of `bias`.
    pub mcse: f64,
    /// Monte Carlo standard error of `variance` under normality.
    pub variance_mcse: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub cell: String,
    pub truth: f64,
    pub intercept: f64,
    pub results: Vec<CellResult>,
    /// `[CC, IPW, MI]` estimates per replicate, in replicate order.
    #[serde(skip)]
    pub estimates: Vec<[f64; 3]>,
    pub mean_response_rate: f64,
    pub warnings: Vec<Warning>,
}

impl CellReport {
    pub fn result(&self, m: Method) -> &CellResult {
        &self.results[m.idx()]
    }
}

/// One replicate: the three estimates of the mean of y, and the realized
/// response rate.
pub fn run_replicate(cfg: &ComparisonConfig, cell: Cell, mech: &MechanismSpec, rep: u64) -> Result<([f64; 3], f64)> {
    let mut rng = rng_for(cfg.seed, rep);
    let pop = gen_population_with(&cfg.population(cell), &mut rng)?;
    let r = apply_mechanism_with(&pop, mech, &mut rng)?;
    let n = pop.len();
    let other = pop.other.as_ref().expect("split population");
    let x = Matrix::from_columns(n, &[alloc::vec![1.0; n], pop.x.clone(), other.clone()]);
    let nr = r.iter().filter(|&&b| b).count();
    if nr < 4 || nr == n {
        return Err(Error::InsufficientData {
            what: "respondents and nonrespondents in a replicate",
            needed: 4,
            found: nr,
        });
    }

    let cc = (0..n).filter(|&i| r[i]).map(|i| pop.y[i]).sum::<f64>() / nr as f64;

    let ry: Vec<f64> = r.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let fit = irls(&x, &ry);
    let (mut num, mut den) = (0.0, 0.0);
    for i in (0..n).filter(|&i| r[i]) {
        let w = 1.0 / cfg.clamp.apply(fit.fitted[i]);
        num += w * pop.y[i];
        den += w;
    }
    let ipw = num / den;

    let yobs: Vec<Option<f64>> = (0..n).map(|i| r[i].then_some(pop.y[i])).collect();
    let imps = mi_impute_with(&x, &yobs, cfg.m, &mut rng)?;
    let means: Vec<f64> = imps.iter().map(|c| mean(c)).collect();
    let within: Vec<f64> = imps.iter().map(|c| sample_variance(c) / n as f64).collect();
    let mi = rubin_combine(&means, &within)?.estimate;

    Ok(([cc, ipw, mi], nr as f64 / n as f64))
}

pub fn run_cell(cell: Cell, cfg: &ComparisonConfig) -> Result<CellReport> {
    if cfg.reps < 2 {
        return Err(Error::InvalidArgument("need at least 2 replicates".into()));
    }
    let mech = cfg.mechanism(cell)?;
    let truth = cfg.population(cell).mean_y();
    let mut estimates = Vec::with_capacity(cfg.reps);
    let mut rate = 0.0;
    for rep in 0..cfg.reps {
        let (e, rr) = run_replicate(cfg, cell, &mech, rep as u64)?;
        estimates.push(e);
        rate += rr;
    }
    let reps = cfg.reps as f64;
    let results = Method::ALL
        .iter()
        .map(|&m| {
            let col: Vec<f64> = estimates.iter().map(|e| e[m.idx()]).collect();
            let variance = sample_variance(&col);
            CellResult {
                method: m,
                bias: mean(&col) - truth,
                variance,
                mcse: sqrt(variance / reps),
                variance_mcse: variance * sqrt(2.0 / (reps - 1.0)),
                reps: cfg.reps,
            }
        })
        .collect();
    let mut warnings = Vec::new();
    if cfg.reps < 50 {
        warnings.push(Warning::new(
            WarningCode::UnstableReplicates,
            format!("{} replicates; Monte Carlo summaries are unstable below 50", cfg.reps),
        ));
    }
    Ok(CellReport {
        cell: cell.label(),
        truth,
        intercept: mech.intercept,
        results,
        estimates,
        mean_response_rate: rate / reps,
        warnings,
    })
}

pub fn run_table(cfg: &ComparisonConfig) -> Result<Vec<CellReport>> {
    Cell::all().into_iter().map(|c| run_cell(c, cfg)).collect()
}

/// A difference between two methods with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contrast {
    pub difference: f64,
    pub mcse: f64,
}

impl Contrast {
    /// `difference / mcse`.
    pub fn z(&self) -> f64 {
        self.difference / self.mcse
    }
}

/// `|bias_a| − |bias_b|` with the conservative standard error
/// `sqrt(mcse_a² + mcse_b²)`.
pub fn bias_contrast(report: &CellReport, a: Method, b: Method) -> Contrast {
    let (ra, rb) = (report.result(a), report.result(b));
    Contrast {
        difference: ra.bias.abs() - rb.bias.abs(),
        mcse: sqrt(ra.mcse * ra.mcse + rb.mcse * rb.mcse),
    }
}

/// `var_a − var_b`, with the standard error of the mean of the paired
/// per-replicate differences `(a_i − ā)² − (b_i − b̄)²`.
pub fn variance_contrast(report: &CellReport, a: Method, b: Method) -> Contrast {
    let ea: Vec<f64> = report.estimates.iter().map(|e| e[a.idx()]).collect();
    let eb: Vec<f64> = report.estimates.iter().map(|e| e[b.idx()]).collect();
    let (ma, mb) = (mean(&ea), mean(&eb));
    let d: Vec<f64> = ea
        .iter()
        .zip(&eb)
        .map(|(x, y)| (x - ma) * (x - ma) - (y - mb) * (y - mb))
        .collect();
    Contrast {
        difference: report.result(a).variance - report.result(b).variance,
        mcse: sqrt(sample_variance(&d) / d.len() as f64),
    }
}
