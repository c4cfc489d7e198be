//! Simulation lab: populations with known parameters, explicit
//! MCAR/MAR/MNAR response mechanisms, the exact respondent-mean bias, and
//! Monte Carlo harnesses for the estimators.
//!
//! Randomness comes from ChaCha20 seeded with one master seed. Replicate
//! `i` uses stream `i` of that seed, so replicates are independent of the
//! order they run in.

mod mi;
mod recovery;
pub mod synth;
mod comparison;

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{exp, expit, sqrt};

pub use mi::{mi_impute, mi_impute_with, rubin_combine, Pooled};
pub use recovery::{ppmm_recovery, RecoveryConfig, RecoveryRow, RecoveryResult};
pub use comparison::{
    bias_contrast, run_cell, run_replicate, run_table, variance_contrast, Cell, CellReport,
    CellResult, Contrast, Method, Strength, ComparisonConfig,
};

/// Largest |ρ| accepted; closer to 1 the covariance is numerically singular.
pub const MAX_ABS_RHO: f64 = 1.0 - 1e-6;

/// Generator for `(x, y)`.
///
/// Without a split, `(x, y)` is bivariate normal with the given moments.
/// With a split, `x` is the standard-normal propensity driver, a second
/// independent standard normal `other` also drives `y`, and
/// `y = μ_y + b_p·x + b_o·other + e` with `e ~ N(0, σ_yy)`; `μ_x`, `σ_xx`
/// and `ρ` are then unused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub n: usize,
    pub mu_x: f64,
    pub mu_y: f64,
    pub sigma_xx: f64,
    pub sigma_yy: f64,
    pub rho: f64,
    #[serde(default)]
    pub split: Option<XSplit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XSplit {
    pub propensity_slope: f64,
    pub other_slope: f64,
}

impl PopulationSpec {
    pub fn bivariate(n: usize, rho: f64) -> Self {
        PopulationSpec {
            n,
            mu_x: 0.0,
            mu_y: 0.0,
            sigma_xx: 1.0,
            sigma_yy: 1.0,
            rho,
            split: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Empty("population"));
        }
        if !(self.sigma_xx > 0.0 && self.sigma_yy > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "variances must be positive, got {} and {}",
                self.sigma_xx, self.sigma_yy
            )));
        }
        if self.split.is_none() && !(self.rho.abs() <= MAX_ABS_RHO) {
            return Err(Error::InvalidArgument(format!(
                "|rho| = {} leaves a singular covariance",
                self.rho.abs()
            )));
        }
        Ok(())
    }

    /// Marginal standard deviations of x and y.
    pub fn sds(&self) -> (f64, f64) {
        match self.split {
            None => (sqrt(self.sigma_xx), sqrt(self.sigma_yy)),
            Some(s) => (
                1.0,
                sqrt(s.propensity_slope * s.propensity_slope
                    + s.other_slope * s.other_slope
                    + self.sigma_yy),
            ),
        }
    }

    /// Population mean of y.
    pub fn mean_y(&self) -> f64 {
        self.mu_y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub x: Vec<f64>,
    /// The outcome-only driver of a split population.
    pub other: Option<Vec<f64>>,
    pub y: Vec<f64>,
    /// `sqrt(σ_yy/σ_xx)` from the spec, used by the MNAR index.
    pub scale: f64,
}

impl Population {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn mean_y(&self) -> f64 {
        self.y.iter().sum::<f64>() / self.y.len() as f64
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gen_population(spec: &PopulationSpec, seed: u64) -> Result<Population> {
    gen_population_with(spec, &mut rng_for(seed, 0))
}

pub fn gen_population_with<R: Rng + ?Sized>(spec: &PopulationSpec, rng: &mut R) -> Result<Population> {
    spec.validate()?;
    let n = spec.n;
    let (sx, sy) = spec.sds();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    match spec.split {
        None => {
            let tail = sqrt(1.0 - spec.rho * spec.rho);
            for _ in 0..n {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                x.push(spec.mu_x + sx * z1);
                y.push(spec.mu_y + sy * (spec.rho * z1 + tail * z2));
            }
            Ok(Population {
                x,
                other: None,
                y,
                scale: sy / sx,
            })
        }
        Some(s) => {
            let mut other = Vec::with_capacity(n);
            let se = sqrt(spec.sigma_yy);
            for _ in 0..n {
                let x1: f64 = rng.sample(StandardNormal);
                let x2: f64 = rng.sample(StandardNormal);
                let e: f64 = rng.sample(StandardNormal);
                x.push(x1);
                other.push(x2);
                y.push(spec.mu_y + s.propensity_slope * x1 + s.other_slope * x2 + se * e);
            }
            Ok(Population {
                x,
                other: Some(other),
                y,
                scale: sy / sx,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MechanismKind {
    Mcar,
    Mar,
    Mnar,
}

/// `Pr(R = 1) = expit(ψ₀ + ψ₁·index)` with index 0 (MCAR), x (MAR) or
/// `V = (1 − φ)·sqrt(σ_yy/σ_xx)·x + φ·y` (MNAR).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismSpec {
    pub kind: MechanismKind,
    #[serde(default)]
    pub phi: f64,
    pub intercept: f64,
    #[serde(default)]
    pub slope: f64,
}

impl MechanismSpec {
    pub fn mcar(intercept: f64) -> Self {
        MechanismSpec {
            kind: MechanismKind::Mcar,
            phi: 0.0,
            intercept,
            slope: 0.0,
        }
    }

    pub fn mar(intercept: f64, slope: f64) -> Self {
        MechanismSpec {
            kind: MechanismKind::Mar,
            phi: 0.0,
            intercept,
            slope,
        }
    }

    pub fn mnar(phi: f64, intercept: f64, slope: f64) -> Self {
        MechanismSpec {
            kind: MechanismKind::Mnar,
            phi,
            intercept,
            slope,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.phi) {
            return Err(Error::InvalidArgument(format!("phi = {} outside [0, 1]", self.phi)));
        }
        if !(self.intercept.is_finite() && self.slope.is_finite()) {
            return Err(Error::InvalidArgument("mechanism coefficients must be finite".into()));
        }
        Ok(())
    }

    fn index(&self, x: f64, y: f64, scale: f64) -> f64 {
        match self.kind {
            MechanismKind::Mcar => 0.0,
            MechanismKind::Mar => x,
            MechanismKind::Mnar => (1.0 - self.phi) * scale * x + self.phi * y,
        }
    }

    /// Mean and standard deviation of the selection index under `spec`.
    pub fn index_moments(&self, spec: &PopulationSpec) -> (f64, f64) {
        let (sx, sy) = spec.sds();
        let scale = sy / sx;
        let phi = self.phi;
        match (self.kind, spec.split) {
            (MechanismKind::Mcar, _) => (0.0, 0.0),
            (MechanismKind::Mar, None) => (spec.mu_x, sx),
            (MechanismKind::Mar, Some(_)) => (0.0, 1.0),
            (MechanismKind::Mnar, None) => {
                let a = (1.0 - phi) * scale;
                let mean = a * spec.mu_x + phi * spec.mu_y;
                let var = a * a * sx * sx + phi * phi * sy * sy + 2.0 * a * phi * spec.rho * sx * sy;
                (mean, sqrt(var.max(0.0)))
            }
            (MechanismKind::Mnar, Some(s)) => {
                let on_x = (1.0 - phi) * scale + phi * s.propensity_slope;
                let rest = phi * phi * (s.other_slope * s.other_slope + spec.sigma_yy);
                (phi * spec.mu_y, sqrt(on_x * on_x + rest))
            }
        }
    }
}

pub fn response_probabilities(pop: &Population, mech: &MechanismSpec) -> Vec<f64> {
    pop.x
        .iter()
        .zip(&pop.y)
        .map(|(&x, &y)| expit(mech.intercept + mech.slope * mech.index(x, y, pop.scale)))
        .collect()
}

pub fn apply_mechanism(pop: &Population, mech: &MechanismSpec, seed: u64) -> Result<Vec<bool>> {
    apply_mechanism_with(pop, mech, &mut rng_for(seed, 0))
}

pub fn apply_mechanism_with<R: Rng + ?Sized>(
    pop: &Population,
    mech: &MechanismSpec,
    rng: &mut R,
) -> Result<Vec<bool>> {
    mech.validate()?;
    Ok(response_probabilities(pop, mech)
        .into_iter()
        .map(|p| rng.random::<f64>() < p)
        .collect())
}

/// Expected response rate `E[expit(ψ₀ + ψ₁·I)]` for a normal index,
/// by Simpson's rule over ±10 standard deviations.
pub fn expected_response_rate(intercept: f64, slope: f64, index_mean: f64, index_sd: f64) -> f64 {
    let centre = intercept + slope * index_mean;
    let spread = (slope * index_sd).abs();
    if spread == 0.0 {
        return expit(centre);
    }
    const STEPS: usize = 2000;
    let h = 20.0 / STEPS as f64;
    let norm = 1.0 / sqrt(2.0 * core::f64::consts::PI);
    let mut acc = 0.0;
    for i in 0..=STEPS {
        let z = -10.0 + h * i as f64;
        let w = if i == 0 || i == STEPS {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * norm * exp(-0.5 * z * z) * expit(centre + spread * z);
    }
    acc * h / 3.0
}

/// Sets the mechanism intercept so the expected response rate under `spec`
/// equals `target`.
pub fn tune_intercept(spec: &PopulationSpec, mech: &MechanismSpec, target: f64) -> Result<MechanismSpec> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!("target rate {target} outside (0, 1)")));
    }
    mech.validate()?;
    let (m, s) = mech.index_moments(spec);
    let (mut lo, mut hi) = (-60.0, 60.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if expected_response_rate(mid, mech.slope, m, s) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(MechanismSpec {
        intercept: 0.5 * (lo + hi),
        ..*mech
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrueBias {
    pub value: f64,
    /// Set when there are no respondents or no nonrespondents, where the
    /// bias is reported as 0.
    pub vacuous: bool,
}

/// `((N − N_R)/N)·(Ȳ_R − Ȳ_NR)`, the bias of the respondent mean.
pub fn true_bias(y: &[f64], responded: &[bool]) -> Result<TrueBias> {
    if y.len() != responded.len() {
        return Err(Error::InvalidArgument(format!(
            "{} outcomes for {} response indicators",
            y.len(),
            responded.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::Empty("population"));
    }
    let (mut sr, mut snr, mut nr) = (0.0, 0.0, 0usize);
    for (&v, &r) in y.iter().zip(responded) {
        if r {
            sr += v;
            nr += 1;
        } else {
            snr += v;
        }
    }
    let n = y.len();
    if nr == 0 || nr == n {
        return Ok(TrueBias {
            value: 0.0,
            vacuous: true,
        });
    }
    let yr = sr / nr as f64;
    let ynr = snr / (n - nr) as f64;
    Ok(TrueBias {
        value: (n - nr) as f64 / n as f64 * (yr - ynr),
        vacuous: false,
    })
}
