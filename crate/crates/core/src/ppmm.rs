//! Proxy pattern-mixture sensitivity analysis.
//!
//! The proxy `x` is the best prediction of the outcome `y` from variables
//! seen for every sampled unit. Assuming `(x, y)` is bivariate normal within
//! the respondent and nonrespondent patterns, and that response depends on
//! `(1 - φ)·sqrt(s_yy/s_xx)·x + φ·y`, the mean of `y` is identified for any
//! fixed `φ ∈ [0, 1]`:
//!
//! ```text
//! μ̂_y = ȳ_R + g(ρ̂, φ)·sqrt(s_yy/s_xx)·(x̄ − x̄_R)
//! g(ρ, φ) = (φ + (1 − φ)ρ) / (φρ + (1 − φ))
//! ```
//!
//! `φ = 0` is MAR (the regression estimator), `φ = 1` lets response depend
//! on `y` only. Internally the estimator is parameterised by
//! `λ = φ / (1 − φ)`, with a dedicated closed form at `λ = ∞`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use serde::Serialize;

use crate::dataset::RectDataset;
use crate::error::{Error, Result};
use crate::glm::{predict, LinearFit, Scale};
use crate::stats::{pearson, sample_sd, sqrt};
use crate::warning::{Warning, WarningCode};

/// Minimum number of respondents for any proxy pattern-mixture estimate.
pub const MIN_RESPONDENTS: usize = 3;

/// Normal quantile used for the overlap diagnostic's 95% intervals.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub struct ProxySeries {
    /// Proxy for every eligible unit.
    pub x: Vec<f64>,
    /// Outcome; `None` for nonrespondents.
    pub y: Vec<Option<f64>>,
    /// Respondent correlation of (x, y), after any sign flip.
    pub rho_hat: f64,
    pub sign_flipped: bool,
}

impl ProxySeries {
    /// Orients the proxy so the respondent correlation is non-negative.
    pub fn new(mut x: Vec<f64>, y: Vec<Option<f64>>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "proxy has {} values, outcome {}",
                x.len(),
                y.len()
            )));
        }
        let (xr, yr) = respondent_pairs(&x, &y);
        if xr.len() < MIN_RESPONDENTS {
            return Err(Error::InsufficientData {
                what: "respondents",
                needed: MIN_RESPONDENTS,
                found: xr.len(),
            });
        }
        let rho = pearson(&xr, &yr)
            .ok_or(Error::ZeroVariance("proxy or outcome among respondents"))?;
        let sign_flipped = rho < 0.0;
        if sign_flipped {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(ProxySeries {
            x,
            y,
            rho_hat: rho.abs(),
            sign_flipped,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn respondents(&self) -> usize {
        self.y.iter().filter(|v| v.is_some()).count()
    }

    /// The series restricted to `rows`, re-oriented within the subset.
    pub fn subset(&self, rows: &[usize]) -> Result<ProxySeries> {
        let x = rows.iter().map(|&i| self.x[i]).collect();
        let y = rows.iter().map(|&i| self.y[i]).collect();
        ProxySeries::new(x, y)
    }

    pub fn respondent_mean(&self) -> f64 {
        let (_, yr) = respondent_pairs(&self.x, &self.y);
        yr.iter().sum::<f64>() / yr.len() as f64
    }
}

fn respondent_pairs(x: &[f64], y: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    x.iter()
        .zip(y)
        .filter_map(|(&xi, yi)| yi.map(|v| (xi, v)))
        .unzip()
}

/// Scores every row in `rows` with the outcome model; respondents are the
/// rows where `outcome` is observed.
pub fn build_proxy(
    fit: &LinearFit,
    d: &RectDataset,
    rows: &[usize],
    outcome: usize,
) -> Result<ProxySeries> {
    let x = predict(fit, d, rows, Scale::Linear)?;
    let y = rows.iter().map(|&i| d.value(i, outcome)).collect();
    ProxySeries::new(x, y)
}

/// `φ / (1 − φ)`, with `φ = 1` mapped to `+∞`.
pub fn lambda_from_phi(phi: f64) -> f64 {
    if phi >= 1.0 {
        f64::INFINITY
    } else {
        phi / (1.0 - phi)
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&phi) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("phi = {phi} outside [0, 1]")))
    }
}

/// The unitless ratio `g(ρ, φ) = (φ + (1 − φ)ρ) / (φρ + (1 − φ))`.
pub fn g_coefficient(rho: f64, phi: f64) -> Result<f64> {
    check_phi(phi)?;
    if !(rho > 0.0 && rho <= 1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "rho = {rho}: the proxy must be positively correlated with the outcome"
        )));
    }
    Ok((phi + (1.0 - phi) * rho) / (phi * rho + (1.0 - phi)))
}

/// Respondent and nonrespondent moments with divisor r (resp. n − r).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternMoments {
    pub n: usize,
    pub r: usize,
    pub x_bar_r: f64,
    pub y_bar_r: f64,
    pub s_xx: f64,
    pub s_yy: f64,
    pub s_xy: f64,
    pub x_bar_nr: f64,
    pub s_xx_nr: f64,
    pub x_bar: f64,
}

impl PatternMoments {
    pub fn of(proxy: &ProxySeries) -> Result<Self> {
        let (xr, yr) = respondent_pairs(&proxy.x, &proxy.y);
        let n = proxy.len();
        let r = xr.len();
        if r < MIN_RESPONDENTS {
            return Err(Error::InsufficientData {
                what: "respondents",
                needed: MIN_RESPONDENTS,
                found: r,
            });
        }
        let rf = r as f64;
        let x_bar_r = xr.iter().sum::<f64>() / rf;
        let y_bar_r = yr.iter().sum::<f64>() / rf;
        let (mut s_xx, mut s_yy, mut s_xy) = (0.0, 0.0, 0.0);
        for (x, y) in xr.iter().zip(&yr) {
            s_xx += (x - x_bar_r) * (x - x_bar_r);
            s_yy += (y - y_bar_r) * (y - y_bar_r);
            s_xy += (x - x_bar_r) * (y - y_bar_r);
        }
        let (s_xx, s_yy, s_xy) = (s_xx / rf, s_yy / rf, s_xy / rf);
        if s_xx <= 0.0 {
            return Err(Error::ZeroVariance("respondent proxy"));
        }
        if s_yy <= 0.0 {
            return Err(Error::ZeroVariance("respondent outcome"));
        }
        let xnr: Vec<f64> = proxy
            .x
            .iter()
            .zip(&proxy.y)
            .filter(|(_, y)| y.is_none())
            .map(|(&x, _)| x)
            .collect();
        let (x_bar_nr, s_xx_nr) = if xnr.is_empty() {
            (x_bar_r, 0.0)
        } else {
            let m = xnr.iter().sum::<f64>() / xnr.len() as f64;
            let v = xnr.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xnr.len() as f64;
            (m, v)
        };
        let x_bar = proxy.x.iter().sum::<f64>() / n as f64;
        Ok(PatternMoments {
            n,
            r,
            x_bar_r,
            y_bar_r,
            s_xx,
            s_yy,
            s_xy,
            x_bar_nr,
            s_xx_nr,
            x_bar,
        })
    }

    pub fn rho(&self) -> f64 {
        self.s_xy / sqrt(self.s_xx * self.s_yy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PpmmEstimate {
    pub phi: f64,
    pub lambda: f64,
    /// Unitless `g(ρ̂, φ)`.
    pub g: f64,
    /// Slope on the proxy scale: `g·sqrt(s_yy/s_xx)`.
    pub slope: f64,
    pub slope_var: f64,
    pub mu_y: f64,
    pub mu_y_var: f64,
    pub mu_x: f64,
    pub sigma_xx: f64,
    pub sigma_yy: f64,
    pub sigma_xy: f64,
    /// `mu_y` minus the respondent mean.
    pub nrba: f64,
    pub respondent_mean: f64,
    pub respondents: usize,
    pub n: usize,
}

impl PpmmEstimate {
    pub fn se(&self) -> f64 {
        sqrt(self.mu_y_var)
    }

    pub fn interval95(&self) -> (f64, f64) {
        let h = Z_95 * self.se();
        (self.mu_y - h, self.mu_y + h)
    }
}

/// Maximum-likelihood estimate of the outcome mean under the proxy
/// pattern-mixture model, with its large-sample variance.
pub fn ppmm_mle(proxy: &ProxySeries, phi: f64) -> Result<PpmmEstimate> {
    check_phi(phi)?;
    let m = PatternMoments::of(proxy)?;
    Ok(ppmm_from_moments(&m, phi))
}

pub(crate) fn ppmm_from_moments(m: &PatternMoments, phi: f64) -> PpmmEstimate {
    let lambda = lambda_from_phi(phi);
    let (n, r) = (m.n as f64, m.r as f64);
    let (sxx, syy, sxy) = (m.s_xx, m.s_yy, m.s_xy);
    let rho = m.rho();
    let resid = sxx * syy - sxy * sxy;

    let (slope, slope_var) = if lambda.is_infinite() {
        let slope = syy / sxy;
        let var = resid * syy * syy / (r * pow4(sxy));
        (slope, var)
    } else {
        let slope = sqrt(syy / sxx) * (lambda + rho) / (lambda * rho + 1.0);
        let root = sqrt(sxx * syy);
        let l2 = lambda * lambda;
        let a = sxx * sxx * syy * syy * (1.0 - l2 + l2 * l2);
        let b = 2.0 * sxx * syy * sxy * lambda * (3.0 * lambda * sxy + root * (1.0 + l2));
        let c = lambda * (sxy * sxy * sxy) * (lambda * sxy + 2.0 * root * (1.0 + l2));
        let var = resid * (a + b + c) / (r * sxx * sxx * pow4(root + lambda * sxy));
        (slope, var)
    };
    let g = if lambda.is_infinite() {
        1.0 / rho
    } else {
        (lambda + rho) / (lambda * rho + 1.0)
    };

    let nr = n - r;
    let mu_x = m.x_bar;
    let sigma_xx = (r / n) * sxx
        + (nr / n) * m.s_xx_nr
        + (r / n) * (nr / n) * (m.x_bar_r - m.x_bar_nr) * (m.x_bar_r - m.x_bar_nr);
    let shift = mu_x - m.x_bar_r;
    let mu_y = m.y_bar_r + slope * shift;
    let sigma_yy = syy + slope * slope * (sigma_xx - sxx);
    let sigma_xy = sxy + slope * (sigma_xx - sxx);
    let mu_y_var = sigma_yy / n
        + slope_var * shift * shift
        + (nr / (r * n)) * (syy - 2.0 * slope * sxy + slope * slope * sxx);

    PpmmEstimate {
        phi,
        lambda,
        g,
        slope,
        slope_var,
        mu_y,
        mu_y_var,
        mu_x,
        sigma_xx,
        sigma_yy,
        sigma_xy,
        nrba: mu_y - m.y_bar_r,
        respondent_mean: m.y_bar_r,
        respondents: m.r,
        n: m.n,
    }
}

fn pow4(v: f64) -> f64 {
    let s = v * v;
    s * s
}

/// `g(ρ̂, φ)·sqrt(s_yy/s_xx)·(x̄ − x̄_R)`.
pub fn nrba_index(proxy: &ProxySeries, phi: f64) -> Result<f64> {
    let m = PatternMoments::of(proxy)?;
    let g = g_coefficient(m.rho(), phi)?;
    Ok(g * sqrt(m.s_yy / m.s_xx) * (m.x_bar - m.x_bar_r))
}

/// `(x̄ − x̄_R) / sd_R(x)`, using the n − 1 respondent standard deviation.
pub fn standardized_deviation(proxy: &ProxySeries) -> Result<f64> {
    let (xr, _) = respondent_pairs(&proxy.x, &proxy.y);
    if xr.len() < 2 {
        return Err(Error::InsufficientData {
            what: "respondents",
            needed: 2,
            found: xr.len(),
        });
    }
    let sd = sample_sd(&xr);
    if !(sd > 0.0) {
        return Err(Error::ZeroVariance("respondent proxy"));
    }
    let all = proxy.x.iter().sum::<f64>() / proxy.len() as f64;
    let resp = xr.iter().sum::<f64>() / xr.len() as f64;
    Ok((all - resp) / sd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RhoClass {
    Weak,
    Moderate,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviationClass {
    Small,
    Medium,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrengthVerdict {
    pub rho: f64,
    pub rho_class: RhoClass,
    pub d: f64,
    pub d_class: DeviationClass,
}

/// Proxy strength: ρ below 0.4 is weak, 0.4 to 0.7 moderate, above 0.7
/// strong; |d| below 0.1 is small, 0.1 to 0.3 medium, above 0.3 large.
pub fn classify_strength(rho: f64, d: f64) -> StrengthVerdict {
    let rho_class = if rho < 0.4 {
        RhoClass::Weak
    } else if rho <= 0.7 {
        RhoClass::Moderate
    } else {
        RhoClass::Strong
    };
    let ad = d.abs();
    let d_class = if ad < 0.1 {
        DeviationClass::Small
    } else if ad <= 0.3 {
        DeviationClass::Medium
    } else {
        DeviationClass::Large
    };
    StrengthVerdict {
        rho,
        rho_class,
        d,
        d_class,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupNrba {
    pub estimates: BTreeMap<u32, PpmmEstimate>,
    /// Group code → respondent-level proxy correlation within the group.
    pub rho: BTreeMap<u32, f64>,
    pub skipped: Vec<u32>,
    pub warnings: Vec<Warning>,
}

/// Unit indices of `proxy` grouped by code; `None` codes are left out.
pub fn group_rows(groups: &[Option<u32>]) -> BTreeMap<u32, Vec<usize>> {
    let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, g) in groups.iter().enumerate() {
        if let Some(g) = g {
            out.entry(*g).or_default().push(i);
        }
    }
    out
}

/// Runs the estimator separately within each group, with group-specific
/// correlations and variances. Groups that cannot support an estimate are
/// listed in `skipped`.
pub fn subgroup_nrba(proxy: &ProxySeries, groups: &[Option<u32>], phi: f64) -> Result<SubgroupNrba> {
    check_phi(phi)?;
    if groups.len() != proxy.len() {
        return Err(Error::InvalidArgument(format!(
            "{} group codes for {} units",
            groups.len(),
            proxy.len()
        )));
    }
    let mut out = SubgroupNrba {
        estimates: BTreeMap::new(),
        rho: BTreeMap::new(),
        skipped: Vec::new(),
        warnings: Vec::new(),
    };
    for (code, rows) in group_rows(groups) {
        let fitted = proxy
            .subset(&rows)
            .and_then(|p| Ok((ppmm_mle(&p, phi)?, p.rho_hat)));
        match fitted {
            Ok((est, rho)) => {
                out.estimates.insert(code, est);
                out.rho.insert(code, rho);
            }
            Err(e) => {
                out.skipped.push(code);
                out.warnings.push(Warning::new(
                    WarningCode::SmallGroup,
                    format!("group {code} skipped: {e}"),
                ));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub phi: f64,
    pub mu_y: f64,
    pub se: f64,
    pub nrba: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityTable {
    pub rho_hat: f64,
    pub d: f64,
    pub respondent_mean: f64,
    pub respondents: usize,
    pub n: usize,
    pub rows: Vec<SweepRow>,
    /// Whether every pair of 95% intervals intersects.
    pub overlap: bool,
}

pub const DEFAULT_PHIS: [f64; 3] = [0.0, 0.5, 1.0];

pub fn sensitivity_sweep(proxy: &ProxySeries, phis: &[f64]) -> Result<SensitivityTable> {
    if phis.is_empty() {
        return Err(Error::Empty("phi grid"));
    }
    let m = PatternMoments::of(proxy)?;
    let mut rows = Vec::with_capacity(phis.len());
    let mut intervals = Vec::with_capacity(phis.len());
    for &phi in phis {
        check_phi(phi)?;
        let e = ppmm_from_moments(&m, phi);
        intervals.push(e.interval95());
        rows.push(SweepRow {
            phi,
            mu_y: e.mu_y,
            se: e.se(),
            nrba: e.nrba,
        });
    }
    let overlap = intervals.iter().enumerate().all(|(i, a)| {
        intervals[i + 1..]
            .iter()
            .all(|b| a.0 <= b.1 && b.0 <= a.1)
    });
    Ok(SensitivityTable {
        rho_hat: proxy.rho_hat,
        d: standardized_deviation(proxy)?,
        respondent_mean: m.y_bar_r,
        respondents: m.r,
        n: m.n,
        rows,
        overlap,
    })
}

/// Sweeps within each group; groups that fail are reported and skipped.
pub fn subgroup_sweep(
    proxy: &ProxySeries,
    groups: &[Option<u32>],
    phis: &[f64],
) -> Result<(BTreeMap<u32, SensitivityTable>, Vec<Warning>)> {
    if groups.len() != proxy.len() {
        return Err(Error::InvalidArgument(format!(
            "{} group codes for {} units",
            groups.len(),
            proxy.len()
        )));
    }
    let mut tables = BTreeMap::new();
    let mut warnings = Vec::new();
    for (code, rows) in group_rows(groups) {
        match proxy.subset(&rows).and_then(|p| sensitivity_sweep(&p, phis)) {
            Ok(t) => {
                tables.insert(code, t);
            }
            Err(e) => warnings.push(Warning::new(
                WarningCode::SmallGroup,
                format!("group {code} skipped: {e}"),
            )),
        }
    }
    Ok((tables, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fixture() -> ProxySeries {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 2.5, 3.5];
        let y = vec![
            Some(1.2),
            Some(2.1),
            Some(2.9),
            Some(4.4),
            Some(4.8),
            None,
            None,
            None,
        ];
        ProxySeries::new(x, y).unwrap()
    }

    #[test]
    fn g_anchor_values() {
        assert!((g_coefficient(0.3, 0.0).unwrap() - 0.3).abs() < 1e-15);
        assert!((g_coefficient(0.3, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((g_coefficient(0.5, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(g_coefficient(0.0, 0.5).is_err());
        assert!(g_coefficient(-0.2, 0.5).is_err());
        assert!(g_coefficient(0.5, 1.5).is_err());
    }

    #[test]
    fn no_nonrespondents_collapses() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y = vec![Some(2.0), Some(1.0), Some(4.0), Some(3.5)];
        let p = ProxySeries::new(x, y).unwrap();
        for phi in DEFAULT_PHIS {
            let e = ppmm_mle(&p, phi).unwrap();
            assert!((e.mu_y - 2.625).abs() < 1e-12);
            assert_eq!(e.nrba, 0.0);
        }
    }

    #[test]
    fn mar_is_regression_estimator() {
        let p = fixture();
        let m = PatternMoments::of(&p).unwrap();
        let e = ppmm_mle(&p, 0.0).unwrap();
        let reg = m.y_bar_r + m.s_xy / m.s_xx * (m.x_bar - m.x_bar_r);
        assert!((e.mu_y - reg).abs() < 1e-12);
    }

    #[test]
    fn nrba_matches_mle_difference() {
        let p = fixture();
        for phi in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let e = ppmm_mle(&p, phi).unwrap();
            let idx = nrba_index(&p, phi).unwrap();
            assert!((idx - (e.mu_y - p.respondent_mean())).abs() < 1e-10);
        }
    }

    #[test]
    fn negative_proxy_flipped() {
        let x = vec![-1.0, -2.0, -3.0, -4.0, 0.0];
        let y = vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0), None];
        let p = ProxySeries::new(x, y).unwrap();
        assert!(p.sign_flipped);
        assert!((p.rho_hat - 1.0).abs() < 1e-12);
        assert_eq!(p.x[0], 1.0);
    }

    #[test]
    fn deviation_and_classes() {
        let x = vec![1.0, 2.0, 3.0];
        let y = vec![Some(1.0), Some(3.0), Some(2.0)];
        let p = ProxySeries::new(x, y).unwrap();
        assert_eq!(standardized_deviation(&p).unwrap(), 0.0);
        assert_eq!(classify_strength(0.36, 0.0).rho_class, RhoClass::Weak);
        assert_eq!(classify_strength(0.5, 0.0).rho_class, RhoClass::Moderate);
        assert_eq!(classify_strength(0.7, 0.0).rho_class, RhoClass::Moderate);
        assert_eq!(classify_strength(0.71, 0.0).rho_class, RhoClass::Strong);
        assert_eq!(classify_strength(0.5, 0.01).d_class, DeviationClass::Small);
        assert_eq!(classify_strength(0.5, -0.2).d_class, DeviationClass::Medium);
        assert_eq!(classify_strength(0.5, 0.31).d_class, DeviationClass::Large);
    }

    #[test]
    fn too_few_respondents() {
        let p = ProxySeries::new(vec![1.0, 2.0, 3.0], vec![Some(1.0), Some(2.0), None]);
        assert!(matches!(p, Err(Error::InsufficientData { found: 2, .. })));
    }

    #[test]
    fn subgroup_single_group_equals_overall() {
        let p = fixture();
        let groups = vec![Some(7); p.len()];
        let s = subgroup_nrba(&p, &groups, 0.5).unwrap();
        assert_eq!(s.estimates[&7], ppmm_mle(&p, 0.5).unwrap());
    }

    #[test]
    fn sweep_zero_shift_all_equal() {
        // nonrespondent proxy values centred on the respondent mean
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 2.0, 4.0];
        let y = vec![Some(1.0), Some(2.5), Some(2.0), Some(4.0), Some(5.5), None, None];
        let p = ProxySeries::new(x, y).unwrap();
        let t = sensitivity_sweep(&p, &DEFAULT_PHIS).unwrap();
        for r in &t.rows {
            assert!((r.mu_y - t.respondent_mean).abs() < 1e-12);
        }
        assert!(t.overlap);
    }
}
