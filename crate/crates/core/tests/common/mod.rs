//! Shared fixtures and small, deliberately naive numerical routines used
//! as oracles.
#![allow(dead_code)]

use nrba_core::dataset::{Column, ColumnSpec, RectDataset, Role};
use nrba_core::glm::{stepwise_forward, Family, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Continuous auxiliaries named `x1, x2, …` followed by the response `y`.
pub fn dataset(xs: &[Vec<f64>], y: &[f64]) -> RectDataset {
    let mut cols: Vec<Column> = xs
        .iter()
        .enumerate()
        .map(|(j, v)| {
            Column::continuous(
                ColumnSpec::continuous(format!("x{}", j + 1), Role::Auxiliary),
                v.iter().map(|&x| Some(x)).collect(),
            )
        })
        .collect();
    cols.push(Column::continuous(
        ColumnSpec::continuous("y", Role::Outcome),
        y.iter().map(|&v| Some(v)).collect(),
    ));
    RectDataset::from_columns(cols).unwrap()
}

/// Solves `a·x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Rows of `[1, x_j for j in cols]`.
pub fn design_rows(xs: &[Vec<f64>], cols: &[usize]) -> Vec<Vec<f64>> {
    let n = xs.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            let mut r = vec![1.0];
            r.extend(cols.iter().map(|&j| xs[j][i]));
            r
        })
        .collect()
}

/// OLS through the normal equations `XᵀX β = Xᵀy`; returns `(β, rss)`.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let k = x[0].len();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, &yi) in x.iter().zip(y) {
        for a in 0..k {
            xty[a] += row[a] * yi;
            for b in 0..k {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    let beta = solve(xtx, xty);
    let rss = x
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let f: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (yi - f) * (yi - f)
        })
        .sum();
    (beta, rss)
}

pub fn linear_aic(n: usize, k: usize, rss: f64) -> f64 {
    n as f64 * (rss / n as f64).ln() + 2.0 * (k as f64 + 1.0)
}

/// Logistic MLE by plain Newton steps; returns `(β, deviance)`.
pub fn newton_logistic(x: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let k = x[0].len();
    let mut beta = vec![0.0; k];
    for _ in 0..100 {
        let mut grad = vec![0.0; k];
        let mut hess = vec![vec![0.0; k]; k];
        for (row, &yi) in x.iter().zip(y) {
            let eta: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let p = 1.0 / (1.0 + (-eta).exp());
            for a in 0..k {
                grad[a] += row[a] * (yi - p);
                for b in 0..k {
                    hess[a][b] += row[a] * row[b] * p * (1.0 - p);
                }
            }
        }
        let step = solve(hess, grad);
        let size: f64 = step.iter().map(|s| s.abs()).fold(0.0, f64::max);
        beta.iter_mut().zip(&step).for_each(|(b, s)| *b += s);
        if size < 1e-13 {
            break;
        }
    }
    (beta.clone(), logistic_deviance(x, y, &beta))
}

pub fn logistic_deviance(x: &[Vec<f64>], y: &[f64], beta: &[f64]) -> f64 {
    -2.0 * x
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let eta: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
            let p = 1.0 / (1.0 + (-eta).exp());
            yi * p.ln() + (1.0 - yi) * (1.0 - p).ln()
        })
        .sum::<f64>()
}

/// Pearson correlation by the textbook two-pass formula.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// AUC as the share of (positive, negative) pairs ranked correctly, ties
/// counting one half.
pub fn pairwise_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut twice = 0u64;
    let (mut n1, mut n0) = (0u64, 0u64);
    for (i, &li) in labels.iter().enumerate() {
        if li {
            n1 += 1;
        } else {
            n0 += 1;
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            if scores[i] > scores[j] {
                twice += 2;
            } else if scores[i] == scores[j] {
                twice += 1;
            }
        }
    }
    twice as f64 / (2 * n1 * n0) as f64
}

/// Forward path read off a table of every subset's AIC.
pub fn exhaustive_forward(p: usize, aic_of: impl Fn(&[usize]) -> f64) -> (Vec<usize>, Vec<f64>) {
    let mut table = std::collections::HashMap::new();
    for mask in 0u32..(1 << p) {
        let cols: Vec<usize> = (0..p).filter(|j| mask >> j & 1 == 1).collect();
        table.insert(mask, aic_of(&cols));
    }
    let mut mask = 0u32;
    let mut path = Vec::new();
    let mut aics = vec![table[&0]];
    loop {
        let current = table[&mask];
        let best = (0..p)
            .filter(|j| mask >> j & 1 == 0)
            .map(|j| (j, table[&(mask | 1 << j)]))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((j, a)) if a < current => {
                mask |= 1 << j;
                path.push(j);
                aics.push(a);
            }
            _ => break,
        }
    }
    (path, aics)
}

pub fn check_path(d: &RectDataset, p: usize, family: Family, oracle: (Vec<usize>, Vec<f64>)) {
    let candidates: Vec<Term> = (0..p).map(Term::Main).collect();
    let sw = stepwise_forward(d, &d.all_rows(), p, &candidates, family).unwrap();
    let added: Vec<usize> = sw
        .path
        .iter()
        .filter_map(|s| match s.added {
            Some(Term::Main(j)) => Some(j),
            _ => None,
        })
        .collect();
    assert_eq!(added, oracle.0);
    for (s, a) in sw.path.iter().zip(&oracle.1) {
        assert!((s.aic - a).abs() < 1e-7 * (1.0 + a.abs()), "{} vs {a}", s.aic);
    }
    assert!(sw.path.windows(2).all(|w| w[1].aic < w[0].aic));
}

/// The frozen twelve-row proxy fixture: seven respondents, five
/// nonrespondents.
pub fn ppmm_fixture() -> (Vec<f64>, Vec<Option<f64>>) {
    let text = include_str!("../fixtures/ppmm12.csv");
    text.lines()
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse::<f64>().unwrap(), y.parse::<f64>().ok())
        })
        .unzip()
}

/// Transcription of the reference `mle(x, y, lambda)` routine.
pub fn reference_mle(x: &[f64], y: &[Option<f64>], lambda: f64) -> (f64, f64) {
    let n = x.len() as f64;
    let r = y.iter().filter(|v| v.is_some()).count() as f64;
    let x0: Vec<f64> = x.iter().zip(y).filter(|(_, v)| v.is_some()).map(|(a, _)| *a).collect();
    let y0: Vec<f64> = y.iter().flatten().copied().collect();
    let x1: Vec<f64> = x.iter().zip(y).filter(|(_, v)| v.is_none()).map(|(a, _)| *a).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;

    let x_bar_0 = mean(&x0);
    let y_bar_0 = mean(&y0);
    let sxx_0 = x0.iter().map(|a| (a - x_bar_0).powi(2)).sum::<f64>() / r;
    let syy_0 = y0.iter().map(|b| (b - y_bar_0).powi(2)).sum::<f64>() / r;
    let sxy_0 = x0
        .iter()
        .zip(&y0)
        .map(|(a, b)| (a - x_bar_0) * (b - y_bar_0))
        .sum::<f64>()
        / r;
    let bxy_y_0 = sxy_0 / syy_0;
    let rho_hat_0 = sxy_0 / (sxx_0 * syy_0).sqrt();

    let x_bar_1 = mean(&x1);
    let sxx_1 = x1.iter().map(|a| (a - x_bar_1).powi(2)).sum::<f64>() / (n - r);

    let g_lambda = if lambda == f64::INFINITY {
        1.0 / bxy_y_0
    } else {
        (syy_0 / sxx_0).sqrt() * (lambda + rho_hat_0) / (lambda * rho_hat_0 + 1.0)
    };
    let g_lambda_var = if lambda == f64::INFINITY {
        let num = (sxx_0 * syy_0 - sxy_0.powi(2)) * syy_0.powi(2);
        let denom = r * sxy_0.powi(4);
        num / denom
    } else {
        let a = sxx_0.powi(2) * syy_0.powi(2) * (1.0 - lambda.powi(2) + lambda.powi(4));
        let b = 2.0
            * sxx_0
            * syy_0
            * sxy_0
            * lambda
            * (3.0 * lambda * sxy_0 + (sxx_0 * syy_0).sqrt() * (1.0 + lambda.powi(2)));
        let c = lambda
            * sxy_0.powi(3)
            * (lambda * sxy_0 + 2.0 * (sxx_0 * syy_0).sqrt() * (1.0 + lambda.powi(2)));
        let num = (sxx_0 * syy_0 - sxy_0.powi(2)) * (a + b + c);
        let denom = r * sxx_0.powi(2) * ((sxx_0 * syy_0).sqrt() + lambda * sxy_0).powi(4);
        num / denom
    };

    let mu_x = mean(x);
    let sigma_xx = (r / n) * sxx_0
        + ((n - r) / n) * sxx_1
        + (r / n) * ((n - r) / n) * (x_bar_0 - x_bar_1).powi(2);
    let mu_y = y_bar_0 + g_lambda * (mu_x - x_bar_0);
    let sigma_yy = syy_0 + g_lambda.powi(2) * (sigma_xx - sxx_0);
    let one = sigma_yy / n;
    let two = g_lambda_var * (mu_x - x_bar_0).powi(2);
    let three = ((n - r) / (r * n)) * (syy_0 - 2.0 * g_lambda * sxy_0 + g_lambda.powi(2) * sxx_0);
    (mu_y, one + two + three)
}

/// Classic two-way IPF on the aggregated cell table.
pub fn ipf_cells(mut t: [[f64; 4]; 4], rows: [f64; 4], cols: [f64; 4]) -> [[f64; 4]; 4] {
    for _ in 0..10_000 {
        for (i, row) in t.iter_mut().enumerate() {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|c| *c *= rows[i] / s);
        }
        for j in 0..4 {
            let s: f64 = (0..4).map(|i| t[i][j]).sum();
            (0..4).for_each(|i| t[i][j] *= cols[j] / s);
        }
    }
    t
}
