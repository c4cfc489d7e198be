//! A synthetic stand-in for a clustered kindergarten cohort survey:
//! children nested in schools within strata, thirteen auxiliaries known
//! for every sampled child, two late-arriving auxiliaries, two assessment
//! scores observed only for respondents, parent and teacher instruments,
//! and a little item nonresponse (some coded `-9`).
//!
//! Scores have mean 50 and standard deviation near 10. The thirteen
//! auxiliaries explain about 13% of the reading variance and the late
//! auxiliaries about 10% more. Response follows a logistic model in the
//! auxiliaries plus a weak dependence on the reading score, tuned to an
//! 87% response rate.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::rng_for;
use crate::dataset::{ColumnSpec, RectDataset, Role, TableBuilder};
use crate::error::{Error, Result};
use crate::stats::expit;

pub const ECLS_LIKE_N: usize = 5000;
pub const CHILDREN_PER_SCHOOL: usize = 20;
pub const STRATA: usize = 20;
pub const RESPONSE_RATE: f64 = 0.87;
pub const SENTINEL: &str = "-9";

/// Regular auxiliaries, in column order.
pub const AUXILIARIES: [&str; 13] = [
    "sex",
    "race",
    "age_months",
    "ses",
    "region",
    "urbanicity",
    "school_type",
    "school_size",
    "pct_minority",
    "lunch_pct",
    "home_language",
    "fulltime_k",
    "parent_edu",
];
pub const LATE_AUXILIARIES: [&str; 2] = ["prek_score", "teacher_rating"];
pub const OUTCOMES: [&str; 2] = ["read", "math"];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSurvey {
    pub schema: Vec<ColumnSpec>,
    pub header: Vec<String>,
    /// Raw text cells, as they would appear in a delimited file.
    pub rows: Vec<Vec<String>>,
}

impl SyntheticSurvey {
    pub fn to_dataset(&self) -> Result<RectDataset> {
        let mut b = TableBuilder::new(self.schema.clone(), &self.header)?;
        for r in &self.rows {
            b.push_row(r)?;
        }
        b.finish()
    }
}

fn schema() -> Vec<ColumnSpec> {
    use ColumnSpec as C;
    let mut s = alloc::vec![
        C::continuous("child_id", Role::Id),
        C::continuous("school", Role::Psu),
        C::continuous("stratum", Role::Stratum),
        C::continuous("base_weight", Role::BaseWeight),
        C::continuous("responded", Role::ResponseIndicator),
        C::categorical("sex", Role::Auxiliary),
        C::categorical("race", Role::Subgroup),
        C::continuous("age_months", Role::Auxiliary),
        C::continuous("ses", Role::Auxiliary),
        C::categorical("region", Role::Auxiliary),
        C::categorical("urbanicity", Role::Auxiliary),
        C::categorical("school_type", Role::Auxiliary),
        C::continuous("school_size", Role::Auxiliary),
        C::continuous("pct_minority", Role::Auxiliary),
        C::continuous("lunch_pct", Role::Auxiliary),
        C::categorical("home_language", Role::Auxiliary),
        C::continuous("fulltime_k", Role::Auxiliary),
        C::continuous("parent_edu", Role::Auxiliary),
        C::continuous("prek_score", Role::Auxiliary),
        C::continuous("teacher_rating", Role::Auxiliary),
    ];
    for o in OUTCOMES {
        s.push(C::continuous(o, Role::Outcome).with_sentinels([SENTINEL]));
    }
    s.push(C::continuous("parent_income", Role::Outcome).with_sentinels([SENTINEL]));
    s.push(C::continuous("teacher_report", Role::Outcome).with_sentinels([SENTINEL]));
    s
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn pick<'a, R: Rng + ?Sized>(rng: &mut R, levels: &[&'a str], probs: &[f64]) -> (usize, &'a str) {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return (i, levels[i]);
        }
    }
    (levels.len() - 1, levels[levels.len() - 1])
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

struct School {
    stratum: usize,
    private: bool,
    size: f64,
    pct_minority: f64,
    lunch_pct: f64,
    region: &'static str,
    urbanicity: &'static str,
    effect: f64,
    ses_mean: f64,
    logit_shift: f64,
}

/// Generates the survey. Everything is a deterministic function of
/// `(n, seed)`.
pub fn ecls_like(n: usize, seed: u64) -> Result<SyntheticSurvey> {
    if n < CHILDREN_PER_SCHOOL * STRATA * 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} children for two schools per stratum",
            CHILDREN_PER_SCHOOL * STRATA * 2
        )));
    }
    let mut rng = rng_for(seed, 0);
    let n_schools = n.div_ceil(CHILDREN_PER_SCHOOL);
    let schools: Vec<School> = (0..n_schools)
        .map(|s| {
            let private = rng.random::<f64>() < 0.12;
            let ses_mean = 0.5 * normal(&mut rng) + if private { 0.4 } else { 0.0 };
            School {
                stratum: s * STRATA / n_schools + 1,
                private,
                size: (450.0 + 150.0 * normal(&mut rng)).max(60.0),
                pct_minority: (45.0 - 20.0 * ses_mean + 15.0 * normal(&mut rng)).clamp(0.0, 100.0),
                lunch_pct: (50.0 - 25.0 * ses_mean + 12.0 * normal(&mut rng)).clamp(0.0, 100.0),
                region: pick(&mut rng, &["MW", "NE", "S", "W"], &[0.22, 0.18, 0.38, 0.22]).1,
                urbanicity: pick(&mut rng, &["city", "rural", "suburb"], &[0.3, 0.25, 0.45]).1,
                effect: 0.35 * normal(&mut rng),
                ses_mean,
                logit_shift: 0.45 * normal(&mut rng),
            }
        })
        .collect();

    struct Child {
        cells: Vec<String>,
        read: f64,
        math: f64,
        logit: f64,
        parent_income: f64,
        teacher_report: f64,
    }
    let race_levels = ["Asian", "Black", "Hispanic", "White"];
    let race_shift = [0.25, -0.35, -0.3, 0.1];
    let mut children = Vec::with_capacity(n);
    for i in 0..n {
        let sch = &schools[i / CHILDREN_PER_SCHOOL];
        let school_id = i / CHILDREN_PER_SCHOOL + 1;
        let female = rng.random::<f64>() < 0.49;
        let (ri, race) = pick(&mut rng, &race_levels, &[0.05, 0.14, 0.26, 0.55]);
        let age = 66.0 + 4.0 * normal(&mut rng);
        let ses = sch.ses_mean + 0.85 * normal(&mut rng);
        let english = rng.random::<f64>() < 0.82;
        let fulltime = rng.random::<f64>() < 0.8;
        let parent_edu = (3.0 + 0.9 * ses + 0.8 * normal(&mut rng)).round().clamp(1.0, 5.0);
        let prek = normal(&mut rng);
        let rating = 0.6 * prek + 0.8 * normal(&mut rng);

        // Standardized signal from the regular auxiliaries.
        let base = 0.55 * ses
            + 0.25 * (parent_edu - 3.0)
            + 0.2 * (age - 66.0) / 4.0
            + race_shift[ri]
            + if english { 0.1 } else { -0.25 }
            + if female { 0.08 } else { -0.08 }
            - 0.004 * (sch.lunch_pct - 50.0)
            + 0.1 * ses * (parent_edu - 3.0);
        let late = 0.32 * prek + 0.05 * rating;
        let noise_read = sch.effect + 0.82 * normal(&mut rng);
        let noise_math = 0.8 * sch.effect + 0.5 * noise_read + 0.7 * normal(&mut rng);
        let read = 50.0 + 10.0 * (0.37 * base + late + noise_read);
        let math = 50.0 + 10.0 * (0.4 * base + 0.8 * late + 0.6 * noise_math);

        let logit = sch.logit_shift
            + 0.3 * ses
            + if sch.private { -0.5 } else { 0.0 }
            + match sch.urbanicity {
                "city" => -0.3,
                "rural" => 0.25,
                _ => 0.0,
            }
            + if english { 0.3 } else { -0.2 }
            + if fulltime { 0.15 } else { 0.0 }
            + 0.01 * (read - 50.0);

        let cells = alloc::vec![
            (i + 1).to_string(),
            school_id.to_string(),
            sch.stratum.to_string(),
            f3((40.0 + 6.0 * sch.stratum as f64) * (0.9 + 0.2 * rng.random::<f64>())),
            String::new(),
            (if female { "F" } else { "M" }).to_string(),
            race.to_string(),
            f3(age),
            f3(ses),
            sch.region.to_string(),
            sch.urbanicity.to_string(),
            (if sch.private { "private" } else { "public" }).to_string(),
            f3(sch.size),
            f3(sch.pct_minority),
            f3(sch.lunch_pct),
            (if english { "English" } else { "Other" }).to_string(),
            (if fulltime { "1" } else { "0" }).to_string(),
            format!("{parent_edu:.0}"),
            f3(prek),
            f3(rating),
        ];
        children.push(Child {
            cells,
            read,
            math,
            logit,
            parent_income: 55.0 + 18.0 * ses + 10.0 * normal(&mut rng),
            teacher_report: 3.0 + 0.5 * rating + 0.4 * normal(&mut rng),
        });
    }

    // Intercept so the mean response probability is the target rate.
    let (mut lo, mut hi) = (-20.0, 20.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let rate = children.iter().map(|c| expit(mid + c.logit)).sum::<f64>() / n as f64;
        if rate < RESPONSE_RATE {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let intercept = 0.5 * (lo + hi);

    let mut rows = Vec::with_capacity(n);
    for mut c in children {
        let responded = rng.random::<f64>() < expit(intercept + c.logit);
        c.cells[4] = (if responded { "1" } else { "0" }).to_string();
        let parent = rng.random::<f64>() < if responded { 0.85 } else { 0.3 };
        let teacher = responded && rng.random::<f64>() < 0.9;
        // About 1% item nonresponse on each score, half coded -9.
        let item = |rng: &mut rand_chacha::ChaCha20Rng, v: f64| -> String {
            let u: f64 = rng.random();
            if u < 0.005 {
                SENTINEL.to_string()
            } else if u < 0.01 {
                String::new()
            } else {
                format!("{:.2}", v)
            }
        };
        let (read, math) = if responded {
            (item(&mut rng, c.read), item(&mut rng, c.math))
        } else {
            (String::new(), String::new())
        };
        c.cells.push(read);
        c.cells.push(math);
        c.cells.push(if parent { format!("{:.1}", c.parent_income) } else { String::new() });
        c.cells.push(if teacher { format!("{:.2}", c.teacher_report) } else { String::new() });
        rows.push(c.cells);
    }

    let schema = schema();
    let header = schema.iter().map(|c| c.name.clone()).collect();
    Ok(SyntheticSurvey {
        schema,
        header,
        rows,
    })
}

#[cfg(test)]
fn corr(a: &[f64], b: &[f64]) -> f64 {
    crate::stats::pearson(a, b).unwrap()
}
