//! The bundled synthetic study: an ECLS-like data file plus a ready-to-run
//! configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nrba_core::simlab::synth::{
    ecls_like, SyntheticSurvey, AUXILIARIES, LATE_AUXILIARIES, OUTCOMES,
};

use crate::config::{Benchmark, DesignColumns, MarginConfig, NrbaConfig, TreeScreen};
use crate::error::{NrbaError, Result};
use crate::export::Table;

pub const BUNDLE_DATA: &str = "data.csv";
pub const BUNDLE_CONFIG: &str = "config.toml";

/// Base-weighted category totals over every sampled unit.
fn weighted_totals(s: &SyntheticSurvey, column: &str) -> BTreeMap<String, f64> {
    let pos = |name: &str| s.header.iter().position(|h| h == name).expect("bundle column");
    let (c, w) = (pos(column), pos("base_weight"));
    let mut totals = BTreeMap::new();
    for row in &s.rows {
        let weight: f64 = row[w].parse().expect("numeric base weight");
        *totals.entry(row[c].clone()).or_insert(0.0) += weight;
    }
    totals
}

/// Configuration for the synthetic survey, with paths relative to the
/// directory holding it.
pub fn synthetic_config(s: &SyntheticSurvey, seed: u64) -> NrbaConfig {
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let mut outcomes = names(&OUTCOMES);
    outcomes.extend(names(&["parent_income", "teacher_report"]));
    NrbaConfig {
        input: PathBuf::from(BUNDLE_DATA),
        delimiter: ',',
        columns: s.schema.clone(),
        outcomes,
        auxiliaries: names(&AUXILIARIES),
        late_auxiliaries: names(&LATE_AUXILIARIES),
        interactions: vec![["ses".into(), "parent_edu".into()]],
        interaction_screen: Some(TreeScreen {
            max_depth: 3,
            min_node: 100,
        }),
        response_indicator: "responded".into(),
        prior_stages: Vec::new(),
        subgroups: names(&["race", "school_type"]),
        design: DesignColumns {
            weight: None,
            base_weight: Some("base_weight".into()),
            psu: Some("school".into()),
            stratum: Some("stratum".into()),
        },
        weighting_classes: Vec::new(),
        margins: ["sex", "region"]
            .iter()
            .map(|c| MarginConfig {
                column: c.to_string(),
                targets: weighted_totals(s, c),
            })
            .collect(),
        // Illustrative external estimates for the comparison step.
        benchmarks: vec![
            Benchmark {
                label: "read".into(),
                mean: 50.0,
                se: 0.4,
            },
            Benchmark {
                label: "math".into(),
                mean: 50.0,
                se: 0.4,
            },
        ],
        instrument_groups: [
            ("child", vec!["read", "math"]),
            ("parent", vec!["parent_income"]),
            ("teacher", vec!["teacher_report"]),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), names(&v)))
        .collect(),
        phis: nrba_core::ppmm::DEFAULT_PHIS.to_vec(),
        clamp: [0.01, 0.99],
        histogram_bins: 20,
        output_dir: PathBuf::from("nrba_out"),
        seed,
    }
}

/// Writes `data.csv` and `config.toml` into `dir` and returns the config
/// path.
pub fn write_synthetic_bundle(dir: &Path, n: usize, seed: u64) -> Result<PathBuf> {
    let s = ecls_like(n, seed)?;
    fs::create_dir_all(dir).map_err(|e| NrbaError::io(dir, e))?;
    let mut t = Table::new(s.header.clone());
    for r in &s.rows {
        t.push(r.clone());
    }
    t.write(&dir.join(BUNDLE_DATA))?;
    let cfg = synthetic_config(&s, seed);
    let path = dir.join(BUNDLE_CONFIG);
    fs::write(&path, cfg.to_toml()).map_err(|e| NrbaError::io(&path, e))?;
    Ok(path)
}
