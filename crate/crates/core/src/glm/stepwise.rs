use alloc::format;
use alloc::vec::Vec;

use super::design::{complete_rows, DesignMatrixSpec, Term};
use super::{Family, Fit};
use crate::dataset::RectDataset;
use crate::error::{Error, Result};
use crate::warning::{Warning, WarningCode};

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// `None` for the intercept-only starting model.
    pub added: Option<Term>,
    pub aic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepwiseResult {
    pub spec: DesignMatrixSpec,
    pub path: Vec<StepRecord>,
    pub skipped: Vec<Term>,
    /// The complete-case rows every candidate model was fitted on.
    pub rows: Vec<usize>,
    pub warnings: Vec<Warning>,
}

impl StepwiseResult {
    pub fn final_aic(&self) -> f64 {
        self.path.last().map_or(f64::NAN, |s| s.aic)
    }
}

fn raw_aic(fit: &Fit) -> f64 {
    match fit {
        Fit::Linear(f) => f.aic,
        Fit::Logistic(f) => f.aic,
    }
}

fn retained(fit: &Fit) -> usize {
    match fit {
        Fit::Linear(f) => f.k,
        Fit::Logistic(f) => f.k,
    }
}

/// An interaction may enter only after its component main effects, when
/// those main effects are themselves candidates.
fn eligible(term: Term, model: &[Term], candidates: &[Term]) -> bool {
    match term {
        Term::Main(_) => true,
        Term::Interaction(a, b) => [a, b].iter().all(|&c| {
            let main = Term::Main(c);
            !candidates.contains(&main) || model.contains(&main)
        }),
    }
}

/// Forward selection by AIC from the intercept-only model.
///
/// All fits share one row set: the rows with the response and every
/// candidate column observed. At each step the candidate giving the
/// lowest AIC is added (ties to the earliest candidate); selection stops
/// when no candidate lowers the AIC.
pub fn stepwise_forward(
    d: &RectDataset,
    rows: &[usize],
    response: usize,
    candidates: &[Term],
    family: Family,
) -> Result<StepwiseResult> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate term list"));
    }
    let mut cols: Vec<usize> = candidates.iter().flat_map(Term::columns).collect();
    cols.push(response);
    cols.sort_unstable();
    cols.dedup();
    let cc = complete_rows(d, rows, &cols);
    if cc.is_empty() {
        return Err(Error::NoUsableRows);
    }

    let null_spec = DesignMatrixSpec::intercept_only();
    let null = Fit::fit(d, &null_spec, response, &cc, family)?;
    let null_k = retained(&null);
    let mut warnings = Vec::new();
    let mut skipped = Vec::new();
    let mut usable = Vec::new();
    for &t in candidates {
        match Fit::fit(d, &null_spec.with_term(t), response, &cc, family) {
            Ok(f) if retained(&f) > null_k => usable.push(t),
            Ok(_) => {
                skipped.push(t);
                warnings.push(Warning::new(
                    WarningCode::SkippedTerm,
                    format!("term {} is constant on the complete cases", t.label(d)),
                ));
            }
            Err(e) => {
                skipped.push(t);
                warnings.push(Warning::new(
                    WarningCode::SkippedTerm,
                    format!("term {} cannot be fitted: {e}", t.label(d)),
                ));
            }
        }
    }

    let mut spec = null_spec;
    let mut current = raw_aic(&null);
    let mut path = alloc::vec![StepRecord {
        added: None,
        aic: current,
    }];
    let mut remaining = usable;
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (i, &t) in remaining.iter().enumerate() {
            if !eligible(t, &spec.terms, candidates) {
                continue;
            }
            let fit = Fit::fit(d, &spec.with_term(t), response, &cc, family)?;
            let a = raw_aic(&fit);
            if best.is_none_or(|(_, b)| a < b) {
                best = Some((i, a));
            }
        }
        match best {
            Some((i, a)) if a < current => {
                let t = remaining.remove(i);
                spec.terms.push(t);
                current = a;
                path.push(StepRecord {
                    added: Some(t),
                    aic: a,
                });
            }
            _ => break,
        }
    }
    Ok(StepwiseResult {
        spec,
        path,
        skipped,
        rows: cc,
        warnings,
    })
}
