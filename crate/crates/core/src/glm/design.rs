//! Model terms and their expansion into design matrices.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::linalg::Matrix;
use crate::dataset::RectDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Main(usize),
    Interaction(usize, usize),
}

impl Term {
    pub fn columns(&self) -> Vec<usize> {
        match *self {
            Term::Main(a) => alloc::vec![a],
            Term::Interaction(a, b) => alloc::vec![a, b],
        }
    }

    pub fn label(&self, d: &RectDataset) -> String {
        match *self {
            Term::Main(a) => d.column(a).name().to_string(),
            Term::Interaction(a, b) => {
                format!("{}:{}", d.column(a).name(), d.column(b).name())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignMatrixSpec {
    pub terms: Vec<Term>,
    pub intercept: bool,
}

impl DesignMatrixSpec {
    pub fn new(terms: Vec<Term>) -> Self {
        DesignMatrixSpec {
            terms,
            intercept: true,
        }
    }

    pub fn intercept_only() -> Self {
        Self::new(Vec::new())
    }

    pub fn columns(&self) -> Vec<usize> {
        let mut cols: Vec<usize> = self.terms.iter().flat_map(Term::columns).collect();
        cols.sort_unstable();
        cols.dedup();
        cols
    }

    pub fn with_term(&self, t: Term) -> Self {
        let mut s = self.clone();
        s.terms.push(t);
        s
    }
}

/// Rows of `rows` where every listed column is observed.
pub fn complete_rows(d: &RectDataset, rows: &[usize], columns: &[usize]) -> Vec<usize> {
    rows.iter()
        .copied()
        .filter(|&i| columns.iter().all(|&j| d.is_observed(i, j)))
        .collect()
}

/// A design spec bound to the categorical levels seen at fit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedDesign {
    pub spec: DesignMatrixSpec,
    /// For each categorical column used: level codes seen when fitting.
    /// The first one is the reference and gets no indicator.
    pub levels: BTreeMap<usize, Vec<u32>>,
    /// One name per expanded column.
    pub names: Vec<String>,
}

impl FittedDesign {
    /// Learns the categorical encodings on `rows`, which must be complete.
    pub fn learn(d: &RectDataset, spec: &DesignMatrixSpec, rows: &[usize]) -> FittedDesign {
        let mut levels = BTreeMap::new();
        for j in spec.columns() {
            let col = d.column(j);
            if col.is_categorical() {
                let mut seen: Vec<u32> = rows.iter().filter_map(|&i| col.code(i)).collect();
                seen.sort_unstable();
                seen.dedup();
                levels.insert(j, seen);
            }
        }
        let mut fd = FittedDesign {
            spec: spec.clone(),
            levels,
            names: Vec::new(),
        };
        fd.names = fd.column_names(d);
        fd
    }

    fn block_names(&self, d: &RectDataset, col: usize) -> Vec<String> {
        let c = d.column(col);
        match self.levels.get(&col) {
            Some(seen) => seen
                .iter()
                .skip(1)
                .map(|&code| format!("{}[{}]", c.name(), c.levels()[code as usize]))
                .collect(),
            None => alloc::vec![c.name().to_string()],
        }
    }

    fn column_names(&self, d: &RectDataset) -> Vec<String> {
        let mut names = Vec::new();
        if self.spec.intercept {
            names.push("(Intercept)".to_string());
        }
        for t in &self.spec.terms {
            match *t {
                Term::Main(a) => names.extend(self.block_names(d, a)),
                Term::Interaction(a, b) => {
                    let na = self.block_names(d, a);
                    let nb = self.block_names(d, b);
                    for x in &na {
                        for y in &nb {
                            names.push(format!("{x}:{y}"));
                        }
                    }
                }
            }
        }
        names
    }

    pub fn width(&self) -> usize {
        self.names.len()
    }

    fn block(&self, d: &RectDataset, col: usize, row: usize) -> Result<Vec<f64>> {
        let c = d.column(col);
        if !c.observed[row] {
            return Err(Error::MissingPredictor {
                column: c.name().to_string(),
                row: row + 1,
            });
        }
        match self.levels.get(&col) {
            Some(seen) => {
                let code = c.code(row).expect("observed categorical cell");
                if !seen.contains(&code) {
                    return Err(Error::UnseenLevel {
                        column: c.name().to_string(),
                        level: c.levels()[code as usize].clone(),
                    });
                }
                Ok(seen
                    .iter()
                    .skip(1)
                    .map(|&l| if l == code { 1.0 } else { 0.0 })
                    .collect())
            }
            None => Ok(alloc::vec![c.value(row).expect("observed cell")]),
        }
    }

    /// Expanded design matrix for `rows`.
    pub fn matrix(&self, d: &RectDataset, rows: &[usize]) -> Result<Matrix> {
        let mut m = Matrix::zeros(rows.len(), self.width());
        for (r, &row) in rows.iter().enumerate() {
            let mut j = 0;
            if self.spec.intercept {
                m.set(r, 0, 1.0);
                j = 1;
            }
            for t in &self.spec.terms {
                match *t {
                    Term::Main(a) => {
                        for v in self.block(d, a, row)? {
                            m.set(r, j, v);
                            j += 1;
                        }
                    }
                    Term::Interaction(a, b) => {
                        let ba = self.block(d, a, row)?;
                        let bb = self.block(d, b, row)?;
                        for x in &ba {
                            for y in &bb {
                                m.set(r, j, x * y);
                                j += 1;
                            }
                        }
                    }
                }
            }
        }
        Ok(m)
    }
}
