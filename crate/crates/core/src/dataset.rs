//! Rectangular survey data with an explicit missingness mask, and the
//! response-pattern summaries computed from it.
//!
//! Every column keeps its parsed values next to an `observed` vector; a
//! cell is missing exactly when its mask entry is `false`. Missing
//! categorical values are never a level of their own.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Outcome,
    Auxiliary,
    Weight,
    BaseWeight,
    Psu,
    Stratum,
    Subgroup,
    ResponseIndicator,
    Id,
}

impl Role {
    /// Roles allowed at most once per dataset.
    fn is_singular(self) -> bool {
        matches!(
            self,
            Role::Weight | Role::Psu | Role::Stratum | Role::ResponseIndicator
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measurement {
    #[default]
    Continuous,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ColumnSpec {
    pub name: String,
    pub role: Role,
    #[serde(default)]
    pub measurement: Measurement,
    /// Raw values mapped to missing, e.g. `"-9"`.
    #[serde(default)]
    pub missing_sentinels: Vec<String>,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, role: Role, measurement: Measurement) -> Self {
        ColumnSpec {
            name: name.into(),
            role,
            measurement,
            missing_sentinels: Vec::new(),
        }
    }

    pub fn continuous(name: impl Into<String>, role: Role) -> Self {
        Self::new(name, role, Measurement::Continuous)
    }

    pub fn categorical(name: impl Into<String>, role: Role) -> Self {
        Self::new(name, role, Measurement::Categorical)
    }

    pub fn with_sentinels<I, S>(mut self, sentinels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.missing_sentinels = sentinels.into_iter().map(Into::into).collect();
        self
    }

    fn is_sentinel(&self, raw: &str) -> bool {
        self.missing_sentinels.iter().any(|s| {
            let s = s.trim();
            if s == raw {
                return true;
            }
            match (s.parse::<f64>(), raw.parse::<f64>()) {
                (Ok(a), Ok(b)) => a == b,
                _ => false,
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Continuous(Vec<f64>),
    /// Codes index into `levels`; level 0 is the reference level.
    Categorical { levels: Vec<String>, codes: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub spec: ColumnSpec,
    pub data: ColumnData,
    pub observed: Vec<bool>,
}

impl Column {
    pub fn continuous(spec: ColumnSpec, values: Vec<Option<f64>>) -> Self {
        let observed = values.iter().map(|v| v.is_some()).collect();
        // missing cells hold 0 so equality compares only observed data
        let data = values.into_iter().map(|v| v.unwrap_or(0.0)).collect();
        Column {
            spec,
            data: ColumnData::Continuous(data),
            observed,
        }
    }

    /// Builds a categorical column; levels are sorted (numerically when every
    /// level reads as a number) so the reference level is deterministic.
    pub fn categorical<S: AsRef<str>>(spec: ColumnSpec, values: &[Option<S>]) -> Self {
        let mut levels: Vec<String> = values
            .iter()
            .flatten()
            .map(|s| s.as_ref().to_string())
            .collect();
        sort_levels(&mut levels);
        levels.dedup();
        let index: BTreeMap<&str, u32> = levels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let codes = values
            .iter()
            .map(|v| v.as_ref().map_or(0, |s| index[s.as_ref()]))
            .collect();
        let observed = values.iter().map(|v| v.is_some()).collect();
        Column {
            spec,
            data: ColumnData::Categorical { levels, codes },
            observed,
        }
    }

    pub fn len(&self) -> usize {
        self.observed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.data, ColumnData::Categorical { .. })
    }

    /// Numeric value of a cell; categorical cells yield their level code.
    pub fn value(&self, row: usize) -> Option<f64> {
        if !self.observed[row] {
            return None;
        }
        Some(match &self.data {
            ColumnData::Continuous(v) => v[row],
            ColumnData::Categorical { codes, .. } => codes[row] as f64,
        })
    }

    pub fn code(&self, row: usize) -> Option<u32> {
        match &self.data {
            ColumnData::Categorical { codes, .. } if self.observed[row] => Some(codes[row]),
            _ => None,
        }
    }

    pub fn levels(&self) -> &[String] {
        match &self.data {
            ColumnData::Categorical { levels, .. } => levels,
            ColumnData::Continuous(_) => &[],
        }
    }

    /// Display form of a cell (level name or number).
    pub fn display(&self, row: usize) -> Option<String> {
        if !self.observed[row] {
            return None;
        }
        Some(match &self.data {
            ColumnData::Continuous(v) => format!("{}", v[row]),
            ColumnData::Categorical { levels, codes } => levels[codes[row] as usize].clone(),
        })
    }

    pub fn missing_count(&self) -> usize {
        self.observed.iter().filter(|o| !**o).count()
    }
}

fn sort_levels(levels: &mut [String]) {
    let numeric: Option<Vec<f64>> = levels.iter().map(|l| l.trim().parse().ok()).collect();
    if numeric.is_some() {
        levels.sort_by(|a, b| {
            let x: f64 = a.trim().parse().unwrap();
            let y: f64 = b.trim().parse().unwrap();
            x.total_cmp(&y).then_with(|| a.cmp(b))
        });
    } else {
        levels.sort();
    }
}

/// An n × p table of cells plus its observed/missing mask.
#[derive(Debug, Clone, PartialEq)]
pub struct RectDataset {
    n: usize,
    columns: Vec<Column>,
}

impl RectDataset {
    pub fn from_columns(columns: Vec<Column>) -> Result<Self> {
        let n = columns.first().map_or(0, Column::len);
        for c in &columns {
            if c.len() != n {
                return Err(Error::Schema(format!(
                    "column {} has {} rows, expected {}",
                    c.name(),
                    c.len(),
                    n
                )));
            }
        }
        validate_roles(columns.iter().map(|c| &c.spec))?;
        let d = RectDataset { n, columns };
        d.check_response_indicator()?;
        Ok(d)
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, idx: usize) -> &Column {
        &self.columns[idx]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name() == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.column_index(name)
            .ok_or_else(|| Error::Schema(format!("unknown column {name}")))
    }

    pub fn columns_with_role(&self, role: Role) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&j| self.columns[j].spec.role == role)
            .collect()
    }

    pub fn value(&self, row: usize, col: usize) -> Option<f64> {
        self.columns[col].value(row)
    }

    pub fn is_observed(&self, row: usize, col: usize) -> bool {
        self.columns[col].observed[row]
    }

    /// Mask row: `true` where observed.
    pub fn mask_row(&self, row: usize) -> Vec<bool> {
        self.columns.iter().map(|c| c.observed[row]).collect()
    }

    /// Column values with missing cells as `None`.
    pub fn values(&self, col: usize) -> Vec<Option<f64>> {
        (0..self.n).map(|i| self.value(i, col)).collect()
    }

    pub fn all_rows(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    /// Appends a column, checking length and role constraints.
    pub fn push_column(&mut self, column: Column) -> Result<()> {
        if column.len() != self.n && !self.columns.is_empty() {
            return Err(Error::Schema(format!(
                "column {} has {} rows, expected {}",
                column.name(),
                column.len(),
                self.n
            )));
        }
        if self.column_index(column.name()).is_some() {
            return Err(Error::Schema(format!("duplicate column {}", column.name())));
        }
        if self.columns.is_empty() {
            self.n = column.len();
        }
        self.columns.push(column);
        validate_roles(self.columns.iter().map(|c| &c.spec))?;
        self.check_response_indicator()
    }

    fn check_response_indicator(&self) -> Result<()> {
        for col in &self.columns {
            if col.spec.role != Role::ResponseIndicator {
                continue;
            }
            for row in 0..self.n {
                match col.value(row) {
                    Some(v) if v == 0.0 || v == 1.0 => {}
                    _ if col.is_categorical() => {
                        let ok = col
                            .display(row)
                            .is_some_and(|l| l.trim() == "0" || l.trim() == "1");
                        if !ok {
                            return Err(Error::ResponseIndicator {
                                row: row + 1,
                                column: col.name().to_string(),
                            });
                        }
                    }
                    _ => {
                        return Err(Error::ResponseIndicator {
                            row: row + 1,
                            column: col.name().to_string(),
                        })
                    }
                }
            }
        }
        Ok(())
    }

    /// 0/1 response indicator as booleans.
    pub fn indicator(&self, col: usize) -> Result<Vec<bool>> {
        let c = &self.columns[col];
        (0..self.n)
            .map(|row| {
                let v = if c.is_categorical() {
                    c.display(row).and_then(|l| l.trim().parse::<f64>().ok())
                } else {
                    c.value(row)
                };
                match v {
                    Some(x) if x == 1.0 => Ok(true),
                    Some(x) if x == 0.0 => Ok(false),
                    _ => Err(Error::ResponseIndicator {
                        row: row + 1,
                        column: c.name().to_string(),
                    }),
                }
            })
            .collect()
    }
}

fn validate_roles<'a>(specs: impl Iterator<Item = &'a ColumnSpec>) -> Result<()> {
    let mut seen: Vec<(Role, &str)> = Vec::new();
    let mut names: Vec<&str> = Vec::new();
    for s in specs {
        if names.contains(&s.name.as_str()) {
            return Err(Error::Schema(format!("duplicate column {}", s.name)));
        }
        names.push(&s.name);
        if s.role.is_singular() {
            if let Some((_, other)) = seen.iter().find(|(r, _)| *r == s.role) {
                return Err(Error::Schema(format!(
                    "columns {other} and {} both have role {:?}; at most one allowed",
                    s.name, s.role
                )));
            }
            seen.push((s.role, &s.name));
        }
    }
    Ok(())
}

/// Row-by-row construction from raw text fields.
///
/// Header names must match the schema exactly (in any order). Rows are
/// numbered from 1 in errors.
#[derive(Debug)]
pub struct TableBuilder {
    schema: Vec<ColumnSpec>,
    /// For each schema column, its position in the raw row.
    positions: Vec<usize>,
    width: usize,
    cells: Vec<Vec<Option<String>>>,
    numbers: Vec<Vec<Option<f64>>>,
    rows: usize,
}

impl TableBuilder {
    pub fn new<S: AsRef<str>>(schema: Vec<ColumnSpec>, header: &[S]) -> Result<Self> {
        validate_roles(schema.iter())?;
        for h in header {
            let h = h.as_ref().trim();
            if !schema.iter().any(|s| s.name == h) {
                return Err(Error::Schema(format!("unknown column {h} in header")));
            }
        }
        let mut positions = Vec::with_capacity(schema.len());
        for s in &schema {
            let pos = header
                .iter()
                .position(|h| h.as_ref().trim() == s.name)
                .ok_or_else(|| Error::Schema(format!("column {} missing from header", s.name)))?;
            positions.push(pos);
        }
        let p = schema.len();
        Ok(TableBuilder {
            schema,
            positions,
            width: header.len(),
            cells: vec![Vec::new(); p],
            numbers: vec![Vec::new(); p],
            rows: 0,
        })
    }

    pub fn push_row<S: AsRef<str>>(&mut self, fields: &[S]) -> Result<()> {
        let row = self.rows + 1;
        if fields.len() != self.width {
            return Err(Error::RaggedRow {
                row,
                expected: self.width,
                found: fields.len(),
            });
        }
        for (j, spec) in self.schema.iter().enumerate() {
            let raw = fields[self.positions[j]].as_ref().trim();
            let missing = raw.is_empty() || spec.is_sentinel(raw);
            match spec.measurement {
                Measurement::Continuous => {
                    let v = if missing {
                        None
                    } else {
                        Some(raw.parse::<f64>().map_err(|_| Error::Cell {
                            row,
                            column: spec.name.clone(),
                            value: raw.to_string(),
                        })?)
                    };
                    self.numbers[j].push(v);
                }
                Measurement::Categorical => {
                    self.cells[j].push(if missing { None } else { Some(raw.to_string()) });
                }
            }
        }
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(self) -> Result<RectDataset> {
        let TableBuilder {
            schema,
            cells,
            numbers,
            ..
        } = self;
        let columns = schema
            .into_iter()
            .zip(cells.into_iter().zip(numbers))
            .map(|(spec, (cells, numbers))| match spec.measurement {
                Measurement::Continuous => Column::continuous(spec, numbers),
                Measurement::Categorical => Column::categorical(spec, &cells),
            })
            .collect();
        RectDataset::from_columns(columns)
    }
}

/// One distinct row of the response-indicator matrix and its frequency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternClass {
    pub pattern: Vec<bool>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponsePattern {
    pub column_names: Vec<String>,
    /// Response indicators, row-major n × p; `true` = observed.
    pub r: Vec<Vec<bool>>,
    /// Distinct patterns, most frequent first.
    pub classes: Vec<PatternClass>,
    pub monotone: bool,
    /// Missing fraction per column.
    pub missing_rates: Vec<f64>,
}

/// Largest column count checked exhaustively over all permutations.
pub const EXHAUSTIVE_MONOTONE_MAX_P: usize = 6;

pub fn missingness_summary(d: &RectDataset) -> Result<ResponsePattern> {
    if d.n_rows() == 0 {
        return Err(Error::Empty("dataset"));
    }
    let n = d.n_rows();
    let r: Vec<Vec<bool>> = (0..n).map(|i| d.mask_row(i)).collect();
    let missing_rates = d
        .columns()
        .iter()
        .map(|c| c.missing_count() as f64 / n as f64)
        .collect();
    let mut counts: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
    for row in &r {
        *counts.entry(row.clone()).or_default() += 1;
    }
    let mut classes: Vec<PatternClass> = counts
        .into_iter()
        .map(|(pattern, count)| PatternClass { pattern, count })
        .collect();
    // count descending; patterns with more observed cells first on ties
    classes.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| b.pattern.cmp(&a.pattern)));
    let patterns: Vec<&[bool]> = classes.iter().map(|c| c.pattern.as_slice()).collect();
    let monotone = is_monotone(&patterns, d.n_cols());
    Ok(ResponsePattern {
        column_names: d.columns().iter().map(|c| c.name().to_string()).collect(),
        r,
        classes,
        monotone,
        missing_rates,
    })
}

/// True when some ordering of the columns makes every pattern a run of
/// observed cells followed by a run of missing cells.
pub fn is_monotone(patterns: &[&[bool]], p: usize) -> bool {
    if p <= EXHAUSTIVE_MONOTONE_MAX_P {
        monotone_exhaustive(patterns, p)
    } else {
        monotone_greedy(patterns, p)
    }
}

fn staircase_under(patterns: &[&[bool]], order: &[usize]) -> bool {
    patterns.iter().all(|pat| {
        let mut seen_missing = false;
        for &j in order {
            if pat[j] {
                if seen_missing {
                    return false;
                }
            } else {
                seen_missing = true;
            }
        }
        true
    })
}

pub fn monotone_exhaustive(patterns: &[&[bool]], p: usize) -> bool {
    let mut order: Vec<usize> = (0..p).collect();
    // Heap's algorithm
    let mut c = vec![0usize; p];
    if staircase_under(patterns, &order) {
        return true;
    }
    let mut i = 0;
    while i < p {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            if staircase_under(patterns, &order) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}

/// Orders columns by ascending missingness, then verifies the staircase.
pub fn monotone_greedy(patterns: &[&[bool]], p: usize) -> bool {
    let mut missing = vec![0usize; p];
    for pat in patterns {
        for (j, &obs) in pat.iter().enumerate() {
            if !obs {
                missing[j] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by_key(|&j| (missing[j], j));
    staircase_under(patterns, &order)
}

/// Joint response across instrument groups: 2^k cells for k groups.
///
/// Cell index bit `i` is set when group `i` responds (all of its columns
/// observed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossPattern {
    pub groups: Vec<Vec<usize>>,
    pub counts: Vec<usize>,
}

impl CrossPattern {
    pub fn count(&self, responding: &[bool]) -> usize {
        let idx = responding
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &r)| acc | ((r as usize) << i));
        self.counts[idx]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn cross_pattern_table(d: &RectDataset, groups: &[Vec<usize>]) -> Result<CrossPattern> {
    if groups.is_empty() {
        return Err(Error::Empty("group set"));
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(Error::Empty("instrument group"));
    }
    if groups.len() > 16 {
        return Err(Error::InvalidArgument(format!(
            "{} groups; at most 16 supported",
            groups.len()
        )));
    }
    if let Some(&bad) = groups.iter().flatten().find(|&&j| j >= d.n_cols()) {
        return Err(Error::Schema(format!("column index {bad} out of range")));
    }
    let mut counts = vec![0usize; 1 << groups.len()];
    for row in 0..d.n_rows() {
        let idx = groups.iter().enumerate().fold(0usize, |acc, (i, g)| {
            let responds = g.iter().all(|&j| d.is_observed(row, j));
            acc | ((responds as usize) << i)
        });
        counts[idx] += 1;
    }
    Ok(CrossPattern {
        groups: groups.to_vec(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(schema: Vec<ColumnSpec>, header: &[&str], rows: &[&[&str]]) -> Result<RectDataset> {
        let mut b = TableBuilder::new(schema, header)?;
        for r in rows {
            b.push_row(r)?;
        }
        b.finish()
    }

    fn num(name: &str) -> ColumnSpec {
        ColumnSpec::continuous(name, Role::Auxiliary)
    }

    #[test]
    fn fully_observed_mask() {
        let d = build(
            vec![num("a"), num("b")],
            &["a", "b"],
            &[&["1", "2"], &["3", "4"], &["5", "6"]],
        )
        .unwrap();
        assert_eq!(d.n_rows(), 3);
        for i in 0..3 {
            assert_eq!(d.mask_row(i), vec![true, true]);
        }
        let s = missingness_summary(&d).unwrap();
        assert_eq!(s.missing_rates, vec![0.0, 0.0]);
        assert_eq!(s.classes.len(), 1);
        assert!(s.monotone);
    }

    #[test]
    fn sentinel_maps_to_missing() {
        let y = ColumnSpec::continuous("y", Role::Outcome).with_sentinels(["-9"]);
        let d = build(vec![y], &["y"], &[&["3.5"], &["-9"], &["-9.0"], &["2"]]).unwrap();
        assert_eq!(d.mask_row(1), vec![false]);
        assert_eq!(d.mask_row(2), vec![false]);
        assert_eq!(d.value(0, 0), Some(3.5));
    }

    #[test]
    fn empty_field_is_missing() {
        // cell-by-cell expectation for the fixture below
        let d = build(
            vec![num("a"), num("b")],
            &["a", "b"],
            &[&["1", ""], &["", "2"], &[" 3 ", "4"]],
        )
        .unwrap();
        let expected = [[true, false], [false, true], [true, true]];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(d.mask_row(i), e.to_vec());
        }
        assert_eq!(d.value(2, 0), Some(3.0));
    }

    #[test]
    fn load_errors() {
        let e = build(vec![num("a"), num("b")], &["a", "b"], &[&["1", "2"], &["1"]]).unwrap_err();
        assert_eq!(
            e,
            Error::RaggedRow {
                row: 2,
                expected: 2,
                found: 1
            }
        );
        let e = build(vec![num("a")], &["a", "zzz"], &[]).unwrap_err();
        assert!(matches!(e, Error::Schema(m) if m.contains("zzz")));
        let e = build(vec![num("a")], &["a"], &[&["1"], &["oops"]]).unwrap_err();
        assert_eq!(
            e,
            Error::Cell {
                row: 2,
                column: "a".into(),
                value: "oops".into()
            }
        );
    }

    #[test]
    fn missing_response_indicator_rejected() {
        let r = ColumnSpec::continuous("r", Role::ResponseIndicator);
        let e = build(vec![r.clone()], &["r"], &[&["1"], &[""]]).unwrap_err();
        assert!(matches!(e, Error::ResponseIndicator { row: 2, .. }));
        let e = build(vec![r], &["r"], &[&["1"], &["2"]]).unwrap_err();
        assert!(matches!(e, Error::ResponseIndicator { row: 2, .. }));
    }

    #[test]
    fn singular_roles_enforced() {
        let a = ColumnSpec::continuous("w1", Role::Weight);
        let b = ColumnSpec::continuous("w2", Role::Weight);
        assert!(matches!(
            TableBuilder::new(vec![a, b], &["w1", "w2"]),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn categorical_levels_sorted_numerically() {
        let c = ColumnSpec::categorical("race", Role::Subgroup);
        let d = build(vec![c], &["race"], &[&["10"], &["2"], &[""], &["1"]]).unwrap();
        assert_eq!(d.column(0).levels(), &["1", "2", "10"]);
        assert_eq!(d.column(0).code(0), Some(2));
        assert_eq!(d.column(0).code(2), None);
    }

    fn from_mask(mask: &[&[bool]]) -> RectDataset {
        let p = mask[0].len();
        let cols = (0..p)
            .map(|j| {
                let vals = mask
                    .iter()
                    .map(|r| if r[j] { Some(1.0) } else { None })
                    .collect();
                Column::continuous(num(&format!("v{j}")), vals)
            })
            .collect();
        RectDataset::from_columns(cols).unwrap()
    }

    #[test]
    fn staircase_is_monotone() {
        let t = true;
        let f = false;
        let d = from_mask(&[
            &[t, t, t, t],
            &[t, t, t, f],
            &[t, t, f, f],
            &[t, f, f, f],
            &[t, t, t, t],
        ]);
        let s = missingness_summary(&d).unwrap();
        assert!(s.monotone);
        assert_eq!(s.classes[0].count, 2);
        assert_eq!(s.classes.iter().map(|c| c.count).sum::<usize>(), 5);
    }

    #[test]
    fn swiss_cheese_is_not_monotone() {
        let t = true;
        let f = false;
        // row 1 misses column 1 while observing column 2; row 2 the reverse
        let d = from_mask(&[&[t, f, t, t], &[t, t, f, t], &[t, t, t, t]]);
        assert!(!missingness_summary(&d).unwrap().monotone);
    }

    #[test]
    fn cross_patterns() {
        let t = true;
        let f = false;
        let d = from_mask(&[&[t, t], &[t, f], &[f, f], &[t, t]]);
        let one = cross_pattern_table(&d, &[vec![0]]).unwrap();
        assert_eq!(one.counts, vec![1, 3]);
        // child = col 0, parent = col 1: parent respondents are nested in child
        let two = cross_pattern_table(&d, &[vec![0], vec![1]]).unwrap();
        assert_eq!(two.count(&[false, true]), 0);
        assert_eq!(two.count(&[true, true]), 2);
        assert_eq!(two.total(), 4);
        assert!(cross_pattern_table(&d, &[]).is_err());
        assert!(cross_pattern_table(&d, &[vec![]]).is_err());
    }
}
