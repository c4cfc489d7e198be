//! Greedy binary regression/classification tree used to screen two-way
//! interactions: every (ancestor split, descendant split) column pair is a
//! candidate interaction for the regression models.

use alloc::vec::Vec;

use super::design::complete_rows;
use crate::dataset::RectDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub column: usize,
    /// Rows with value <= threshold go left.
    pub threshold: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub n: usize,
    pub depth: usize,
    pub prediction: f64,
    pub impurity: f64,
    pub split: Option<Split>,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    /// Node 0 is the root; children follow in pre-order.
    pub nodes: Vec<TreeNode>,
    /// Whether Gini impurity (binary response) was used.
    pub binary: bool,
    /// (ancestor column, descendant column) pairs in discovery order.
    pub interaction_pairs: Vec<(usize, usize)>,
}

impl Tree {
    pub fn leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.split.is_none()).count()
    }
}

/// Node impurity scaled by node size: SSE, or n·Gini for 0/1 responses.
fn impurity(sum: f64, sum_sq: f64, n: usize, binary: bool) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    if binary {
        let p = sum / nf;
        nf * 2.0 * p * (1.0 - p)
    } else {
        (sum_sq - sum * sum / nf).max(0.0)
    }
}

struct Grower<'a> {
    d: &'a RectDataset,
    y: Vec<f64>,
    candidates: &'a [usize],
    max_depth: usize,
    min_node: usize,
    binary: bool,
    nodes: Vec<TreeNode>,
}

impl Grower<'_> {
    fn best_split(&self, rows: &[usize], parent_impurity: f64) -> Option<Split> {
        let mut best: Option<Split> = None;
        let tie = 1e-12 * parent_impurity.max(1e-300);
        for &col in self.candidates {
            let mut pairs: Vec<(f64, f64)> = rows
                .iter()
                .map(|&r| (self.d.value(r, col).unwrap(), self.y[r]))
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let total: f64 = pairs.iter().map(|p| p.1).sum();
            let total_sq: f64 = pairs.iter().map(|p| p.1 * p.1).sum();
            let (mut ls, mut lsq) = (0.0, 0.0);
            for i in 0..pairs.len() - 1 {
                ls += pairs[i].1;
                lsq += pairs[i].1 * pairs[i].1;
                if pairs[i].0 == pairs[i + 1].0 {
                    continue;
                }
                let nl = i + 1;
                let nr = pairs.len() - nl;
                if nl < self.min_node || nr < self.min_node {
                    continue;
                }
                let child = impurity(ls, lsq, nl, self.binary)
                    + impurity(total - ls, total_sq - lsq, nr, self.binary);
                let gain = parent_impurity - child;
                if gain <= tie {
                    continue;
                }
                let threshold = 0.5 * (pairs[i].0 + pairs[i + 1].0);
                if best.is_none_or(|b| gain > b.gain + tie) {
                    best = Some(Split {
                        column: col,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize, parent: Option<usize>) -> usize {
        let n = rows.len();
        let sum: f64 = rows.iter().map(|&r| self.y[r]).sum();
        let sum_sq: f64 = rows.iter().map(|&r| self.y[r] * self.y[r]).sum();
        let imp = impurity(sum, sum_sq, n, self.binary);
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            n,
            depth,
            prediction: sum / n as f64,
            impurity: imp,
            split: None,
            left: None,
            right: None,
            parent,
        });
        if depth >= self.max_depth || n < 2 || imp <= 0.0 {
            return id;
        }
        let Some(split) = self.best_split(&rows, imp) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&i| self.d.value(i, split.column).unwrap() <= split.threshold);
        self.nodes[id].split = Some(split);
        let left = self.grow(l, depth + 1, Some(id));
        let right = self.grow(r, depth + 1, Some(id));
        self.nodes[id].left = Some(left);
        self.nodes[id].right = Some(right);
        id
    }
}

/// Grows a tree on the complete-case rows; `min_node` is the smallest
/// allowed child size. Ties between splits go to the lowest column index,
/// then the lowest threshold.
pub fn grow_tree(
    d: &RectDataset,
    rows: &[usize],
    response: usize,
    candidates: &[usize],
    max_depth: usize,
    min_node: usize,
) -> Result<Tree> {
    if max_depth < 1 {
        return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
    }
    let mut cols = candidates.to_vec();
    cols.push(response);
    let used = complete_rows(d, rows, &cols);
    if used.is_empty() {
        return Err(Error::NoUsableRows);
    }
    let mut y = alloc::vec![0.0; d.n_rows()];
    for &r in &used {
        y[r] = d.value(r, response).unwrap();
    }
    let binary = used.iter().all(|&r| y[r] == 0.0 || y[r] == 1.0);
    let mut sorted_candidates = candidates.to_vec();
    sorted_candidates.sort_unstable();
    sorted_candidates.dedup();
    let mut g = Grower {
        d,
        y,
        candidates: &sorted_candidates,
        max_depth,
        min_node: min_node.max(1),
        binary,
        nodes: Vec::new(),
    };
    g.grow(used, 0, None);
    let nodes = g.nodes;

    let mut interaction_pairs = Vec::new();
    for node in &nodes {
        let Some(split) = node.split else { continue };
        let mut anc = node.parent;
        while let Some(a) = anc {
            let ac = nodes[a].split.expect("ancestors are split nodes").column;
            if ac != split.column && !interaction_pairs.contains(&(ac, split.column)) {
                interaction_pairs.push((ac, split.column));
            }
            anc = nodes[a].parent;
        }
    }
    Ok(Tree {
        nodes,
        binary,
        interaction_pairs,
    })
}
