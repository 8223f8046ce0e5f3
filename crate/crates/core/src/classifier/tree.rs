use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::entropy::scan_sorted;
use super::{FeatureRow, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Minimum rows on each side of a split.
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_leaf: 2,
            max_depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    /// Rows with `value <= threshold` go left.
    Split {
        column: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf { spam: u32, legit: u32 },
}

/// Binary tree over continuous features; nodes live in an arena with the
/// root at index 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
    pub params: TreeParams,
}

impl DecisionTree {
    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::SchemaMismatch(format!(
                "row has {} values, model expects {}",
                row.len(),
                self.n_features
            )));
        }
        Ok(self.proba_unchecked(row))
    }

    pub(crate) fn proba_unchecked(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    column,
                    threshold,
                    left,
                    right,
                } => i = if row[*column] <= *threshold { *left } else { *right },
                Node::Leaf { spam, legit } => return *spam as f64 / (*spam + *legit) as f64,
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

/// How columns are offered at each node.
pub(crate) enum ColumnChoice<'r, R: Rng> {
    All,
    Random { per_split: usize, rng: &'r mut R },
}

pub(crate) fn grow<R: Rng>(
    m: &Matrix,
    rows: Vec<usize>,
    params: TreeParams,
    mut columns: ColumnChoice<'_, R>,
) -> DecisionTree {
    let min_leaf = params.min_leaf.max(1);
    let n_cols = m.n_cols();
    let mut nodes: Vec<Node> = vec![Node::Leaf { spam: 0, legit: 0 }];
    // (node slot, rows, depth)
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(0, rows, 0)];
    let mut pairs: Vec<(f64, bool)> = Vec::new();

    while let Some((slot, idx, depth)) = stack.pop() {
        let spam = idx.iter().filter(|&&i| m.spam[i]).count();
        let legit = idx.len() - spam;
        let leaf = Node::Leaf {
            spam: spam as u32,
            legit: legit as u32,
        };
        let pure = spam == 0 || legit == 0;
        let too_small = idx.len() < 2 * min_leaf;
        let too_deep = params.max_depth.is_some_and(|d| depth >= d);
        if pure || too_small || too_deep {
            nodes[slot] = leaf;
            continue;
        }

        let candidates: Vec<usize> = match &mut columns {
            ColumnChoice::All => (0..n_cols).collect(),
            ColumnChoice::Random { per_split, rng } => {
                let k = (*per_split).clamp(1, n_cols);
                let mut c = rand::seq::index::sample(*rng, n_cols, k).into_vec();
                c.sort_unstable();
                c
            }
        };

        // Zero-gain splits are taken too: an impure node whose every split
        // is uninformative on its own (XOR) can still separate one level down.
        let mut best: Option<(usize, f64, f64)> = None;
        for &c in &candidates {
            pairs.clear();
            pairs.extend(idx.iter().map(|&i| (m.cols[c][i], m.spam[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            if let Some(s) = scan_sorted(&pairs, min_leaf) {
                if best.is_none_or(|(_, _, g)| s.gain > g) {
                    best = Some((c, s.threshold, s.gain));
                }
            }
        }

        let Some((column, threshold, _)) = best else {
            nodes[slot] = leaf;
            continue;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| m.cols[column][i] <= threshold);
        let left = nodes.len();
        let right = left + 1;
        nodes.push(Node::Leaf { spam: 0, legit: 0 });
        nodes.push(Node::Leaf { spam: 0, legit: 0 });
        nodes[slot] = Node::Split {
            column,
            threshold,
            left,
            right,
        };
        // Right first so the left subtree is expanded first.
        stack.push((right, right_rows, depth + 1));
        stack.push((left, left_rows, depth + 1));
    }

    DecisionTree {
        nodes,
        n_features: n_cols,
        params,
    }
}

/// Greedy information-gain tree over every column.
pub fn train_tree(rows: &[FeatureRow], params: TreeParams) -> Result<DecisionTree> {
    if rows.is_empty() {
        return Err(Error::Empty("training rows"));
    }
    let width = rows[0].values.len();
    if rows.iter().any(|r| r.values.len() != width) {
        return Err(Error::SchemaMismatch("rows have differing widths".into()));
    }
    let m = Matrix::from_rows(width, rows);
    let all: Vec<usize> = (0..m.n_rows()).collect();
    Ok(grow::<rand_chacha::ChaCha8Rng>(&m, all, params, ColumnChoice::All))
}
