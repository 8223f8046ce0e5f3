use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::tree::{grow, ColumnChoice, DecisionTree, TreeParams};
use super::{FeatureRow, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Columns offered at each node; `None` means `ceil(sqrt(F))`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            features_per_split: None,
            bootstrap: true,
            seed: 1,
            tree: TreeParams::default(),
        }
    }
}

impl ForestParams {
    pub fn resolved_features(&self, n_features: usize) -> usize {
        self.features_per_split
            .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
            .clamp(1, n_features.max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub tree_seeds: Vec<u64>,
    pub features_per_split: usize,
    pub n_features: usize,
}

impl RandomForest {
    /// Fraction of trees' leaf spam probability, averaged over trees.
    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::SchemaMismatch(format!(
                "row has {} values, model expects {}",
                row.len(),
                self.n_features
            )));
        }
        let sum: f64 = self.trees.iter().map(|t| t.proba_unchecked(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }
}

pub fn train_forest(rows: &[FeatureRow], params: ForestParams) -> Result<RandomForest> {
    if rows.is_empty() {
        return Err(Error::Empty("training rows"));
    }
    if params.n_trees == 0 {
        return Err(Error::InvalidArgument("a forest needs at least one tree".into()));
    }
    let width = rows[0].values.len();
    if rows.iter().any(|r| r.values.len() != width) {
        return Err(Error::SchemaMismatch("rows have differing widths".into()));
    }
    let m = Matrix::from_rows(width, rows);
    let n = m.n_rows();
    let per_split = params.resolved_features(width);

    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let tree_seeds: Vec<u64> = (0..params.n_trees).map(|_| master.random()).collect();

    let trees: Vec<DecisionTree> = tree_seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let sample: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let choice = if per_split >= width {
                ColumnChoice::All
            } else {
                ColumnChoice::Random {
                    per_split,
                    rng: &mut rng,
                }
            };
            grow(&m, sample, params.tree, choice)
        })
        .collect();

    Ok(RandomForest {
        trees,
        tree_seeds,
        features_per_split: per_split,
        n_features: width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{train_tree, Node};
    use crate::labels::Label;

    fn rows(seed: u64, n: usize) -> Vec<FeatureRow> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let spam = rng.random_bool(0.4);
                let shift = if spam { 0.6 } else { 0.0 };
                FeatureRow {
                    user: i as u64,
                    values: (0..6).map(|k| rng.random::<f64>() + shift * (k % 2) as f64).collect(),
                    label: if spam { Label::Spammer } else { Label::Legitimate },
                }
            })
            .collect()
    }

    #[test]
    fn default_feature_count_is_ceil_sqrt() {
        let p = ForestParams::default();
        assert_eq!(p.resolved_features(18), 5);
        assert_eq!(p.resolved_features(16), 4);
        assert_eq!(p.resolved_features(2), 2);
        assert_eq!(p.resolved_features(1), 1);
    }

    #[test]
    fn one_full_tree_without_bootstrap_is_a_plain_tree() {
        let data = rows(1, 200);
        let params = ForestParams {
            n_trees: 1,
            features_per_split: Some(6),
            bootstrap: false,
            seed: 5,
            tree: TreeParams::default(),
        };
        let f = train_forest(&data, params).unwrap();
        let t = train_tree(&data, TreeParams::default()).unwrap();
        assert_eq!(f.trees[0], t);
        for r in &data {
            assert_eq!(f.predict_proba(&r.values).unwrap(), t.predict_proba(&r.values).unwrap());
        }
    }

    #[test]
    fn same_seed_same_forest() {
        let data = rows(2, 150);
        let p = ForestParams {
            n_trees: 20,
            seed: 9,
            ..ForestParams::default()
        };
        assert_eq!(train_forest(&data, p).unwrap(), train_forest(&data, p).unwrap());
        let other = train_forest(&data, ForestParams { seed: 10, ..p }).unwrap();
        assert_ne!(train_forest(&data, p).unwrap().tree_seeds, other.tree_seeds);
    }

    #[test]
    fn probability_is_mean_of_trees() {
        let data = rows(3, 120);
        let f = train_forest(
            &data,
            ForestParams {
                n_trees: 7,
                ..ForestParams::default()
            },
        )
        .unwrap();
        for r in data.iter().take(30) {
            let mut acc = 0.0;
            for t in &f.trees {
                acc += t.predict_proba(&r.values).unwrap();
            }
            let want = acc / 7.0;
            assert!((f.predict_proba(&r.values).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn two_disagreeing_trees_average_to_half() {
        let leaf = |spam, legit| DecisionTree {
            nodes: vec![Node::Leaf { spam, legit }],
            n_features: 1,
            params: TreeParams::default(),
        };
        let f = RandomForest {
            trees: vec![leaf(3, 0), leaf(0, 3)],
            tree_seeds: vec![0, 1],
            features_per_split: 1,
            n_features: 1,
        };
        assert_eq!(f.predict_proba(&[0.0]).unwrap(), 0.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(train_forest(&[], ForestParams::default()).is_err());
        let data = rows(4, 10);
        let p = ForestParams {
            n_trees: 0,
            ..ForestParams::default()
        };
        assert!(train_forest(&data, p).is_err());
    }
}
