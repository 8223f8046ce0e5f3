use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::Label;
use crate::metrics::{confusion, ConfusionMatrix};

use super::forest::{train_forest, ForestParams};
use super::model::Model;
use super::tree::{train_tree, TreeParams};
use super::{FeatureRow, FeatureTable};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Algo {
    Tree(TreeParams),
    Forest(ForestParams),
}

impl Algo {
    pub fn name(&self) -> &'static str {
        match self {
            Algo::Tree(_) => "tree",
            Algo::Forest(_) => "forest",
        }
    }

    pub fn train(&self, rows: &[FeatureRow]) -> Result<Model> {
        Ok(match self {
            Algo::Tree(p) => Model::Tree(train_tree(rows, *p)?),
            Algo::Forest(p) => Model::Forest(train_forest(rows, *p)?),
        })
    }
}

/// Fold index for every row. Each class is shuffled on its own and dealt
/// round-robin, so fold class counts differ by at most one.
pub fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; labels.len()];
    let mut offset = 0;
    for class in [Label::Spammer, Label::Legitimate] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < k {
            return Err(Error::InvalidArgument(format!(
                "class {class} has {} rows, fewer than {k} folds",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            fold[i] = (offset + pos) % k;
        }
        offset += idx.len();
    }
    Ok(fold)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvResult {
    pub fold_of: Vec<usize>,
    /// Held-out spam probability for every row, in table order.
    pub scores: Vec<f64>,
    pub predictions: Vec<bool>,
    pub per_fold: Vec<ConfusionMatrix>,
    pub pooled: ConfusionMatrix,
}

/// Predicts every row with a model trained on the other folds. A forest's
/// seed is offset by the fold index.
pub fn cross_validate(table: &FeatureTable, k: usize, algo: Algo, seed: u64) -> Result<CvResult> {
    let labels: Vec<Label> = table.rows.iter().map(|r| r.label).collect();
    let fold_of = stratified_folds(&labels, k, seed)?;
    let mut scores = vec![0.0; table.len()];
    let mut per_fold = Vec::with_capacity(k);

    for f in 0..k {
        let train: Vec<FeatureRow> = table
            .rows
            .iter()
            .zip(&fold_of)
            .filter(|&(_, &fo)| fo != f)
            .map(|(r, _)| r.clone())
            .collect();
        let algo = match algo {
            Algo::Forest(p) => Algo::Forest(ForestParams {
                seed: p.seed.wrapping_add(f as u64),
                ..p
            }),
            a => a,
        };
        let model = algo.train(&train)?;
        let mut pred = Vec::new();
        let mut truth = Vec::new();
        for (i, r) in table.rows.iter().enumerate() {
            if fold_of[i] == f {
                let p = model.predict_proba(&r.values)?;
                scores[i] = p;
                pred.push(p >= 0.5);
                truth.push(r.label.is_spam());
            }
        }
        per_fold.push(confusion(&pred, &truth)?);
    }

    let predictions: Vec<bool> = scores.iter().map(|&p| p >= 0.5).collect();
    let truth: Vec<bool> = labels.iter().map(|l| l.is_spam()).collect();
    let pooled = confusion(&predictions, &truth)?;
    Ok(CvResult {
        fold_of,
        scores,
        predictions,
        per_fold,
        pooled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{FeatureMode, FeatureSchema};
    use rand::Rng;

    fn labels(spam: usize, legit: usize) -> Vec<Label> {
        let mut v = vec![Label::Spammer; spam];
        v.extend(vec![Label::Legitimate; legit]);
        v
    }

    #[test]
    fn two_folds_on_four_balanced_rows() {
        let l = [Label::Spammer, Label::Legitimate, Label::Spammer, Label::Legitimate];
        for seed in 0..20 {
            let f = stratified_folds(&l, 2, seed).unwrap();
            for fold in 0..2 {
                let spam = (0..4).filter(|&i| f[i] == fold && l[i].is_spam()).count();
                let legit = (0..4).filter(|&i| f[i] == fold && !l[i].is_spam()).count();
                assert_eq!((spam, legit), (1, 1), "seed {seed}");
            }
        }
    }

    #[test]
    fn folds_are_stratified_and_cover_everything() {
        let l = labels(23, 41);
        let fold = stratified_folds(&l, 10, 3).unwrap();
        for f in 0..10 {
            let spam = (0..l.len()).filter(|&i| fold[i] == f && l[i].is_spam()).count();
            let legit = (0..l.len()).filter(|&i| fold[i] == f && !l[i].is_spam()).count();
            assert!((2..=3).contains(&spam), "fold {f}: {spam}");
            assert!((4..=5).contains(&legit), "fold {f}: {legit}");
        }
        assert_eq!(fold, stratified_folds(&l, 10, 3).unwrap());
        assert_ne!(fold, stratified_folds(&l, 10, 4).unwrap());
    }

    #[test]
    fn fold_sizes_balance_overall() {
        let l = labels(15, 15);
        let fold = stratified_folds(&l, 4, 0).unwrap();
        let sizes: Vec<usize> = (0..4).map(|f| fold.iter().filter(|&&x| x == f).count()).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1, "{sizes:?}");
    }

    #[test]
    fn too_few_rows_per_class() {
        assert!(stratified_folds(&labels(3, 50), 5, 0).is_err());
        assert!(stratified_folds(&labels(10, 10), 1, 0).is_err());
    }

    #[test]
    fn pooled_matrix_covers_every_row_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rows: Vec<FeatureRow> = (0..120)
            .map(|i| {
                let spam = i % 3 == 0;
                FeatureRow {
                    user: i,
                    values: vec![rng.random::<f64>() + if spam { 0.8 } else { 0.0 }, rng.random()],
                    label: if spam { Label::Spammer } else { Label::Legitimate },
                }
            })
            .collect();
        let t = FeatureTable::new(FeatureSchema::new(FeatureMode::DegreeOnly), rows, None).unwrap();
        let r = cross_validate(&t, 10, Algo::Tree(TreeParams::default()), 1).unwrap();
        assert_eq!(r.pooled.total(), 120);
        assert_eq!(r.pooled.true_pos + r.pooled.false_neg, 40);
        let mut sum = ConfusionMatrix::default();
        for cm in &r.per_fold {
            sum = sum + *cm;
        }
        assert_eq!(sum, r.pooled);
        assert!(r.pooled.accuracy() > 0.8);
    }
}
