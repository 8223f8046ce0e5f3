use crate::error::{Error, Result};
use crate::labels::Label;

use super::{FeatureTable, Matrix};

/// Binary entropy in bits of a (spam, legit) count pair.
pub fn entropy(spam: usize, legit: usize) -> f64 {
    let n = (spam + legit) as f64;
    if n == 0.0 {
        return 0.0;
    }
    [spam, legit]
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Entropy of the parent minus the size-weighted entropy of the
/// `x <= threshold` / `x > threshold` partitions.
pub(crate) fn split_gain(parent: (usize, usize), left: (usize, usize)) -> f64 {
    let right = (parent.0 - left.0, parent.1 - left.1);
    let n = (parent.0 + parent.1) as f64;
    let nl = (left.0 + left.1) as f64;
    let nr = (right.0 + right.1) as f64;
    let gain = entropy(parent.0, parent.1)
        - (nl / n) * entropy(left.0, left.1)
        - (nr / n) * entropy(right.0, right.1);
    // Rounding can leave a uselessly split parent a hair below zero.
    gain.max(0.0)
}

pub fn info_gain(column: &[f64], labels: &[Label], threshold: f64) -> Result<f64> {
    if column.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: column.len(),
            right: labels.len(),
        });
    }
    if column.is_empty() {
        return Ok(0.0);
    }
    let mut parent = (0, 0);
    let mut left = (0, 0);
    for (&x, &l) in column.iter().zip(labels) {
        let bump = |c: &mut (usize, usize)| {
            if l.is_spam() {
                c.0 += 1
            } else {
                c.1 += 1
            }
        };
        bump(&mut parent);
        if x <= threshold {
            bump(&mut left);
        }
    }
    Ok(split_gain(parent, left))
}

/// A threshold and the information gain it achieves. A column with a
/// single distinct value yields `threshold = +inf` and zero gain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    pub threshold: f64,
    pub gain: f64,
}

/// Scans `(value, is_spam)` pairs sorted by value and returns the best
/// midpoint split whose sides both hold at least `min_leaf` rows. Ties keep
/// the smaller threshold.
pub(crate) fn scan_sorted(sorted: &[(f64, bool)], min_leaf: usize) -> Option<Split> {
    let n = sorted.len();
    let total_spam = sorted.iter().filter(|p| p.1).count();
    let parent = (total_spam, n - total_spam);
    let mut left = (0usize, 0usize);
    let mut best: Option<Split> = None;
    for i in 0..n.saturating_sub(1) {
        if sorted[i].1 {
            left.0 += 1;
        } else {
            left.1 += 1;
        }
        let (lo, hi) = (sorted[i].0, sorted[i + 1].0);
        if lo == hi {
            continue;
        }
        let nl = i + 1;
        if nl < min_leaf || n - nl < min_leaf {
            continue;
        }
        let gain = split_gain(parent, left);
        if best.is_none_or(|b| gain > b.gain) {
            let mut threshold = lo + (hi - lo) / 2.0;
            // Adjacent floats: the midpoint can round up to `hi`.
            if threshold >= hi {
                threshold = lo;
            }
            best = Some(Split { threshold, gain });
        }
    }
    best
}

pub fn best_split(column: &[f64], labels: &[Label]) -> Result<Split> {
    if column.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: column.len(),
            right: labels.len(),
        });
    }
    if column.len() < 2 {
        return Err(Error::InvalidArgument("best_split needs at least 2 rows".into()));
    }
    let mut pairs: Vec<(f64, bool)> = column
        .iter()
        .zip(labels)
        .map(|(&x, l)| (x, l.is_spam()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(scan_sorted(&pairs, 1).unwrap_or(Split {
        threshold: f64::INFINITY,
        gain: 0.0,
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankedFeature {
    pub column: usize,
    pub name: String,
    pub gain: f64,
    pub threshold: f64,
}

/// Columns ordered by the gain of their best single split, highest first.
pub fn rank_features(table: &FeatureTable) -> Result<Vec<RankedFeature>> {
    if table.len() < 2 {
        return Err(Error::InvalidArgument("ranking needs at least 2 rows".into()));
    }
    let m = Matrix::from_rows(table.schema.width(), &table.rows);
    let mut out: Vec<RankedFeature> = m
        .cols
        .iter()
        .enumerate()
        .map(|(c, col)| {
            let mut pairs: Vec<(f64, bool)> =
                col.iter().copied().zip(m.spam.iter().copied()).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let s = scan_sorted(&pairs, 1).unwrap_or(Split {
                threshold: f64::INFINITY,
                gain: 0.0,
            });
            RankedFeature {
                column: c,
                name: table.schema.columns[c].clone(),
                gain: s.gain,
                threshold: s.threshold,
            }
        })
        .collect();
    out.sort_by(|a, b| b.gain.total_cmp(&a.gain).then(a.column.cmp(&b.column)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{FeatureMode, FeatureRow, FeatureSchema};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const S: Label = Label::Spammer;
    const L: Label = Label::Legitimate;

    #[test]
    fn perfect_split_on_balanced_labels() {
        let g = info_gain(&[0.0, 0.0, 1.0, 1.0], &[S, S, L, L], 0.5).unwrap();
        assert_eq!(g, 1.0);
    }

    #[test]
    fn constant_column_has_no_gain() {
        for t in [-1.0, 3.0, 10.0] {
            assert_eq!(info_gain(&[3.0; 4], &[S, L, S, L], t).unwrap(), 0.0);
        }
    }

    #[test]
    fn three_one_split() {
        let g = info_gain(&[1.0, 2.0, 3.0, 9.0], &[S, S, S, L], 5.0).unwrap();
        let want = -(0.75f64 * 0.75f64.log2()) - 0.25 * 0.25f64.log2();
        assert!((g - want).abs() < 1e-12);
        assert!((g - 0.8113).abs() < 1e-4);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            info_gain(&[1.0], &[S, L], 0.0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn best_split_examples() {
        let s = best_split(&[0.0, 1.0], &[S, L]).unwrap();
        assert_eq!(s, Split { threshold: 0.5, gain: 1.0 });
        let s = best_split(&[2.0, 2.0, 2.0], &[S, L, S]).unwrap();
        assert_eq!(s.gain, 0.0);
        assert!(s.threshold.is_infinite());
    }

    #[test]
    fn best_split_matches_exhaustive_midpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let n = rng.random_range(2..30);
            let col: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
            let labels: Vec<Label> = (0..n).map(|_| if rng.random_bool(0.5) { S } else { L }).collect();
            let got = best_split(&col, &labels).unwrap();

            let mut distinct = col.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            let mut best: Option<(f64, f64)> = None;
            for w in distinct.windows(2) {
                let t = (w[0] + w[1]) / 2.0;
                let g = info_gain(&col, &labels, t).unwrap();
                if best.is_none_or(|(_, bg)| g > bg) {
                    best = Some((t, g));
                }
            }
            match best {
                None => assert_eq!(got.gain, 0.0),
                Some((t, g)) => {
                    assert!((got.gain - g).abs() < 1e-12);
                    assert_eq!(got.threshold, t);
                }
            }
        }
    }

    #[test]
    fn separating_column_ranks_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<FeatureRow> = (0..200)
            .map(|i| {
                let spam = i % 2 == 0;
                FeatureRow {
                    user: i,
                    values: vec![
                        rng.random::<f64>(),
                        if spam { 1.0 } else { 0.0 } + rng.random::<f64>() * 0.5,
                    ],
                    label: if spam { S } else { L },
                }
            })
            .collect();
        let schema = FeatureSchema::new(FeatureMode::DegreeOnly);
        let t = FeatureTable::new(schema, rows, None).unwrap();
        let ranked = rank_features(&t).unwrap();
        assert_eq!(ranked[0].name, "outdegree");
        assert!((ranked[0].gain - 1.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn gain_bounded_by_label_entropy(
                data in prop::collection::vec((0u8..10, any::<bool>()), 1..60),
                threshold in -1.0f64..11.0,
            ) {
                let col: Vec<f64> = data.iter().map(|d| d.0 as f64).collect();
                let labels: Vec<Label> = data.iter().map(|d| if d.1 { S } else { L }).collect();
                let spam = data.iter().filter(|d| d.1).count();
                let h = entropy(spam, data.len() - spam);
                let g = info_gain(&col, &labels, threshold).unwrap();
                prop_assert!(g >= -1e-12);
                prop_assert!(g <= h + 1e-12);
            }
        }
    }
}
