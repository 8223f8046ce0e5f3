//! Confusion counts, per-class rates, recall and ROC/AUC with spammer as the
//! positive class.

use std::fmt::Write as _;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: u64,
    pub false_neg: u64,
    pub false_pos: u64,
    pub true_neg: u64,
}

impl ConfusionMatrix {
    pub fn new(true_pos: u64, false_neg: u64, false_pos: u64, true_neg: u64) -> Self {
        ConfusionMatrix {
            true_pos,
            false_neg,
            false_pos,
            true_neg,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_pos + self.false_neg + self.false_pos + self.true_neg
    }

    pub fn accuracy(&self) -> f64 {
        (self.true_pos + self.true_neg) as f64 / self.total() as f64
    }
}

impl Add for ConfusionMatrix {
    type Output = ConfusionMatrix;

    fn add(self, o: ConfusionMatrix) -> ConfusionMatrix {
        ConfusionMatrix {
            true_pos: self.true_pos + o.true_pos,
            false_neg: self.false_neg + o.false_neg,
            false_pos: self.false_pos + o.false_pos,
            true_neg: self.true_neg + o.true_neg,
        }
    }
}

/// `true` = spammer, for both slices.
pub fn confusion(predictions: &[bool], truth: &[bool]) -> Result<ConfusionMatrix> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: truth.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &t) in predictions.iter().zip(truth) {
        match (p, t) {
            (true, true) => cm.true_pos += 1,
            (false, true) => cm.false_neg += 1,
            (true, false) => cm.false_pos += 1,
            (false, false) => cm.true_neg += 1,
        }
    }
    Ok(cm)
}

/// Each class's row: the share of that class classified correctly and the
/// share misclassified, which sum to one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassRates {
    pub spammer_tp_rate: f64,
    pub spammer_fp_rate: f64,
    pub legit_tp_rate: f64,
    pub legit_fp_rate: f64,
}

pub fn per_class_rates(cm: &ConfusionMatrix) -> Result<ClassRates> {
    let spam = cm.true_pos + cm.false_neg;
    let legit = cm.true_neg + cm.false_pos;
    if spam == 0 {
        return Err(Error::Empty("spammer class"));
    }
    if legit == 0 {
        return Err(Error::Empty("legitimate class"));
    }
    // Misclassified counts over the class total rather than 1 - rate, so
    // that e.g. 37/1000 comes out as exactly 0.037.
    Ok(ClassRates {
        spammer_tp_rate: cm.true_pos as f64 / spam as f64,
        spammer_fp_rate: cm.false_neg as f64 / spam as f64,
        legit_tp_rate: cm.true_neg as f64 / legit as f64,
        legit_fp_rate: cm.false_pos as f64 / legit as f64,
    })
}

pub fn recall(cm: &ConfusionMatrix) -> Result<f64> {
    let pos = cm.true_pos + cm.false_neg;
    if pos == 0 {
        return Err(Error::Empty("positives"));
    }
    Ok(cm.true_pos as f64 / pos as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    /// (false-positive rate, true-positive rate), from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

impl RocCurve {
    /// `fpr,tpr` lines with a header, for external plotting.
    pub fn plot_data(&self) -> String {
        let mut s = String::from("fpr,tpr\n");
        for (x, y) in &self.points {
            let _ = writeln!(s, "{x},{y}");
        }
        s
    }
}

/// Sweeps the threshold down through the distinct scores; rows with equal
/// scores enter together as one diagonal step.
pub fn roc_auc(scores: &[f64], truth: &[bool]) -> Result<RocCurve> {
    if scores.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: truth.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    let pos = truth.iter().filter(|&&t| t).count();
    let neg = truth.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::InvalidArgument("ROC needs both classes".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut area = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (tp0, fp0) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if truth[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        // Trapezoid in count units; divided by pos*neg at the end.
        area += (fp - fp0) as f64 * (tp + tp0) as f64 / 2.0;
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    Ok(RocCurve {
        points,
        auc: area / (pos as f64 * neg as f64),
    })
}

/// Collusionrank figures shown beside our own in reports.
pub mod reference {
    pub const COLLUSIONRANK_SPAMMER_TP: f64 = 0.940;
    pub const COLLUSIONRANK_SPAMMER_FP: f64 = 0.060;
    pub const COLLUSIONRANK_LEGIT_TP: f64 = 0.901;
    pub const COLLUSIONRANK_LEGIT_FP: f64 = 0.099;
    pub const COLLUSIONRANK_AUC: f64 = 0.92;
}

/// Everything an evaluation run reports.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub title: String,
    pub cm: ConfusionMatrix,
    pub rates: ClassRates,
    pub recall: f64,
    pub roc: RocCurve,
}

impl EvalReport {
    pub fn new(title: impl Into<String>, cm: ConfusionMatrix, scores: &[f64], truth: &[bool]) -> Result<Self> {
        Ok(EvalReport {
            title: title.into(),
            cm,
            rates: per_class_rates(&cm)?,
            recall: recall(&cm)?,
            roc: roc_auc(scores, truth)?,
        })
    }

    pub fn to_text(&self) -> String {
        use reference::*;
        let r = &self.rates;
        let pct = |x: f64| format!("{:.1}%", x * 100.0);
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.title);
        let _ = writeln!(s, "rows {}", self.cm.total());
        let _ = writeln!(
            s,
            "confusion tp {} fn {} fp {} tn {}",
            self.cm.true_pos, self.cm.false_neg, self.cm.false_pos, self.cm.true_neg
        );
        let _ = writeln!(s, "accuracy {:.6}", self.cm.accuracy());
        let _ = writeln!(s, "recall {:.6}", self.recall);
        let _ = writeln!(s, "auc {:.6}", self.roc.auc);
        let _ = writeln!(s);
        let _ = writeln!(s, "class       tp_rate  fp_rate  | collusionrank tp  fp");
        let _ = writeln!(
            s,
            "spammer     {:>7}  {:>7}  | {:>16}  {}",
            pct(r.spammer_tp_rate),
            pct(r.spammer_fp_rate),
            pct(COLLUSIONRANK_SPAMMER_TP),
            pct(COLLUSIONRANK_SPAMMER_FP)
        );
        let _ = writeln!(
            s,
            "legitimate  {:>7}  {:>7}  | {:>16}  {}",
            pct(r.legit_tp_rate),
            pct(r.legit_fp_rate),
            pct(COLLUSIONRANK_LEGIT_TP),
            pct(COLLUSIONRANK_LEGIT_FP)
        );
        let _ = writeln!(s, "collusionrank auc {COLLUSIONRANK_AUC:.2}");
        let _ = writeln!(s);
        let _ = writeln!(s, "roc_points {}", self.roc.points.len());
        for (x, y) in &self.roc.points {
            let _ = writeln!(s, "{x:.6} {y:.6}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn concordance(scores: &[f64], truth: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &ti) in truth.iter().enumerate() {
            for (j, &tj) in truth.iter().enumerate() {
                if ti && !tj {
                    den += 1.0;
                    if scores[i] > scores[j] {
                        num += 1.0;
                    } else if scores[i] == scores[j] {
                        num += 0.5;
                    }
                }
            }
        }
        num / den
    }

    #[test]
    fn confusion_extremes() {
        let truth = [true, false, true, false, false];
        let cm = confusion(&truth, &truth).unwrap();
        assert_eq!((cm.false_pos, cm.false_neg), (0, 0));
        let flipped: Vec<bool> = truth.iter().map(|t| !t).collect();
        let cm = confusion(&flipped, &truth).unwrap();
        assert_eq!((cm.true_pos, cm.true_neg), (0, 0));
        assert!(confusion(&[true], &[]).is_err());
    }

    #[test]
    fn confusion_matches_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p: Vec<bool> = (0..500).map(|_| rng.random()).collect();
        let t: Vec<bool> = (0..500).map(|_| rng.random()).collect();
        let cm = confusion(&p, &t).unwrap();
        let count = |a: bool, b: bool| p.iter().zip(&t).filter(|&(&x, &y)| x == a && y == b).count() as u64;
        assert_eq!(cm, ConfusionMatrix::new(count(true, true), count(false, true), count(true, false), count(false, false)));
        assert_eq!(cm.total(), 500);
    }

    #[test]
    fn published_rates() {
        let r = per_class_rates(&ConfusionMatrix::new(963, 37, 57, 943)).unwrap();
        assert_eq!(r.spammer_tp_rate, 0.963);
        assert_eq!(r.spammer_fp_rate, 0.037);
        assert_eq!(r.legit_tp_rate, 0.943);
        assert_eq!(r.legit_fp_rate, 0.057);
    }

    #[test]
    fn perfect_and_empty_classes() {
        let r = per_class_rates(&ConfusionMatrix::new(5, 0, 0, 3)).unwrap();
        assert_eq!((r.spammer_tp_rate, r.spammer_fp_rate), (1.0, 0.0));
        assert_eq!((r.legit_tp_rate, r.legit_fp_rate), (1.0, 0.0));
        assert!(per_class_rates(&ConfusionMatrix::new(0, 0, 1, 1)).is_err());
        assert!(per_class_rates(&ConfusionMatrix::new(1, 1, 0, 0)).is_err());
    }

    #[test]
    fn rates_match_recomputation_and_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let cm = ConfusionMatrix::new(
                rng.random_range(1..500),
                rng.random_range(0..500),
                rng.random_range(0..500),
                rng.random_range(1..500),
            );
            let r = per_class_rates(&cm).unwrap();
            let spam = (cm.true_pos + cm.false_neg) as f64;
            let legit = (cm.true_neg + cm.false_pos) as f64;
            assert!((r.spammer_tp_rate - cm.true_pos as f64 / spam).abs() < 1e-12);
            assert!((r.legit_tp_rate - cm.true_neg as f64 / legit).abs() < 1e-12);
            assert!((r.spammer_tp_rate + r.spammer_fp_rate - 1.0).abs() < 1e-12);
            assert!((r.legit_tp_rate + r.legit_fp_rate - 1.0).abs() < 1e-12);
            assert_eq!(recall(&cm).unwrap(), r.spammer_tp_rate);
            let doubled = per_class_rates(&(cm + cm)).unwrap();
            assert_eq!(doubled, r);
        }
    }

    #[test]
    fn recall_cases() {
        assert_eq!(recall(&ConfusionMatrix::new(9, 1, 4, 4)).unwrap(), 0.9);
        assert_eq!(recall(&ConfusionMatrix::new(3, 0, 4, 4)).unwrap(), 1.0);
        assert!(recall(&ConfusionMatrix::new(0, 0, 4, 4)).is_err());
    }

    #[test]
    fn roc_edge_cases() {
        let truth = [true, true, false, false];
        let r = roc_auc(&[0.9, 0.8, 0.2, 0.1], &truth).unwrap();
        assert_eq!(r.auc, 1.0);
        assert_eq!(r.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.points.last(), Some(&(1.0, 1.0)));
        let r = roc_auc(&[0.3; 4], &truth).unwrap();
        assert_eq!(r.auc, 0.5);
        assert_eq!(r.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert!(roc_auc(&[0.1, 0.2], &[true, true]).is_err());
    }

    #[test]
    fn five_scores_against_concordance() {
        let scores = [0.9, 0.4, 0.4, 0.7, 0.1];
        let truth = [true, true, false, false, false];
        let r = roc_auc(&scores, &truth).unwrap();
        // pairs: (0.9 vs 0.4,0.7,0.1) = 3, (0.4 vs 0.4 tie, 0.7 loses, 0.1) = 1.5
        assert!((r.auc - 4.5 / 6.0).abs() < 1e-12);
        assert!((r.auc - concordance(&scores, &truth)).abs() < 1e-12);
    }

    #[test]
    fn curve_is_monotone_and_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(2..40);
            let mut truth: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            truth[0] = true;
            truth[1] = false;
            let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..6) as f64 / 5.0).collect();
            let r = roc_auc(&scores, &truth).unwrap();
            assert!((r.auc - concordance(&scores, &truth)).abs() < 1e-9);
            for w in r.points.windows(2) {
                assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
            }
            let rev: Vec<f64> = scores.iter().map(|s| -s).collect();
            let back = roc_auc(&rev, &truth).unwrap();
            assert!((back.auc - (1.0 - r.auc)).abs() < 1e-9);
        }
    }

    #[test]
    fn report_text_has_reference_columns() {
        let truth = [true, true, false, false];
        let scores = [0.9, 0.3, 0.6, 0.1];
        let pred: Vec<bool> = scores.iter().map(|&s| s >= 0.5).collect();
        let cm = confusion(&pred, &truth).unwrap();
        let rep = EvalReport::new("demo", cm, &scores, &truth).unwrap();
        let text = rep.to_text();
        assert!(text.contains("confusion tp 1 fn 1 fp 1 tn 1"));
        assert!(text.contains("94.0%"));
        assert!(text.contains("collusionrank auc 0.92"));
        assert!(rep.roc.plot_data().starts_with("fpr,tpr\n0,0\n"));
    }
}
