//! Confusion matrices, threshold metrics, ranking curves and their areas.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DatasetView, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub const fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        ConfusionMatrix { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn actual_positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn actual_negatives(&self) -> u64 {
        self.tn + self.fp
    }

    pub fn predicted_positives(&self) -> u64 {
        self.tp + self.fp
    }

    pub fn errors(&self) -> u64 {
        self.fp + self.fn_
    }
}

impl std::ops::Add for ConfusionMatrix {
    type Output = ConfusionMatrix;

    fn add(self, o: ConfusionMatrix) -> ConfusionMatrix {
        ConfusionMatrix::new(
            self.tp + o.tp,
            self.fp + o.fp,
            self.tn + o.tn,
            self.fn_ + o.fn_,
        )
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tp={} fp={} tn={} fn={}",
            self.tp, self.fp, self.tn, self.fn_
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Precision,
    Sensitivity,
    Specificity,
    Accuracy,
    F1,
    AucRoc,
    AucPr,
}

impl MetricName {
    /// Row order of the case-study table.
    pub const TABLE_ORDER: [MetricName; 7] = [
        MetricName::Precision,
        MetricName::Sensitivity,
        MetricName::AucPr,
        MetricName::Specificity,
        MetricName::Accuracy,
        MetricName::AucRoc,
        MetricName::F1,
    ];

    pub const THRESHOLD: [MetricName; 5] = [
        MetricName::Precision,
        MetricName::Sensitivity,
        MetricName::Specificity,
        MetricName::Accuracy,
        MetricName::F1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Precision => "precision",
            MetricName::Sensitivity => "sensitivity",
            MetricName::Specificity => "specificity",
            MetricName::Accuracy => "accuracy",
            MetricName::F1 => "f1",
            MetricName::AucRoc => "auc_roc",
            MetricName::AucPr => "auc_pr",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            MetricName::Precision => "Precision",
            MetricName::Sensitivity => "Sensitivity",
            MetricName::Specificity => "Specificity",
            MetricName::Accuracy => "Accuracy",
            MetricName::F1 => "F1-Score",
            MetricName::AucRoc => "AUC-ROC",
            MetricName::AucPr => "AUC-PR",
        }
    }

    pub fn needs_scores(self) -> bool {
        matches!(self, MetricName::AucRoc | MetricName::AucPr)
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "precision" | "ppv" => MetricName::Precision,
            "sensitivity" | "recall" | "tpr" => MetricName::Sensitivity,
            "specificity" | "tnr" => MetricName::Specificity,
            "accuracy" => MetricName::Accuracy,
            "f1" | "f1_score" => MetricName::F1,
            "auc_roc" | "roc_auc" => MetricName::AucRoc,
            "auc_pr" | "average_precision" => MetricName::AucPr,
            _ => return Err(Error::UnknownMetric(s.to_owned())),
        };
        Ok(m)
    }
}

/// A metric evaluated on one view. `value == None` marks a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub name: MetricName,
    pub value: Option<f64>,
    /// Denominator population of the metric.
    pub support: u64,
}

impl MetricValue {
    fn ratio(name: MetricName, num: u64, den: u64) -> Self {
        MetricValue {
            name,
            value: (den > 0).then(|| num as f64 / den as f64),
            support: den,
        }
    }

    pub fn defined(&self) -> Result<f64> {
        self.value.ok_or_else(|| Error::UndefinedMetric {
            metric: self.name.to_string(),
        })
    }
}

pub fn confusion(view: &DatasetView<'_>, positive: &Label) -> Result<ConfusionMatrix> {
    view.label_space().index_of(positive)?;
    let mut cm = ConfusionMatrix::default();
    for r in view.iter() {
        match (r.y_true == *positive, r.y_pred == *positive) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fp += 1,
        }
    }
    Ok(cm)
}

pub fn threshold_metric(cm: &ConfusionMatrix, name: MetricName) -> Option<MetricValue> {
    let v = match name {
        MetricName::Precision => MetricValue::ratio(name, cm.tp, cm.predicted_positives()),
        MetricName::Sensitivity => MetricValue::ratio(name, cm.tp, cm.actual_positives()),
        MetricName::Specificity => MetricValue::ratio(name, cm.tn, cm.actual_negatives()),
        MetricName::Accuracy => MetricValue::ratio(name, cm.tp + cm.tn, cm.total()),
        // 2tp / (2tp + fp + fn): the harmonic mean without the intermediate ratios
        MetricName::F1 => {
            let precision = threshold_metric(cm, MetricName::Precision)?.value;
            let recall = threshold_metric(cm, MetricName::Sensitivity)?.value;
            MetricValue {
                name,
                value: match (precision, recall) {
                    (Some(_), Some(_)) if cm.tp > 0 => {
                        Some(2.0 * cm.tp as f64 / (2 * cm.tp + cm.fp + cm.fn_) as f64)
                    }
                    (Some(_), Some(_)) => Some(0.0),
                    _ => None,
                },
                support: cm.total(),
            }
        }
        MetricName::AucRoc | MetricName::AucPr => return None,
    };
    Some(v)
}

pub fn threshold_metrics(cm: &ConfusionMatrix) -> BTreeMap<MetricName, MetricValue> {
    MetricName::THRESHOLD
        .iter()
        .filter_map(|&m| threshold_metric(cm, m).map(|v| (m, v)))
        .collect()
}

/// Ordered (x, y) points in the unit square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub points: Vec<(f64, f64)>,
}

/// (score, is_positive) pairs sorted by descending score.
fn ranked(view: &DatasetView<'_>, positive: &Label, needed_for: &str) -> Result<Vec<(f64, bool)>> {
    view.label_space().index_of(positive)?;
    let mut ranked = view
        .iter()
        .map(|r| {
            r.score
                .map(|s| (s, r.y_true == *positive))
                .ok_or_else(|| Error::MissingScores {
                    id: r.id.clone(),
                    needed_for: needed_for.to_owned(),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(ranked)
}

/// Walks thresholds from high to low, yielding cumulative (tp, fp) after
/// every block of tied scores.
fn threshold_steps(ranked: &[(f64, bool)]) -> Vec<(u64, u64)> {
    let mut steps = Vec::new();
    let (mut tp, mut fp) = (0u64, 0u64);
    for (i, &(score, is_pos)) in ranked.iter().enumerate() {
        if is_pos {
            tp += 1;
        } else {
            fp += 1;
        }
        let last_of_tie = ranked.get(i + 1).is_none_or(|next| next.0 != score);
        if last_of_tie {
            steps.push((tp, fp));
        }
    }
    steps
}

/// ROC curve as (FPR, TPR) at every distinct score threshold, with the
/// (0, 0) origin. Tied scores cross the threshold together.
pub fn roc_curve(view: &DatasetView<'_>, positive: &Label) -> Result<Curve> {
    let ranked = ranked(view, positive, "roc_curve")?;
    let pos = ranked.iter().filter(|r| r.1).count() as f64;
    let neg = ranked.len() as f64 - pos;
    if pos == 0.0 {
        return Err(Error::NoPositives);
    }
    if neg == 0.0 {
        return Err(Error::NoNegatives);
    }
    let mut points = vec![(0.0, 0.0)];
    points.extend(
        threshold_steps(&ranked)
            .into_iter()
            .map(|(tp, fp)| (fp as f64 / neg, tp as f64 / pos)),
    );
    Ok(Curve { points })
}

/// Trapezoidal area under an ROC curve.
pub fn auc_roc(curve: &Curve) -> Result<MetricValue> {
    let pts = &curve.points;
    if pts.first() != Some(&(0.0, 0.0)) || pts.last() != Some(&(1.0, 1.0)) {
        return Err(Error::InvalidCurve(
            "ROC curve must run from (0,0) to (1,1)".into(),
        ));
    }
    if pts.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::InvalidCurve("x must be non-decreasing".into()));
    }
    let area = pts
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum();
    Ok(MetricValue {
        name: MetricName::AucRoc,
        value: Some(area),
        support: (pts.len() - 1) as u64,
    })
}

/// Precision-recall curve as (recall, precision) at every distinct score
/// threshold, highest threshold first.
pub fn pr_curve(view: &DatasetView<'_>, positive: &Label) -> Result<Curve> {
    let ranked = ranked(view, positive, "pr_curve")?;
    let pos = ranked.iter().filter(|r| r.1).count();
    if pos == 0 {
        return Err(Error::NoPositives);
    }
    let points = threshold_steps(&ranked)
        .into_iter()
        .map(|(tp, fp)| (tp as f64 / pos as f64, tp as f64 / (tp + fp) as f64))
        .collect();
    Ok(Curve { points })
}

/// Average precision: Σ (R_k − R_{k−1}) · P_k, no interpolation.
pub fn auc_pr(curve: &Curve) -> Result<MetricValue> {
    if curve.points.is_empty() {
        return Err(Error::InvalidCurve("empty precision-recall curve".into()));
    }
    let mut prev_recall = 0.0;
    let mut area = 0.0;
    for &(recall, precision) in &curve.points {
        if recall < prev_recall {
            return Err(Error::InvalidCurve("recall must be non-decreasing".into()));
        }
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    Ok(MetricValue {
        name: MetricName::AucPr,
        value: Some(area),
        support: curve.points.len() as u64,
    })
}

/// Any supported metric on a view. Views lacking one of the classes give an
/// undefined value for ranking metrics, mirroring zero denominators.
pub fn evaluate(view: &DatasetView<'_>, positive: &Label, name: MetricName) -> Result<MetricValue> {
    let n = view.len() as u64;
    let undefined = MetricValue {
        name,
        value: None,
        support: n,
    };
    let scored = |v: Result<MetricValue>| match v {
        Ok(mut v) => {
            v.support = n;
            Ok(v)
        }
        Err(Error::NoPositives | Error::NoNegatives) => Ok(undefined),
        Err(e) => Err(e),
    };
    match name {
        MetricName::AucRoc => scored(roc_curve(view, positive).and_then(|c| auc_roc(&c))),
        MetricName::AucPr => scored(pr_curve(view, positive).and_then(|c| auc_pr(&c))),
        m => {
            let cm = confusion(view, positive)?;
            Ok(threshold_metric(&cm, m).expect("threshold metric"))
        }
    }
}

/// Every confusion matrix of size `n` whose sensitivity, specificity and
/// accuracy are within `rounding_tol` of the given values.
pub fn reconstruct_confusion(
    sens: f64,
    spec: f64,
    acc: f64,
    n: u64,
    rounding_tol: f64,
) -> Vec<ConfusionMatrix> {
    let close =
        |num: u64, den: u64, target: f64| (num as f64 / den as f64 - target).abs() <= rounding_tol;
    let mut out = Vec::new();
    for pos in 1..n {
        let neg = n - pos;
        for tp in (0..=pos).filter(|&tp| close(tp, pos, sens)) {
            for tn in (0..=neg).filter(|&tn| close(tn, neg, spec)) {
                if close(tp + tn, n, acc) {
                    out.push(ConfusionMatrix::new(tp, neg - tn, tn, pos - tp));
                }
            }
        }
    }
    out
}
