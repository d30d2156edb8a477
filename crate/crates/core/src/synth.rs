//! Synthetic populations with exactly known per-group confusion counts.
//!
//! Each group gets `P = round(n · prevalence)` actual positives,
//! `tp = round(P · sensitivity)` and `tn = round(N · specificity)`. Records
//! are laid out by count and then shuffled with the spec's seed, so error
//! rates are exact and PR has a closed form.
//!
//! Scores follow a bounded model tied to the predicted label: predicted
//! positives draw `mean_pos + spread · u` clamped to `[0.5, 1]`, predicted
//! negatives draw `mean_neg + spread · u` clamped to `[0, 0.5)`, with `u`
//! uniform on `[-1, 1]`. Only meant to exercise ranking-metric code paths.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ConfusionMatrix;
use crate::model::{validate_dataset, Domain, LabelSpace, LabeledDataset, PredictionRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreModel {
    pub mean_pos: f64,
    pub mean_neg: f64,
    pub spread: f64,
}

impl Default for ScoreModel {
    fn default() -> Self {
        ScoreModel {
            mean_pos: 0.75,
            mean_neg: 0.25,
            spread: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthGroup {
    pub name: String,
    pub n: u64,
    pub prevalence: f64,
    /// Required when the group has actual positives.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<f64>,
    /// Required when the group has actual negatives.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specificity: Option<f64>,
    #[serde(default)]
    pub score_model: ScoreModel,
}

impl SynthGroup {
    pub fn new(
        name: impl Into<String>,
        n: u64,
        prevalence: f64,
        sensitivity: f64,
        specificity: f64,
    ) -> Self {
        SynthGroup {
            name: name.into(),
            n,
            prevalence,
            sensitivity: Some(sensitivity),
            specificity: Some(specificity),
            score_model: ScoreModel::default(),
        }
    }

    /// Confusion counts this group will realize.
    pub fn counts(&self) -> Result<ConfusionMatrix> {
        let err = |reason: String| Error::Unachievable {
            group: self.name.clone(),
            reason,
        };
        if self.n == 0 {
            return Err(err("n must be at least 1".into()));
        }
        for (what, v) in [
            ("prevalence", Some(self.prevalence)),
            ("sensitivity", self.sensitivity),
            ("specificity", self.specificity),
        ] {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) {
                    return Err(err(format!("{what} = {v} is outside [0, 1]")));
                }
            }
        }
        let pos = (self.n as f64 * self.prevalence).round() as u64;
        let neg = self.n - pos;
        let rate = |count: u64, rate: Option<f64>, what: &str| -> Result<u64> {
            match (count, rate) {
                (0, None) => Ok(0),
                (0, Some(_)) => Err(err(format!(
                    "{what} is specified but the group has no such cases"
                ))),
                (_, None) => Err(err(format!("{what} is required for {count} cases"))),
                (c, Some(r)) => Ok((c as f64 * r).round() as u64),
            }
        };
        let tp = rate(pos, self.sensitivity, "sensitivity")?;
        let tn = rate(neg, self.specificity, "specificity")?;
        Ok(ConfusionMatrix::new(tp, neg - tn, tn, pos - tp))
    }
}

fn default_attribute() -> String {
    "group".into()
}

fn default_negative() -> String {
    "benign".into()
}

fn default_positive() -> String {
    "malignant".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub groups: Vec<SynthGroup>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub domain: Domain,
    /// Attribute name carrying the group.
    #[serde(default = "default_attribute")]
    pub attribute: String,
    #[serde(default = "default_negative")]
    pub negative_label: String,
    #[serde(default = "default_positive")]
    pub positive_label: String,
}

impl SynthSpec {
    pub fn new(groups: Vec<SynthGroup>, seed: u64) -> Self {
        SynthSpec {
            groups,
            seed,
            domain: Domain::Source,
            attribute: default_attribute(),
            negative_label: default_negative(),
            positive_label: default_positive(),
        }
    }

    pub fn label_space(&self) -> Result<LabelSpace> {
        LabelSpace::binary(&self.negative_label, &self.positive_label)
    }
}

pub fn load_spec(path: &Path) -> Result<SynthSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_owned(),
        reason: e.to_string(),
    })
}

pub fn generate(spec: &SynthSpec) -> Result<LabeledDataset> {
    if spec.groups.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (neg, pos) = (spec.negative_label.as_str(), spec.positive_label.as_str());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut records = Vec::new();
    for group in &spec.groups {
        let cm = group.counts()?;
        let cells = [
            (pos, pos, cm.tp),
            (pos, neg, cm.fn_),
            (neg, neg, cm.tn),
            (neg, pos, cm.fp),
        ];
        let mut k = 0;
        for (truth, pred, count) in cells {
            for _ in 0..count {
                k += 1;
                let m = &group.score_model;
                let u: f64 = rng.random_range(-1.0..=1.0);
                let score = if pred == pos {
                    (m.mean_pos + m.spread * u).clamp(0.5, 1.0)
                } else {
                    (m.mean_neg + m.spread * u).clamp(0.0, 0.5 - f64::EPSILON)
                };
                records.push(
                    PredictionRecord::new(
                        format!("{}-{}-{k:05}", spec.domain, group.name),
                        truth,
                        pred,
                    )
                    .with_score(score)
                    .with_group(&spec.attribute, &group.name)
                    .with_domain(spec.domain),
                );
            }
        }
    }
    records.shuffle(&mut rng);
    validate_dataset(records, Some(spec.label_space()?))
}

/// Closed-form TV-PR of a group: `errorRate(group) − errorRate(all)`.
pub fn oracle_pr(spec: &SynthSpec, group_name: &str) -> Result<f64> {
    let mut total = ConfusionMatrix::default();
    let mut target = None;
    for g in &spec.groups {
        let cm = g.counts()?;
        total = total + cm;
        if g.name == group_name {
            target = Some(total_of(target, cm));
        }
    }
    let group = target.ok_or_else(|| Error::UnknownGroup(group_name.to_owned()))?;
    Ok(group.errors() as f64 / group.total() as f64 - total.errors() as f64 / total.total() as f64)
}

// groups sharing a name pool their counts, matching attribute selection
fn total_of(acc: Option<ConfusionMatrix>, cm: ConfusionMatrix) -> ConfusionMatrix {
    acc.map_or(cm, |a| a + cm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{DivergenceSpec, PredictionMode};
    use crate::metrics::confusion;
    use crate::model::{select, SubgroupSelector};
    use crate::pr::empirical_pr;

    fn ab() -> SynthSpec {
        SynthSpec::new(
            vec![
                SynthGroup::new("A", 1000, 0.5, 0.7, 0.7),
                SynthGroup::new("B", 1000, 0.5, 0.9, 0.9),
            ],
            11,
        )
    }

    #[test]
    fn count_arithmetic() {
        let g = SynthGroup::new("A", 1000, 0.5, 0.9, 0.9);
        assert_eq!(g.counts().unwrap(), ConfusionMatrix::new(450, 50, 450, 50));
        let ds = generate(&SynthSpec::new(vec![g], 3)).unwrap();
        assert_eq!(
            confusion(&ds.view(), &"malignant".into()).unwrap(),
            ConfusionMatrix::new(450, 50, 450, 50)
        );
    }

    #[test]
    fn identical_groups_have_zero_pr() {
        let spec = SynthSpec::new(
            vec![
                SynthGroup::new("x", 200, 0.3, 0.8, 0.6),
                SynthGroup::new("y", 200, 0.3, 0.8, 0.6),
            ],
            5,
        );
        let ds = generate(&spec).unwrap();
        let est = empirical_pr(
            &ds,
            &SubgroupSelector::single("group", "x"),
            &DivergenceSpec::default(),
            PredictionMode::HardLabel,
        )
        .unwrap();
        assert_eq!(est.pr, 0.0);
    }

    #[test]
    fn ab_oracle() {
        let spec = ab();
        let a = oracle_pr(&spec, "A").unwrap();
        let b = oracle_pr(&spec, "B").unwrap();
        assert!((a - 0.10).abs() < 1e-12);
        assert!((b + 0.10).abs() < 1e-12);
        assert!(matches!(oracle_pr(&spec, "C"), Err(Error::UnknownGroup(_))));
        let single = SynthSpec::new(vec![SynthGroup::new("only", 10, 0.5, 0.4, 0.6)], 0);
        assert_eq!(oracle_pr(&single, "only").unwrap(), 0.0);
    }

    #[test]
    fn unachievable_counts() {
        let g = SynthGroup::new("tiny", 3, 0.1, 0.9, 0.9);
        assert!(matches!(g.counts(), Err(Error::Unachievable { .. })));
        let mut ok = g.clone();
        ok.sensitivity = None;
        assert_eq!(ok.counts().unwrap().actual_positives(), 0);
        let mut missing = SynthGroup::new("m", 10, 0.5, 0.5, 0.5);
        missing.specificity = None;
        assert!(missing.counts().is_err());
        assert!(SynthGroup::new("bad", 10, 1.5, 0.5, 0.5).counts().is_err());
    }

    #[test]
    fn seeds_permute_but_preserve_counts() {
        let spec = ab();
        let a = generate(&spec).unwrap();
        assert_eq!(a, generate(&spec).unwrap());
        let b = generate(&SynthSpec { seed: 12, ..spec }).unwrap();
        let ids = |d: &LabeledDataset| d.records().iter().map(|r| r.id.clone()).collect::<Vec<_>>();
        assert_ne!(ids(&a), ids(&b));
        for g in ["A", "B"] {
            let sel = SubgroupSelector::single("group", g);
            let pos = "malignant".into();
            assert_eq!(
                confusion(&select(&a, &sel).unwrap(), &pos).unwrap(),
                confusion(&select(&b, &sel).unwrap(), &pos).unwrap()
            );
        }
    }

    #[test]
    fn scores_agree_with_predictions() {
        let ds = generate(&ab()).unwrap();
        for r in ds.records() {
            let s = r.score.unwrap();
            assert_eq!(s >= 0.5, r.y_pred.as_str() == "malignant", "{r:?}");
        }
    }

    #[test]
    fn spec_parses_from_toml() {
        let spec: SynthSpec = toml::from_str(
            r#"
            seed = 7
            domain = "target"
            attribute = "phototype"

            [[groups]]
            name = "light"
            n = 107
            prevalence = 0.7383
            sensitivity = 0.886
            specificity = 0.714
            "#,
        )
        .unwrap();
        assert_eq!(spec.domain, Domain::Target);
        assert_eq!(
            spec.groups[0].counts().unwrap(),
            ConfusionMatrix::new(70, 8, 20, 9)
        );
    }
}
