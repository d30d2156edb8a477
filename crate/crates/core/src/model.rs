//! Domain types shared across the crate: labels, prediction records,
//! validated datasets, read-only views and subgroup selectors.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the sum of a probability vector.
pub const PROB_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(value: impl Into<String>) -> Self {
        Label(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

/// Ordered, finite set of labels. In binary mode index 0 is the negative
/// label and index 1 the positive one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Label>", into = "Vec<Label>")]
pub struct LabelSpace(Vec<Label>);

impl LabelSpace {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        let distinct: BTreeSet<&Label> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::MixedLabelSpaces(format!(
                "label space {:?} repeats a label",
                names(&labels)
            )));
        }
        if labels.len() < 2 {
            return Err(Error::DegenerateLabelSpace(names(&labels)));
        }
        Ok(LabelSpace(labels))
    }

    pub fn binary(negative: impl Into<String>, positive: impl Into<String>) -> Result<Self> {
        Self::new(vec![Label::new(negative), Label::new(positive)])
    }

    /// Builds a space from observed labels: sorted, and in the binary case
    /// with `positive` moved to index 1.
    pub fn infer<'a>(
        observed: impl IntoIterator<Item = &'a Label>,
        positive: Option<&Label>,
    ) -> Result<Self> {
        let mut set: BTreeSet<Label> = observed.into_iter().cloned().collect();
        if let Some(p) = positive {
            set.insert(p.clone());
        }
        let mut labels: Vec<Label> = set.into_iter().collect();
        if let (Some(p), 2) = (positive, labels.len()) {
            if labels[0] == *p {
                labels.swap(0, 1);
            }
        }
        Self::new(labels)
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.0.len() == 2
    }

    pub fn index_of(&self, label: &Label) -> Result<usize> {
        self.0
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel {
                label: label.to_string(),
                space: names(&self.0),
            })
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.0.contains(label)
    }

    /// Positive label of a binary space.
    pub fn positive(&self) -> Option<&Label> {
        self.is_binary().then(|| &self.0[1])
    }
}

impl TryFrom<Vec<Label>> for LabelSpace {
    type Error = Error;

    fn try_from(labels: Vec<Label>) -> Result<Self> {
        LabelSpace::new(labels)
    }
}

impl From<LabelSpace> for Vec<Label> {
    fn from(space: LabelSpace) -> Self {
        space.0
    }
}

fn names(labels: &[Label]) -> Vec<String> {
    labels.iter().map(|l| l.to_string()).collect()
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    #[default]
    Source,
    Target,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Source => "source",
            Domain::Target => "target",
        }
    }

    pub fn parse(s: &str) -> Option<Domain> {
        match s.trim().to_ascii_lowercase().as_str() {
            "source" => Some(Domain::Source),
            "target" => Some(Domain::Target),
            _ => None,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One scored, labeled prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub y_true: Label,
    pub y_pred: Label,
    /// Probability of the positive label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    /// Full predicted distribution, indexed like the label space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default)]
    pub groups: BTreeMap<String, String>,
    #[serde(default)]
    pub domain: Domain,
}

impl PredictionRecord {
    pub fn new(
        id: impl Into<String>,
        y_true: impl Into<String>,
        y_pred: impl Into<String>,
    ) -> Self {
        PredictionRecord {
            id: id.into(),
            y_true: Label::new(y_true),
            y_pred: Label::new(y_pred),
            score: None,
            probs: None,
            groups: BTreeMap::new(),
            domain: Domain::Source,
        }
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    pub fn with_group(mut self, attribute: impl Into<String>, value: impl Into<String>) -> Self {
        self.groups.insert(attribute.into(), value.into());
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn is_correct(&self) -> bool {
        self.y_true == self.y_pred
    }

    pub fn group(&self, attribute: &str) -> Option<&str> {
        self.groups.get(attribute).map(String::as_str)
    }
}

/// A validated, immutable collection of prediction records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    records: Vec<PredictionRecord>,
    label_space: LabelSpace,
}

/// Validates raw records into a dataset. Without a declared label space the
/// space is inferred from the observed labels (sorted).
pub fn validate_dataset(
    raw_records: Vec<PredictionRecord>,
    declared: Option<LabelSpace>,
) -> Result<LabeledDataset> {
    if raw_records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let label_space = match declared {
        Some(space) => space,
        None => LabelSpace::infer(
            raw_records.iter().flat_map(|r| [&r.y_true, &r.y_pred]),
            None,
        )?,
    };

    let mut seen = HashSet::with_capacity(raw_records.len());
    for r in &raw_records {
        if !seen.insert(r.id.as_str()) {
            return Err(Error::DuplicateId(r.id.clone()));
        }
        for label in [&r.y_true, &r.y_pred] {
            if !label_space.contains(label) {
                return Err(Error::MixedLabelSpaces(format!(
                    "record {:?} uses label {:?} outside {:?}",
                    r.id,
                    label.as_str(),
                    names(label_space.labels())
                )));
            }
        }
        if let Some(s) = r.score {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::ScoreOutOfRange {
                    id: r.id.clone(),
                    score: s,
                });
            }
        }
        if let Some(p) = &r.probs {
            if p.len() != label_space.len() {
                return Err(Error::MixedLabelSpaces(format!(
                    "record {:?} has {} probabilities for a label space of {}",
                    r.id,
                    p.len(),
                    label_space.len()
                )));
            }
            check_probabilities(p).map_err(|reason| Error::InvalidProbabilities {
                id: r.id.clone(),
                reason,
            })?;
        }
    }

    Ok(LabeledDataset {
        records: raw_records,
        label_space,
    })
}

pub(crate) fn check_probabilities(p: &[f64]) -> std::result::Result<(), String> {
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(format!(
            "probabilities {p:?} must be finite and non-negative"
        ));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(format!("probabilities sum to {sum}, expected 1"));
    }
    Ok(())
}

impl LabeledDataset {
    pub fn records(&self) -> &[PredictionRecord] {
        &self.records
    }

    pub fn label_space(&self) -> &LabelSpace {
        &self.label_space
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn view(&self) -> DatasetView<'_> {
        DatasetView {
            dataset: self,
            indices: (0..self.records.len()).collect(),
        }
    }

    /// Records of one domain as a new dataset, or `None` if there are none.
    pub fn domain_subset(&self, domain: Domain) -> Option<LabeledDataset> {
        let records: Vec<_> = self
            .records
            .iter()
            .filter(|r| r.domain == domain)
            .cloned()
            .collect();
        (!records.is_empty()).then(|| LabeledDataset {
            records,
            label_space: self.label_space.clone(),
        })
    }

    pub fn domains(&self) -> BTreeSet<Domain> {
        self.records.iter().map(|r| r.domain).collect()
    }

    /// Same records with every domain tag replaced.
    pub fn with_domain(mut self, domain: Domain) -> LabeledDataset {
        for r in &mut self.records {
            r.domain = domain;
        }
        self
    }

    /// Distinct values of an attribute in order of first appearance.
    pub fn attribute_values(&self, attribute: &str) -> Vec<String> {
        let mut seen = HashSet::new();
        self.records
            .iter()
            .filter_map(|r| r.group(attribute))
            .filter(|v| seen.insert(*v))
            .map(str::to_owned)
            .collect()
    }

    pub fn into_records(self) -> Vec<PredictionRecord> {
        self.records
    }
}

/// Read-only selection of dataset records. Indices may repeat, which is how
/// bootstrap resamples are represented.
#[derive(Debug, Clone)]
pub struct DatasetView<'a> {
    dataset: &'a LabeledDataset,
    indices: Vec<usize>,
}

impl<'a> DatasetView<'a> {
    pub fn from_indices(dataset: &'a LabeledDataset, indices: Vec<usize>) -> Self {
        debug_assert!(indices.iter().all(|&i| i < dataset.len()));
        DatasetView { dataset, indices }
    }

    pub fn dataset(&self) -> &'a LabeledDataset {
        self.dataset
    }

    pub fn label_space(&self) -> &'a LabelSpace {
        &self.dataset.label_space
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &'a PredictionRecord> + '_ {
        let records = &self.dataset.records;
        self.indices.iter().map(move |&i| &records[i])
    }

    /// Restricts the view to records matching `selector`, preserving order.
    pub fn select(&self, selector: &SubgroupSelector) -> Result<DatasetView<'a>> {
        let records = &self.dataset.records;
        let mut indices = Vec::new();
        for &i in &self.indices {
            let r = &records[i];
            let value = r
                .group(&selector.attribute)
                .ok_or_else(|| Error::UnknownAttribute {
                    attribute: selector.attribute.clone(),
                    id: r.id.clone(),
                })?;
            if selector.values.contains(value) {
                indices.push(i);
            }
        }
        if indices.is_empty() {
            return Err(Error::EmptySubgroup {
                attribute: selector.attribute.clone(),
                values: selector.values.iter().cloned().collect(),
            });
        }
        Ok(DatasetView {
            dataset: self.dataset,
            indices,
        })
    }
}

pub fn select<'a>(
    dataset: &'a LabeledDataset,
    selector: &SubgroupSelector,
) -> Result<DatasetView<'a>> {
    dataset.view().select(selector)
}

/// Membership predicate over records: `attribute ∈ values`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupSelector {
    pub name: String,
    pub attribute: String,
    pub values: BTreeSet<String>,
}

impl SubgroupSelector {
    pub fn new<I, S>(name: impl Into<String>, attribute: impl Into<String>, values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SubgroupSelector {
            name: name.into(),
            attribute: attribute.into(),
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    /// Selector for a single attribute value, named after the value.
    pub fn single(attribute: impl Into<String>, value: impl Into<String>) -> Self {
        let value = value.into();
        Self::new(value.clone(), attribute, [value])
    }

    pub fn matches(&self, record: &PredictionRecord) -> bool {
        record
            .group(&self.attribute)
            .is_some_and(|v| self.values.contains(v))
    }
}

/// Tolerances for representativity gates, per metric with a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonPolicy {
    #[serde(default = "default_epsilon")]
    pub default: f64,
    #[serde(default)]
    pub per_metric: BTreeMap<String, f64>,
}

pub const DEFAULT_EPSILON: f64 = 0.05;

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

impl Default for EpsilonPolicy {
    fn default() -> Self {
        EpsilonPolicy {
            default: DEFAULT_EPSILON,
            per_metric: BTreeMap::new(),
        }
    }
}

impl EpsilonPolicy {
    pub fn uniform(epsilon: f64) -> Self {
        EpsilonPolicy {
            default: epsilon,
            per_metric: BTreeMap::new(),
        }
    }

    pub fn tolerance(&self, metric: &str) -> f64 {
        self.per_metric.get(metric).copied().unwrap_or(self.default)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = std::iter::once(("default", self.default))
            .chain(self.per_metric.iter().map(|(k, v)| (k.as_str(), *v)))
            .find(|(_, v)| !v.is_finite() || *v < 0.0);
        match bad {
            Some((name, v)) => Err(Error::Config(format!(
                "tolerance {name} = {v} must be a non-negative number"
            ))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, t: &str, p: &str, photo: &str) -> PredictionRecord {
        PredictionRecord::new(id, t, p).with_group("phototype", photo)
    }

    fn bosque_shaped() -> LabeledDataset {
        let mut raw = Vec::new();
        for i in 0..107 {
            raw.push(rec(&format!("l{i}"), "malignant", "malignant", "light"));
        }
        for i in 0..58 {
            raw.push(rec(&format!("d{i}"), "benign", "malignant", "dark"));
        }
        validate_dataset(raw, None).unwrap()
    }

    #[test]
    fn validates_case_study_sized_dataset() {
        let ds = bosque_shaped();
        assert_eq!(ds.len(), 165);
        assert_eq!(
            ds.label_space().labels(),
            &[Label::from("benign"), Label::from("malignant")]
        );
    }

    #[test]
    fn single_correct_record_is_valid_with_declared_space() {
        let ds = validate_dataset(
            vec![PredictionRecord::new("r1", "benign", "benign")],
            Some(LabelSpace::binary("benign", "malignant").unwrap()),
        )
        .unwrap();
        assert_eq!(ds.len(), 1);
    }

    #[test]
    fn single_label_without_declared_space_is_rejected() {
        let err = validate_dataset(vec![PredictionRecord::new("r1", "benign", "benign")], None)
            .unwrap_err();
        assert!(matches!(err, Error::DegenerateLabelSpace(_)));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = validate_dataset(
            vec![
                PredictionRecord::new("r1", "a", "b"),
                PredictionRecord::new("r1", "b", "a"),
            ],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateId(id) if id == "r1"));
    }

    #[test]
    fn empty_and_bad_score_rejected() {
        assert!(matches!(
            validate_dataset(vec![], None),
            Err(Error::EmptyDataset)
        ));
        let err = validate_dataset(
            vec![
                PredictionRecord::new("r1", "a", "b").with_score(1.2),
                PredictionRecord::new("r2", "b", "a"),
            ],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ScoreOutOfRange { .. }));
    }

    #[test]
    fn label_outside_declared_space_is_mixed() {
        let err = validate_dataset(
            vec![PredictionRecord::new("r1", "benign", "nv")],
            Some(LabelSpace::binary("benign", "malignant").unwrap()),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MixedLabelSpaces(_)));
    }

    #[test]
    fn probability_vectors_checked() {
        let space = LabelSpace::binary("benign", "malignant").unwrap();
        let mut r = PredictionRecord::new("r1", "benign", "benign");
        r.probs = Some(vec![0.5, 0.6]);
        assert!(matches!(
            validate_dataset(vec![r.clone()], Some(space.clone())),
            Err(Error::InvalidProbabilities { .. })
        ));
        r.probs = Some(vec![0.2, 0.3, 0.5]);
        assert!(matches!(
            validate_dataset(vec![r], Some(space)),
            Err(Error::MixedLabelSpaces(_))
        ));
    }

    #[test]
    fn infer_puts_positive_last() {
        let obs = [Label::from("malignant"), Label::from("benign")];
        let s = LabelSpace::infer(obs.iter(), Some(&Label::from("benign"))).unwrap();
        assert_eq!(s.positive(), Some(&Label::from("benign")));
        let s = LabelSpace::infer(obs.iter(), Some(&Label::from("malignant"))).unwrap();
        assert_eq!(s.positive(), Some(&Label::from("malignant")));
    }

    #[test]
    fn select_dark_subgroup() {
        let ds = bosque_shaped();
        let view = select(&ds, &SubgroupSelector::single("phototype", "dark")).unwrap();
        assert_eq!(view.len(), 58);
        assert!(view.iter().all(|r| r.group("phototype") == Some("dark")));
    }

    #[test]
    fn select_all_values_is_identity() {
        let ds = bosque_shaped();
        let sel = SubgroupSelector::new("all", "phototype", ["light", "dark"]);
        let view = select(&ds, &sel).unwrap();
        let ids: Vec<_> = view.iter().map(|r| r.id.as_str()).collect();
        let all: Vec<_> = ds.records().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, all);
    }

    #[test]
    fn select_errors() {
        let ds = bosque_shaped();
        let err = select(&ds, &SubgroupSelector::single("phototype", "ultraviolet")).unwrap_err();
        assert!(matches!(err, Error::EmptySubgroup { .. }));
        let err = select(&ds, &SubgroupSelector::single("site", "x")).unwrap_err();
        assert!(matches!(err, Error::UnknownAttribute { .. }));
    }

    #[test]
    fn epsilon_policy_lookup_and_validation() {
        let mut p = EpsilonPolicy::default();
        p.per_metric.insert("precision".into(), 0.1);
        assert_eq!(p.tolerance("precision"), 0.1);
        assert_eq!(p.tolerance("f1"), DEFAULT_EPSILON);
        p.per_metric.insert("f1".into(), -0.1);
        assert!(p.validate().is_err());
    }
}
