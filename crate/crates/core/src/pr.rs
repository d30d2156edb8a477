//! Predictive representativity: the empirical divergence estimator,
//! metric-level PR, and sign interpretation.

use serde::{Deserialize, Serialize};

use crate::divergence::{record_divergence, DivergenceSpec, PredictionMode};
use crate::error::{Error, Result};
use crate::ingest::AuditConfig;
use crate::metrics::{evaluate, MetricName, MetricValue};
use crate::model::{DatasetView, LabeledDataset, SubgroupSelector};

/// What a PR value measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum PrMeasure {
    Divergence {
        spec: DivergenceSpec,
        mode: PredictionMode,
    },
    Metric {
        name: MetricName,
    },
}

impl PrMeasure {
    pub fn orientation(&self) -> Orientation {
        match self {
            PrMeasure::Divergence { .. } => Orientation::DivergenceLike,
            PrMeasure::Metric { .. } => Orientation::HigherIsBetter,
        }
    }

    pub fn label(&self) -> String {
        match self {
            PrMeasure::Divergence { .. } => "divergence".into(),
            PrMeasure::Metric { name } => name.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrEstimate {
    /// `subgroup_term − population_term`.
    pub pr: f64,
    pub subgroup_term: f64,
    pub population_term: f64,
    pub n_subgroup: usize,
    pub n_population: usize,
    pub measure: PrMeasure,
    #[serde(default)]
    pub ci: Option<(f64, f64)>,
}

/// Mean record divergence over a view.
pub fn mean_divergence(
    view: &DatasetView<'_>,
    spec: &DivergenceSpec,
    mode: PredictionMode,
) -> Result<f64> {
    let space = view.label_space();
    // Neumaier summation
    let (mut sum, mut carry) = (0.0_f64, 0.0_f64);
    for r in view.iter() {
        let d = record_divergence(r, space, spec, mode)?;
        let t = sum + d;
        carry += if sum.abs() >= d.abs() {
            (sum - t) + d
        } else {
            (d - t) + sum
        };
        sum = t;
    }
    Ok((sum + carry) / view.len() as f64)
}

/// PR of `subgroup` within `population`, both given as views.
pub fn empirical_pr_view(
    population: &DatasetView<'_>,
    subgroup: &SubgroupSelector,
    spec: &DivergenceSpec,
    mode: PredictionMode,
) -> Result<PrEstimate> {
    let sub = population.select(subgroup)?;
    let subgroup_term = mean_divergence(&sub, spec, mode)?;
    let population_term = mean_divergence(population, spec, mode)?;
    Ok(PrEstimate {
        pr: subgroup_term - population_term,
        subgroup_term,
        population_term,
        n_subgroup: sub.len(),
        n_population: population.len(),
        measure: PrMeasure::Divergence { spec: *spec, mode },
        ci: None,
    })
}

pub fn empirical_pr(
    dataset: &LabeledDataset,
    subgroup: &SubgroupSelector,
    spec: &DivergenceSpec,
    mode: PredictionMode,
) -> Result<PrEstimate> {
    empirical_pr_view(&dataset.view(), subgroup, spec, mode)
}

/// `M(S) − M(P)`, unclamped.
pub fn metric_pr(on_subgroup: &MetricValue, on_population: &MetricValue) -> Result<f64> {
    if on_subgroup.name != on_population.name {
        return Err(Error::MetricMismatch {
            left: on_subgroup.name.to_string(),
            right: on_population.name.to_string(),
        });
    }
    Ok(on_subgroup.defined()? - on_population.defined()?)
}

/// Metric-level PR estimate for one subgroup of a view.
pub fn metric_pr_view(
    population: &DatasetView<'_>,
    subgroup: &SubgroupSelector,
    metric: MetricName,
    positive: &crate::model::Label,
) -> Result<PrEstimate> {
    let sub = population.select(subgroup)?;
    let on_s = evaluate(&sub, positive, metric)?;
    let on_p = evaluate(population, positive, metric)?;
    Ok(PrEstimate {
        pr: metric_pr(&on_s, &on_p)?,
        subgroup_term: on_s.defined()?,
        population_term: on_p.defined()?,
        n_subgroup: sub.len(),
        n_population: population.len(),
        measure: PrMeasure::Metric { name: metric },
        ci: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Bigger is worse (divergences, error rates).
    DivergenceLike,
    /// Bigger is better (precision, accuracy, AUC, ...).
    HigherIsBetter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpretationTag {
    Representative,
    Underperforms,
    Overoptimized,
}

impl InterpretationTag {
    pub fn as_str(self) -> &'static str {
        match self {
            InterpretationTag::Representative => "representative",
            InterpretationTag::Underperforms => "underperforms",
            InterpretationTag::Overoptimized => "overoptimized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interpretation {
    pub tag: InterpretationTag,
    /// Positive always means the subgroup is served worse.
    pub normalized_pr: f64,
}

pub fn interpret(pr: f64, orientation: Orientation, tolerance: f64) -> Interpretation {
    let normalized_pr = match orientation {
        Orientation::DivergenceLike => pr,
        Orientation::HigherIsBetter => -pr,
    };
    let tag = if normalized_pr > tolerance {
        InterpretationTag::Underperforms
    } else if normalized_pr < -tolerance {
        InterpretationTag::Overoptimized
    } else {
        InterpretationTag::Representative
    };
    Interpretation { tag, normalized_pr }
}

/// One (group, metric) cell of a PR table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrRow {
    pub group: String,
    pub n: usize,
    pub metric: MetricName,
    pub value: MetricValue,
    pub overall: MetricValue,
    pub pr: Option<f64>,
    pub interpretation: Option<Interpretation>,
}

pub const OVERALL: &str = "overall";

/// Rows for the overall population followed by every selector, each crossed
/// with every metric, in the given order. PR is always taken against the
/// whole view.
pub fn pr_table_view(
    population: &DatasetView<'_>,
    group_selectors: &[SubgroupSelector],
    metric_names: &[MetricName],
    config: &AuditConfig,
) -> Result<Vec<PrRow>> {
    if metric_names.is_empty() {
        return Ok(Vec::new());
    }
    let positive = &config.positive_label;
    let overall = metric_names
        .iter()
        .map(|&m| {
            evaluate(population, positive, m).map_err(|e| e.context(format!("{m} on {OVERALL}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut groups: Vec<(String, DatasetView<'_>)> = vec![(OVERALL.into(), population.clone())];
    for sel in group_selectors {
        let view = population
            .select(sel)
            .map_err(|e| e.context(format!("group {}", sel.name)))?;
        groups.push((sel.name.clone(), view));
    }

    let mut rows = Vec::with_capacity(groups.len() * metric_names.len());
    for (name, view) in &groups {
        for (&metric, overall) in metric_names.iter().zip(&overall) {
            let value = if name == OVERALL {
                *overall
            } else {
                evaluate(view, positive, metric)
                    .map_err(|e| e.context(format!("{metric} on {name}")))?
            };
            let pr = metric_pr(&value, overall).ok();
            rows.push(PrRow {
                group: name.clone(),
                n: view.len(),
                metric,
                value,
                overall: *overall,
                pr,
                interpretation: pr.map(|p| {
                    interpret(
                        p,
                        Orientation::HigherIsBetter,
                        config.epsilon_policy.tolerance(metric.as_str()),
                    )
                }),
            });
        }
    }
    Ok(rows)
}

pub fn pr_table(
    dataset: &LabeledDataset,
    group_selectors: &[SubgroupSelector],
    metric_names: &[MetricName],
    config: &AuditConfig,
) -> Result<Vec<PrRow>> {
    pr_table_view(&dataset.view(), group_selectors, metric_names, config)
}
