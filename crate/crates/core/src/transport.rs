//! Representativity gates: per-metric tolerances, the external
//! transportability criterion on a target domain, and demographic parity
//! validated against PR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::AuditConfig;
use crate::metrics::{evaluate, MetricName};
use crate::model::{DatasetView, Domain, EpsilonPolicy, Label, LabeledDataset, SubgroupSelector};
use crate::pr::{empirical_pr_view, metric_pr_view, PrEstimate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub passed: bool,
    /// `epsilon − |pr|`; negative means the gate failed.
    pub margin: f64,
    pub metric: String,
    pub group: String,
    pub epsilon: f64,
    pub domain: Domain,
    pub pr: f64,
}

pub fn gate(
    pr: f64,
    epsilon: f64,
    metric: impl Into<String>,
    group: impl Into<String>,
    domain: Domain,
) -> GateResult {
    let margin = epsilon - pr.abs();
    GateResult {
        passed: margin >= 0.0,
        margin,
        metric: metric.into(),
        group: group.into(),
        epsilon,
        domain,
        pr,
    }
}

/// One gate per metric PR; the set passes iff every gate passes.
pub fn check_metric_representativity(
    pr_values: &[(String, Option<f64>)],
    policy: &EpsilonPolicy,
    group: &str,
    domain: Domain,
) -> Result<Vec<GateResult>> {
    pr_values
        .iter()
        .map(|(metric, pr)| {
            let pr = pr.ok_or_else(|| Error::UndefinedMetric {
                metric: metric.clone(),
            })?;
            Ok(gate(
                pr,
                policy.tolerance(metric),
                metric.clone(),
                group,
                domain,
            ))
        })
        .collect()
}

pub fn all_pass(gates: &[GateResult]) -> bool {
    gates.iter().all(|g| g.passed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceFloor {
    pub metric: MetricName,
    pub minimum: f64,
    pub achieved: Option<f64>,
    pub met: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportOutcome {
    pub gate: GateResult,
    pub estimate: PrEstimate,
    /// Overall-performance assumption on the target; informational only.
    pub overall_floor: Option<PerformanceFloor>,
    /// PR of the same subgroup on the source domain, when supplied.
    pub source_pr: Option<f64>,
    /// `target PR − source PR`; informational only.
    pub pr_shift: Option<f64>,
}

fn measure_pr(
    view: &DatasetView<'_>,
    subgroup: &SubgroupSelector,
    config: &AuditConfig,
) -> Result<PrEstimate> {
    match config.transport.metric {
        Some(metric) => metric_pr_view(view, subgroup, metric, &config.positive_label),
        None => empirical_pr_view(view, subgroup, &config.divergence_spec(), config.mode),
    }
}

fn not_assessable(e: Error, subgroup: &SubgroupSelector) -> Error {
    match e {
        Error::EmptySubgroup { .. } | Error::UnknownAttribute { .. } => {
            Error::NotAssessable(format!(
                "subgroup {} ({} in {:?}) is absent from the target: {e}",
                subgroup.name, subgroup.attribute, subgroup.values
            ))
        }
        other => other,
    }
}

/// Gates `|PR(P′, S′, A)| ≤ ε` on a target-domain dataset. The measure is
/// the divergence PR unless `config.transport.metric` names a metric.
pub fn check_external_transportability(
    target: &LabeledDataset,
    subgroup: &SubgroupSelector,
    config: &AuditConfig,
    source: Option<&LabeledDataset>,
) -> Result<TransportOutcome> {
    if let Some(r) = target.records().iter().find(|r| r.domain != Domain::Target) {
        return Err(Error::DomainMismatch {
            id: r.id.clone(),
            expected: Domain::Target.to_string(),
            found: r.domain.to_string(),
        });
    }
    let view = target.view();
    let estimate = measure_pr(&view, subgroup, config).map_err(|e| not_assessable(e, subgroup))?;
    let gate = gate(
        estimate.pr,
        config.transport_epsilon(),
        estimate.measure.label(),
        &subgroup.name,
        Domain::Target,
    );

    let overall_floor = match config.transport.min_overall_accuracy {
        Some(minimum) => {
            let achieved = evaluate(&view, &config.positive_label, MetricName::Accuracy)?.value;
            Some(PerformanceFloor {
                metric: MetricName::Accuracy,
                minimum,
                achieved,
                met: achieved.is_some_and(|a| a >= minimum),
            })
        }
        None => None,
    };

    let source_pr = match source {
        Some(src) => match measure_pr(&src.view(), subgroup, config) {
            Ok(est) => Some(est.pr),
            Err(Error::EmptySubgroup { .. } | Error::UnknownAttribute { .. }) => None,
            Err(e) => return Err(e.context("source domain")),
        },
        None => None,
    };

    Ok(TransportOutcome {
        pr_shift: source_pr.map(|s| estimate.pr - s),
        gate,
        estimate,
        overall_floor,
        source_pr,
    })
}

fn positive_rate(view: &DatasetView<'_>, positive: &Label) -> f64 {
    view.iter().filter(|r| r.y_pred == *positive).count() as f64 / view.len() as f64
}

/// `|P(Ŷ = positive | a) − P(Ŷ = positive | b)|`.
pub fn demographic_parity_gap(
    view: &DatasetView<'_>,
    a: &SubgroupSelector,
    b: &SubgroupSelector,
    positive: &Label,
) -> Result<f64> {
    view.label_space().index_of(positive)?;
    let ra = positive_rate(&view.select(a)?, positive);
    let rb = positive_rate(&view.select(b)?, positive);
    Ok((ra - rb).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityOutcome {
    pub validated: bool,
    /// Largest pairwise demographic-parity gap.
    pub gap: f64,
    pub parity_tolerance: f64,
    pub parity_holds: bool,
    pub estimates: Vec<(String, PrEstimate)>,
    pub gates: Vec<GateResult>,
}

/// Demographic parity is only predictively meaningful when every group's
/// divergence PR is also within tolerance.
pub fn validated_parity(
    dataset: &LabeledDataset,
    selectors: &[SubgroupSelector],
    config: &AuditConfig,
) -> Result<ParityOutcome> {
    if selectors.len() < 2 {
        return Err(Error::Config(format!(
            "parity needs at least two groups, got {}",
            selectors.len()
        )));
    }
    let view = dataset.view();
    let mut gap: f64 = 0.0;
    for (i, a) in selectors.iter().enumerate() {
        for b in &selectors[i + 1..] {
            gap = gap.max(demographic_parity_gap(&view, a, b, &config.positive_label)?);
        }
    }
    let spec = config.divergence_spec();
    let epsilon = config.epsilon_policy.tolerance("divergence");
    let mut estimates = Vec::with_capacity(selectors.len());
    let mut gates = Vec::with_capacity(selectors.len());
    for sel in selectors {
        let est = empirical_pr_view(&view, sel, &spec, config.mode)?;
        gates.push(gate(
            est.pr,
            epsilon,
            "divergence",
            &sel.name,
            Domain::Source,
        ));
        estimates.push((sel.name.clone(), est));
    }
    let parity_holds = gap <= config.parity_tolerance;
    Ok(ParityOutcome {
        validated: parity_holds && all_pass(&gates),
        gap,
        parity_tolerance: config.parity_tolerance,
        parity_holds,
        estimates,
        gates,
    })
}
