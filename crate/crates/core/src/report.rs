//! Audit reports shaped like a per-group metric table, and their Markdown,
//! JSON and CSV renderings.
//!
//! Fixed precision everywhere: metric values, PR and z with three decimals;
//! p-values with three decimals when `p >= 0.001`, otherwise scientific with
//! a two-decimal mantissa (`4.26e-09`).

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::divergence::PredictionMode;
use crate::error::{Error, Result};
use crate::ingest::AuditConfig;
use crate::metrics::{evaluate, MetricName, MetricValue};
use crate::model::{DatasetView, Domain, LabeledDataset, SubgroupSelector};
use crate::pr::{
    empirical_pr_view, interpret, pr_table_view, Interpretation, Orientation, PrEstimate, OVERALL,
};
use crate::stats::{
    bootstrap, pooled_two_proportion_z_with, z_from_standard_errors, BootstrapResult, ZMode,
    ZTestResult,
};
use crate::transport::{
    check_external_transportability, check_metric_representativity, gate, GateResult,
    TransportOutcome,
};

pub const TOOL_VERSION: &str = concat!("praudit ", env!("CARGO_PKG_VERSION"));

/// Gate measure name used for divergence PR tolerances.
pub const DIVERGENCE_MEASURE: &str = "divergence";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub path: String,
    pub sha256: String,
}

impl DatasetInfo {
    pub fn from_file(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        let digest = Sha256::digest(&bytes);
        Ok(DatasetInfo {
            path: path.display().to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub tool_version: String,
    pub datasets: Vec<DatasetInfo>,
    pub n_records: usize,
    pub label_space: Vec<String>,
    /// Effective configuration, after any command-line overrides.
    pub config: AuditConfig,
    pub divergence: String,
    pub bootstrap_method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub name: String,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCell {
    pub group: String,
    pub value: MetricValue,
    pub pr: Option<f64>,
    pub interpretation: Option<Interpretation>,
}

/// Rendered strings of a row, at the report's fixed precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowText {
    pub overall: String,
    pub values: Vec<String>,
    pub prs: Vec<String>,
    pub z: String,
    pub p: String,
    pub stars: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub metric: MetricName,
    pub overall: MetricValue,
    pub groups: Vec<GroupCell>,
    /// Difference between the first two groups; only with exactly two.
    pub z: Option<ZTestResult>,
    pub text: RowText,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub group: String,
    pub estimate: PrEstimate,
    pub bootstrap: Option<BootstrapResult>,
    pub interpretation: Interpretation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpretationEntry {
    pub group: String,
    pub measure: String,
    pub interpretation: Interpretation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSection {
    pub domain: Domain,
    pub n: usize,
    pub groups: Vec<GroupSummary>,
    pub rows: Vec<ReportRow>,
    pub divergence: Vec<DivergenceRow>,
    pub interpretations: Vec<InterpretationEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub metadata: ReportMetadata,
    pub sections: Vec<DomainSection>,
    pub gates: Vec<GateResult>,
    pub transport: Vec<TransportOutcome>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }
}

/// Process exit status: 0 when every gate passes (or there are none), 1 when
/// any gate fails, 2 on an input or configuration error.
pub fn exit_code<E>(outcome: &std::result::Result<Vec<GateResult>, E>) -> i32 {
    match outcome {
        Ok(gates) if gates.iter().all(|g| g.passed) => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}

fn metrics_for(
    dataset: &LabeledDataset,
    config: &AuditConfig,
    notes: &mut Vec<String>,
) -> Vec<MetricName> {
    if let Some(m) = &config.metrics {
        return m.clone();
    }
    match dataset.records().iter().find(|r| r.score.is_none()) {
        None => MetricName::TABLE_ORDER.to_vec(),
        Some(r) => {
            notes.push(format!(
                "AUC-PR and AUC-ROC omitted: record {:?} (and possibly others) has no score",
                r.id
            ));
            MetricName::TABLE_ORDER
                .into_iter()
                .filter(|m| !m.needs_scores())
                .collect()
        }
    }
}

fn metric_z(
    metric: MetricName,
    a: (&DatasetView<'_>, &MetricValue),
    b: (&DatasetView<'_>, &MetricValue),
    config: &AuditConfig,
) -> Result<ZTestResult> {
    let stars = &config.alpha_stars;
    let (Some(va), Some(vb)) = (a.1.value, b.1.value) else {
        return Ok(ZTestResult::degenerate("metric undefined in a group"));
    };
    let ratio = !matches!(
        metric,
        MetricName::F1 | MetricName::AucRoc | MetricName::AucPr
    );
    match config.z_mode {
        ZMode::GroupSize => Ok(pooled_two_proportion_z_with(
            va,
            a.0.len() as u64,
            vb,
            b.0.len() as u64,
            stars,
        )),
        ZMode::MetricSupport if ratio => Ok(pooled_two_proportion_z_with(
            va,
            a.1.support,
            vb,
            b.1.support,
            stars,
        )),
        ZMode::MetricSupport => {
            let positive = &config.positive_label;
            let stat =
                |v: &DatasetView<'_>| evaluate(v, positive, metric).ok().and_then(|m| m.value);
            let se = |view: &DatasetView<'_>| -> Result<f64> {
                Ok(bootstrap(view, stat, &config.bootstrap, None)?.std_error)
            };
            Ok(z_from_standard_errors(va - vb, se(a.0)?, se(b.0)?, stars))
        }
    }
}

fn build_section(
    view: &DatasetView<'_>,
    domain: Domain,
    selectors: &[SubgroupSelector],
    metrics: &[MetricName],
    config: &AuditConfig,
    gates: &mut Vec<GateResult>,
    notes: &mut Vec<String>,
) -> Result<DomainSection> {
    let table = pr_table_view(view, selectors, metrics, config)?;
    let group_views = selectors
        .iter()
        .map(|s| view.select(s))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(metrics.len());
    let mut interpretations = Vec::new();
    for &metric in metrics {
        let cells: Vec<_> = table.iter().filter(|r| r.metric == metric).collect();
        let overall = cells
            .iter()
            .find(|r| r.group == OVERALL)
            .map(|r| r.value)
            .expect("overall row");
        let groups: Vec<GroupCell> = cells
            .iter()
            .filter(|r| r.group != OVERALL)
            .map(|r| GroupCell {
                group: r.group.clone(),
                value: r.value,
                pr: r.pr,
                interpretation: r.interpretation,
            })
            .collect();
        let z = match (&group_views[..], &groups[..]) {
            ([va, vb], [ca, cb]) => Some(
                metric_z(metric, (va, &ca.value), (vb, &cb.value), config)
                    .map_err(|e| e.context(format!("{domain} {metric} z")))?,
            ),
            _ => None,
        };

        let pr_values: Vec<(String, Option<f64>)> = groups
            .iter()
            .map(|c| (metric.as_str().to_owned(), c.pr))
            .collect();
        for (cell, pv) in groups.iter().zip(&pr_values) {
            match check_metric_representativity(
                std::slice::from_ref(pv),
                &config.epsilon_policy,
                &cell.group,
                domain,
            ) {
                Ok(g) => gates.extend(g),
                Err(_) => notes.push(format!(
                    "{domain}: no {metric} gate for {}: PR undefined",
                    cell.group
                )),
            }
            if let Some(i) = cell.interpretation {
                interpretations.push(InterpretationEntry {
                    group: cell.group.clone(),
                    measure: metric.as_str().to_owned(),
                    interpretation: i,
                });
            }
        }
        rows.push(ReportRow {
            text: row_text(&overall, &groups, z.as_ref()),
            metric,
            overall,
            groups,
            z,
        });
    }

    let spec = config.divergence_spec();
    let tolerance = config.epsilon_policy.tolerance(DIVERGENCE_MEASURE);
    let mut divergence = Vec::with_capacity(selectors.len());
    for sel in selectors {
        let mut estimate = empirical_pr_view(view, sel, &spec, config.mode)
            .map_err(|e| e.context(format!("{domain} divergence PR for {}", sel.name)))?;
        let stat = |v: &DatasetView<'_>| {
            empirical_pr_view(v, sel, &spec, config.mode)
                .ok()
                .map(|e| e.pr)
        };
        let boot = bootstrap(view, stat, &config.bootstrap, Some(selectors)).ok();
        estimate.ci = boot.as_ref().map(|b| (b.lo, b.hi));
        let interpretation = interpret(estimate.pr, Orientation::DivergenceLike, tolerance);
        gates.push(gate(
            estimate.pr,
            tolerance,
            DIVERGENCE_MEASURE,
            &sel.name,
            domain,
        ));
        interpretations.push(InterpretationEntry {
            group: sel.name.clone(),
            measure: DIVERGENCE_MEASURE.into(),
            interpretation,
        });
        divergence.push(DivergenceRow {
            group: sel.name.clone(),
            estimate,
            bootstrap: boot,
            interpretation,
        });
    }

    Ok(DomainSection {
        domain,
        n: view.len(),
        groups: selectors
            .iter()
            .zip(&group_views)
            .map(|(s, v)| GroupSummary {
                name: s.name.clone(),
                n: v.len(),
            })
            .collect(),
        rows,
        divergence,
        interpretations,
    })
}

/// Builds the full audit: one section per domain present, metric and
/// divergence gates per group, and transportability gates on the target
/// when both domains are present.
pub fn build_report(
    dataset: &LabeledDataset,
    config: &AuditConfig,
    sources: Vec<DatasetInfo>,
) -> Result<AuditReport> {
    config.validate()?;
    let mut notes = Vec::new();
    let metrics = metrics_for(dataset, config, &mut notes);
    if config.mode == PredictionMode::Probabilistic
        && dataset
            .records()
            .iter()
            .any(|r| r.score.is_none() && r.probs.is_none())
    {
        return Err(Error::Config(
            "probabilistic mode needs a score or probability vector on every record".into(),
        ));
    }

    let mut gates = Vec::new();
    let mut sections = Vec::new();
    let mut per_domain = Vec::new();
    for domain in dataset.domains() {
        let subset = dataset.domain_subset(domain).expect("domain present");
        let selectors = config.selectors(&subset);
        let section = build_section(
            &subset.view(),
            domain,
            &selectors,
            &metrics,
            config,
            &mut gates,
            &mut notes,
        )
        .map_err(|e| e.context(format!("{domain} section")))?;
        sections.push(section);
        per_domain.push((domain, subset, selectors));
    }

    let mut transport = Vec::new();
    if let [(Domain::Source, source, _), (Domain::Target, target, selectors)] = &per_domain[..] {
        for sel in selectors {
            let outcome = check_external_transportability(target, sel, config, Some(source))?;
            gates.push(outcome.gate.clone());
            transport.push(outcome);
        }
    }

    Ok(AuditReport {
        metadata: ReportMetadata {
            tool_version: TOOL_VERSION.into(),
            datasets: sources,
            n_records: dataset.len(),
            label_space: dataset
                .label_space()
                .labels()
                .iter()
                .map(|l| l.to_string())
                .collect(),
            divergence: config.divergence_spec().to_string(),
            bootstrap_method: "percentile, stratified by group".into(),
            config: config.clone(),
        },
        sections,
        gates,
        transport,
        notes,
    })
}

pub fn fmt_value(v: Option<f64>) -> String {
    match v {
        Some(v) => fmt_fixed(v),
        None => "-".into(),
    }
}

fn fmt_fixed(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Three decimals when `p >= 0.001`, else `d.dde-XX`.
pub fn fmt_p(p: f64) -> String {
    if p >= 0.001 {
        return format!("{p:.3}");
    }
    let s = format!("{p:.2e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let exp: i32 = exp.parse().unwrap_or(0);
            let sign = if exp < 0 { '-' } else { '+' };
            format!("{mantissa}e{sign}{:02}", exp.abs())
        }
        None => s,
    }
}

fn row_text(overall: &MetricValue, groups: &[GroupCell], z: Option<&ZTestResult>) -> RowText {
    RowText {
        overall: fmt_value(overall.value),
        values: groups.iter().map(|g| fmt_value(g.value.value)).collect(),
        prs: groups.iter().map(|g| fmt_value(g.pr)).collect(),
        z: fmt_value(z.and_then(|z| z.z)),
        p: z.and_then(|z| z.p_two_sided)
            .map(fmt_p)
            .unwrap_or_else(|| "-".into()),
        stars: z.map(|z| z.stars.clone()).unwrap_or_default(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Markdown,
    Json,
    Csv,
}

impl std::str::FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "md" | "markdown" => Ok(RenderFormat::Markdown),
            "json" => Ok(RenderFormat::Json),
            "csv" => Ok(RenderFormat::Csv),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

pub fn render(report: &AuditReport, format: RenderFormat) -> String {
    match format {
        RenderFormat::Markdown => render_markdown(report),
        RenderFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        RenderFormat::Csv => render_csv(report),
    }
}

pub fn parse_json_report(text: &str) -> Result<AuditReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: "<report>".into(),
        reason: e.to_string(),
    })
}

fn title_case(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn render_markdown(report: &AuditReport) -> String {
    let m = &report.metadata;
    let cfg = &m.config;
    let mut out = String::new();
    let _ = writeln!(out, "# Predictive representativity audit\n");
    let _ = writeln!(out, "- tool: {}", m.tool_version);
    for d in &m.datasets {
        let _ = writeln!(out, "- data: `{}` (sha256 `{}`)", d.path, d.sha256);
    }
    let _ = writeln!(out, "- records: {}", m.n_records);
    let _ = writeln!(
        out,
        "- label space: {} (positive: {})",
        m.label_space.join(", "),
        cfg.positive_label
    );
    let _ = writeln!(
        out,
        "- divergence: {} ({} mode)",
        m.divergence,
        cfg.mode.as_str()
    );
    let _ = writeln!(out, "- z statistic: {} mode", cfg.z_mode);
    let [a1, a2, a3] = cfg.alpha_stars.0;
    let _ = writeln!(
        out,
        "- significance: * p <= {a1}, ** p <= {a2}, *** p <= {a3}"
    );
    let _ = writeln!(
        out,
        "- bootstrap: {}, {} replicates, seed {}, level {}",
        m.bootstrap_method, cfg.bootstrap.replicates, cfg.bootstrap.seed, cfg.bootstrap.level
    );
    let _ = writeln!(out, "- default tolerance: {}", cfg.epsilon_policy.default);

    for section in &report.sections {
        let _ = writeln!(
            out,
            "\n## {} domain (n={})\n",
            title_case(section.domain.as_str()),
            section.n
        );
        if section.rows.is_empty() {
            let _ = writeln!(out, "No metrics requested.");
        } else {
            let mut header = format!("| Metric | Overall (n={})", section.n);
            for g in &section.groups {
                let _ = write!(header, " | {} (n={})", title_case(&g.name), g.n);
            }
            for g in &section.groups {
                let _ = write!(header, " | PR({})", title_case(&g.name));
            }
            header.push_str(" | Z | p | Sig. |");
            let cols = 1 + 1 + 2 * section.groups.len() + 3;
            let _ = writeln!(out, "{header}");
            let _ = writeln!(out, "|{}", "---|".repeat(cols));
            for row in &section.rows {
                let t = &row.text;
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    row.metric.title(),
                    t.overall,
                    t.values.join(" | "),
                    t.prs.join(" | "),
                    t.z,
                    t.p,
                    t.stars
                );
            }
        }

        if !section.divergence.is_empty() {
            let level = cfg.bootstrap.level * 100.0;
            let _ = writeln!(out, "\n### Divergence PR ({})\n", m.divergence);
            let _ = writeln!(
                out,
                "| Group | n | Subgroup term | Population term | PR | {level}% CI | Interpretation |"
            );
            let _ = writeln!(out, "|---|---|---|---|---|---|---|");
            for d in &section.divergence {
                let e = &d.estimate;
                let ci =
                    e.ci.map(|(lo, hi)| format!("[{}, {}]", fmt_fixed(lo), fmt_fixed(hi)))
                        .unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    title_case(&d.group),
                    e.n_subgroup,
                    fmt_fixed(e.subgroup_term),
                    fmt_fixed(e.population_term),
                    fmt_fixed(e.pr),
                    ci,
                    d.interpretation.tag.as_str()
                );
            }
        }

        if !section.rows.is_empty() && !section.groups.is_empty() {
            let _ = writeln!(out, "\n### Interpretation\n");
            let mut header = String::from("| Measure");
            for g in &section.groups {
                let _ = write!(header, " | {}", title_case(&g.name));
            }
            let _ = writeln!(out, "{header} |");
            let _ = writeln!(out, "|{}", "---|".repeat(section.groups.len() + 1));
            let mut measures: Vec<&str> = Vec::new();
            for e in &section.interpretations {
                if !measures.contains(&e.measure.as_str()) {
                    measures.push(&e.measure);
                }
            }
            for measure in measures {
                let cells: Vec<String> = section
                    .groups
                    .iter()
                    .map(|g| {
                        section
                            .interpretations
                            .iter()
                            .find(|e| e.measure == measure && e.group == g.name)
                            .map(|e| e.interpretation.tag.as_str().to_owned())
                            .unwrap_or_else(|| "-".into())
                    })
                    .collect();
                let _ = writeln!(out, "| {measure} | {} |", cells.join(" | "));
            }
        }
    }

    let _ = writeln!(out, "\n## Gates\n");
    if report.gates.is_empty() {
        let _ = writeln!(out, "No gates configured.");
    } else {
        let _ = writeln!(
            out,
            "| Domain | Group | Measure | PR | Tolerance | Margin | Result |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for g in &report.gates {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} |",
                g.domain,
                title_case(&g.group),
                g.metric,
                fmt_fixed(g.pr),
                g.epsilon,
                fmt_fixed(g.margin),
                if g.passed { "pass" } else { "FAIL" }
            );
        }
        let failed = report.gates.iter().filter(|g| !g.passed).count();
        let _ = writeln!(
            out,
            "\n{} of {} gates passed.",
            report.gates.len() - failed,
            report.gates.len()
        );
    }

    if !report.transport.is_empty() {
        let _ = writeln!(out, "\n## Transportability\n");
        let _ = writeln!(out, "| Group | Measure | Target PR | Source PR | Shift | Tolerance | Result | Overall floor |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|---|");
        for t in &report.transport {
            let floor = t
                .overall_floor
                .as_ref()
                .map(|f| {
                    format!(
                        "{} {} vs {} ({})",
                        f.metric,
                        fmt_value(f.achieved),
                        f.minimum,
                        if f.met { "met" } else { "not met" }
                    )
                })
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                title_case(&t.gate.group),
                t.gate.metric,
                fmt_fixed(t.estimate.pr),
                fmt_value(t.source_pr),
                fmt_value(t.pr_shift),
                t.gate.epsilon,
                if t.gate.passed { "pass" } else { "FAIL" },
                floor
            );
        }
    }

    if !report.notes.is_empty() {
        let _ = writeln!(out, "\n## Notes\n");
        for n in &report.notes {
            let _ = writeln!(out, "- {n}");
        }
    }

    let _ = writeln!(out, "\n## Configuration\n\n```toml\n{}```", cfg.to_toml());
    out
}

fn render_csv(report: &AuditReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let row = |w: &mut csv::Writer<Vec<u8>>, fields: &[String]| {
        w.write_record(fields).expect("in-memory csv")
    };
    row(
        &mut w,
        &[
            "domain", "measure", "group", "n", "value", "pr", "z", "p", "stars", "ci_lo", "ci_hi",
        ]
        .map(String::from),
    );
    let full = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for s in &report.sections {
        for r in &s.rows {
            row(
                &mut w,
                &[
                    s.domain.to_string(),
                    r.metric.to_string(),
                    OVERALL.into(),
                    s.n.to_string(),
                    full(r.overall.value),
                    "0".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ],
            );
            for (cell, g) in r.groups.iter().zip(&s.groups) {
                let z = r.z.as_ref();
                row(
                    &mut w,
                    &[
                        s.domain.to_string(),
                        r.metric.to_string(),
                        cell.group.clone(),
                        g.n.to_string(),
                        full(cell.value.value),
                        full(cell.pr),
                        full(z.and_then(|z| z.z)),
                        full(z.and_then(|z| z.p_two_sided)),
                        z.map(|z| z.stars.clone()).unwrap_or_default(),
                        String::new(),
                        String::new(),
                    ],
                );
            }
        }
        for d in &s.divergence {
            let e = &d.estimate;
            row(
                &mut w,
                &[
                    s.domain.to_string(),
                    DIVERGENCE_MEASURE.into(),
                    d.group.clone(),
                    e.n_subgroup.to_string(),
                    e.subgroup_term.to_string(),
                    e.pr.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    full(e.ci.map(|c| c.0)),
                    full(e.ci.map(|c| c.1)),
                ],
            );
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_formatting() {
        assert_eq!(fmt_p(4.26e-9), "4.26e-09");
        assert_eq!(fmt_p(1.68e-4), "1.68e-04");
        assert_eq!(fmt_p(6.16e-4), "6.16e-04");
        assert_eq!(fmt_p(0.006), "0.006");
        assert_eq!(fmt_p(0.0951), "0.095");
        assert_eq!(fmt_p(1.0), "1.000");
        assert_eq!(fmt_p(5.93e-10), "5.93e-10");
    }

    #[test]
    fn fixed_precision_values() {
        assert_eq!(fmt_value(Some(0.89743)), "0.897");
        assert_eq!(fmt_value(Some(-0.2956)), "-0.296");
        assert_eq!(fmt_value(Some(-0.0001)), "0.000");
        assert_eq!(fmt_value(None), "-");
    }

    #[test]
    fn exit_codes() {
        let pass = gate(0.01, 0.05, "f1", "dark", Domain::Target);
        let fail = gate(-0.221, 0.1, "f1", "dark", Domain::Target);
        assert_eq!(exit_code::<()>(&Ok(vec![])), 0);
        assert_eq!(exit_code::<()>(&Ok(vec![pass.clone()])), 0);
        assert_eq!(exit_code::<()>(&Ok(vec![pass, fail])), 1);
        assert_eq!(exit_code(&Err::<Vec<GateResult>, _>("bad config")), 2);
    }

    #[test]
    fn render_format_parse() {
        assert_eq!(
            "md".parse::<RenderFormat>().unwrap(),
            RenderFormat::Markdown
        );
        assert!("xml".parse::<RenderFormat>().is_err());
    }
}
