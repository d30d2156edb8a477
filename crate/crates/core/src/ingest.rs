//! Prediction dumps (CSV / JSON) and audit configuration (TOML).
//!
//! CSV layout: a header row with the required columns `id`, `y_true` and
//! `y_pred`; optional `score` (probability of the positive label), `probs`
//! (`;`-separated probability vector), and `domain` (`source` | `target`,
//! case-insensitive, default `source`). Every other column is a group
//! attribute; an empty cell leaves the attribute unset for that record.
//! JSON is an array of flat objects with the same keys.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::divergence::{DivergenceKind, DivergenceSpec, PredictionMode, DEFAULT_KL_SMOOTHING};
use crate::error::{Error, Result};
use crate::metrics::MetricName;
use crate::model::{
    validate_dataset, Domain, EpsilonPolicy, Label, LabelSpace, LabeledDataset, PredictionRecord,
    SubgroupSelector,
};
use crate::stats::{AlphaThresholds, BootstrapConfig, ZMode};

const RESERVED: [&str; 6] = ["id", "y_true", "y_pred", "score", "probs", "domain"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> DataFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

/// A named subgroup: records whose group attribute takes one of `values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportSettings {
    /// Metric gated on the target; absent means the divergence PR.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricName>,
    /// Overrides the default tolerance for this gate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Reported next to the gate, never folded into it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_overall_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

pub const DEFAULT_PARITY_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub positive_label: Label,
    pub group_attribute: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_space: Option<LabelSpace>,
    #[serde(default)]
    pub divergence: DivergenceKind,
    #[serde(default = "default_kl_smoothing")]
    pub kl_smoothing_epsilon: f64,
    #[serde(default)]
    pub mode: PredictionMode,
    /// Empty means one group per distinct attribute value.
    #[serde(default)]
    pub groups: Vec<GroupSpec>,
    /// Absent means every metric the data supports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Vec<MetricName>>,
    #[serde(default, rename = "epsilon")]
    pub epsilon_policy: EpsilonPolicy,
    #[serde(default = "default_parity_tolerance")]
    pub parity_tolerance: f64,
    #[serde(default)]
    pub bootstrap: BootstrapConfig,
    #[serde(default)]
    pub alpha_stars: AlphaThresholds,
    #[serde(default)]
    pub z_mode: ZMode,
    #[serde(default)]
    pub transport: TransportSettings,
    #[serde(default)]
    pub output: OutputSettings,
}

fn default_kl_smoothing() -> f64 {
    DEFAULT_KL_SMOOTHING
}

fn default_parity_tolerance() -> f64 {
    DEFAULT_PARITY_TOLERANCE
}

impl AuditConfig {
    /// Config with every optional field at its default.
    pub fn for_attribute(
        positive_label: impl Into<String>,
        group_attribute: impl Into<String>,
    ) -> Self {
        AuditConfig {
            positive_label: Label::new(positive_label),
            group_attribute: group_attribute.into(),
            label_space: None,
            divergence: DivergenceKind::default(),
            kl_smoothing_epsilon: DEFAULT_KL_SMOOTHING,
            mode: PredictionMode::default(),
            groups: Vec::new(),
            metrics: None,
            epsilon_policy: EpsilonPolicy::default(),
            parity_tolerance: DEFAULT_PARITY_TOLERANCE,
            bootstrap: BootstrapConfig::default(),
            alpha_stars: AlphaThresholds::default(),
            z_mode: ZMode::default(),
            transport: TransportSettings::default(),
            output: OutputSettings::default(),
        }
    }

    pub fn divergence_spec(&self) -> DivergenceSpec {
        DivergenceSpec {
            kind: self.divergence,
            kl_smoothing_epsilon: self.kl_smoothing_epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if !(self.kl_smoothing_epsilon > 0.0 && self.kl_smoothing_epsilon < 0.5) {
            return cfg(format!(
                "kl_smoothing_epsilon = {} must lie in (0, 0.5)",
                self.kl_smoothing_epsilon
            ));
        }
        if let Some(space) = &self.label_space {
            if !space.contains(&self.positive_label) {
                return cfg(format!(
                    "positive_label {:?} is not in label_space",
                    self.positive_label.as_str()
                ));
            }
        }
        if self.group_attribute.trim().is_empty() {
            return cfg("group_attribute must not be empty".into());
        }
        for g in &self.groups {
            if g.values.is_empty() {
                return cfg(format!("group {:?} lists no values", g.name));
            }
        }
        self.epsilon_policy.validate()?;
        if !(self.parity_tolerance.is_finite() && self.parity_tolerance >= 0.0) {
            return cfg(format!(
                "parity_tolerance = {} must be non-negative",
                self.parity_tolerance
            ));
        }
        if let Some(e) = self.transport.epsilon {
            if !(e.is_finite() && e >= 0.0) {
                return cfg(format!("transport.epsilon = {e} must be non-negative"));
            }
        }
        self.bootstrap.validate()?;
        self.alpha_stars.validate()?;
        Ok(())
    }

    /// Selectors from `groups`, or one per distinct attribute value in order
    /// of first appearance.
    pub fn selectors(&self, dataset: &LabeledDataset) -> Vec<SubgroupSelector> {
        if self.groups.is_empty() {
            dataset
                .attribute_values(&self.group_attribute)
                .into_iter()
                .map(|v| SubgroupSelector::single(&self.group_attribute, v))
                .collect()
        } else {
            self.groups
                .iter()
                .map(|g| {
                    SubgroupSelector::new(&g.name, &self.group_attribute, g.values.iter().cloned())
                })
                .collect()
        }
    }

    pub fn transport_epsilon(&self) -> f64 {
        self.transport
            .epsilon
            .unwrap_or(self.epsilon_policy.default)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

pub fn load_config(path: &Path) -> Result<AuditConfig> {
    let text = read(path)?;
    parse_config(&text).map_err(|e| match e {
        Error::Parse { reason, .. } => Error::Parse {
            path: path.to_owned(),
            reason,
        },
        other => other.context(path.display().to_string()),
    })
}

pub fn parse_config(text: &str) -> Result<AuditConfig> {
    let config: AuditConfig = toml::from_str(text).map_err(|e| Error::Parse {
        path: PathBuf::from("<config>"),
        reason: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// Loads a dump, inferring the label space from the data.
pub fn load_predictions(path: &Path, format: DataFormat) -> Result<LabeledDataset> {
    load_predictions_with(path, format, None, None)
}

/// Loads a dump using the label space and positive label from `config`.
pub fn load_predictions_for(
    path: &Path,
    format: DataFormat,
    config: &AuditConfig,
) -> Result<LabeledDataset> {
    load_predictions_with(
        path,
        format,
        config.label_space.clone(),
        Some(&config.positive_label),
    )
}

pub fn load_predictions_with(
    path: &Path,
    format: DataFormat,
    declared: Option<LabelSpace>,
    positive: Option<&Label>,
) -> Result<LabeledDataset> {
    let text = read(path)?;
    let records = match format {
        DataFormat::Csv => parse_csv(path, &text)?,
        DataFormat::Json => parse_json(path, &text)?,
    };
    if records.is_empty() {
        return Err(Error::EmptyFile {
            path: path.to_owned(),
        });
    }
    let space = match declared {
        Some(s) => s,
        None => LabelSpace::infer(
            records.iter().flat_map(|r| [&r.y_true, &r.y_pred]),
            positive,
        )
        .map_err(|e| e.context(path.display().to_string()))?,
    };
    validate_dataset(records, Some(space)).map_err(|e| e.context(path.display().to_string()))
}

fn row_error(path: &Path, row: usize, reason: impl Into<String>) -> Error {
    Error::Row {
        path: path.to_owned(),
        row,
        reason: reason.into(),
    }
}

fn parse_score(raw: &str) -> std::result::Result<Option<f64>, String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    let s: f64 = raw
        .parse()
        .map_err(|_| format!("score {raw:?} is not a number"))?;
    check_score(s).map(Some)
}

fn check_score(s: f64) -> std::result::Result<f64, String> {
    if (0.0..=1.0).contains(&s) {
        Ok(s)
    } else {
        Err(format!("score {s} is outside [0, 1]"))
    }
}

fn parse_probs(raw: &str) -> std::result::Result<Option<Vec<f64>>, String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.split(';')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("probability {p:?} is not a number"))
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(Some)
}

fn parse_domain(raw: &str) -> std::result::Result<Domain, String> {
    if raw.trim().is_empty() {
        return Ok(Domain::Source);
    }
    Domain::parse(raw).ok_or_else(|| format!("domain {raw:?} is neither source nor target"))
}

fn parse_csv(path: &Path, text: &str) -> Result<Vec<PredictionRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: path.to_owned(),
            reason: e.to_string(),
        })?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyFile {
            path: path.to_owned(),
        });
    }
    let col = |name: &str| headers.iter().position(|h| h == name);
    let required = |name: &str| {
        col(name).ok_or_else(|| Error::MissingColumn {
            path: path.to_owned(),
            column: name.to_owned(),
        })
    };
    let (id_col, true_col, pred_col) = (required("id")?, required("y_true")?, required("y_pred")?);
    let (score_col, probs_col, domain_col) = (col("score"), col("probs"), col("domain"));
    let group_cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !RESERVED.contains(h))
        .map(|(i, h)| (i, h.to_owned()))
        .collect();

    let mut records = Vec::new();
    for (k, row) in reader.records().enumerate() {
        // header is line 1
        let line = k + 2;
        let row = row.map_err(|e| row_error(path, line, e.to_string()))?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let err = |reason: String| row_error(path, line, reason);
        let id = field(id_col);
        if id.is_empty() {
            return Err(err("empty id".into()));
        }
        let (y_true, y_pred) = (field(true_col), field(pred_col));
        if y_true.is_empty() || y_pred.is_empty() {
            return Err(err("empty label".into()));
        }
        let mut record = PredictionRecord::new(id, y_true, y_pred);
        record.score = score_col
            .map(|i| parse_score(field(i)))
            .transpose()
            .map_err(err)?
            .flatten();
        record.probs = probs_col
            .map(|i| parse_probs(field(i)))
            .transpose()
            .map_err(err)?
            .flatten();
        if let Some(i) = domain_col {
            record.domain = parse_domain(field(i)).map_err(err)?;
        }
        for (i, name) in &group_cols {
            let v = field(*i);
            if !v.is_empty() {
                record.groups.insert(name.clone(), v.to_owned());
            }
        }
        records.push(record);
    }
    Ok(records)
}

fn parse_json(path: &Path, text: &str) -> Result<Vec<PredictionRecord>> {
    use serde_json::Value;

    if text.trim().is_empty() {
        return Err(Error::EmptyFile {
            path: path.to_owned(),
        });
    }
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_owned(),
        reason: e.to_string(),
    })?;
    let Value::Array(rows) = value else {
        return Err(Error::Parse {
            path: path.to_owned(),
            reason: "expected a top-level array of records".into(),
        });
    };

    let mut records = Vec::with_capacity(rows.len());
    for (k, row) in rows.into_iter().enumerate() {
        let idx = k + 1;
        let err = |reason: String| row_error(path, idx, reason);
        let Value::Object(obj) = row else {
            return Err(err("expected an object".into()));
        };
        let text_of = |v: &Value| match v {
            Value::String(s) => Some(s.clone()),
            Value::Number(n) => Some(n.to_string()),
            Value::Bool(b) => Some(b.to_string()),
            _ => None,
        };
        let required = |key: &str| -> Result<String> {
            match obj.get(key) {
                None => Err(Error::MissingColumn {
                    path: path.to_owned(),
                    column: key.to_owned(),
                }),
                Some(v) => text_of(v).filter(|s| !s.is_empty()).ok_or_else(|| {
                    row_error(path, idx, format!("{key} must be a non-empty string"))
                }),
            }
        };
        let mut record =
            PredictionRecord::new(required("id")?, required("y_true")?, required("y_pred")?);
        match obj.get("score") {
            None | Some(Value::Null) => {}
            Some(Value::Number(n)) => {
                record.score = Some(check_score(n.as_f64().unwrap_or(f64::NAN)).map_err(err)?);
            }
            Some(other) => return Err(err(format!("score {other} is not a number"))),
        }
        match obj.get("probs") {
            None | Some(Value::Null) => {}
            Some(Value::Array(items)) => {
                let probs = items
                    .iter()
                    .map(|v| {
                        v.as_f64()
                            .ok_or_else(|| format!("probability {v} is not a number"))
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(err)?;
                record.probs = Some(probs);
            }
            Some(other) => return Err(err(format!("probs {other} is not an array"))),
        }
        if let Some(d) = obj.get("domain").and_then(text_of) {
            record.domain = parse_domain(&d).map_err(err)?;
        }
        for (key, value) in &obj {
            if RESERVED.contains(&key.as_str()) {
                continue;
            }
            if let Some(v) = text_of(value).filter(|v| !v.is_empty()) {
                record.groups.insert(key.clone(), v);
            }
        }
        records.push(record);
    }
    Ok(records)
}

/// Writes a dataset in the CSV layout read by [`load_predictions`]. Scores
/// use shortest round-trip formatting, so reloading is lossless.
pub fn write_predictions_csv<W: Write>(dataset: &LabeledDataset, out: W) -> Result<()> {
    let records = dataset.records();
    let has_score = records.iter().any(|r| r.score.is_some());
    let has_probs = records.iter().any(|r| r.probs.is_some());
    let attributes: Vec<&String> = records
        .iter()
        .flat_map(|r| r.groups.keys())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io {
        path: PathBuf::from("<csv output>"),
        source: std::io::Error::other(e),
    };
    let mut header = vec!["id", "y_true", "y_pred"];
    if has_score {
        header.push("score");
    }
    if has_probs {
        header.push("probs");
    }
    header.push("domain");
    header.extend(attributes.iter().map(|a| a.as_str()));
    w.write_record(&header).map_err(io)?;

    for r in records {
        let mut row = vec![r.id.clone(), r.y_true.to_string(), r.y_pred.to_string()];
        if has_score {
            row.push(r.score.map(|s| s.to_string()).unwrap_or_default());
        }
        if has_probs {
            row.push(
                r.probs
                    .as_ref()
                    .map(|p| p.iter().map(f64::to_string).collect::<Vec<_>>().join(";"))
                    .unwrap_or_default(),
            );
        }
        row.push(r.domain.as_str().to_owned());
        row.extend(
            attributes
                .iter()
                .map(|a| r.groups.get(*a).cloned().unwrap_or_default()),
        );
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: PathBuf::from("<csv output>"),
        source,
    })
}

pub fn save_predictions_csv(dataset: &LabeledDataset, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    write_predictions_csv(dataset, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_owned(),
            source,
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    const CSV: &str = "id,y_true,y_pred,score,phototype,domain\n\
        a,malignant,malignant,0.9,light,source\n\
        b,benign,malignant,0.6,dark,TARGET\n\
        c,benign,benign,0.1,dark,\n";

    #[test]
    fn loads_csv_in_row_order() {
        let f = temp(CSV, ".csv");
        let ds = load_predictions(f.path(), DataFormat::Csv).unwrap();
        let ids: Vec<_> = ds.records().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(ds.records()[1].domain, Domain::Target);
        assert_eq!(ds.records()[2].domain, Domain::Source);
        assert_eq!(ds.records()[0].group("phototype"), Some("light"));
        assert_eq!(ds.records()[0].score, Some(0.9));
        assert_eq!(ds.label_space().positive(), Some(&Label::from("malignant")));
    }

    #[test]
    fn missing_column_is_named() {
        let f = temp("id,y_true,score\na,benign,0.2\n", ".csv");
        let err = load_predictions(f.path(), DataFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::MissingColumn { column, .. } if column == "y_pred"));
    }

    #[test]
    fn bad_score_reports_row() {
        let f = temp(
            "id,y_true,y_pred,score\na,benign,benign,0.2\nb,malignant,benign,1.2\n",
            ".csv",
        );
        let err = load_predictions(f.path(), DataFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::Row { row: 3, .. }), "{err}");
    }

    #[test]
    fn empty_file_rejected() {
        for body in ["", "id,y_true,y_pred\n"] {
            let f = temp(body, ".csv");
            let err = load_predictions(f.path(), DataFormat::Csv).unwrap_err();
            assert!(matches!(err, Error::EmptyFile { .. }), "{err}");
        }
        let f = temp("[]", ".json");
        assert!(matches!(
            load_predictions(f.path(), DataFormat::Json),
            Err(Error::EmptyFile { .. })
        ));
    }

    #[test]
    fn json_mirrors_csv() {
        let json = r#"[
            {"id": "a", "y_true": "malignant", "y_pred": "malignant", "score": 0.9, "phototype": "light", "domain": "source"},
            {"id": "b", "y_true": "benign", "y_pred": "malignant", "score": 0.6, "phototype": "dark", "domain": "TARGET"},
            {"id": "c", "y_true": "benign", "y_pred": "benign", "score": 0.1, "phototype": "dark"}
        ]"#;
        let a = load_predictions(temp(json, ".json").path(), DataFormat::Json).unwrap();
        let b = load_predictions(temp(CSV, ".csv").path(), DataFormat::Csv).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let mut recs = vec![
            PredictionRecord::new("x", "benign", "malignant")
                .with_score(0.1 + 0.2)
                .with_group("phototype", "dark")
                .with_domain(Domain::Target),
            PredictionRecord::new("y", "malignant", "malignant")
                .with_score(1.0 / 3.0)
                .with_group("phototype", "light"),
        ];
        recs[1].probs = Some(vec![1.0 / 3.0, 2.0 / 3.0]);
        let ds = validate_dataset(
            recs,
            Some(LabelSpace::binary("benign", "malignant").unwrap()),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_predictions_csv(&ds, &mut buf).unwrap();
        let f = temp(std::str::from_utf8(&buf).unwrap(), ".csv");
        let back = load_predictions_with(
            f.path(),
            DataFormat::Csv,
            Some(ds.label_space().clone()),
            None,
        )
        .unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config("positive_label = \"malignant\"\ngroup_attribute = \"phototype\"\n")
            .unwrap();
        assert_eq!(cfg.divergence, DivergenceKind::Tv);
        assert_eq!(cfg.epsilon_policy.default, 0.05);
        assert_eq!(cfg.bootstrap.replicates, 2000);
        assert_eq!(cfg.bootstrap.level, 0.95);
        assert_eq!(cfg.alpha_stars.0, [0.05, 0.01, 0.001]);
        assert_eq!(cfg.kl_smoothing_epsilon, 1e-6);
        assert_eq!(cfg, AuditConfig::for_attribute("malignant", "phototype"));
    }

    #[test]
    fn full_config_parses() {
        let text = r#"
            positive_label = "malignant"
            group_attribute = "phototype"
            label_space = ["benign", "malignant"]
            divergence = "js"
            alpha_stars = [0.05, 0.01, 0.001]
            metrics = ["precision", "f1"]
            z_mode = "metric_support"

            [[groups]]
            name = "light"
            values = ["I", "II", "III"]

            [epsilon]
            default = 0.1
            per_metric = { precision = 0.2 }

            [bootstrap]
            replicates = 500
            seed = 42
            level = 0.9

            [transport]
            metric = "f1"
            epsilon = 0.25
        "#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.divergence, DivergenceKind::Js);
        assert_eq!(cfg.groups[0].values.len(), 3);
        assert_eq!(cfg.epsilon_policy.tolerance("precision"), 0.2);
        assert_eq!(cfg.bootstrap.seed, 42);
        assert_eq!(cfg.transport.metric, Some(MetricName::F1));
        assert_eq!(cfg.transport_epsilon(), 0.25);
        assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn out_of_range_and_malformed_configs() {
        let base = "positive_label = \"malignant\"\ngroup_attribute = \"phototype\"\n";
        for extra in [
            "[bootstrap]\nlevel = 1.5\n",
            "[bootstrap]\nreplicates = 0\n",
            "alpha_stars = [0.01, 0.05, 0.001]\n",
            "kl_smoothing_epsilon = 0.7\n",
            "[epsilon]\ndefault = -1.0\n",
            "colour = \"blue\"\n",
        ] {
            assert!(parse_config(&format!("{base}{extra}")).is_err(), "{extra}");
        }
        assert!(parse_config("positive_label = ").is_err());
    }

    #[test]
    fn selectors_default_to_attribute_values() {
        let f = temp(CSV, ".csv");
        let ds = load_predictions(f.path(), DataFormat::Csv).unwrap();
        let cfg = AuditConfig::for_attribute("malignant", "phototype");
        let names: Vec<_> = cfg.selectors(&ds).into_iter().map(|s| s.name).collect();
        assert_eq!(names, ["light", "dark"]);
    }
}
