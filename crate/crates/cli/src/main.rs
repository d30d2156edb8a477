use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use praudit::ingest::{
    load_config, load_predictions_for, save_predictions_csv, AuditConfig, DataFormat,
};
use praudit::metrics::{reconstruct_confusion, MetricName};
use praudit::model::{Domain, LabeledDataset, SubgroupSelector};
use praudit::report::{build_report, fmt_value, render, DatasetInfo, RenderFormat};
use praudit::synth::{generate, load_spec};
use praudit::transport::{check_external_transportability, validated_parity, TransportOutcome};

/// Environment variable that overrides the configured bootstrap seed.
const SEED_ENV: &str = "PRAUDIT_SEED";

/// Audit subgroup predictive representativity of classifier outputs.
///
/// Exit status: 0 when every gate passes, 1 when a gate fails, 2 on invalid
/// input or configuration.
#[derive(Parser, Debug)]
#[command(name = "praudit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full audit: per-group metrics, PR, z-tests, bootstrap CIs and gates
    Audit {
        /// Prediction dump (.csv or .json)
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// md, json or csv; defaults to the config, then md
        #[arg(long)]
        format: Option<String>,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Bootstrap seed; overrides PRAUDIT_SEED and the config
        #[arg(long)]
        seed: Option<u64>,
        /// Default PR tolerance
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// External transportability gate for every group on a target domain
    Transport {
        /// Source-domain dump, used for the informational PR shift
        #[arg(long)]
        source: PathBuf,
        /// Target-domain dump; every record is treated as target
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Gate tolerance; overrides transport.epsilon
        #[arg(long)]
        epsilon: Option<f64>,
        /// Gate on this metric's PR instead of the configured measure
        #[arg(long)]
        metric: Option<MetricName>,
        /// Print the outcomes as JSON
        #[arg(long)]
        json: bool,
    },
    /// Demographic parity between two groups, validated against their PR
    Parity {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Configured group name or attribute value
        #[arg(long)]
        group_a: String,
        #[arg(long)]
        group_b: String,
    },
    /// Generate a synthetic dump with exact per-group confusion counts
    Synth {
        /// TOML generator spec
        #[arg(long)]
        spec: PathBuf,
        /// Output CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover confusion counts consistent with rounded sensitivity, specificity and accuracy
    Reconstruct {
        #[arg(long)]
        sens: f64,
        #[arg(long)]
        spec: f64,
        #[arg(long)]
        acc: f64,
        #[arg(long)]
        n: u64,
        /// Largest accepted rounding error on each rate
        #[arg(long, default_value_t = 0.0005)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Audit {
            data,
            config,
            format,
            out,
            seed,
            epsilon,
        } => audit(&data, &config, format, out, seed, epsilon),
        Command::Transport {
            source,
            target,
            config,
            epsilon,
            metric,
            json,
        } => transport(&source, &target, &config, epsilon, metric, json),
        Command::Parity {
            data,
            config,
            group_a,
            group_b,
        } => parity(&data, &config, &group_a, &group_b),
        Command::Synth { spec, out } => synth(&spec, &out),
        Command::Reconstruct {
            sens,
            spec,
            acc,
            n,
            tol,
        } => reconstruct(sens, spec, acc, n, tol),
    }
}

fn config_with_seed(path: &Path, seed: Option<u64>) -> Result<AuditConfig> {
    let mut config =
        load_config(path).with_context(|| format!("loading config {}", path.display()))?;
    if let Ok(raw) = std::env::var(SEED_ENV) {
        config.bootstrap.seed = raw
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV}={raw:?} is not an unsigned integer"))?;
    }
    if let Some(seed) = seed {
        config.bootstrap.seed = seed;
    }
    Ok(config)
}

fn load(path: &Path, config: &AuditConfig) -> Result<LabeledDataset> {
    load_predictions_for(path, DataFormat::from_path(path), config)
        .with_context(|| format!("loading predictions {}", path.display()))
}

fn audit(
    data: &Path,
    config_path: &Path,
    format: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    epsilon: Option<f64>,
) -> Result<u8> {
    let mut config = config_with_seed(config_path, seed)?;
    if let Some(e) = epsilon {
        config.epsilon_policy.default = e;
    }
    if let Some(f) = &format {
        config.output.format = Some(f.clone());
    }
    if let Some(p) = &out {
        config.output.path = Some(p.clone());
    }
    config.validate()?;
    let render_format: RenderFormat = config.output.format.as_deref().unwrap_or("md").parse()?;

    let dataset = load(data, &config)?;
    let info = DatasetInfo::from_file(data)?;
    let report = build_report(&dataset, &config, vec![info])?;
    let text = render(&report, render_format);
    match &config.output.path {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn transport(
    source: &Path,
    target: &Path,
    config_path: &Path,
    epsilon: Option<f64>,
    metric: Option<MetricName>,
    json: bool,
) -> Result<u8> {
    let mut config = config_with_seed(config_path, None)?;
    if epsilon.is_some() {
        config.transport.epsilon = epsilon;
    }
    if metric.is_some() {
        config.transport.metric = metric;
    }
    config.validate()?;

    let target_ds = load(target, &config)?.with_domain(Domain::Target);
    let source_ds = load(source, &config)?.with_domain(Domain::Source);
    let selectors = config.selectors(&source_ds);
    if selectors.is_empty() {
        bail!("no groups found for attribute {:?}", config.group_attribute);
    }
    let outcomes = selectors
        .iter()
        .map(|sel| {
            check_external_transportability(&target_ds, sel, &config, Some(&source_ds))
                .with_context(|| format!("group {}", sel.name))
        })
        .collect::<Result<Vec<TransportOutcome>>>()?;

    if json {
        println!("{}", serde_json::to_string_pretty(&outcomes)?);
    } else {
        for o in &outcomes {
            let g = &o.gate;
            println!(
                "{:<4} group={} measure={} pr={} epsilon={} margin={}{}",
                if g.passed { "PASS" } else { "FAIL" },
                g.group,
                g.metric,
                fmt_value(Some(g.pr)),
                g.epsilon,
                fmt_value(Some(g.margin)),
                o.pr_shift
                    .map(|s| format!(
                        " source_pr={} shift={}",
                        fmt_value(o.source_pr),
                        fmt_value(Some(s))
                    ))
                    .unwrap_or_default()
            );
            if let Some(f) = &o.overall_floor {
                println!(
                    "     overall {} {} (floor {}, {})",
                    f.metric,
                    fmt_value(f.achieved),
                    f.minimum,
                    if f.met { "met" } else { "not met" }
                );
            }
        }
    }
    Ok(if outcomes.iter().all(|o| o.gate.passed) {
        0
    } else {
        1
    })
}

fn selector_for(config: &AuditConfig, name: &str) -> SubgroupSelector {
    config
        .groups
        .iter()
        .find(|g| g.name == name)
        .map(|g| SubgroupSelector::new(&g.name, &config.group_attribute, g.values.iter().cloned()))
        .unwrap_or_else(|| SubgroupSelector::single(&config.group_attribute, name))
}

fn parity(data: &Path, config_path: &Path, a: &str, b: &str) -> Result<u8> {
    let config = config_with_seed(config_path, None)?;
    let dataset = load(data, &config)?;
    let selectors = [selector_for(&config, a), selector_for(&config, b)];
    let outcome = validated_parity(&dataset, &selectors, &config)?;
    println!(
        "parity gap {} (tolerance {}): {}",
        fmt_value(Some(outcome.gap)),
        outcome.parity_tolerance,
        if outcome.parity_holds {
            "holds"
        } else {
            "violated"
        }
    );
    for g in &outcome.gates {
        println!(
            "{:<4} group={} divergence pr={} epsilon={}",
            if g.passed { "PASS" } else { "FAIL" },
            g.group,
            fmt_value(Some(g.pr)),
            g.epsilon
        );
    }
    println!(
        "{}",
        if outcome.validated {
            "parity validated"
        } else if outcome.parity_holds {
            "parity holds but is not predictively validated"
        } else {
            "parity not validated"
        }
    );
    Ok(if outcome.validated { 0 } else { 1 })
}

fn synth(spec_path: &Path, out: &Path) -> Result<u8> {
    let spec =
        load_spec(spec_path).with_context(|| format!("loading spec {}", spec_path.display()))?;
    let dataset = generate(&spec)?;
    save_predictions_csv(&dataset, out).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {} records to {}", dataset.len(), out.display());
    Ok(0)
}

fn reconstruct(sens: f64, spec: f64, acc: f64, n: u64, tol: f64) -> Result<u8> {
    let found = reconstruct_confusion(sens, spec, acc, n, tol);
    if found.is_empty() {
        println!("no confusion matrix of size {n} matches within {tol}");
        return Ok(1);
    }
    for cm in &found {
        println!("tp={} fp={} tn={} fn={}", cm.tp, cm.fp, cm.tn, cm.fn_);
    }
    Ok(0)
}
