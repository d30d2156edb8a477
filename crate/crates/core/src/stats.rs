//! Significance tests and bootstrap intervals.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DatasetView, SubgroupSelector};

/// Three strictly descending significance levels mapped to `*`, `**`, `***`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct AlphaThresholds(pub [f64; 3]);

impl Default for AlphaThresholds {
    fn default() -> Self {
        AlphaThresholds([0.05, 0.01, 0.001])
    }
}

impl AlphaThresholds {
    pub fn validate(&self) -> Result<()> {
        let [a, b, c] = self.0;
        if !(a < 1.0 && a > b && b > c && c > 0.0) {
            return Err(Error::Config(format!(
                "alpha_stars {:?} must be strictly descending within (0, 1)",
                self.0
            )));
        }
        Ok(())
    }
}

impl TryFrom<[f64; 3]> for AlphaThresholds {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        let t = AlphaThresholds(v);
        t.validate()?;
        Ok(t)
    }
}

impl From<AlphaThresholds> for [f64; 3] {
    fn from(t: AlphaThresholds) -> Self {
        t.0
    }
}

pub fn stars(p: f64, thresholds: &AlphaThresholds) -> &'static str {
    let [one, two, three] = thresholds.0;
    if p <= three {
        "***"
    } else if p <= two {
        "**"
    } else if p <= one {
        "*"
    } else {
        ""
    }
}

/// Standard normal CDF Φ(z), via the complementary error function.
pub fn normal_tail(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// How z statistics for metric gaps are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZMode {
    /// Pooled two-proportion z with group sizes as denominators for every
    /// metric.
    #[default]
    GroupSize,
    /// Each metric's own denominator for ratio metrics, bootstrap standard
    /// errors for F1 and the AUCs.
    MetricSupport,
}

impl fmt::Display for ZMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZMode::GroupSize => "group_size",
            ZMode::MetricSupport => "metric_support",
        })
    }
}

/// `z == None` signals a degenerate (zero) variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZTestResult {
    pub z: Option<f64>,
    pub p_two_sided: Option<f64>,
    pub stars: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ZTestResult {
    pub fn from_z(z: f64, thresholds: &AlphaThresholds) -> Self {
        let p = (2.0 * normal_tail(-z.abs())).min(1.0);
        ZTestResult {
            z: Some(z),
            p_two_sided: Some(p),
            stars: stars(p, thresholds).to_owned(),
            note: None,
        }
    }

    pub fn degenerate(note: impl Into<String>) -> Self {
        ZTestResult {
            z: None,
            p_two_sided: None,
            stars: String::new(),
            note: Some(note.into()),
        }
    }

    pub fn with_stars(mut self, thresholds: &AlphaThresholds) -> Self {
        if let Some(p) = self.p_two_sided {
            self.stars = stars(p, thresholds).to_owned();
        }
        self
    }
}

/// Pooled two-proportion z test, two-sided, starred at the default levels.
pub fn pooled_two_proportion_z(p1: f64, n1: u64, p2: f64, n2: u64) -> ZTestResult {
    pooled_two_proportion_z_with(p1, n1, p2, n2, &AlphaThresholds::default())
}

pub fn pooled_two_proportion_z_with(
    p1: f64,
    n1: u64,
    p2: f64,
    n2: u64,
    thresholds: &AlphaThresholds,
) -> ZTestResult {
    if n1 == 0 || n2 == 0 {
        return ZTestResult::degenerate("empty group");
    }
    let (a, b) = (n1 as f64, n2 as f64);
    let pooled = (p1 * a + p2 * b) / (a + b);
    let var = pooled * (1.0 - pooled) * (1.0 / a + 1.0 / b);
    if var.is_nan() || var <= 0.0 {
        return ZTestResult::degenerate(format!("pooled proportion {pooled} gives zero variance"));
    }
    ZTestResult::from_z((p1 - p2) / var.sqrt(), thresholds)
}

/// z for a difference of two independent estimates with known standard errors.
pub fn z_from_standard_errors(
    diff: f64,
    se1: f64,
    se2: f64,
    thresholds: &AlphaThresholds,
) -> ZTestResult {
    let se = (se1 * se1 + se2 * se2).sqrt();
    if se.is_nan() || se <= 0.0 {
        return ZTestResult::degenerate("zero standard error");
    }
    ZTestResult::from_z(diff / se, thresholds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapConfig {
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_level")]
    pub level: f64,
}

fn default_replicates() -> usize {
    2000
}

fn default_level() -> f64 {
    0.95
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: default_replicates(),
            seed: 0,
            level: default_level(),
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config(
                "bootstrap.replicates must be at least 1".into(),
            ));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Config(format!(
                "bootstrap.level = {} must lie in (0, 1)",
                self.level
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub replicates: usize,
    /// Replicates whose statistic was undefined and therefore dropped.
    pub discarded: usize,
    pub seed: u64,
    /// Standard deviation of the kept replicate statistics.
    pub std_error: f64,
    pub method: String,
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `index`: `splitmix64(seed ^ splitmix64(index))`. Each
/// replicate owns its generator, so results do not depend on scheduling.
pub fn replicate_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let rank = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (rank.floor() as usize, rank.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
}

/// Position lists of each stratum. Records go to the first selector that
/// matches them; unmatched records form a final stratum of their own.
fn strata(view: &DatasetView<'_>, selectors: Option<&[SubgroupSelector]>) -> Vec<Vec<usize>> {
    let Some(selectors) = selectors.filter(|s| !s.is_empty()) else {
        return vec![view.indices().to_vec()];
    };
    let mut buckets = vec![Vec::new(); selectors.len() + 1];
    for (&i, r) in view.indices().iter().zip(view.iter()) {
        let slot = selectors
            .iter()
            .position(|s| s.matches(r))
            .unwrap_or(selectors.len());
        buckets[slot].push(i);
    }
    buckets.retain(|b| !b.is_empty());
    buckets
}

/// Raw replicate statistics in replicate order (`None` = undefined).
pub fn bootstrap_replicates<F>(
    view: &DatasetView<'_>,
    statistic: F,
    cfg: &BootstrapConfig,
    stratify_by: Option<&[SubgroupSelector]>,
) -> Vec<Option<f64>>
where
    F: Fn(&DatasetView<'_>) -> Option<f64> + Sync,
{
    let strata = strata(view, stratify_by);
    let dataset = view.dataset();
    (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(cfg.seed, rep));
            let mut indices = Vec::with_capacity(view.len());
            for stratum in &strata {
                indices.extend(
                    (0..stratum.len()).map(|_| stratum[rng.random_range(0..stratum.len())]),
                );
            }
            statistic(&DatasetView::from_indices(dataset, indices)).filter(|v| v.is_finite())
        })
        .collect()
}

/// Percentile bootstrap interval of `statistic`, resampling records with
/// replacement (within strata when given).
pub fn bootstrap<F>(
    view: &DatasetView<'_>,
    statistic: F,
    cfg: &BootstrapConfig,
    stratify_by: Option<&[SubgroupSelector]>,
) -> Result<BootstrapResult>
where
    F: Fn(&DatasetView<'_>) -> Option<f64> + Sync,
{
    cfg.validate()?;
    let point = statistic(view).ok_or_else(|| Error::UndefinedMetric {
        metric: "bootstrap statistic on the full sample".into(),
    })?;
    let raw = bootstrap_replicates(view, &statistic, cfg, stratify_by);
    let mut kept: Vec<f64> = raw.iter().flatten().copied().collect();
    if kept.is_empty() {
        return Err(Error::AllReplicatesUndefined {
            replicates: cfg.replicates,
        });
    }
    kept.sort_by(f64::total_cmp);
    let alpha = 1.0 - cfg.level;
    let mean = kept.iter().sum::<f64>() / kept.len() as f64;
    let var = if kept.len() > 1 {
        kept.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (kept.len() - 1) as f64
    } else {
        0.0
    };
    Ok(BootstrapResult {
        point,
        lo: quantile(&kept, alpha / 2.0),
        hi: quantile(&kept, 1.0 - alpha / 2.0),
        level: cfg.level,
        replicates: cfg.replicates,
        discarded: raw.len() - kept.len(),
        seed: cfg.seed,
        std_error: var.sqrt(),
        method: if stratify_by.is_some_and(|s| !s.is_empty()) {
            "percentile, stratified".into()
        } else {
            "percentile".into()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_dataset, LabelSpace, LabeledDataset, PredictionRecord};
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() <= rel
    }

    #[test]
    fn normal_tail_reference_values() {
        assert_eq!(normal_tail(0.0), 0.5);
        // reference values from 40-digit arithmetic
        assert!((normal_tail(-1.959964) - 0.025).abs() <= 1e-7);
        assert!(rel_close(
            normal_tail(-1.959964),
            0.024_999_999_096_442_4,
            1e-6
        ));
        assert!(rel_close(
            normal_tail(-5.873),
            2.139_892_366_670_818e-9,
            1e-6
        ));
        assert!(rel_close(
            normal_tail(-8.0),
            6.220_960_574_271_784e-16,
            1e-6
        ));
        assert!(rel_close(
            normal_tail(-3.0),
            0.001_349_898_031_630_094_5,
            1e-6
        ));
        assert!(rel_close(normal_tail(2.5), 0.993_790_334_674_224, 1e-6));
    }

    #[test]
    fn published_precision_and_accuracy_rows() {
        let r = pooled_two_proportion_z(0.897, 107, 0.484, 58);
        assert!((r.z.unwrap() - 5.87).abs() < 0.02);
        assert!(rel_close(r.p_two_sided.unwrap(), 4.3e-9, 0.1));
        assert_eq!(r.stars, "***");

        let r = pooled_two_proportion_z(0.841, 107, 0.655, 58);
        assert!((r.z.unwrap() - 2.734).abs() < 0.02);
        assert!((r.p_two_sided.unwrap() - 0.006).abs() < 0.0005);
        assert_eq!(r.stars, "**");
    }

    #[test]
    fn equal_proportions_give_zero() {
        let r = pooled_two_proportion_z(0.5, 10, 0.5, 10);
        assert_eq!(r.z, Some(0.0));
        assert_eq!(r.p_two_sided, Some(1.0));
        assert_eq!(r.stars, "");
    }

    #[test]
    fn degenerate_pooled_variance() {
        for (a, b) in [(0.0, 0.0), (1.0, 1.0)] {
            let r = pooled_two_proportion_z(a, 20, b, 30);
            assert_eq!(r.z, None);
            assert!(r.note.is_some());
        }
    }

    #[test]
    fn star_levels() {
        let t = AlphaThresholds::default();
        assert_eq!(stars(6.16e-4, &t), "***");
        assert_eq!(stars(0.017, &t), "*");
        assert_eq!(stars(0.095, &t), "");
        assert_eq!(stars(0.01, &t), "**");
        assert_eq!(stars(0.05, &t), "*");
    }

    #[test]
    fn thresholds_must_descend() {
        assert!(AlphaThresholds([0.05, 0.05, 0.001]).validate().is_err());
        assert!(AlphaThresholds([1.0, 0.5, 0.1]).validate().is_err());
        assert!(AlphaThresholds([0.1, 0.05, 0.0]).validate().is_err());
    }

    fn bernoulli(n: usize, errors: usize) -> LabeledDataset {
        let raw = (0..n)
            .map(|i| {
                PredictionRecord::new(format!("r{i}"), "a", if i < errors { "b" } else { "a" })
            })
            .collect();
        validate_dataset(raw, Some(LabelSpace::binary("a", "b").unwrap())).unwrap()
    }

    fn error_rate(v: &DatasetView<'_>) -> Option<f64> {
        Some(v.iter().filter(|r| !r.is_correct()).count() as f64 / v.len() as f64)
    }

    #[test]
    fn constant_statistic_collapses_interval() {
        let ds = bernoulli(30, 5);
        let r = bootstrap(
            &ds.view(),
            |_| Some(0.42),
            &BootstrapConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!((r.lo, r.hi, r.point), (0.42, 0.42, 0.42));
        assert_eq!(r.discarded, 0);
    }

    #[test]
    fn undefined_replicates_are_discarded_and_counted() {
        let ds = bernoulli(40, 10);
        let cfg = BootstrapConfig {
            replicates: 300,
            ..Default::default()
        };
        // undefined whenever the resample has fewer than 10 errors
        let stat = |v: &DatasetView<'_>| {
            let e = v.iter().filter(|r| !r.is_correct()).count();
            (e >= 10).then_some(e as f64)
        };
        let r = bootstrap(&ds.view(), stat, &cfg, None).unwrap();
        assert!(r.discarded > 0 && r.discarded < 300);
        assert!(r.lo >= 10.0);

        let never = bootstrap(&ds.view(), |v| (v.len() > 1000).then_some(1.0), &cfg, None);
        assert!(never.is_err());
    }

    #[test]
    fn deterministic_across_runs_and_thread_counts() {
        let ds = bernoulli(120, 30);
        let cfg = BootstrapConfig {
            replicates: 500,
            seed: 99,
            level: 0.9,
        };
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| bootstrap(&ds.view(), error_rate, &cfg, None).unwrap())
        };
        let one = run(1);
        for threads in [1, 3, 8] {
            let other = run(threads);
            assert_eq!(one.lo.to_bits(), other.lo.to_bits());
            assert_eq!(one.hi.to_bits(), other.hi.to_bits());
        }
        let reps = |seed| {
            bootstrap_replicates(
                &ds.view(),
                error_rate,
                &BootstrapConfig { seed, ..cfg },
                None,
            )
        };
        assert_eq!(reps(99), reps(99));
        assert_ne!(reps(99), reps(100));
    }

    #[test]
    fn stratified_resamples_keep_stratum_sizes() {
        let raw = (0..50)
            .map(|i| {
                PredictionRecord::new(format!("r{i}"), "a", "a")
                    .with_group("g", if i < 10 { "x" } else { "y" })
            })
            .collect();
        let ds = validate_dataset(raw, Some(LabelSpace::binary("a", "b").unwrap())).unwrap();
        let strata = [SubgroupSelector::single("g", "x")];
        let count_x = |v: &DatasetView<'_>| {
            Some(v.iter().filter(|r| r.group("g") == Some("x")).count() as f64)
        };
        let r = bootstrap(
            &ds.view(),
            count_x,
            &BootstrapConfig {
                replicates: 200,
                ..Default::default()
            },
            Some(&strata),
        )
        .unwrap();
        assert_eq!((r.lo, r.hi), (10.0, 10.0));
    }

    proptest! {
        #[test]
        fn z_antisymmetric(p1 in 0.0f64..1.0, p2 in 0.0f64..1.0, n1 in 1u64..500, n2 in 1u64..500) {
            let a = pooled_two_proportion_z(p1, n1, p2, n2);
            let b = pooled_two_proportion_z(p2, n2, p1, n1);
            match (a.z, b.z) {
                (Some(x), Some(y)) => {
                    prop_assert!((x + y).abs() <= 1e-12 * x.abs().max(1.0));
                    prop_assert!((a.p_two_sided.unwrap() - b.p_two_sided.unwrap()).abs() <= 1e-12);
                    prop_assert_eq!(a.stars, b.stars);
                }
                (x, y) => prop_assert_eq!(x, y),
            }
        }

        #[test]
        fn equal_sizes_match_textbook(p1 in 0.01f64..0.99, p2 in 0.01f64..0.99, n in 1u64..1000) {
            let r = pooled_two_proportion_z(p1, n, p2, n);
            let p = (p1 + p2) / 2.0;
            let textbook = (p1 - p2) / (2.0 * p * (1.0 - p) / n as f64).sqrt();
            prop_assert!((r.z.unwrap().abs() - textbook.abs()).abs() <= 1e-9 * textbook.abs().max(1.0));
        }

        #[test]
        fn stars_monotone(p in 0.0f64..1.0, q in 0.0f64..1.0) {
            let t = AlphaThresholds::default();
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            prop_assert!(stars(lo, &t).len() >= stars(hi, &t).len());
        }
    }
}
