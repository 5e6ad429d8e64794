//! Seeded Monte Carlo experiments that set analytic predictions against
//! simulated graphs.
//!
//! Every trial draws its randomness from a seed derived from the master seed
//! and the trial's coordinates, so results are independent of scheduling.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{self, ThresholdPrediction};
use crate::error::{CameoError, Result};
use crate::graphgen::{self, CameoParams, Method};
use crate::pathconn;
use crate::rng::derive_seed;
use crate::stats;
use crate::weights::{self, WeightDistribution, WeightSample};

/// Largest expected edge count a single experiment graph may have.
pub const MAX_EXPECTED_EDGES: f64 = 2e8;
/// Vertex ids are stored as `u32`.
pub const MAX_VERTICES: usize = u32::MAX as usize;

const SEED_WEIGHTS: u64 = 0;
const SEED_TRIAL: u64 = 1;

fn default_gamma_pair_budget() -> usize {
    100
}

/// Parameters of one experiment, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: WeightDistribution,
    pub c: f64,
    pub alpha: f64,
    pub n_list: Vec<usize>,
    pub k_list: Vec<usize>,
    pub trials: usize,
    pub pair_budget: usize,
    pub master_seed: u64,
    pub output_path: String,
    /// `Γ_k` is measured for every `k ≤ gamma_k_limit` in `k_list`.
    #[serde(default)]
    pub gamma_k_limit: usize,
    #[serde(default = "default_gamma_pair_budget")]
    pub gamma_pair_budget: usize,
    /// Draw fresh weights per trial instead of one fixed sample per `n`.
    #[serde(default)]
    pub resample_weights: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| CameoError::parse(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(CameoError::domain("trials must be >= 1"));
        }
        if self.pair_budget == 0 {
            return Err(CameoError::domain("pair_budget must be >= 1"));
        }
        let ascending = |v: &[usize]| !v.is_empty() && v.windows(2).all(|w| w[0] < w[1]);
        if !ascending(&self.n_list) {
            return Err(CameoError::domain("n_list must be nonempty and strictly ascending"));
        }
        if !ascending(&self.k_list) || self.k_list[0] == 0 {
            return Err(CameoError::domain("k_list must be nonempty, strictly ascending and positive"));
        }
        for &n in &self.n_list {
            CameoParams::new(n, self.c, self.alpha)?;
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical compact JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn check_resources(&self) -> Result<()> {
        for &n in &self.n_list {
            if n > MAX_VERTICES {
                return Err(CameoError::resource(format!("n={n} exceeds the vertex id range")));
            }
            let edges = self.c * (n as f64 - 1.0);
            if edges > MAX_EXPECTED_EDGES {
                return Err(CameoError::resource(format!(
                    "n={n}, c={} expects {edges:.2e} edges, above the {MAX_EXPECTED_EDGES:.0e} cap",
                    self.c
                )));
            }
        }
        Ok(())
    }

    fn trial_seed(&self, n: usize, trial: usize) -> u64 {
        derive_seed(self.master_seed, &[SEED_TRIAL, n as u64, trial as u64])
    }

    fn weights_for(&self, n: usize, trial: usize) -> Result<WeightSample> {
        let seed = if self.resample_weights {
            self.trial_seed(n, trial)
        } else {
            derive_seed(self.master_seed, &[SEED_WEIGHTS, n as u64])
        };
        weights::sample_weights(&self.distribution, n, self.alpha, seed)
    }
}

/// `Γ_k` summary inside one scan cell.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaCell {
    Measured { max: u128, mean_edges: Option<f64>, mean_pairs: f64 },
    BudgetExhausted,
}

/// One `(n, trial)` graph with its per-`k` measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanCell {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub edge_count: usize,
    pub clamped_pairs: u64,
    pub largest_component: usize,
    pub connected_pairs: usize,
    /// Median distance over sampled pairs that share a component.
    pub median_distance: Option<f64>,
    /// `P̂_k` aligned with `k_list`.
    pub reach: Vec<f64>,
    pub reach_stderr: Vec<f64>,
    /// Aligned with `k_list`; `None` where `Γ_k` was not requested.
    pub gamma: Vec<Option<GammaCell>>,
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub config: ExperimentConfig,
    /// `None` when the parameters fall outside the predictor's range (`α = ½`).
    pub prediction: Option<ThresholdPrediction>,
    pub cells: Vec<ScanCell>,
}

pub const SCAN_HEADER: &str = "n,trial,seed,k,reach,reach_stderr,edges,clamped_pairs,largest_component,\
median_distance,k_c_predicted,gamma_max,gamma_mean_edges,gamma_mean_pairs,gamma_flag";

/// Samples graphs for every `(n, trial)` and measures reach fractions `P̂_k`.
pub fn run_threshold_scan(config: &ExperimentConfig) -> Result<ScanResult> {
    config.validate()?;
    config.check_resources()?;
    let prediction = analytic::predict_threshold(&config.distribution, config.c, config.alpha).ok();
    let jobs: Vec<(usize, usize)> =
        config.n_list.iter().flat_map(|&n| (0..config.trials).map(move |t| (n, t))).collect();
    let cells = jobs.par_iter().map(|&(n, trial)| scan_cell(config, n, trial)).collect::<Result<Vec<_>>>()?;
    Ok(ScanResult { config: config.clone(), prediction, cells })
}

fn scan_cell(config: &ExperimentConfig, n: usize, trial: usize) -> Result<ScanCell> {
    let seed = config.trial_seed(n, trial);
    let params = CameoParams::new(n, config.c, config.alpha)?;
    let sample = config.weights_for(n, trial)?;
    let g = graphgen::generate(&params, &sample, seed, Method::Envelope)?;
    let distances = pathconn::sample_pair_distances(&g, config.pair_budget, seed, None);
    let total = distances.len().max(1) as f64;
    let connected: Vec<f64> = distances.iter().flatten().map(|&d| d as f64).collect();
    let mut reach = Vec::with_capacity(config.k_list.len());
    let mut reach_stderr = Vec::with_capacity(config.k_list.len());
    for &k in &config.k_list {
        let p = distances.iter().filter(|d| matches!(d, Some(d) if *d as usize <= k)).count() as f64 / total;
        reach.push(p);
        reach_stderr.push((p * (1.0 - p) / total).sqrt());
    }
    let gamma = config
        .k_list
        .iter()
        .map(|&k| {
            if k > config.gamma_k_limit {
                return Ok(None);
            }
            match pathconn::gamma_stats(&g, k, config.gamma_pair_budget, seed) {
                Ok(s) => Ok(Some(GammaCell::Measured {
                    max: s.gamma_max,
                    mean_edges: s.gamma_mean_edges,
                    mean_pairs: s.gamma_mean_pairs,
                })),
                Err(CameoError::Resource(_)) => Ok(Some(GammaCell::BudgetExhausted)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanCell {
        n,
        trial,
        seed,
        edge_count: g.edge_count(),
        clamped_pairs: graphgen::clamped_pair_count(&params, &sample)?,
        largest_component: g.largest_component_size(),
        connected_pairs: connected.len(),
        median_distance: stats::median(&connected),
        reach,
        reach_stderr,
        gamma,
    })
}

impl ScanResult {
    /// Long-format CSV, one row per `(n, trial, k)`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{SCAN_HEADER}")?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for cell in &self.cells {
            let k_c = self.prediction.as_ref().and_then(|p| p.k_c(cell.n));
            for (idx, &k) in self.config.k_list.iter().enumerate() {
                let (gmax, gedges, gpairs, gflag) = match &cell.gamma[idx] {
                    None => (String::new(), String::new(), String::new(), ""),
                    Some(GammaCell::Measured { max, mean_edges, mean_pairs }) => {
                        (max.to_string(), opt(*mean_edges), mean_pairs.to_string(), "exact")
                    }
                    Some(GammaCell::BudgetExhausted) => (String::new(), String::new(), String::new(), "budget_exhausted"),
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    cell.n,
                    cell.trial,
                    cell.seed,
                    k,
                    cell.reach[idx],
                    cell.reach_stderr[idx],
                    cell.edge_count,
                    cell.clamped_pairs,
                    cell.largest_component,
                    opt(cell.median_distance),
                    opt(k_c),
                    gmax,
                    gedges,
                    gpairs,
                    gflag
                )?;
            }
        }
        Ok(())
    }

    /// Manifest with config hash, crate version, prediction and per-cell seeds.
    pub fn manifest(&self) -> serde_json::Value {
        let seeds: Vec<serde_json::Value> = self
            .cells
            .iter()
            .map(|c| serde_json::json!({ "n": c.n, "trial": c.trial, "seed": c.seed }))
            .collect();
        serde_json::json!({
            "crate": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "config_sha256": self.config.hash(),
            "config": self.config,
            "prediction": self.prediction.as_ref().map(|p| p.to_key_value(None)),
            "seeds": seeds,
        })
    }

    /// Writes the CSV to `output_path` and the manifest next to it; returns both paths.
    pub fn write_outputs(&self) -> Result<(PathBuf, PathBuf)> {
        let csv_path = PathBuf::from(&self.config.output_path);
        if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut out = BufWriter::new(File::create(&csv_path)?);
        self.write_csv(&mut out)?;
        out.flush()?;
        let mut manifest_path = csv_path.clone().into_os_string();
        manifest_path.push(".manifest.json");
        let manifest_path = PathBuf::from(manifest_path);
        let text = serde_json::to_string_pretty(&self.manifest()).expect("manifest serializes");
        std::fs::write(&manifest_path, text + "\n")?;
        Ok((csv_path, manifest_path))
    }
}

/// `Γ_k(i, j)` on independent graphs over one weight sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaTrials {
    pub n: usize,
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub counts: Vec<u128>,
}

/// Generates `config.trials` graphs with `n = n_list[0]` and counts `Γ_k(i, j)` in each.
/// Weights are fixed across trials unless `resample_weights` is set.
pub fn gamma_trials(config: &ExperimentConfig, i: usize, j: usize, k: usize) -> Result<GammaTrials> {
    config.validate()?;
    config.check_resources()?;
    let n = config.n_list[0];
    let params = CameoParams::new(n, config.c, config.alpha)?;
    let fixed = if config.resample_weights { None } else { Some(config.weights_for(n, 0)?) };
    let counts = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let owned;
            let sample = match &fixed {
                Some(s) => s,
                None => {
                    owned = config.weights_for(n, t)?;
                    &owned
                }
            };
            let g = graphgen::generate(&params, sample, config.trial_seed(n, t), Method::Envelope)?;
            pathconn::count_simple_paths(&g, i, j, k)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaTrials { n, k, i, j, counts })
}

/// Monte Carlo mean of `Γ_k(i, j)` against its exact expectation under fixed weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstMomentCheck {
    pub mean: f64,
    pub stderr: f64,
    pub exact: f64,
    pub trials: usize,
}

impl FirstMomentCheck {
    pub fn z_score(&self) -> f64 {
        if self.stderr > 0.0 {
            (self.mean - self.exact) / self.stderr
        } else if self.mean == self.exact {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

pub fn first_moment_check(config: &ExperimentConfig, i: usize, j: usize, k: usize) -> Result<FirstMomentCheck> {
    if config.resample_weights {
        return Err(CameoError::domain("first-moment check needs fixed weights"));
    }
    let n = config.n_list[0];
    let params = CameoParams::new(n, config.c, config.alpha)?;
    let sample = config.weights_for(n, 0)?;
    let exact = analytic::expected_gamma_paths_exact(&params, &sample, k, i, j)?;
    let runs = gamma_trials(config, i, j, k)?;
    let xs: Vec<f64> = runs.counts.iter().map(|&x| x as f64).collect();
    let (mean, stderr) = stats::mean_stderr(&xs);
    Ok(FirstMomentCheck { mean, stderr, exact, trials: xs.len() })
}

/// `E[Γ_k²] / E[Γ_k]²` estimated over fresh graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMomentRatio {
    pub ratio: Option<f64>,
    /// Delta-method standard error of `ratio`.
    pub stderr: Option<f64>,
    pub mean: f64,
    pub second_moment: f64,
    pub trials: usize,
    pub diagnostic: Option<String>,
}

pub const MIN_SECOND_MOMENT_TRIALS: usize = 100;

pub fn second_moment_ratio(config: &ExperimentConfig, i: usize, j: usize, k: usize) -> Result<SecondMomentRatio> {
    if config.trials < MIN_SECOND_MOMENT_TRIALS {
        return Err(CameoError::domain(format!(
            "second-moment ratio needs >= {MIN_SECOND_MOMENT_TRIALS} trials, got {}",
            config.trials
        )));
    }
    let runs = gamma_trials(config, i, j, k)?;
    Ok(ratio_from_counts(&runs.counts))
}

fn ratio_from_counts(counts: &[u128]) -> SecondMomentRatio {
    let t = counts.len() as f64;
    let xs: Vec<f64> = counts.iter().map(|&x| x as f64).collect();
    let m1 = xs.iter().sum::<f64>() / t;
    let m2 = xs.iter().map(|x| x * x).sum::<f64>() / t;
    if m1 == 0.0 {
        return SecondMomentRatio {
            ratio: None,
            stderr: None,
            mean: 0.0,
            second_moment: m2,
            trials: counts.len(),
            diagnostic: Some("no paths observed in any trial; ratio undefined".into()),
        };
    }
    let ratio = m2 / (m1 * m1);
    // R = m2/m1²: ∂R/∂m2 = 1/m1², ∂R/∂m1 = -2m2/m1³.
    let (g2, g1) = (1.0 / (m1 * m1), -2.0 * m2 / (m1 * m1 * m1));
    let mut var = 0.0;
    for &x in &xs {
        let u = g2 * (x * x - m2) + g1 * (x - m1);
        var += u * u;
    }
    let stderr = (var / (t * (t - 1.0).max(1.0))).sqrt();
    SecondMomentRatio {
        ratio: Some(ratio),
        stderr: Some(stderr),
        mean: m1,
        second_moment: m2,
        trials: counts.len(),
        diagnostic: None,
    }
}

/// Mean edge count over seeded graphs against `c(n - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDensityCheck {
    pub mean: f64,
    pub stderr: f64,
    pub expected: f64,
    pub counts: Vec<usize>,
}

/// Fresh weights and graph per trial.
pub fn edge_density_check(
    dist: &WeightDistribution,
    n: usize,
    c: f64,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<EdgeDensityCheck> {
    if trials == 0 {
        return Err(CameoError::domain("trials must be >= 1"));
    }
    let params = CameoParams::new(n, c, alpha)?;
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = derive_seed(seed, &[n as u64, t as u64]);
            let sample = weights::sample_weights(dist, n, alpha, s)?;
            Ok(graphgen::generate(&params, &sample, s, Method::Envelope)?.edge_count())
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = counts.iter().map(|&x| x as f64).collect();
    let (mean, stderr) = stats::mean_stderr(&xs);
    Ok(EdgeDensityCheck { mean, stderr, expected: params.expected_edge_count(), counts })
}

/// Per-`n` maximum-weight scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Row {
    pub n: usize,
    /// Median of `ln(max ω) / ln(expected_max_weight(n))`; 1 when `n = 1`.
    pub median_ratio: f64,
    /// Median of `ln(max ω) / ln n`; 1 when `n = 1`.
    pub median_log_n_ratio: f64,
    pub median_max_weight: f64,
    pub expected_max_weight: f64,
}

pub fn validate_lemma1(dist: &WeightDistribution, n_list: &[usize], trials: usize, seed: u64) -> Result<Vec<Lemma1Row>> {
    if trials < 10 {
        return Err(CameoError::domain(format!("max-weight validation needs >= 10 trials, got {trials}")));
    }
    n_list
        .iter()
        .map(|&n| {
            let maxima = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let s = weights::sample_weights(dist, n, 0.0, derive_seed(seed, &[n as u64, t as u64]))?;
                    Ok(s.omegas.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                })
                .collect::<Result<Vec<f64>>>()?;
            let expected = dist.expected_max_weight(n as u64);
            let (ratios, log_n): (Vec<f64>, Vec<f64>) = if n == 1 {
                (vec![1.0], vec![1.0])
            } else {
                maxima.iter().map(|m| (m.ln() / expected.ln(), m.ln() / (n as f64).ln())).unzip()
            };
            Ok(Lemma1Row {
                n,
                median_ratio: stats::median(&ratios).unwrap(),
                median_log_n_ratio: stats::median(&log_n).unwrap(),
                median_max_weight: stats::median(&maxima).unwrap(),
                expected_max_weight: expected,
            })
        })
        .collect()
}

/// Hill estimate of the induced tail of `y = φ(ω)^{-β}` against its prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Row {
    pub n: usize,
    pub beta: f64,
    pub predicted_exponent: f64,
    pub median_hill_exponent: f64,
}

/// Fraction of upper order statistics fed to the Hill estimator.
pub const HILL_FRACTION: f64 = 0.01;

pub fn validate_lemma2(
    dist: &WeightDistribution,
    beta: f64,
    n_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<Lemma2Row>> {
    if trials == 0 {
        return Err(CameoError::domain("trials must be >= 1"));
    }
    let predicted = dist.induced_tail_exponent(beta)?;
    n_list
        .iter()
        .map(|&n| {
            let estimates = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let s = weights::sample_weights(dist, n, beta, derive_seed(seed, &[n as u64, t as u64]))?;
                    stats::hill_density_exponent(&s.ys, HILL_FRACTION)
                        .ok_or_else(|| CameoError::domain(format!("n={n} is too small for a tail estimate")))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(Lemma2Row { n, beta, predicted_exponent: predicted, median_hill_exponent: stats::median(&estimates).unwrap() })
        })
        .collect()
}

/// Truncated moment against the ergodic sum `(1/n) Σ φ(ω_i)^{-β}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3Row {
    pub n: usize,
    pub truncated_moment: f64,
    /// Median of `|ln(truncated / ergodic)| / ln n`.
    pub median_normalized_log_ratio: f64,
    /// Median of `truncated / ergodic`.
    pub median_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3Table {
    pub beta: f64,
    /// False when `∫ φ^{1-β}` converges; the rows then test the law of large numbers instead.
    pub divergent: bool,
    pub diagnostic: Option<String>,
    pub rows: Vec<Lemma3Row>,
}

pub fn validate_lemma3(
    dist: &WeightDistribution,
    beta: f64,
    n_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Lemma3Table> {
    if trials == 0 {
        return Err(CameoError::domain("trials must be >= 1"));
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(CameoError::domain(format!("beta must be positive, got {beta}")));
    }
    let divergent = dist.moment_a(beta).is_divergent();
    let diagnostic = (!divergent).then(|| {
        format!("moment at beta={beta} is finite; truncated-moment regime does not apply, expect ratio -> 1")
    });
    let rows = n_list
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(CameoError::domain("truncated-moment validation needs n >= 2"));
            }
            let truncated = dist.truncated_moment(beta, n as u64)?;
            let ratios = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let s = weights::sample_weights(dist, n, beta, derive_seed(seed, &[n as u64, t as u64]))?;
                    Ok(truncated / (s.normalizer / n as f64))
                })
                .collect::<Result<Vec<f64>>>()?;
            let normalized: Vec<f64> = ratios.iter().map(|r| r.ln().abs() / (n as f64).ln()).collect();
            Ok(Lemma3Row {
                n,
                truncated_moment: truncated,
                median_normalized_log_ratio: stats::median(&normalized).unwrap(),
                median_ratio: stats::median(&ratios).unwrap(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Lemma3Table { beta, divergent, diagnostic, rows })
}

/// `ln(-φ/φ') / ln φ` on a geometric grid from `ω = 2` up to `ω_max`.
pub fn validate_regularity(dist: &WeightDistribution, omega_max: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    if omega_max.is_nan() || omega_max <= 2.0 || points < 2 {
        return Err(CameoError::domain("regularity grid needs omega_max > 2 and >= 2 points"));
    }
    let grid: Vec<f64> =
        (0..points).map(|i| 2.0 * (omega_max / 2.0).powf(i as f64 / (points - 1) as f64)).collect();
    let values = dist.regularity_exponent(&grid);
    Ok(grid.into_iter().zip(values).collect())
}
