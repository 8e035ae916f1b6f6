//! Monte Carlo sweeps of `P(H(n, k, p) is r-colorable)` over a grid of `p`.
//!
//! Sample `j` of grid point `i` is drawn from stream `(i << 32) | j` of the
//! configured seed; the colorer seed for that sample is the next word of the
//! same stream. Work is spread over a rayon pool and gathered in
//! `(point, sample)` order, so the output does not depend on the thread count.

use std::io::Write;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::omega_max;
use crate::model::{sample_with, ModelParams};
use crate::oracle::{is_r_colorable, Decision, OracleLimits};
use crate::recolor::{color, derive_params, RecolorError, RecoloringParams};
use crate::rng::{stream_rng, sweep_stream};

/// First line of every sweep CSV.
pub const SCHEMA_LINE: &str = "# hypercolor sweep schema v1";

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    Config(String),
    #[error(transparent)]
    Recolor(#[from] RecolorError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn config_err(msg: impl Into<String>) -> SweepError {
    SweepError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Recolor,
    Oracle,
    Both,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "recolor" => Ok(Method::Recolor),
            "oracle" => Ok(Method::Oracle),
            "both" => Ok(Method::Both),
            _ => Err(format!("unknown method {s:?} (expected recolor, oracle or both)")),
        }
    }
}

/// Grid of edge probabilities: explicit values or `steps` evenly spaced
/// points from `from` to `to` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PGrid {
    Explicit(Vec<f64>),
    Linear { from: f64, to: f64, steps: usize },
}

impl PGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            PGrid::Explicit(v) => v.clone(),
            PGrid::Linear { from, to, steps } => match steps {
                0 => Vec::new(),
                1 => vec![*from],
                s => (0..*s).map(|i| from + (to - from) * i as f64 / (s - 1) as f64).collect(),
            },
        }
    }
}

fn default_max_trials() -> usize {
    100
}

fn default_threads() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub p_grid: PGrid,
    pub samples_per_point: usize,
    pub method: Method,
    #[serde(default = "default_max_trials")]
    pub max_trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub omega: Option<u64>,
    /// Overrides the derived `q` of the colorer.
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default = "default_threads")]
    pub threads: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<Vec<f64>, SweepError> {
        ModelParams::new(self.n, self.k, 0.0, self.seed).map_err(|e| config_err(e.to_string()))?;
        if self.r < 1 {
            return Err(config_err("r must be at least 1"));
        }
        if self.samples_per_point == 0 {
            return Err(config_err("samples_per_point must be at least 1"));
        }
        if self.max_trials == 0 {
            return Err(config_err("max_trials must be at least 1"));
        }
        if self.threads == 0 {
            return Err(config_err("threads must be at least 1"));
        }
        let grid = self.p_grid.values();
        if grid.is_empty() {
            return Err(config_err("p_grid is empty"));
        }
        if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(config_err(format!("p_grid value {p} outside [0, 1]")));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_err("p_grid must be strictly increasing"));
        }
        if grid.len() > u32::MAX as usize || self.samples_per_point > u32::MAX as usize {
            return Err(config_err("grid or sample count too large"));
        }
        Ok(grid)
    }

    /// Colorer parameters: derived from `(k, r, α, b, ω)` with the `q` override.
    pub fn recoloring_params(&self) -> Result<RecoloringParams, SweepError> {
        let omega = self.omega.unwrap_or_else(|| omega_max(self.k as f64));
        let params = derive_params(self.k, self.r, self.alpha.unwrap_or(2.0), self.b.unwrap_or(4.0), omega)?;
        Ok(match self.q {
            Some(q) => params.with_q(q)?,
            None => params,
        })
    }
}

/// One CSV row: a grid point evaluated by one method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub p: f64,
    /// Samples with a definite verdict.
    pub samples: usize,
    pub successes: usize,
    pub estimate: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub method: &'static str,
    pub seed: u64,
    /// Mean trials used by the colorer, failures counted at `max_trials`.
    pub mean_trials: Option<f64>,
    pub frac_2simple: f64,
    pub mean_max_triangles: f64,
    /// Samples without a verdict (capacity or budget exhausted).
    pub unknown: usize,
}

/// 95% Wilson score interval for `successes` out of `samples`.
pub fn wilson_interval(successes: usize, samples: usize) -> Option<(f64, f64)> {
    if samples == 0 || successes > samples {
        return None;
    }
    let n = samples as f64;
    let phat = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    Some(((center - half).clamp(0.0, phat), (center + half).clamp(phat, 1.0)))
}

#[derive(Debug, Clone, Copy, Default)]
struct SampleResult {
    two_simple: bool,
    max_triangles: usize,
    /// False when the sample could not be drawn.
    drawn: bool,
    recolor: Option<(bool, usize)>,
    oracle: Option<bool>,
}

fn run_sample(
    config: &SweepConfig,
    params: Option<&RecoloringParams>,
    limits: &OracleLimits,
    p: f64,
    point: u32,
    sample: u32,
) -> SampleResult {
    let mut rng = stream_rng(config.seed, sweep_stream(point, sample));
    let Ok(h) = sample_with(config.n, config.k, p, &mut rng) else {
        return SampleResult::default();
    };
    let color_seed = rng.next_u64();
    let mut out = SampleResult {
        two_simple: h.is_l_simple(2),
        max_triangles: h.max_triangles_per_edge(),
        drawn: true,
        ..Default::default()
    };
    if let Some(params) = params {
        let outcome = color(&h, params, config.max_trials, color_seed).expect("validated parameters");
        out.recolor = Some((outcome.success, outcome.trials_used));
    }
    if config.method != Method::Recolor {
        out.oracle = match is_r_colorable(&h, config.r, limits) {
            Ok(Decision::Colorable(_)) => Some(true),
            Ok(Decision::NotColorable) => Some(false),
            Ok(Decision::Unknown) | Err(_) => None,
        };
    }
    if let (Some((true, _)), Some(false)) = (out.recolor, out.oracle) {
        panic!("colorer found a proper coloring the oracle says cannot exist (point {point}, sample {sample})");
    }
    out
}

/// Runs the sweep with the default oracle limits.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>, SweepError> {
    run_sweep_with_limits(config, &OracleLimits::default())
}

pub fn run_sweep_with_limits(config: &SweepConfig, limits: &OracleLimits) -> Result<Vec<SweepRecord>, SweepError> {
    let grid = config.validate()?;
    let params = match config.method {
        Method::Oracle => None,
        _ => Some(config.recoloring_params()?),
    };
    let samples = config.samples_per_point;
    let tasks: Vec<(u32, u32)> =
        (0..grid.len() as u32).flat_map(|i| (0..samples as u32).map(move |j| (i, j))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| config_err(format!("thread pool: {e}")))?;
    let results: Vec<SampleResult> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, j)| run_sample(config, params.as_ref(), limits, grid[i as usize], i, j))
            .collect()
    });

    let mut records = Vec::new();
    for (i, &p) in grid.iter().enumerate() {
        let chunk = &results[i * samples..(i + 1) * samples];
        let drawn: Vec<&SampleResult> = chunk.iter().filter(|s| s.drawn).collect();
        let nd = drawn.len().max(1) as f64;
        let frac_2simple = drawn.iter().filter(|s| s.two_simple).count() as f64 / nd;
        let mean_max_triangles = drawn.iter().map(|s| s.max_triangles as f64).sum::<f64>() / nd;
        let row = |method: &'static str, verdicts: Vec<Option<bool>>, mean_trials: Option<f64>| {
            let decided = verdicts.iter().flatten().count();
            let successes = verdicts.iter().flatten().filter(|&&b| b).count();
            let ci = wilson_interval(successes, decided);
            SweepRecord {
                n: config.n,
                k: config.k,
                r: config.r,
                p,
                samples: decided,
                successes,
                estimate: (decided > 0).then(|| successes as f64 / decided as f64),
                ci_low: ci.map(|c| c.0),
                ci_high: ci.map(|c| c.1),
                method,
                seed: config.seed,
                mean_trials,
                frac_2simple,
                mean_max_triangles,
                unknown: verdicts.len() - decided,
            }
        };
        if params.is_some() {
            let verdicts = chunk.iter().map(|s| s.recolor.map(|r| r.0)).collect();
            let trials: Vec<usize> = chunk.iter().filter_map(|s| s.recolor.map(|r| r.1)).collect();
            let mean = (!trials.is_empty()).then(|| trials.iter().sum::<usize>() as f64 / trials.len() as f64);
            records.push(row("recolor", verdicts, mean));
        }
        if config.method != Method::Recolor {
            let verdicts = chunk.iter().map(|s| s.oracle).collect();
            records.push(row("oracle", verdicts, None));
        }
    }
    Ok(records)
}

/// Writes the schema line, the header and one row per record.
pub fn write_csv<W: Write>(records: &[SweepRecord], mut out: W) -> Result<(), SweepError> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut writer = csv::Writer::from_writer(out);
    if records.is_empty() {
        writer.write_record([
            "n", "k", "r", "p", "samples", "successes", "estimate", "ci_low", "ci_high", "method", "seed",
            "mean_trials", "frac_2simple", "mean_max_triangles", "unknown",
        ])?;
    }
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}
