use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::runner::{run_single, MetricRow};

/// Median across runs at one snapshot episode, with the per-run values it
/// summarizes (ordered by run id).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianPoint {
    pub episode: u64,
    pub median: f64,
    pub per_run: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    /// One curve per repeat, indexed by run id.
    pub runs: Vec<Vec<MetricRow>>,
    pub median: Vec<MedianPoint>,
}

impl CampaignResult {
    /// All rows ordered by `(run_id, episode)`.
    pub fn rows(&self) -> impl Iterator<Item = &MetricRow> {
        self.runs.iter().flatten()
    }

    pub fn final_median(&self) -> f64 {
        self.median.last().map_or(f64::NAN, |p| p.median)
    }
}

/// Standard median; even counts average the two middle order statistics.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty set");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Runs every repeat (in parallel when threads are available) and
/// aggregates the unlocked fraction per snapshot. The first failing seed,
/// in run order, aborts the campaign.
pub fn run_campaign(cfg: &ExperimentConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let seeds: Vec<u64> = cfg.seeds().collect();
    let runs = seeds
        .par_iter()
        .map(|&seed| run_single(cfg, seed))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let median = aggregate(&runs);
    Ok(CampaignResult { runs, median })
}

fn aggregate(runs: &[Vec<MetricRow>]) -> Vec<MedianPoint> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    (0..first.len())
        .map(|i| {
            let per_run: Vec<f64> = runs.iter().map(|r| r[i].unlocked_pct).collect();
            MedianPoint {
                episode: first[i].episode,
                median: median(&per_run),
                per_run,
            }
        })
        .collect()
}
