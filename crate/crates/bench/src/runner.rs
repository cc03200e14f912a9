use curriculum::toyenv::ToySpace;
use curriculum::{build_teacher, RunConfig, TeacherSession};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};

/// One metric snapshot of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub run_id: usize,
    pub episode: u64,
    /// Unlocked share of the toy space's cells, in `[0, 1]`.
    pub unlocked_pct: f64,
    pub cumulative_reward: f64,
}

/// Episodes at which a run takes a snapshot.
pub fn snapshot_schedule(cfg: &ExperimentConfig) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    if cfg.record_initial {
        out.push(0);
    }
    out.extend((1..=cfg.budget / cfg.eval_every).map(|i| i * cfg.eval_every));
    if out.last() != Some(&cfg.budget) {
        out.push(cfg.budget);
    }
    out
}

/// Runs `budget` episodes of propose → toy episode → observe with the
/// teacher seeded by `seed`. The run id is the seed's offset from
/// `base_seed`.
pub fn run_single(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<MetricRow>> {
    cfg.validate()?;
    let run = RunConfig::new(cfg.budget, seed);
    run.validate()?;
    let run_id = seed.wrapping_sub(cfg.base_seed) as usize;
    execute(cfg, &run, run_id).map_err(|source| BenchError::RunFailed { seed, source })
}

fn execute(
    cfg: &ExperimentConfig,
    run: &RunConfig,
    run_id: usize,
) -> curriculum::Result<Vec<MetricRow>> {
    let mut env = ToySpace::new(cfg.env.clone())?;
    let teacher = build_teacher(cfg.teacher, env.space(), &cfg.params, run.seed)?;
    let mut session = TeacherSession::new(teacher);

    let schedule = snapshot_schedule(cfg);
    let mut rows = Vec::with_capacity(schedule.len());
    let mut next = schedule.iter().peekable();
    let mut cumulative = 0.0;
    let snapshot = |episode: u64, env: &ToySpace, cumulative: f64| MetricRow {
        run_id,
        episode,
        unlocked_pct: env.unlocked_fraction(),
        cumulative_reward: cumulative,
    };

    if next.peek() == Some(&&0) {
        rows.push(snapshot(0, &env, 0.0));
        next.next();
    }
    for episode in 1..=run.budget {
        let p = session.propose()?;
        let reward = env.episode(&p)?;
        session.observe(reward)?;
        cumulative += reward;
        if next.peek() == Some(&&episode) {
            rows.push(snapshot(episode, &env, cumulative));
            next.next();
        }
    }
    debug_assert_eq!(session.history().len() as u64, run.budget);
    Ok(rows)
}
