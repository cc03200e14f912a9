//! Experiment configuration.
//!
//! Files are flat TOML: every key sits at the top level, teacher
//! hyperparameters carry a prefix (`em_`, `riac_`, `oracle_`), and anything
//! omitted takes its default. Only `budget` is required.
//!
//! ```toml
//! teacher = "alpgmm"
//! budget = 100000
//! repeats = 20
//! eval_every = 5000
//! relevant_dims = 2
//! cubes_per_dim = 10
//! ```

use std::path::Path;

use curriculum::teachers::{GmmTeacherConfig, OracleConfig, RiacConfig};
use curriculum::toyenv::ToySpaceConfig;
use curriculum::{ParameterSpace, TeacherKind, TeacherParams};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// On-disk form. Unknown keys are rejected so typos do not silently fall
/// back to defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub teacher: Option<TeacherKind>,
    pub budget: Option<u64>,
    pub repeats: Option<usize>,
    pub eval_every: Option<u64>,
    pub base_seed: Option<u64>,
    pub record_initial: Option<bool>,

    pub relevant_dims: Option<usize>,
    pub irrelevant_dims: Option<usize>,
    pub cubes_per_dim: Option<usize>,
    pub unlock_count: Option<u32>,
    pub reward_cap: Option<u32>,

    /// Explicit bounds for `bench serve`; a toy-space run always uses the
    /// unit box of the toy space.
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,

    pub fit_rate: Option<usize>,
    pub k_min: Option<usize>,
    pub k_max: Option<usize>,
    pub p_rnd: Option<f64>,
    pub em_max_iters: Option<usize>,
    pub em_rel_tol: Option<f64>,
    pub em_cov_floor: Option<f64>,
    pub em_n_init: Option<usize>,

    pub riac_max_s: Option<usize>,
    pub riac_n_candidates: Option<usize>,
    pub riac_min_s: Option<usize>,
    pub riac_min_d: Option<f64>,
    pub riac_mutation_sigma: Option<f64>,
    pub riac_p_random: Option<f64>,
    pub riac_p_region: Option<f64>,
    pub riac_p_mutate: Option<f64>,

    pub oracle_window_size: Option<Vec<f64>>,
    pub oracle_step: Option<Vec<f64>>,
    pub oracle_reward_threshold: Option<f64>,
    pub oracle_m_size: Option<usize>,
    pub oracle_direction: Option<Vec<f64>>,
    pub oracle_initial_position: Option<Vec<f64>>,
}

impl ExperimentFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|source| BenchError::ConfigSyntax {
            path: origin.to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Fills defaults and validates.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let budget = self
            .budget
            .ok_or_else(|| BenchError::Config("`budget` is required".into()))?;

        let env_default = ToySpaceConfig::default();
        let env = ToySpaceConfig {
            relevant_dims: self.relevant_dims.unwrap_or(env_default.relevant_dims),
            irrelevant_dims: self.irrelevant_dims.unwrap_or(env_default.irrelevant_dims),
            cubes_per_dim: self.cubes_per_dim.unwrap_or(env_default.cubes_per_dim),
            unlock_count: self.unlock_count.unwrap_or(env_default.unlock_count),
            reward_cap: self.reward_cap.unwrap_or(env_default.reward_cap),
        };

        let gmm_default = GmmTeacherConfig::default();
        let mut gmm = GmmTeacherConfig {
            fit_rate: self.fit_rate.unwrap_or(gmm_default.fit_rate),
            k_min: self.k_min.unwrap_or(gmm_default.k_min),
            k_max: self.k_max.unwrap_or(gmm_default.k_max),
            p_rnd: self.p_rnd.unwrap_or(gmm_default.p_rnd),
            em: gmm_default.em,
        };
        gmm.em.max_iters = self.em_max_iters.unwrap_or(gmm.em.max_iters);
        gmm.em.rel_tol = self.em_rel_tol.unwrap_or(gmm.em.rel_tol);
        gmm.em.cov_floor = self.em_cov_floor.unwrap_or(gmm.em.cov_floor);
        gmm.em.n_init = self.em_n_init.unwrap_or(gmm.em.n_init);

        let r = RiacConfig::default();
        let riac = RiacConfig {
            max_s: self.riac_max_s.unwrap_or(r.max_s),
            n_candidates: self.riac_n_candidates.unwrap_or(r.n_candidates),
            min_s: self.riac_min_s.unwrap_or(r.min_s),
            min_d: self.riac_min_d.unwrap_or(r.min_d),
            mutation_sigma: self.riac_mutation_sigma.unwrap_or(r.mutation_sigma),
            p_random: self.riac_p_random.unwrap_or(r.p_random),
            p_region: self.riac_p_region.unwrap_or(r.p_region),
            p_mutate: self.riac_p_mutate.unwrap_or(r.p_mutate),
        };

        let o = OracleConfig::default();
        let oracle = OracleConfig {
            window_size: self.oracle_window_size.clone().unwrap_or(o.window_size),
            step: self.oracle_step.clone().unwrap_or(o.step),
            reward_threshold: self.oracle_reward_threshold.unwrap_or(o.reward_threshold),
            m_size: self.oracle_m_size.unwrap_or(o.m_size),
            direction: self.oracle_direction.clone().unwrap_or(o.direction),
            initial_position: self
                .oracle_initial_position
                .clone()
                .unwrap_or(o.initial_position),
        };

        let bounds = match (&self.lower, &self.upper) {
            (None, None) => None,
            (Some(l), Some(u)) => Some(ParameterSpace::new(l.clone(), u.clone())?),
            _ => {
                return Err(BenchError::Config(
                    "`lower` and `upper` must be given together".into(),
                ))
            }
        };

        let cfg = ExperimentConfig {
            teacher: self.teacher.unwrap_or(TeacherKind::AlpGmm),
            params: TeacherParams { gmm, riac, oracle },
            env,
            budget,
            repeats: self.repeats.unwrap_or(20),
            eval_every: self.eval_every.unwrap_or(budget.min(1000)),
            base_seed: self.base_seed.unwrap_or(0),
            record_initial: self.record_initial.unwrap_or(false),
            bounds,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub teacher: TeacherKind,
    pub params: TeacherParams,
    pub env: ToySpaceConfig,
    /// Episodes per run.
    pub budget: u64,
    pub repeats: usize,
    /// Episodes between metric snapshots.
    pub eval_every: u64,
    pub base_seed: u64,
    /// Also emit a snapshot at episode 0.
    pub record_initial: bool,
    pub bounds: Option<ParameterSpace>,
}

impl ExperimentConfig {
    /// Defaults for everything but the teacher, environment and budget.
    pub fn new(teacher: TeacherKind, env: ToySpaceConfig, budget: u64) -> Self {
        Self {
            teacher,
            params: TeacherParams::default(),
            env,
            budget,
            repeats: 20,
            eval_every: budget.min(1000),
            base_seed: 0,
            record_initial: false,
            bounds: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(BenchError::Config("budget must be positive".into()));
        }
        if self.repeats == 0 {
            return Err(BenchError::Config("repeats must be at least 1".into()));
        }
        if self.eval_every == 0 || self.eval_every > self.budget {
            return Err(BenchError::Config(format!(
                "eval_every must lie in 1..={} (the budget), got {}",
                self.budget, self.eval_every
            )));
        }
        self.env.validate()?;
        self.params.gmm.validate()?;
        self.params.riac.validate()?;
        // Oracle vectors depend on the dimensionality; building one checks them.
        curriculum::teachers::Oracle::new(self.space(), self.params.oracle.clone(), 0)?;
        Ok(())
    }

    /// The space teachers sample from: explicit bounds if configured,
    /// otherwise the toy space's unit box.
    pub fn space(&self) -> ParameterSpace {
        self.bounds.clone().unwrap_or_else(|| self.env.space())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.repeats as u64).map(move |i| self.base_seed.wrapping_add(i))
    }
}
