//! The teacher contract and the session type that enforces it.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::history::{History, SampleRecord};
use crate::space::{ParameterSpace, ParameterVector};

/// Which internal rule produced the most recent proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalSource {
    /// Uniform draw while a model-based teacher is still bootstrapping.
    Bootstrap,
    /// Uniform draw over the whole space taken as exploration.
    Uniform,
    /// Uniform draw because no usable model exists yet.
    Fallback,
    /// Draw from a mixture component selected by learning-progress utility.
    Mixture,
    /// Uniform draw inside a region selected by learning-progress utility.
    Region,
    /// Perturbation of a region's lowest-reward parameter.
    Mutation,
    /// Uniform draw inside a sliding window.
    Window,
}

/// A curriculum strategy. `propose` and `observe` strictly alternate; use
/// [`TeacherSession`] to have that checked.
pub trait Teacher: Send {
    fn name(&self) -> &'static str;

    fn space(&self) -> &ParameterSpace;

    /// Next task parameter; always inside [`Teacher::space`].
    fn propose(&mut self) -> ParameterVector;

    /// Episodic reward obtained on the last proposal.
    fn observe(&mut self, param: &ParameterVector, reward: f64);

    fn last_source(&self) -> Option<ProposalSource>;
}

/// Episode budget and the (fixed) interaction shape of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub budget: u64,
    /// Tasks sampled per proposed parameter; only 1 is supported.
    pub tasks_per_param: u32,
    /// Importance weight of every parameter; only 1 is supported.
    pub weight: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(budget: u64, seed: u64) -> Self {
        Self {
            budget,
            tasks_per_param: 1,
            weight: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(CoreError::InvalidConfig("budget must be positive".into()));
        }
        if self.tasks_per_param != 1 {
            return Err(CoreError::InvalidConfig(format!(
                "tasks_per_param must be 1, got {}",
                self.tasks_per_param
            )));
        }
        if self.weight != 1.0 {
            return Err(CoreError::InvalidConfig(format!(
                "weight must be 1, got {}",
                self.weight
            )));
        }
        Ok(())
    }
}

/// Owns a teacher and the interaction history, and rejects any call that
/// breaks propose/observe alternation.
pub struct TeacherSession {
    teacher: Box<dyn Teacher>,
    history: History,
    pending: Option<ParameterVector>,
}

impl TeacherSession {
    pub fn new(teacher: Box<dyn Teacher>) -> Self {
        let dims = teacher.space().dims();
        Self {
            teacher,
            history: History::new(dims),
            pending: None,
        }
    }

    pub fn propose(&mut self) -> Result<ParameterVector> {
        if self.pending.is_some() {
            return Err(CoreError::ProposalOutstanding);
        }
        let param = self.teacher.propose();
        debug_assert!(self.teacher.space().contains(&param));
        self.pending = Some(param.clone());
        Ok(param)
    }

    pub fn observe(&mut self, reward: f64) -> Result<&SampleRecord> {
        if !reward.is_finite() {
            return Err(CoreError::NonFiniteReward(reward));
        }
        let param = self
            .pending
            .take()
            .ok_or(CoreError::NoOutstandingProposal)?;
        self.teacher.observe(&param, reward);
        Ok(self.history.push(param, reward))
    }

    pub fn pending(&self) -> Option<&ParameterVector> {
        self.pending.as_ref()
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn teacher(&self) -> &dyn Teacher {
        self.teacher.as_ref()
    }

    pub fn space(&self) -> &ParameterSpace {
        self.teacher.space()
    }
}
