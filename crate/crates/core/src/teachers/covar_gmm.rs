//! Time-reward covariance mixture teacher.
//!
//! Fits a mixture on `(parameter, reward, relative time)` rows of the recent
//! window and samples components in proportion to their positive covariance
//! between time and reward, i.e. recent positive progress.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mixture::{GmmTeacherConfig, MixtureCore};
use crate::error::Result;
use crate::space::{ParameterSpace, ParameterVector};
use crate::stats::{GaussianComponent, GmmModel};
use crate::teacher::{ProposalSource, Teacher};

pub struct CovarGmm {
    core: MixtureCore,
    /// `(normalized parameter, reward)`, oldest first.
    window: VecDeque<(Vec<f64>, f64)>,
}

/// Max(0, time/reward covariance entry) for a component fitted on rows
/// laid out as `param ⊕ reward ⊕ time` with `dims` parameter axes.
pub(crate) fn time_reward_utility(component: &GaussianComponent, dims: usize) -> f64 {
    component.covariance_entry(dims + 1, dims).max(0.0)
}

impl CovarGmm {
    pub fn new(space: ParameterSpace, cfg: GmmTeacherConfig, seed: u64) -> Result<Self> {
        let capacity = cfg.fit_rate;
        Ok(Self {
            core: MixtureCore::new(space, cfg, ChaCha8Rng::seed_from_u64(seed))?,
            window: VecDeque::with_capacity(capacity),
        })
    }

    /// Fitting rows: normalized parameter, reward, then rank / (len - 1)
    /// so the oldest row has time 0 and the newest time 1.
    pub fn fitting_rows(&self) -> Vec<Vec<f64>> {
        let last = self.window.len().saturating_sub(1).max(1) as f64;
        self.window
            .iter()
            .enumerate()
            .map(|(rank, (unit, reward))| {
                let mut row = unit.clone();
                row.push(*reward);
                row.push(rank as f64 / last);
                row
            })
            .collect()
    }

    pub fn model(&self) -> Option<&GmmModel> {
        self.core.model()
    }

    pub fn utilities(&self) -> &[f64] {
        self.core.utilities()
    }

    pub fn fits(&self) -> u64 {
        self.core.fits()
    }

    /// Scheduled refits that produced no model.
    pub fn failed_fits(&self) -> u64 {
        self.core.failed_fits()
    }

    #[cfg(test)]
    pub(crate) fn core_mut(&mut self) -> &mut MixtureCore {
        &mut self.core
    }
}

impl Teacher for CovarGmm {
    fn name(&self) -> &'static str {
        "covargmm"
    }

    fn space(&self) -> &ParameterSpace {
        &self.core.space
    }

    fn propose(&mut self) -> ParameterVector {
        self.core.propose()
    }

    fn observe(&mut self, param: &ParameterVector, reward: f64) {
        let unit = self
            .core
            .space
            .normalize(param)
            .expect("observed parameter lies in the space");
        if self.window.len() == self.core.cfg.fit_rate {
            self.window.pop_front();
        }
        self.window.push_back((unit, reward));

        if self.core.tick() {
            let rows = self.fitting_rows();
            let dims = self.core.space.dims();
            self.core.refit(&rows, |c| time_reward_utility(c, dims));
        }
    }

    fn last_source(&self) -> Option<ProposalSource> {
        self.core.last_source()
    }
}
