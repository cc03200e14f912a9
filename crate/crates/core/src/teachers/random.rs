use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::space::{ParameterSpace, ParameterVector};
use crate::teacher::{ProposalSource, Teacher};

/// Uniform sampling over the whole space, ignoring all feedback.
pub struct RandomTeacher {
    space: ParameterSpace,
    rng: ChaCha8Rng,
}

impl RandomTeacher {
    pub fn new(space: ParameterSpace, seed: u64) -> Self {
        Self {
            space,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Teacher for RandomTeacher {
    fn name(&self) -> &'static str {
        "random"
    }

    fn space(&self) -> &ParameterSpace {
        &self.space
    }

    fn propose(&mut self) -> ParameterVector {
        self.space.sample_uniform(&mut self.rng)
    }

    fn observe(&mut self, _param: &ParameterVector, _reward: f64) {}

    fn last_source(&self) -> Option<ProposalSource> {
        Some(ProposalSource::Uniform)
    }
}
