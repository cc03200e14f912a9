//! The five curriculum strategies behind the [`Teacher`] trait.

mod alp_gmm;
mod covar_gmm;
mod mixture;
mod oracle;
mod random;
pub mod riac;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::space::ParameterSpace;
use crate::teacher::Teacher;

pub use alp_gmm::{compute_alp, AlpGmm};
pub use covar_gmm::CovarGmm;
pub use mixture::GmmTeacherConfig;
pub use oracle::{Oracle, OracleConfig};
pub use random::RandomTeacher;
pub use riac::{Riac, RiacConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TeacherKind {
    AlpGmm,
    CovarGmm,
    Riac,
    Oracle,
    Random,
}

impl TeacherKind {
    pub const ALL: [TeacherKind; 5] = [
        TeacherKind::AlpGmm,
        TeacherKind::CovarGmm,
        TeacherKind::Riac,
        TeacherKind::Oracle,
        TeacherKind::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TeacherKind::AlpGmm => "alpgmm",
            TeacherKind::CovarGmm => "covargmm",
            TeacherKind::Riac => "riac",
            TeacherKind::Oracle => "oracle",
            TeacherKind::Random => "random",
        }
    }
}

impl fmt::Display for TeacherKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TeacherKind {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        TeacherKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| CoreError::InvalidConfig(format!("unknown teacher `{s}`")))
    }
}

/// Hyperparameters for every teacher; each teacher reads its own part.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TeacherParams {
    pub gmm: GmmTeacherConfig,
    pub riac: RiacConfig,
    pub oracle: OracleConfig,
}

pub fn build_teacher(
    kind: TeacherKind,
    space: ParameterSpace,
    params: &TeacherParams,
    seed: u64,
) -> Result<Box<dyn Teacher>> {
    Ok(match kind {
        TeacherKind::AlpGmm => Box::new(AlpGmm::new(space, params.gmm.clone(), seed)?),
        TeacherKind::CovarGmm => Box::new(CovarGmm::new(space, params.gmm.clone(), seed)?),
        TeacherKind::Riac => Box::new(Riac::new(space, params.riac.clone(), seed)?),
        TeacherKind::Oracle => Box::new(Oracle::new(space, params.oracle.clone(), seed)?),
        TeacherKind::Random => Box::new(RandomTeacher::new(space, seed)),
    })
}

/// Index drawn with probability proportional to `weights` (negative weights
/// count as zero). Uniform when no weight is positive.
pub fn proportional_choice<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    assert!(!weights.is_empty(), "choice over an empty set");
    let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
    if !(total > 0.0) || !total.is_finite() {
        return rng.gen_range(0..weights.len());
    }
    let mut target = rng.gen::<f64>() * total;
    let mut last_positive = 0;
    for (i, w) in weights.iter().enumerate() {
        let w = w.max(0.0);
        if w > 0.0 {
            if target < w {
                return i;
            }
            target -= w;
            last_positive = i;
        }
    }
    last_positive
}
