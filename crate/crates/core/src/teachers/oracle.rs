//! Hand-designed sliding-window teacher.
//!
//! Samples uniformly in a fixed-size window and moves the window one step
//! toward harder parameters whenever the mean reward of the last `m_size`
//! episodes exceeds a threshold. Window size, step, direction, and start
//! position encode expert knowledge about the environment.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::space::{ParameterSpace, ParameterVector};
use crate::teacher::{ProposalSource, Teacher};

/// All vector fields are per dimension and in normalized units (fractions of
/// each dimension's range). Empty vectors take the defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Default 1/6.
    pub window_size: Vec<f64>,
    /// Default 1/30.
    pub step: Vec<f64>,
    pub reward_threshold: f64,
    pub m_size: usize,
    /// Sign of increasing difficulty: +1, -1, or 0 for a fixed dimension.
    /// Default +1 everywhere.
    pub direction: Vec<f64>,
    /// Lower corner of the initial window. Default: the easy end of every
    /// dimension (0 for +1 and 0, `1 - window_size` for -1).
    pub initial_position: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            window_size: Vec::new(),
            step: Vec::new(),
            reward_threshold: 230.0,
            m_size: 50,
            direction: Vec::new(),
            initial_position: Vec::new(),
        }
    }
}

fn per_dim(values: &[f64], dims: usize, default: f64, name: &str) -> Result<Vec<f64>> {
    match values.len() {
        0 => Ok(vec![default; dims]),
        n if n == dims => Ok(values.to_vec()),
        n => Err(CoreError::InvalidConfig(format!(
            "oracle {name} has {n} entries for a {dims}-dimensional space"
        ))),
    }
}

pub struct Oracle {
    space: ParameterSpace,
    size: Vec<f64>,
    step: Vec<f64>,
    direction: Vec<f64>,
    position: Vec<f64>,
    threshold: f64,
    m_size: usize,
    rewards: VecDeque<f64>,
    rng: ChaCha8Rng,
    advances: u64,
}

impl Oracle {
    pub fn new(space: ParameterSpace, cfg: OracleConfig, seed: u64) -> Result<Self> {
        let dims = space.dims();
        let size = per_dim(&cfg.window_size, dims, 1.0 / 6.0, "window_size")?;
        let step = per_dim(&cfg.step, dims, 1.0 / 30.0, "step")?;
        let direction = per_dim(&cfg.direction, dims, 1.0, "direction")?;
        if size.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) || step.iter().any(|s| !(*s >= 0.0)) {
            return Err(CoreError::InvalidConfig(
                "oracle window sizes must lie in (0, 1] and steps be non-negative".into(),
            ));
        }
        if direction.iter().any(|d| ![-1.0, 0.0, 1.0].contains(d)) {
            return Err(CoreError::InvalidConfig(
                "oracle directions must be -1, 0, or 1".into(),
            ));
        }
        if cfg.m_size == 0 || !cfg.reward_threshold.is_finite() {
            return Err(CoreError::InvalidConfig(
                "oracle m_size must be positive and the threshold finite".into(),
            ));
        }
        let default_start: Vec<f64> = direction
            .iter()
            .zip(&size)
            .map(|(d, s)| if *d < 0.0 { 1.0 - s } else { 0.0 })
            .collect();
        let mut position = if cfg.initial_position.is_empty() {
            default_start
        } else {
            per_dim(&cfg.initial_position, dims, 0.0, "initial_position")?
        };
        for (p, s) in position.iter_mut().zip(&size) {
            *p = p.clamp(0.0, 1.0 - s);
        }
        Ok(Self {
            space,
            size,
            step,
            direction,
            position,
            threshold: cfg.reward_threshold,
            m_size: cfg.m_size,
            rewards: VecDeque::with_capacity(cfg.m_size),
            rng: ChaCha8Rng::seed_from_u64(seed),
            advances: 0,
        })
    }

    /// Lower corner of the window, normalized.
    pub fn position(&self) -> &[f64] {
        &self.position
    }

    pub fn window_size(&self) -> &[f64] {
        &self.size
    }

    pub fn advances(&self) -> u64 {
        self.advances
    }
}

impl Teacher for Oracle {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn space(&self) -> &ParameterSpace {
        &self.space
    }

    fn propose(&mut self) -> ParameterVector {
        let unit: Vec<f64> = self
            .position
            .iter()
            .zip(&self.size)
            .map(|(p, s)| (p + self.rng.gen::<f64>() * s).min(1.0))
            .collect();
        self.space
            .denormalize(&unit)
            .expect("window lies inside [0, 1]")
    }

    fn observe(&mut self, _param: &ParameterVector, reward: f64) {
        if self.rewards.len() == self.m_size {
            self.rewards.pop_front();
        }
        self.rewards.push_back(reward);
        if self.rewards.len() < self.m_size {
            return;
        }
        let mean = self.rewards.iter().sum::<f64>() / self.m_size as f64;
        if mean > self.threshold {
            for i in 0..self.position.len() {
                let moved = self.position[i] + self.direction[i] * self.step[i];
                self.position[i] = moved.clamp(0.0, 1.0 - self.size[i]);
            }
            self.rewards.clear();
            self.advances += 1;
        }
    }

    fn last_source(&self) -> Option<ProposalSource> {
        Some(ProposalSource::Window)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stump_oracle() -> Oracle {
        let space = ParameterSpace::new(vec![0.0, 0.0], vec![3.0, 6.0]).unwrap();
        Oracle::new(space, OracleConfig::default(), 0).unwrap()
    }

    fn feed(o: &mut Oracle, reward: f64, n: usize) {
        for _ in 0..n {
            let p = o.propose();
            o.observe(&p, reward);
        }
    }

    #[test]
    fn advances_one_step_after_threshold() {
        let mut o = stump_oracle();
        feed(&mut o, 231.0, 49);
        assert_eq!(o.position(), &[0.0, 0.0]);
        feed(&mut o, 231.0, 1);
        for p in o.position() {
            assert!((p - 1.0 / 30.0).abs() < 1e-15);
        }
        assert_eq!(o.advances(), 1);
    }

    #[test]
    fn below_threshold_does_not_move() {
        let mut o = stump_oracle();
        feed(&mut o, 229.9, 500);
        assert_eq!(o.position(), &[0.0, 0.0]);
    }

    #[test]
    fn saturates_at_far_corner() {
        let mut o = stump_oracle();
        feed(&mut o, 1000.0, 50 * 40);
        let top = 1.0 - 1.0 / 6.0;
        for p in o.position() {
            assert!((p - top).abs() < 1e-12);
        }
        let before = o.position().to_vec();
        feed(&mut o, 1000.0, 200);
        assert_eq!(o.position(), before.as_slice());
    }

    #[test]
    fn proposals_stay_in_window() {
        let mut o = stump_oracle();
        for _ in 0..2000 {
            let p = o.propose();
            assert!(p[0] <= 3.0 / 6.0 + 1e-12 && p[1] <= 1.0 + 1e-12);
            o.observe(&p, 0.0);
        }
    }

    #[test]
    fn negative_direction_starts_high() {
        let space = ParameterSpace::unit(1).unwrap();
        let cfg = OracleConfig {
            direction: vec![-1.0],
            reward_threshold: 0.5,
            m_size: 2,
            ..OracleConfig::default()
        };
        let mut o = Oracle::new(space, cfg, 1).unwrap();
        assert!((o.position()[0] - 5.0 / 6.0).abs() < 1e-15);
        feed(&mut o, 1.0, 2);
        assert!((o.position()[0] - (5.0 / 6.0 - 1.0 / 30.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_config() {
        let space = ParameterSpace::unit(2).unwrap();
        let cfg = OracleConfig {
            step: vec![0.1],
            ..OracleConfig::default()
        };
        assert!(Oracle::new(space.clone(), cfg, 0).is_err());
        let cfg = OracleConfig {
            direction: vec![2.0, 1.0],
            ..OracleConfig::default()
        };
        assert!(Oracle::new(space, cfg, 0).is_err());
    }
}
