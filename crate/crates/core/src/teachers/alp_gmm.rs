//! Absolute-learning-progress Gaussian mixture teacher.
//!
//! Every observation gets an ALP value: the absolute reward difference to the
//! nearest previously sampled parameter, looked up in a never-pruned k-d tree
//! over the whole history. A mixture is periodically refitted on the most
//! recent `(parameter, alp)` pairs and components are sampled in proportion
//! to their mean ALP.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::mixture::{GmmTeacherConfig, MixtureCore};
use crate::error::Result;
use crate::space::{ParameterSpace, ParameterVector};
use crate::stats::{GmmModel, KdTree};
use crate::teacher::{ProposalSource, Teacher};

/// `|r_new - r_old|` against the nearest point already in `index` (0 when
/// the index is empty), then inserts `(p_new, r_new)`.
pub fn compute_alp(p_new: &[f64], r_new: f64, index: &mut KdTree<f64>) -> f64 {
    let alp = match index.nearest(p_new) {
        Ok(n) => (r_new - *n.payload).abs(),
        Err(_) => 0.0,
    };
    index
        .insert(p_new.to_vec(), r_new)
        .expect("parameter dimension matches the index");
    alp
}

pub struct AlpGmm {
    core: MixtureCore,
    window: VecDeque<Vec<f64>>,
    knn: KdTree<f64>,
}

impl AlpGmm {
    pub fn new(space: ParameterSpace, cfg: GmmTeacherConfig, seed: u64) -> Result<Self> {
        let dims = space.dims();
        let capacity = cfg.fit_rate;
        Ok(Self {
            core: MixtureCore::new(space, cfg, ChaCha8Rng::seed_from_u64(seed))?,
            window: VecDeque::with_capacity(capacity),
            knn: KdTree::new(dims),
        })
    }

    /// `(normalized parameter, alp)` rows, oldest first.
    pub fn window(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.window.iter().map(Vec::as_slice)
    }

    pub fn model(&self) -> Option<&GmmModel> {
        self.core.model()
    }

    /// Mean-ALP utility of each component of the current model.
    pub fn utilities(&self) -> &[f64] {
        self.core.utilities()
    }

    pub fn knn_len(&self) -> usize {
        self.knn.len()
    }

    pub fn fits(&self) -> u64 {
        self.core.fits()
    }

    /// Scheduled refits that produced no model.
    pub fn failed_fits(&self) -> u64 {
        self.core.failed_fits()
    }

    pub fn episodes(&self) -> u64 {
        self.core.episodes()
    }

    #[cfg(test)]
    pub(crate) fn core_mut(&mut self) -> &mut MixtureCore {
        &mut self.core
    }
}

impl Teacher for AlpGmm {
    fn name(&self) -> &'static str {
        "alpgmm"
    }

    fn space(&self) -> &ParameterSpace {
        &self.core.space
    }

    fn propose(&mut self) -> ParameterVector {
        self.core.propose()
    }

    fn observe(&mut self, param: &ParameterVector, reward: f64) {
        let mut unit = self
            .core
            .space
            .normalize(param)
            .expect("observed parameter lies in the space");
        let alp = compute_alp(&unit, reward, &mut self.knn);
        unit.push(alp);
        if self.window.len() == self.core.cfg.fit_rate {
            self.window.pop_front();
        }
        self.window.push_back(unit);

        if self.core.tick() {
            let data: Vec<Vec<f64>> = self.window.iter().cloned().collect();
            let alp_axis = self.core.space.dims();
            self.core.refit(&data, |c| c.mean()[alp_axis]);
        }
    }

    fn last_source(&self) -> Option<ProposalSource> {
        self.core.last_source()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::GaussianComponent;

    #[test]
    fn alp_examples() {
        let mut index = KdTree::new(2);
        assert_eq!(compute_alp(&[0.5, 0.5], 30.0, &mut index), 0.0);
        assert_eq!(compute_alp(&[0.5, 0.6], 50.0, &mut index), 20.0);
        assert_eq!(compute_alp(&[0.5, 0.6], 50.0, &mut index), 0.0);
        let mut index = KdTree::new(1);
        compute_alp(&[0.2], 100.0, &mut index);
        assert_eq!(compute_alp(&[0.21], 0.0, &mut index), 100.0);
        assert_eq!(index.len(), 2);
    }

    fn teacher() -> AlpGmm {
        AlpGmm::new(
            ParameterSpace::unit(2).unwrap(),
            GmmTeacherConfig::default(),
            3,
        )
        .unwrap()
    }

    fn feed(t: &mut AlpGmm, n: usize) {
        for i in 0..n {
            let p = t.propose();
            let reward = if p[0] < 0.3 { (i % 17) as f64 } else { 0.0 };
            t.observe(&p, reward);
        }
    }

    #[test]
    fn fit_schedule() {
        let mut t = teacher();
        feed(&mut t, 249);
        assert!(t.model().is_none());
        assert_eq!(t.last_source(), Some(ProposalSource::Bootstrap));
        feed(&mut t, 1);
        assert!(t.model().is_some());
        assert_eq!(t.window().len(), 250);
        assert_eq!(t.fits(), 1);
        let first = t.model().cloned();
        feed(&mut t, 249);
        assert_eq!(t.model().cloned(), first);
        feed(&mut t, 1);
        assert_eq!(t.fits(), 2);
        assert_eq!(t.knn_len(), 500);
    }

    #[test]
    fn window_keeps_latest_observations() {
        let mut t = teacher();
        let space = ParameterSpace::unit(2).unwrap();
        for i in 0..300 {
            let _ = t.propose();
            let p = space.vector(vec![i as f64 / 300.0, 0.5]).unwrap();
            t.observe(&p, 0.0);
        }
        let firsts: Vec<f64> = t.window().map(|row| row[0]).collect();
        assert_eq!(firsts.len(), 250);
        assert_eq!(firsts[0], 50.0 / 300.0);
        assert_eq!(*firsts.last().unwrap(), 299.0 / 300.0);
    }

    #[test]
    fn bootstrap_is_uniform() {
        // 10 bins per dimension, chi-square with 99 degrees of freedom;
        // 99% quantile is about 134.6.
        let mut t = AlpGmm::new(
            ParameterSpace::unit(2).unwrap(),
            GmmTeacherConfig {
                fit_rate: 20_000,
                ..GmmTeacherConfig::default()
            },
            8,
        )
        .unwrap();
        let mut bins = vec![0usize; 100];
        let n = 10_000;
        for _ in 0..n {
            let p = t.propose();
            assert_eq!(t.last_source(), Some(ProposalSource::Bootstrap));
            let bx = ((p[0] * 10.0) as usize).min(9);
            let by = ((p[1] * 10.0) as usize).min(9);
            bins[bx * 10 + by] += 1;
            t.observe(&p, 0.0);
        }
        let expected = n as f64 / 100.0;
        let chi2: f64 = bins
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 134.6, "chi2 = {chi2}");
    }

    #[test]
    fn component_choice_follows_mean_alp() {
        let mut t = teacher();
        feed(&mut t, 250);
        let make = |alp: f64| {
            GaussianComponent::new(
                0.5,
                vec![0.5, 0.5, alp],
                vec![1e-3, 0.0, 0.0, 0.0, 1e-3, 0.0, 0.0, 0.0, 1e-3],
            )
            .unwrap()
        };
        let core = t.core_mut();
        core.set_components_for_test(vec![make(9.0), make(1.0)], |c| c.mean()[2]);
        let mut first = 0;
        for _ in 0..10_000 {
            if core.choose_component() == Some(0) {
                first += 1;
            }
        }
        let freq = first as f64 / 10_000.0;
        assert!((freq - 0.9).abs() < 0.02, "{freq}");

        core.set_components_for_test(vec![make(-1.0), make(0.0)], |c| c.mean()[2]);
        let mut first = 0;
        for _ in 0..10_000 {
            if core.choose_component() == Some(0) {
                first += 1;
            }
        }
        assert!((first as f64 / 10_000.0 - 0.5).abs() < 0.02);
    }
}
