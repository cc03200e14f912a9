//! Region-splitting teacher.
//!
//! The normalized space is recursively cut into hyperbox regions. Each leaf
//! keeps the records that fell into it and an absolute learning-progress
//! score; leaves are sampled in proportion to that score. A full leaf tries
//! to split along a random dimension and threshold that best separates
//! learning progress; if no admissible split exists it forgets its oldest
//! quarter instead.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::proportional_choice;
use crate::error::{CoreError, Result};
use crate::space::{clip_unit, uniform_unit, ParameterSpace, ParameterVector};
use crate::teacher::{ProposalSource, Teacher};

#[derive(Debug, Clone, PartialEq)]
pub struct RiacConfig {
    /// Leaf capacity that triggers a split attempt.
    pub max_s: usize,
    pub n_candidates: usize,
    /// Minimum records in each child of a split.
    pub min_s: usize,
    /// Minimum extent of a region along every dimension, as a fraction of
    /// that dimension's range.
    pub min_d: f64,
    /// Standard deviation of the mutation noise, in normalized units.
    pub mutation_sigma: f64,
    pub p_random: f64,
    pub p_region: f64,
    pub p_mutate: f64,
}

impl Default for RiacConfig {
    fn default() -> Self {
        Self {
            max_s: 200,
            n_candidates: 50,
            min_s: 20,
            min_d: 1.0 / 6.0,
            mutation_sigma: 0.1,
            p_random: 0.2,
            p_region: 0.7,
            p_mutate: 0.1,
        }
    }
}

impl RiacConfig {
    pub fn validate(&self) -> Result<()> {
        let mix = [self.p_random, self.p_region, self.p_mutate];
        if mix.iter().any(|p| !(0.0..=1.0).contains(p))
            || (mix.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(CoreError::InvalidConfig(format!(
                "sampling mixture {mix:?} must be probabilities summing to 1"
            )));
        }
        if self.max_s < 2 || self.n_candidates == 0 {
            return Err(CoreError::InvalidConfig(
                "max_s must be at least 2 and n_candidates positive".into(),
            ));
        }
        if 2 * self.min_s > self.max_s {
            return Err(CoreError::InvalidConfig(format!(
                "min_s {} leaves no admissible split of {} records",
                self.min_s, self.max_s
            )));
        }
        if !(self.min_d >= 0.0 && self.min_d < 1.0) || !(self.mutation_sigma >= 0.0) {
            return Err(CoreError::InvalidConfig(
                "min_d must lie in [0, 1) and mutation_sigma be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// A record as stored in a region: normalized parameter and reward.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionRecord {
    pub point: Vec<f64>,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Insertion order, oldest first. Empty once the region is split.
    pub records: VecDeque<RegionRecord>,
    pub alp: f64,
    pub children: Option<(usize, usize)>,
    pub split: Option<Split>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub dim: usize,
    pub threshold: f64,
    pub score: f64,
}

impl Region {
    fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self {
            lower,
            upper,
            records: VecDeque::new(),
            alp: 0.0,
            children: None,
            split: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(p, (lo, hi))| lo <= p && p <= hi)
    }
}

/// Absolute difference between the mean reward of the newer half and the
/// older half of `rewards` (insertion order; an odd middle element belongs
/// to the older half). Zero for fewer than two rewards.
pub fn region_alp<I>(rewards: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: ExactSizeIterator,
{
    let rewards = rewards.into_iter();
    let n = rewards.len();
    if n < 2 {
        return 0.0;
    }
    let older_len = n.div_ceil(2);
    let (mut older, mut newer) = (0.0, 0.0);
    for (i, r) in rewards.enumerate() {
        if i < older_len {
            older += r;
        } else {
            newer += r;
        }
    }
    (newer / (n - older_len) as f64 - older / older_len as f64).abs()
}

/// `card(c1) * card(c2) * |alp(c1) - alp(c2)|`.
pub fn split_score(card_left: usize, card_right: usize, alp_left: f64, alp_right: f64) -> f64 {
    card_left as f64 * card_right as f64 * (alp_left - alp_right).abs()
}

/// Draws `cfg.n_candidates` random `(dimension, threshold)` cuts of `region`
/// and returns the admissible one with the highest score, if any.
///
/// A cut is admissible when both children keep at least `min_s` records and
/// an extent of at least `min_d` along the cut dimension. Points with
/// `x[dim] < threshold` go left.
pub fn attempt_split<R: Rng + ?Sized>(
    region: &Region,
    cfg: &RiacConfig,
    rng: &mut R,
) -> Option<Split> {
    let dims = region.lower.len();
    let mut best: Option<Split> = None;
    for _ in 0..cfg.n_candidates {
        let dim = rng.gen_range(0..dims);
        let (lo, hi) = (region.lower[dim], region.upper[dim]);
        let threshold = lo + rng.gen::<f64>() * (hi - lo);
        if threshold - lo < cfg.min_d || hi - threshold < cfg.min_d {
            continue;
        }
        let left = region
            .records
            .iter()
            .filter(|r| r.point[dim] < threshold)
            .map(|r| r.reward);
        let card_left = left.clone().count();
        let card_right = region.records.len() - card_left;
        if card_left < cfg.min_s || card_right < cfg.min_s {
            continue;
        }
        let alp_left = region_alp(left.collect::<Vec<_>>());
        let alp_right = region_alp(
            region
                .records
                .iter()
                .filter(|r| r.point[dim] >= threshold)
                .map(|r| r.reward)
                .collect::<Vec<_>>(),
        );
        let score = split_score(card_left, card_right, alp_left, alp_right);
        if best.is_none_or(|b| score > b.score) {
            best = Some(Split {
                dim,
                threshold,
                score,
            });
        }
    }
    best
}

/// Arena of regions; index 0 is the root covering `[0, 1]^d`.
#[derive(Debug, Clone)]
pub struct RegionTree {
    regions: Vec<Region>,
    leaves: Vec<usize>,
    leaf_alps: Vec<f64>,
}

impl RegionTree {
    pub fn new(dims: usize) -> Self {
        Self {
            regions: vec![Region::new(vec![0.0; dims], vec![1.0; dims])],
            leaves: vec![0],
            leaf_alps: vec![0.0],
        }
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn root(&self) -> &Region {
        &self.regions[0]
    }

    /// Leaf ids in creation order.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn leaf_alps(&self) -> &[f64] {
        &self.leaf_alps
    }

    pub fn leaf_of(&self, point: &[f64]) -> usize {
        let mut id = 0;
        while let (Some((l, r)), Some(s)) = (self.regions[id].children, self.regions[id].split) {
            id = if point[s.dim] < s.threshold { l } else { r };
        }
        id
    }

    fn set_leaf_alp(&mut self, id: usize) {
        let alp = region_alp(self.regions[id].records.iter().map(|r| r.reward));
        self.regions[id].alp = alp;
        if let Some(pos) = self.leaves.iter().position(|&l| l == id) {
            self.leaf_alps[pos] = alp;
        }
    }

    /// Routes a record to its leaf, refreshes the leaf score, and splits or
    /// flushes the leaf once it holds `max_s` records.
    pub fn observe<R: Rng + ?Sized>(
        &mut self,
        record: RegionRecord,
        cfg: &RiacConfig,
        rng: &mut R,
    ) -> Option<Split> {
        let id = self.leaf_of(&record.point);
        debug_assert!(self.regions[id].contains(&record.point));
        self.regions[id].records.push_back(record);
        self.set_leaf_alp(id);
        if self.regions[id].records.len() < cfg.max_s {
            return None;
        }
        match attempt_split(&self.regions[id], cfg, rng) {
            Some(split) => {
                self.apply_split(id, split);
                Some(split)
            }
            None => {
                let drop = self.regions[id].records.len() / 4;
                self.regions[id].records.drain(..drop);
                self.set_leaf_alp(id);
                None
            }
        }
    }

    fn apply_split(&mut self, id: usize, split: Split) {
        let (l, r) = (self.regions.len(), self.regions.len() + 1);
        let parent = &mut self.regions[id];
        let records = std::mem::take(&mut parent.records);
        let mut left = Region::new(parent.lower.clone(), parent.upper.clone());
        let mut right = Region::new(parent.lower.clone(), parent.upper.clone());
        left.upper[split.dim] = split.threshold;
        right.lower[split.dim] = split.threshold;
        for r in records {
            if r.point[split.dim] < split.threshold {
                left.records.push_back(r);
            } else {
                right.records.push_back(r);
            }
        }
        parent.children = Some((l, r));
        parent.split = Some(split);
        self.regions.push(left);
        self.regions.push(right);

        let pos = self
            .leaves
            .iter()
            .position(|&leaf| leaf == id)
            .expect("split region was a leaf");
        self.leaves.remove(pos);
        self.leaf_alps.remove(pos);
        for child in [l, r] {
            self.leaves.push(child);
            self.leaf_alps.push(0.0);
            self.set_leaf_alp(child);
        }
    }
}

pub struct Riac {
    space: ParameterSpace,
    cfg: RiacConfig,
    rng: ChaCha8Rng,
    tree: RegionTree,
    noise: Normal<f64>,
    last_source: Option<ProposalSource>,
}

impl Riac {
    pub fn new(space: ParameterSpace, cfg: RiacConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let noise = Normal::new(0.0, cfg.mutation_sigma)
            .map_err(|e| CoreError::InvalidConfig(e.to_string()))?;
        Ok(Self {
            tree: RegionTree::new(space.dims()),
            space,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            noise,
            last_source: None,
        })
    }

    pub fn tree(&self) -> &RegionTree {
        &self.tree
    }

    pub fn config(&self) -> &RiacConfig {
        &self.cfg
    }

    fn uniform_in(&mut self, id: usize) -> Vec<f64> {
        let region = &self.tree.regions[id];
        region
            .lower
            .iter()
            .zip(&region.upper)
            .map(|(lo, hi)| lo + self.rng.gen::<f64>() * (hi - lo))
            .collect()
    }

    fn pick_leaf(&mut self) -> usize {
        let pos = proportional_choice(&self.tree.leaf_alps, &mut self.rng);
        self.tree.leaves[pos]
    }
}

impl Teacher for Riac {
    fn name(&self) -> &'static str {
        "riac"
    }

    fn space(&self) -> &ParameterSpace {
        &self.space
    }

    fn propose(&mut self) -> ParameterVector {
        let u = self.rng.gen::<f64>();
        let (unit, source) = if u < self.cfg.p_random {
            (
                uniform_unit(self.space.dims(), &mut self.rng),
                ProposalSource::Uniform,
            )
        } else if u < self.cfg.p_random + self.cfg.p_region {
            let leaf = self.pick_leaf();
            (self.uniform_in(leaf), ProposalSource::Region)
        } else {
            let leaf = self.pick_leaf();
            let worst = self.tree.regions[leaf]
                .records
                .iter()
                .fold(None::<&RegionRecord>, |acc, r| match acc {
                    Some(a) if a.reward <= r.reward => Some(a),
                    _ => Some(r),
                })
                .map(|r| r.point.clone());
            let point = match worst {
                Some(mut p) => {
                    for v in p.iter_mut() {
                        *v += self.noise.sample(&mut self.rng);
                    }
                    clip_unit(&mut p);
                    p
                }
                None => self.uniform_in(leaf),
            };
            (point, ProposalSource::Mutation)
        };
        self.last_source = Some(source);
        self.space
            .denormalize(&unit)
            .expect("unit draws are clipped to [0, 1]")
    }

    fn observe(&mut self, param: &ParameterVector, reward: f64) {
        let point = self
            .space
            .normalize(param)
            .expect("observed parameter lies in the space");
        self.tree
            .observe(RegionRecord { point, reward }, &self.cfg, &mut self.rng);
    }

    fn last_source(&self) -> Option<ProposalSource> {
        self.last_source
    }
}
