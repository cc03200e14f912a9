//! Deterministic hypercube student.
//!
//! The relevant dimensions of `[0, 1]^n` are cut into `cubes_per_dim` cells
//! each. Only the corner cell `(0, ..., 0)` starts unlocked. Sampling an
//! unlocked cell increments its counter and pays the new count (capped at
//! `reward_cap`); the sample that brings a counter to `unlock_count` unlocks
//! every face-adjacent cell. Locked cells pay nothing and record nothing.
//! Irrelevant dimensions are accepted and ignored.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::space::ParameterSpace;

/// Upper bound on the number of cells, to keep the dense state bounded.
const MAX_CELLS: usize = 1 << 27;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToySpaceConfig {
    pub relevant_dims: usize,
    pub irrelevant_dims: usize,
    pub cubes_per_dim: usize,
    pub unlock_count: u32,
    pub reward_cap: u32,
}

impl Default for ToySpaceConfig {
    fn default() -> Self {
        Self {
            relevant_dims: 2,
            irrelevant_dims: 0,
            cubes_per_dim: 10,
            unlock_count: 75,
            reward_cap: 100,
        }
    }
}

impl ToySpaceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.relevant_dims == 0 || self.cubes_per_dim < 2 || self.unlock_count == 0 {
            return Err(CoreError::InvalidConfig(
                "toy space needs relevant_dims >= 1, cubes_per_dim >= 2, unlock_count >= 1".into(),
            ));
        }
        if self.reward_cap == 0 {
            return Err(CoreError::InvalidConfig(
                "reward_cap must be positive".into(),
            ));
        }
        match self.total_cubes() {
            Some(n) if n <= MAX_CELLS => Ok(()),
            _ => Err(CoreError::InvalidConfig(format!(
                "{}^{} cells exceed the supported maximum of {MAX_CELLS}",
                self.cubes_per_dim, self.relevant_dims
            ))),
        }
    }

    pub fn total_dims(&self) -> usize {
        self.relevant_dims + self.irrelevant_dims
    }

    pub fn total_cubes(&self) -> Option<usize> {
        (0..self.relevant_dims).try_fold(1usize, |acc, _| acc.checked_mul(self.cubes_per_dim))
    }

    /// `[0, 1]^(relevant + irrelevant)`.
    pub fn space(&self) -> ParameterSpace {
        ParameterSpace::unit(self.total_dims()).expect("at least one dimension")
    }

    /// Cell of `p` over the relevant dimensions; the upper face `1.0` maps
    /// into the last cell.
    pub fn cube_index(&self, p: &[f64]) -> Result<Vec<usize>> {
        if p.len() != self.total_dims() {
            return Err(CoreError::DimensionMismatch {
                expected: self.total_dims(),
                got: p.len(),
            });
        }
        if let Some((index, &value)) = p
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(CoreError::OutOfBounds {
                index,
                value,
                lower: 0.0,
                upper: 1.0,
            });
        }
        let n = self.cubes_per_dim;
        Ok(p[..self.relevant_dims]
            .iter()
            .map(|v| ((v * n as f64).floor() as usize).min(n - 1))
            .collect())
    }

    fn linear(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &i| acc * self.cubes_per_dim + i)
    }

    fn unlinear(&self, mut linear: usize) -> Vec<usize> {
        let mut out = vec![0; self.relevant_dims];
        for slot in out.iter_mut().rev() {
            *slot = linear % self.cubes_per_dim;
            linear /= self.cubes_per_dim;
        }
        out
    }

    /// Center of a cell, with irrelevant coordinates set to `filler`.
    pub fn cube_center(&self, index: &[usize], filler: f64) -> Vec<f64> {
        let n = self.cubes_per_dim as f64;
        index
            .iter()
            .map(|&i| (i as f64 + 0.5) / n)
            .chain(std::iter::repeat_n(filler, self.irrelevant_dims))
            .collect()
    }

    /// Cells in breadth-first order from the starting corner; every cell
    /// after the first has a face neighbor earlier in the list.
    pub fn flood_order(&self) -> Vec<Vec<usize>> {
        let total = self.total_cubes().expect("validated config");
        let mut seen = vec![false; total];
        let mut order = Vec::with_capacity(total);
        let mut queue = VecDeque::from([vec![0; self.relevant_dims]]);
        seen[0] = true;
        while let Some(cell) = queue.pop_front() {
            for next in neighbors(&cell, self.cubes_per_dim) {
                let id = self.linear(&next);
                if !seen[id] {
                    seen[id] = true;
                    queue.push_back(next);
                }
            }
            order.push(cell);
        }
        order
    }
}

fn neighbors(cell: &[usize], n: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..cell.len()).flat_map(move |axis| {
        let mut out = Vec::with_capacity(2);
        if cell[axis] > 0 {
            let mut c = cell.to_vec();
            c[axis] -= 1;
            out.push(c);
        }
        if cell[axis] + 1 < n {
            let mut c = cell.to_vec();
            c[axis] += 1;
            out.push(c);
        }
        out
    })
}

/// Per-cell counters and lock flags of one run.
#[derive(Debug, Clone)]
pub struct ToySpace {
    cfg: ToySpaceConfig,
    counters: Vec<u32>,
    unlocked: Vec<bool>,
    n_unlocked: usize,
}

impl ToySpace {
    pub fn new(cfg: ToySpaceConfig) -> Result<Self> {
        cfg.validate()?;
        let total = cfg.total_cubes().expect("validated");
        let mut unlocked = vec![false; total];
        unlocked[0] = true;
        Ok(Self {
            cfg,
            counters: vec![0; total],
            unlocked,
            n_unlocked: 1,
        })
    }

    pub fn config(&self) -> &ToySpaceConfig {
        &self.cfg
    }

    pub fn space(&self) -> ParameterSpace {
        self.cfg.space()
    }

    pub fn cube_index(&self, p: &[f64]) -> Result<Vec<usize>> {
        self.cfg.cube_index(p)
    }

    pub fn is_unlocked(&self, index: &[usize]) -> bool {
        self.unlocked[self.cfg.linear(index)]
    }

    pub fn count(&self, index: &[usize]) -> u32 {
        self.counters[self.cfg.linear(index)]
    }

    pub fn unlocked_count(&self) -> usize {
        self.n_unlocked
    }

    /// Runs one episode at `p` and returns its reward.
    pub fn episode(&mut self, p: &[f64]) -> Result<f64> {
        let cell = self.cfg.cube_index(p)?;
        let id = self.cfg.linear(&cell);
        if !self.unlocked[id] {
            return Ok(0.0);
        }
        let count = self.counters[id].saturating_add(1);
        self.counters[id] = count;
        if count == self.cfg.unlock_count {
            for next in neighbors(&cell, self.cfg.cubes_per_dim) {
                let nid = self.cfg.linear(&next);
                if !self.unlocked[nid] {
                    self.unlocked[nid] = true;
                    self.n_unlocked += 1;
                }
            }
        }
        Ok(count.min(self.cfg.reward_cap) as f64)
    }

    /// Share of unlocked cells, in `[0, 1]`.
    pub fn unlocked_fraction(&self) -> f64 {
        self.n_unlocked as f64 / self.counters.len() as f64
    }

    /// Unlocks every cell.
    pub fn unlock_all(&mut self) {
        self.unlocked.iter_mut().for_each(|u| *u = true);
        self.n_unlocked = self.unlocked.len();
    }

    pub fn unlocked_cells(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.unlocked
            .iter()
            .enumerate()
            .filter(|(_, u)| **u)
            .map(|(i, _)| self.cfg.unlinear(i))
    }
}
