//! Exact Euclidean nearest-neighbor index with incremental insertion.
//!
//! Points go into a small linear buffer; whenever it fills, the buffer and
//! every tree smaller than the result are merged into one balanced,
//! bucketed k-d tree (the logarithmic method). At any time the index holds
//! at most one tree per power-of-two size class, so a query visits
//! O(log n) balanced trees and every insertion costs amortized O(log² n).
//! Leaves store their coordinates contiguously, which keeps the search
//! cache-friendly even in high dimensions where pruning degrades toward a
//! linear scan.

use std::collections::HashMap;

use super::StatsError;

/// Points held in the unsorted insertion buffer before a rebuild.
const BUFFER: usize = 64;
/// Maximum points in a tree leaf.
const LEAF: usize = 16;

#[derive(Debug, Clone)]
struct Node {
    /// Range of the tree's point arrays covered by this subtree.
    start: usize,
    end: usize,
    axis: usize,
    split: f64,
    /// Children, or `None` for a leaf.
    children: Option<(usize, usize)>,
}

/// Balanced k-d tree over a fixed point set, coordinates reordered so every
/// subtree is a contiguous block.
#[derive(Debug, Clone)]
struct StaticTree {
    coords: Vec<f64>,
    /// Insertion index of each stored point.
    ids: Vec<usize>,
    nodes: Vec<Node>,
}

impl StaticTree {
    fn build(dim: usize, all: &[f64], mut ids: Vec<usize>) -> Self {
        let mut nodes = Vec::with_capacity(2 * ids.len() / LEAF + 1);
        let len = ids.len();
        Self::build_node(dim, all, &mut ids, 0, len, &mut nodes);
        let mut coords = Vec::with_capacity(ids.len() * dim);
        for &i in &ids {
            coords.extend_from_slice(&all[i * dim..(i + 1) * dim]);
        }
        Self { coords, ids, nodes }
    }

    fn build_node(
        dim: usize,
        all: &[f64],
        ids: &mut [usize],
        start: usize,
        end: usize,
        nodes: &mut Vec<Node>,
    ) -> usize {
        let id = nodes.len();
        nodes.push(Node {
            start,
            end,
            axis: 0,
            split: 0.0,
            children: None,
        });
        if end - start <= LEAF {
            return id;
        }
        let coord = |i: usize, axis: usize| all[i * dim + axis];
        // split the widest axis at its median
        let block = &mut ids[start..end];
        let axis = (0..dim)
            .map(|a| {
                let (lo, hi) = block
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                        (lo.min(coord(i, a)), hi.max(coord(i, a)))
                    });
                (a, hi - lo)
            })
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
            .0;
        let mid = block.len() / 2;
        block.select_nth_unstable_by(mid, |&a, &b| coord(a, axis).total_cmp(&coord(b, axis)));
        let split = coord(block[mid], axis);
        let left = Self::build_node(dim, all, ids, start, start + mid, nodes);
        let right = Self::build_node(dim, all, ids, start + mid, end, nodes);
        let node = &mut nodes[id];
        node.axis = axis;
        node.split = split;
        node.children = Some((left, right));
        id
    }

    /// Updates `best` (squared distance, insertion index) with any closer
    /// point, preferring lower insertion indices on exact ties.
    fn search(&self, dim: usize, query: &[f64], offsets: &mut [f64], best: &mut (f64, usize)) {
        self.visit(0, dim, query, offsets, 0.0, best);
    }

    fn visit(
        &self,
        id: usize,
        dim: usize,
        query: &[f64],
        offsets: &mut [f64],
        bound: f64,
        best: &mut (f64, usize),
    ) {
        // Strict, with slack for rounding in the incremental bound: an
        // equally distant point inserted earlier may still be in the cell.
        if bound * (1.0 - 1e-12) > best.0 {
            return;
        }
        let node = &self.nodes[id];
        match node.children {
            None => {
                for slot in node.start..node.end {
                    let p = &self.coords[slot * dim..(slot + 1) * dim];
                    consider(p, self.ids[slot], query, best);
                }
            }
            Some((left, right)) => {
                // left holds values <= split, right values >= split
                let delta = query[node.axis] - node.split;
                let (near, far) = if delta < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.visit(near, dim, query, offsets, bound, best);
                let old = offsets[node.axis];
                offsets[node.axis] = delta;
                let far_bound = bound - old * old + delta * delta;
                self.visit(far, dim, query, offsets, far_bound, best);
                offsets[node.axis] = old;
            }
        }
    }
}

/// Squared distance, abandoned once it exceeds `limit` (the returned value
/// is then some number above `limit`).
fn sq_dist_within(a: &[f64], b: &[f64], limit: f64) -> f64 {
    let mut acc = 0.0;
    for (chunk_a, chunk_b) in a.chunks(4).zip(b.chunks(4)) {
        for (x, y) in chunk_a.iter().zip(chunk_b) {
            acc += (x - y) * (x - y);
        }
        if acc > limit {
            return acc;
        }
    }
    acc
}

fn consider(p: &[f64], index: usize, query: &[f64], best: &mut (f64, usize)) {
    let d = sq_dist_within(p, query, best.0);
    if d < best.0 || (d == best.0 && index < best.1) {
        *best = (d, index);
    }
}

/// Exact nearest-neighbor index over points carrying a payload.
///
/// Ties in distance resolve to the earliest inserted point, so a query always
/// agrees with a linear scan that keeps the first minimum. Exact duplicates of
/// an already indexed point are stored but not searched: the earlier copy
/// always wins the tie.
#[derive(Debug, Clone)]
pub struct KdTree<P> {
    dim: usize,
    /// Row-major coordinates of every inserted point.
    coords: Vec<f64>,
    payloads: Vec<P>,
    /// Searchable points not yet in a tree.
    buffer: Vec<usize>,
    /// `levels[i]` holds `BUFFER * 2^i` points when occupied.
    levels: Vec<Option<StaticTree>>,
    seen: HashMap<Vec<u64>, usize>,
}

/// Result of a nearest-neighbor query.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor<'a, P> {
    /// Insertion index of the point.
    pub index: usize,
    pub point: &'a [f64],
    pub payload: &'a P,
    pub distance: f64,
}

fn key(point: &[f64]) -> Vec<u64> {
    // `+ 0.0` folds -0.0 into 0.0
    point.iter().map(|v| (v + 0.0).to_bits()).collect()
}

impl<P> KdTree<P> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
            payloads: Vec::new(),
            buffer: Vec::with_capacity(BUFFER),
            levels: Vec::new(),
            seen: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of inserted points, duplicates included.
    pub fn len(&self) -> usize {
        self.payloads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payloads.is_empty()
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.coords[index * self.dim..(index + 1) * self.dim]
    }

    pub fn payload(&self, index: usize) -> &P {
        &self.payloads[index]
    }

    pub fn insert(&mut self, point: Vec<f64>, payload: P) -> Result<usize, StatsError> {
        if point.len() != self.dim {
            return Err(StatsError::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::InvalidInput("non-finite point".into()));
        }
        let index = self.len();
        let fresh = match self.seen.entry(key(&point)) {
            std::collections::hash_map::Entry::Occupied(_) => false,
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(index);
                true
            }
        };
        self.coords.extend_from_slice(&point);
        self.payloads.push(payload);
        if fresh {
            self.buffer.push(index);
            if self.buffer.len() == BUFFER {
                self.flush();
            }
        }
        Ok(index)
    }

    /// Merges the buffer with the smallest occupied levels into one tree.
    fn flush(&mut self) {
        let mut ids = std::mem::take(&mut self.buffer);
        for level in 0.. {
            if level == self.levels.len() {
                self.levels.push(None);
            }
            match self.levels[level].take() {
                Some(tree) => ids.extend(tree.ids),
                None => {
                    self.levels[level] = Some(StaticTree::build(self.dim, &self.coords, ids));
                    break;
                }
            }
        }
        self.buffer = Vec::with_capacity(BUFFER);
    }

    /// Closest inserted point to `query`.
    pub fn nearest(&self, query: &[f64]) -> Result<Neighbor<'_, P>, StatsError> {
        if self.is_empty() {
            return Err(StatsError::EmptyTree);
        }
        if query.len() != self.dim {
            return Err(StatsError::DimensionMismatch {
                expected: self.dim,
                got: query.len(),
            });
        }
        let mut best = (f64::INFINITY, usize::MAX);
        // Recent points first: they tend to be close and tighten the bound.
        for &i in self.buffer.iter().rev() {
            consider(self.point(i), i, query, &mut best);
        }
        let mut offsets = vec![0.0; self.dim];
        for tree in self.levels.iter().flatten() {
            tree.search(self.dim, query, &mut offsets, &mut best);
        }
        let index = best.1;
        Ok(Neighbor {
            index,
            point: self.point(index),
            payload: &self.payloads[index],
            distance: best.0.sqrt(),
        })
    }
}

/// Free-function form of [`KdTree::nearest`].
pub fn nearest_neighbor<'a, P>(
    tree: &'a KdTree<P>,
    query: &[f64],
) -> Result<Neighbor<'a, P>, StatsError> {
    tree.nearest(query)
}
