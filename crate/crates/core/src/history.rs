use serde::{Deserialize, Serialize};

use crate::space::ParameterVector;
use crate::stats::KdTree;

/// One teacher-student interaction: the proposed parameter and the episodic
/// reward the student obtained on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub param: ParameterVector,
    pub reward: f64,
    pub episode: u64,
}

/// Append-only log of every interaction of a run, indexed for
/// nearest-parameter lookups.
#[derive(Debug, Clone)]
pub struct History {
    records: Vec<SampleRecord>,
    index: KdTree<usize>,
}

impl History {
    pub fn new(dims: usize) -> Self {
        Self {
            records: Vec::new(),
            index: KdTree::new(dims),
        }
    }

    /// Appends a record with the next episode index.
    pub fn push(&mut self, param: ParameterVector, reward: f64) -> &SampleRecord {
        let episode = self.records.len() as u64;
        let slot = self.records.len();
        self.index
            .insert(param.as_slice().to_vec(), slot)
            .expect("history parameters match the space dimension");
        self.records.push(SampleRecord {
            param,
            reward,
            episode,
        });
        &self.records[slot]
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&SampleRecord> {
        self.records.last()
    }

    /// Record whose parameter is closest (Euclidean, task units) to `query`.
    pub fn nearest(&self, query: &[f64]) -> Option<&SampleRecord> {
        self.index
            .nearest(query)
            .ok()
            .map(|n| &self.records[*n.payload])
    }
}
