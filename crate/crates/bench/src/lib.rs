//! Benchmark campaigns for curriculum teachers on the hypercube toy space,
//! plus a line-protocol service that exposes any teacher to an external
//! student.
//!
//! A campaign runs `repeats` independently seeded runs of one teacher and
//! reports the median unlocked share of the toy space at regular snapshots.

pub mod bridge;
pub mod campaign;
pub mod config;
pub mod csv_out;
pub mod error;
pub mod presets;
pub mod runner;

pub use campaign::{median, run_campaign, CampaignResult, MedianPoint};
pub use config::{ExperimentConfig, ExperimentFile};
pub use csv_out::{emit_csv, parse_csv};
pub use error::{BenchError, Result};
pub use runner::{run_single, MetricRow};
