//! `run_id,episode,unlocked_pct,cumulative_reward` files.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::campaign::MedianPoint;
use crate::error::{BenchError, Result};
use crate::runner::MetricRow;

pub const HEADER: &str = "run_id,episode,unlocked_pct,cumulative_reward";

pub fn write_rows<'a, W: Write>(
    out: W,
    rows: impl IntoIterator<Item = &'a MetricRow>,
) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> csv::Result<Vec<MetricRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_csv<'a>(rows: impl IntoIterator<Item = &'a MetricRow>, path: &Path) -> Result<()> {
    let file = create(path)?;
    write_rows(file, rows).map_err(|source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_csv(path: &Path) -> Result<Vec<MetricRow>> {
    let file = File::open(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_rows(file).map_err(|source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// `episode,median_unlocked_pct` summary of a campaign.
pub fn emit_median_csv(points: &[MedianPoint], path: &Path) -> Result<()> {
    let wrap = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["episode", "median_unlocked_pct"])
        .map_err(wrap)?;
    for p in points {
        w.write_record([p.episode.to_string(), p.median.to_string()])
            .map_err(wrap)?;
    }
    w.flush().map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}
