//! Checkpointed measurement runs.
//!
//! An instance is preprocessed once, then contracted exhaustively per star
//! mode while recording every contraction. For a checkpoint `p` the first
//! `floor(p * N / 100)` of the `N` recorded contractions are replayed on a
//! fresh copy of the preprocessed graph and every finisher is run on it.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finish::Finisher;
use crate::graph::{Instance, WorkingGraph};
use crate::preprocess::{preprocessing, ReductionReport};
use crate::star::{contract_stars, replay, ContractConfig, StarMode};
use crate::WorkCounter;

/// Star sizes at or above this share one histogram bucket.
pub const LARGE_STAR: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub modes: Vec<StarMode>,
    pub finishers: Vec<Finisher>,
    /// Percentages in `0..=100`.
    pub checkpoints: Vec<u32>,
    /// Best known weight; the run's minimum when absent.
    pub reference: Option<u64>,
    /// Record wall-clock milliseconds. Off by default so that output is
    /// reproducible byte for byte.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            modes: vec![StarMode::Basic, StarMode::Improved],
            finishers: Finisher::ALL.to_vec(),
            checkpoints: (0..=10).map(|i| i * 10).collect(),
            reference: None,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub instance: String,
    pub mode: StarMode,
    pub checkpoint: u32,
    pub finisher: Finisher,
    pub weight: u64,
    /// `100 * weight / reference`, rounded to four decimals.
    pub quality: f64,
    /// Star search work up to this checkpoint.
    pub visited: u64,
    pub ratios: u64,
    pub elapsed_ms: u64,
}

/// Contracted star counts per mode and size bucket.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StarSizeHistogram {
    counts: BTreeMap<(StarMode, usize), u64>,
}

impl StarSizeHistogram {
    pub fn bucket(size: usize) -> usize {
        size.min(LARGE_STAR)
    }

    pub fn add(&mut self, mode: StarMode, size: usize) {
        *self.counts.entry((mode, Self::bucket(size))).or_default() += 1;
    }

    pub fn count(&self, mode: StarMode, size: usize) -> u64 {
        self.counts
            .get(&(mode, Self::bucket(size)))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self, mode: StarMode) -> u64 {
        self.counts
            .iter()
            .filter(|((m, _), _)| *m == mode)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn merge(&mut self, other: &StarSizeHistogram) {
        for (&key, &c) in &other.counts {
            *self.counts.entry(key).or_default() += c;
        }
    }

    /// `mode,size,count` with sizes `2..=9` and `10+`, zeros included.
    pub fn write_csv(&self, modes: &[StarMode], out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mode", "size", "count"])
            .map_err(io_error)?;
        for &mode in modes {
            for size in 2..=LARGE_STAR {
                let label = if size == LARGE_STAR {
                    format!("{LARGE_STAR}+")
                } else {
                    size.to_string()
                };
                w.write_record([mode.name(), &label, &self.count(mode, size).to_string()])
                    .map_err(io_error)?;
            }
        }
        w.flush().map_err(|e| io_error(e.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<CheckpointRecord>,
    pub histogram: StarSizeHistogram,
    pub reduction: ReductionReport,
    /// Contractions recorded per mode.
    pub contractions: BTreeMap<StarMode, usize>,
}

fn io_error(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

fn elapsed_ms(start: Instant, timing: bool) -> u64 {
    if timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}

pub fn quality(weight: u64, reference: u64) -> f64 {
    if reference == 0 {
        if weight == 0 {
            100.0
        } else {
            f64::INFINITY
        }
    } else {
        100.0 * weight as f64 / reference as f64
    }
}

/// Runs the checkpoint protocol on one instance.
pub fn run_experiment(
    id: &str,
    inst: &Instance,
    config: &ExperimentConfig,
) -> Result<ExperimentOutput> {
    for &p in &config.checkpoints {
        if p > 100 {
            return Err(Error::InvalidArgument(format!(
                "checkpoint {p} is above 100"
            )));
        }
    }
    let mut base = WorkingGraph::from_instance(inst);
    let reduction = preprocessing(&mut base);
    let mut records = Vec::new();
    let mut histogram = StarSizeHistogram::default();
    let mut contractions = BTreeMap::new();
    for &mode in &config.modes {
        let mut full = base.clone();
        let log = contract_stars(&mut full, &ContractConfig::exhaustive(mode))?;
        for r in &log {
            histogram.add(mode, r.size);
        }
        contractions.insert(mode, log.len());
        for &p in &config.checkpoints {
            let steps = p as usize * log.len() / 100;
            let mut g = base.clone();
            replay(&mut g, &log[..steps])?;
            let work = steps
                .checked_sub(1)
                .map_or(WorkCounter::default(), |i| log[i].work);
            for &finisher in &config.finishers {
                let start = Instant::now();
                let solution = finisher.solve(&g)?;
                records.push(CheckpointRecord {
                    instance: id.to_string(),
                    mode,
                    checkpoint: p,
                    finisher,
                    weight: solution.weight,
                    quality: 0.0,
                    visited: work.visited,
                    ratios: work.ratios,
                    elapsed_ms: elapsed_ms(start, config.timing),
                });
            }
        }
    }
    let reference = config
        .reference
        .or_else(|| records.iter().map(|r| r.weight).min())
        .unwrap_or(0);
    for r in &mut records {
        // rounded as written, so aggregating re-read records is exact
        r.quality = (quality(r.weight, reference) * 1e4).round() / 1e4;
    }
    Ok(ExperimentOutput {
        records,
        histogram,
        reduction,
        contractions,
    })
}

pub const RECORD_HEADER: [&str; 9] = [
    "instance",
    "mode",
    "checkpoint",
    "finisher",
    "weight",
    "quality",
    "visited",
    "ratios",
    "elapsed_ms",
];

/// Records as CSV; quality is printed with four decimals.
pub fn write_records(records: &[CheckpointRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER).map_err(io_error)?;
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.mode.name().to_string(),
            r.checkpoint.to_string(),
            r.finisher.name().to_string(),
            r.weight.to_string(),
            format!("{:.4}", r.quality),
            r.visited.to_string(),
            r.ratios.to_string(),
            r.elapsed_ms.to_string(),
        ])
        .map_err(io_error)?;
    }
    w.flush().map_err(|e| io_error(e.into()))
}

pub fn read_records(input: impl Read) -> Result<Vec<CheckpointRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::parse(i + 2, e.to_string())))
        .collect()
}

/// `instance,weight` rows.
pub fn read_best_known(input: impl Read) -> Result<BTreeMap<String, u64>> {
    #[derive(Deserialize)]
    struct Row {
        instance: String,
        weight: u64,
    }
    let mut out = BTreeMap::new();
    for (i, row) in csv::Reader::from_reader(input)
        .deserialize::<Row>()
        .enumerate()
    {
        let row = row.map_err(|e| Error::parse(i + 2, e.to_string()))?;
        out.insert(row.instance, row.weight);
    }
    Ok(out)
}

/// Quality statistics of one (mode, finisher, checkpoint) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub mode: StarMode,
    pub finisher: Finisher,
    pub checkpoint: u32,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Quantile of sorted data by linear interpolation between closest ranks.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn aggregate(records: &[CheckpointRecord]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(StarMode, Finisher, u32), Vec<f64>> = BTreeMap::new();
    for r in records {
        cells
            .entry((r.mode, r.finisher, r.checkpoint))
            .or_default()
            .push(r.quality);
    }
    cells
        .into_iter()
        .map(|((mode, finisher, checkpoint), mut q)| {
            q.sort_by(f64::total_cmp);
            SummaryRow {
                mode,
                finisher,
                checkpoint,
                count: q.len(),
                min: q[0],
                q1: quantile(&q, 0.25),
                median: quantile(&q, 0.5),
                q3: quantile(&q, 0.75),
                max: q[q.len() - 1],
                mean: q.iter().sum::<f64>() / q.len() as f64,
            }
        })
        .collect()
}

pub fn write_summary(rows: &[SummaryRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "mode",
        "finisher",
        "checkpoint",
        "count",
        "min",
        "q1",
        "median",
        "q3",
        "max",
        "mean",
    ])
    .map_err(io_error)?;
    for r in rows {
        let mut fields = vec![
            r.mode.name().to_string(),
            r.finisher.name().to_string(),
            r.checkpoint.to_string(),
            r.count.to_string(),
        ];
        fields.extend([r.min, r.q1, r.median, r.q3, r.max, r.mean].map(|x| format!("{x:.4}")));
        w.write_record(fields).map_err(io_error)?;
    }
    w.flush().map_err(|e| io_error(e.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gadget() -> Instance {
        Instance::new(
            6,
            [(0, 4, 1), (1, 4, 1), (4, 5, 1), (5, 2, 1), (5, 3, 1)],
            [0, 1, 2, 3],
        )
        .unwrap()
    }

    #[test]
    fn quantiles() {
        let q = [100.0, 102.0, 104.0, 106.0];
        assert_eq!(quantile(&q, 0.5), 103.0);
        assert_eq!(quantile(&q, 0.25), 101.5);
        assert_eq!(quantile(&[7.0], 0.75), 7.0);
    }

    #[test]
    fn two_terminal_instance() {
        let inst = Instance::new(3, [(0, 1, 2), (1, 2, 3), (0, 2, 9)], [0, 2]).unwrap();
        let config = ExperimentConfig {
            modes: vec![StarMode::Basic],
            finishers: vec![Finisher::Mst],
            checkpoints: vec![0, 100],
            ..Default::default()
        };
        let out = run_experiment("pair", &inst, &config).unwrap();
        assert_eq!(out.records.len(), 2);
        for r in &out.records {
            assert_eq!((r.weight, r.quality), (5, 100.0));
        }
    }

    #[test]
    fn gadget_checkpoints() {
        let config = ExperimentConfig {
            modes: vec![StarMode::Improved],
            finishers: vec![Finisher::Mst],
            checkpoints: vec![0, 100],
            reference: Some(5),
            timing: false,
        };
        let out = run_experiment("gadget", &gadget(), &config).unwrap();
        let weights: Vec<u64> = out.records.iter().map(|r| r.weight).collect();
        assert_eq!(weights, vec![5, 5]);
        // the reductions leave nothing to contract
        assert_eq!(out.contractions[&StarMode::Improved], 0);
        assert!(out
            .records
            .iter()
            .all(|r| r.visited == 0 && r.quality == 100.0));
    }

    #[test]
    fn csv_round_trip_and_summary() {
        let out = run_experiment("gadget", &gadget(), &ExperimentConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_records(&out.records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "instance,mode,checkpoint,finisher,weight,quality,visited,ratios,elapsed_ms\n"
        ));
        assert!(text.contains(",100.0000,"));
        let back = read_records(&buf[..]).unwrap();
        assert_eq!(back, out.records);
        let summary = aggregate(&back);
        assert_eq!(summary.len(), 2 * 5 * 11);
        let row = &summary[0];
        assert_eq!(
            (row.min, row.median, row.max, row.count),
            (row.mean, row.q1, row.q3, 1)
        );
    }

    #[test]
    fn histogram_buckets() {
        let mut h = StarSizeHistogram::default();
        for size in [2, 2, 3, 10, 17] {
            h.add(StarMode::Basic, size);
        }
        assert_eq!(h.count(StarMode::Basic, 2), 2);
        assert_eq!(h.count(StarMode::Basic, 12), 2);
        assert_eq!(h.total(StarMode::Basic), 5);
        let mut buf = Vec::new();
        h.write_csv(&[StarMode::Basic], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        assert!(text.ends_with("basic,10+,2\n"));
    }

    #[test]
    fn best_known() {
        let map = read_best_known("instance,weight\na.stp,10\nb.stp,7\n".as_bytes()).unwrap();
        assert_eq!(map["b.stp"], 7);
        assert!(read_best_known("instance,weight\na,x\n".as_bytes()).is_err());
    }
}
