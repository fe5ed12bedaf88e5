//! Cluster purity and the multi-trial center-count sweep.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::data::SubspaceDataset;
use crate::error::{Error, Result};
use crate::lbg::{lbg_cluster, LbgConfig, PrototypeMethod};
use crate::seed::{self, par_map};

/// Fraction of samples that belong to the majority class of their cluster.
pub fn purity(labels: &[usize], classes: &[u32]) -> Result<f64> {
    if labels.len() != classes.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: classes.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts: HashMap<(usize, u32), usize> = HashMap::new();
    for (&l, &c) in labels.iter().zip(classes) {
        *counts.entry((l, c)).or_default() += 1;
    }
    let mut majority: HashMap<usize, usize> = HashMap::new();
    for ((l, _), n) in counts {
        let best = majority.entry(l).or_default();
        *best = (*best).max(n);
    }
    Ok(majority.values().sum::<usize>() as f64 / labels.len() as f64)
}

/// One LBG run inside a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub method: PrototypeMethod,
    pub num_centers: usize,
    pub trial: usize,
    pub seed: u64,
    pub purity: f64,
    pub final_distortion: f64,
    pub outer_iters_used: usize,
    pub wall_time_seconds: f64,
    pub distortion_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMedian {
    pub method: PrototypeMethod,
    pub num_centers: usize,
    pub median_purity: f64,
    pub median_distortion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub medians: Vec<SweepMedian>,
}

pub const RECORDS_HEADER: [&str; 8] = [
    "method",
    "num_centers",
    "trial",
    "seed",
    "purity",
    "distortion",
    "iters",
    "seconds",
];
pub const MEDIANS_HEADER: [&str; 4] = [
    "method",
    "num_centers",
    "median_purity",
    "median_distortion",
];

/// Median with the lower-middle element for even counts.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(sorted[(sorted.len() - 1) / 2])
}

impl SweepReport {
    /// Groups records by `(method, num_centers)` in first-appearance order.
    pub fn from_records(records: Vec<SweepRecord>) -> Self {
        let mut cells: Vec<(PrototypeMethod, usize)> = Vec::new();
        for r in &records {
            if !cells.contains(&(r.method, r.num_centers)) {
                cells.push((r.method, r.num_centers));
            }
        }
        let medians = cells
            .into_iter()
            .map(|(method, num_centers)| {
                let cell: Vec<&SweepRecord> = records
                    .iter()
                    .filter(|r| r.method == method && r.num_centers == num_centers)
                    .collect();
                let purities: Vec<f64> = cell.iter().map(|r| r.purity).collect();
                let distortions: Vec<f64> = cell.iter().map(|r| r.final_distortion).collect();
                SweepMedian {
                    method,
                    num_centers,
                    median_purity: lower_median(&purities).expect("non-empty cell"),
                    median_distortion: lower_median(&distortions).expect("non-empty cell"),
                }
            })
            .collect();
        Self { records, medians }
    }

    /// Zeroes wall times so that reports from repeated runs compare equal.
    pub fn without_timing(mut self) -> Self {
        for r in &mut self.records {
            r.wall_time_seconds = 0.0;
        }
        self
    }

    pub fn median(&self, method: PrototypeMethod, num_centers: usize) -> Option<&SweepMedian> {
        self.medians
            .iter()
            .find(|m| m.method == method && m.num_centers == num_centers)
    }

    pub fn write_records_csv<W: Write>(&self, w: W) -> Result<()> {
        write_records_csv(&self.records, w)
    }

    pub fn write_medians_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(MEDIANS_HEADER).map_err(csv_error)?;
        for m in &self.medians {
            out.write_record([
                m.method.to_string(),
                m.num_centers.to_string(),
                m.median_purity.to_string(),
                m.median_distortion.to_string(),
            ])
            .map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn write_records_csv<W: Write>(records: &[SweepRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RECORDS_HEADER).map_err(csv_error)?;
    for r in records {
        out.write_record([
            r.method.to_string(),
            r.num_centers.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.purity.to_string(),
            r.final_distortion.to_string(),
            r.outer_iters_used.to_string(),
            r.wall_time_seconds.to_string(),
        ])
        .map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

/// Seed of one sweep cell, independent of every other cell.
pub fn cell_seed(base: u64, method: PrototypeMethod, num_centers: usize, trial: usize) -> u64 {
    seed::derive(&[base, method.code(), num_centers as u64, trial as u64])
}

/// Completed records of a sweep plus the first failure, if any.
#[derive(Debug)]
pub struct SweepOutcome {
    /// Records in plan order, up to (excluding) the first failed cell.
    pub records: Vec<SweepRecord>,
    pub failure: Option<Error>,
}

fn validate_plan(
    dataset: &SubspaceDataset,
    methods: &[PrototypeMethod],
    center_counts: &[usize],
    trials: usize,
) -> Result<()> {
    if dataset.class_labels().is_none() {
        return Err(Error::MissingClassLabels);
    }
    if methods.is_empty() || center_counts.is_empty() || trials == 0 {
        return Err(Error::InvalidConfig(
            "sweep needs at least one method, center count and trial".into(),
        ));
    }
    Ok(())
}

/// Runs every `(method, center_count, trial)` cell, keeping what finished.
pub fn sweep_partial(
    dataset: &SubspaceDataset,
    methods: &[PrototypeMethod],
    center_counts: &[usize],
    trials: usize,
    base_cfg: &LbgConfig,
) -> Result<SweepOutcome> {
    validate_plan(dataset, methods, center_counts, trials)?;
    let classes = dataset.class_labels().expect("validated");
    let mut cells = Vec::new();
    for &method in methods {
        for &m in center_counts {
            for trial in 0..trials {
                cells.push((method, m, trial));
            }
        }
    }
    let results = par_map(cells.len(), |i| -> Result<SweepRecord> {
        let (method, num_centers, trial) = cells[i];
        let seed = cell_seed(base_cfg.seed, method, num_centers, trial);
        let mut cfg = base_cfg.clone();
        cfg.prototype_method = method;
        cfg.num_centers = num_centers;
        cfg.seed = seed;
        cfg.svbf.seed = seed;
        let started = Instant::now();
        let model = lbg_cluster(dataset, &cfg)?;
        let wall_time_seconds = started.elapsed().as_secs_f64();
        Ok(SweepRecord {
            method,
            num_centers,
            trial,
            seed,
            purity: purity(&model.labels, classes)?,
            final_distortion: model.final_distortion(),
            outer_iters_used: model.iterations_used,
            wall_time_seconds,
            distortion_history: model.distortion_history,
        })
    });
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => {
                return Ok(SweepOutcome {
                    records,
                    failure: Some(e),
                })
            }
        }
    }
    Ok(SweepOutcome {
        records,
        failure: None,
    })
}

/// Full sweep; fails if any cell fails.
pub fn sweep(
    dataset: &SubspaceDataset,
    methods: &[PrototypeMethod],
    center_counts: &[usize],
    trials: usize,
    base_cfg: &LbgConfig,
) -> Result<SweepReport> {
    let outcome = sweep_partial(dataset, methods, center_counts, trials, base_cfg)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(SweepReport::from_records(outcome.records)),
    }
}
