//! Raw per-decision rows and the statistics derived from them.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::env::DecisionRecord;
use crate::model::{Tti, TaskType};

pub const SCHEMA_VERSION: u32 = 1;

/// One decision event as persisted in `records.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub schema_version: u32,
    pub episode: usize,
    pub tti: Tti,
    pub vehicle: usize,
    pub task_id: u64,
    pub task_type: TaskType,
    pub decision: String,
    pub committed: bool,
    pub delay_ttis: Option<Tti>,
    pub energy_j: f64,
    pub reward: f64,
    pub tier: u8,
    /// Semicolon-separated violated constraints, empty when none.
    pub violated: String,
}

impl RecordRow {
    pub fn new(episode: usize, r: &DecisionRecord) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            episode,
            tti: r.tti,
            vehicle: r.vehicle,
            task_id: r.task_id,
            task_type: r.task_type,
            decision: r.decision.to_owned(),
            committed: r.committed,
            delay_ttis: r.delay_ttis,
            energy_j: r.energy_j,
            reward: r.reward,
            tier: r.tier,
            violated: r.violated.clone(),
        }
    }

    /// A task that actually started executing (locally or on the server).
    pub fn is_execution(&self) -> bool {
        self.committed && (self.decision == "local" || self.decision == "vec")
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> io::Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(io::Error::from)).collect()
}

pub fn read_records(path: &Path) -> io::Result<Vec<RecordRow>> {
    read_csv(path)
}

/// Means over a set of decision rows. Delay and energy are averaged over
/// executed tasks; rates over all decision events.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Stats {
    pub decisions: usize,
    pub tasks: usize,
    pub mean_delay_ttis: f64,
    pub mean_energy_j: f64,
    pub violation_rate: f64,
    pub mean_reward: f64,
}

impl Stats {
    pub fn of<'a>(rows: impl IntoIterator<Item = &'a RecordRow>) -> Self {
        let (mut decisions, mut tasks, mut violated) = (0usize, 0usize, 0usize);
        let (mut delay, mut energy, mut reward) = (0.0, 0.0, 0.0);
        for r in rows {
            decisions += 1;
            reward += r.reward;
            violated += usize::from(!r.violated.is_empty());
            if r.is_execution() {
                tasks += 1;
                delay += r.delay_ttis.unwrap_or(0) as f64;
                energy += r.energy_j;
            }
        }
        let mean = |sum: f64, n: usize| if n > 0 { sum / n as f64 } else { 0.0 };
        Self {
            decisions,
            tasks,
            mean_delay_ttis: mean(delay, tasks),
            mean_energy_j: mean(energy, tasks),
            violation_rate: mean(violated as f64, decisions),
            mean_reward: mean(reward, decisions),
        }
    }

    pub fn per_vehicle(rows: &[RecordRow]) -> BTreeMap<usize, Stats> {
        let mut groups: BTreeMap<usize, Vec<&RecordRow>> = BTreeMap::new();
        for r in rows {
            groups.entry(r.vehicle).or_default().push(r);
        }
        groups.into_iter().map(|(k, rs)| (k, Stats::of(rs))).collect()
    }
}

/// Sample mean and standard deviation (n - 1 denominator; 0 for n < 2).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
