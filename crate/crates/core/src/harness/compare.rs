use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::metrics::{mean_std, read_records, Stats};
use super::run_dir;
use crate::policy::PolicyKind;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("no records for policy {policy} seed {seed} at point {point}")]
pub struct MissingRun {
    pub point: String,
    pub policy: PolicyKind,
    pub seed: u64,
}

/// Paired comparison of one policy against a baseline at one sweep point.
/// Deltas are `policy - baseline` per seed; `_std` fields are dispersion
/// over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub point: String,
    pub policy: PolicyKind,
    pub baseline: PolicyKind,
    pub seeds: usize,
    pub energy_j: f64,
    pub energy_j_std: f64,
    pub baseline_energy_j: f64,
    pub baseline_energy_j_std: f64,
    pub delta_energy_j: f64,
    pub delta_energy_j_std: f64,
    pub delay_ttis: f64,
    pub baseline_delay_ttis: f64,
    pub delta_delay_ttis: f64,
    pub delta_delay_ttis_std: f64,
    pub violation_rate: f64,
    pub baseline_violation_rate: f64,
    pub delta_violation_rate: f64,
    /// Seeds on which the policy's mean energy is at most the baseline's.
    pub energy_not_worse: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
}

fn load(root: &Path, point: &str, policy: PolicyKind, seed: u64) -> Result<Stats, MissingRun> {
    let path = run_dir(root, point, policy, seed).join("records.csv");
    read_records(&path).map(|rows| Stats::of(&rows)).map_err(|_| MissingRun {
        point: point.to_owned(),
        policy,
        seed,
    })
}

/// Compares every policy in `policies` against `baseline` on the same
/// points and seeds, reading the raw records under `root`.
pub fn compare_policies(
    root: &Path,
    points: &[String],
    seeds: &[u64],
    policies: &[PolicyKind],
    baseline: PolicyKind,
) -> Result<Comparison, MissingRun> {
    let mut rows = Vec::new();
    for point in points {
        let base: Vec<Stats> = seeds
            .iter()
            .map(|&s| load(root, point, baseline, s))
            .collect::<Result<_, _>>()?;
        for &policy in policies {
            let own: Vec<Stats> = seeds
                .iter()
                .map(|&s| load(root, point, policy, s))
                .collect::<Result<_, _>>()?;
            let col = |xs: &[Stats], f: fn(&Stats) -> f64| -> Vec<f64> { xs.iter().map(f).collect() };
            let delta = |f: fn(&Stats) -> f64| -> Vec<f64> {
                own.iter().zip(&base).map(|(a, b)| f(a) - f(b)).collect()
            };
            let energy = |s: &Stats| s.mean_energy_j;
            let delay = |s: &Stats| s.mean_delay_ttis;
            let violation = |s: &Stats| s.violation_rate;
            let (e, e_sd) = mean_std(&col(&own, energy));
            let (be, be_sd) = mean_std(&col(&base, energy));
            let (de, de_sd) = mean_std(&delta(energy));
            let (d, _) = mean_std(&col(&own, delay));
            let (bd, _) = mean_std(&col(&base, delay));
            let (dd, dd_sd) = mean_std(&delta(delay));
            let (v, _) = mean_std(&col(&own, violation));
            let (bv, _) = mean_std(&col(&base, violation));
            let (dv, _) = mean_std(&delta(violation));
            rows.push(ComparisonRow {
                point: point.clone(),
                policy,
                baseline,
                seeds: seeds.len(),
                energy_j: e,
                energy_j_std: e_sd,
                baseline_energy_j: be,
                baseline_energy_j_std: be_sd,
                delta_energy_j: de,
                delta_energy_j_std: de_sd,
                delay_ttis: d,
                baseline_delay_ttis: bd,
                delta_delay_ttis: dd,
                delta_delay_ttis_std: dd_sd,
                violation_rate: v,
                baseline_violation_rate: bv,
                delta_violation_rate: dv,
                energy_not_worse: own.iter().zip(&base).filter(|(a, b)| a.mean_energy_j <= b.mean_energy_j).count(),
            });
        }
    }
    Ok(Comparison { rows })
}
