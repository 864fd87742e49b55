//! Seeded experiment sweeps with on-disk metrics.
//!
//! Layout under the output directory:
//!
//! ```text
//! <point>/<policy>/seed-<s>/records.csv      one row per decision event
//! <point>/learned/seed-<s>/train_log.csv     one row per training episode
//! <point>/learned/seed-<s>/checkpoint.json   trained actors and critics
//! summary.csv, per_vehicle.csv, reward_curve.csv, manifest.json
//! ```
//!
//! The aggregate tables are always recomputed from the raw files.

mod compare;
mod metrics;
mod oracle_check;

pub use compare::{compare_policies, Comparison, ComparisonRow, MissingRun};
pub use metrics::{mean_std, read_csv, read_records, write_csv, RecordRow, Stats, SCHEMA_VERSION};
pub use oracle_check::{oracle_check, small_instance, OracleCheckReport};

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{ConfigError, EnvConfig, Scenario};
use crate::env::Environment;
use crate::learner::{train_with, Checkpoint, EpisodeLog, TrainerConfig};
use crate::policy::{Policy, PolicyKind};

/// Overrides the output root of every experiment when set.
pub const OUTPUT_ENV_VAR: &str = "VECSIM_OUT";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot parse experiment file: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("training failed: {0}")]
    Train(String),
    #[error("no checkpoint at {0}; run `train` first")]
    NoCheckpoint(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Values substituted into the base environment, one point per combination.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub vehicles: Vec<usize>,
    pub speed_ranges_kmh: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub output_dir: PathBuf,
    pub seeds: Vec<u64>,
    /// Policies run by `evaluate`.
    pub policies: Vec<PolicyKind>,
    pub episodes_per_eval: usize,
    /// TTIs per evaluation episode.
    pub eval_steps: usize,
    pub env: EnvConfig,
    pub trainer: TrainerConfig,
    pub sweep: Sweep,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            output_dir: PathBuf::from("out"),
            seeds: (0..5).collect(),
            policies: vec![PolicyKind::Al, PolicyKind::Av, PolicyKind::Rd, PolicyKind::Edg],
            episodes_per_eval: 50,
            eval_steps: 100,
            env: EnvConfig::default(),
            trainer: TrainerConfig::default(),
            sweep: Sweep::default(),
        }
    }
}

/// One fully substituted environment of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub label: String,
    pub env: EnvConfig,
}

impl ExperimentSpec {
    pub fn from_toml_str(s: &str) -> Result<Self, HarnessError> {
        toml::from_str(s).map_err(|e| HarnessError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("spec serializes")
    }

    /// Hash of everything that determines the raw metrics.
    pub fn fingerprint(&self) -> String {
        let mut s = self.clone();
        s.output_dir = PathBuf::new();
        hex::encode(Sha256::digest(serde_json::to_vec(&s).expect("spec serializes")))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds.is_empty() {
            return Err(ConfigError("at least one seed is required".into()).into());
        }
        if self.episodes_per_eval == 0 || self.eval_steps == 0 {
            return Err(ConfigError("episodes_per_eval and eval_steps must be positive".into()).into());
        }
        self.trainer.validate()?;
        for p in self.points() {
            p.env.scenario()?;
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<SweepPoint> {
        let vehicles = if self.sweep.vehicles.is_empty() {
            vec![self.env.scenario.vehicles]
        } else {
            self.sweep.vehicles.clone()
        };
        let speeds = if self.sweep.speed_ranges_kmh.is_empty() {
            vec![self.env.scenario.speed_range_kmh]
        } else {
            self.sweep.speed_ranges_kmh.clone()
        };
        let mut out = Vec::new();
        for &k in &vehicles {
            for &v in &speeds {
                let mut env = self.env.clone();
                env.scenario.vehicles = k;
                env.scenario.speed_range_kmh = v;
                out.push(SweepPoint {
                    label: point_label(k, v),
                    env,
                });
            }
        }
        out
    }
}

pub fn point_label(vehicles: usize, speed_kmh: [f64; 2]) -> String {
    format!("k{vehicles}_v{}-{}", speed_kmh[0], speed_kmh[1])
}

pub fn run_dir(root: &Path, point: &str, policy: PolicyKind, seed: u64) -> PathBuf {
    root.join(point).join(policy.as_str()).join(format!("seed-{seed}"))
}

/// Environment seed of evaluation episode `episode`; shared by all
/// policies so that comparisons are paired.
pub fn eval_episode_seed(seed: u64, episode: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(9);
    rng.set_word_pos(2 * episode as u128);
    rng.random()
}

/// Rolls `policy` through `episodes` seeded episodes of `steps` TTIs.
pub fn evaluate_policy(
    policy: &mut Policy,
    scenario: &Scenario,
    seed: u64,
    episodes: usize,
    steps: usize,
) -> Vec<RecordRow> {
    let mut env = Environment::from_scenario(scenario.clone(), 0);
    let mut rows = Vec::new();
    for e in 0..episodes {
        env.reset(eval_episode_seed(seed, e));
        for _ in 0..steps {
            let decisions = policy.decide(&env);
            let result = env.step_decisions(&decisions);
            rows.extend(result.records.iter().map(|r| RecordRow::new(e, r)));
        }
    }
    rows
}

/// Per-episode training row of `train_log.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRow {
    pub schema_version: u32,
    pub episode: usize,
    pub mean_reward: f64,
    pub moving_average: f64,
    pub decisions: usize,
    pub satisfied: usize,
    pub energy_j: f64,
    pub noise: f64,
    pub updates: usize,
    pub critic_loss: Option<f64>,
    pub actor_grad_norm: Option<f64>,
}

fn train_rows(logs: &[EpisodeLog], moving: &[f64]) -> Vec<TrainRow> {
    logs.iter()
        .zip(moving)
        .map(|(l, m)| TrainRow {
            schema_version: SCHEMA_VERSION,
            episode: l.episode,
            mean_reward: l.mean_reward,
            moving_average: *m,
            decisions: l.decisions,
            satisfied: l.satisfied,
            energy_j: l.energy_j,
            noise: l.noise,
            updates: l.updates,
            critic_loss: l.critic_loss,
            actor_grad_norm: l.actor_grad_norm,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Train the learned policy, then evaluate it.
    Train,
    /// Evaluate the configured policies; `learned` loads a checkpoint.
    Evaluate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub point: String,
    pub policy: PolicyKind,
    pub seed: u64,
    pub env_fingerprint: String,
    pub ok: bool,
    pub error: Option<String>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub mode: Mode,
    pub spec_fingerprint: String,
    pub code_version: String,
    pub schema_version: u32,
    pub runs: Vec<RunEntry>,
    pub aggregates: Vec<PathBuf>,
    pub failures: usize,
}

impl Manifest {
    pub fn has_failures(&self) -> bool {
        self.failures > 0
    }
}

/// Row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub schema_version: u32,
    pub point: String,
    pub vehicles: usize,
    pub speed_min_kmh: f64,
    pub speed_max_kmh: f64,
    pub policy: PolicyKind,
    pub seed: u64,
    pub decisions: usize,
    pub tasks: usize,
    pub mean_delay_ttis: f64,
    pub mean_energy_j: f64,
    pub violation_rate: f64,
    pub mean_reward: f64,
}

/// Row of `per_vehicle.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleRow {
    pub schema_version: u32,
    pub point: String,
    pub policy: PolicyKind,
    pub seed: u64,
    pub vehicle: usize,
    pub tasks: usize,
    pub mean_delay_ttis: f64,
    pub mean_energy_j: f64,
}

/// Row of `reward_curve.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub schema_version: u32,
    pub point: String,
    pub seed: u64,
    pub episode: usize,
    pub mean_reward: f64,
    pub moving_average: f64,
}

struct Job<'a> {
    point: &'a SweepPoint,
    policy: PolicyKind,
    seed: u64,
}

fn run_job(spec: &ExperimentSpec, root: &Path, mode: Mode, job: &Job) -> Result<Vec<PathBuf>, HarnessError> {
    let scenario = job.point.env.scenario()?;
    let dir = run_dir(root, &job.point.label, job.policy, job.seed);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut files = Vec::new();
    let mut policy = match (job.policy, mode) {
        (PolicyKind::Learned, Mode::Train) => {
            let cfg = TrainerConfig {
                seed: job.seed,
                ..spec.trainer.clone()
            };
            let run = train_with(&job.point.env, &cfg, |_| {}).map_err(|e| HarnessError::Train(e.to_string()))?;
            let log = dir.join("train_log.csv");
            write_csv(&log, &train_rows(&run.episodes, &run.moving_average)).map_err(io_err(&log))?;
            let ck = dir.join("checkpoint.json");
            let snapshot = Checkpoint::capture(&run.model, &run.env_fingerprint, cfg.episodes);
            let text = serde_json::to_string(&snapshot).expect("checkpoint serializes");
            fs::write(&ck, text).map_err(io_err(&ck))?;
            files.extend([log, ck]);
            Policy::Learned(Box::new(run.model))
        }
        (PolicyKind::Learned, Mode::Evaluate) => {
            let ck = dir.join("checkpoint.json");
            let text = fs::read_to_string(&ck).map_err(|_| HarnessError::NoCheckpoint(ck.clone()))?;
            let snapshot: Checkpoint =
                serde_json::from_str(&text).map_err(|e| HarnessError::Parse(format!("{}: {e}", ck.display())))?;
            if snapshot.env_fingerprint != job.point.env.fingerprint() {
                return Err(ConfigError(format!("{} was trained on a different environment", ck.display())).into());
            }
            let model = snapshot
                .restore(&spec.trainer)
                .map_err(|e| HarnessError::Parse(format!("{}: {e}", ck.display())))?;
            Policy::Learned(Box::new(model))
        }
        (kind, _) => Policy::baseline(kind, job.seed),
    };
    let rows = evaluate_policy(&mut policy, &scenario, job.seed, spec.episodes_per_eval, spec.eval_steps);
    let records = dir.join("records.csv");
    write_csv(&records, &rows).map_err(io_err(&records))?;
    files.push(records);
    Ok(files)
}

/// Runs every (sweep point, policy, seed) combination and writes the raw
/// files, the aggregate tables and the manifest. A failing combination is
/// recorded in the manifest and does not stop the others.
///
/// `Mode::Train` runs only the learned policy; `Mode::Evaluate` runs the
/// spec's policy list.
pub fn run_experiment(spec: &ExperimentSpec, root: &Path, mode: Mode) -> Result<Manifest, HarnessError> {
    spec.validate()?;
    fs::create_dir_all(root).map_err(io_err(root))?;
    let points = spec.points();
    let policies = match mode {
        Mode::Train => vec![PolicyKind::Learned],
        Mode::Evaluate => spec.policies.clone(),
    };
    let mut jobs = Vec::new();
    for point in &points {
        for &policy in &policies {
            for &seed in &spec.seeds {
                jobs.push(Job { point, policy, seed });
            }
        }
    }
    let runs: Vec<RunEntry> = jobs
        .par_iter()
        .map(|job| {
            let result = run_job(spec, root, mode, job);
            RunEntry {
                point: job.point.label.clone(),
                policy: job.policy,
                seed: job.seed,
                env_fingerprint: job.point.env.fingerprint(),
                ok: result.is_ok(),
                error: result.as_ref().err().map(ToString::to_string),
                files: result.unwrap_or_default().into_iter().map(|f| relative(root, &f)).collect(),
            }
        })
        .collect();

    let aggregates = write_aggregates(root, &points, &spec.seeds)?;
    let manifest = Manifest {
        name: spec.name.clone(),
        mode,
        spec_fingerprint: spec.fingerprint(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        schema_version: SCHEMA_VERSION,
        failures: runs.iter().filter(|r| !r.ok).count(),
        runs,
        aggregates,
    };
    let path = root.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(manifest)
}

fn relative(root: &Path, p: &Path) -> PathBuf {
    p.strip_prefix(root).map_or_else(|_| p.to_owned(), Path::to_owned)
}

/// Recomputes `summary.csv`, `per_vehicle.csv` and `reward_curve.csv` from
/// every raw file present for the given points and seeds, so results of
/// separate `train` and `evaluate` invocations end up in one table.
pub fn write_aggregates(root: &Path, points: &[SweepPoint], seeds: &[u64]) -> Result<Vec<PathBuf>, HarnessError> {
    let mut summary = Vec::new();
    let mut per_vehicle = Vec::new();
    let mut curve = Vec::new();
    for point in points {
        for policy in PolicyKind::ALL {
            for &seed in seeds {
                let dir = run_dir(root, &point.label, policy, seed);
                let path = dir.join("records.csv");
                if !path.exists() {
                    continue;
                }
                let rows = read_records(&path).map_err(io_err(&path))?;
                let s = Stats::of(&rows);
                summary.push(SummaryRow {
                    schema_version: SCHEMA_VERSION,
                    point: point.label.clone(),
                    vehicles: point.env.scenario.vehicles,
                    speed_min_kmh: point.env.scenario.speed_range_kmh[0],
                    speed_max_kmh: point.env.scenario.speed_range_kmh[1],
                    policy,
                    seed,
                    decisions: s.decisions,
                    tasks: s.tasks,
                    mean_delay_ttis: s.mean_delay_ttis,
                    mean_energy_j: s.mean_energy_j,
                    violation_rate: s.violation_rate,
                    mean_reward: s.mean_reward,
                });
                for (vehicle, v) in Stats::per_vehicle(&rows) {
                    per_vehicle.push(VehicleRow {
                        schema_version: SCHEMA_VERSION,
                        point: point.label.clone(),
                        policy,
                        seed,
                        vehicle,
                        tasks: v.tasks,
                        mean_delay_ttis: v.mean_delay_ttis,
                        mean_energy_j: v.mean_energy_j,
                    });
                }
                let log = dir.join("train_log.csv");
                if policy == PolicyKind::Learned && log.exists() {
                    for row in read_csv::<TrainRow>(&log).map_err(io_err(&log))? {
                        curve.push(CurveRow {
                            schema_version: SCHEMA_VERSION,
                            point: point.label.clone(),
                            seed,
                            episode: row.episode,
                            mean_reward: row.mean_reward,
                            moving_average: row.moving_average,
                        });
                    }
                }
            }
        }
    }
    let mut written = Vec::new();
    for (name, result) in [
        ("summary.csv", write_csv(&root.join("summary.csv"), &summary)),
        ("per_vehicle.csv", write_csv(&root.join("per_vehicle.csv"), &per_vehicle)),
        ("reward_curve.csv", write_csv(&root.join("reward_curve.csv"), &curve)),
    ] {
        result.map_err(io_err(&root.join(name)))?;
        written.push(PathBuf::from(name));
    }
    Ok(written)
}

/// Output root: the override variable if set, else `fallback`.
pub fn output_root(fallback: &Path) -> PathBuf {
    std::env::var_os(OUTPUT_ENV_VAR).map_or_else(|| fallback.to_owned(), PathBuf::from)
}
