//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Runs the 5-seed desk-scale training, so expect several minutes.

mod common;

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vecsim::env::{assess, CellState, Decision, Environment, Holding, RewardTier};
use vecsim::harness::{
    compare_policies, oracle_check, read_csv, run_dir, run_experiment, ExperimentSpec, Mode, TrainRow,
};
use vecsim::learner::TrainerConfig;
use vecsim::model::{
    aggregate_rate, channel_capacity, delay_threshold, local_delay_ttis, local_energy_j, offload_delay_ttis,
    offload_energy_j, total_delay_ttis, ComponentDelays, Direction, Placement, Task, TaskType, ThresholdModel,
};
use vecsim::policy::PolicyKind;
use vecsim::{EnvConfig, Scenario};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

// ---------------------------------------------------------------------------
// 1. formulas against a straight-line reference

fn ref_ceil_ttis(seconds: f64) -> u64 {
    let x = seconds / 1e-3;
    let n = x.round();
    // durations that are whole TTIs up to float noise are not rounded up
    if (x - n).abs() <= 1e-9 * n.max(1.0) {
        n as u64
    } else {
        x.ceil() as u64
    }
}

fn ref_gain(d: f64) -> f64 {
    let pl_db = 47.0 + 30.0 * d.log10();
    10f64.powf(-pl_db / 10.0)
}

fn ref_rate(gain: f64) -> f64 {
    25e6 * (1.0 + 0.5 * gain / 1e-13).log2()
}

fn criterion_formulas() -> Verdict {
    let start = Instant::now();
    let sc = EnvConfig::default().scenario().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut int_mismatch = 0;
    let types = [TaskType::Ca, TaskType::Hpa, TaskType::Lpa];
    let cpus = [1.0e9, 1.2e9, 1.4e9, 1.6e9, 1.8e9];
    for _ in 0..1000 {
        let ty = types[rng.random_range(0..3)];
        let c = rng.random_range(0.2e6..=1.0e6);
        let kappa = rng.random_range(20.0..=50.0);
        let f = cpus[rng.random_range(0..5)];
        let share = rng.random_range(0.01..=1.0);
        let age = rng.random_range(0..30u64);
        let task = Task {
            id: 0,
            task_type: ty,
            size_bits: c,
            density_cycles_per_bit: kappa,
            output_ratio: 0.1,
            generated_at: 100,
            owner: 0,
            energy_density_j_per_cycle: 1.25e-26,
        };
        let n_up = rng.random_range(1..=4);
        let n_down = rng.random_range(1..=4);
        let up_gains: Vec<f64> = (0..4).map(|_| ref_gain(rng.random_range(10.0..260.0)) * rng.random_range(0.1..3.0)).collect();
        let down_gains: Vec<f64> = (0..4).map(|_| ref_gain(rng.random_range(10.0..260.0)) * rng.random_range(0.1..3.0)).collect();

        let lib_up: Vec<f64> = up_gains.iter().map(|g| channel_capacity(*g, &sc.radio, Direction::Up, 0.0)).collect();
        let lib_down: Vec<f64> =
            down_gains.iter().map(|g| channel_capacity(*g, &sc.radio, Direction::Down, 0.0)).collect();
        for (l, g) in lib_up.iter().zip(&up_gains).chain(lib_down.iter().zip(&down_gains)) {
            worst = worst.max(rel(*l, ref_rate(*g)));
        }
        let flags = |n: usize| -> Vec<bool> { (0..4).map(|i| i < n).collect() };
        let r_up = aggregate_rate(&flags(n_up), &lib_up);
        let r_down = aggregate_rate(&flags(n_down), &lib_down);
        let ref_up: f64 = up_gains[..n_up].iter().map(|g| ref_rate(*g)).sum();
        let ref_down: f64 = down_gains[..n_down].iter().map(|g| ref_rate(*g)).sum();
        worst = worst.max(rel(r_up, ref_up)).max(rel(r_down, ref_down));

        // local execution
        let local_s = kappa * c / f;
        worst = worst.max(rel(local_energy_j(&task, f), 1.25e-26 * kappa * c * f * f));
        let tl = local_delay_ttis(&task, f, &sc.compute);
        int_mismatch += usize::from(tl != ref_ceil_ttis(local_s));

        // offloading (never for critical tasks)
        let mut tr = 0;
        if ty != TaskType::Ca {
            let up_s = c / ref_up;
            let exec_s = kappa * c / (share * 10e9);
            let down_s = if ty == TaskType::Lpa { 0.1 * c / ref_down } else { 0.0 };
            worst = worst.max(rel(offload_energy_j(&task, r_up, r_down, 0.5).unwrap(), 0.5 * (up_s + down_s)));
            let expected = ref_ceil_ttis(up_s)
                + ref_ceil_ttis(exec_s)
                + if ty == TaskType::Lpa { ref_ceil_ttis(down_s) } else { 0 };
            tr = offload_delay_ttis(&task, r_up, r_down, share, &sc.compute).unwrap();
            int_mismatch += usize::from(tr != expected);
        }
        let delays = ComponentDelays {
            hold_wait: 20,
            offload: tr,
            local: tl,
        };
        let now = 100 + age;
        int_mismatch += usize::from(total_delay_ttis(&task, now, Placement::Hold, delays) != age + 20);
        int_mismatch += usize::from(total_delay_ttis(&task, now, Placement::Local, delays) != age + tl);
        int_mismatch += usize::from(total_delay_ttis(&task, now, Placement::Vec, delays) != age + tr);
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-12 && int_mismatch == 0 && elapsed < Duration::from_secs(1),
        format!(
            "1000 tuples, worst relative error {worst:.2e} (limit 1e-12), {int_mismatch} TTI mismatches, {:.3} s (limit 1 s)",
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. speed-aware deadline

fn criterion_threshold() -> Verdict {
    let m = ThresholdModel::new(0.010, 0.040, 0.100, 80.0 / 3.6);
    let at_limit = delay_threshold(TaskType::Hpa, m.v_max_mps, &m);
    let grid: Vec<f64> = (0..1000).map(|i| i as f64 * 60.0 / 999.0).collect();
    let values: Vec<f64> = grid.iter().map(|v| delay_threshold(TaskType::Hpa, *v, &m)).collect();
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    // exp(1.96^2 / 2), evaluated independently at 30 digits
    let frozen = 6.826_417_419_355_064;
    let ratio = delay_threshold(TaskType::Hpa, 0.0, &m) / 0.040;
    let err = (ratio - (1.96f64 * 1.96 / 2.0).exp()).abs().max((ratio - frozen).abs());
    verdict(
        at_limit == 0.040 && decreasing && err < 1e-9,
        format!(
            "T(v_max) = {at_limit} s, strictly decreasing on 1000 points: {decreasing}, T(0)/Thr2 = {ratio:.12} (error {err:.1e})"
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. exhaustive optimizer dominance

fn criterion_oracle() -> Verdict {
    let start = Instant::now();
    let r = oracle_check(200, 0);
    let elapsed = start.elapsed();
    verdict(
        r.passed() && r.single_vehicle_checked > 0 && elapsed < Duration::from_secs(120),
        format!(
            "{} instances ({} feasible), {} baseline comparisons, {} dominance failures, {}/{} single-vehicle greedy matches, {:.2} s (limit 120 s)",
            r.instances,
            r.feasible,
            r.comparisons,
            r.dominance_failures.len(),
            r.single_vehicle_checked - r.greedy_mismatches.len(),
            r.single_vehicle_checked,
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------------------
// 4. hand-computed constraint reports and rewards

/// Two vehicles at the speed limit with 1 GHz cpus, two 25 MHz channels per
/// direction at exactly 100 Mbps each.
fn reward_cell(tasks: [(TaskType, f64); 2]) -> (Scenario, CellState) {
    let mut cfg = EnvConfig::default();
    cfg.scenario.vehicles = 2;
    cfg.radio.fading = false;
    cfg.radio.uplink_channels = 2;
    cfg.radio.downlink_channels = 2;
    cfg.radio.uplink_bandwidth_mhz = 50.0;
    cfg.radio.downlink_bandwidth_mhz = 50.0;
    let env = Environment::new(&cfg, 0).unwrap();
    let sc = env.scenario().clone();
    let mut st = env.state().clone();
    let gain = 15.0 * 1e-13 / 0.5;
    for (k, (ty, kappa)) in tasks.iter().enumerate() {
        let v = &mut st.vehicles[k];
        v.cpu_hz = 1e9;
        v.speed_mps = sc.thresholds.v_max_mps;
        v.pending_task = Some(Task {
            id: k as u64,
            task_type: *ty,
            size_bits: 1e6,
            density_cycles_per_bit: *kappa,
            output_ratio: 0.1,
            generated_at: 0,
            owner: k,
            energy_density_j_per_cycle: 1.25e-26,
        });
        st.uplink_gain[k] = vec![gain; 2];
        st.downlink_gain[k] = vec![gain; 2];
    }
    (sc, st)
}

/// Vehicle 1 mid-offload on uplink 0 with the given share.
fn occupy(st: &mut CellState, share: f64) {
    let v = &mut st.vehicles[1];
    v.busy_until = st.now + 5;
    v.holding = Some(Holding {
        placement: Placement::Vec,
        cpu_share: share,
        uplink: vec![0],
        downlink: Vec::new(),
        started: st.now,
        until: st.now + 5,
        task: v.pending_task.take(),
    });
    st.uplink_owner[0] = Some(1);
    st.vec_residual_cpu = 1.0 - share;
}

struct RewardCase {
    name: &'static str,
    scenario: Scenario,
    state: CellState,
    decisions: Vec<Option<Decision>>,
    /// Per vehicle: violated labels, tier level, reward.
    expected: Vec<Option<(&'static str, u8, f64)>>,
}

fn vec_d(share: f64, up: &[usize], down: &[usize]) -> Option<Decision> {
    Some(Decision::offload(share, up.to_vec(), down.to_vec()))
}

fn reward_cases() -> Vec<RewardCase> {
    use TaskType::{Ca, Hpa, Lpa};
    let hpa2 = || reward_cell([(Hpa, 20.0), (Hpa, 20.0)]);
    let lpa2 = || reward_cell([(Lpa, 20.0), (Lpa, 20.0)]);
    let mut cases = Vec::new();
    let mut add = |name, (scenario, state): (Scenario, CellState), decisions, expected| {
        cases.push(RewardCase {
            name,
            scenario,
            state,
            decisions,
            expected,
        })
    };
    // local: 20 TTIs, 0.25 J; offload at share 1: 10 + 2 TTIs, 5 mJ
    let local = 0.683_939_720_585_721_2;
    let offload = 0.990_099_336_653_377_7;

    add(
        "both local",
        reward_cell([(Hpa, 20.0), (Lpa, 20.0)]),
        vec![Some(Decision::local()), Some(Decision::local())],
        vec![Some(("", 3, local)), Some(("", 3, local))],
    );
    add(
        "single offload, other idle",
        hpa2(),
        vec![vec_d(1.0, &[0], &[]), None],
        vec![Some(("", 3, offload)), None],
    );
    add(
        "offload on both uplinks",
        hpa2(),
        vec![vec_d(1.0, &[0, 1], &[]), None],
        vec![Some(("", 3, 0.995_024_916_874_584)), None],
    );
    add(
        "LPA offload at half share",
        lpa2(),
        vec![vec_d(0.5, &[0], &[0]), None],
        vec![Some(("", 3, 0.989_120_117_525_605)), None],
    );
    add(
        "c1: hold and offload",
        hpa2(),
        vec![
            Some(Decision {
                hold: true,
                ..Decision::offload(0.5, vec![0], vec![])
            }),
            None,
        ],
        vec![Some(("c1", 1, -1.2)), None],
    );
    add(
        "c2: shares sum to 1.2",
        hpa2(),
        vec![vec_d(0.7, &[0], &[]), vec_d(0.5, &[1], &[])],
        vec![Some(("c2", 1, -0.5)), Some(("c2", 1, -0.5))],
    );
    add(
        "c2: request over an existing grant",
        {
            let (sc, mut st) = hpa2();
            occupy(&mut st, 0.7);
            (sc, st)
        },
        vec![vec_d(0.5, &[1], &[]), None],
        vec![Some(("c2", 1, -0.5)), None],
    );
    add(
        "c3: same uplink",
        hpa2(),
        vec![vec_d(0.5, &[0], &[]), vec_d(0.5, &[0], &[])],
        vec![Some(("c3", 1, -0.9)), Some(("c3", 1, -0.9))],
    );
    add(
        "c3: two contested uplinks",
        hpa2(),
        vec![vec_d(0.5, &[0, 1], &[]), vec_d(0.5, &[0, 1], &[])],
        vec![Some(("c3", 1, -1.4)), Some(("c3", 1, -1.4))],
    );
    add(
        "c3: uplink already held",
        {
            let (sc, mut st) = hpa2();
            occupy(&mut st, 0.3);
            (sc, st)
        },
        vec![vec_d(0.5, &[0], &[]), None],
        vec![Some(("c3", 1, -0.9)), None],
    );
    add(
        "c4: same downlink",
        lpa2(),
        vec![vec_d(0.5, &[0], &[0]), vec_d(0.5, &[1], &[0])],
        vec![Some(("c4", 1, -0.9)), Some(("c4", 1, -0.9))],
    );
    add(
        "c2 and c3 together",
        hpa2(),
        vec![vec_d(0.7, &[0], &[]), vec_d(0.5, &[0], &[])],
        vec![Some(("c2;c3", 1, -1.0)), Some(("c2;c3", 1, -1.0))],
    );
    add(
        "c1 and c3 together",
        hpa2(),
        vec![
            Some(Decision {
                hold: true,
                ..Decision::offload(0.5, vec![0], vec![])
            }),
            vec_d(0.5, &[0], &[]),
        ],
        vec![Some(("c1;c3", 1, -1.7)), Some(("c3", 1, -0.9))],
    );
    add(
        "c5: slow local execution",
        reward_cell([(Hpa, 50.0), (Hpa, 20.0)]),
        vec![Some(Decision::local()), None],
        vec![Some(("c5", 2, 0.578_800_783_071_404_8)), None],
    );
    add(
        "c5: offload of a task queued 35 TTIs",
        {
            let (sc, mut st) = hpa2();
            st.now = 35;
            (sc, st)
        },
        vec![vec_d(1.0, &[0], &[]), None],
        vec![Some(("c5", 2, 0.639_457_020_769_207_4)), None],
    );
    add(
        "c5 boundary: done exactly at the deadline",
        {
            let (sc, mut st) = hpa2();
            st.now = 28;
            (sc, st)
        },
        vec![vec_d(1.0, &[0], &[]), None],
        vec![Some(("", 3, offload)), None],
    );
    add(
        "hold inside the deadline stays open",
        hpa2(),
        vec![Some(Decision::hold()), Some(Decision::hold())],
        vec![Some(("", 2, 0.8)), Some(("", 2, 0.8))],
    );
    add(
        "hold overrunning the deadline",
        {
            let (sc, mut st) = hpa2();
            st.now = 25;
            (sc, st)
        },
        vec![Some(Decision::hold()), None],
        vec![Some(("c5", 2, 0.682_496_902_584_595_5)), None],
    );
    add(
        "offload with no channel or no share",
        hpa2(),
        vec![vec_d(0.5, &[], &[]), vec_d(0.0, &[1], &[])],
        vec![Some(("c5", 2, -0.2)), Some(("c5", 2, -0.2))],
    );
    add(
        "critical task forced local",
        reward_cell([(Ca, 20.0), (Hpa, 20.0)]),
        vec![vec_d(1.0, &[0], &[]), None],
        vec![Some(("c5", 2, 0.167_879_441_171_442_32)), None],
    );
    cases
}

fn criterion_rewards() -> Verdict {
    let cases = reward_cases();
    let mut failures = Vec::new();
    for case in &cases {
        let a = assess(&case.scenario, &case.state, &case.decisions);
        for (k, (got, want)) in a.outcomes.iter().zip(&case.expected).enumerate() {
            let ok = match (got, want) {
                (None, None) => true,
                (Some(o), Some((labels, tier, reward))) => {
                    o.violations.labels() == *labels
                        && o.tier.level() == *tier
                        && (o.reward - reward).abs() <= 1e-9
                        && (o.tier == RewardTier::Satisfied) == (*tier == 3)
                }
                _ => false,
            };
            if !ok {
                failures.push(format!("{} (vehicle {k}): got {:?}", case.name, got.as_ref().map(|o| (o.violations.labels(), o.tier, o.reward))));
            }
        }
    }
    verdict(
        cases.len() == 20 && failures.is_empty(),
        if failures.is_empty() {
            format!("{} joint decisions match hand-computed reports and rewards to 1e-9", cases.len())
        } else {
            failures.join("; ")
        },
    )
}

// ---------------------------------------------------------------------------
// 5. gradients

fn criterion_gradients() -> Verdict {
    let start = Instant::now();
    let (mut critic, mut actor): (f64, f64) = (0.0, 0.0);
    for seed in 0..20 {
        let (c, a) = common::gradient_check(1000 + seed);
        critic = critic.max(c);
        actor = actor.max(a);
    }
    let elapsed = start.elapsed();
    verdict(
        critic < 1e-4 && actor < 1e-4 && elapsed < Duration::from_secs(10),
        format!(
            "20 random networks, worst relative error critic {critic:.2e}, actor {actor:.2e} (limit 1e-4), {:.2} s (limit 10 s)",
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------------------
// 6 to 8. training, baseline ordering, determinism

fn smoke_spec(seeds: Vec<u64>) -> ExperimentSpec {
    ExperimentSpec {
        name: "acceptance".into(),
        seeds,
        policies: PolicyKind::ALL.to_vec(),
        episodes_per_eval: 50,
        eval_steps: 100,
        trainer: TrainerConfig::default(),
        ..ExperimentSpec::default()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn criterion_convergence(root: &Path, spec: &ExperimentSpec, elapsed: Duration) -> Verdict {
    let point = &spec.points()[0].label;
    let mut improved = 0;
    let mut parts = Vec::new();
    for &seed in &spec.seeds {
        let log: Vec<TrainRow> = read_csv(&run_dir(root, point, PolicyKind::Learned, seed).join("train_log.csv")).unwrap();
        let tenth = log.len() / 10;
        let first = mean(&log[..tenth].iter().map(|r| r.moving_average).collect::<Vec<_>>());
        let last = mean(&log[log.len() - tenth..].iter().map(|r| r.moving_average).collect::<Vec<_>>());
        improved += usize::from(last > first);
        parts.push(format!("seed {seed}: {first:.3} -> {last:.3}"));
    }
    verdict(
        improved >= 4 && elapsed < Duration::from_secs(30 * 60),
        format!(
            "{improved}/{} seeds improve ({}), training {:.0} s (limit 1800 s)",
            spec.seeds.len(),
            parts.join(", "),
            secs(elapsed)
        ),
    )
}

fn criterion_ordering(root: &Path, spec: &ExperimentSpec) -> (Verdict, String) {
    let points = vec![spec.points()[0].label.clone()];
    let row = |baseline| {
        compare_policies(root, &points, &spec.seeds, &[PolicyKind::Learned], baseline).unwrap().rows[0].clone()
    };
    let (rd, al, av) = (row(PolicyKind::Rd), row(PolicyKind::Al), row(PolicyKind::Av));
    let describe = |r: &vecsim::harness::ComparisonRow| {
        format!(
            "{} {:.4} ± {:.4} J (delta {:+.4} ± {:.4}, not worse on {}/{} seeds)",
            r.baseline, r.baseline_energy_j, r.baseline_energy_j_std, r.delta_energy_j, r.delta_energy_j_std, r.energy_not_worse, r.seeds
        )
    };
    let pass = rd.energy_j <= rd.baseline_energy_j && al.energy_j <= al.baseline_energy_j;
    let av_note = format!(
        "learned vs AV (informational): {}; {}",
        describe(&av),
        if av.energy_j <= av.baseline_energy_j { "learned not worse" } else { "learned worse" }
    );
    (
        verdict(
            pass,
            format!("learned {:.4} ± {:.4} J per task; vs {}; vs {}", rd.energy_j, rd.energy_j_std, describe(&rd), describe(&al)),
        ),
        av_note,
    )
}

fn raw_files(root: &Path, spec: &ExperimentSpec) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for p in spec.points() {
        for policy in PolicyKind::ALL {
            for &seed in &spec.seeds {
                let dir = run_dir(root, &p.label, policy, seed);
                for name in ["records.csv", "train_log.csv", "checkpoint.json"] {
                    let path = dir.join(name);
                    if path.exists() {
                        out.push((path.strip_prefix(root).unwrap().display().to_string(), fs::read(&path).unwrap()));
                    }
                }
            }
        }
    }
    out
}

fn criterion_determinism(first: &Path, spec: &ExperimentSpec) -> Verdict {
    let again = tempfile::tempdir().unwrap();
    let mut rerun = spec.clone();
    rerun.seeds = vec![spec.seeds[0]];
    let ok = !run_experiment(&rerun, again.path(), Mode::Train).unwrap().has_failures()
        && !run_experiment(&rerun, again.path(), Mode::Evaluate).unwrap().has_failures();
    let fresh = raw_files(again.path(), &rerun);
    let reference: Vec<(String, Vec<u8>)> = raw_files(first, spec)
        .into_iter()
        .filter(|(p, _)| fresh.iter().any(|(q, _)| q == p))
        .collect();
    let identical = fresh == reference;
    let summary_same = fs::read(again.path().join("summary.csv")).is_ok();
    verdict(
        ok && identical && summary_same && fresh.len() == PolicyKind::ALL.len() + 2,
        format!(
            "train + evaluate rerun of seed {} reproduces {} raw files byte for byte: {identical}",
            rerun.seeds[0],
            fresh.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(u8, &str, Verdict)> = Vec::new();
    let mut report = |n: u8, name: &'static str, v: Verdict| {
        println!("criterion {n} [{}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        results.push((n, name, v));
    };

    report(1, "formula oracle equivalence", criterion_formulas());
    report(2, "threshold model", criterion_threshold());
    report(3, "oracle dominance", criterion_oracle());
    report(4, "constraint and reward fidelity", criterion_rewards());
    report(5, "gradient correctness", criterion_gradients());

    let root = tempfile::tempdir().unwrap();
    let spec = smoke_spec((0..5).collect());
    let start = Instant::now();
    let trained = run_experiment(&spec, root.path(), Mode::Train).unwrap();
    let train_time = start.elapsed();
    let evaluated = run_experiment(&spec, root.path(), Mode::Evaluate).unwrap();
    if trained.has_failures() || evaluated.has_failures() {
        let errors: Vec<String> = trained.runs.iter().chain(&evaluated.runs).filter_map(|r| r.error.clone()).collect();
        report(6, "convergence smoke", verdict(false, errors.join("; ")));
    } else {
        report(6, "convergence smoke", criterion_convergence(root.path(), &spec, train_time));
        let (ordering, av_note) = criterion_ordering(root.path(), &spec);
        report(7, "directional baseline ordering", ordering);
        println!("            {av_note}");
        report(8, "determinism", criterion_determinism(root.path(), &spec));
    }

    let failed: Vec<u8> = results.iter().filter(|(_, _, v)| !v.pass).map(|(n, _, _)| *n).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if failed.is_empty() && results.len() == 8 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
