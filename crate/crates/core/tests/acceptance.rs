//! Acceptance suite: one PASS/FAIL line per criterion. Criterion 9 depends on
//! the machine and never fails the run.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use railsim::dynamics::{
    assemble_system, excitation, normal_modes, rhs, Coord, TrackExcitation, VehicleParams, VehicleState,
};
use railsim::executor::{build_table, implied_divisors, run_logical, run_realtime, ScheduleTable, Workload};
use railsim::integrator::{compare_trajectories, simulate, Group, IntegrationSettings, RateGroups};
use railsim::optimizer::{brute_force, optimize, AbcParams};
use railsim::schedule::{
    effective_period, hyperperiod, objective, split_blocks, utilization_feasible, validate_solution, ScheduleSolution,
    SchedulingProblem, TaskLoad, TaskSpec, TimeUnit, Violation,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

type Mat = [[f64; 6]; 6];

fn to_array(m: &railsim::dynamics::Matrix6) -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// Negative pivots of the LDLᵀ factorization of `a`; equals the number of
/// negative eigenvalues when no pivot vanishes.
fn negative_pivots(a: &Mat) -> Option<usize> {
    let mut l = [[0.0; 6]; 6];
    let mut d = [0.0; 6];
    for j in 0..6 {
        d[j] = a[j][j] - (0..j).map(|k| l[j][k] * l[j][k] * d[k]).sum::<f64>();
        if d[j].abs() < 1e-300 {
            return None;
        }
        l[j][j] = 1.0;
        for i in j + 1..6 {
            l[i][j] = (a[i][j] - (0..j).map(|k| l[i][k] * l[j][k] * d[k]).sum::<f64>()) / d[j];
        }
    }
    Some(d.iter().filter(|&&x| x < 0.0).count())
}

#[allow(clippy::needless_range_loop)]
fn criterion_1() -> Check {
    let start = Instant::now();
    let sys = assemble_system(&VehicleParams::default()).map_err(|e| e.to_string())?;
    let c = to_array(&sys.damping);
    let k = to_array(&sys.stiffness);
    let mut worst_asym = 0.0f64;
    for m in [&c, &k] {
        let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        for i in 0..6 {
            for j in 0..6 {
                worst_asym = worst_asym.max((m[i][j] - m[j][i]).abs() / scale);
            }
        }
    }
    ensure(worst_asym <= 1e-12, format!("asymmetry {worst_asym:e}"))?;
    ensure(negative_pivots(&k) == Some(0), "K is not positive definite")?;

    let p = VehicleParams::default();
    let track = TrackExcitation::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let q: [f64; 6] = std::array::from_fn(|_| rng.random_range(-0.05..0.05));
        let v: [f64; 6] = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
        let state = VehicleState::new(q, v).unwrap();
        let exc = excitation(rng.random_range(0.0..5.0), &track, p.geometry()).unwrap();
        let explicit = rhs(&state, &exc, &p).unwrap();
        let matrix = sys.accelerations(&state, &exc);
        let scale = matrix.amax().max(1e-300);
        for c in Coord::ALL {
            worst = worst.max((explicit.acceleration(c) - matrix[c.index()]).abs() / scale);
        }
    }
    ensure(worst <= 1e-10, format!("rhs vs matrix form {worst:e}"))?;
    let took = within_time(start, Duration::from_secs(1))?;
    Ok(format!("asymmetry {worst_asym:e}, rhs mismatch {worst:e}, {took:?}"))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let p = VehicleParams::default();
    let sys = assemble_system(&p).map_err(|e| e.to_string())?;
    let modes = normal_modes(&sys).map_err(|e| e.to_string())?;
    let f: Vec<f64> = modes.iter().map(|m| m.frequency_hz).collect();
    ensure(
        f[..2].iter().all(|&x| (0.2..=2.6).contains(&x)),
        format!("two lowest frequencies {:?} outside 0.2..2.6 Hz", &f[..2]),
    )?;
    let carriage_max = modes
        .iter()
        .filter(|m| m.is_carriage_dominated())
        .map(|m| m.frequency_hz)
        .fold(f64::MIN, f64::max);
    let trolley_min = modes
        .iter()
        .filter(|m| !m.is_carriage_dominated())
        .map(|m| m.frequency_hz)
        .fold(f64::MAX, f64::min);
    ensure(
        trolley_min > carriage_max,
        format!("trolley mode {trolley_min} <= carriage mode {carriage_max}"),
    )?;

    // Independent inertia count on M^-1/2 K M^-1/2 - w^2 I.
    let k = to_array(&sys.stiffness);
    let count_below = |hz: f64| {
        let w2 = (2.0 * std::f64::consts::PI * hz).powi(2);
        let a: Mat = std::array::from_fn(|i| {
            std::array::from_fn(|j| k[i][j] / (sys.mass[i] * sys.mass[j]).sqrt() - if i == j { w2 } else { 0.0 })
        });
        negative_pivots(&a)
    };
    ensure(count_below(0.2) == Some(0), "an eigenvalue lies below 0.2 Hz")?;
    ensure(
        count_below(2.6).is_some_and(|n| n >= 2),
        "fewer than two modes below 2.6 Hz",
    )?;
    let took = within_time(start, Duration::from_secs(1))?;
    Ok(format!(
        "f1 = {:.4} Hz, f2 = {:.4} Hz, first trolley mode {trolley_min:.4} Hz, {took:?}",
        f[0], f[1]
    ))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let p = VehicleParams::default();
    let track = TrackExcitation {
        v: 20.0,
        ..Default::default()
    };
    let multi = IntegrationSettings {
        h: 1e-4,
        duration: 10.0,
        divisors: RateGroups::new([5, 1, 1]).unwrap(),
        output_stride: 1,
    };
    let uniform = IntegrationSettings {
        divisors: RateGroups::uniform(),
        ..multi
    };
    let init = VehicleState::zero();
    let a = simulate(&p, &track, &uniform, &init).map_err(|e| e.to_string())?;
    let b = simulate(&p, &track, &multi, &init).map_err(|e| e.to_string())?;
    let report = compare_trajectories(&a, &b).map_err(|e| e.to_string())?;
    ensure(report.within(0.02), format!("deviation {:?}", report.relative_to_peak))?;
    let took = within_time(start, Duration::from_secs(30))?;
    Ok(format!(
        "worst deviation {:.3}% of peak, {took:?}",
        100.0 * report.worst_relative()
    ))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let p = VehicleParams::default();
    let track = TrackExcitation::default();
    let run = |h: f64| {
        let settings = IntegrationSettings {
            h,
            duration: 1.0,
            divisors: RateGroups::uniform(),
            output_stride: 1000,
        };
        let traj = simulate(&p, &track, &settings, &VehicleState::zero()).unwrap();
        assert_eq!(*traj.times.last().unwrap(), 1.0);
        *traj.last().unwrap()
    };
    let reference = run(1e-6);
    let error = |s: VehicleState| {
        s.displacements()
            .iter()
            .chain(s.velocities())
            .zip(reference.displacements().iter().chain(reference.velocities()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let coarse = error(run(2e-4));
    let fine = error(run(1e-4));
    let ratio = coarse / fine;
    ensure((ratio - 2.0).abs() <= 0.3, format!("error ratio {ratio}"))?;
    let took = within_time(start, Duration::from_secs(60))?;
    Ok(format!("errors {coarse:.3e} -> {fine:.3e}, ratio {ratio:.3}, {took:?}"))
}

fn one_task(period: u64, wcet: f64, p: f64) -> SchedulingProblem {
    SchedulingProblem {
        time_unit: TimeUnit::Microseconds,
        cores: 1,
        switch_cost: p,
        tasks: vec![TaskSpec::new("a", period, vec![wcet])],
    }
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let ep = |t, l| effective_period(t, l).unwrap();
    ensure(ep(10, 1) == 10 && ep(10, 3) == 9 && ep(7, 7) == 7, "effective_period")?;
    ensure(effective_period(3, 4).is_err(), "effective_period accepts L > T")?;
    let hp = |v: &[u64]| hyperperiod(v).unwrap();
    ensure(
        hp(&[2, 3]) == 6 && hp(&[4, 4, 4]) == 4 && hp(&[6, 10, 15]) == 30,
        "hyperperiod",
    )?;
    ensure(
        hyperperiod(&[u64::MAX, u64::MAX - 1]).is_err(),
        "hyperperiod overflow not reported",
    )?;

    let f = |p, l| objective(&one_task(10, 1.0, p), &ScheduleSolution::from_cores(&[0], vec![l])).unwrap();
    let values = [f(0.0, 10), f(0.01, 10), f(0.01, 4)];
    ensure(values == [0.0, 0.001, 0.0275], format!("objective values {values:?}"))?;

    let empty = utilization_feasible(&[]);
    ensure(empty.feasible && empty.utilization == 0.0, "empty task set")?;
    let boundary = utilization_feasible(&[TaskLoad { wcet: 1.0, period: 2.0 }; 2]);
    ensure(
        boundary.feasible && boundary.utilization == 1.0,
        "boundary sum 1 rejected",
    )?;
    let paper = utilization_feasible(&[
        TaskLoad {
            wcet: 18.0,
            period: 100.0,
        },
        TaskLoad {
            wcet: 18.0,
            period: 100.0,
        },
        TaskLoad {
            wcet: 17.0,
            period: 500.0,
        },
    ]);
    ensure(
        paper.feasible && (paper.utilization - 0.394).abs() <= 1e-15,
        format!("three-task utilization {}", paper.utilization),
    )?;

    let blocks = |t, d| split_blocks(t, d, 10).unwrap().blocks;
    ensure(
        blocks(4.0, 1.0) == [4.0] && blocks(4.0, 0.25) == [1.0; 4],
        "split_blocks exact cases",
    )?;
    let b = blocks(5.0, 0.4);
    ensure(
        b.len() == 3 && (b[0] - 2.0).abs() < 1e-12 && (b[1] - 2.0).abs() < 1e-12 && (b[2] - 1.0).abs() < 1e-12,
        format!("split 5 by 0.4 gave {b:?}"),
    )?;

    let mut overloaded = one_task(5, 3.0, 0.1);
    overloaded.tasks.push(TaskSpec::new("b", 5, vec![3.0]));
    let v = validate_solution(&overloaded, &ScheduleSolution::from_cores(&[0, 0], vec![5]));
    ensure(
        matches!(v.as_slice(), [Violation::CoreLoad { core: 0, quantized, .. }] if (quantized - 1.2).abs() < 1e-12),
        format!("overload violations {v:?}"),
    )?;
    let took = within_time(start, Duration::from_secs(1))?;
    Ok(format!("all worked values reproduced, {took:?}"))
}

fn random_instance(rng: &mut ChaCha8Rng) -> SchedulingProblem {
    let cores = rng.random_range(1..=2);
    let tasks = rng.random_range(1..=4);
    SchedulingProblem {
        time_unit: TimeUnit::Microseconds,
        cores,
        switch_cost: rng.random_range(0.01..1.0),
        tasks: (0..tasks)
            .map(|i| {
                let period = rng.random_range(1..=20u64);
                let wcet = (0..cores)
                    .map(|_| rng.random_range(0.05..0.4) * period as f64)
                    .collect();
                TaskSpec::new(format!("t{i}"), period, wcet)
            })
            .collect(),
    }
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut matched = 0;
    let mut misses = Vec::new();
    let mut instances = 0;
    while instances < 20 {
        let problem = random_instance(&mut rng);
        // Only instances with a feasible optimum take part.
        let Ok(oracle) = brute_force(&problem) else { continue };
        instances += 1;
        let params = AbcParams {
            seed: instances,
            ..Default::default()
        };
        let out = optimize(&problem, &params).map_err(|e| e.to_string())?;
        ensure(
            out.objective >= oracle.objective - 1e-12,
            "ABC beat the exhaustive optimum",
        )?;
        if (out.objective - oracle.objective).abs() <= 1e-9 {
            matched += 1;
        } else {
            misses.push((instances, out.objective, oracle.objective));
        }
    }
    ensure(matched >= 18, format!("{matched}/20 matched; misses {misses:?}"))?;
    let took = within_time(start, Duration::from_secs(10))?;
    Ok(format!("{matched}/20 instances match the oracle, {took:?}"))
}

fn paper_problem(unit: TimeUnit, carriage: u64, trolley: u64, wcet: [f64; 3]) -> SchedulingProblem {
    SchedulingProblem {
        time_unit: unit,
        cores: 3,
        switch_cost: 1.0,
        tasks: Group::ALL
            .iter()
            .zip([carriage, trolley, trolley])
            .zip(wcet)
            .map(|((&g, t), w)| TaskSpec::new(g.name(), t, vec![w; 3]).with_group(g))
            .collect(),
    }
}

fn table_invariants(table: &ScheduleTable) -> Result<(), String> {
    for core in table.used_cores() {
        let slots: Vec<_> = table.core_slots(core).collect();
        for w in slots.windows(2) {
            ensure(
                w[0].end() <= w[1].start + 1e-9,
                format!("overlap on core {core} at {}", w[1].start),
            )?;
        }
        let l = table.cycle_lengths[core];
        let mut per_cycle = BTreeMap::new();
        for s in &slots {
            *per_cycle.entry(s.cycle).or_insert(0.0) += s.length;
        }
        ensure(
            per_cycle.values().all(|&d| d <= l as f64 + 1e-9),
            format!("cycle overrun on core {core}"),
        )?;
    }
    for (i, &eff) in table.effective_periods.iter().enumerate() {
        ensure(
            table.jobs_of(i) as u64 == table.hyperperiod / eff,
            format!("task {i} has {} jobs", table.jobs_of(i)),
        )?;
    }
    ensure(
        table.slots.iter().all(|s| s.deadline <= table.hyperperiod),
        "deadline beyond hyperperiod",
    )
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    for (carriage, expected) in [(100, [1, 1, 1]), (500, [5, 1, 1])] {
        let problem = paper_problem(TimeUnit::Microseconds, carriage, 100, [17.0, 18.0, 18.0]);
        let sol = ScheduleSolution::from_cores(&[0, 1, 2], vec![carriage, 100, 100]);
        let table = build_table(&problem, &sol, None).map_err(|e| e.to_string())?;
        table_invariants(&table)?;
        let mut w = Workload::from_problem(
            &problem,
            VehicleParams::default(),
            TrackExcitation::default(),
            IntegrationSettings::default(),
        );
        w.settings.divisors = implied_divisors(&table, &w.bindings).map_err(|e| e.to_string())?;
        ensure(
            w.settings.divisors.divisors() == expected,
            format!("divisors {:?}", w.settings.divisors),
        )?;
        let logical = run_logical(&table, &w).map_err(|e| e.to_string())?;
        let reference = simulate(&w.vehicle, &w.track, &w.settings, &w.initial).map_err(|e| e.to_string())?;
        ensure(
            logical.trajectory == reference,
            format!("trajectory differs for divisors {expected:?}"),
        )?;
        ensure(logical.report.total_misses() == 0, "logical run reported misses")?;
        notes.push(format!("{expected:?} bit-identical ({} samples)", reference.len()));
    }
    // Table invariants on a shared core with several rates.
    let mixed = SchedulingProblem {
        time_unit: TimeUnit::Microseconds,
        cores: 2,
        switch_cost: 0.1,
        tasks: vec![
            TaskSpec::new("a", 12, vec![1.0, 1.0]),
            TaskSpec::new("b", 8, vec![1.5, 1.5]),
            TaskSpec::new("c", 6, vec![0.5, 0.5]),
            TaskSpec::new("d", 20, vec![2.0, 2.0]),
        ],
    };
    let table = build_table(&mixed, &ScheduleSolution::from_cores(&[0, 0, 0, 1], vec![4, 5]), None)
        .map_err(|e| e.to_string())?;
    table_invariants(&table)?;
    let took = within_time(start, Duration::from_secs(30))?;
    Ok(format!("{}; table invariants hold, {took:?}", notes.join(", ")))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_railsim"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.success(),
        format!("railsim {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)),
    )
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"seed": 17, "integration": {"duration": 5.0}}"#).map_err(|e| e.to_string())?;
    let config = config.to_str().unwrap();
    let runs: Vec<_> = ["a", "b"].iter().map(|n| dir.path().join(n)).collect();
    for out in &runs {
        let out = out.to_str().unwrap();
        run_cli(&["simulate", "--config", config, "--seed", "17", "--out", out])?;
        run_cli(&["schedule", "--config", config, "--seed", "17", "--out", out])?;
    }
    let read = |d: &Path, f: &str| fs::read(d.join(f)).map_err(|e| e.to_string());
    for file in ["trajectory.csv", "solution.json"] {
        let (a, b) = (read(&runs[0], file)?, read(&runs[1], file)?);
        ensure(!a.is_empty() && a == b, format!("{file} differs between runs"))?;
    }
    let took = within_time(start, Duration::from_secs(30))?;
    Ok(format!("trajectory.csv and solution.json byte-identical, {took:?}"))
}

fn criterion_9() -> Check {
    let secs: f64 = std::env::var("RAILSIM_RT_SECONDS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(10.0);
    let problem = paper_problem(TimeUnit::Milliseconds, 50, 10, [0.017, 0.018, 0.018]);
    let sol = ScheduleSolution::from_cores(&[0, 1, 2], vec![50, 10, 10]);
    let table = build_table(&problem, &sol, None).map_err(|e| e.to_string())?;
    let mut w = Workload::from_problem(
        &problem,
        VehicleParams::default(),
        TrackExcitation::default(),
        IntegrationSettings::default(),
    );
    w.settings.divisors = implied_divisors(&table, &w.bindings).map_err(|e| e.to_string())?;
    let rt = run_realtime(&table, &w, Duration::from_secs_f64(secs)).map_err(|e| e.to_string())?;
    w.settings.duration = rt.report.frames as f64 * w.settings.h;
    let logical = run_logical(&table, &w).map_err(|e| e.to_string())?;
    let misses = rt.report.total_misses();
    let jobs = rt.report.total_activations();
    let rate = misses as f64 / jobs as f64;
    let same = rt.trajectory.same_samples(&logical.trajectory);
    let summary = format!(
        "{misses}/{jobs} deadline misses ({:.3}%), numerics identical: {same}, {secs} s wall{}",
        100.0 * rate,
        if rt.report.warnings.is_empty() {
            String::new()
        } else {
            format!(", warnings: {}", rt.report.warnings.join("; "))
        }
    );
    if rate < 0.01 && same {
        Ok(summary)
    } else {
        Err(summary)
    }
}

/// Number, name, check and whether it gates the exit status.
type Criterion = (u32, &'static str, fn() -> Check, bool);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "model structure", criterion_1, true),
        (2, "frequency range", criterion_2, true),
        (3, "multi-rate fidelity", criterion_3, true),
        (4, "Euler order", criterion_4, true),
        (5, "scheduling math", criterion_5, true),
        (6, "optimizer vs oracle", criterion_6, true),
        (7, "executor equivalence", criterion_7, true),
        (8, "CLI determinism", criterion_8, true),
        (9, "realtime run (informational)", criterion_9, false),
    ];
    let mut failed = 0;
    for (n, name, check, gating) in criteria {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match (result, gating) {
            (Ok(detail), _) => println!("PASS criterion {n} ({name}): {detail}"),
            (Err(detail), true) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {detail}");
            }
            (Err(detail), false) => println!("INFO criterion {n} ({name}) not met: {detail}"),
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
