use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;

use super::config::{parse_config, SimConfig};
use super::{Command, Common};
use crate::dynamics::{assemble_system, normal_modes, Coord, VehicleState};
use crate::error::{Error, Result};
use crate::executor::{
    build_table, group_step_body, implied_divisors, measure_wcet, ExecutionReport, ExecutorOptions, ExecutorRegistry,
    WcetEstimate, Workload,
};
use crate::integrator::{compare_trajectories, simulate_seeded, DeviationReport, Group, RateGroups, Trajectory};
use crate::optimizer::{search_space, SolverOptions, SolverRegistry, SolverReport, MAX_ENUMERATION};
use crate::schedule::SchedulingProblem;

pub const CSV_HEADER: &str = "t,z_k,phi_k,z_1,phi_1,z_2,phi_2";

pub(super) enum Status {
    Success,
    /// The command ran but its check failed.
    Failure(String),
}

fn load(common: &Common) -> Result<SimConfig> {
    let mut config = match &common.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => SimConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
        if let Some(abc) = &mut config.abc {
            abc.seed = seed;
        }
    }
    if let Some(d) = common.duration {
        config.integration.duration = d;
    }
    if let Some(d) = common.divisors {
        config.integration.divisors = d;
    }
    config.validate()?;
    Ok(config)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

/// Trajectory as CSV: fixed header, shortest round-trip floats, `\n` lines.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.len() * 120);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (t, s) in traj.times.iter().zip(&traj.states) {
        write!(out, "{t:?}").unwrap();
        for c in Coord::ALL {
            write!(out, ",{:?}", s.displacement(c)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Gnuplot script plotting `data` (a trajectory CSV in the same directory).
pub fn plot_script(data: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 't [s]'\n\
         set multiplot layout 2,1\n\
         set ylabel 'displacement [m]'\n\
         plot '{data}' using 1:2 with lines, '' using 1:4 with lines, '' using 1:6 with lines\n\
         set ylabel 'pitch [rad]'\n\
         plot '{data}' using 1:3 with lines, '' using 1:5 with lines, '' using 1:7 with lines\n\
         unset multiplot\n"
    )
}

fn write_trajectory(dir: &Path, traj: &Trajectory) -> Result<()> {
    write(dir, "trajectory.csv", &trajectory_csv(traj))?;
    write(dir, "plot.gp", &plot_script("trajectory.csv"))
}

fn simulate(common: &Common) -> Result<Status> {
    let c = load(common)?;
    let traj = simulate_seeded(&c.vehicle, &c.track, &c.integration, &VehicleState::zero(), c.seed)?;
    write_trajectory(&common.out, &traj)?;
    println!(
        "wrote {} samples to {}",
        traj.len(),
        common.out.join("trajectory.csv").display()
    );
    Ok(Status::Success)
}

#[derive(Serialize)]
struct VerifyReport {
    divisors: [u32; 3],
    tolerance: f64,
    within_tolerance: bool,
    worst_relative: f64,
    deviation: DeviationReport,
}

fn verify(common: &Common, tolerance: f64) -> Result<Status> {
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(Error::parameter(
            "tolerance",
            format!("must be finite and >= 0, got {tolerance}"),
        ));
    }
    let c = load(common)?;
    let init = VehicleState::zero();
    let multi = simulate_seeded(&c.vehicle, &c.track, &c.integration, &init, c.seed)?;
    let mut uniform = c.integration;
    uniform.divisors = RateGroups::uniform();
    let reference = simulate_seeded(&c.vehicle, &c.track, &uniform, &init, c.seed)?;
    let deviation = compare_trajectories(&reference, &multi)?;
    let report = VerifyReport {
        divisors: c.integration.divisors.divisors(),
        tolerance,
        within_tolerance: deviation.within(tolerance),
        worst_relative: deviation.worst_relative(),
        deviation,
    };
    write(&common.out, "deviation.json", &to_json(&report))?;
    println!(
        "worst relative deviation {:?} (tolerance {tolerance:?})",
        report.worst_relative
    );
    Ok(if report.within_tolerance {
        Status::Success
    } else {
        Status::Failure(format!(
            "deviation {} exceeds tolerance {tolerance}",
            report.worst_relative
        ))
    })
}

#[derive(Serialize)]
struct ScheduleOutput {
    problem: SchedulingProblem,
    result: SolverReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<SolverReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matches_oracle: Option<bool>,
}

fn solve(c: &SimConfig, solver: &str) -> Result<(SchedulingProblem, SolverReport)> {
    let problem = c.scheduling_problem();
    let options = SolverOptions { abc: c.abc_params() };
    let report = SolverRegistry::default().create(solver, &options)?.solve(&problem)?;
    Ok((problem, report))
}

fn schedule(common: &Common, solver: &str) -> Result<Status> {
    let c = load(common)?;
    let (problem, result) = solve(&c, solver)?;
    let oracle = if solver != "brute-force" && search_space(&problem) <= MAX_ENUMERATION {
        Some(
            SolverRegistry::default()
                .create("brute-force", &SolverOptions::default())?
                .solve(&problem)?,
        )
    } else {
        None
    };
    let matches_oracle = oracle.as_ref().map(|o| (o.objective - result.objective).abs() <= 1e-9);
    println!("{}: F = {:?}", result.solver, result.objective);
    if let Some(o) = &oracle {
        println!("brute-force: F = {:?}", o.objective);
    }
    let table = build_table(&problem, &result.solution, None)?;
    write(&common.out, "schedule_table.txt", &table.render_text())?;
    write(
        &common.out,
        "solution.json",
        &to_json(&ScheduleOutput {
            problem,
            result,
            oracle,
            matches_oracle,
        }),
    )?;
    Ok(Status::Success)
}

fn eigen(common: &Common) -> Result<Status> {
    let c = load(common)?;
    let modes = normal_modes(&assemble_system(&c.vehicle)?)?;
    for (k, m) in modes.iter().enumerate() {
        let body = if m.is_carriage_dominated() {
            "carriage"
        } else {
            "trolley"
        };
        println!("{} {:?} Hz {body}", k + 1, m.frequency_hz);
    }
    Ok(Status::Success)
}

#[derive(Serialize)]
struct TaskEstimate {
    task: &'static str,
    #[serde(flatten)]
    estimate: WcetEstimate,
}

fn measure(common: &Common, iterations: u64, warmup: u64) -> Result<Status> {
    let c = load(common)?;
    for g in Group::ALL {
        let body = group_step_body(g, c.vehicle, c.track, c.integration.h);
        let estimate = measure_wcet(body, iterations, warmup)?;
        let line = serde_json::to_string(&TaskEstimate {
            task: g.name(),
            estimate,
        })
        .expect("serializable");
        println!("{line}");
    }
    Ok(Status::Success)
}

fn execute(common: &Common, executor: &str, solver: &str) -> Result<Status> {
    let c = load(common)?;
    let (problem, solved) = solve(&c, solver)?;
    let table = build_table(&problem, &solved.solution, None)?;
    let mut workload = Workload::from_problem(&problem, c.vehicle, c.track, c.integration);
    workload.seed = c.seed;
    workload.settings.divisors = implied_divisors(&table, &workload.bindings)?;
    let options = ExecutorOptions {
        wall_duration: Duration::from_secs_f64(c.integration.duration),
    };
    let outcome = ExecutorRegistry::default()
        .create(executor, &options)?
        .run(&table, &workload)?;
    write_trajectory(&common.out, &outcome.trajectory)?;
    write(&common.out, "schedule_table.txt", &table.render_text())?;
    write(&common.out, "execution_report.json", &to_json(&outcome.report))?;
    summarize(&outcome.report, workload.settings.divisors);
    Ok(Status::Success)
}

fn summarize(report: &ExecutionReport, divisors: RateGroups) {
    println!(
        "{} run: {} frames, divisors {:?}, {} activations, {} deadline misses",
        report.executor,
        report.frames,
        divisors.divisors(),
        report.total_activations(),
        report.total_misses()
    );
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
}

pub(super) fn dispatch(command: Command) -> Result<Status> {
    match command {
        Command::Simulate { common } => simulate(&common),
        Command::Verify { common, tolerance } => verify(&common, tolerance),
        Command::Schedule { common, solver } => schedule(&common, &solver),
        Command::Eigen { common } => eigen(&common),
        Command::Measure {
            common,
            iterations,
            warmup,
        } => measure(&common, iterations, warmup),
        Command::Execute {
            common,
            executor,
            solver,
        } => execute(&common, &executor, &solver),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{simulate, IntegrationSettings};

    #[test]
    fn csv_layout() {
        let settings = IntegrationSettings {
            duration: 0.01,
            ..Default::default()
        };
        let traj = simulate(
            &Default::default(),
            &Default::default(),
            &settings,
            &VehicleState::zero(),
        )
        .unwrap();
        let csv = trajectory_csv(&traj);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("0.0,0.0,0.0,0.0,0.0,0.0,0.0"));
        assert_eq!(csv.lines().count(), traj.len() + 1);
        assert!(!csv.contains('\r'));
        let times: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        for (line, s) in csv.lines().skip(1).zip(&traj.states) {
            let z: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(z, s.displacement(Coord::Zk));
        }
    }

    #[test]
    fn plot_script_reads_csv() {
        let s = plot_script("trajectory.csv");
        assert!(s.starts_with("set datafile separator ','\n"));
        assert!(s.contains("plot 'trajectory.csv' using 1:2"));
    }
}
