use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{
    effective_period, hyperperiod, validate_solution, BlockPlan, ScheduleSolution, SchedulingProblem, TimeUnit,
};

/// One planned execution of a task block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub core: usize,
    /// RT-cycle index on `core` within the hyperperiod.
    pub cycle: u64,
    pub task: usize,
    pub task_id: String,
    pub block: usize,
    pub release: u64,
    /// Release plus the task's effective period.
    pub deadline: u64,
    /// Planned start in table time units.
    pub start: f64,
    pub length: f64,
}

impl Slot {
    pub fn end(&self) -> f64 {
        self.start + self.length
    }
}

/// Cyclic schedule over one hyperperiod.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleTable {
    pub time_unit: TimeUnit,
    pub cycle_lengths: Vec<u64>,
    pub hyperperiod: u64,
    pub task_ids: Vec<String>,
    pub task_cores: Vec<usize>,
    pub effective_periods: Vec<u64>,
    /// Blocks per job of each task.
    pub block_counts: Vec<usize>,
    /// Ordered by planned start, then core.
    pub slots: Vec<Slot>,
}

impl ScheduleTable {
    pub fn task_index(&self, id: &str) -> Option<usize> {
        self.task_ids.iter().position(|t| t == id)
    }

    /// Jobs of `task` per hyperperiod (first blocks only).
    pub fn jobs_of(&self, task: usize) -> usize {
        self.slots.iter().filter(|s| s.task == task && s.block == 0).count()
    }

    pub fn core_slots(&self, core: usize) -> impl Iterator<Item = &Slot> + '_ {
        self.slots.iter().filter(move |s| s.core == core)
    }

    /// Cores that hold at least one task.
    pub fn used_cores(&self) -> Vec<usize> {
        let mut cores = self.task_cores.clone();
        cores.sort_unstable();
        cores.dedup();
        cores
    }

    /// One line per slot: core, cycle, task, block, release, deadline, start.
    pub fn render_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ScheduleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# core cycle task block release deadline start")?;
        for s in &self.slots {
            writeln!(
                f,
                "{} {} {} {} {} {} {:?}",
                s.core, s.cycle, s.task_id, s.block, s.release, s.deadline, s.start
            )?;
        }
        Ok(())
    }
}

fn block_lengths(
    problem: &SchedulingProblem,
    sol: &ScheduleSolution,
    blocks: Option<&BlockPlan>,
) -> Result<Vec<Vec<f64>>> {
    let m = problem.task_count();
    let Some(plan) = blocks else {
        return Ok((0..m)
            .map(|i| vec![problem.wcet(i, sol.core_of(i).expect("validated"))])
            .collect());
    };
    if plan.entries.len() != m {
        return Err(Error::Config(format!(
            "block plan has {} entries for {m} tasks",
            plan.entries.len()
        )));
    }
    plan.entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let tau = problem.wcet(i, sol.core_of(i).expect("validated"));
            let total: f64 = e.blocks.iter().sum();
            if e.blocks.is_empty() || (total - tau).abs() > 1e-9 * tau {
                return Err(Error::Config(format!(
                    "blocks of task `{}` sum to {total}, expected its WCET {tau}",
                    problem.tasks[i].id
                )));
            }
            Ok(e.blocks.clone())
        })
        .collect()
}

/// Lays out every job over one hyperperiod. Jobs are released at multiples
/// of the effective period; block `k` of a job runs in the `k`-th RT-cycle
/// after its release. Inside an RT-cycle, blocks run back to back in order
/// of deadline, then task id.
pub fn build_table(
    problem: &SchedulingProblem,
    sol: &ScheduleSolution,
    blocks: Option<&BlockPlan>,
) -> Result<ScheduleTable> {
    problem.validate()?;
    let violations = validate_solution(problem, sol);
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    let m = problem.task_count();
    let task_cores: Vec<usize> = (0..m).map(|i| sol.core_of(i).expect("validated")).collect();
    let effective_periods = (0..m)
        .map(|i| effective_period(problem.period(i), sol.cycle_lengths[task_cores[i]]))
        .collect::<Result<Vec<_>>>()?;
    let lengths = block_lengths(problem, sol, blocks)?;
    for i in 0..m {
        let cycles = effective_periods[i] / sol.cycle_lengths[task_cores[i]];
        if lengths[i].len() as u64 > cycles {
            return Err(Error::InfeasibleSplit(format!(
                "task `{}` needs {} RT-cycles but its effective period holds {cycles}",
                problem.tasks[i].id,
                lengths[i].len()
            )));
        }
    }
    let t_c = hyperperiod(&effective_periods)?;

    let mut slots = Vec::new();
    for core in 0..problem.cores {
        let resident: Vec<usize> = (0..m).filter(|&i| task_cores[i] == core).collect();
        if resident.is_empty() {
            continue;
        }
        let l = sol.cycle_lengths[core];
        for cycle in 0..t_c / l {
            let cycle_start = cycle * l;
            let mut due: Vec<(usize, usize, u64)> = resident
                .iter()
                .filter_map(|&i| {
                    let eff = effective_periods[i];
                    let release = cycle_start / eff * eff;
                    let block = ((cycle_start - release) / l) as usize;
                    (block < lengths[i].len()).then_some((i, block, release))
                })
                .collect();
            due.sort_by(|a, b| {
                let da = a.2 + effective_periods[a.0];
                let db = b.2 + effective_periods[b.0];
                da.cmp(&db)
                    .then_with(|| problem.tasks[a.0].id.cmp(&problem.tasks[b.0].id))
                    .then(a.0.cmp(&b.0))
            });
            let demand: f64 = due.iter().map(|&(i, k, _)| lengths[i][k]).sum();
            if demand > l as f64 * (1.0 + 1e-12) {
                return Err(Error::TableOverflow {
                    core,
                    cycle,
                    demand,
                    capacity: l,
                });
            }
            let mut offset = 0.0;
            for (i, block, release) in due {
                let length = lengths[i][block];
                slots.push(Slot {
                    core,
                    cycle,
                    task: i,
                    task_id: problem.tasks[i].id.clone(),
                    block,
                    release,
                    deadline: release + effective_periods[i],
                    start: cycle_start as f64 + offset,
                    length,
                });
                offset += length;
            }
        }
    }
    slots.sort_by(|a, b| match a.start.total_cmp(&b.start) {
        Ordering::Equal => a.core.cmp(&b.core),
        o => o,
    });

    Ok(ScheduleTable {
        time_unit: problem.time_unit,
        cycle_lengths: sol.cycle_lengths.clone(),
        hyperperiod: t_c,
        task_ids: problem.tasks.iter().map(|t| t.id.clone()).collect(),
        task_cores,
        effective_periods,
        block_counts: lengths.iter().map(Vec::len).collect(),
        slots,
    })
}
