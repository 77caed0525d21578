use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::problem::{ScheduleSolution, SchedulingProblem};
use crate::error::{Error, Result};

/// One task's demand for the utilization test: WCET over period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskLoad {
    pub wcet: f64,
    pub period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Utilization {
    pub feasible: bool,
    pub utilization: f64,
}

/// Necessary condition for a cyclic schedule on one core: Σ τ/T ≤ 1.
pub fn utilization_feasible(tasks: &[TaskLoad]) -> Utilization {
    let utilization: f64 = tasks.iter().map(|t| t.wcet / t.period).sum();
    Utilization {
        feasible: utilization <= 1.0,
        utilization,
    }
}

/// Largest multiple of the RT-cycle `cycle` not exceeding `period`.
pub fn effective_period(period: u64, cycle: u64) -> Result<u64> {
    if cycle == 0 || cycle > period {
        return Err(Error::Bound(format!(
            "RT-cycle length {cycle} must be in 1..={period} (the task period)"
        )));
    }
    Ok(cycle * (period / cycle))
}

/// Least common multiple of the periods, with overflow reported.
pub fn hyperperiod(periods: &[u64]) -> Result<u64> {
    if periods.is_empty() {
        return Err(Error::Bound("hyperperiod of an empty period list".into()));
    }
    periods.iter().try_fold(1u64, |acc, &p| {
        if p == 0 {
            return Err(Error::Bound("periods must be >= 1".into()));
        }
        (acc / acc.gcd(&p))
            .checked_mul(p)
            .ok_or_else(|| Error::Capacity(format!("hyperperiod overflows u64 at period {p}")))
    })
}

/// A broken constraint of a candidate schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    /// Matrix or vector dimensions do not match the problem.
    Shape { detail: String },
    /// An assignment entry other than 0 or 1.
    Binary { task: usize, core: usize, value: u8 },
    /// A task must run on exactly one core.
    SingleCore { task: usize, cores: usize },
    /// All tasks must be placed.
    Coverage { assigned: usize, expected: usize },
    /// RT-cycle length must be a natural number not above the smallest
    /// resident period.
    CycleLength { core: usize, length: u64, max: u64 },
    /// Utilization with quantized periods must not exceed 1.
    CoreLoad { core: usize, quantized: f64, nominal: f64 },
}

impl Violation {
    /// Amount by which a load constraint is exceeded; zero for others.
    pub fn excess(&self) -> f64 {
        match self {
            Violation::CoreLoad { quantized, .. } => (quantized - 1.0).max(0.0),
            _ => 0.0,
        }
    }

    fn is_structural(&self) -> bool {
        !matches!(self, Violation::CoreLoad { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { detail } => write!(f, "shape: {detail}"),
            Violation::Binary { task, core, value } => {
                write!(f, "binary: x[{task}][{core}] = {value}")
            }
            Violation::SingleCore { task, cores } => {
                write!(f, "single-core: task {task} is assigned to {cores} cores")
            }
            Violation::Coverage { assigned, expected } => {
                write!(f, "coverage: {assigned} assignments for {expected} tasks")
            }
            Violation::CycleLength { core, length, max } => {
                write!(f, "cycle-length: core {core} has L = {length}, allowed 1..={max}")
            }
            Violation::CoreLoad {
                core,
                quantized,
                nominal,
            } => write!(
                f,
                "core-load: core {core} utilization {quantized} with quantized periods ({nominal} nominal) exceeds 1"
            ),
        }
    }
}

/// Utilization of one core with nominal and quantized periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreLoad {
    pub nominal: f64,
    /// `None` when the core's cycle length is invalid for its tasks.
    pub quantized: Option<f64>,
}

fn structural_violations(problem: &SchedulingProblem, sol: &ScheduleSolution) -> Vec<Violation> {
    let m = problem.task_count();
    let n = problem.cores;
    let mut out = Vec::new();
    if sol.assignment.len() != m {
        out.push(Violation::Shape {
            detail: format!("assignment has {} rows, expected {m}", sol.assignment.len()),
        });
    }
    if sol.cycle_lengths.len() != n {
        out.push(Violation::Shape {
            detail: format!("{} cycle lengths for {n} cores", sol.cycle_lengths.len()),
        });
    }
    if let Some((i, row)) = sol.assignment.iter().enumerate().find(|(_, r)| r.len() != n) {
        out.push(Violation::Shape {
            detail: format!("assignment row {i} has {} entries, expected {n}", row.len()),
        });
    }
    if !out.is_empty() {
        return out;
    }

    for (i, row) in sol.assignment.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x > 1 {
                out.push(Violation::Binary {
                    task: i,
                    core: j,
                    value: x,
                });
            }
        }
        let cores = row.iter().filter(|&&x| x != 0).count();
        if cores != 1 {
            out.push(Violation::SingleCore { task: i, cores });
        }
    }
    let assigned: usize = sol
        .assignment
        .iter()
        .map(|r| r.iter().map(|&x| usize::from(x)).sum::<usize>())
        .sum();
    if assigned != m {
        out.push(Violation::Coverage { assigned, expected: m });
    }
    for j in 0..n {
        if let Some(max) = sol.min_period_on(problem, j) {
            let length = sol.cycle_lengths[j];
            if length == 0 || length > max {
                out.push(Violation::CycleLength { core: j, length, max });
            }
        }
    }
    out
}

/// Per-core utilization. Requires matching shapes.
pub fn core_loads(problem: &SchedulingProblem, sol: &ScheduleSolution) -> Result<Vec<CoreLoad>> {
    let shape: Vec<_> = structural_violations(problem, sol)
        .into_iter()
        .filter(|v| matches!(v, Violation::Shape { .. }))
        .collect();
    if !shape.is_empty() {
        return Err(Error::Validation(shape));
    }
    Ok((0..problem.cores)
        .map(|j| {
            let cycle = sol.cycle_lengths[j];
            let mut nominal = 0.0;
            let mut quantized = Some(0.0);
            for i in sol.tasks_on(j) {
                let tau = problem.wcet(i, j);
                let period = problem.period(i);
                nominal += tau / period as f64;
                quantized = match (quantized, effective_period(period, cycle)) {
                    (Some(q), Ok(eff)) => Some(q + tau / eff as f64),
                    _ => None,
                };
            }
            CoreLoad { nominal, quantized }
        })
        .collect())
}

/// Every broken constraint of `sol`; empty means the solution is valid.
pub fn validate_solution(problem: &SchedulingProblem, sol: &ScheduleSolution) -> Vec<Violation> {
    let mut out = structural_violations(problem, sol);
    if out.iter().any(|v| matches!(v, Violation::Shape { .. })) {
        return out;
    }
    let Ok(loads) = core_loads(problem, sol) else {
        return out;
    };
    for (core, load) in loads.into_iter().enumerate() {
        // A core with an invalid cycle length is already reported; fall back
        // to the nominal load so overload is still visible.
        let quantized = load.quantized.unwrap_or(load.nominal);
        if quantized > 1.0 {
            out.push(Violation::CoreLoad {
                core,
                quantized,
                nominal: load.nominal,
            });
        }
    }
    out
}

/// Schedule cost: quantization overhead plus amortized switching cost,
/// summed over cores. Empty cores contribute nothing.
pub fn objective(problem: &SchedulingProblem, sol: &ScheduleSolution) -> Result<f64> {
    let structural: Vec<_> = structural_violations(problem, sol)
        .into_iter()
        .filter(Violation::is_structural)
        .collect();
    if !structural.is_empty() {
        return Err(Error::Validation(structural));
    }
    let mut total = 0.0;
    for j in 0..problem.cores {
        let cycle = sol.cycle_lengths[j];
        let mut quantization = 0.0;
        let mut resident = 0usize;
        for i in sol.tasks_on(j) {
            let tau = problem.wcet(i, j);
            let period = problem.period(i);
            let eff = effective_period(period, cycle)?;
            // τ/T′ − τ/T without the cancellation.
            quantization += tau * (period - eff) as f64 / (period as f64 * eff as f64);
            resident += 1;
        }
        if resident > 0 {
            total += quantization + (resident as f64 * problem.switch_cost) / cycle as f64;
        }
    }
    Ok(total)
}

/// Division of one task's WCET into blocks executed in successive RT-cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPlanEntry {
    pub fraction: f64,
    /// Execution window per RT-cycle, fraction·τ.
    pub window: f64,
    pub blocks: Vec<f64>,
}

impl BlockPlanEntry {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// A single block holding the whole WCET.
    pub fn whole(wcet: f64) -> Self {
        Self {
            fraction: 1.0,
            window: wcet,
            blocks: vec![wcet],
        }
    }
}

/// Block split per task, indexed like the problem's task list.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BlockPlan {
    pub entries: Vec<BlockPlanEntry>,
}

/// Splits `wcet` into ⌈1/fraction⌉ blocks of at most `fraction·wcet`.
pub fn split_blocks(wcet: f64, fraction: f64, cycle: u64) -> Result<BlockPlanEntry> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InfeasibleSplit(format!("fraction {fraction} outside (0, 1]")));
    }
    if !wcet.is_finite() || wcet <= 0.0 {
        return Err(Error::InfeasibleSplit(format!(
            "WCET must be finite and > 0, got {wcet}"
        )));
    }
    let window = fraction * wcet;
    if window > cycle as f64 {
        return Err(Error::InfeasibleSplit(format!(
            "block window {window} exceeds RT-cycle length {cycle}"
        )));
    }
    let tol = 1e-12 * wcet;
    let mut full = (wcet / window).floor() as usize;
    // Guard against 1/fraction landing a rounding error away from an integer.
    while full > 0 && full as f64 * window > wcet + tol {
        full -= 1;
    }
    while (full + 1) as f64 * window <= wcet + tol {
        full += 1;
    }
    let mut blocks = vec![window; full];
    let remainder = wcet - full as f64 * window;
    if remainder > tol {
        blocks.push(remainder);
    } else if let Some(last) = blocks.last_mut() {
        *last += remainder;
    }
    Ok(BlockPlanEntry {
        fraction,
        window,
        blocks,
    })
}
