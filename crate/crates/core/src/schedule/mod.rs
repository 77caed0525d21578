//! Cyclic real-time scheduling model.
//!
//! Tasks have integer periods and per-core WCETs in a common base time unit.
//! A core `j` runs RT-cycles of integer length `L_j`; every resident task's
//! period is quantized down to a multiple of `L_j` (its effective period).
//! The cost of a schedule is the utilization added by that quantization plus
//! a per-task switching cost amortized over the RT-cycle.

mod model;
mod problem;

pub use model::{
    core_loads, effective_period, hyperperiod, objective, split_blocks, utilization_feasible, validate_solution,
    BlockPlan, BlockPlanEntry, CoreLoad, TaskLoad, Utilization, Violation,
};
pub use problem::{ScheduleSolution, SchedulingProblem, TaskSpec, TimeUnit};
