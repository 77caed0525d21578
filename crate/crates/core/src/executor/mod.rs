//! Table-driven execution of the multi-rate integration.
//!
//! A solved schedule becomes an explicit table of slots over one
//! hyperperiod. Each integration group is bound to one task; the first block
//! of every job performs that group's Euler update. Groups exchange state only
//! at frame barriers, so logical and wall-clock runs produce the same numbers
//! as the reference integrator.

mod run;
mod table;
mod wcet;

pub use run::{
    implied_divisors, run_logical, run_realtime, DurationStats, ExecutionOutcome, ExecutionReport, Executor,
    ExecutorFactory, ExecutorOptions, ExecutorRegistry, LogicalExecutor, RealtimeExecutor, TaskReport, Workload,
    MIN_WALL_PERIOD,
};
pub use table::{build_table, ScheduleTable, Slot};
pub use wcet::{group_step_body, measure_wcet, WcetEstimate};
