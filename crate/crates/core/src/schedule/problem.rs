use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Group;

/// Base time unit of periods and WCETs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TimeUnit {
    #[serde(rename = "ns")]
    Nanoseconds,
    #[default]
    #[serde(rename = "us")]
    Microseconds,
    #[serde(rename = "ms")]
    Milliseconds,
}

impl TimeUnit {
    pub fn nanos(self) -> u64 {
        match self {
            TimeUnit::Nanoseconds => 1,
            TimeUnit::Microseconds => 1_000,
            TimeUnit::Milliseconds => 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub id: String,
    /// Period T_i in base time units.
    pub period: u64,
    /// WCET τ_{i,j} on each core j, in base time units.
    pub wcet: Vec<f64>,
    /// Integration group advanced by this task, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Group>,
}

impl TaskSpec {
    pub fn new(id: impl Into<String>, period: u64, wcet: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            period,
            wcet,
            group: None,
        }
    }

    pub fn with_group(mut self, group: Group) -> Self {
        self.group = Some(group);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulingProblem {
    #[serde(default)]
    pub time_unit: TimeUnit,
    pub cores: usize,
    /// Switching cost p per resident task per RT-cycle.
    pub switch_cost: f64,
    pub tasks: Vec<TaskSpec>,
}

impl SchedulingProblem {
    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::parameter("tasks", "at least one task is required"));
        }
        if self.cores == 0 {
            return Err(Error::parameter("cores", "at least one core is required"));
        }
        if !self.switch_cost.is_finite() || self.switch_cost < 0.0 {
            return Err(Error::parameter(
                "switch_cost",
                format!("must be finite and >= 0, got {}", self.switch_cost),
            ));
        }
        for (i, t) in self.tasks.iter().enumerate() {
            let field = |name: &str| format!("tasks[{i}].{name}");
            if t.period == 0 {
                return Err(Error::parameter(field("period"), "must be >= 1"));
            }
            if t.wcet.len() != self.cores {
                return Err(Error::parameter(
                    field("wcet"),
                    format!("expected {} per-core values, got {}", self.cores, t.wcet.len()),
                ));
            }
            if let Some(bad) = t.wcet.iter().find(|w| !w.is_finite() || **w <= 0.0) {
                return Err(Error::parameter(
                    field("wcet"),
                    format!("must be finite and > 0, got {bad}"),
                ));
            }
            if t.wcet.iter().all(|&w| w > t.period as f64) {
                return Err(Error::parameter(
                    field("wcet"),
                    format!("task `{}` exceeds its period {} on every core", t.id, t.period),
                ));
            }
            if self.tasks[..i].iter().any(|o| o.id == t.id) {
                return Err(Error::parameter(field("id"), format!("duplicate task id `{}`", t.id)));
            }
        }
        Ok(())
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn wcet(&self, task: usize, core: usize) -> f64 {
        self.tasks[task].wcet[core]
    }

    pub fn period(&self, task: usize) -> u64 {
        self.tasks[task].period
    }
}

/// Task-to-core assignment matrix `x` (tasks × cores, 0/1 entries) and the
/// RT-cycle length of every core.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSolution {
    pub assignment: Vec<Vec<u8>>,
    pub cycle_lengths: Vec<u64>,
}

impl ScheduleSolution {
    /// Builds a solution from one core index per task.
    pub fn from_cores(cores_of_tasks: &[usize], cycle_lengths: Vec<u64>) -> Self {
        let n = cycle_lengths.len();
        let assignment = cores_of_tasks
            .iter()
            .map(|&c| (0..n).map(|j| u8::from(j == c)).collect())
            .collect();
        Self {
            assignment,
            cycle_lengths,
        }
    }

    /// The core of task `i`, if its row has exactly one entry set.
    pub fn core_of(&self, task: usize) -> Option<usize> {
        let row = self.assignment.get(task)?;
        let mut set = row.iter().enumerate().filter(|(_, &x)| x != 0);
        match (set.next(), set.next()) {
            (Some((j, _)), None) => Some(j),
            _ => None,
        }
    }

    /// Tasks whose row marks core `j`.
    pub fn tasks_on(&self, core: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(move |(_, row)| row.get(core).is_some_and(|&x| x != 0))
            .map(|(i, _)| i)
    }

    pub fn cores(&self) -> usize {
        self.cycle_lengths.len()
    }

    /// Smallest period among the tasks on core `j`.
    pub fn min_period_on(&self, problem: &SchedulingProblem, core: usize) -> Option<u64> {
        self.tasks_on(core).map(|i| problem.period(i)).min()
    }
}
