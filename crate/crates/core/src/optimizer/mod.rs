//! Schedule solvers behind a common interface, selectable by name.

mod abc;
mod exhaustive;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use abc::{neighbor, optimize, random_solution, AbcOutcome, AbcParams, CandidateSolution};
pub use exhaustive::{brute_force, search_space, ExhaustiveOutcome, MAX_ENUMERATION};

use crate::error::{Error, Result};
use crate::schedule::{ScheduleSolution, SchedulingProblem};

/// Outcome of any solver, in the JSON layout written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub solver: String,
    #[serde(flatten)]
    pub solution: ScheduleSolution,
    pub objective: f64,
    pub iterations_used: u32,
    pub history: Vec<Option<f64>>,
}

pub trait ScheduleSolver {
    fn name(&self) -> &'static str;

    fn solve(&self, problem: &SchedulingProblem) -> Result<SolverReport>;
}

pub struct AbcSolver {
    pub params: AbcParams,
}

impl ScheduleSolver for AbcSolver {
    fn name(&self) -> &'static str {
        "abc"
    }

    fn solve(&self, problem: &SchedulingProblem) -> Result<SolverReport> {
        let out = optimize(problem, &self.params)?;
        Ok(SolverReport {
            solver: self.name().into(),
            solution: out.best,
            objective: out.objective,
            iterations_used: out.iterations_used,
            history: out.history,
        })
    }
}

pub struct ExhaustiveSolver;

impl ScheduleSolver for ExhaustiveSolver {
    fn name(&self) -> &'static str {
        "brute-force"
    }

    fn solve(&self, problem: &SchedulingProblem) -> Result<SolverReport> {
        let out = brute_force(problem)?;
        Ok(SolverReport {
            solver: self.name().into(),
            solution: out.best,
            objective: out.objective,
            iterations_used: 1,
            history: vec![Some(out.objective)],
        })
    }
}

/// Settings handed to solver constructors.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolverOptions {
    pub abc: AbcParams,
}

pub type SolverFactory = fn(&SolverOptions) -> Box<dyn ScheduleSolver>;

/// Name → constructor table for schedule solvers.
pub struct SolverRegistry {
    factories: BTreeMap<&'static str, SolverFactory>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: SolverFactory) -> &mut Self {
        self.factories.insert(name, factory);
        self
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn create(&self, name: &str, options: &SolverOptions) -> Result<Box<dyn ScheduleSolver>> {
        self.factories
            .get(name)
            .map(|f| f(options))
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "solver",
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            })
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("abc", |o| Box::new(AbcSolver { params: o.abc }));
        r.register("brute-force", |_| Box::new(ExhaustiveSolver));
        r
    }
}
