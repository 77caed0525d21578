//! Artificial bee colony search over task assignments and RT-cycle lengths.
//!
//! Food sources are candidate schedules. Employed bees mutate their own
//! source, onlookers pick sources by fitness-proportional roulette and
//! mutate them, and a source that fails to improve for more than
//! `abandonment_limit` trials is replaced by a random one (scout phase).
//! Candidates that break constraints stay in the colony with a penalized
//! fitness; only valid candidates are eligible as the result.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{objective, validate_solution, ScheduleSolution, SchedulingProblem, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbcParams {
    /// Employed plus onlooker bees; half of each.
    pub colony_size: usize,
    pub abandonment_limit: u32,
    pub max_iterations: u32,
    pub seed: u64,
}

impl Default for AbcParams {
    fn default() -> Self {
        Self {
            colony_size: 20,
            abandonment_limit: 30,
            max_iterations: 500,
            seed: 0,
        }
    }
}

impl AbcParams {
    pub fn validate(&self) -> Result<()> {
        if self.colony_size < 2 || !self.colony_size.is_multiple_of(2) {
            return Err(Error::parameter(
                "colony_size",
                format!("must be even and >= 2, got {}", self.colony_size),
            ));
        }
        if self.abandonment_limit == 0 {
            return Err(Error::parameter("abandonment_limit", "must be >= 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::parameter("max_iterations", "must be >= 1"));
        }
        Ok(())
    }
}

/// A food source: schedule plus its score.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSolution {
    pub solution: ScheduleSolution,
    pub objective: f64,
    pub fitness: f64,
    pub trial_counter: u32,
    pub violations: usize,
}

impl CandidateSolution {
    /// Scores a structurally valid schedule. Constraint violations lower the
    /// fitness by `10·(count + total excess load)`.
    pub fn evaluate(problem: &SchedulingProblem, solution: ScheduleSolution) -> Result<Self> {
        let f = objective(problem, &solution)?;
        let violations = validate_solution(problem, &solution);
        let penalty = if violations.is_empty() {
            0.0
        } else {
            10.0 * (violations.len() as f64 + violations.iter().map(Violation::excess).sum::<f64>())
        };
        Ok(Self {
            solution,
            objective: f,
            fitness: 1.0 / (1.0 + f + penalty),
            trial_counter: 0,
            violations: violations.len(),
        })
    }

    pub fn is_feasible(&self) -> bool {
        self.violations == 0
    }
}

/// Uniform random schedule: every task on a random core, every occupied
/// core with a random cycle length up to its smallest period.
pub fn random_solution<R: Rng + ?Sized>(problem: &SchedulingProblem, rng: &mut R) -> ScheduleSolution {
    let n = problem.cores;
    let cores: Vec<usize> = (0..problem.task_count()).map(|_| rng.random_range(0..n)).collect();
    let mut sol = ScheduleSolution::from_cores(&cores, vec![1; n]);
    for j in 0..n {
        if let Some(max) = sol.min_period_on(problem, j) {
            sol.cycle_lengths[j] = rng.random_range(1..=max);
        }
    }
    sol
}

/// Applies one random mutation: move a task to another core, or change one
/// occupied core's cycle length. Both kinds are equally likely when both
/// apply; the result keeps every structural constraint.
pub fn neighbor<R: Rng + ?Sized>(
    current: &CandidateSolution,
    problem: &SchedulingProblem,
    rng: &mut R,
) -> Result<CandidateSolution> {
    let mut sol = current.solution.clone();
    let can_move = problem.cores >= 2;
    let tunable: Vec<(usize, u64)> = (0..problem.cores)
        .filter_map(|j| sol.min_period_on(problem, j).map(|max| (j, max)))
        .filter(|&(_, max)| max >= 2)
        .collect();

    let do_move = match (can_move, tunable.is_empty()) {
        (false, true) => return CandidateSolution::evaluate(problem, sol),
        (true, true) => true,
        (false, false) => false,
        (true, false) => rng.random_bool(0.5),
    };

    if do_move {
        let task = rng.random_range(0..problem.task_count());
        let from = sol.core_of(task).expect("candidate rows hold exactly one core");
        let mut to = rng.random_range(0..problem.cores - 1);
        if to >= from {
            to += 1;
        }
        sol.assignment[task][from] = 0;
        sol.assignment[task][to] = 1;
        let max = sol.min_period_on(problem, to).expect("core just received a task");
        sol.cycle_lengths[to] = sol.cycle_lengths[to].clamp(1, max);
    } else {
        let (core, max) = tunable[rng.random_range(0..tunable.len())];
        let old = sol.cycle_lengths[core].clamp(1, max);
        sol.cycle_lengths[core] = match divisor_pick(&sol, problem, core, max, old, rng) {
            Some(l) => l,
            None => {
                let mut new = rng.random_range(1..max);
                if new >= old {
                    new += 1;
                }
                new
            }
        };
    }
    CandidateSolution::evaluate(problem, sol)
}

/// Half of the retunes pick a divisor of a resident task's period, where
/// the quantization cost vanishes; `None` means fall back to uniform.
fn divisor_pick<R: Rng + ?Sized>(
    sol: &ScheduleSolution,
    problem: &SchedulingProblem,
    core: usize,
    max: u64,
    old: u64,
    rng: &mut R,
) -> Option<u64> {
    if !rng.random_bool(0.5) {
        return None;
    }
    let resident: Vec<usize> = sol.tasks_on(core).collect();
    let period = problem.period(resident[rng.random_range(0..resident.len())]);
    let divisors: Vec<u64> = (1..=max).filter(|&l| period.is_multiple_of(l) && l != old).collect();
    (!divisors.is_empty()).then(|| divisors[rng.random_range(0..divisors.len())])
}

/// Result of an optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbcOutcome {
    pub best: ScheduleSolution,
    pub objective: f64,
    pub iterations_used: u32,
    /// Best valid objective after each iteration; `None` until one is found.
    pub history: Vec<Option<f64>>,
}

struct Colony<'a> {
    problem: &'a SchedulingProblem,
    params: AbcParams,
    rng: ChaCha8Rng,
    sources: Vec<CandidateSolution>,
    best: Option<CandidateSolution>,
    best_penalized: f64,
}

impl<'a> Colony<'a> {
    fn new(problem: &'a SchedulingProblem, params: AbcParams) -> Result<Self> {
        let mut colony = Self {
            problem,
            params,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            sources: Vec::with_capacity(params.colony_size / 2),
            best: None,
            best_penalized: f64::INFINITY,
        };
        for _ in 0..params.colony_size / 2 {
            let c = colony.scout()?;
            colony.sources.push(c);
        }
        Ok(colony)
    }

    fn scout(&mut self) -> Result<CandidateSolution> {
        let sol = random_solution(self.problem, &mut self.rng);
        let c = CandidateSolution::evaluate(self.problem, sol)?;
        self.observe(&c);
        Ok(c)
    }

    fn observe(&mut self, c: &CandidateSolution) {
        self.best_penalized = self.best_penalized.min(1.0 / c.fitness - 1.0);
        if c.is_feasible() && self.best.as_ref().is_none_or(|b| c.objective < b.objective) {
            self.best = Some(c.clone());
        }
    }

    fn exploit(&mut self, i: usize) -> Result<()> {
        let cand = neighbor(&self.sources[i], self.problem, &mut self.rng)?;
        self.observe(&cand);
        if cand.fitness > self.sources[i].fitness {
            self.sources[i] = cand;
        } else {
            self.sources[i].trial_counter += 1;
        }
        Ok(())
    }

    fn roulette(&mut self) -> usize {
        let total: f64 = self.sources.iter().map(|s| s.fitness).sum();
        let mut r = self.rng.random::<f64>() * total;
        for (i, s) in self.sources.iter().enumerate() {
            if r < s.fitness {
                return i;
            }
            r -= s.fitness;
        }
        self.sources.len() - 1
    }

    fn iterate(&mut self) -> Result<()> {
        let count = self.sources.len();
        for i in 0..count {
            self.exploit(i)?;
        }
        for _ in 0..count {
            let i = self.roulette();
            self.exploit(i)?;
        }
        for i in 0..count {
            if self.sources[i].trial_counter > self.params.abandonment_limit {
                self.sources[i] = self.scout()?;
            }
        }
        Ok(())
    }
}

/// Minimizes the schedule objective. Deterministic for a given seed.
pub fn optimize(problem: &SchedulingProblem, params: &AbcParams) -> Result<AbcOutcome> {
    problem.validate()?;
    params.validate()?;
    let mut colony = Colony::new(problem, *params)?;
    let mut history = Vec::with_capacity(params.max_iterations as usize);
    for _ in 0..params.max_iterations {
        colony.iterate()?;
        history.push(colony.best.as_ref().map(|b| b.objective));
    }
    match colony.best {
        Some(best) => Ok(AbcOutcome {
            best: best.solution,
            objective: best.objective,
            iterations_used: params.max_iterations,
            history,
        }),
        None => Err(Error::Infeasible {
            iterations: params.max_iterations,
            best_penalized: colony.best_penalized,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{TaskSpec, TimeUnit};

    fn problem(cores: usize, tasks: &[(u64, f64)], p: f64) -> SchedulingProblem {
        SchedulingProblem {
            time_unit: TimeUnit::Microseconds,
            cores,
            switch_cost: p,
            tasks: tasks
                .iter()
                .enumerate()
                .map(|(i, &(t, w))| TaskSpec::new(format!("t{i}"), t, vec![w; cores]))
                .collect(),
        }
    }

    #[test]
    fn params_validation() {
        AbcParams::default().validate().unwrap();
        for bad in [
            AbcParams {
                colony_size: 3,
                ..Default::default()
            },
            AbcParams {
                colony_size: 0,
                ..Default::default()
            },
            AbcParams {
                max_iterations: 0,
                ..Default::default()
            },
            AbcParams {
                abandonment_limit: 0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn single_task_reaches_zero() {
        let p = problem(1, &[(10, 1.0)], 0.0);
        let out = optimize(&p, &AbcParams::default()).unwrap();
        assert_eq!(out.best.assignment, vec![vec![1]]);
        assert_eq!(out.objective, 0.0);
        assert_eq!(10 % out.best.cycle_lengths[0], 0);
    }

    #[test]
    fn single_core_only_retunes_cycle() {
        let p = problem(1, &[(10, 1.0)], 0.01);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let start = CandidateSolution::evaluate(&p, ScheduleSolution::from_cores(&[0], vec![4])).unwrap();
        for _ in 0..200 {
            let next = neighbor(&start, &p, &mut rng).unwrap();
            assert_eq!(next.solution.assignment, start.solution.assignment);
            assert_ne!(next.solution.cycle_lengths, start.solution.cycle_lengths);
        }
    }

    #[test]
    fn move_flips_exactly_one_row() {
        // Period 1 forbids retuning, so every mutation is a move.
        let p = problem(2, &[(1, 0.1), (1, 0.1), (1, 0.1)], 0.01);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let start = CandidateSolution::evaluate(&p, ScheduleSolution::from_cores(&[0, 1, 0], vec![1, 1])).unwrap();
        for _ in 0..100 {
            let next = neighbor(&start, &p, &mut rng).unwrap();
            let changed = (0..3)
                .filter(|&i| next.solution.assignment[i] != start.solution.assignment[i])
                .count();
            assert_eq!(changed, 1);
        }
    }

    #[test]
    fn neighbors_stay_structurally_valid() {
        let p = problem(3, &[(4, 0.5), (6, 1.0), (12, 2.0), (9, 1.0), (20, 3.0)], 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut current = CandidateSolution::evaluate(&p, random_solution(&p, &mut rng)).unwrap();
        for _ in 0..1000 {
            let next = neighbor(&current, &p, &mut rng).unwrap();
            let structural: Vec<_> = validate_solution(&p, &next.solution)
                .into_iter()
                .filter(|v| !matches!(v, Violation::CoreLoad { .. }))
                .collect();
            assert!(structural.is_empty(), "{structural:?}");
            current = next;
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let p = problem(2, &[(4, 1.0), (6, 1.0), (12, 1.0)], 0.1);
        let params = AbcParams {
            seed: 42,
            max_iterations: 50,
            ..Default::default()
        };
        assert_eq!(optimize(&p, &params).unwrap(), optimize(&p, &params).unwrap());
    }

    #[test]
    fn history_is_monotone_and_result_valid() {
        let p = problem(2, &[(4, 1.0), (6, 2.0), (12, 3.0), (5, 1.0)], 0.2);
        let out = optimize(
            &p,
            &AbcParams {
                seed: 9,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(validate_solution(&p, &out.best).is_empty());
        let seen: Vec<f64> = out.history.iter().flatten().copied().collect();
        assert!(seen.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*seen.last().unwrap(), out.objective);
    }

    #[test]
    fn overloaded_instance_is_reported_not_panicked() {
        // Two tasks at 0.75 load each on one core cannot both fit.
        let p = problem(1, &[(4, 3.0), (4, 3.0)], 0.1);
        let params = AbcParams {
            max_iterations: 20,
            ..Default::default()
        };
        assert!(matches!(
            optimize(&p, &params),
            Err(Error::Infeasible { iterations: 20, .. })
        ));
    }
}
