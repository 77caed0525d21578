use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{objective, validate_solution, ScheduleSolution, SchedulingProblem};

/// Largest search space enumerated before refusing.
pub const MAX_ENUMERATION: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveOutcome {
    pub best: ScheduleSolution,
    pub objective: f64,
    /// Number of schedules evaluated.
    pub evaluated: u64,
}

/// Upper bound on the number of schedules [`brute_force`] would visit.
pub fn search_space(problem: &SchedulingProblem) -> f64 {
    let max_period = problem.tasks.iter().map(|t| t.period).max().unwrap_or(1) as f64;
    (problem.cores as f64).powi(problem.task_count() as i32) * max_period.powi(problem.cores as i32)
}

fn lex_key(sol: &ScheduleSolution) -> (Vec<u8>, Vec<u64>) {
    (sol.assignment.concat(), sol.cycle_lengths.clone())
}

/// Exact optimum by enumerating every assignment and every admissible cycle
/// length per occupied core (empty cores fix L = 1). Near-equal objectives
/// (within 1e-12 relative) are tied and resolved by the lexicographically
/// smallest flattened assignment, then cycle-length vector.
pub fn brute_force(problem: &SchedulingProblem) -> Result<ExhaustiveOutcome> {
    problem.validate()?;
    let space = search_space(problem);
    if space > MAX_ENUMERATION {
        return Err(Error::Capacity(format!(
            "exhaustive search over ~{space:.3e} schedules exceeds {MAX_ENUMERATION:e}"
        )));
    }
    let m = problem.task_count();
    let n = problem.cores;

    let mut best: Option<(f64, ScheduleSolution)> = None;
    let mut evaluated = 0u64;
    let mut cores = vec![0usize; m];
    loop {
        let base = ScheduleSolution::from_cores(&cores, vec![1; n]);
        let limits: Vec<u64> = (0..n).map(|j| base.min_period_on(problem, j).unwrap_or(1)).collect();
        let mut lengths = vec![1u64; n];
        loop {
            let sol = ScheduleSolution {
                assignment: base.assignment.clone(),
                cycle_lengths: lengths.clone(),
            };
            evaluated += 1;
            if validate_solution(problem, &sol).is_empty() {
                let f = objective(problem, &sol)?;
                let better = match &best {
                    None => true,
                    Some((bf, bs)) => {
                        let tol = 1e-12 * bf.abs().max(1.0);
                        f < bf - tol || ((f - bf).abs() <= tol && lex_key(&sol) < lex_key(bs))
                    }
                };
                if better {
                    best = Some((f, sol));
                }
            }
            if !advance(&mut lengths, |j| limits[j], 1) {
                break;
            }
        }
        if !advance_usize(&mut cores, n) {
            break;
        }
    }

    match best {
        Some((objective, best)) => Ok(ExhaustiveOutcome {
            best,
            objective,
            evaluated,
        }),
        None => Err(Error::Infeasible {
            iterations: 0,
            best_penalized: f64::INFINITY,
        }),
    }
}

/// Odometer increment over `values[j] ∈ start..=limit(j)`; false on wrap.
fn advance(values: &mut [u64], limit: impl Fn(usize) -> u64, start: u64) -> bool {
    for j in (0..values.len()).rev() {
        if values[j] < limit(j) {
            values[j] += 1;
            return true;
        }
        values[j] = start;
    }
    false
}

fn advance_usize(values: &mut [usize], radix: usize) -> bool {
    for v in values.iter_mut().rev() {
        if *v + 1 < radix {
            *v += 1;
            return true;
        }
        *v = 0;
    }
    false
}
