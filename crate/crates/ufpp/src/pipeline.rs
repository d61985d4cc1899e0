//! Top-level solvers assembling the specialized stages.
//!
//! `solve_main` is the accuracy-first composition: it splits the tasks at
//! half their bottleneck capacity, runs the grouped small-task machinery
//! on one side and the corner search on the other, and returns the better
//! solution. `solve_fast` trades accuracy for speed: it splits at a ninth,
//! fixes the grouping geometry to three levels with a 1/16 margin, and
//! routes the small side exclusively through the fractional rounding so
//! no exact subprogram ever runs. `solve` dispatches on a config and
//! re-checks whichever certificate the chosen algorithm promises before
//! handing the solution back.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exact::{rat, ratio};
use crate::framework::{
    check_augmented, solve_ra, solve_small, solve_small_rounding,
};
use crate::its::solve_large;
use crate::medium::DEFAULT_STATE_BUDGET;
use crate::model::{check_feasible, classify, combine_best, Instance, Solution};
use crate::oracle::exact_sweep;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Main,
    Fast,
    Large,
    Small,
    Ra,
    Exact,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Algorithm> {
        Ok(match s {
            "main" => Algorithm::Main,
            "fast" => Algorithm::Fast,
            "large" => Algorithm::Large,
            "small" => Algorithm::Small,
            "ra" => Algorithm::Ra,
            "exact" => Algorithm::Exact,
            other => return Err(Error::Invalid(format!("unknown algorithm '{other}'"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub algorithm: Algorithm,
    pub eps: BigRational,
    pub gamma: BigRational,
    pub k_large: i64,
    pub beta_aug: BigRational,
    pub budget: usize,
}

impl Default for SolveConfig {
    fn default() -> SolveConfig {
        SolveConfig {
            algorithm: Algorithm::Main,
            eps: rat(1),
            gamma: ratio(1, 2),
            k_large: 2,
            beta_aug: ratio(1, 2),
            budget: DEFAULT_STATE_BUDGET,
        }
    }
}

/// Solver output plus the run metadata the command line reports.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Solution,
    /// Repair-sweep activations inside the rounding stages; zero in
    /// correct operation.
    pub repairs: usize,
    /// Allowed capacity overshoot (numerator, denominator) when the
    /// algorithm ran in augmentation mode; None for exact-capacity runs.
    pub augmented: Option<(BigInt, BigInt)>,
}

/// Best-of-both composition: tasks at or below half their bottleneck go
/// through the grouped rounding machinery, the rest through the corner
/// search, and the single most profitable task backstops both. Feasible
/// for the original capacities.
pub fn solve_main(inst: &Instance, eps: &BigRational, budget: usize) -> Result<SolveReport> {
    use num_traits::Zero;
    if eps <= &BigRational::zero() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let half = ratio(1, 2);
    let (small_ids, _) = classify(inst, &half);
    let small = solve_small(inst, &small_ids, eps, &half, budget)?;
    let large = solve_large(inst, 2)?;
    let mut best = combine_best(inst, &[small.solution, large])?;

    // a lone task never loses to the composition
    if let Some(&id) = inst
        .deliverable_ids()
        .iter()
        .max_by_key(|&&id| (inst.tasks[id].w, std::cmp::Reverse(id)))
    {
        if inst.tasks[id].w > best.profit {
            best = Solution::new(inst, vec![id], "single")?;
        }
    }
    Ok(SolveReport {
        solution: Solution::new(inst, best.selected, "main")?,
        repairs: small.repairs,
        augmented: None,
    })
}

/// Speed-first composition: split at a ninth of the bottleneck, corner
/// search on the large side, and a fixed-geometry rounding pass (three
/// levels per group, margin 1/16, spread 16/135) on the small side. No
/// exact subprogram runs anywhere on the small path.
pub fn solve_fast(inst: &Instance, budget: usize) -> Result<SolveReport> {
    let ninth = ratio(1, 9);
    let (small_ids, _) = classify(inst, &ninth);
    let (small_sol, _, repairs) =
        solve_small_rounding(inst, &small_ids, 5, 3, &ninth, &ratio(16, 135), budget)?;
    let large = solve_large(inst, 9)?;
    let best = combine_best(inst, &[small_sol, large])?;
    Ok(SolveReport {
        solution: Solution::new(inst, best.selected, "fast")?,
        repairs,
        augmented: None,
    })
}

/// Runs the configured algorithm and re-validates its certificate: the
/// selection must respect the original capacities, or the inflated ones
/// for the augmentation variant.
pub fn solve(inst: &Instance, config: &SolveConfig) -> Result<SolveReport> {
    let report = match config.algorithm {
        Algorithm::Main => solve_main(inst, &config.eps, config.budget)?,
        Algorithm::Fast => solve_fast(inst, config.budget)?,
        Algorithm::Large => {
            let solution = solve_large(inst, config.k_large)?;
            SolveReport { solution, repairs: 0, augmented: None }
        }
        Algorithm::Small => {
            let threshold = rat(1) - &config.gamma;
            let ids: Vec<usize> = inst
                .deliverable_ids()
                .into_iter()
                .filter(|&id| {
                    let task = &inst.tasks[id];
                    let b = crate::model::bottleneck(inst, task).b;
                    rat(task.d) <= &threshold * rat(b)
                })
                .collect();
            let out = solve_small(inst, &ids, &config.eps, &config.gamma, config.budget)?;
            SolveReport { solution: out.solution, repairs: out.repairs, augmented: None }
        }
        Algorithm::Ra => {
            let ids = inst.deliverable_ids();
            let out = solve_ra(inst, &ids, &config.eps, &config.beta_aug, config.budget)?;
            let factor = out.augmentation_factor();
            let q = out.params.q;
            if !check_augmented(inst, &out.solution.selected, q)? {
                return Err(Error::Internal("augmented output exceeds its inflation bound".into()));
            }
            return Ok(SolveReport {
                solution: out.solution,
                repairs: out.repairs,
                augmented: Some(factor),
            });
        }
        Algorithm::Exact => {
            let all: Vec<usize> = (0..inst.tasks.len()).collect();
            let solution = exact_sweep(inst, &all, config.budget)?;
            SolveReport { solution, repairs: 0, augmented: None }
        }
    };
    if !check_feasible(inst, &report.solution.selected)?.feasible {
        return Err(Error::Internal("solver output violates the capacities".into()));
    }
    Ok(report)
}
