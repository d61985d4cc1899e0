//! Reference solvers used to validate the fast paths: plain exhaustive
//! search over subsets, the unrestricted sweep, and exhaustive search over
//! independent task sets. All of them pin down ties so results are
//! reproducible: among equal-profit optima they return the
//! lexicographically smallest sorted id vector.

use crate::its::{compatible, is_its, normalized_for_its, rect_of, Rect};
use crate::medium::solve_exact_bounded;
use crate::model::{bottleneck, check_feasible, Instance, Solution};
use crate::{Error, Result};

/// Default size cutoff for the exhaustive solvers.
pub const BRUTE_FORCE_CAP: usize = 24;

/// Exhaustive maximum-profit feasible subset of `ids`, capped at
/// [`BRUTE_FORCE_CAP`] tasks.
pub fn brute_force(inst: &Instance, ids: &[usize]) -> Result<Solution> {
    brute_force_capped(inst, ids, BRUTE_FORCE_CAP)
}

/// Exhaustive search with an explicit size cutoff. Branch and bound over
/// tasks in id order; a branch is cut only when it cannot reach the best
/// profit, so equal-profit optima are still enumerated and the smallest
/// witness wins.
pub fn brute_force_capped(inst: &Instance, ids: &[usize], cap: usize) -> Result<Solution> {
    let tasks = eligible(inst, ids, cap, |id| {
        bottleneck(inst, &inst.tasks[id]).slack >= 0
    })?;
    let suffix = suffix_profits(inst, &tasks);

    struct Search<'a> {
        inst: &'a Instance,
        tasks: &'a [usize],
        suffix: &'a [i64],
        loads: Vec<i64>,
        current: Vec<usize>,
        profit: i64,
        best: Vec<usize>,
        best_profit: i64,
    }

    impl Search<'_> {
        fn go(&mut self, at: usize) {
            if self.profit + self.suffix[at] < self.best_profit {
                return;
            }
            if at == self.tasks.len() {
                if self.profit > self.best_profit
                    || (self.profit == self.best_profit && self.current < self.best)
                {
                    self.best_profit = self.profit;
                    self.best = self.current.clone();
                }
                return;
            }
            let task = &self.inst.tasks[self.tasks[at]];
            if task.edges().all(|e| self.loads[e] + task.d <= self.inst.capacities[e]) {
                for e in task.edges() {
                    self.loads[e] += task.d;
                }
                self.current.push(task.id);
                self.profit += task.w;
                self.go(at + 1);
                self.profit -= task.w;
                self.current.pop();
                for e in task.edges() {
                    self.loads[e] -= task.d;
                }
            }
            self.go(at + 1);
        }
    }

    let mut search = Search {
        inst,
        tasks: &tasks,
        suffix: &suffix,
        loads: vec![0; inst.m],
        current: Vec::new(),
        profit: 0,
        // the all-exclude leaf is never pruned, so this sentinel always
        // loses to a real selection
        best: vec![usize::MAX],
        best_profit: 0,
    };
    search.go(0);
    Solution::new(inst, search.best, "brute")
}

/// Unrestricted sweep oracle: exact optimum over `ids` with no crossing
/// bound, limited only by the state budget.
pub fn exact_sweep(inst: &Instance, ids: &[usize], budget: usize) -> Result<Solution> {
    let sol = solve_exact_bounded(inst, ids, &inst.capacities, ids.len().max(1), budget)?;
    Solution::new(inst, sol.selected, "sweep")
}

/// Exhaustive maximum-profit independent task set, searched on the same
/// normalized instance the dynamic program uses so both optimize identical
/// rectangle geometry. Capped at [`BRUTE_FORCE_CAP`] tasks.
pub fn max_its_brute(inst: &Instance) -> Result<Solution> {
    let all: Vec<usize> = (0..inst.n()).collect();
    max_its_brute_on(inst, &all)
}

pub fn max_its_brute_on(inst: &Instance, ids: &[usize]) -> Result<Solution> {
    let norm = normalized_for_its(inst)?;
    let tasks = eligible(inst, ids, BRUTE_FORCE_CAP, |id| {
        bottleneck(&norm, &norm.tasks[id]).slack >= 0
    })?;
    let suffix = suffix_profits(inst, &tasks);
    let rects: Vec<Rect> = tasks.iter().map(|&id| rect_of(&norm, &norm.tasks[id])).collect();

    struct Search<'a> {
        inst: &'a Instance,
        tasks: &'a [usize],
        rects: &'a [Rect],
        suffix: &'a [i64],
        chosen: Vec<usize>, // indices into tasks/rects
        profit: i64,
        best: Vec<usize>,
        best_profit: i64,
    }

    impl Search<'_> {
        fn go(&mut self, at: usize) {
            if self.profit + self.suffix[at] < self.best_profit {
                return;
            }
            if at == self.tasks.len() {
                let current: Vec<usize> = self.chosen.iter().map(|&i| self.tasks[i]).collect();
                if self.profit > self.best_profit
                    || (self.profit == self.best_profit && current < self.best)
                {
                    self.best_profit = self.profit;
                    self.best = current;
                }
                return;
            }
            if self.chosen.iter().all(|&i| compatible(&self.rects[i], &self.rects[at])) {
                self.chosen.push(at);
                self.profit += self.inst.tasks[self.tasks[at]].w;
                self.go(at + 1);
                self.profit -= self.inst.tasks[self.tasks[at]].w;
                self.chosen.pop();
            }
            self.go(at + 1);
        }
    }

    let mut search = Search {
        inst,
        tasks: &tasks,
        rects: &rects,
        suffix: &suffix,
        chosen: Vec::new(),
        profit: 0,
        best: vec![usize::MAX],
        best_profit: 0,
    };
    search.go(0);
    let sol = Solution::new(inst, search.best, "its-brute")?;
    debug_assert!(is_its(inst, &sol.selected)?, "compatibility transfers to the original");
    debug_assert!(check_feasible(inst, &sol.selected)?.feasible);
    Ok(sol)
}

fn eligible(
    inst: &Instance,
    ids: &[usize],
    cap: usize,
    keep: impl Fn(usize) -> bool,
) -> Result<Vec<usize>> {
    let mut seen = vec![false; inst.n()];
    let mut tasks = Vec::new();
    for &id in ids {
        inst.task(id)?;
        if seen[id] {
            return Err(Error::Invalid(format!("duplicate id {id}")));
        }
        seen[id] = true;
        if keep(id) {
            tasks.push(id);
        }
    }
    tasks.sort_unstable();
    if tasks.len() > cap {
        return Err(Error::Precondition(format!(
            "exhaustive search limited to {cap} tasks, got {}",
            tasks.len()
        )));
    }
    Ok(tasks)
}

fn suffix_profits(inst: &Instance, tasks: &[usize]) -> Vec<i64> {
    let mut suffix = vec![0i64; tasks.len() + 1];
    for (i, &id) in tasks.iter().enumerate().rev() {
        suffix[i] = suffix[i + 1] + inst.tasks[id].w;
    }
    suffix
}
