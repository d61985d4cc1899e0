//! Exact subset selection by a left-to-right sweep over path vertices, and
//! the medium-demand solver built on it (exact optimum, then a two-way
//! split that leaves a capacity margin).
//!
//! The sweep keeps one state per distinct set of open tasks. It is exact:
//! every feasible subset corresponds to a surviving state chain. Cost is
//! exponential in the number of tasks that can overlap, so callers bound
//! the concurrently open tasks (`crossing_bound`) and the total stored
//! states (`budget`).

use std::collections::HashMap;
use std::hash::Hash;

use crate::model::{Instance, Solution};
use crate::{Error, Result};

/// Default cap on stored sweep states; override per call or through the
/// command line.
pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

/// Maximum-profit subset of `ids` whose loads respect `caps` on every edge,
/// restricted to selections that never keep more than `crossing_bound`
/// tasks open at once. With `crossing_bound >= ids.len()` this is the
/// unrestricted exact optimum. Negative capacities admit no load at all.
///
/// Fails with [`Error::Budget`] once more than `budget` states are stored.
pub fn solve_exact_bounded(
    inst: &Instance,
    ids: &[usize],
    caps: &[i64],
    crossing_bound: usize,
    budget: usize,
) -> Result<Solution> {
    if caps.len() != inst.m {
        return Err(Error::Invalid(format!(
            "expected {} capacities, got {}",
            inst.m,
            caps.len()
        )));
    }
    let caps_eff: Vec<i64> = caps.iter().map(|&u| u.max(0)).collect();

    let mut seen = vec![false; inst.n()];
    let mut tasks = Vec::with_capacity(ids.len());
    for &id in ids {
        let task = inst.task(id)?;
        if seen[id] {
            return Err(Error::Invalid(format!("duplicate id {id}")));
        }
        seen[id] = true;
        // skip tasks that cannot fit alone under caps
        let fits = task.edges().all(|e| task.d <= caps_eff[e]);
        if fits {
            tasks.push(SweepTask { s: task.s, t: task.t, d: task.d, w: task.w, id });
        }
    }
    tasks.sort_unstable_by_key(|t| t.id);

    let picked = if tasks.len() <= 64 {
        run_sweep::<u64>(inst.m, &caps_eff, &tasks, crossing_bound, budget)?
    } else {
        run_sweep::<Box<[u32]>>(inst.m, &caps_eff, &tasks, crossing_bound, budget)?
    };
    Solution::new(inst, picked, "exact")
}

/// Splits `ids` (jointly feasible under the instance capacities) into two
/// halves that are each feasible under the tighter `caps`: tasks are taken
/// by start vertex and placed into the first half with room. Fails only if
/// some task fits in neither half, which the callers' demand bounds rule
/// out.
pub fn two_partition(
    inst: &Instance,
    ids: &[usize],
    caps: &[i64],
) -> Result<(Vec<usize>, Vec<usize>)> {
    if caps.len() != inst.m {
        return Err(Error::Invalid(format!(
            "expected {} capacities, got {}",
            inst.m,
            caps.len()
        )));
    }
    let mut order: Vec<usize> = ids.to_vec();
    for &id in &order {
        inst.task(id)?;
    }
    order.sort_unstable_by_key(|&id| (inst.tasks[id].s, id));

    let mut halves = [Half::new(inst.m), Half::new(inst.m)];
    for &id in &order {
        let task = &inst.tasks[id];
        let slot = halves.iter_mut().find(|h| h.fits(task, caps));
        match slot {
            Some(h) => h.place(task),
            None => {
                return Err(Error::Precondition(format!(
                    "task {id} fits in neither half under the reduced capacities"
                )))
            }
        }
    }
    let [h1, h2] = halves;
    Ok((h1.ids, h2.ids))
}

/// Medium-demand solver: computes the exact crossing-bounded optimum under
/// the original capacities, then keeps the heavier half of a two-way split
/// that respects `modified_caps`. Profit is at least half the optimum over
/// `ids`, and the output leaves the capacity margin `modified_caps`
/// encodes. When `modified_caps` equals the instance capacities the split
/// is skipped.
pub fn solve_medium(
    inst: &Instance,
    ids: &[usize],
    modified_caps: &[i64],
    crossing_bound: usize,
    budget: usize,
) -> Result<Solution> {
    let exact = solve_exact_bounded(inst, ids, &inst.capacities, crossing_bound, budget)?;
    if modified_caps == &inst.capacities[..] {
        return Solution::new(inst, exact.selected, "medium");
    }
    let (h1, h2) = two_partition(inst, &exact.selected, modified_caps)?;
    let w = |ids: &[usize]| ids.iter().map(|&id| inst.tasks[id].w).sum::<i64>();
    let keep = if w(&h2) > w(&h1) { h2 } else { h1 };
    Solution::new(inst, keep, "medium")
}

struct Half {
    ids: Vec<usize>,
    loads: Vec<i64>,
}

impl Half {
    fn new(m: usize) -> Half {
        Half { ids: Vec::new(), loads: vec![0; m] }
    }

    fn fits(&self, task: &crate::model::Task, caps: &[i64]) -> bool {
        task.edges().all(|e| self.loads[e] + task.d <= caps[e])
    }

    fn place(&mut self, task: &crate::model::Task) {
        for e in task.edges() {
            self.loads[e] += task.d;
        }
        self.ids.push(task.id);
    }
}

#[derive(Debug, Clone, Copy)]
struct SweepTask {
    s: usize,
    t: usize,
    d: i64,
    w: i64,
    id: usize,
}

/// Set-of-open-tasks key. Implementations must keep members sorted and
/// deduplicated; `with_opened` receives strictly ascending indices disjoint
/// from the current members.
trait SweepKey: Clone + Eq + Hash {
    fn empty() -> Self;
    fn close(&self, v: usize, tasks: &[SweepTask]) -> Self;
    fn with_opened(&self, opened: &[u32]) -> Self;
    fn for_each(&self, f: impl FnMut(u32));
}

impl SweepKey for u64 {
    fn empty() -> u64 {
        0
    }

    fn close(&self, v: usize, tasks: &[SweepTask]) -> u64 {
        let mut out = *self;
        let mut rest = *self;
        while rest != 0 {
            let idx = rest.trailing_zeros();
            rest &= rest - 1;
            if tasks[idx as usize].t == v {
                out &= !(1u64 << idx);
            }
        }
        out
    }

    fn with_opened(&self, opened: &[u32]) -> u64 {
        let mut out = *self;
        for &idx in opened {
            out |= 1u64 << idx;
        }
        out
    }

    fn for_each(&self, mut f: impl FnMut(u32)) {
        let mut rest = *self;
        while rest != 0 {
            f(rest.trailing_zeros());
            rest &= rest - 1;
        }
    }
}

impl SweepKey for Box<[u32]> {
    fn empty() -> Box<[u32]> {
        Vec::new().into_boxed_slice()
    }

    fn close(&self, v: usize, tasks: &[SweepTask]) -> Box<[u32]> {
        self.iter()
            .copied()
            .filter(|&idx| tasks[idx as usize].t != v)
            .collect()
    }

    fn with_opened(&self, opened: &[u32]) -> Box<[u32]> {
        let mut out = Vec::with_capacity(self.len() + opened.len());
        out.extend_from_slice(self);
        out.extend_from_slice(opened);
        out.sort_unstable();
        out.into_boxed_slice()
    }

    fn for_each(&self, mut f: impl FnMut(u32)) {
        for &idx in self.iter() {
            f(idx);
        }
    }
}

struct Entry<K> {
    key: K,
    opened: K,
    profit: i64,
    load: i64,
    parent: u32,
}

/// Closes tasks ending at `v` for every entry of `input`, merging entries
/// whose open sets then coincide (the future depends only on that set, so
/// the best profit wins; ties keep the earlier parent). Each result's
/// `parent` is the index of its chosen `input` entry.
fn close_layer<K: SweepKey>(input: &[Entry<K>], v: usize, tasks: &[SweepTask]) -> Vec<Entry<K>> {
    let mut closed: Vec<Entry<K>> = Vec::new();
    let mut index: HashMap<K, u32> = HashMap::new();
    for (pidx, entry) in input.iter().enumerate() {
        let key = entry.key.close(v, tasks);
        let mut dropped = 0i64;
        entry.key.for_each(|idx| {
            if tasks[idx as usize].t == v {
                dropped += tasks[idx as usize].d;
            }
        });
        let load = entry.load - dropped;
        match index.get(&key) {
            Some(&at) => {
                let slot = &mut closed[at as usize];
                debug_assert_eq!(slot.load, load, "same open set, same load");
                if entry.profit > slot.profit {
                    slot.profit = entry.profit;
                    slot.parent = pidx as u32;
                }
            }
            None => {
                index.insert(key.clone(), closed.len() as u32);
                closed.push(Entry {
                    key,
                    opened: K::empty(),
                    profit: entry.profit,
                    load,
                    parent: pidx as u32,
                });
            }
        }
    }
    closed
}

fn run_sweep<K: SweepKey>(
    m: usize,
    caps: &[i64],
    tasks: &[SweepTask],
    crossing_bound: usize,
    budget: usize,
) -> Result<Vec<usize>> {
    let mut starters: Vec<Vec<u32>> = vec![Vec::new(); m];
    for (idx, task) in tasks.iter().enumerate() {
        starters[task.s].push(idx as u32);
    }

    // layers[v] holds the states right after vertex v: tasks ending there
    // closed, then every admissible set of starters opened. Entry parents
    // point into layers[v - 1]; layer 0 points at the synthetic root.
    let root = vec![Entry {
        key: K::empty(),
        opened: K::empty(),
        profit: 0,
        load: 0,
        parent: u32::MAX,
    }];
    let mut states: usize = 0;
    let mut layers: Vec<Vec<Entry<K>>> = Vec::with_capacity(m);

    for v in 0..m {
        let input = layers.last().unwrap_or(&root);
        let mut closed = close_layer(input, v, tasks);
        // a state overloading edge v cannot recover: loads only grow until
        // the next close, which happens past the edge
        closed.retain(|e| e.load <= caps[v]);

        let branched = if starters[v].is_empty() {
            states += closed.len();
            if states > budget {
                return Err(Error::Budget { states, budget });
            }
            closed
        } else {
            let mut next: Vec<Entry<K>> = Vec::new();
            for base in &closed {
                let mut open_count = 0usize;
                base.key.for_each(|_| open_count += 1);
                let mut chosen: Vec<u32> = Vec::new();
                branch(
                    &starters[v],
                    0,
                    tasks,
                    base,
                    base.load,
                    base.profit,
                    open_count,
                    caps[v],
                    crossing_bound,
                    &mut chosen,
                    &mut next,
                    &mut states,
                    budget,
                )?;
            }
            next
        };
        layers.push(branched);
    }

    // every task ends by vertex m, so closing there leaves one empty state;
    // the empty selection survives all checks, so layers are never empty
    let final_states = close_layer(layers.last().unwrap_or(&root), m, tasks);
    debug_assert_eq!(final_states.len(), 1);
    let last = &final_states[0];

    let mut picked = Vec::new();
    let mut at = last.parent;
    for layer in layers.iter().rev() {
        let entry = &layer[at as usize];
        entry.opened.for_each(|idx| picked.push(tasks[idx as usize].id));
        at = entry.parent;
    }
    debug_assert_eq!(at, 0, "chain ends at the synthetic root");
    Ok(picked)
}

#[allow(clippy::too_many_arguments)]
fn branch<K: SweepKey>(
    starters: &[u32],
    from: usize,
    tasks: &[SweepTask],
    base: &Entry<K>,
    load: i64,
    profit: i64,
    count: usize,
    cap: i64,
    crossing_bound: usize,
    chosen: &mut Vec<u32>,
    next: &mut Vec<Entry<K>>,
    states: &mut usize,
    budget: usize,
) -> Result<()> {
    if from == starters.len() {
        *states += 1;
        if *states > budget {
            return Err(Error::Budget { states: *states, budget });
        }
        next.push(Entry {
            key: base.key.with_opened(chosen),
            opened: K::empty().with_opened(chosen),
            profit,
            load,
            parent: base.parent,
        });
        return Ok(());
    }
    let idx = starters[from];
    let task = tasks[idx as usize];
    // include, when edge capacity and the crossing bound allow it
    if load + task.d <= cap && count < crossing_bound {
        chosen.push(idx);
        branch(
            starters,
            from + 1,
            tasks,
            base,
            load + task.d,
            profit + task.w,
            count + 1,
            cap,
            crossing_bound,
            chosen,
            next,
            states,
            budget,
        )?;
        chosen.pop();
    }
    branch(
        starters, from + 1, tasks, base, load, profit, count, cap, crossing_bound, chosen, next,
        states, budget,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_feasible, Task};

    fn inst_from(caps: &[i64], tasks: &[(usize, usize, i64, i64)]) -> Instance {
        let tasks = tasks
            .iter()
            .enumerate()
            .map(|(id, &(s, t, d, w))| Task { id, s, t, d, w })
            .collect();
        Instance::new(caps.len(), caps.to_vec(), tasks).unwrap()
    }

    fn all_ids(inst: &Instance) -> Vec<usize> {
        (0..inst.n()).collect()
    }

    #[test]
    fn sweep_finds_the_exact_optimum() {
        let inst = inst_from(&[2, 2], &[(0, 2, 2, 3), (0, 1, 1, 2), (1, 2, 1, 2)]);
        let sol =
            solve_exact_bounded(&inst, &all_ids(&inst), &inst.capacities, 3, 10_000).unwrap();
        assert_eq!(sol.profit, 4);
        assert_eq!(sol.selected, vec![1, 2]);
    }

    #[test]
    fn sweep_drops_states_that_overload_later_edges() {
        // the task fits where it starts but not on its second edge
        let inst = inst_from(&[5, 3], &[(0, 2, 5, 9), (0, 1, 5, 1)]);
        let sol =
            solve_exact_bounded(&inst, &all_ids(&inst), &inst.capacities, 2, 10_000).unwrap();
        assert_eq!(sol.selected, vec![1]);
    }

    #[test]
    fn crossing_bound_restricts_concurrency() {
        let inst = inst_from(&[10], &[(0, 1, 1, 3), (0, 1, 1, 2), (0, 1, 1, 1)]);
        let free =
            solve_exact_bounded(&inst, &all_ids(&inst), &inst.capacities, 3, 10_000).unwrap();
        assert_eq!(free.profit, 6);
        let bounded =
            solve_exact_bounded(&inst, &all_ids(&inst), &inst.capacities, 2, 10_000).unwrap();
        assert_eq!(bounded.profit, 5);
        assert_eq!(bounded.selected, vec![0, 1]);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let inst = inst_from(&[10], &[(0, 1, 1, 1), (0, 1, 1, 1), (0, 1, 1, 1)]);
        match solve_exact_bounded(&inst, &all_ids(&inst), &inst.capacities, 3, 4) {
            Err(Error::Budget { states, budget }) => {
                assert!(states > budget);
                assert_eq!(budget, 4);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn negative_capacities_admit_no_load() {
        let inst = inst_from(&[5, 5], &[(0, 1, 1, 5), (1, 2, 1, 7)]);
        let caps = vec![-1, 5];
        let sol = solve_exact_bounded(&inst, &all_ids(&inst), &caps, 2, 10_000).unwrap();
        assert_eq!(sol.selected, vec![1]);
    }

    #[test]
    fn wide_key_path_matches_small_instances() {
        // 70 unit tasks force the sorted-slice key representation
        let tasks: Vec<(usize, usize, i64, i64)> =
            (0..70).map(|i| (0, 1, 1, (i % 7) as i64 + 1)).collect();
        let inst = inst_from(&[2], &tasks);
        let sol =
            solve_exact_bounded(&inst, &all_ids(&inst), &inst.capacities, 70, 100_000).unwrap();
        assert_eq!(sol.profit, 14, "two heaviest unit tasks");
        assert_eq!(sol.selected.len(), 2);
    }

    #[test]
    fn two_partition_splits_when_margin_halves() {
        let inst = inst_from(&[4], &[(0, 1, 2, 5), (0, 1, 2, 4)]);
        let (h1, h2) = two_partition(&inst, &[0, 1], &[2]).unwrap();
        assert_eq!(h1, vec![0]);
        assert_eq!(h2, vec![1]);
    }

    #[test]
    fn two_partition_rejects_overfull_input() {
        let inst = inst_from(&[6], &[(0, 1, 2, 1), (0, 1, 2, 1), (0, 1, 2, 1)]);
        assert!(two_partition(&inst, &[0, 1, 2], &[2]).is_err());
    }

    #[test]
    fn medium_keeps_heavier_half_and_respects_margin() {
        let inst = inst_from(&[4], &[(0, 1, 2, 5), (0, 1, 2, 4)]);
        let sol = solve_medium(&inst, &[0, 1], &[2], 2, 10_000).unwrap();
        assert_eq!(sol.selected, vec![0]);
        assert_eq!(sol.profit, 5);
        assert!(check_feasible(&inst, &sol.selected).unwrap().feasible);
    }

    #[test]
    fn medium_without_margin_returns_the_exact_optimum() {
        let inst = inst_from(&[2, 2], &[(0, 2, 2, 3), (0, 1, 1, 2), (1, 2, 1, 2)]);
        let sol = solve_medium(&inst, &all_ids(&inst), &inst.capacities, 3, 10_000).unwrap();
        assert_eq!(sol.profit, 4);
        assert_eq!(sol.algorithm_tag, "medium");
    }

    #[test]
    fn sweep_agrees_with_exhaustive_search_on_random_instances() {
        use crate::gen::{gen_random, GenParams, ProfitMode};
        use crate::oracle::brute_force;
        for seed in 1..=300u64 {
            let params = GenParams {
                n: 2 + (seed % 11) as usize,
                m: 2 + (seed % 8) as usize,
                cap_max: 1 + (seed % 30) as i64,
                demand_max: 1 + (seed % 12) as i64,
                profit: if seed % 2 == 0 { ProfitMode::Uniform } else { ProfitMode::Proportional },
                seed: seed.wrapping_mul(0x9E3779B9),
            };
            let inst = gen_random(&params).unwrap();
            let ids = all_ids(&inst);
            let brute = brute_force(&inst, &ids).unwrap();
            let sweep =
                solve_exact_bounded(&inst, &ids, &inst.capacities, ids.len(), 1_000_000).unwrap();
            assert_eq!(sweep.profit, brute.profit, "seed {seed}");
            assert!(check_feasible(&inst, &sweep.selected).unwrap().feasible, "seed {seed}");
        }
    }

    #[test]
    fn sweep_is_deterministic_across_runs() {
        let inst = inst_from(
            &[3, 3, 3],
            &[(0, 2, 1, 2), (1, 3, 1, 2), (0, 3, 1, 2), (0, 1, 2, 2), (2, 3, 2, 2)],
        );
        let a = solve_exact_bounded(&inst, &all_ids(&inst), &inst.capacities, 5, 100_000).unwrap();
        let b = solve_exact_bounded(&inst, &all_ids(&inst), &inst.capacities, 5, 100_000).unwrap();
        assert_eq!(a, b);
    }
}
