//! Rectangle geometry for tasks and an exact solver for maximum-profit
//! independent task sets.
//!
//! Every deliverable task spans an axis-aligned rectangle: horizontally its
//! subpath `[s, t]`, vertically the band from its slack `b - d` up to its
//! bottleneck capacity `b`. Two tasks are *compatible* when their
//! rectangles are separated horizontally or vertically; a set of pairwise
//! compatible deliverable tasks is an independent task set (ITS), and every
//! ITS fits under the capacity profile simultaneously.
//!
//! [`max_its`] finds a maximum-profit ITS exactly by dynamic programming
//! over capacity corners of a normalized copy of the instance (runs of
//! unused edges contracted, capacities rescaled to be pairwise distinct).
//! Compatibility on the normalized instance implies compatibility on the
//! original, so results transfer back; ties where one task's slack equals
//! another's bottleneck can be broken by the rescaling, which is why every
//! exact ITS computation in this crate runs on the same normalized form.

use std::collections::{HashMap, HashSet};

use crate::model::{bottleneck, check_feasible, compact, perturb, Instance, Solution, Task};
use crate::{Error, Result};

/// Task rectangle: `[x1, x2]` horizontally, `[y2, y1]` vertically
/// (`y1` is the bottleneck capacity, `y2` the slack left under it).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x1: usize,
    pub y1: i64,
    pub x2: usize,
    pub y2: i64,
}

pub fn rect_of(inst: &Instance, task: &Task) -> Rect {
    let meta = bottleneck(inst, task);
    Rect { x1: task.s, y1: meta.b, x2: task.t, y2: meta.slack }
}

/// Rectangles are compatible when disjoint along one axis: one ends before
/// the other starts, or one's top sits at or below the other's bottom.
pub fn compatible(a: &Rect, b: &Rect) -> bool {
    a.x2 <= b.x1 || b.x2 <= a.x1 || a.y1 <= b.y2 || b.y1 <= a.y2
}

/// True when `ids` names deliverable tasks whose rectangles are pairwise
/// compatible. Repeating an id fails (no rectangle is self-compatible).
pub fn is_its(inst: &Instance, ids: &[usize]) -> Result<bool> {
    let mut rects = Vec::with_capacity(ids.len());
    for &id in ids {
        let rect = rect_of(inst, inst.task(id)?);
        if rect.y2 < 0 {
            return Ok(false);
        }
        rects.push(rect);
    }
    for i in 0..rects.len() {
        for j in i + 1..rects.len() {
            if !compatible(&rects[i], &rects[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The normalized form shared by the exact ITS solvers: contract runs of
/// edges no task endpoint touches, then rescale so capacities are pairwise
/// distinct. Task ids survive both steps.
pub fn normalized_for_its(inst: &Instance) -> Result<Instance> {
    let (contracted, _) = compact(inst);
    perturb(&contracted)
}

/// Outcome of an exact ITS computation, with the state count of the
/// dynamic program for capacity planning.
#[derive(Debug, Clone)]
pub struct ItsOutcome {
    pub solution: Solution,
    pub memo_states: usize,
    pub normalized_edges: usize,
}

/// Maximum-profit ITS over all deliverable tasks.
pub fn max_its(inst: &Instance) -> Result<ItsOutcome> {
    let all: Vec<usize> = (0..inst.n()).collect();
    max_its_on(inst, &all)
}

/// Maximum-profit ITS restricted to `ids` (undeliverable ids are dropped,
/// since no ITS can contain them).
pub fn max_its_on(inst: &Instance, ids: &[usize]) -> Result<ItsOutcome> {
    let mut seen = vec![false; inst.n()];
    let mut eligible = Vec::new();
    for &id in ids {
        let task = inst.task(id)?;
        if seen[id] {
            return Err(Error::Invalid(format!("duplicate id {id}")));
        }
        seen[id] = true;
        if bottleneck(inst, task).slack >= 0 {
            eligible.push(id);
        }
    }
    eligible.sort_unstable();

    let norm = normalized_for_its(inst)?;
    let mut tasks = Vec::with_capacity(eligible.len());
    let mut total: i64 = 0;
    for &id in &eligible {
        let task = &norm.tasks[id];
        let meta = bottleneck(&norm, task);
        debug_assert!(meta.slack >= 0, "normalization keeps deliverability");
        total = total.checked_add(task.w).ok_or(Error::Overflow("its profit sum"))?;
        tasks.push(DpTask { s: task.s, t: task.t, b: meta.b, ell: meta.slack, w: task.w, id });
    }

    // deep shrink chains need room; run the recursion on a roomy stack
    let norm_ref = &norm;
    let (value, picked, memo_states) = std::thread::scope(|scope| {
        std::thread::Builder::new()
            .name("its-corner-dp".into())
            .stack_size(512 << 20)
            .spawn_scoped(scope, move || {
                let mut dp = CornerDp::new(norm_ref, tasks);
                let root = (norm_ref.m, 0, dp.top);
                let value = dp.solve(root, u128::MAX);
                let picked = dp.collect(root);
                (value, picked, dp.memo.len())
            })
            .expect("spawn corner dp thread")
            .join()
            .expect("corner dp thread panicked")
    });

    let solution = Solution::new(inst, picked, "its")?;
    if solution.profit != value {
        return Err(Error::Internal(format!(
            "its value {value} disagrees with reconstructed profit {}",
            solution.profit
        )));
    }
    if !is_its(inst, &solution.selected)? {
        return Err(Error::Internal("its output is not pairwise compatible".into()));
    }
    let report = check_feasible(inst, &solution.selected)?;
    if !report.feasible {
        return Err(Error::Internal("its output violates capacities".into()));
    }
    Ok(ItsOutcome { solution, memo_states, normalized_edges: norm.m })
}

/// Approximation for instances where every deliverable task demands more
/// than a `1/k` share of its bottleneck capacity: the best ITS among those
/// tasks, which is within a factor `2k` of the optimum over them.
pub fn solve_large(inst: &Instance, k: i64) -> Result<Solution> {
    if k < 2 {
        return Err(Error::Precondition(format!("large-task solver needs k >= 2, got {k}")));
    }
    let mut ids = Vec::new();
    for task in &inst.tasks {
        let meta = bottleneck(inst, task);
        let kd = task.d.checked_mul(k).ok_or(Error::Overflow("largeness test"))?;
        if meta.slack >= 0 && kd > meta.b {
            ids.push(task.id);
        }
    }
    let outcome = max_its_on(inst, &ids)?;
    Solution::new(inst, outcome.solution.selected, "large")
}

#[derive(Debug, Clone, Copy)]
struct DpTask {
    s: usize,
    t: usize,
    b: i64,
    ell: i64,
    w: i64,
    id: usize,
}

type Triple = (usize, i64, i64);

#[derive(Debug, Clone, Copy)]
enum Choice {
    /// Move the sweep boundary one edge (left below the diagonal, right
    /// above it) without taking a task.
    Step(Triple),
    /// Cut the region at a capacity corner into two subregions.
    Split(Triple, Triple),
    /// Take the task at this index and recurse on the two regions its
    /// rectangle leaves free.
    Pick(usize, Triple, Triple),
}

/// Range-minimum table over the capacity profile, for locating the nearest
/// edge at or below a height threshold.
struct SparseMin {
    rows: Vec<Vec<i64>>,
}

impl SparseMin {
    fn new(vals: &[i64]) -> SparseMin {
        let n = vals.len();
        let levels = if n <= 1 { 1 } else { (usize::BITS - (n - 1).leading_zeros()) as usize + 1 };
        let mut rows = Vec::with_capacity(levels);
        rows.push(vals.to_vec());
        let mut len = 1;
        for _ in 1..levels {
            let prev = rows.last().expect("row exists");
            let mut row = Vec::with_capacity(n.saturating_sub(2 * len) + 1);
            for i in 0..n.saturating_sub(2 * len) + 1 {
                if i + 2 * len <= n {
                    row.push(prev[i].min(prev[i + len]));
                }
            }
            rows.push(row);
            len *= 2;
        }
        SparseMin { rows }
    }

    /// min over `[l, r)`; requires `l < r`.
    fn min(&self, l: usize, r: usize) -> i64 {
        debug_assert!(l < r && r <= self.rows[0].len());
        let span = r - l;
        let level = (usize::BITS - 1 - span.leading_zeros()) as usize;
        let len = 1usize << level;
        self.rows[level][l].min(self.rows[level][r - len])
    }
}

struct CornerDp {
    m: usize,
    caps: Vec<i64>,
    top: i64,
    tasks: Vec<DpTask>,
    rmq: SparseMin,
    memo: HashMap<Triple, (i64, Choice)>,
    corner_values: HashSet<i64>,
}

impl CornerDp {
    fn new(norm: &Instance, tasks: Vec<DpTask>) -> CornerDp {
        let caps = norm.capacities.clone();
        let top = *caps.iter().max().expect("m >= 1");
        let rmq = SparseMin::new(&caps);
        let mut corner_values: HashSet<i64> = caps.iter().copied().collect();
        corner_values.insert(0);
        corner_values.insert(top);
        CornerDp { m: norm.m, caps, top, tasks, rmq, memo: HashMap::new(), corner_values }
    }

    /// Right end of the maximal height-`y` wall left of `x`: one past the
    /// rightmost edge below `x` with capacity at most `y`, or 0.
    fn wall_left(&self, x: usize, y: i64) -> usize {
        if x == 0 || self.rmq.min(0, x) > y {
            return 0;
        }
        let (mut lo, mut hi) = (0, x - 1);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.rmq.min(mid, x) <= y {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo + 1
    }

    /// Leftmost edge at or right of `x` with capacity at most `z`, or `m`.
    fn wall_right(&self, x: usize, z: i64) -> usize {
        if x == self.m || self.rmq.min(x, self.m) > z {
            return self.m;
        }
        let (mut lo, mut hi) = (x, self.m - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.rmq.min(x, mid + 1) <= z {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    /// Canonical form of a region descriptor. Clamps each height to the
    /// ceiling when its boundary edge already blocks it, detects empty
    /// regions by coinciding walls, and resolves the degenerate equal-
    /// heights case by sliding the boundary to the right wall. The loop
    /// reruns at most once: after the slide the right height is the
    /// ceiling, and either the left height joins it (empty region next
    /// pass) or the heights now differ.
    fn normalize(&self, mut x: usize, mut y: i64, mut z: i64) -> Option<(usize, i64, i64, usize, usize)> {
        loop {
            if x == 0 || y >= self.caps[x - 1] {
                y = self.top;
            }
            if x == self.m || z >= self.caps[x] {
                z = self.top;
            }
            let wl = self.wall_left(x, y);
            let wr = self.wall_right(x, z);
            if wl == wr {
                return None;
            }
            if y == z {
                z = self.top;
                x = wr;
                continue;
            }
            return Some((x, y, z, wl, wr));
        }
    }

    fn area(&self, x: usize, y: i64, z: i64, wl: usize, wr: usize) -> u128 {
        (x - wl) as u128 * (self.top - y) as u128 + (wr - x) as u128 * (self.top - z) as u128
    }

    /// Maximum ITS profit inside the region described by `raw`, taking only
    /// tasks whose rectangles fit it. `bound` is the caller's region area;
    /// every recursive call strictly shrinks it, which is the termination
    /// measure.
    fn solve(&mut self, raw: Triple, bound: u128) -> i64 {
        let Some((x, y, z, wl, wr)) = self.normalize(raw.0, raw.1, raw.2) else {
            return 0;
        };
        let key = (x, y, z);
        if let Some(&(value, _)) = self.memo.get(&key) {
            return value;
        }
        let area = self.area(x, y, z, wl, wr);
        debug_assert!(area < bound, "region area must shrink: {area} !< {bound} at {key:?}");
        debug_assert!(
            self.corner_values.contains(&y) && self.corner_values.contains(&z),
            "heights stay on capacity corners: {key:?}"
        );

        let (value, choice) = if y < z {
            let split = x >= 1 && x < self.m && self.caps[x - 1] <= z && z < self.caps[x];
            if split {
                let a = (x, y, self.top);
                let b = (x, self.top, z);
                (self.solve(a, area) + self.solve(b, area), Choice::Split(a, b))
            } else {
                // x >= 1 here: x = 0 forces y to the ceiling, so y < z cannot hold
                let step = (x - 1, y, z);
                let mut best = self.solve(step, area);
                let mut choice = Choice::Step(step);
                for idx in 0..self.tasks.len() {
                    let t = self.tasks[idx];
                    if wl <= t.s && t.t <= x && t.ell >= y {
                        let a = (t.s, y, t.b);
                        let b = (x, t.b, z);
                        let v = t.w + self.solve(a, area) + self.solve(b, area);
                        if v > best {
                            best = v;
                            choice = Choice::Pick(idx, a, b);
                        }
                    }
                }
                (best, choice)
            }
        } else {
            let split = x >= 1 && x < self.m && self.caps[x] <= y && y < self.caps[x - 1];
            if split {
                let a = (x, y, self.top);
                let b = (x, self.top, z);
                (self.solve(a, area) + self.solve(b, area), Choice::Split(a, b))
            } else {
                // x <= m - 1 here: x = m forces z to the ceiling, so y > z cannot hold
                let step = (x + 1, y, z);
                let mut best = self.solve(step, area);
                let mut choice = Choice::Step(step);
                for idx in 0..self.tasks.len() {
                    let t = self.tasks[idx];
                    if t.s >= x && t.t <= wr && t.ell >= z {
                        let a = (t.t, t.b, z);
                        let b = (x, y, t.b);
                        let v = t.w + self.solve(a, area) + self.solve(b, area);
                        if v > best {
                            best = v;
                            choice = Choice::Pick(idx, a, b);
                        }
                    }
                }
                (best, choice)
            }
        };
        self.memo.insert(key, (value, choice));
        value
    }

    /// Replays stored choices from the root and gathers the picked ids.
    fn collect(&self, root: Triple) -> Vec<usize> {
        let mut ids = Vec::new();
        let mut stack = vec![root];
        while let Some(raw) = stack.pop() {
            let Some((x, y, z, _, _)) = self.normalize(raw.0, raw.1, raw.2) else {
                continue;
            };
            match self.memo[&(x, y, z)].1 {
                Choice::Step(next) => stack.push(next),
                Choice::Split(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                Choice::Pick(idx, a, b) => {
                    ids.push(self.tasks[idx].id);
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        ids
    }
}
