//! Constructive partition of a feasible large-task set into compatible
//! classes.
//!
//! For an integer `k >= 2`, any jointly feasible set whose tasks all have
//! demand above a `1/k` fraction of their bottleneck capacity splits into
//! at most `2k` classes of pairwise compatible rectangles. The classes are
//! encoded as a coloring, and the construction additionally keeps the
//! coloring "nice": around every bottleneck edge, the tasks using the edge
//! that conflict with its owner all receive distinct colors. Niceness is
//! what makes the recursive stitching work, and it is the property the
//! validator checks.
//!
//! The recursion mirrors the inductive existence proof. Sets of at most
//! `2k` tasks are colored distinctly. Otherwise the cheapest bottleneck
//! edge is located; the tasks `L` crossing it number at most `k`, and the
//! bottleneck edges of every task conflicting with `L` (or inside `L`)
//! form the separator list `e_1 < ... < e_p`. The separators carve the
//! task set into overlapping windows `F_0 .. F_p`. If every window is a
//! proper subset, each window is colored recursively and the colorings are
//! stitched left to right: the overlap with the next window sits on a
//! separator, where niceness forces distinct colors on both sides, so a
//! color permutation aligns them. If some window equals the whole set, the
//! recursion instead removes `L`, colors the remainder, and hands `L` the
//! smallest colors unused by the tasks on the two separators bounding the
//! window; the counting argument leaves at least `|L|` of the `2k` colors
//! free.

use std::collections::{BTreeMap, BTreeSet};

use crate::its::{compatible, rect_of, Rect};
use crate::model::{bottleneck, check_feasible, Instance};
use crate::{Error, Result};

/// Task id to color (colors start at 1).
pub type Coloring = BTreeMap<usize, u32>;

/// Builds a nice coloring of `ids` with at most `2k` colors. `ids` must be
/// jointly feasible and every task must have `k * d > b`. The output is
/// re-validated before it is returned.
pub fn nice_coloring(inst: &Instance, ids: &[usize], k: i64) -> Result<Coloring> {
    if k < 2 {
        return Err(Error::Precondition(format!("coloring needs k >= 2, got {k}")));
    }
    let mut f = Vec::with_capacity(ids.len());
    let mut seen = vec![false; inst.n()];
    for &id in ids {
        inst.task(id)?;
        if seen[id] {
            return Err(Error::Invalid(format!("duplicate id {id}")));
        }
        seen[id] = true;
        f.push(id);
    }
    f.sort_unstable();
    if !check_feasible(inst, &f)?.feasible {
        return Err(Error::Precondition("task set is not jointly feasible".into()));
    }
    for &id in &f {
        let task = &inst.tasks[id];
        let meta = bottleneck(inst, task);
        if (k as i128) * (task.d as i128) <= meta.b as i128 {
            return Err(Error::Precondition(format!(
                "task {id} is not large enough for k = {k}"
            )));
        }
    }

    let ctx = Ctx {
        inst,
        k: k as usize,
        rects: inst.tasks.iter().map(|t| rect_of(inst, t)).collect(),
    };
    let coloring = ctx.color(&f)?;
    if !check_coloring(inst, &f, &coloring, k)? {
        return Err(Error::Internal("constructed coloring failed validation".into()));
    }
    Ok(coloring)
}

/// Validates a coloring of `ids`: every id colored in `1 ..= 2k`, every
/// color class pairwise compatible, and the nice property around every
/// bottleneck edge: for each task `i` and each edge `e` of minimal
/// capacity on its span, the tasks using `e` that are incompatible with
/// `i` carry pairwise distinct colors.
pub fn check_coloring(
    inst: &Instance,
    ids: &[usize],
    coloring: &Coloring,
    k: i64,
) -> Result<bool> {
    let rects: Vec<Rect> = inst.tasks.iter().map(|t| rect_of(inst, t)).collect();
    for &id in ids {
        inst.task(id)?;
        let Some(&color) = coloring.get(&id) else {
            return Ok(false);
        };
        if color == 0 || (color as u128) > 2 * (k as u128) {
            return Ok(false);
        }
    }
    for (a, &id_a) in ids.iter().enumerate() {
        for &id_b in &ids[a + 1..] {
            if coloring[&id_a] == coloring[&id_b] && !compatible(&rects[id_a], &rects[id_b]) {
                return Ok(false);
            }
        }
    }
    for &id in ids {
        for e in bottleneck_edges(inst, id) {
            let mut used = BTreeSet::new();
            for &other in ids {
                if other == id
                    || !inst.tasks[other].uses_edge(e)
                    || compatible(&rects[id], &rects[other])
                {
                    continue;
                }
                if !used.insert(coloring[&other]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Edges of minimal capacity on the task's span.
fn bottleneck_edges(inst: &Instance, id: usize) -> Vec<usize> {
    let task = &inst.tasks[id];
    let b = bottleneck(inst, task).b;
    task.edges().filter(|&e| inst.capacities[e] == b).collect()
}

struct Ctx<'a> {
    inst: &'a Instance,
    k: usize,
    rects: Vec<Rect>,
}

impl Ctx<'_> {
    fn incompatible(&self, a: usize, b: usize) -> bool {
        a != b && !compatible(&self.rects[a], &self.rects[b])
    }

    /// `f` is sorted, jointly feasible, and all large; returns a nice
    /// coloring with at most `2k` colors.
    fn color(&self, f: &[usize]) -> Result<Coloring> {
        if f.len() <= 2 * self.k {
            return Ok(f
                .iter()
                .enumerate()
                .map(|(pos, &id)| (id, pos as u32 + 1))
                .collect());
        }

        // cheapest bottleneck edge and the tasks crossing it
        let b_min = f
            .iter()
            .map(|&id| self.rects[id].y1)
            .min()
            .expect("nonempty set");
        let e_b = f
            .iter()
            .filter(|&&id| self.rects[id].y1 == b_min)
            .flat_map(|&id| bottleneck_edges(self.inst, id))
            .min()
            .expect("a cheapest task has a bottleneck edge");
        let users: Vec<usize> = f
            .iter()
            .copied()
            .filter(|&id| self.inst.tasks[id].uses_edge(e_b))
            .collect();
        if users.is_empty() || users.len() > self.k {
            return Err(Error::Internal(format!(
                "edge {e_b} carries {} large tasks, expected 1..={}",
                users.len(),
                self.k
            )));
        }

        // separators: all bottleneck edges of tasks in or conflicting
        // with the crossing set
        let mut separators: BTreeSet<usize> = BTreeSet::new();
        for &id in f {
            let qualifies = users.contains(&id)
                || users.iter().any(|&u| self.incompatible(id, u));
            if qualifies {
                separators.extend(bottleneck_edges(self.inst, id));
            }
        }
        let es: Vec<usize> = separators.into_iter().collect();
        let p = es.len();

        // overlapping windows between consecutive separators
        let mut windows: Vec<Vec<usize>> = Vec::with_capacity(p + 1);
        for j in 0..=p {
            let member = |id: usize| {
                let task = &self.inst.tasks[id];
                let left_ok = j == 0 || task.t > es[j - 1];
                let right_ok = j == p || task.s <= es[j];
                left_ok && right_ok
            };
            windows.push(f.iter().copied().filter(|&id| member(id)).collect());
        }

        if let Some(j) = windows.iter().position(|w| w.len() == f.len()) {
            self.color_around_users(f, &users, &es, j)
        } else {
            self.color_stitched(&windows, &es)
        }
    }

    /// Whole-set window: color the set without the crossing tasks, then
    /// give those the smallest colors unused on the window's bounding
    /// separators.
    fn color_around_users(
        &self,
        f: &[usize],
        users: &[usize],
        es: &[usize],
        j: usize,
    ) -> Result<Coloring> {
        let rest: Vec<usize> = f.iter().copied().filter(|id| !users.contains(id)).collect();
        let mut coloring = self.color(&rest)?;

        let mut blocked: BTreeSet<u32> = BTreeSet::new();
        let mut bounding = Vec::new();
        if j >= 1 {
            bounding.push(es[j - 1]);
        }
        if j < es.len() {
            bounding.push(es[j]);
        }
        for &id in &rest {
            if bounding.iter().any(|&e| self.inst.tasks[id].uses_edge(e)) {
                blocked.insert(coloring[&id]);
            }
        }
        let mut next = 1u32;
        for &id in users {
            while blocked.contains(&next) {
                next += 1;
            }
            coloring.insert(id, next);
            blocked.insert(next);
        }
        Ok(coloring)
    }

    /// Every window is a proper subset: color each recursively and merge
    /// left to right. The overlap with the already-merged prefix sits on
    /// the separator left of the window, where both colorings are
    /// injective, so a color permutation aligns them.
    fn color_stitched(&self, windows: &[Vec<usize>], es: &[usize]) -> Result<Coloring> {
        let mut merged = self.color(&windows[0])?;
        for (j, window) in windows.iter().enumerate().skip(1) {
            let alpha = self.color(window)?;
            let mut perm: BTreeMap<u32, u32> = BTreeMap::new();
            let mut taken: BTreeSet<u32> = BTreeSet::new();
            for &id in window {
                let Some(&have) = merged.get(&id) else { continue };
                let want = alpha[&id];
                match perm.get(&want) {
                    Some(&mapped) if mapped != have => {
                        return Err(Error::Internal(format!(
                            "separator {} overlap is not injectively colored",
                            es[j - 1]
                        )));
                    }
                    Some(_) => {}
                    None => {
                        if !taken.insert(have) {
                            return Err(Error::Internal(format!(
                                "separator {} overlap reuses a color",
                                es[j - 1]
                            )));
                        }
                        perm.insert(want, have);
                    }
                }
            }
            for &id in window {
                if merged.contains_key(&id) {
                    continue;
                }
                let want = alpha[&id];
                let have = match perm.get(&want) {
                    Some(&mapped) => mapped,
                    None => {
                        let mut fresh = 1u32;
                        while taken.contains(&fresh) {
                            fresh += 1;
                        }
                        perm.insert(want, fresh);
                        taken.insert(fresh);
                        fresh
                    }
                };
                merged.insert(id, have);
            }
        }
        Ok(merged)
    }
}
