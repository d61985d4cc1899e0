//! Slot-constrained task selection as a min-cost flow problem.
//!
//! [`solve_uniform`] picks a maximum-profit subset of tasks subject to a
//! per-edge *count* limit: at most `counts[e]` selected tasks may cross
//! edge `e`. Demands play no role; every task occupies one slot per edge
//! it crosses. This is the exact engine behind grouped tiny-task rounding,
//! where all tasks of a group are interchangeable in size.
//!
//! The network has one node per path vertex: a task is an arc `s -> t`
//! with capacity 1 and cost `-w`, and each path edge contributes a return
//! arc `v+1 -> v` with capacity `counts[e]` and cost 0. A min-cost
//! circulation saturates exactly the arcs of an optimal selection. It is
//! computed by pre-saturating every task arc and draining the resulting
//! imbalances with successive shortest augmenting paths; all residual
//! costs start nonnegative and node potentials keep reduced costs
//! nonnegative throughout, so each path search is a Dijkstra run.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::model::{Instance, Solution};
use crate::{Error, Result};

/// Maximum-profit subset of `ids` with at most `counts[e]` selected tasks
/// crossing each edge `e`. Demands are ignored.
pub fn solve_uniform(inst: &Instance, ids: &[usize], counts: &[i64]) -> Result<Solution> {
    let picked = uniform_selection(inst, ids, counts)?.0;
    Solution::new(inst, picked, "uniform")
}

/// Internal form returning the residual network for optimality checks.
pub(crate) fn uniform_selection(
    inst: &Instance,
    ids: &[usize],
    counts: &[i64],
) -> Result<(Vec<usize>, Network)> {
    if counts.len() != inst.m {
        return Err(Error::Invalid(format!(
            "expected {} counts, got {}",
            inst.m,
            counts.len()
        )));
    }
    if let Some(c) = counts.iter().find(|&&c| c < 0) {
        return Err(Error::Invalid(format!("negative count {c}")));
    }
    let mut seen = vec![false; inst.n()];
    for &id in ids {
        inst.task(id)?;
        if seen[id] {
            return Err(Error::Invalid(format!("duplicate id {id}")));
        }
        seen[id] = true;
    }

    // nodes: path vertices 0..=m, then source and sink
    let nodes = inst.m + 3;
    let source = inst.m + 1;
    let sink = inst.m + 2;
    let mut net = Network::new(nodes);
    for (e, &c) in counts.iter().enumerate() {
        net.add(e + 1, e, c, 0);
    }
    let mut task_arcs = Vec::with_capacity(ids.len());
    let mut excess = vec![0i64; nodes];
    for &id in ids {
        let task = &inst.tasks[id];
        let arc = net.add(task.s, task.t, 1, -task.w);
        // pre-saturate: selection is the default, cancellation costs w
        net.arcs[arc].flow = 1;
        net.arcs[arc ^ 1].flow = -1;
        excess[task.t] += 1;
        excess[task.s] -= 1;
        task_arcs.push((id, arc));
    }
    let mut demand_total = 0i64;
    for (v, &b) in excess.iter().enumerate() {
        if b > 0 {
            net.add(source, v, b, 0);
            demand_total += b;
        } else if b < 0 {
            net.add(v, sink, -b, 0);
        }
    }

    let sent = net.min_cost_flow(source, sink)?;
    if sent != demand_total {
        return Err(Error::Internal(format!(
            "imbalance of {demand_total} but only {sent} routed"
        )));
    }

    let picked: Vec<usize> = task_arcs
        .iter()
        .filter(|&&(_, arc)| net.arcs[arc].flow == 1)
        .map(|&(id, _)| id)
        .collect();
    Ok((picked, net))
}

#[derive(Debug, Clone)]
pub(crate) struct Arc {
    pub to: usize,
    pub cap: i64,
    pub cost: i64,
    pub flow: i64,
}

impl Arc {
    pub fn residual(&self) -> i64 {
        self.cap - self.flow
    }
}

#[derive(Debug)]
pub(crate) struct Network {
    pub adj: Vec<Vec<usize>>,
    pub arcs: Vec<Arc>,
}

impl Network {
    fn new(nodes: usize) -> Network {
        Network { adj: vec![Vec::new(); nodes], arcs: Vec::new() }
    }

    /// Adds the arc and its reverse; returns the forward arc index. The
    /// reverse is always at `index ^ 1`.
    fn add(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let idx = self.arcs.len();
        self.arcs.push(Arc { to, cap, cost, flow: 0 });
        self.arcs.push(Arc { to: from, cap: 0, cost: -cost, flow: 0 });
        self.adj[from].push(idx);
        self.adj[to].push(idx + 1);
        idx
    }

    /// Successive shortest paths with potentials. Requires all residual
    /// costs nonnegative at entry; returns the total flow routed.
    fn min_cost_flow(&mut self, source: usize, sink: usize) -> Result<i64> {
        let nodes = self.adj.len();
        let mut potential = vec![0i64; nodes];
        let mut total = 0i64;
        loop {
            // Dijkstra over reduced costs
            let mut dist = vec![i64::MAX; nodes];
            let mut reached_by = vec![usize::MAX; nodes];
            dist[source] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, source)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if d > dist[v] {
                    continue;
                }
                for &a in &self.adj[v] {
                    let arc = &self.arcs[a];
                    if arc.residual() <= 0 {
                        continue;
                    }
                    let reduced = arc
                        .cost
                        .checked_add(potential[v])
                        .and_then(|c| c.checked_sub(potential[arc.to]))
                        .ok_or(Error::Overflow("flow cost"))?;
                    debug_assert!(reduced >= 0, "reduced costs stay nonnegative");
                    let nd = d.checked_add(reduced).ok_or(Error::Overflow("flow distance"))?;
                    if nd < dist[arc.to] {
                        dist[arc.to] = nd;
                        reached_by[arc.to] = a;
                        heap.push(Reverse((nd, arc.to)));
                    }
                }
            }
            if dist[sink] == i64::MAX {
                return Ok(total);
            }
            for (v, p) in potential.iter_mut().enumerate() {
                if dist[v] < i64::MAX {
                    *p += dist[v];
                }
            }
            // push the path bottleneck along the parent chain
            let mut bottleneck = i64::MAX;
            let mut v = sink;
            while v != source {
                let arc = &self.arcs[reached_by[v]];
                bottleneck = bottleneck.min(arc.residual());
                v = self.arcs[reached_by[v] ^ 1].to;
            }
            let mut v = sink;
            while v != source {
                let a = reached_by[v];
                self.arcs[a].flow += bottleneck;
                self.arcs[a ^ 1].flow -= bottleneck;
                v = self.arcs[a ^ 1].to;
            }
            total += bottleneck;
        }
    }

    /// Bellman-Ford check that the residual network has no negative cycle,
    /// i.e. the flow is cost optimal.
    #[cfg(test)]
    pub(crate) fn residual_is_optimal(&self) -> bool {
        let nodes = self.adj.len();
        let mut dist = vec![0i64; nodes];
        for round in 0..nodes {
            let mut changed = false;
            for (from, arcs) in self.adj.iter().enumerate() {
                for &a in arcs {
                    let arc = &self.arcs[a];
                    if arc.residual() > 0 && dist[from] + arc.cost < dist[arc.to] {
                        dist[arc.to] = dist[from] + arc.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
            if round == nodes - 1 {
                return false;
            }
        }
        true
    }
}
