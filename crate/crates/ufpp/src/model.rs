//! Core instance model: paths, tasks, solutions, and the structural
//! transforms (compaction, capacity perturbation) everything else builds on.
//!
//! Path vertices are numbered `0..=m`; edge `e` joins vertices `e` and
//! `e+1`, so `capacities[e]` is the capacity of that edge. A task occupies
//! the subpath from its start vertex `s` to its end vertex `t` (exclusive
//! of nothing: it loads every edge `e` with `s <= e < t`).

use num_rational::BigRational;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::exact::rat;
use crate::{Error, Result};

/// One task: subpath `[s, t]`, demand `d`, profit `w`.
///
/// `id` is the task's stable ordinal in its instance; every selected-set
/// representation in the crate refers to tasks by this id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub id: usize,
    pub s: usize,
    pub t: usize,
    pub d: i64,
    pub w: i64,
}

impl Task {
    /// True when the task loads edge `e`.
    pub fn uses_edge(&self, e: usize) -> bool {
        self.s <= e && e < self.t
    }

    pub fn edges(&self) -> std::ops::Range<usize> {
        self.s..self.t
    }
}

/// Bottleneck data for one task: the minimum capacity `b` along its
/// subpath, the slack `b - d`, and the lowest-index edge attaining `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskMeta {
    pub b: i64,
    pub slack: i64,
    pub bottleneck_edge: usize,
}

/// A path instance. Construct through [`Instance::new`], which enforces the
/// shape invariants (capacity count, endpoint ordering, positive values).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub m: usize,
    pub capacities: Vec<i64>,
    pub tasks: Vec<Task>,
}

impl Instance {
    pub fn new(m: usize, capacities: Vec<i64>, tasks: Vec<Task>) -> Result<Instance> {
        if m == 0 {
            return Err(Error::Invalid("path needs at least one edge".into()));
        }
        if capacities.len() != m {
            return Err(Error::Invalid(format!(
                "expected {} capacities, got {}",
                m,
                capacities.len()
            )));
        }
        if let Some(u) = capacities.iter().find(|&&u| u < 1) {
            return Err(Error::Invalid(format!("capacity {u} below 1")));
        }
        for (i, task) in tasks.iter().enumerate() {
            if task.id != i {
                return Err(Error::Invalid(format!(
                    "task at position {i} carries id {}",
                    task.id
                )));
            }
            if task.s >= task.t || task.t > m {
                return Err(Error::Invalid(format!(
                    "task {i} endpoints ({}, {}) out of order or past vertex {m}",
                    task.s, task.t
                )));
            }
            if task.d < 1 {
                return Err(Error::Invalid(format!("task {i} demand {} below 1", task.d)));
            }
            if task.w < 0 {
                return Err(Error::Invalid(format!("task {i} profit {} negative", task.w)));
            }
        }
        Ok(Instance { m, capacities, tasks })
    }

    pub fn n(&self) -> usize {
        self.tasks.len()
    }

    pub fn task(&self, id: usize) -> Result<&Task> {
        self.tasks.get(id).ok_or(Error::UnknownTask(id))
    }

    /// Ids of tasks whose demand fits under their bottleneck capacity.
    /// Tasks with `d > b` can never be scheduled; solvers skip them.
    pub fn deliverable_ids(&self) -> Vec<usize> {
        self.tasks
            .iter()
            .filter(|t| bottleneck(self, t).slack >= 0)
            .map(|t| t.id)
            .collect()
    }
}

/// Per-edge violation found by [`check_feasible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub edge: usize,
    pub load: i64,
    pub capacity: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// A selected task set with its recomputed profit and the tag of the
/// algorithm that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub selected: Vec<usize>,
    pub profit: i64,
    pub algorithm_tag: String,
}

impl Solution {
    /// Builds a solution, sorting and deduplicating ids and recomputing the
    /// profit from the instance so the stored value can never drift.
    pub fn new<I>(inst: &Instance, selected: I, tag: &str) -> Result<Solution>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut ids: Vec<usize> = selected.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        let mut profit: i64 = 0;
        for &id in &ids {
            let task = inst.task(id)?;
            profit = profit
                .checked_add(task.w)
                .ok_or(Error::Overflow("solution profit"))?;
        }
        Ok(Solution {
            selected: ids,
            profit,
            algorithm_tag: tag.to_string(),
        })
    }

    pub fn empty(tag: &str) -> Solution {
        Solution {
            selected: Vec::new(),
            profit: 0,
            algorithm_tag: tag.to_string(),
        }
    }
}

/// Parses the line-oriented instance format:
///
/// ```text
/// ufpp v1
/// m <edges>
/// cap <u_0> ... <u_{m-1}>
/// task <s> <t> <d> <w>    (one line per task, id = order of appearance)
/// ```
///
/// Blank lines and `#` comments are allowed anywhere.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
    if header != "ufpp v1" {
        return Err(Error::Parse { line, msg: format!("expected 'ufpp v1', got '{header}'") });
    }

    let (line, m_line) = lines
        .next()
        .ok_or_else(|| Error::Parse { line, msg: "missing 'm' line".into() })?;
    let m: usize = match m_line.strip_prefix("m ") {
        Some(rest) => rest
            .trim()
            .parse()
            .map_err(|e| Error::Parse { line, msg: format!("bad edge count: {e}") })?,
        None => return Err(Error::Parse { line, msg: format!("expected 'm <edges>', got '{m_line}'") }),
    };

    let (line, cap_line) = lines
        .next()
        .ok_or_else(|| Error::Parse { line, msg: "missing 'cap' line".into() })?;
    let caps = match cap_line.strip_prefix("cap ") {
        Some(rest) => rest
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i64>()
                    .map_err(|e| Error::Parse { line, msg: format!("bad capacity '{tok}': {e}") })
            })
            .collect::<Result<Vec<i64>>>()?,
        None => return Err(Error::Parse { line, msg: format!("expected 'cap ...', got '{cap_line}'") }),
    };
    if caps.len() != m {
        return Err(Error::Parse {
            line,
            msg: format!("expected {} capacities, got {}", m, caps.len()),
        });
    }

    let mut tasks = Vec::new();
    for (line, l) in lines {
        let rest = l
            .strip_prefix("task ")
            .ok_or_else(|| Error::Parse { line, msg: format!("expected 'task s t d w', got '{l}'") })?;
        let fields: Vec<&str> = rest.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse { line, msg: format!("task line needs 4 fields, got {}", fields.len()) });
        }
        let parse_field = |idx: usize, name: &str| -> Result<i64> {
            fields[idx]
                .parse::<i64>()
                .map_err(|e| Error::Parse { line, msg: format!("bad {name} '{}': {e}", fields[idx]) })
        };
        let s = parse_field(0, "start")?;
        let t = parse_field(1, "end")?;
        if s < 0 || t < 0 {
            return Err(Error::Parse { line, msg: "negative endpoint".into() });
        }
        tasks.push(Task {
            id: tasks.len(),
            s: s as usize,
            t: t as usize,
            d: parse_field(2, "demand")?,
            w: parse_field(3, "profit")?,
        });
    }

    Instance::new(m, caps, tasks).map_err(|e| match e {
        Error::Invalid(msg) => Error::Parse { line: 0, msg },
        other => other,
    })
}

/// Canonical emission; `parse_instance(&emit_instance(inst))` round-trips
/// and re-emission of a parsed file is byte-identical.
pub fn emit_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str("ufpp v1\n");
    let _ = writeln!(out, "m {}", inst.m);
    out.push_str("cap");
    for u in &inst.capacities {
        let _ = write!(out, " {u}");
    }
    out.push('\n');
    for t in &inst.tasks {
        let _ = writeln!(out, "task {} {} {} {}", t.s, t.t, t.d, t.w);
    }
    out
}

/// Exact load check of a selected id set against the instance capacities.
pub fn check_feasible(inst: &Instance, selected: &[usize]) -> Result<FeasibilityReport> {
    check_feasible_caps(inst, selected, &inst.capacities)
}

/// Same check against an alternative capacity vector (length `m`).
pub fn check_feasible_caps(
    inst: &Instance,
    selected: &[usize],
    caps: &[i64],
) -> Result<FeasibilityReport> {
    assert_eq!(caps.len(), inst.m, "capacity vector length mismatch");
    let loads = edge_loads(inst, selected)?;
    let violations: Vec<Violation> = loads
        .iter()
        .enumerate()
        .filter(|&(e, &load)| load > caps[e])
        .map(|(e, &load)| Violation { edge: e, load, capacity: caps[e] })
        .collect();
    Ok(FeasibilityReport { feasible: violations.is_empty(), violations })
}

/// Per-edge loads of a selected id set.
pub fn edge_loads(inst: &Instance, selected: &[usize]) -> Result<Vec<i64>> {
    let mut seen = vec![false; inst.n()];
    // difference array: O(m + |selected|)
    let mut diff = vec![0i64; inst.m + 1];
    for &id in selected {
        let task = inst.task(id)?;
        if seen[id] {
            return Err(Error::Invalid(format!("task {id} selected twice")));
        }
        seen[id] = true;
        diff[task.s] += task.d;
        diff[task.t] -= task.d;
    }
    let mut loads = Vec::with_capacity(inst.m);
    let mut acc = 0i64;
    for &step in &diff[..inst.m] {
        acc += step;
        loads.push(acc);
    }
    Ok(loads)
}

/// Minimum capacity along the task's subpath, its slack, and the first
/// edge attaining the minimum.
pub fn bottleneck(inst: &Instance, task: &Task) -> TaskMeta {
    let mut b = i64::MAX;
    let mut edge = task.s;
    for e in task.edges() {
        if inst.capacities[e] < b {
            b = inst.capacities[e];
            edge = e;
        }
    }
    TaskMeta { b, slack: b - task.d, bottleneck_edge: edge }
}

pub fn task_metas(inst: &Instance) -> Vec<TaskMeta> {
    inst.tasks.iter().map(|t| bottleneck(inst, t)).collect()
}

/// Splits the deliverable tasks at relative slack `delta`: a task is small
/// when `d <= delta * b` (exact rational comparison), large otherwise.
/// Undeliverable tasks land in neither set.
pub fn classify(inst: &Instance, delta: &BigRational) -> (Vec<usize>, Vec<usize>) {
    let mut small = Vec::new();
    let mut large = Vec::new();
    for task in &inst.tasks {
        let meta = bottleneck(inst, task);
        if meta.slack < 0 {
            continue;
        }
        if rat(task.d) <= delta * rat(meta.b) {
            small.push(task.id);
        } else {
            large.push(task.id);
        }
    }
    (small, large)
}

/// Vertex translation produced by [`compact`]; `vertex_to_old[v]` is the
/// original vertex a compacted vertex came from. Task ids are unchanged.
#[derive(Debug, Clone)]
pub struct CompactMap {
    pub vertex_to_old: Vec<usize>,
}

/// Contracts every run of edges between consecutive task endpoints into a
/// single edge carrying the run's minimum capacity, and drops leading and
/// trailing edges no task uses. Feasibility of every task set is preserved
/// exactly, and the result has fewer than `2n` edges.
///
/// A task-free instance compacts to a single edge holding the instance's
/// minimum capacity.
pub fn compact(inst: &Instance) -> (Instance, CompactMap) {
    let endpoints: BTreeSet<usize> = inst
        .tasks
        .iter()
        .flat_map(|t| [t.s, t.t])
        .collect();
    if endpoints.is_empty() {
        let u = *inst.capacities.iter().min().expect("m >= 1");
        let compacted = Instance { m: 1, capacities: vec![u], tasks: Vec::new() };
        return (compacted, CompactMap { vertex_to_old: vec![0, inst.m] });
    }
    let verts: Vec<usize> = endpoints.into_iter().collect();
    let mut caps = Vec::with_capacity(verts.len() - 1);
    for pair in verts.windows(2) {
        let u = inst.capacities[pair[0]..pair[1]].iter().min().expect("nonempty run");
        caps.push(*u);
    }
    let index_of = |v: usize| verts.binary_search(&v).expect("endpoint present");
    let tasks: Vec<Task> = inst
        .tasks
        .iter()
        .map(|t| Task { id: t.id, s: index_of(t.s), t: index_of(t.t), d: t.d, w: t.w })
        .collect();
    let compacted = Instance { m: verts.len() - 1, capacities: caps, tasks };
    (compacted, CompactMap { vertex_to_old: verts })
}

/// Rescales the instance so all edge capacities become pairwise distinct:
/// edge `e` gets capacity `m * u_e + e` and every demand becomes `m * d`.
/// A task set is feasible in the result exactly when it was feasible
/// before.
pub fn perturb(inst: &Instance) -> Result<Instance> {
    let m = inst.m as i64;
    let capacities = inst
        .capacities
        .iter()
        .enumerate()
        .map(|(e, &u)| {
            u.checked_mul(m)
                .and_then(|x| x.checked_add(e as i64))
                .ok_or(Error::Overflow("perturbed capacity"))
        })
        .collect::<Result<Vec<i64>>>()?;
    let tasks = inst
        .tasks
        .iter()
        .map(|t| {
            Ok(Task {
                id: t.id,
                s: t.s,
                t: t.t,
                d: t.d.checked_mul(m).ok_or(Error::Overflow("perturbed demand"))?,
                w: t.w,
            })
        })
        .collect::<Result<Vec<Task>>>()?;
    Instance::new(inst.m, capacities, tasks)
}

/// Best-of: returns the highest-profit solution, breaking ties toward the
/// lexicographically lowest algorithm tag. Inputs must be feasible.
pub fn combine_best(inst: &Instance, candidates: &[Solution]) -> Result<Solution> {
    if candidates.is_empty() {
        return Err(Error::Precondition("combine_best needs at least one solution".into()));
    }
    for sol in candidates {
        let report = check_feasible(inst, &sol.selected)?;
        if !report.feasible {
            return Err(Error::Precondition(format!(
                "combine_best input '{}' is infeasible",
                sol.algorithm_tag
            )));
        }
    }
    let best = candidates
        .iter()
        .min_by(|a, b| b.profit.cmp(&a.profit).then(a.algorithm_tag.cmp(&b.algorithm_tag)))
        .expect("nonempty");
    Ok(best.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn inst_from(caps: &[i64], tasks: &[(usize, usize, i64, i64)]) -> Instance {
        let tasks = tasks
            .iter()
            .enumerate()
            .map(|(id, &(s, t, d, w))| Task { id, s, t, d, w })
            .collect();
        Instance::new(caps.len(), caps.to_vec(), tasks).unwrap()
    }

    #[test]
    fn parse_emit_round_trip_is_canonical() {
        let text = "# demo\nufpp v1\n\nm 3\ncap 5  4 3\ntask 0 2 2 7\ntask 1 3 1 2\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.m, 3);
        assert_eq!(inst.capacities, vec![5, 4, 3]);
        assert_eq!(inst.tasks.len(), 2);
        let emitted = emit_instance(&inst);
        let reparsed = parse_instance(&emitted).unwrap();
        assert_eq!(inst, reparsed);
        assert_eq!(emitted, emit_instance(&reparsed));
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "ufpp v1\nm 2\ncap 3 3\ntask 0 5 1 1\n";
        // endpoint past vertex count surfaces as a parse-stage invalid
        assert!(parse_instance(text).is_err());
        let bad = "ufpp v1\nm 2\ncap 3 x\n";
        match parse_instance(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn feasibility_flags_each_overloaded_edge() {
        let inst = inst_from(&[2, 2], &[(0, 2, 2, 3), (0, 1, 1, 2), (1, 2, 1, 2)]);
        let ok = check_feasible(&inst, &[1, 2]).unwrap();
        assert!(ok.feasible);
        let bad = check_feasible(&inst, &[0, 1]).unwrap();
        assert!(!bad.feasible);
        assert_eq!(bad.violations, vec![Violation { edge: 0, load: 3, capacity: 2 }]);
        assert!(check_feasible(&inst, &[7]).is_err());
    }

    #[test]
    fn bottleneck_reports_min_capacity_and_slack() {
        let inst = inst_from(&[8, 12, 24], &[(0, 3, 5, 1)]);
        let meta = bottleneck(&inst, &inst.tasks[0]);
        assert_eq!(meta.b, 8);
        assert_eq!(meta.slack, 3);
        assert_eq!(meta.bottleneck_edge, 0);
    }

    #[test]
    fn classify_splits_on_exact_threshold() {
        // d=5 against b=8 at delta=1/2: 5 > 4, so large
        let inst = inst_from(&[8, 8], &[(0, 2, 5, 1), (0, 2, 4, 1), (0, 2, 9, 1)]);
        let (small, large) = classify(&inst, &ratio(1, 2));
        assert_eq!(small, vec![1]);
        assert_eq!(large, vec![0]);
        // id 2 is undeliverable and lands nowhere
    }

    #[test]
    fn classify_delta_one_accepts_every_deliverable_task() {
        let inst = inst_from(&[4, 6], &[(0, 2, 4, 1), (1, 2, 6, 1), (0, 1, 5, 1)]);
        let (small, large) = classify(&inst, &ratio(1, 1));
        assert_eq!(small, vec![0, 1]);
        assert!(large.is_empty());
    }

    #[test]
    fn compact_contracts_runs_to_min_capacity() {
        let inst = inst_from(&[5, 3, 9, 4], &[(0, 4, 2, 1)]);
        let (c, map) = compact(&inst);
        assert_eq!(c.m, 1);
        assert_eq!(c.capacities, vec![3]);
        assert_eq!(map.vertex_to_old, vec![0, 4]);
        assert_eq!(c.tasks[0].s, 0);
        assert_eq!(c.tasks[0].t, 1);
    }

    #[test]
    fn compact_identity_when_all_vertices_are_endpoints() {
        let inst = inst_from(&[2, 3], &[(0, 1, 1, 1), (1, 2, 1, 1)]);
        let (c, map) = compact(&inst);
        assert_eq!(c, inst);
        assert_eq!(map.vertex_to_old, vec![0, 1, 2]);
    }

    #[test]
    fn compact_keeps_every_subset_feasibility() {
        let inst = inst_from(
            &[4, 2, 7, 7, 3],
            &[(0, 2, 2, 1), (2, 5, 3, 1), (0, 5, 1, 1), (2, 4, 4, 1)],
        );
        let (c, _) = compact(&inst);
        assert!(c.m < 2 * inst.n());
        for mask in 0u32..16 {
            let sel: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            let before = check_feasible(&inst, &sel).unwrap().feasible;
            let after = check_feasible(&c, &sel).unwrap().feasible;
            assert_eq!(before, after, "subset {sel:?}");
        }
    }

    #[test]
    fn perturb_matches_scaling_rule() {
        let inst = inst_from(&[5, 5, 5], &[(0, 2, 2, 1)]);
        let p = perturb(&inst).unwrap();
        assert_eq!(p.capacities, vec![15, 16, 17]);
        assert_eq!(p.tasks[0].d, 6);
        let caps: BTreeSet<i64> = p.capacities.iter().copied().collect();
        assert_eq!(caps.len(), p.m, "perturbed capacities are distinct");
    }

    #[test]
    fn combine_best_prefers_profit_then_tag() {
        let inst = inst_from(&[5], &[(0, 1, 1, 3), (0, 1, 1, 3)]);
        let a = Solution::new(&inst, [0], "b_tag").unwrap();
        let b = Solution::new(&inst, [1], "a_tag").unwrap();
        let best = combine_best(&inst, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(best.algorithm_tag, "a_tag");
        assert!(combine_best(&inst, &[]).is_err());
    }

    #[test]
    fn solution_profit_is_recomputed() {
        let inst = inst_from(&[5], &[(0, 1, 1, 3), (0, 1, 1, 4)]);
        let sol = Solution::new(&inst, [1, 0, 1], "x").unwrap();
        assert_eq!(sol.selected, vec![0, 1]);
        assert_eq!(sol.profit, 7);
    }
}
