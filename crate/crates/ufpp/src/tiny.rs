//! Rounding pipeline for tiny-demand tasks.
//!
//! Tasks whose demands are small relative to the remaining capacity are
//! selected by solving one fractional relaxation, partitioning the tasks
//! into groups of near-equal demand (relative spread `delta`), splitting
//! each edge's capacity between the groups in proportion to the LP mass
//! they put on it, and converting each group's share into whole task slots
//! via [`crate::flow::solve_uniform`]. Slot counts are floors of the
//! shares, so the union of the per-group selections respects the modified
//! capacities by construction; a repair sweep stays in place as a safety
//! net and reports how often it fired.
//!
//! The quality of the rounding is governed by the spread function
//! `f(x) = (1 + sqrt(x)) / (1 - sqrt(x) - x)`, which is finite for
//! `0 <= x < (3 - sqrt(5))/2`. Comparisons against rational thresholds are
//! done exactly; [`f_delta`] returns certified rational enclosures.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exact::{rat, sqrt_bounds};
use crate::flow::solve_uniform;
use crate::lp::{maximize, LpProblem};
use crate::model::{edge_loads, Instance, Solution};
use crate::{Error, Result};

/// True when `x` lies in the domain where the spread function is positive
/// and finite: `0 <= x` and `x < (3 - sqrt(5))/2`, decided exactly via
/// `(3 - 2x)^2 > 5` (no rational hits the irrational boundary).
pub fn spread_admissible(x: &BigRational) -> bool {
    if x.is_negative() {
        return false;
    }
    let margin = rat(3) - rat(2) * x;
    margin.is_positive() && &margin * &margin > rat(5)
}

/// Exact test `f(x) <= c` for admissible `x`: clearing the positive
/// denominator reduces it to `t = c - 1 - c*x >= 0` and
/// `x * (1 + c)^2 <= t^2`.
pub fn f_delta_le(x: &BigRational, c: &BigRational) -> Result<bool> {
    if !spread_admissible(x) {
        return Err(Error::Precondition("spread argument outside admissible range".into()));
    }
    let t = c - rat(1) - c * x;
    if t.is_negative() {
        return Ok(false);
    }
    let lhs = x * (rat(1) + c) * (rat(1) + c);
    Ok(lhs <= &t * &t)
}

/// Certified enclosure `(lo, hi)` of `f(x)` for admissible `x`; exact when
/// `sqrt(x)` is rational. `f` is increasing in `sqrt(x)`, so plugging the
/// root's enclosure into numerator and denominator bounds it from both
/// sides.
pub fn f_delta(x: &BigRational) -> Result<(BigRational, BigRational)> {
    if !spread_admissible(x) {
        return Err(Error::Precondition("spread argument outside admissible range".into()));
    }
    let mut bits = 40;
    loop {
        let root = sqrt_bounds(x, bits);
        let den_hi = rat(1) - &root.hi - x;
        if den_hi.is_positive() {
            let lo = (rat(1) + &root.lo) / (rat(1) - &root.lo - x);
            let hi = (rat(1) + &root.hi) / den_hi;
            return Ok((lo, hi));
        }
        // the root enclosure was too loose to keep the denominator positive
        bits += 16;
    }
}

/// Fractional relaxation over `ids`: maximize total profit with each task
/// picked to a fraction in `[0, 1]` and each crossed edge's demand-weighted
/// mass at most `caps[e]`. Crossed edges must have nonnegative capacity.
#[derive(Debug, Clone)]
pub struct TinyLp {
    /// Sorted ids; `x[i]` is the fraction assigned to `ids[i]`.
    pub ids: Vec<usize>,
    pub x: Vec<BigRational>,
    pub value: BigRational,
}

pub fn lp_opt(inst: &Instance, ids: &[usize], caps: &[BigRational]) -> Result<TinyLp> {
    if caps.len() != inst.m {
        return Err(Error::Invalid(format!(
            "expected {} capacities, got {}",
            inst.m,
            caps.len()
        )));
    }
    let ids = validated_sorted(inst, ids)?;
    let n = ids.len();

    let mut on_edge: Vec<Vec<usize>> = vec![Vec::new(); inst.m];
    for (col, &id) in ids.iter().enumerate() {
        for e in inst.tasks[id].edges() {
            on_edge[e].push(col);
        }
    }
    let mut rows = Vec::new();
    for (e, cols) in on_edge.iter().enumerate() {
        if cols.is_empty() {
            continue;
        }
        if caps[e].is_negative() {
            return Err(Error::Precondition(format!(
                "edge {e} is crossed but has negative capacity"
            )));
        }
        let mut coeffs = vec![BigRational::zero(); n];
        for &col in cols {
            coeffs[col] = rat(inst.tasks[ids[col]].d);
        }
        rows.push((coeffs, caps[e].clone()));
    }
    for col in 0..n {
        let mut coeffs = vec![BigRational::zero(); n];
        coeffs[col] = rat(1);
        rows.push((coeffs, rat(1)));
    }
    let objective = ids.iter().map(|&id| rat(inst.tasks[id].w)).collect();
    let sol = maximize(&LpProblem { objective, rows })?;
    Ok(TinyLp { ids, x: sol.x, value: sol.value })
}

/// Partitions `ids` into maximal runs of near-equal demand: tasks sorted by
/// demand (ties by id) extend the current run while
/// `(d - d_min)^2 <= delta * d_min^2`, where `d_min` is the run's first
/// demand.
pub fn demand_groups(
    inst: &Instance,
    ids: &[usize],
    delta: &BigRational,
) -> Result<Vec<Vec<usize>>> {
    let mut order = validated_sorted(inst, ids)?;
    order.sort_by_key(|&id| (inst.tasks[id].d, id));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut d_min = 0i64;
    for id in order {
        let d = inst.tasks[id].d;
        let extends = groups.last().is_some() && {
            let gap = rat(d - d_min);
            &gap * &gap <= delta * rat(d_min) * rat(d_min)
        };
        if extends {
            groups.last_mut().expect("nonempty").push(id);
        } else {
            groups.push(vec![id]);
            d_min = d;
        }
    }
    Ok(groups)
}

/// True when the selection's load stays within `caps` on every edge it
/// actually uses (edges with zero load are unconstrained).
pub fn check_modified(inst: &Instance, selected: &[usize], caps: &[BigRational]) -> Result<bool> {
    let loads = edge_loads(inst, selected)?;
    Ok(loads
        .iter()
        .enumerate()
        .all(|(e, &load)| load == 0 || rat(load) <= caps[e]))
}

#[derive(Debug, Clone)]
pub struct TinyOutcome {
    pub solution: Solution,
    /// Times the repair sweep had to drop a task. Zero in correct
    /// operation; the sweep exists as a safety net.
    pub repairs: usize,
}

/// Full rounding pipeline for tiny tasks under the capacities `caps`
/// (typically the instance capacities less a safety margin). `delta` is
/// the admissible relative demand spread within one group.
pub fn solve_tiny(
    inst: &Instance,
    ids: &[usize],
    delta: &BigRational,
    caps: &[BigRational],
) -> Result<TinyOutcome> {
    let lp = lp_opt(inst, ids, caps)?;
    let groups = demand_groups(inst, &lp.ids, delta)?;

    let col_of = |id: usize| lp.ids.binary_search(&id).expect("id came from the lp");
    let mass_of = |id: usize| rat(inst.tasks[id].d) * &lp.x[col_of(id)];

    // per-edge LP mass and the number of groups present there
    let mut total: Vec<BigRational> = vec![BigRational::zero(); inst.m];
    let mut groups_on: Vec<i64> = vec![0; inst.m];
    for group in &groups {
        let mut present = vec![false; inst.m];
        for &id in group {
            for e in inst.tasks[id].edges() {
                total[e] += mass_of(id);
                present[e] = true;
            }
        }
        for (e, p) in present.iter().enumerate() {
            if *p {
                groups_on[e] += 1;
            }
        }
    }

    let mut union: Vec<usize> = Vec::new();
    for group in &groups {
        let d_max = group.iter().map(|&id| inst.tasks[id].d).max().expect("nonempty group");
        let mut mass = vec![BigRational::zero(); inst.m];
        let mut present = vec![false; inst.m];
        for &id in group {
            for e in inst.tasks[id].edges() {
                mass[e] += mass_of(id);
                present[e] = true;
            }
        }
        // floor of the group's capacity share in units of its largest
        // demand; the floors of shares summing to at most the capacity keep
        // the union feasible without any coordination between groups
        let mut counts = vec![0i64; inst.m];
        for e in 0..inst.m {
            if !present[e] {
                continue;
            }
            let share = if total[e].is_positive() {
                &caps[e] * &mass[e] / &total[e]
            } else {
                &caps[e] / rat(groups_on[e])
            };
            let slots = (share / rat(d_max)).floor();
            counts[e] = slots
                .numer()
                .to_i64()
                .ok_or(Error::Overflow("slot count"))?
                .max(0);
        }
        let sel = solve_uniform(inst, group, &counts)?;
        union.extend(sel.selected);
    }

    // safety net: by construction the union already fits under caps
    let mut selected = union;
    let mut repairs = 0usize;
    while let Some(edge) = worst_violation(inst, &selected, caps)? {
        drop_least_dense(inst, &mut selected, edge);
        repairs += 1;
    }
    debug_assert!(check_modified(inst, &selected, caps)?);
    let solution = Solution::new(inst, selected, "tiny")?;
    Ok(TinyOutcome { solution, repairs })
}

fn validated_sorted(inst: &Instance, ids: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; inst.n()];
    for &id in ids {
        inst.task(id)?;
        if seen[id] {
            return Err(Error::Invalid(format!("duplicate id {id}")));
        }
        seen[id] = true;
    }
    let mut out = ids.to_vec();
    out.sort_unstable();
    Ok(out)
}

fn worst_violation(
    inst: &Instance,
    selected: &[usize],
    caps: &[BigRational],
) -> Result<Option<usize>> {
    let loads = edge_loads(inst, selected)?;
    let mut worst: Option<(BigRational, usize)> = None;
    for (e, &load) in loads.iter().enumerate() {
        if load == 0 {
            continue;
        }
        let excess = rat(load) - &caps[e];
        if excess.is_positive() && worst.as_ref().is_none_or(|(top, _)| excess > *top) {
            worst = Some((excess, e));
        }
    }
    Ok(worst.map(|(_, e)| e))
}

fn drop_least_dense(inst: &Instance, selected: &mut Vec<usize>, edge: usize) {
    let mut victim: Option<usize> = None;
    for &id in selected.iter() {
        let task = &inst.tasks[id];
        if !task.uses_edge(edge) {
            continue;
        }
        let better = match victim {
            None => true,
            // lower profit density loses; exact comparison by cross
            // multiplication, ties keep the smallest id
            Some(v) => {
                let cur = &inst.tasks[v];
                let lhs = (task.w as i128) * (cur.d as i128);
                let rhs = (cur.w as i128) * (task.d as i128);
                lhs < rhs || (lhs == rhs && id < v)
            }
        };
        if better {
            victim = Some(id);
        }
    }
    if let Some(v) = victim {
        selected.retain(|&id| id != v);
    }
}
