//! Capacity-level grouping framework for small-demand tasks.
//!
//! Tasks are grouped by the power of two their bottleneck capacity falls
//! in: group `k` holds tasks with `2^k <= b < 2^(k+ell)`, so each task
//! appears in up to `ell` consecutive groups (fewer near the bottom, since
//! levels below zero do not exist). Each group is solved on slightly
//! reduced capacities, leaving a margin of `beta * 2^k` with
//! `beta = 2^(1-q)`. Groups whose levels are congruent modulo
//! `ell + q` are then far enough apart that their solutions stack: the
//! margin of the highest group absorbs the combined load of all lower
//! ones. The driver picks the best such residue class.
//!
//! [`solve_ra`] is the resource-augmented variant: groups keep their
//! original capacities (no margin), and the stacked load is allowed to
//! overshoot each edge by the factor `1 + 2^(2-q)` instead.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::exact::{floor_log2, pow2, rat};
use crate::medium::solve_medium;
use crate::model::{
    bottleneck, check_feasible, combine_best, edge_loads, Instance, Solution,
};
use crate::tiny::{check_modified, f_delta_le, solve_tiny, spread_admissible};
use crate::{Error, Result};

/// Exponent clamp used wherever `2^ell` has to be materialized. Demands
/// and capacities are 64-bit, so split thresholds below `2^-80` and
/// crossing bounds above `2^80` behave exactly like their unclamped
/// counterparts.
const ELL_CLAMP: u64 = 80;

/// Constants chosen for the small-task driver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallParams {
    /// Internal accuracy after the verification loop.
    pub eps_prime: BigRational,
    /// Margin exponent; the per-group capacity margin is `2^(k+1-q)`.
    pub q: u32,
    /// Number of capacity levels a group spans.
    pub ell: u64,
    /// Fraction of `2^k` left as margin, `2^(1-q)`.
    pub beta: BigRational,
    /// Relative demand spread within one rounding group.
    pub delta_prime: BigRational,
    /// Demand-split threshold: tasks with `d <= delta * b` take the
    /// fractional rounding path, the rest the exact path.
    pub delta: BigRational,
}

/// Constants chosen for the resource-augmented driver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaParams {
    pub eps_prime: BigRational,
    /// Stacking exponent: loads may overshoot by the factor `1 + 2^(2-q)`.
    pub q: u32,
    pub ell: u64,
    pub delta_prime: BigRational,
    pub delta: BigRational,
}

fn validate_eps(eps: &BigRational) -> Result<()> {
    if !eps.is_positive() {
        return Err(Error::Precondition(format!("accuracy must be positive, got {eps}")));
    }
    Ok(())
}

/// Smallest exponent `q >= 2` whose margin fraction `beta = 2^(1-q)`
/// satisfies both `1/(1-beta) <= 1+eps_prime` and `2*beta <= gamma`.
fn margin_exponent(eps_prime: &BigRational, gamma: &BigRational) -> Result<u32> {
    for q in 2..=256u32 {
        let beta = pow2(1 - q as i32);
        let slack_ok = rat(1) <= (rat(1) + eps_prime) * (rat(1) - &beta);
        let gamma_ok = rat(2) * &beta <= *gamma;
        if slack_ok && gamma_ok {
            return Ok(q);
        }
    }
    Err(Error::Internal("margin exponent search exhausted".into()))
}

fn big_to_ell(v: BigInt) -> Result<u64> {
    v.to_u64().ok_or(Error::Overflow("group span"))
}

/// Largest admissible spread `a / (1024 * 2^j)` with `f(spread) <=
/// 1 + eps_prime`, growing the denominator until some numerator works.
fn pick_spread(eps_prime: &BigRational) -> Result<BigRational> {
    let threshold = rat(1) + eps_prime;
    let fits = |a: &BigInt, den: &BigInt| -> Result<bool> {
        let x = BigRational::new(a.clone(), den.clone());
        if !spread_admissible(&x) {
            return Ok(false);
        }
        f_delta_le(&x, &threshold)
    };
    for j in 0..=512u32 {
        let den = BigInt::one() << (10 + j as usize);
        if !fits(&BigInt::one(), &den)? {
            continue;
        }
        // binary search for the last admissible numerator; 2/5 is already
        // past the domain boundary, so the range covers every candidate
        let mut lo = BigInt::one();
        let mut hi = (&den * 2u32) / 5u32;
        while lo < hi {
            let mid = (&lo + &hi + 1u32) / 2u32;
            if fits(&mid, &den)? {
                lo = mid;
            } else {
                hi = mid - 1u32;
            }
        }
        return Ok(BigRational::new(lo, den));
    }
    Err(Error::Internal("spread denominator search exhausted".into()))
}

fn split_threshold(scale: &BigRational, delta_prime: &BigRational, ell: u64) -> BigRational {
    let floor_term = scale * pow2(-(ell.min(ELL_CLAMP) as i32));
    let spread_term = scale * delta_prime;
    spread_term.min(floor_term)
}

/// Chooses the constants for [`solve_small`]: the internal accuracy starts
/// at `eps/8` and halves until the end-to-end factor
/// `(2 + (1+eps')/(1-beta)) * (ell+q)/ell` fits under `3 + eps`.
pub fn choose_small_params(eps: &BigRational, gamma: &BigRational) -> Result<SmallParams> {
    validate_eps(eps)?;
    if !gamma.is_positive() || *gamma >= rat(1) {
        return Err(Error::Precondition(format!(
            "slack split must lie strictly between 0 and 1, got {gamma}"
        )));
    }
    let mut eps_prime = eps / rat(8);
    for _ in 0..64 {
        let q = margin_exponent(&eps_prime, gamma)?;
        let beta = pow2(1 - q as i32);
        let ell = big_to_ell((rat(q as i64) / &eps_prime).ceil().to_integer())?.max(1);
        let levels = BigRational::from_integer(BigInt::from(ell));
        let span_ratio = (&levels + rat(q as i64)) / &levels;
        let group_factor = rat(2) + (rat(1) + &eps_prime) / (rat(1) - &beta);
        if group_factor * span_ratio <= rat(3) + eps {
            let delta_prime = pick_spread(&eps_prime)?;
            let delta = split_threshold(&(rat(1) - &beta), &delta_prime, ell);
            return Ok(SmallParams { eps_prime, q, ell, beta, delta_prime, delta });
        }
        eps_prime /= rat(2);
    }
    Err(Error::Internal("accuracy refinement did not converge".into()))
}

/// Chooses the constants for [`solve_ra`]: `q` comes from the allowed
/// overshoot alone, and `ell` is the smallest span with
/// `(ell+q)/ell * (2+eps') <= 2 + eps`.
pub fn choose_ra_params(eps: &BigRational, beta_aug: &BigRational) -> Result<RaParams> {
    validate_eps(eps)?;
    if !beta_aug.is_positive() {
        return Err(Error::Precondition(format!(
            "augmentation fraction must be positive, got {beta_aug}"
        )));
    }
    let mut q = 0u32;
    while pow2(2 - q as i32) > *beta_aug {
        q += 1;
        if q > 100 {
            return Err(Error::Overflow("augmentation exponent"));
        }
    }
    let eps_prime = eps / rat(8);
    let need = rat(q as i64) * (rat(2) + &eps_prime) / (eps - &eps_prime);
    let ell = big_to_ell(need.ceil().to_integer())?.max(1);
    let delta_prime = pick_spread(&eps_prime)?;
    let delta = split_threshold(&rat(1), &delta_prime, ell);
    Ok(RaParams { eps_prime, q, ell, delta_prime, delta })
}

/// One occupied capacity level with its member tasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub k: u32,
    pub ids: Vec<usize>,
}

/// Assigns every id to the levels `max(0, K-ell+1) ..= K` where
/// `K = floor(log2 b)`; returns the occupied groups sorted by level.
pub fn assign_groups(inst: &Instance, ids: &[usize], ell: u64) -> Result<Vec<Group>> {
    let mut members: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    let mut order = validated(inst, ids)?;
    order.sort_unstable();
    for id in order {
        let meta = bottleneck(inst, &inst.tasks[id]);
        let top = floor_log2(meta.b);
        let lo = (top as u64 + 1).saturating_sub(ell) as u32;
        for k in lo..=top {
            members.entry(k).or_default().push(id);
        }
    }
    Ok(members.into_iter().map(|(k, ids)| Group { k, ids }).collect())
}

/// Reduced capacities for level `k`: each edge loses the margin
/// `2^(k+1-q)`. The rational vector carries the exact margin; the integer
/// vector is equivalent for integral loads, rounding the margin up.
pub fn effective_caps(inst: &Instance, k: u32, q: u32) -> (Vec<BigRational>, Vec<i64>) {
    let margin = pow2(k as i32 + 1 - q as i32);
    let int_margin = if k + 1 >= q { 1i64 << (k + 1 - q) } else { 1 };
    let rational = inst.capacities.iter().map(|&u| rat(u) - &margin).collect();
    let integer = inst.capacities.iter().map(|&u| u - int_margin).collect();
    (rational, integer)
}

/// Verifies the augmented capacity contract: every edge's load may exceed
/// the capacity by at most the factor `(2^q + 4) / 2^q`.
pub fn check_augmented(inst: &Instance, selected: &[usize], q: u32) -> Result<bool> {
    let loads = edge_loads(inst, selected)?;
    let scale = BigInt::one() << q as usize;
    let allowance = &scale + 4u32;
    Ok(loads
        .iter()
        .zip(&inst.capacities)
        .all(|(&load, &u)| BigInt::from(load) * &scale <= BigInt::from(u) * &allowance))
}

struct GroupSolve<'a> {
    inst: &'a Instance,
    q: u32,
    ell: u64,
    delta: &'a BigRational,
    delta_prime: &'a BigRational,
    keep_margin: bool,
    budget: usize,
}

impl GroupSolve<'_> {
    /// Best of the two per-group candidates: the fractional rounding over
    /// the tasks below the split threshold and the exact crossing-bounded
    /// optimum (halved onto the reduced capacities when a margin is kept)
    /// over the rest.
    fn run(&self, group: &Group) -> Result<(Solution, usize)> {
        let inst = self.inst;
        let mut tiny_ids = Vec::new();
        let mut med_ids = Vec::new();
        for &id in &group.ids {
            let task = &inst.tasks[id];
            let meta = bottleneck(inst, task);
            if rat(task.d) <= self.delta * rat(meta.b) {
                tiny_ids.push(id);
            } else {
                med_ids.push(id);
            }
        }

        let (rat_caps, int_caps) = if self.keep_margin {
            effective_caps(inst, group.k, self.q)
        } else {
            (inst.capacities.iter().map(|&u| rat(u)).collect(), inst.capacities.clone())
        };

        let mut repairs = 0usize;
        let tiny_sol = if tiny_ids.is_empty() {
            Solution::new(inst, Vec::new(), "tiny")?
        } else {
            let out = solve_tiny(inst, &tiny_ids, self.delta_prime, &rat_caps)?;
            repairs += out.repairs;
            out.solution
        };
        let med_sol = if med_ids.is_empty() {
            Solution::new(inst, Vec::new(), "medium")?
        } else {
            let bound_big = (pow2(self.ell.min(ELL_CLAMP) as i32 + 1) / self.delta)
                .ceil()
                .to_integer();
            let bound = bound_big.to_usize().map_or(med_ids.len(), |b| b.min(med_ids.len()));
            solve_medium(inst, &med_ids, &int_caps, bound, self.budget)?
        };

        for sol in [&tiny_sol, &med_sol] {
            if !check_modified(inst, &sol.selected, &rat_caps)? {
                return Err(Error::Internal(format!(
                    "level {} candidate breaches its capacity margin",
                    group.k
                )));
            }
        }
        let best = combine_best(inst, &[tiny_sol, med_sol])?;
        Ok((best, repairs))
    }
}

/// How the stacked residue-class union is checked before it may win.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StackRule {
    /// The union must respect the original capacities.
    Exact,
    /// The union may overshoot by the factor `(2^q + 4) / 2^q`.
    Augmented { q: u32 },
}

/// Unions the group solutions of every residue class modulo `period` and
/// returns the most profitable class (ties to the smallest residue). Each
/// union is checked against `rule`; a breach means the margins were
/// violated upstream and is reported as an internal error.
pub fn combine_offsets(
    inst: &Instance,
    groups: &[(u32, Solution)],
    period: u64,
    tag: &str,
    rule: StackRule,
) -> Result<(Solution, u64)> {
    if period == 0 {
        return Err(Error::Precondition("offset period must be positive".into()));
    }
    let mut classes: std::collections::BTreeMap<u64, Vec<usize>> = Default::default();
    for (k, sol) in groups {
        classes
            .entry(*k as u64 % period)
            .or_default()
            .extend_from_slice(&sol.selected);
    }
    classes.entry(0).or_default();
    let mut best: Option<(Solution, u64)> = None;
    for (c, ids) in classes {
        let sol = Solution::new(inst, ids.clone(), tag)?;
        // levels in one class are at least a full period apart, so their
        // solutions must stack; a duplicate would mean they overlapped
        if sol.selected.len() != ids.len() {
            return Err(Error::Internal(format!("residue class {c} unions overlapping groups")));
        }
        let ok = match rule {
            StackRule::Exact => check_feasible(inst, &sol.selected)?.feasible,
            StackRule::Augmented { q } => check_augmented(inst, &sol.selected, q)?,
        };
        if !ok {
            return Err(Error::Internal(format!("residue class {c} breaches the stacking rule")));
        }
        if best.as_ref().is_none_or(|(top, _)| sol.profit > top.profit) {
            best = Some((sol, c));
        }
    }
    Ok(best.expect("at least class 0 exists"))
}

#[derive(Debug, Clone)]
pub struct SmallOutcome {
    pub solution: Solution,
    pub params: SmallParams,
    /// Residue class that won.
    pub offset: u64,
    /// Repair-sweep activations across all groups (zero in correct
    /// operation).
    pub repairs: usize,
}

/// Approximation for small tasks: every id must be deliverable with
/// `d <= (1-gamma) * b`. The result is feasible for the original
/// capacities and its profit is within the factor `3 + eps` of the optimum
/// over `ids`.
pub fn solve_small(
    inst: &Instance,
    ids: &[usize],
    eps: &BigRational,
    gamma: &BigRational,
    budget: usize,
) -> Result<SmallOutcome> {
    let params = choose_small_params(eps, gamma)?;
    let cap_fraction = rat(1) - gamma;
    for &id in &validated(inst, ids)? {
        let task = &inst.tasks[id];
        let meta = bottleneck(inst, task);
        if rat(task.d) > &cap_fraction * rat(meta.b) {
            return Err(Error::Precondition(format!(
                "task {id} exceeds the small-demand threshold"
            )));
        }
    }
    let (solution, offset, repairs) = drive_small(
        inst,
        ids,
        params.q,
        params.ell,
        &params.delta,
        &params.delta_prime,
        budget,
    )?;
    Ok(SmallOutcome { solution, params, offset, repairs })
}

/// Small-task driver with caller-fixed geometry instead of derived
/// parameters: `ell` levels per group, margin exponent `q`, rounding
/// threshold `delta`, demand-run spread `delta_prime`. Every id must sit
/// below the threshold (`d <= delta * b`), which keeps the per-group
/// exact program out of play; the fractional rounding does all the work.
/// Returns the winning union, its residue class, and the repair count.
pub fn solve_small_rounding(
    inst: &Instance,
    ids: &[usize],
    q: u32,
    ell: u64,
    delta: &BigRational,
    delta_prime: &BigRational,
    budget: usize,
) -> Result<(Solution, u64, usize)> {
    if q < 2 || ell == 0 {
        return Err(Error::Precondition("rounding driver needs q >= 2 and ell >= 1".into()));
    }
    for &id in &validated(inst, ids)? {
        let task = &inst.tasks[id];
        let meta = bottleneck(inst, task);
        if rat(task.d) > delta * rat(meta.b) {
            return Err(Error::Precondition(format!(
                "task {id} exceeds the rounding threshold"
            )));
        }
    }
    drive_small(inst, ids, q, ell, delta, delta_prime, budget)
}

fn drive_small(
    inst: &Instance,
    ids: &[usize],
    q: u32,
    ell: u64,
    delta: &BigRational,
    delta_prime: &BigRational,
    budget: usize,
) -> Result<(Solution, u64, usize)> {
    let groups = assign_groups(inst, ids, ell)?;
    let solver = GroupSolve { inst, q, ell, delta, delta_prime, keep_margin: true, budget };
    let mut solved = Vec::with_capacity(groups.len());
    let mut repairs = 0usize;
    for group in &groups {
        let (sol, reps) = solver.run(group)?;
        repairs += reps;
        solved.push((group.k, sol));
    }
    let period = ell + q as u64;
    let (solution, offset) = combine_offsets(inst, &solved, period, "small", StackRule::Exact)?;
    Ok((solution, offset, repairs))
}

#[derive(Debug, Clone)]
pub struct RaOutcome {
    pub solution: Solution,
    pub params: RaParams,
    pub offset: u64,
    pub repairs: usize,
}

impl RaOutcome {
    /// Certified overshoot factor as a fraction `(num, den)`: every edge
    /// satisfies `load * den <= capacity * num`.
    pub fn augmentation_factor(&self) -> (BigInt, BigInt) {
        let den = BigInt::one() << self.params.q as usize;
        (&den + 4u32, den)
    }
}

/// Resource-augmented approximation over deliverable ids: profit within
/// the factor `2 + eps` of the optimum over `ids`, loads within the
/// factor `1 + 2^(2-q) <= 1 + beta_aug` of the capacities.
pub fn solve_ra(
    inst: &Instance,
    ids: &[usize],
    eps: &BigRational,
    beta_aug: &BigRational,
    budget: usize,
) -> Result<RaOutcome> {
    let params = choose_ra_params(eps, beta_aug)?;
    for &id in &validated(inst, ids)? {
        let meta = bottleneck(inst, &inst.tasks[id]);
        if meta.slack < 0 {
            return Err(Error::Precondition(format!("task {id} is not deliverable")));
        }
    }
    let groups = assign_groups(inst, ids, params.ell)?;
    let solver = GroupSolve {
        inst,
        q: params.q,
        ell: params.ell,
        delta: &params.delta,
        delta_prime: &params.delta_prime,
        keep_margin: false,
        budget,
    };
    let mut solved = Vec::with_capacity(groups.len());
    let mut repairs = 0usize;
    for group in &groups {
        let (sol, reps) = solver.run(group)?;
        repairs += reps;
        solved.push((group.k, sol));
    }
    let period = params.ell + params.q as u64;
    let rule = StackRule::Augmented { q: params.q };
    let (solution, offset) = combine_offsets(inst, &solved, period, "ra", rule)?;
    Ok(RaOutcome { solution, params, offset, repairs })
}

fn validated(inst: &Instance, ids: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; inst.n()];
    for &id in ids {
        inst.task(id)?;
        if seen[id] {
            return Err(Error::Invalid(format!("duplicate id {id}")));
        }
        seen[id] = true;
    }
    Ok(ids.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::gen::{gen_random, GenParams, ProfitMode};
    use crate::medium::DEFAULT_STATE_BUDGET;
    use crate::model::{classify, Task};
    use crate::oracle::exact_sweep;

    fn inst_from(caps: &[i64], tasks: &[(usize, usize, i64, i64)]) -> Instance {
        let tasks = tasks
            .iter()
            .enumerate()
            .map(|(id, &(s, t, d, w))| Task { id, s, t, d, w })
            .collect();
        Instance::new(caps.len(), caps.to_vec(), tasks).unwrap()
    }

    #[test]
    fn small_constants_for_unit_accuracy() {
        let p = choose_small_params(&rat(1), &ratio(1, 2)).unwrap();
        assert_eq!(p.eps_prime, ratio(1, 8));
        assert_eq!(p.q, 5);
        assert_eq!(p.ell, 40);
        assert_eq!(p.beta, ratio(1, 16));
        assert_eq!(p.delta_prime, ratio(3, 1024));
        let floor_term = ratio(15, 16) * pow2(-40);
        assert_eq!(p.delta, floor_term);
    }

    #[test]
    fn ra_constants_for_unit_accuracy() {
        let p = choose_ra_params(&rat(1), &ratio(1, 2)).unwrap();
        assert_eq!(p.eps_prime, ratio(1, 8));
        assert_eq!(p.q, 3);
        assert_eq!(p.ell, 8);
        assert_eq!(p.delta_prime, ratio(3, 1024));
        assert_eq!(p.delta, ratio(3, 1024));
    }

    #[test]
    fn choosers_reject_degenerate_arguments() {
        assert!(choose_small_params(&rat(0), &ratio(1, 2)).is_err());
        assert!(choose_small_params(&rat(1), &rat(1)).is_err());
        assert!(choose_small_params(&rat(1), &rat(0)).is_err());
        assert!(choose_ra_params(&rat(-1), &ratio(1, 2)).is_err());
        assert!(choose_ra_params(&rat(1), &rat(0)).is_err());
    }

    #[test]
    fn accuracy_refinement_handles_coarse_requests() {
        // a tiny gamma forces a large margin exponent, whose span ratio
        // breaks the end-to-end bound at the raw eps/8; the halving loop
        // has to run once
        let p = choose_small_params(&rat(1000), &ratio(1, 1000)).unwrap();
        assert_eq!(p.eps_prime, ratio(125, 2));
        assert_eq!(p.q, 12);
        let levels = BigRational::from_integer(BigInt::from(p.ell));
        let span_ratio = (&levels + rat(p.q as i64)) / &levels;
        let group_factor = rat(2) + (rat(1) + &p.eps_prime) / (rat(1) - &p.beta);
        assert!(group_factor * span_ratio <= rat(1003));
    }

    #[test]
    fn margin_rounds_up_on_fractional_levels() {
        let inst = inst_from(&[16], &[(0, 1, 1, 1)]);
        let (rational, integer) = effective_caps(&inst, 3, 5);
        assert_eq!(rational[0], ratio(31, 2));
        assert_eq!(integer[0], 15);
        let (rational, integer) = effective_caps(&inst, 4, 5);
        assert_eq!(rational[0], rat(15));
        assert_eq!(integer[0], 15);
    }

    #[test]
    fn group_membership_spans_consecutive_levels() {
        let inst = inst_from(
            &[8, 1, 2],
            &[(0, 1, 1, 1), (1, 2, 1, 1), (2, 3, 2, 1)],
        );
        let groups = assign_groups(&inst, &[0, 1, 2], 3).unwrap();
        // b = 8 -> levels 1..=3; b = 1 -> level 0; b = 2 -> levels 0..=1
        let view: Vec<(u32, Vec<usize>)> =
            groups.into_iter().map(|g| (g.k, g.ids)).collect();
        assert_eq!(
            view,
            vec![(0, vec![1, 2]), (1, vec![0, 2]), (2, vec![0]), (3, vec![0])]
        );
    }

    #[test]
    fn distant_levels_stack_onto_shared_edges() {
        // the wide task keeps the margin 2^(8+1-5) = 16 free on edge 0,
        // which is exactly where the level-0 task lands
        let inst = inst_from(&[256, 1], &[(0, 1, 240, 9), (0, 2, 1, 4)]);
        let a = Solution::new(&inst, vec![0], "medium").unwrap();
        let b = Solution::new(&inst, vec![1], "tiny").unwrap();
        let (sol, c) =
            combine_offsets(&inst, &[(8, a), (0, b)], 8, "small", StackRule::Exact).unwrap();
        assert_eq!(c, 0);
        assert_eq!(sol.selected, vec![0, 1]);
        assert_eq!(sol.profit, 13);
        assert_eq!(sol.algorithm_tag, "small");
    }

    #[test]
    fn stacking_breach_is_an_internal_error() {
        let inst = inst_from(&[256, 1], &[(0, 1, 256, 9), (0, 2, 1, 4)]);
        let a = Solution::new(&inst, vec![0], "medium").unwrap();
        let b = Solution::new(&inst, vec![1], "tiny").unwrap();
        let err = combine_offsets(&inst, &[(8, a), (0, b)], 8, "small", StackRule::Exact)
            .unwrap_err();
        assert!(matches!(err, Error::Internal(_)));
    }

    #[test]
    fn offset_ties_resolve_to_the_smallest_residue() {
        let inst = inst_from(&[4, 4], &[(0, 1, 1, 5), (1, 2, 1, 5)]);
        let a = Solution::new(&inst, vec![0], "x").unwrap();
        let b = Solution::new(&inst, vec![1], "x").unwrap();
        let (sol, c) =
            combine_offsets(&inst, &[(1, a), (2, b)], 5, "small", StackRule::Exact).unwrap();
        assert_eq!(c, 1);
        assert_eq!(sol.selected, vec![0]);
    }

    #[test]
    fn empty_input_yields_the_empty_solution() {
        let inst = inst_from(&[4], &[(0, 1, 1, 1)]);
        let out = solve_small(&inst, &[], &rat(1), &ratio(1, 2), DEFAULT_STATE_BUDGET).unwrap();
        assert!(out.solution.selected.is_empty());
        assert_eq!(out.offset, 0);
        let out = solve_ra(&inst, &[], &rat(1), &ratio(1, 2), DEFAULT_STATE_BUDGET).unwrap();
        assert!(out.solution.selected.is_empty());
    }

    #[test]
    fn small_driver_rejects_oversized_demands() {
        let inst = inst_from(&[4], &[(0, 1, 3, 1)]);
        let err = solve_small(&inst, &[0], &rat(1), &ratio(1, 2), DEFAULT_STATE_BUDGET)
            .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn small_driver_meets_its_factor_on_random_instances() {
        for seed in 1..=40u64 {
            let params = GenParams {
                n: 4 + (seed % 7) as usize,
                m: 2 + (seed % 5) as usize,
                cap_max: 40,
                demand_max: 12,
                profit: ProfitMode::Uniform,
                seed: 7000 + seed,
            };
            let inst = gen_random(&params).unwrap();
            let (small, _) = classify(&inst, &ratio(1, 2));
            if small.is_empty() {
                continue;
            }
            let out =
                solve_small(&inst, &small, &rat(1), &ratio(1, 2), DEFAULT_STATE_BUDGET).unwrap();
            let opt = exact_sweep(&inst, &small, DEFAULT_STATE_BUDGET).unwrap();
            assert!(
                4 * out.solution.profit >= opt.profit,
                "seed {seed}: alg {} vs opt {}",
                out.solution.profit,
                opt.profit
            );
            assert_eq!(out.repairs, 0, "seed {seed}");
            assert!(check_feasible(&inst, &out.solution.selected).unwrap().feasible);
        }
    }

    #[test]
    fn augmented_driver_meets_factor_and_overshoot_budget() {
        for seed in 1..=40u64 {
            let params = GenParams {
                n: 4 + (seed % 7) as usize,
                m: 2 + (seed % 5) as usize,
                cap_max: 30,
                demand_max: 25,
                profit: ProfitMode::Uniform,
                seed: 9000 + seed,
            };
            let inst = gen_random(&params).unwrap();
            let ids = inst.deliverable_ids();
            let out =
                solve_ra(&inst, &ids, &rat(1), &ratio(1, 2), DEFAULT_STATE_BUDGET).unwrap();
            assert_eq!(out.params.q, 3);
            let opt = exact_sweep(&inst, &ids, DEFAULT_STATE_BUDGET).unwrap();
            assert!(
                3 * out.solution.profit >= opt.profit,
                "seed {seed}: alg {} vs opt {}",
                out.solution.profit,
                opt.profit
            );
            let loads = edge_loads(&inst, &out.solution.selected).unwrap();
            for (e, &load) in loads.iter().enumerate() {
                assert!(2 * load <= 3 * inst.capacities[e], "seed {seed} edge {e}");
            }
        }
    }
}
