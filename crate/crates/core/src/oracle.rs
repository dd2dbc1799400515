//! Exact brute-force optimum for micro instances.
//!
//! Enumerates every resource-feasible assignment of buses to candidate lines
//! and, for each, solves the integer demand-allocation subproblem by
//! depth-first search with an optimistic upper-bound prune. The allocation
//! subproblem couples per-bus arc-capacity (interval) constraints with
//! cross-bus demand rows, so exact search is used rather than LP rounding.
//! Intended as ground truth for approximation-ratio tests, not for scale.

use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::instance::{build_subpath_index, Instance, SubpathIndex};
use crate::rounding::IntegralPlan;

/// Integer allocation witness: served amount per (bus, od).
pub type AllocationMap = BTreeMap<(usize, usize), u32>;
use crate::rational::{rat_to_f64, Rat};

/// Search limits and switches for the exact solver.
#[derive(Debug, Clone)]
pub struct OracleLimits {
    /// Maximum number of line assignments (product of candidate-line counts).
    pub max_assignments: u64,
    /// Maximum estimated allocation search space per assignment.
    pub max_allocation_space: f64,
    /// Upper-bound prune in the allocation search (sound; on by default).
    pub prune: bool,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_assignments: 100_000, max_allocation_space: 1e7, prune: true }
    }
}

impl OracleLimits {
    /// No limits and no pruning: the slow reference configuration.
    pub fn unpruned_reference() -> Self {
        OracleLimits { max_assignments: u64::MAX, max_allocation_space: f64::INFINITY, prune: false }
    }
}

/// Exact optimum with one witness plan and search statistics.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub opt_value: Rat,
    pub plan: IntegralPlan,
    pub nodes_explored: u64,
    pub assignments_enumerated: u64,
}

impl OracleResult {
    pub fn opt_f64(&self) -> f64 {
        rat_to_f64(&self.opt_value)
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance exceeds oracle limits: {what} is {actual}, limit {limit}")]
    LimitExceeded { what: &'static str, actual: f64, limit: f64 },
    #[error("fixed assignment is not resource-feasible or uses a non-candidate line: {0}")]
    BadAssignment(String),
}

/// Exact optimum of the integer program over all resource-feasible line
/// assignments and integer allocations.
pub fn solve_exact(instance: &Instance, limits: &OracleLimits) -> Result<OracleResult, OracleError> {
    let assignments: f64 = instance
        .buses
        .iter()
        .map(|b| b.candidate_lines.len() as f64)
        .product();
    if assignments > limits.max_assignments as f64 {
        return Err(OracleError::LimitExceeded {
            what: "line assignment count",
            actual: assignments,
            limit: limits.max_assignments as f64,
        });
    }

    let index = build_subpath_index(instance);
    let mut best_value = Rat::zero();
    let mut best_plan: Option<(Vec<usize>, AllocationMap)> = None;
    let mut nodes = 0u64;
    let mut enumerated = 0u64;

    let mut assignment = vec![0usize; instance.buses.len()];
    enumerate_assignments(
        instance,
        &index,
        limits,
        0,
        &mut vec![Rat::zero(); instance.k],
        &mut assignment,
        &mut enumerated,
        &mut nodes,
        &mut best_value,
        &mut best_plan,
    )?;

    let (assignment, xi) = best_plan.unwrap_or_else(|| {
        let dummies = (0..instance.buses.len())
            .map(|b| instance.dummy_line_of(b).expect("every bus has a dummy line"))
            .collect();
        (dummies, BTreeMap::new())
    });
    let mut usage = vec![Rat::zero(); instance.k];
    for (b, &l) in assignment.iter().enumerate() {
        for (r, slot) in usage.iter_mut().enumerate() {
            *slot = slot.clone() + instance.cost(b, l, r);
        }
    }
    let plan = IntegralPlan {
        assignment,
        xi,
        reward: best_value.clone(),
        usage,
        discarded: false,
        seed: 0,
    };
    Ok(OracleResult { opt_value: best_value, plan, nodes_explored: nodes, assignments_enumerated: enumerated })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_assignments(
    instance: &Instance,
    index: &SubpathIndex,
    limits: &OracleLimits,
    bus: usize,
    usage: &mut Vec<Rat>,
    assignment: &mut Vec<usize>,
    enumerated: &mut u64,
    nodes: &mut u64,
    best_value: &mut Rat,
    best_plan: &mut Option<(Vec<usize>, AllocationMap)>,
) -> Result<(), OracleError> {
    if bus == instance.buses.len() {
        *enumerated += 1;
        let (value, xi) =
            allocation_search(instance, index, assignment, limits, nodes, Some(best_value))?;
        if value > *best_value || (best_plan.is_none() && value >= *best_value) {
            *best_value = value;
            *best_plan = Some((assignment.clone(), xi));
        }
        return Ok(());
    }
    for &l in &instance.buses[bus].candidate_lines {
        // Nonnegative costs make cost-prefix pruning sound.
        let mut ok = true;
        for (r, used) in usage.iter_mut().enumerate() {
            *used = used.clone() + instance.cost(bus, l, r);
            if *used > Rat::one() {
                ok = false;
            }
        }
        if ok {
            assignment[bus] = l;
            enumerate_assignments(
                instance, index, limits, bus + 1, usage, assignment, enumerated, nodes,
                best_value, best_plan,
            )?;
        }
        for (r, used) in usage.iter_mut().enumerate() {
            *used = used.clone() - instance.cost(bus, l, r);
        }
    }
    Ok(())
}

/// One fillable slot of the allocation search: a bus that can serve an OD.
struct Slot {
    od: usize,
    bus: usize,
    reward: Rat,
}

/// Exact integer optimum of the allocation subproblem for a fixed
/// bus-to-line assignment. Returns the value and a witness allocation.
pub fn solve_allocation_exact(
    instance: &Instance,
    assignment: &[usize],
) -> Result<(Rat, AllocationMap), OracleError> {
    for (b, &l) in assignment.iter().enumerate() {
        if !instance.buses[b].candidate_lines.contains(&l) {
            return Err(OracleError::BadAssignment(format!(
                "bus '{}' fixed to non-candidate line index {}",
                instance.buses[b].id, l
            )));
        }
    }
    let mut usage = vec![Rat::zero(); instance.k];
    for (b, &l) in assignment.iter().enumerate() {
        for (r, slot) in usage.iter_mut().enumerate() {
            *slot = slot.clone() + instance.cost(b, l, r);
        }
    }
    if usage.iter().any(|u| *u > Rat::one()) {
        return Err(OracleError::BadAssignment("resource budget exceeded".into()));
    }
    let index = build_subpath_index(instance);
    let mut nodes = 0u64;
    allocation_search(instance, &index, assignment, &OracleLimits::default(), &mut nodes, None)
}

fn allocation_search(
    instance: &Instance,
    index: &SubpathIndex,
    assignment: &[usize],
    limits: &OracleLimits,
    nodes: &mut u64,
    incumbent: Option<&Rat>,
) -> Result<(Rat, AllocationMap), OracleError> {
    // ODs ordered by descending best per-unit reward for stronger pruning.
    let mut od_order: Vec<(usize, Rat)> = (0..instance.od_pairs.len())
        .map(|od| {
            let best = assignment
                .iter()
                .enumerate()
                .filter(|(_, &l)| index.serves(od, l))
                .map(|(b, &l)| instance.reward(b, l, od))
                .max()
                .unwrap_or_else(Rat::zero);
            (od, best)
        })
        .collect();
    od_order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut slots: Vec<Slot> = Vec::new();
    let mut space = 1.0f64;
    for (od, _) in &od_order {
        let mut serving: Vec<(usize, Rat)> = assignment
            .iter()
            .enumerate()
            .filter(|(_, &l)| index.serves(*od, l))
            .map(|(b, &l)| (b, instance.reward(b, l, *od)))
            .collect();
        serving.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (b, reward) in serving {
            let cap = instance.buses[b].capacity.min(instance.od_pairs[*od].demand);
            space *= (cap + 1) as f64;
            slots.push(Slot { od: *od, bus: b, reward });
        }
    }
    if space > limits.max_allocation_space {
        return Err(OracleError::LimitExceeded {
            what: "allocation search space",
            actual: space,
            limit: limits.max_allocation_space,
        });
    }

    // Optimistic suffix bound: every remaining slot filled to the smaller of
    // its bus capacity and the OD's full demand. Over-counts shared demand
    // and shared capacity, so it is a sound upper bound.
    let mut suffix = vec![Rat::zero(); slots.len() + 1];
    for i in (0..slots.len()).rev() {
        let d = instance.od_pairs[slots[i].od].demand;
        let cap = instance.buses[slots[i].bus].capacity.min(d);
        suffix[i] =
            suffix[i + 1].clone() + slots[i].reward.clone() * Rat::from_integer(cap.into());
    }

    // Remaining capacity per (bus, arc position of its line).
    let mut arc_capacity: Vec<Vec<u32>> = assignment
        .iter()
        .enumerate()
        .map(|(b, &l)| vec![instance.buses[b].capacity; instance.lines[l].arcs.len()])
        .collect();
    let mut demand_left: Vec<u32> = instance.od_pairs.iter().map(|p| p.demand).collect();
    let mut current: AllocationMap = BTreeMap::new();
    let mut best = (Rat::zero(), BTreeMap::new());

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        instance: &Instance,
        index: &SubpathIndex,
        assignment: &[usize],
        slots: &[Slot],
        suffix: &[Rat],
        prune: bool,
        i: usize,
        value: Rat,
        arc_capacity: &mut Vec<Vec<u32>>,
        demand_left: &mut Vec<u32>,
        current: &mut AllocationMap,
        best: &mut (Rat, AllocationMap),
        incumbent: Option<&Rat>,
        nodes: &mut u64,
    ) {
        *nodes += 1;
        if i == slots.len() {
            if value > best.0 {
                *best = (value, current.clone());
            }
            return;
        }
        if prune {
            let bound = value.clone() + suffix[i].clone();
            let floor = incumbent.filter(|inc| **inc > best.0).unwrap_or(&best.0);
            if bound <= *floor && !floor.is_zero() {
                return;
            }
        }
        let slot = &slots[i];
        let l = assignment[slot.bus];
        let max_cap = (0..instance.lines[l].arcs.len())
            .filter(|&pos| index.covers_arc(slot.od, l, pos))
            .map(|pos| arc_capacity[slot.bus][pos])
            .min()
            .unwrap_or(0);
        let max_t = max_cap.min(demand_left[slot.od]);
        // High amounts first so the greedy-looking branch is explored early.
        for t in (0..=max_t).rev() {
            if t > 0 {
                demand_left[slot.od] -= t;
                for (pos, cap) in arc_capacity[slot.bus].iter_mut().enumerate() {
                    if index.covers_arc(slot.od, l, pos) {
                        *cap -= t;
                    }
                }
                current.insert((slot.bus, slot.od), t);
            }
            let gained = slot.reward.clone() * Rat::from_integer(t.into());
            recurse(
                instance, index, assignment, slots, suffix, prune, i + 1,
                value.clone() + gained, arc_capacity, demand_left, current, best, incumbent, nodes,
            );
            if t > 0 {
                demand_left[slot.od] += t;
                for (pos, cap) in arc_capacity[slot.bus].iter_mut().enumerate() {
                    if index.covers_arc(slot.od, l, pos) {
                        *cap += t;
                    }
                }
                current.remove(&(slot.bus, slot.od));
            }
        }
    }

    recurse(
        instance, index, assignment, &slots, &suffix, limits.prune, 0, Rat::zero(),
        &mut arc_capacity, &mut demand_left, &mut current, &mut best, incumbent, nodes,
    );
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Arc, Bus, Instance, Line, Network, OdPair};
    use crate::rational::{rat, rat_int};
    use crate::relaxation::{solve_relaxation, LpMode, Restriction};
    use std::collections::BTreeMap;

    fn single_arc_instance(buses: Vec<Bus>, demand: u32, rewards: Vec<(usize, Rat)>) -> Instance {
        let network = Network {
            nodes: vec!["s".into(), "t".into()],
            arcs: vec![Arc { id: "a0".into(), tail: "s".into(), head: "t".into() }],
        };
        let lines = vec![
            Line { id: "dummy".into(), arcs: vec![] },
            Line { id: "l1".into(), arcs: vec![0] },
        ];
        let mut reward_map = BTreeMap::new();
        for (b, r) in rewards {
            reward_map.insert((b, 1, 0), r);
        }
        Instance {
            network,
            lines,
            buses,
            od_pairs: vec![OdPair { origin: 0, destination: 1, demand }],
            k: 1,
            rewards: reward_map,
            costs: BTreeMap::new(),
        }
    }

    #[test]
    fn zero_rewards_all_dummy() {
        let inst = single_arc_instance(
            vec![Bus { id: "b1".into(), capacity: 3, candidate_lines: vec![0, 1] }],
            5,
            vec![],
        );
        let res = solve_exact(&inst, &OracleLimits::default()).unwrap();
        assert!(res.opt_value.is_zero());
        assert!(res.plan.xi.is_empty());
    }

    #[test]
    fn single_bus_capacity_bound() {
        // d = 5, C = 3, v = 2: opt = 6.
        let inst = single_arc_instance(
            vec![Bus { id: "b1".into(), capacity: 3, candidate_lines: vec![0, 1] }],
            5,
            vec![(0, rat_int(2))],
        );
        let res = solve_exact(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(res.opt_value, rat_int(6));
    }

    #[test]
    fn allocation_two_buses_greedy_forced() {
        // d = 3, capacities 2 and 2, v1 = 4, v2 = 1: 2·4 + 1·1 = 9.
        let inst = single_arc_instance(
            vec![
                Bus { id: "b1".into(), capacity: 2, candidate_lines: vec![0, 1] },
                Bus { id: "b2".into(), capacity: 2, candidate_lines: vec![0, 1] },
            ],
            3,
            vec![(0, rat_int(4)), (1, rat_int(1))],
        );
        let (value, xi) = solve_allocation_exact(&inst, &[1, 1]).unwrap();
        assert_eq!(value, rat_int(9));
        assert_eq!(xi.get(&(0, 0)), Some(&2));
        assert_eq!(xi.get(&(1, 0)), Some(&1));
    }

    #[test]
    fn allocation_unservable_is_zero() {
        let inst = single_arc_instance(
            vec![Bus { id: "b1".into(), capacity: 3, candidate_lines: vec![0, 1] }],
            5,
            vec![(0, rat_int(2))],
        );
        let (value, xi) = solve_allocation_exact(&inst, &[0]).unwrap();
        assert!(value.is_zero());
        assert!(xi.is_empty());
    }

    #[test]
    fn pruning_does_not_change_optimum() {
        let inst = single_arc_instance(
            vec![
                Bus { id: "b1".into(), capacity: 2, candidate_lines: vec![0, 1] },
                Bus { id: "b2".into(), capacity: 3, candidate_lines: vec![0, 1] },
            ],
            4,
            vec![(0, rat(7, 2)), (1, rat_int(1))],
        );
        let pruned = solve_exact(&inst, &OracleLimits::default()).unwrap();
        let reference = solve_exact(&inst, &OracleLimits::unpruned_reference()).unwrap();
        assert_eq!(pruned.opt_value, reference.opt_value);
        assert!(pruned.nodes_explored <= reference.nodes_explored);
    }

    #[test]
    fn resource_budget_restricts_assignments() {
        // Each bus's line costs 0.6: only one bus can run it.
        let mut inst = single_arc_instance(
            vec![
                Bus { id: "b1".into(), capacity: 2, candidate_lines: vec![0, 1] },
                Bus { id: "b2".into(), capacity: 2, candidate_lines: vec![0, 1] },
            ],
            4,
            vec![(0, rat_int(3)), (1, rat_int(2))],
        );
        inst.costs.insert((0, 1, 0), rat(3, 5));
        inst.costs.insert((1, 1, 0), rat(3, 5));
        let res = solve_exact(&inst, &OracleLimits::default()).unwrap();
        // Best single bus: b1 serves 2 units at reward 3.
        assert_eq!(res.opt_value, rat_int(6));
        let report = crate::rounding::check_feasibility(&res.plan, &inst, Some(&rat_int(1)));
        assert!(report.is_feasible(), "{:?}", report.violations);
    }

    #[test]
    fn opt_ip_below_full_relaxation() {
        let inst = single_arc_instance(
            vec![
                Bus { id: "b1".into(), capacity: 2, candidate_lines: vec![0, 1] },
                Bus { id: "b2".into(), capacity: 3, candidate_lines: vec![0, 1] },
            ],
            4,
            vec![(0, rat_int(2)), (1, rat_int(1))],
        );
        let res = solve_exact(&inst, &OracleLimits::default()).unwrap();
        let full = solve_relaxation(&inst, Restriction::Full, LpMode::Exact).unwrap();
        assert!(res.opt_value <= full.gamma);
    }

    #[test]
    fn limit_exceeded_reported() {
        let inst = single_arc_instance(
            vec![Bus { id: "b1".into(), capacity: 3, candidate_lines: vec![0, 1] }],
            5,
            vec![(0, rat_int(2))],
        );
        let limits = OracleLimits { max_assignments: 1, ..OracleLimits::default() };
        assert!(matches!(
            solve_exact(&inst, &limits),
            Err(OracleError::LimitExceeded { .. })
        ));
    }
}
