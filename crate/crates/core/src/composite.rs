//! Composite algorithms over high-cost / low-cost line splits.
//!
//! A line is high-cost at threshold δ when some resource cost exceeds δ.
//! `enumerate_a_delta` lists every resource-feasible partial assignment of
//! high-cost lines (the candidate "expensive cores" of a plan); by
//! pigeonhole, each such assignment touches at most K/δ buses, keeping the
//! enumeration finite at desk scale.
//!
//! Algorithm C compares the best low-cost relaxation value Γ_δ against the
//! best fixed-assignment value f(ω) over all enumerated ω, then rounds the
//! winning side (low-cost rounding or no-cost rounding). Its output respects
//! every resource budget exactly. The tolerance variant rounds a modified
//! relaxation with rescaled costs and may exceed each budget by at most τ,
//! in exchange for a stronger reward guarantee.
//!
//! Each algorithm is split into a deterministic preparation step (all LP
//! work) and a cheap per-seed rounding step, so repeated trials share the
//! preparation.

use num_traits::{One, Zero};
use serde_json::json;
use thiserror::Error;

use crate::instance::Instance;
use crate::rational::{format_rat, rat_int, rat_to_f64, Rat};
use crate::relaxation::{
    solve_relaxation, Assignment, FractionalPlan, LpMode, RelaxError, Restriction,
};
use crate::rounding::{
    round_lc, round_nc, IntegralPlan, RoundingError, RoundingParams,
};

/// A resource-feasible partial assignment of high-cost lines.
#[derive(Debug, Clone, PartialEq)]
pub struct HighCostAssignment {
    /// bus -> line, every line high-cost at the enumeration threshold.
    pub omega: Assignment,
    /// Per-resource cost Σ c·ω.
    pub consumption: Vec<Rat>,
}

/// Default cap on the number of enumerated assignments.
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum CompositeError {
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error("high-cost assignment enumeration exceeded the cap of {cap}; the threshold delta = {delta} is too small for this instance")]
    EnumerationCap { cap: usize, delta: String },
    #[error("eta must lie strictly between 0 and {bound}, got {value}")]
    BadEta { bound: &'static str, value: String },
    #[error("tau must lie strictly between 0 and 1/2, got {0}")]
    BadTau(String),
}

/// Enumerates every resource-feasible partial assignment of high-cost lines
/// at threshold `delta`, including the empty assignment, in depth-first
/// order over ascending bus ids and ascending line indices.
pub fn enumerate_a_delta(
    instance: &Instance,
    delta: &Rat,
    cap: usize,
) -> Result<Vec<HighCostAssignment>, CompositeError> {
    // Per bus: candidate lines that are high-cost at delta.
    let high: Vec<Vec<usize>> = instance
        .buses
        .iter()
        .enumerate()
        .map(|(b, bus)| {
            bus.candidate_lines
                .iter()
                .copied()
                .filter(|&l| instance.max_cost(b, l) > *delta)
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut omega = Assignment::new();
    let mut consumption = vec![Rat::zero(); instance.k];
    dfs_a_delta(instance, &high, delta, cap, 0, &mut omega, &mut consumption, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs_a_delta(
    instance: &Instance,
    high: &[Vec<usize>],
    delta: &Rat,
    cap: usize,
    bus: usize,
    omega: &mut Assignment,
    consumption: &mut Vec<Rat>,
    out: &mut Vec<HighCostAssignment>,
) -> Result<(), CompositeError> {
    if bus == high.len() {
        if out.len() >= cap {
            return Err(CompositeError::EnumerationCap { cap, delta: format_rat(delta) });
        }
        out.push(HighCostAssignment { omega: omega.clone(), consumption: consumption.clone() });
        return Ok(());
    }
    // Leave this bus unassigned.
    dfs_a_delta(instance, high, delta, cap, bus + 1, omega, consumption, out)?;
    for &l in &high[bus] {
        // Nonnegative costs: an over-budget prefix cannot become feasible.
        let mut feasible = true;
        for (r, used) in consumption.iter_mut().enumerate() {
            *used = used.clone() + instance.cost(bus, l, r);
            if *used > Rat::one() {
                feasible = false;
            }
        }
        if feasible {
            omega.insert(bus, l);
            dfs_a_delta(instance, high, delta, cap, bus + 1, omega, consumption, out)?;
            omega.remove(&bus);
        }
        for (r, used) in consumption.iter_mut().enumerate() {
            *used = used.clone() - instance.cost(bus, l, r);
        }
    }
    Ok(())
}

/// Which side Algorithm C rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    LowCost,
    Fixed,
}

/// All deterministic work of a composite algorithm, reusable across seeds.
#[derive(Debug, Clone)]
pub struct CompositePrep {
    /// High-cost threshold used for the enumeration.
    pub delta: Rat,
    pub branch: Branch,
    /// Maximizer of the fixed/modified relaxation value over the enumeration.
    pub omega_star: Assignment,
    /// Γ of the low-cost relaxation (exact-budget variant only; zero otherwise).
    pub gamma_delta: Rat,
    /// Best fixed/modified relaxation value f(ω*).
    pub f_star: Rat,
    /// The fractional plan the rounding step consumes.
    pub plan: FractionalPlan,
    pub params: RoundingParams,
    /// Tolerance τ of the relaxed-budget variant; zero for the exact variant.
    pub tau: Rat,
}

impl CompositePrep {
    /// CLI-facing summary: branch, ω*, and the compared relaxation values.
    pub fn to_json(&self, instance: &Instance) -> serde_json::Value {
        let omega: serde_json::Map<String, serde_json::Value> = self
            .omega_star
            .iter()
            .map(|(&b, &l)| (instance.buses[b].id.clone(), json!(instance.lines[l].id)))
            .collect();
        json!({
            "branch": match self.branch { Branch::LowCost => "LOW_COST", Branch::Fixed => "FIXED" },
            "delta": format_rat(&self.delta),
            "omega_star": omega,
            "gamma_delta": rat_to_f64(&self.gamma_delta),
            "f_star": rat_to_f64(&self.f_star),
            "tau": format_rat(&self.tau),
        })
    }
}

fn check_range(value: &Rat, num: i64, den: i64, bound: &'static str) -> Result<(), CompositeError> {
    if *value <= Rat::zero() || *value >= rat_int(num) / rat_int(den) {
        return Err(CompositeError::BadEta { bound, value: format_rat(value) });
    }
    Ok(())
}

/// Deterministic phase of Algorithm C: solves the low-cost relaxation and
/// every fixed relaxation over the enumerated high-cost assignments, then
/// picks the branch (ties go to the low-cost side).
pub fn prepare_c(
    instance: &Instance,
    eta: &Rat,
    mode: LpMode,
    cap: usize,
) -> Result<CompositePrep, CompositeError> {
    check_range(eta, 1, 4, "1/4")?;
    let params = RoundingParams::new(eta.clone(), instance.k)?;
    let delta = params.delta.clone();

    let low_plan = solve_relaxation(instance, Restriction::LowCost(delta.clone()), mode)?;
    let gamma_delta = low_plan.gamma.clone();

    let mut omega_star = Assignment::new();
    let mut f_star = Rat::zero();
    let mut best_plan: Option<FractionalPlan> = None;
    for hca in enumerate_a_delta(instance, &delta, cap)? {
        let plan = solve_relaxation(instance, Restriction::Fixed(hca.omega.clone()), mode)?;
        // First maximizer in enumeration order wins ties.
        if best_plan.is_none() || plan.gamma > f_star {
            f_star = plan.gamma.clone();
            omega_star = hca.omega;
            best_plan = Some(plan);
        }
    }
    let fixed_plan = best_plan.expect("enumeration always yields the empty assignment");

    let (branch, plan) = if gamma_delta >= f_star {
        (Branch::LowCost, low_plan)
    } else {
        (Branch::Fixed, fixed_plan)
    };
    Ok(CompositePrep {
        delta,
        branch,
        omega_star,
        gamma_delta,
        f_star,
        plan,
        params,
        tau: Rat::zero(),
    })
}

/// Per-seed phase of Algorithm C.
pub fn round_c(
    instance: &Instance,
    prep: &CompositePrep,
    seed: u64,
) -> Result<IntegralPlan, CompositeError> {
    match prep.branch {
        Branch::LowCost => Ok(round_lc(instance, &prep.plan, &prep.params, seed)?),
        Branch::Fixed => Ok(round_nc(instance, &prep.plan, seed)),
    }
}

/// Algorithm C: exact-budget composite rounding with ratio 1/2 - 1/(2e) - η.
pub fn algorithm_c(
    instance: &Instance,
    eta: &Rat,
    seed: u64,
    mode: LpMode,
    cap: usize,
) -> Result<IntegralPlan, CompositeError> {
    let prep = prepare_c(instance, eta, mode, cap)?;
    round_c(instance, &prep, seed)
}

/// Deterministic phase of the tolerance variant: enumerates at the smaller
/// threshold δ = τ·η³/(256K³) and maximizes the modified relaxation value.
pub fn prepare_c_tol(
    instance: &Instance,
    eta: &Rat,
    tau: &Rat,
    mode: LpMode,
    cap: usize,
) -> Result<CompositePrep, CompositeError> {
    check_range(eta, 1, 2, "1/2")?;
    if *tau <= Rat::zero() || *tau >= rat_int(1) / rat_int(2) {
        return Err(CompositeError::BadTau(format_rat(tau)));
    }
    let params = RoundingParams::new(eta.clone(), instance.k)?;
    let delta = tau.clone() * params.delta.clone();

    let mut omega_star = Assignment::new();
    let mut f_star = Rat::zero();
    let mut best_plan: Option<FractionalPlan> = None;
    for hca in enumerate_a_delta(instance, &delta, cap)? {
        let plan = solve_relaxation(
            instance,
            Restriction::Modified {
                delta: delta.clone(),
                tau: tau.clone(),
                omega: hca.omega.clone(),
            },
            mode,
        )?;
        if best_plan.is_none() || plan.gamma > f_star {
            f_star = plan.gamma.clone();
            omega_star = hca.omega;
            best_plan = Some(plan);
        }
    }
    let plan = best_plan.expect("enumeration always yields the empty assignment");

    Ok(CompositePrep {
        delta,
        branch: Branch::LowCost,
        omega_star,
        gamma_delta: Rat::zero(),
        f_star,
        plan,
        params,
        tau: tau.clone(),
    })
}

/// Per-seed phase of the tolerance variant: low-cost rounding under the
/// rescaled costs carried by the plan's columns.
pub fn round_c_tol(
    instance: &Instance,
    prep: &CompositePrep,
    seed: u64,
) -> Result<IntegralPlan, CompositeError> {
    Ok(round_lc(instance, &prep.plan, &prep.params, seed)?)
}

/// Tolerance composite: reward ratio 1 - 1/e - η against the integer
/// optimum, with true per-resource usage at most 1 + τ on every seed.
pub fn algorithm_c_tol(
    instance: &Instance,
    eta: &Rat,
    tau: &Rat,
    seed: u64,
    mode: LpMode,
    cap: usize,
) -> Result<IntegralPlan, CompositeError> {
    let prep = prepare_c_tol(instance, eta, tau, mode, cap)?;
    round_c_tol(instance, &prep, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Arc, Bus, Instance, Line, Network, OdPair};
    use crate::rational::rat;
    use crate::rounding::check_feasibility;
    use std::collections::BTreeMap;

    /// Two buses over one arc; per-bus line costs configurable on K = 1.
    fn two_bus_costed(c1: Rat, c2: Rat) -> Instance {
        let network = Network {
            nodes: vec!["s".into(), "t".into()],
            arcs: vec![Arc { id: "a0".into(), tail: "s".into(), head: "t".into() }],
        };
        let lines = vec![
            Line { id: "dummy".into(), arcs: vec![] },
            Line { id: "l1".into(), arcs: vec![0] },
            Line { id: "l2".into(), arcs: vec![0] },
        ];
        let buses = vec![
            Bus { id: "b1".into(), capacity: 2, candidate_lines: vec![0, 1] },
            Bus { id: "b2".into(), capacity: 2, candidate_lines: vec![0, 2] },
        ];
        let mut rewards = BTreeMap::new();
        rewards.insert((0, 1, 0), rat_int(3));
        rewards.insert((1, 2, 0), rat_int(2));
        let mut costs = BTreeMap::new();
        if !c1.is_zero() {
            costs.insert((0, 1, 0), c1);
        }
        if !c2.is_zero() {
            costs.insert((1, 2, 0), c2);
        }
        Instance {
            network,
            lines,
            buses,
            od_pairs: vec![OdPair { origin: 0, destination: 1, demand: 4 }],
            k: 1,
            rewards,
            costs,
        }
    }

    /// Reference enumerator: full cartesian recursion, feasibility filtered
    /// at the leaves, no pruning.
    fn naive_count(instance: &Instance, delta: &Rat) -> usize {
        fn recurse(instance: &Instance, delta: &Rat, bus: usize, omega: &mut Assignment) -> usize {
            if bus == instance.buses.len() {
                for r in 0..instance.k {
                    let used: Rat = omega
                        .iter()
                        .map(|(&b, &l)| instance.cost(b, l, r))
                        .fold(Rat::zero(), |a, c| a + c);
                    if used > Rat::one() {
                        return 0;
                    }
                }
                return 1;
            }
            let mut count = recurse(instance, delta, bus + 1, omega);
            for &l in &instance.buses[bus].candidate_lines {
                if instance.max_cost(bus, l) > *delta {
                    omega.insert(bus, l);
                    count += recurse(instance, delta, bus + 1, omega);
                    omega.remove(&bus);
                }
            }
            count
        }
        recurse(instance, delta, 0, &mut Assignment::new())
    }

    #[test]
    fn enumeration_no_high_cost_lines() {
        let inst = two_bus_costed(Rat::zero(), Rat::zero());
        let out = enumerate_a_delta(&inst, &rat(1, 10), 100).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].omega.is_empty());
    }

    #[test]
    fn enumeration_budget_excludes_pair() {
        // Two 0.6-cost lines: empty, {b1}, {b2}; both together exceed 1.
        let inst = two_bus_costed(rat(3, 5), rat(3, 5));
        let out = enumerate_a_delta(&inst, &rat(1, 10), 100).unwrap();
        assert_eq!(out.len(), 3);
        for hca in &out {
            for used in &hca.consumption {
                assert!(*used <= Rat::one());
            }
        }
    }

    #[test]
    fn enumeration_matches_naive_reference() {
        for (c1, c2) in [
            (rat(3, 5), rat(3, 5)),
            (rat(1, 5), rat(4, 5)),
            (rat(1, 2), rat(1, 3)),
            (Rat::zero(), rat(9, 10)),
        ] {
            let inst = two_bus_costed(c1, c2);
            let delta = rat(1, 10);
            let out = enumerate_a_delta(&inst, &delta, 10_000).unwrap();
            assert_eq!(out.len(), naive_count(&inst, &delta));
        }
    }

    #[test]
    fn enumeration_cap_aborts() {
        let inst = two_bus_costed(rat(3, 5), rat(1, 5));
        let err = enumerate_a_delta(&inst, &rat(1, 10), 1);
        assert!(matches!(err, Err(CompositeError::EnumerationCap { .. })));
    }

    #[test]
    fn algorithm_c_all_low_cost_takes_low_branch() {
        let inst = two_bus_costed(Rat::zero(), Rat::zero());
        let eta = rat(1, 5);
        let prep = prepare_c(&inst, &eta, LpMode::Exact, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(prep.branch, Branch::LowCost);
        assert!(prep.omega_star.is_empty());
        let out = round_c(&inst, &prep, 11).unwrap();
        assert!(check_feasibility(&out, &inst, Some(&Rat::one())).is_feasible());
    }

    #[test]
    fn algorithm_c_all_high_cost_takes_fixed_branch() {
        // Every useful line is high-cost: the low-cost relaxation is worth 0
        // and the fixed branch must be taken.
        let inst = two_bus_costed(rat(3, 5), rat(3, 5));
        let eta = rat(1, 5);
        let prep = prepare_c(&inst, &eta, LpMode::Exact, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(prep.branch, Branch::Fixed);
        assert!(prep.gamma_delta.is_zero());
        // b1's line (reward 3/unit, 2 capacity) alone beats b2's.
        assert_eq!(prep.omega_star.get(&0), Some(&1));
        for seed in 0..20 {
            let out = round_c(&inst, &prep, seed).unwrap();
            let report = check_feasibility(&out, &inst, Some(&Rat::one()));
            assert!(report.is_feasible(), "seed {seed}: {:?}", report.violations);
        }
    }

    #[test]
    fn algorithm_c_rejects_out_of_range_eta() {
        let inst = two_bus_costed(Rat::zero(), Rat::zero());
        assert!(algorithm_c(&inst, &rat(1, 4), 0, LpMode::Exact, 100).is_err());
        assert!(algorithm_c(&inst, &rat(3, 10), 0, LpMode::Exact, 100).is_err());
    }

    #[test]
    fn c_tol_usage_within_relaxed_budget_every_seed() {
        let inst = two_bus_costed(rat(3, 5), rat(3, 5));
        let eta = rat(2, 5);
        let tau = rat(1, 5);
        let prep = prepare_c_tol(&inst, &eta, &tau, LpMode::Exact, DEFAULT_ENUM_CAP).unwrap();
        let budget = Rat::one() + tau.clone();
        for seed in 0..50 {
            let out = round_c_tol(&inst, &prep, seed).unwrap();
            for used in &out.usage {
                assert!(*used <= budget, "seed {seed}: usage {}", format_rat(used));
            }
            let report = check_feasibility(&out, &inst, Some(&budget));
            assert!(report.is_feasible(), "seed {seed}: {:?}", report.violations);
        }
    }

    #[test]
    fn c_tol_large_tau_reduces_to_low_cost() {
        // δ = τ·η³/(256K³) still tiny, but with zero costs every line is
        // low-cost and the enumeration collapses to the empty assignment.
        let inst = two_bus_costed(Rat::zero(), Rat::zero());
        let prep =
            prepare_c_tol(&inst, &rat(2, 5), &rat(2, 5), LpMode::Exact, DEFAULT_ENUM_CAP).unwrap();
        assert!(prep.omega_star.is_empty());
        let out = round_c_tol(&inst, &prep, 5).unwrap();
        assert!(!out.discarded);
    }

    #[test]
    fn composite_is_deterministic() {
        let inst = two_bus_costed(rat(3, 5), rat(1, 2));
        let eta = rat(1, 5);
        let a = algorithm_c(&inst, &eta, 77, LpMode::Exact, DEFAULT_ENUM_CAP).unwrap();
        let b = algorithm_c(&inst, &eta, 77, LpMode::Exact, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(a, b);
    }
}
