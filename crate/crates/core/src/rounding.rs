//! Seeded randomized rounding of fractional plans into integral line plans.
//!
//! Two algorithms are provided. The no-cost rounding (NC) samples one column
//! per bus with probability equal to its LP weight, then allocates demand
//! greedily per OD pair in descending per-unit-reward order, truncating the
//! last bus so no OD is over-served. The low-cost rounding (LC) thins the
//! sampling probabilities by a factor (1 - ε), sends the residual mass to the
//! dummy line, and discards the whole plan (returning a flagged empty plan)
//! if any resource budget is exceeded; this requires every weighted column
//! to have small effective costs.
//!
//! Rounding is a pure function of (plan, params, seed); trials with distinct
//! seeds can run concurrently. Per-bus random draws are consumed in bus-id
//! order from a counter-based generator so results do not depend on how
//! trials are scheduled.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::instance::{build_subpath_index, Instance};
use crate::rational::{format_rat, rat, rat_int, rat_to_f64, Rat};
use crate::relaxation::FractionalPlan;

/// An integral line plan: one line per bus plus an integer demand allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralPlan {
    /// Chosen line per bus (dummy allowed), indexed by bus.
    pub assignment: Vec<usize>,
    /// Served amount per (bus, od); zero entries are omitted.
    pub xi: BTreeMap<(usize, usize), u32>,
    /// Realized reward Σ v·ξ, exact.
    pub reward: Rat,
    /// Realized per-resource usage under the instance's true costs.
    pub usage: Vec<Rat>,
    /// True when the low-cost rounding discarded an over-budget sample.
    pub discarded: bool,
    pub seed: u64,
}

impl IntegralPlan {
    /// The all-dummy plan: zero reward, zero usage.
    pub fn empty(instance: &Instance, seed: u64, discarded: bool) -> Self {
        let assignment = (0..instance.buses.len())
            .map(|b| instance.dummy_line_of(b).expect("every bus has a dummy line"))
            .collect();
        IntegralPlan {
            assignment,
            xi: BTreeMap::new(),
            reward: Rat::zero(),
            usage: vec![Rat::zero(); instance.k],
            discarded,
            seed,
        }
    }

    pub fn reward_f64(&self) -> f64 {
        rat_to_f64(&self.reward)
    }

    pub fn to_json(&self, instance: &Instance) -> serde_json::Value {
        let assignment: serde_json::Map<String, serde_json::Value> = self
            .assignment
            .iter()
            .enumerate()
            .map(|(b, &l)| {
                (instance.buses[b].id.clone(), json!(instance.lines[l].id))
            })
            .collect();
        let xi: Vec<_> = self
            .xi
            .iter()
            .map(|(&(b, od), &amount)| {
                let pair = &instance.od_pairs[od];
                json!({
                    "bus": instance.buses[b].id,
                    "origin": instance.network.nodes[pair.origin],
                    "destination": instance.network.nodes[pair.destination],
                    "amount": amount,
                })
            })
            .collect();
        json!({
            "assignment": assignment,
            "xi": xi,
            "reward": self.reward_f64(),
            "reward_exact": format_rat(&self.reward),
            "usage": self.usage.iter().map(rat_to_f64).collect::<Vec<_>>(),
            "discarded": self.discarded,
            "seed": self.seed,
        })
    }
}

/// Parameters of the low-cost rounding, derived from η and K.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingParams {
    pub eta: Rat,
    pub k: usize,
    /// q = 4/η.
    pub q: Rat,
    /// ε = 1/(qK).
    pub epsilon: Rat,
    /// δ = η³/(256 K³), the admissible per-line cost ceiling.
    pub delta: Rat,
}

impl RoundingParams {
    /// Derives (q, ε, δ) from η ∈ (0, 1/2) and the resource count.
    pub fn new(eta: Rat, k: usize) -> Result<Self, RoundingError> {
        if eta <= Rat::zero() || eta >= rat(1, 2) {
            return Err(RoundingError::BadEta(format_rat(&eta)));
        }
        if k == 0 {
            return Err(RoundingError::BadEta("resource count must be positive".into()));
        }
        let q = rat_int(4) / eta.clone();
        let kk = rat_int(k as i64);
        let epsilon = Rat::one() / (q.clone() * kk.clone());
        let delta = eta.clone().pow(3) / (rat_int(256) * kk.pow(3));
        debug_assert!(epsilon < eta.clone() / rat_int(2));
        debug_assert_eq!(delta, Rat::one() / (rat_int(4) * q.clone().pow(3) * rat_int((k * k * k) as i64)));
        Ok(RoundingParams { eta, k, q, epsilon, delta })
    }
}

#[derive(Debug, Error)]
pub enum RoundingError {
    #[error("eta must lie strictly between 0 and 1/2, got {0}")]
    BadEta(String),
    #[error("low-cost rounding precondition violated: column for bus '{bus}' line '{line}' has effective cost {cost}, above the ceiling {ceiling}")]
    CostCeiling { bus: String, line: String, cost: String, ceiling: String },
}

/// No-cost rounding: sample one column per bus by LP weight, then allocate
/// each OD greedily by per-unit reward (descending, ties by bus id) with the
/// last allocation truncated to the remaining demand.
pub fn round_nc(instance: &Instance, plan: &FractionalPlan, seed: u64) -> IntegralPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled = sample_columns(instance, plan, 1.0, &mut rng);
    assemble(instance, plan, &sampled, seed, false)
}

/// Low-cost rounding: sample with probability (1 - ε)·weight, dummy on the
/// residual; allocate as in the no-cost rounding; discard (flagged empty
/// plan) if any effective resource usage exceeds 1.
pub fn round_lc(
    instance: &Instance,
    plan: &FractionalPlan,
    params: &RoundingParams,
    seed: u64,
) -> Result<IntegralPlan, RoundingError> {
    // Precondition: every weighted non-dummy column is low-cost under its
    // effective costs, before consuming any randomness.
    for wc in &plan.columns {
        if instance.lines[wc.column.line].is_dummy() {
            continue;
        }
        for c in &wc.column.costs {
            if *c > params.delta {
                return Err(RoundingError::CostCeiling {
                    bus: instance.buses[wc.column.bus].id.clone(),
                    line: instance.lines[wc.column.line].id.clone(),
                    cost: format_rat(c),
                    ceiling: format_rat(&params.delta),
                });
            }
        }
    }

    let thinning = rat_to_f64(&(Rat::one() - params.epsilon.clone()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled = sample_columns(instance, plan, thinning, &mut rng);

    // Budget check on the effective costs of the sampled columns.
    let mut effective = vec![Rat::zero(); instance.k];
    for choice in sampled.iter().flatten() {
        for (r, c) in plan.columns[*choice].column.costs.iter().enumerate() {
            effective[r] = effective[r].clone() + c.clone();
        }
    }
    if effective.iter().any(|e| *e > Rat::one()) {
        return Ok(IntegralPlan::empty(instance, seed, true));
    }
    Ok(assemble(instance, plan, &sampled, seed, false))
}

/// Per bus (in bus-id order) draws one uniform value and selects a column by
/// cumulative probability `thinning · weight`; `None` means the residual
/// dummy outcome.
fn sample_columns(
    instance: &Instance,
    plan: &FractionalPlan,
    thinning: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Option<usize>> {
    let mut sampled: Vec<Option<usize>> = vec![None; instance.buses.len()];
    for (b, slot) in sampled.iter_mut().enumerate() {
        let u: f64 = rng.gen::<f64>();
        let mut cumulative = 0.0;
        for (j, wc) in plan.columns.iter().enumerate() {
            if wc.column.bus != b {
                continue;
            }
            cumulative += thinning * wc.weight_f64();
            if u < cumulative {
                *slot = Some(j);
                break;
            }
        }
        // With thinning 1.0 the per-bus weights sum to 1; a miss can only be
        // floating-point shortfall, so the last column absorbs it.
        if slot.is_none() && thinning >= 1.0 {
            *slot = plan
                .columns
                .iter()
                .enumerate()
                .filter(|(_, wc)| wc.column.bus == b)
                .map(|(j, _)| j)
                .next_back();
        }
    }
    sampled
}

/// Builds the integral plan from sampled columns: greedy per-OD allocation
/// with truncation, then exact reward and true-usage accounting.
fn assemble(
    instance: &Instance,
    plan: &FractionalPlan,
    sampled: &[Option<usize>],
    seed: u64,
    discarded: bool,
) -> IntegralPlan {
    let n_buses = instance.buses.len();
    let mut assignment = Vec::with_capacity(n_buses);
    for (b, choice) in sampled.iter().enumerate() {
        match choice {
            Some(j) => assignment.push(plan.columns[*j].column.line),
            None => assignment.push(instance.dummy_line_of(b).expect("every bus has a dummy line")),
        }
    }

    // Greedy allocation per OD: buses ordered by per-unit reward descending,
    // ties by bus id ascending; the last bus is truncated to the remaining
    // demand.
    let mut xi = BTreeMap::new();
    for od in 0..instance.od_pairs.len() {
        let mut claims: Vec<(usize, u32, Rat)> = sampled
            .iter()
            .enumerate()
            .filter_map(|(b, choice)| {
                choice.as_ref().and_then(|&j| {
                    let col = &plan.columns[j].column;
                    let t = col.theta[od];
                    if t > 0 {
                        Some((b, t, instance.reward(b, col.line, od)))
                    } else {
                        None
                    }
                })
            })
            .collect();
        claims.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
        let mut remaining = instance.od_pairs[od].demand;
        for (b, t, _) in claims {
            if remaining == 0 {
                break;
            }
            let granted = t.min(remaining);
            remaining -= granted;
            xi.insert((b, od), granted);
        }
    }

    let mut reward = Rat::zero();
    for (&(b, od), &amount) in &xi {
        reward += instance.reward(b, assignment[b], od) * Rat::from_integer(amount.into());
    }
    let mut usage = vec![Rat::zero(); instance.k];
    for (b, &l) in assignment.iter().enumerate() {
        for (r, slot) in usage.iter_mut().enumerate() {
            *slot = slot.clone() + instance.cost(b, l, r);
        }
    }
    IntegralPlan { assignment, xi, reward, usage, discarded, seed }
}

/// Result of the independent feasibility audit.
#[derive(Debug, Clone, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<String>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-derives every plan invariant from raw instance data: one candidate
/// line per bus, no over-served OD, per-arc capacity, service only along the
/// chosen line, and consistent reward/usage accounting. `budget` is the
/// per-resource cap on true usage; `None` means unlimited.
pub fn check_feasibility(
    plan: &IntegralPlan,
    instance: &Instance,
    budget: Option<&Rat>,
) -> FeasibilityReport {
    let mut violations = Vec::new();
    let index = build_subpath_index(instance);

    if plan.assignment.len() != instance.buses.len() {
        violations.push(format!(
            "assignment covers {} buses, instance has {}",
            plan.assignment.len(),
            instance.buses.len()
        ));
        return FeasibilityReport { violations };
    }
    for (b, &l) in plan.assignment.iter().enumerate() {
        if !instance.buses[b].candidate_lines.contains(&l) {
            violations.push(format!(
                "bus '{}' assigned to non-candidate line index {}",
                instance.buses[b].id, l
            ));
        }
    }

    // Service only along the chosen line, and never above demand per OD.
    let mut od_totals = vec![0u64; instance.od_pairs.len()];
    for (&(b, od), &amount) in &plan.xi {
        if b >= instance.buses.len() || od >= instance.od_pairs.len() {
            violations.push(format!("xi entry ({b}, {od}) is out of range"));
            continue;
        }
        let l = plan.assignment[b];
        if amount > 0 && !index.serves(od, l) {
            let pair = &instance.od_pairs[od];
            violations.push(format!(
                "bus '{}' serves OD {}->{} not covered by its line '{}'",
                instance.buses[b].id,
                instance.network.nodes[pair.origin],
                instance.network.nodes[pair.destination],
                instance.lines[l].id
            ));
        }
        od_totals[od] += amount as u64;
    }
    for (od, &total) in od_totals.iter().enumerate() {
        let pair = &instance.od_pairs[od];
        if total > pair.demand as u64 {
            violations.push(format!(
                "OD {}->{} served {} units, demand is {}",
                instance.network.nodes[pair.origin],
                instance.network.nodes[pair.destination],
                total,
                pair.demand
            ));
        }
    }

    // Per-arc load along each bus's chosen line.
    for (b, &l) in plan.assignment.iter().enumerate() {
        for pos in 0..instance.lines[l].arcs.len() {
            let load: u64 = plan
                .xi
                .iter()
                .filter(|(&(pb, od), _)| pb == b && index.covers_arc(od, l, pos))
                .map(|(_, &a)| a as u64)
                .sum();
            if load > instance.buses[b].capacity as u64 {
                violations.push(format!(
                    "bus '{}' carries {} units on arc position {} of line '{}', capacity {}",
                    instance.buses[b].id, load, pos, instance.lines[l].id, instance.buses[b].capacity
                ));
            }
        }
    }

    // Reward and usage accounting.
    let mut reward = Rat::zero();
    for (&(b, od), &amount) in &plan.xi {
        reward += instance.reward(b, plan.assignment[b], od) * Rat::from_integer(amount.into());
    }
    if reward != plan.reward {
        violations.push(format!(
            "stated reward {} differs from recomputed {}",
            format_rat(&plan.reward),
            format_rat(&reward)
        ));
    }
    let mut usage = vec![Rat::zero(); instance.k];
    for (b, &l) in plan.assignment.iter().enumerate() {
        for (r, slot) in usage.iter_mut().enumerate() {
            *slot = slot.clone() + instance.cost(b, l, r);
        }
    }
    if usage != plan.usage {
        violations.push("stated resource usage differs from recomputed usage".to_string());
    }
    if let Some(cap) = budget {
        for (r, used) in usage.iter().enumerate() {
            if used > cap {
                violations.push(format!(
                    "resource {} usage {} exceeds budget {}",
                    r + 1,
                    format_rat(used),
                    format_rat(cap)
                ));
            }
        }
    }
    FeasibilityReport { violations }
}
