//! LP relaxation by column generation with a totally unimodular pricing step.
//!
//! The master LP has one variable per generated column (an integer demand
//! allocation for a (bus, line) pair), a convexity row per bus, a budget row
//! per resource, and a demand row per OD pair. Pricing maximizes the reduced
//! profit over the per-line allocation polytope; that polytope's constraint
//! matrix has consecutive ones along each line, so a basic LP optimum is
//! integral and the solver asserts it.
//!
//! Restricted variants cover the composite algorithms: fixing an assignment,
//! keeping only low-cost lines, or both plus a rescaled cost overlay.

use std::collections::{BTreeMap, HashSet};

use num_traits::Zero;
use serde_json::json;
use thiserror::Error;

use crate::instance::{build_subpath_index, Instance, SubpathIndex};
use crate::lpcore::{solve_lp, LpError, LpNum, LpProblem, LpStatus, RowKind};
use crate::rational::{f64_to_rat, format_rat, rat_to_f64, Rat};

/// Partial bus -> line assignment used by the FIXED and MODIFIED restrictions.
pub type Assignment = BTreeMap<usize, usize>;

/// How the master LP is restricted.
#[derive(Debug, Clone, PartialEq)]
pub enum Restriction {
    /// The unrestricted relaxation.
    Full,
    /// Buses in the assignment are fixed to their line; all others to the dummy.
    Fixed(Assignment),
    /// Only lines with every cost at most `delta` (the dummy always qualifies).
    LowCost(Rat),
    /// Assigned buses fixed to their line, other buses restricted to lines
    /// with every cost at most `delta`, and costs replaced by the rescaled
    /// overlay ĉ = c / (1 - Σ c·ω + τ) for low-cost lines, 0 for high-cost.
    Modified { delta: Rat, tau: Rat, omega: Assignment },
}

impl Restriction {
    pub fn descriptor(&self) -> String {
        match self {
            Restriction::Full => "FULL".to_string(),
            Restriction::Fixed(_) => "FIXED".to_string(),
            Restriction::LowCost(d) => format!("LOW_COST({})", format_rat(d)),
            Restriction::Modified { delta, tau, .. } => {
                format!("MODIFIED({}, {})", format_rat(delta), format_rat(tau))
            }
        }
    }
}

/// Arithmetic mode for LP solving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpMode {
    /// Floating point with the given tolerance.
    Float(f64),
    /// Exact rational arithmetic; all certificates are exact.
    Exact,
}

impl Default for LpMode {
    fn default() -> Self {
        LpMode::Float(crate::lpcore::DEFAULT_TOLERANCE)
    }
}

/// An integer extreme point of the allocation polytope for one (bus, line),
/// usable as a master-LP variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub bus: usize,
    pub line: usize,
    /// Served amount per OD pair.
    pub theta: Vec<u32>,
    /// Σ v·θ, exact.
    pub reward: Rat,
    /// Effective per-resource cost of the column in the master (equals the
    /// instance cost except under a MODIFIED overlay).
    pub costs: Vec<Rat>,
}

/// Final dual prices of the master LP.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPrices {
    /// Per-bus convexity duals, free sign.
    pub q: Vec<Rat>,
    /// Per-OD demand duals, nonnegative.
    pub w: Vec<Rat>,
    /// Per-resource budget duals, nonnegative.
    pub u: Vec<Rat>,
}

/// A column with its optimal master weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedColumn {
    pub column: Column,
    pub weight: Rat,
}

impl WeightedColumn {
    pub fn weight_f64(&self) -> f64 {
        rat_to_f64(&self.weight)
    }
}

/// Optimal solution of a (restricted) LP relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalPlan {
    pub restriction: Restriction,
    /// Columns with strictly positive weight; per bus the weights sum to 1.
    pub columns: Vec<WeightedColumn>,
    /// Optimal objective Γ = Σ weight · column reward, exact.
    pub gamma: Rat,
    pub duals: DualPrices,
}

impl FractionalPlan {
    pub fn gamma_f64(&self) -> f64 {
        rat_to_f64(&self.gamma)
    }

    /// Columns of one bus, in stored order.
    pub fn columns_of(&self, bus: usize) -> impl Iterator<Item = &WeightedColumn> {
        self.columns.iter().filter(move |wc| wc.column.bus == bus)
    }

    /// JSON form: restriction descriptor, Γ, columns, duals.
    pub fn to_json(&self, instance: &Instance) -> serde_json::Value {
        let columns: Vec<_> = self
            .columns
            .iter()
            .map(|wc| {
                let theta: serde_json::Map<String, serde_json::Value> = wc
                    .column
                    .theta
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| t > 0)
                    .map(|(od, &t)| {
                        let pair = &instance.od_pairs[od];
                        let key = format!(
                            "{}->{}",
                            instance.network.nodes[pair.origin],
                            instance.network.nodes[pair.destination]
                        );
                        (key, json!(t))
                    })
                    .collect();
                json!({
                    "bus": instance.buses[wc.column.bus].id,
                    "line": instance.lines[wc.column.line].id,
                    "theta": theta,
                    "weight": wc.weight_f64(),
                    "weight_exact": format_rat(&wc.weight),
                })
            })
            .collect();
        json!({
            "restriction": self.restriction.descriptor(),
            "gamma": self.gamma_f64(),
            "gamma_exact": format_rat(&self.gamma),
            "columns": columns,
            "duals": {
                "q": self.duals.q.iter().map(rat_to_f64).collect::<Vec<_>>(),
                "w": self.duals.w.iter().map(rat_to_f64).collect::<Vec<_>>(),
                "u": self.duals.u.iter().map(rat_to_f64).collect::<Vec<_>>(),
            },
        })
    }
}

#[derive(Debug, Error)]
pub enum RelaxError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("pricing LP returned a non-integral basic optimum for bus {bus} line {line}: component {value} deviates from an integer by more than {tol}")]
    IntegralityAssertion { bus: usize, line: usize, value: f64, tol: f64 },
    #[error("infeasible restriction: {0}")]
    InfeasibleRestriction(String),
    #[error("master LP unexpectedly {0:?}")]
    MasterStatus(LpStatus),
    #[error("column generation did not converge within {0} iterations")]
    NoConvergence(usize),
}

/// Bridges the generic LP scalar with exact rational bookkeeping.
pub trait Scalar: LpNum {
    fn from_rat(r: &Rat) -> Self;
    fn to_rat(&self) -> Rat;
    /// Pivot/certificate tolerance for the LP engine.
    fn lp_tol(tol_hint: f64) -> Self;
    /// Admission threshold for positive reduced costs in pricing.
    fn pricing_tol() -> Self;
    /// Maximum allowed deviation of a pricing optimum from integrality.
    fn integrality_tol() -> f64;
    fn as_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_rat(r: &Rat) -> f64 {
        rat_to_f64(r)
    }
    fn to_rat(&self) -> Rat {
        f64_to_rat(*self)
    }
    fn lp_tol(tol_hint: f64) -> f64 {
        tol_hint
    }
    fn pricing_tol() -> f64 {
        1e-7
    }
    fn integrality_tol() -> f64 {
        1e-7
    }
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rat {
    fn from_rat(r: &Rat) -> Rat {
        r.clone()
    }
    fn to_rat(&self) -> Rat {
        self.clone()
    }
    fn lp_tol(_tol_hint: f64) -> Rat {
        Rat::zero()
    }
    fn pricing_tol() -> Rat {
        Rat::zero()
    }
    fn integrality_tol() -> f64 {
        0.0
    }
    fn as_f64(&self) -> f64 {
        rat_to_f64(self)
    }
}

/// Rescaled cost overlay ĉ for the MODIFIED restriction.
///
/// `effective_cost` is zero for high-cost lines (some cost above `delta`)
/// and `c / (1 - Σ c·ω + τ)` for low-cost lines; the denominator stays at
/// least `τ > 0` because the assignment is resource-feasible.
#[derive(Debug, Clone)]
pub struct CostOverlay {
    delta: Rat,
    /// Per-resource denominator `1 - Σ c·ω + τ`.
    denoms: Vec<Rat>,
}

impl CostOverlay {
    pub fn effective_cost(&self, instance: &Instance, bus: usize, line: usize, resource: usize) -> Rat {
        if instance.max_cost(bus, line) > self.delta {
            Rat::zero()
        } else {
            instance.cost(bus, line, resource) / self.denoms[resource].clone()
        }
    }

    /// The largest effective cost across all (bus, candidate line, resource).
    pub fn max_effective_cost(&self, instance: &Instance) -> Rat {
        let mut best = Rat::zero();
        for (b, bus) in instance.buses.iter().enumerate() {
            for &l in &bus.candidate_lines {
                for r in 0..instance.k {
                    let c = self.effective_cost(instance, b, l, r);
                    if c > best {
                        best = c;
                    }
                }
            }
        }
        best
    }
}

/// Builds the ĉ overlay for a high-cost assignment `omega` (which must be
/// resource-feasible) and threshold `delta`, with tolerance `tau > 0`.
pub fn restrict_modified_costs(
    instance: &Instance,
    omega: &Assignment,
    delta: &Rat,
    tau: &Rat,
) -> CostOverlay {
    let mut denoms = Vec::with_capacity(instance.k);
    for r in 0..instance.k {
        let consumed: Rat = omega
            .iter()
            .map(|(&b, &l)| instance.cost(b, l, r))
            .fold(Rat::zero(), |acc, c| acc + c);
        denoms.push(Rat::from_integer(1.into()) - consumed + tau.clone());
    }
    CostOverlay { delta: delta.clone(), denoms }
}

/// Integer optimum of the pricing subproblem for (bus, line) under per-OD
/// dual prices `w`: maximize Σ (v - w)·θ over the line's allocation polytope.
///
/// Returns the allocation and its objective value (always >= 0 since θ = 0
/// is feasible). A basic optimum that is not integral within tolerance is a
/// solver bug and reported as a hard error.
pub fn solve_pricing(
    instance: &Instance,
    index: &SubpathIndex,
    bus: usize,
    line: usize,
    w: &[Rat],
    mode: LpMode,
) -> Result<(Vec<u32>, Rat), RelaxError> {
    match mode {
        LpMode::Float(tol) => {
            let wf: Vec<f64> = w.iter().map(rat_to_f64).collect();
            let (theta, _) = price_generic::<f64>(instance, index, bus, line, &wf, tol)?;
            let value = pricing_value(instance, bus, line, &theta, w);
            Ok((theta, value))
        }
        LpMode::Exact => {
            let (theta, _) = price_generic::<Rat>(instance, index, bus, line, w, 0.0)?;
            let value = pricing_value(instance, bus, line, &theta, w);
            Ok((theta, value))
        }
    }
}

/// Exact Σ (v - w)·θ for a concrete allocation.
fn pricing_value(instance: &Instance, bus: usize, line: usize, theta: &[u32], w: &[Rat]) -> Rat {
    let mut value = Rat::zero();
    for (od, &t) in theta.iter().enumerate() {
        if t > 0 {
            let profit = instance.reward(bus, line, od) - w[od].clone();
            value += profit * Rat::from_integer(t.into());
        }
    }
    value
}

fn price_generic<S: Scalar>(
    instance: &Instance,
    index: &SubpathIndex,
    bus: usize,
    line: usize,
    w: &[S],
    tol_hint: f64,
) -> Result<(Vec<u32>, S), RelaxError> {
    let od_count = instance.od_pairs.len();
    let mut theta = vec![0u32; od_count];
    if instance.lines[line].is_dummy() {
        return Ok((theta, S::zero()));
    }
    let servable = index.servable_ods(line, od_count);
    if servable.is_empty() {
        return Ok((theta, S::zero()));
    }

    let mut lp: LpProblem<S> = LpProblem::new(servable.len());
    for (var, &od) in servable.iter().enumerate() {
        let profit =
            S::from_rat(&instance.reward(bus, line, od)) - w[od].clone();
        lp.set_objective(var, profit);
        lp.set_upper_bound(var, S::from_rat(&Rat::from_integer(instance.od_pairs[od].demand.into())));
    }
    let capacity = S::from_rat(&Rat::from_integer(instance.buses[bus].capacity.into()));
    for pos in 0..instance.lines[line].arcs.len() {
        let coeffs: Vec<(usize, S)> = servable
            .iter()
            .enumerate()
            .filter(|(_, &od)| index.covers_arc(od, line, pos))
            .map(|(var, _)| (var, S::one()))
            .collect();
        if !coeffs.is_empty() {
            lp.add_row(RowKind::Le, capacity.clone(), coeffs);
        }
    }

    let sol = solve_lp(&lp, S::lp_tol(tol_hint))?;
    debug_assert_eq!(sol.status, LpStatus::Optimal, "pricing LP is bounded and feasible");

    let int_tol = S::integrality_tol();
    let mut value = S::zero();
    for (var, &od) in servable.iter().enumerate() {
        let x = sol.primal[var].as_f64();
        let rounded = x.round();
        if (x - rounded).abs() > int_tol {
            return Err(RelaxError::IntegralityAssertion { bus, line, value: x, tol: int_tol });
        }
        let t = rounded.max(0.0) as u32;
        theta[od] = t;
        if t > 0 {
            let profit = S::from_rat(&instance.reward(bus, line, od)) - w[od].clone();
            value = value + profit * S::from_rat(&Rat::from_integer(t.into()));
        }
    }
    // The zero allocation is always feasible, so a negative optimum means
    // the profitable set was empty and θ = 0 is returned instead.
    if value < S::zero() {
        return Ok((vec![0u32; od_count], S::zero()));
    }
    Ok((theta, value))
}

/// Lines a bus may use under a restriction, and the effective costs to
/// charge in the master.
struct Admissible {
    /// Per bus: admissible candidate line indices.
    lines: Vec<Vec<usize>>,
    overlay: Option<CostOverlay>,
}

impl Admissible {
    fn effective_cost(&self, instance: &Instance, bus: usize, line: usize, resource: usize) -> Rat {
        match &self.overlay {
            Some(ov) => ov.effective_cost(instance, bus, line, resource),
            None => instance.cost(bus, line, resource),
        }
    }
}

fn admissible_lines(
    instance: &Instance,
    restriction: &Restriction,
) -> Result<Admissible, RelaxError> {
    let check_candidate = |b: usize, l: usize| -> Result<(), RelaxError> {
        if l >= instance.lines.len() || !instance.buses[b].candidate_lines.contains(&l) {
            let line_id = instance
                .lines
                .get(l)
                .map(|line| line.id.as_str())
                .unwrap_or("<out of range>");
            return Err(RelaxError::InfeasibleRestriction(format!(
                "assignment fixes bus '{}' to line '{}' which is not among its candidates",
                instance.buses[b].id, line_id
            )));
        }
        Ok(())
    };
    let dummy_of = |b: usize| -> Result<usize, RelaxError> {
        instance.dummy_line_of(b).ok_or_else(|| {
            RelaxError::InfeasibleRestriction(format!(
                "bus '{}' has no dummy line",
                instance.buses[b].id
            ))
        })
    };
    let mut lines = Vec::with_capacity(instance.buses.len());
    let overlay = match restriction {
        Restriction::Full => {
            for bus in &instance.buses {
                lines.push(bus.candidate_lines.clone());
            }
            None
        }
        Restriction::Fixed(omega) => {
            for b in 0..instance.buses.len() {
                match omega.get(&b) {
                    Some(&l) => {
                        check_candidate(b, l)?;
                        lines.push(vec![l]);
                    }
                    None => lines.push(vec![dummy_of(b)?]),
                }
            }
            None
        }
        Restriction::LowCost(delta) => {
            for (b, bus) in instance.buses.iter().enumerate() {
                lines.push(
                    bus.candidate_lines
                        .iter()
                        .copied()
                        .filter(|&l| instance.max_cost(b, l) <= *delta)
                        .collect(),
                );
            }
            None
        }
        Restriction::Modified { delta, tau, omega } => {
            for (b, bus) in instance.buses.iter().enumerate() {
                match omega.get(&b) {
                    Some(&l) => {
                        check_candidate(b, l)?;
                        lines.push(vec![l]);
                    }
                    None => lines.push(
                        bus.candidate_lines
                            .iter()
                            .copied()
                            .filter(|&l| instance.max_cost(b, l) <= *delta)
                            .collect(),
                    ),
                }
            }
            Some(restrict_modified_costs(instance, omega, delta, tau))
        }
    };
    for (b, ls) in lines.iter().enumerate() {
        if ls.is_empty() {
            return Err(RelaxError::InfeasibleRestriction(format!(
                "bus '{}' has no admissible line under the restriction",
                instance.buses[b].id
            )));
        }
    }
    Ok(Admissible { lines, overlay })
}

/// Solves the (restricted) LP relaxation by column generation.
///
/// The restricted master starts from one zero-allocation column per bus on
/// its fixed or dummy line; each iteration adds every column whose reduced
/// cost exceeds the pricing tolerance (multi-pricing) under a duplicate
/// guard, and terminates when no admissible (bus, line) prices out.
pub fn solve_relaxation(
    instance: &Instance,
    restriction: Restriction,
    mode: LpMode,
) -> Result<FractionalPlan, RelaxError> {
    let index = build_subpath_index(instance);
    solve_relaxation_with_index(instance, &index, restriction, mode)
}

/// As [`solve_relaxation`], reusing a prebuilt subpath index.
pub fn solve_relaxation_with_index(
    instance: &Instance,
    index: &SubpathIndex,
    restriction: Restriction,
    mode: LpMode,
) -> Result<FractionalPlan, RelaxError> {
    match mode {
        LpMode::Float(tol) => generate_columns::<f64>(instance, index, restriction, tol),
        LpMode::Exact => generate_columns::<Rat>(instance, index, restriction, 0.0),
    }
}

const MAX_CG_ITERATIONS: usize = 10_000;

fn generate_columns<S: Scalar>(
    instance: &Instance,
    index: &SubpathIndex,
    restriction: Restriction,
    tol_hint: f64,
) -> Result<FractionalPlan, RelaxError> {
    let admissible = admissible_lines(instance, &restriction)?;
    let n_buses = instance.buses.len();
    let n_ods = instance.od_pairs.len();
    let k = instance.k;

    // Initial columns: the zero allocation on each bus's single admissible
    // line when fixed, otherwise on its dummy line.
    let mut columns: Vec<Column> = Vec::new();
    let mut seen: HashSet<(usize, usize, Vec<u32>)> = HashSet::new();
    for b in 0..n_buses {
        let l = if admissible.lines[b].len() == 1 {
            admissible.lines[b][0]
        } else {
            *admissible.lines[b]
                .iter()
                .find(|&&l| instance.lines[l].is_dummy())
                .expect("non-fixed buses keep their dummy line admissible")
        };
        let theta = vec![0u32; n_ods];
        seen.insert((b, l, theta.clone()));
        columns.push(make_column(instance, &admissible, b, l, theta));
    }

    let lp_tol = S::lp_tol(tol_hint);
    let pricing_tol = S::pricing_tol();
    let mut last = None;
    for _ in 0..MAX_CG_ITERATIONS {
        let sol = solve_master::<S>(instance, &columns, &lp_tol)?;

        // Duals in row order: buses, resources, ODs.
        let q = &sol.duals[0..n_buses];
        let u = &sol.duals[n_buses..n_buses + k];
        let w = &sol.duals[n_buses + k..n_buses + k + n_ods];

        let mut added = false;
        for (b, qb) in q.iter().enumerate() {
            for &l in &admissible.lines[b] {
                let (theta, value) = price_generic::<S>(instance, index, b, l, w, tol_hint)?;
                let mut rc = value - qb.clone();
                for (r, uk) in u.iter().enumerate() {
                    if !uk.is_zero() {
                        let c = S::from_rat(&admissible.effective_cost(instance, b, l, r));
                        rc = rc - c * uk.clone();
                    }
                }
                if rc > pricing_tol && seen.insert((b, l, theta.clone())) {
                    columns.push(make_column(instance, &admissible, b, l, theta));
                    added = true;
                }
            }
        }
        if !added {
            last = Some(sol);
            break;
        }
    }
    let sol = last.ok_or(RelaxError::NoConvergence(MAX_CG_ITERATIONS))?;

    let weight_floor = S::lp_tol(1e-12);
    let mut weighted = Vec::new();
    let mut gamma = Rat::zero();
    for (j, column) in columns.iter().enumerate() {
        if sol.primal[j] > weight_floor {
            let weight = sol.primal[j].to_rat();
            gamma += weight.clone() * column.reward.clone();
            weighted.push(WeightedColumn { column: column.clone(), weight });
        }
    }
    let duals = DualPrices {
        q: sol.duals[0..n_buses].iter().map(Scalar::to_rat).collect(),
        w: sol.duals[n_buses + k..n_buses + k + n_ods]
            .iter()
            .map(Scalar::to_rat)
            .collect(),
        u: sol.duals[n_buses..n_buses + k].iter().map(Scalar::to_rat).collect(),
    };

    Ok(FractionalPlan { restriction, columns: weighted, gamma, duals })
}

fn make_column(
    instance: &Instance,
    admissible: &Admissible,
    bus: usize,
    line: usize,
    theta: Vec<u32>,
) -> Column {
    let mut reward = Rat::zero();
    for (od, &t) in theta.iter().enumerate() {
        if t > 0 {
            reward += instance.reward(bus, line, od) * Rat::from_integer(t.into());
        }
    }
    let costs = (0..instance.k)
        .map(|r| admissible.effective_cost(instance, bus, line, r))
        .collect();
    Column { bus, line, theta, reward, costs }
}

fn solve_master<S: Scalar>(
    instance: &Instance,
    columns: &[Column],
    lp_tol: &S,
) -> Result<crate::lpcore::LpSolution<S>, RelaxError> {
    let n_buses = instance.buses.len();
    let n_ods = instance.od_pairs.len();
    let k = instance.k;
    let mut lp: LpProblem<S> = LpProblem::new(columns.len());
    for (j, col) in columns.iter().enumerate() {
        lp.set_objective(j, S::from_rat(&col.reward));
    }
    // Row order matters for dual extraction: buses, then resources, then ODs.
    for b in 0..n_buses {
        let coeffs: Vec<(usize, S)> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.bus == b)
            .map(|(j, _)| (j, S::one()))
            .collect();
        lp.add_row(RowKind::Eq, S::one(), coeffs);
    }
    for r in 0..k {
        let coeffs: Vec<(usize, S)> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.costs[r].is_zero())
            .map(|(j, c)| (j, S::from_rat(&c.costs[r])))
            .collect();
        lp.add_row(RowKind::Le, S::one(), coeffs);
    }
    for od in 0..n_ods {
        let coeffs: Vec<(usize, S)> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.theta[od] > 0)
            .map(|(j, c)| (j, S::from_rat(&Rat::from_integer(c.theta[od].into()))))
            .collect();
        let demand = S::from_rat(&Rat::from_integer(instance.od_pairs[od].demand.into()));
        lp.add_row(RowKind::Le, demand, coeffs);
    }
    let sol = solve_lp(&lp, lp_tol.clone())?;
    if sol.status != LpStatus::Optimal {
        return Err(RelaxError::MasterStatus(sol.status));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Arc, Bus, Instance, Line, Network, OdPair};
    use crate::rational::{rat, rat_int};
    use std::collections::BTreeMap;

    fn chain_network(n: usize) -> Network {
        // Nodes n0..n(n), arcs ai: ni -> n(i+1).
        let nodes = (0..=n).map(|i| format!("n{i}")).collect();
        let arcs = (0..n)
            .map(|i| Arc { id: format!("a{i}"), tail: format!("n{i}"), head: format!("n{}", i + 1) })
            .collect();
        Network { nodes, arcs }
    }

    /// One bus, one 3-arc line, configurable ODs/rewards/capacity.
    fn line_instance(
        capacity: u32,
        ods: Vec<(usize, usize, u32)>,
        rewards: Vec<Rat>,
    ) -> Instance {
        let network = chain_network(3);
        let lines = vec![
            Line { id: "dummy".into(), arcs: vec![] },
            Line { id: "l1".into(), arcs: vec![0, 1, 2] },
        ];
        let buses = vec![Bus { id: "b1".into(), capacity, candidate_lines: vec![0, 1] }];
        let od_pairs: Vec<OdPair> = ods
            .iter()
            .map(|&(o, d, dem)| OdPair { origin: o, destination: d, demand: dem })
            .collect();
        let mut reward_map = BTreeMap::new();
        for (od, r) in rewards.into_iter().enumerate() {
            if !r.is_zero() {
                reward_map.insert((0, 1, od), r);
            }
        }
        Instance {
            network,
            lines,
            buses,
            od_pairs,
            k: 1,
            rewards: reward_map,
            costs: BTreeMap::new(),
        }
    }

    #[test]
    fn pricing_zero_when_profits_nonpositive() {
        let inst = line_instance(3, vec![(0, 3, 2)], vec![rat_int(1)]);
        let index = build_subpath_index(&inst);
        // w = 2 > v = 1: zero allocation optimal.
        let (theta, value) =
            solve_pricing(&inst, &index, 0, 1, &[rat_int(2)], LpMode::default()).unwrap();
        assert_eq!(theta, vec![0]);
        assert!(value.is_zero());
    }

    #[test]
    fn pricing_saturates_capacity() {
        // Reduced profit 2, demand 5, capacity 3 -> theta 3, value 6.
        let inst = line_instance(3, vec![(0, 3, 5)], vec![rat_int(2)]);
        let index = build_subpath_index(&inst);
        let (theta, value) =
            solve_pricing(&inst, &index, 0, 1, &[rat_int(0)], LpMode::default()).unwrap();
        assert_eq!(theta, vec![3]);
        assert_eq!(value, rat_int(6));
    }

    /// Brute force over all integer points of the allocation polytope.
    fn brute_force_pricing(
        inst: &Instance,
        index: &SubpathIndex,
        bus: usize,
        line: usize,
        w: &[Rat],
    ) -> (Vec<u32>, Rat) {
        let n = inst.od_pairs.len();
        let mut best = (vec![0u32; n], Rat::zero());
        let mut current = vec![0u32; n];
        fn feasible(inst: &Instance, index: &SubpathIndex, bus: usize, line: usize, theta: &[u32]) -> bool {
            for pos in 0..inst.lines[line].arcs.len() {
                let load: u32 = theta
                    .iter()
                    .enumerate()
                    .filter(|(od, _)| index.covers_arc(*od, line, pos))
                    .map(|(_, &t)| t)
                    .sum();
                if load > inst.buses[bus].capacity {
                    return false;
                }
            }
            true
        }
        #[allow(clippy::too_many_arguments)]
        fn recurse(
            inst: &Instance,
            index: &SubpathIndex,
            bus: usize,
            line: usize,
            w: &[Rat],
            od: usize,
            current: &mut Vec<u32>,
            best: &mut (Vec<u32>, Rat),
        ) {
            if od == inst.od_pairs.len() {
                if feasible(inst, index, bus, line, current) {
                    let mut value = Rat::zero();
                    for (i, &t) in current.iter().enumerate() {
                        if t > 0 {
                            value += (inst.reward(bus, line, i) - w[i].clone())
                                    * Rat::from_integer(t.into());
                        }
                    }
                    if value > best.1 {
                        *best = (current.clone(), value);
                    }
                }
                return;
            }
            let max = if index.serves(od, line) { inst.od_pairs[od].demand } else { 0 };
            for t in 0..=max {
                current[od] = t;
                recurse(inst, index, bus, line, w, od + 1, current, best);
            }
            current[od] = 0;
        }
        recurse(inst, index, bus, line, w, 0, &mut current, &mut best);
        best
    }

    #[test]
    fn pricing_matches_enumeration_on_overlapping_ods() {
        // 3-arc line, ODs over arcs 0-1 and 1-2, capacity 2, demands 2 and 2,
        // reduced profits 3 and 1: enumeration decides the winner.
        let inst = line_instance(2, vec![(0, 2, 2), (1, 3, 2)], vec![rat_int(3), rat_int(1)]);
        let index = build_subpath_index(&inst);
        let w = vec![rat_int(0), rat_int(0)];
        let (theta, value) = solve_pricing(&inst, &index, 0, 1, &w, LpMode::default()).unwrap();
        let (_, best_value) = brute_force_pricing(&inst, &index, 0, 1, &w);
        assert_eq!(value, best_value);
        // Both ODs cross arc 1, so allocations must share capacity 2 there.
        assert!(theta[0] + theta[1] <= 2 + 2);
        let arc1_load = theta[0] + theta[1];
        assert!(arc1_load <= 2, "middle arc load {arc1_load} exceeds capacity");
    }

    #[test]
    fn relaxation_zero_rewards() {
        let inst = line_instance(3, vec![(0, 3, 2)], vec![rat_int(0)]);
        let plan = solve_relaxation(&inst, Restriction::Full, LpMode::default()).unwrap();
        assert!(plan.gamma.is_zero());
    }

    #[test]
    fn relaxation_saturates_demand() {
        // 1 bus, 1 free line, demand 2 <= capacity, reward 1/unit -> Γ = 2.
        let inst = line_instance(3, vec![(0, 3, 2)], vec![rat_int(1)]);
        let plan = solve_relaxation(&inst, Restriction::Full, LpMode::default()).unwrap();
        assert_eq!(plan.gamma, rat_int(2));
        let plan_exact = solve_relaxation(&inst, Restriction::Full, LpMode::Exact).unwrap();
        assert_eq!(plan_exact.gamma, rat_int(2));
    }

    #[test]
    fn per_bus_weights_sum_to_one() {
        let inst = line_instance(2, vec![(0, 2, 2), (1, 3, 2)], vec![rat_int(3), rat_int(1)]);
        let plan = solve_relaxation(&inst, Restriction::Full, LpMode::Exact).unwrap();
        let total: Rat = plan.columns_of(0).map(|wc| wc.weight.clone()).sum();
        assert_eq!(total, rat_int(1));
    }

    #[test]
    fn modified_cost_overlay_examples() {
        // Empty omega, tau = 1/2, c = 1/10 -> ĉ = (1/10)/(3/2) = 1/15.
        let mut inst = line_instance(3, vec![(0, 3, 2)], vec![rat_int(1)]);
        inst.costs.insert((0, 1, 0), rat(1, 10));
        let overlay =
            restrict_modified_costs(&inst, &Assignment::new(), &rat(1, 2), &rat(1, 2));
        assert_eq!(overlay.effective_cost(&inst, 0, 1, 0), rat(1, 15));
    }

    #[test]
    fn modified_cost_overlay_with_consumption() {
        // Omega consumes 9/10 of the resource, tau = 1/5, low-cost c = 3/100:
        // ĉ = (3/100)/(3/10) = 1/10.
        let network = chain_network(3);
        let lines = vec![
            Line { id: "dummy".into(), arcs: vec![] },
            Line { id: "low".into(), arcs: vec![0] },
            Line { id: "high".into(), arcs: vec![1] },
        ];
        let buses = vec![
            Bus { id: "b1".into(), capacity: 1, candidate_lines: vec![0, 1] },
            Bus { id: "b2".into(), capacity: 1, candidate_lines: vec![0, 2] },
        ];
        let mut costs = BTreeMap::new();
        costs.insert((0, 1, 0), rat(3, 100));
        costs.insert((1, 2, 0), rat(9, 10));
        let inst = Instance {
            network,
            lines,
            buses,
            od_pairs: vec![],
            k: 1,
            rewards: BTreeMap::new(),
            costs,
        };
        let omega: Assignment = [(1usize, 2usize)].into_iter().collect();
        let delta = rat(1, 10); // high line cost 9/10 > delta, low line 3/100 <= delta
        let overlay = restrict_modified_costs(&inst, &omega, &delta, &rat(1, 5));
        assert_eq!(overlay.effective_cost(&inst, 0, 1, 0), rat(1, 10));
        // High-cost lines get effective cost zero.
        assert!(overlay.effective_cost(&inst, 1, 2, 0).is_zero());
    }

    #[test]
    fn fixed_restriction_rejects_foreign_line() {
        let inst = line_instance(3, vec![(0, 3, 2)], vec![rat_int(1)]);
        let omega: Assignment = [(0usize, 5usize)].into_iter().collect();
        let err = solve_relaxation(&inst, Restriction::Fixed(omega), LpMode::default());
        assert!(matches!(err, Err(RelaxError::InfeasibleRestriction(_))));
    }

    #[test]
    fn restrictions_only_lower_gamma() {
        let mut inst = line_instance(3, vec![(0, 3, 2)], vec![rat_int(1)]);
        inst.costs.insert((0, 1, 0), rat(1, 2));
        let full = solve_relaxation(&inst, Restriction::Full, LpMode::Exact).unwrap();
        // Low-cost threshold below the line's cost: only the dummy remains.
        let low = solve_relaxation(&inst, Restriction::LowCost(rat(1, 4)), LpMode::Exact).unwrap();
        assert!(low.gamma <= full.gamma);
        assert!(low.gamma.is_zero());
        let fixed = solve_relaxation(
            &inst,
            Restriction::Fixed([(0usize, 1usize)].into_iter().collect()),
            LpMode::Exact,
        )
        .unwrap();
        assert!(fixed.gamma <= full.gamma);
        assert_eq!(fixed.gamma, rat_int(2));
    }
}
