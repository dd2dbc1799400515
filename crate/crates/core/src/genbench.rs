//! Instance generators and the Monte Carlo evaluation harness.
//!
//! Three generators: the max k-cover hardness reduction (each subset family
//! becomes a line network where a line can serve exactly its subset's OD
//! pairs), seeded random path networks with a distance-based reward rule,
//! and the trial harness that rounds a plan T times with consecutive seeds
//! and reports mean / standard error / best-of-T against the relevant
//! theoretical bound line.
//!
//! Reward rule for random instances: per unit served, max{0, (1.5·D_s -
//! D_l) / sqrt(C_b)} where D_s is the shortest directed path length from
//! origin to destination (unit arc lengths), D_l the subpath length along
//! the line, and C_b the bus capacity. Since rewards are exact rationals,
//! sqrt(C_b) is replaced by a rational approximation rounded to 6 decimal
//! places; the choice of unit arc lengths is a declared convention for
//! synthetic networks.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::composite::{prepare_c, prepare_c_tol, round_c, round_c_tol, CompositeError, CompositePrep};
use crate::instance::{build_subpath_index, Arc, Bus, Instance, Line, Network, OdPair};
use crate::rational::{rat, rat_int, rat_to_f64, Rat};
use crate::relaxation::{solve_relaxation, FractionalPlan, LpMode, RelaxError, Restriction};
use crate::rounding::{
    check_feasibility, round_lc, round_nc, RoundingError, RoundingParams,
};

/// A max k-cover problem: pick k subsets from the family maximizing the
/// union size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KCoverSpec {
    /// Ground set size n; elements are 1..=n.
    pub n: usize,
    /// Subset family; each subset holds element indices in 1..=n.
    pub family: Vec<Vec<usize>>,
    /// Number of subsets to select.
    pub k: usize,
}

impl KCoverSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 || self.family.is_empty() || self.k == 0 || self.k > self.family.len() {
            return Err(GenError::BadSpec("need n >= 1, nonempty family, 1 <= k <= family size".into()));
        }
        for (j, subset) in self.family.iter().enumerate() {
            if subset.is_empty() {
                return Err(GenError::BadSpec(format!("subset {} is empty", j + 1)));
            }
            if subset.iter().any(|&e| e == 0 || e > self.n) {
                return Err(GenError::BadSpec(format!("subset {} has an element outside 1..={}", j + 1, self.n)));
            }
        }
        Ok(())
    }

    /// Brute-force max k-cover optimum: best union size over all k-subsets.
    pub fn brute_force_optimum(&self) -> usize {
        let masks: Vec<u64> = self
            .family
            .iter()
            .map(|s| s.iter().fold(0u64, |m, &e| m | (1 << (e - 1))))
            .collect();
        let mut best = 0;
        let l = masks.len();
        let mut choice: Vec<usize> = Vec::new();
        fn recurse(masks: &[u64], l: usize, k: usize, start: usize, acc: u64, choice: &mut Vec<usize>, best: &mut usize) {
            if choice.len() == k {
                *best = (*best).max(acc.count_ones() as usize);
                return;
            }
            for j in start..l {
                choice.push(j);
                recurse(masks, l, k, j + 1, acc | masks[j], choice, best);
                choice.pop();
            }
        }
        recurse(&masks, l, self.k, 0, 0, &mut choice, &mut best);
        best
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    BadSpec(String),
    #[error("could not generate a satisfiable instance after {0} attempts")]
    Unsatisfiable(usize),
}

/// Encodes a max k-cover problem as a line planning instance: element i
/// becomes the unit-demand OD pair o_{i,1} -> o_{i,2}; subset G_j becomes a
/// line chaining its elements in ascending order; k unit-capacity buses
/// share all lines; unit rewards, zero costs.
pub fn gen_kcover_instance(spec: &KCoverSpec) -> Result<Instance, GenError> {
    spec.validate()?;
    let node_name = |i: usize, side: usize| format!("o{}_{}", i, side);
    let nodes: Vec<String> = (1..=spec.n).flat_map(|i| [node_name(i, 1), node_name(i, 2)]).collect();

    let mut arcs: Vec<Arc> = Vec::new();
    let mut arc_of: HashMap<(String, String), usize> = HashMap::new();
    let intern_arc = |tail: String, head: String, arcs: &mut Vec<Arc>, arc_of: &mut HashMap<(String, String), usize>| {
        *arc_of.entry((tail.clone(), head.clone())).or_insert_with(|| {
            arcs.push(Arc { id: format!("{}:{}", tail, head), tail, head });
            arcs.len() - 1
        })
    };

    let mut lines = vec![Line { id: "dummy".into(), arcs: vec![] }];
    for (j, subset) in spec.family.iter().enumerate() {
        let mut elements = subset.clone();
        elements.sort_unstable();
        elements.dedup();
        let mut seq = Vec::new();
        for (pos, &i) in elements.iter().enumerate() {
            if pos > 0 {
                let prev = elements[pos - 1];
                seq.push(intern_arc(node_name(prev, 2), node_name(i, 1), &mut arcs, &mut arc_of));
            }
            seq.push(intern_arc(node_name(i, 1), node_name(i, 2), &mut arcs, &mut arc_of));
        }
        lines.push(Line { id: format!("g{}", j + 1), arcs: seq });
    }

    let buses: Vec<Bus> = (0..spec.k)
        .map(|b| Bus {
            id: format!("bus{}", b + 1),
            capacity: 1,
            candidate_lines: (0..lines.len()).collect(),
        })
        .collect();
    let od_pairs: Vec<OdPair> = (1..=spec.n)
        .map(|i| OdPair { origin: 2 * (i - 1), destination: 2 * (i - 1) + 1, demand: 1 })
        .collect();

    let network = Network { nodes, arcs };
    let mut instance = Instance {
        network,
        lines,
        buses,
        od_pairs,
        k: 1,
        rewards: BTreeMap::new(),
        costs: BTreeMap::new(),
    };
    let index = build_subpath_index(&instance);
    let mut rewards = BTreeMap::new();
    for b in 0..instance.buses.len() {
        for l in 0..instance.lines.len() {
            for od in 0..instance.od_pairs.len() {
                if index.serves(od, l) && !instance.lines[l].is_dummy() {
                    rewards.insert((b, l, od), Rat::one());
                }
            }
        }
    }
    instance.rewards = rewards;
    Ok(instance)
}

/// Cost regimes for the random generator.
#[derive(Debug, Clone, PartialEq)]
pub enum CostRegime {
    /// All costs zero.
    Zero,
    /// Uniform costs within the admissible ceiling η³/(256K³).
    Small(Rat),
    /// Uniform costs in [0, 1].
    General,
}

/// Configuration of the random path-network generator.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomConfig {
    pub buses: usize,
    pub nodes: usize,
    pub lines: usize,
    /// Arcs per line, inclusive bounds.
    pub line_len: (usize, usize),
    pub od_count: usize,
    /// Demand per OD pair, inclusive bounds.
    pub demand: (u32, u32),
    /// Capacity multiset cycled across buses in id order.
    pub capacities: Vec<u32>,
    /// Resource count K.
    pub k: usize,
    pub cost_regime: CostRegime,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            buses: 3,
            nodes: 8,
            lines: 3,
            line_len: (2, 4),
            od_count: 4,
            demand: (1, 3),
            capacities: vec![2, 3],
            k: 1,
            cost_regime: CostRegime::Zero,
        }
    }
}

/// Denominator of the fixed-point rational approximations (6 decimals).
const APPROX_DEN: i64 = 1_000_000;

/// sqrt(c) rounded to 6 decimal places, as an exact rational.
fn sqrt_rat(c: u32) -> Rat {
    let approx = ((c as f64).sqrt() * APPROX_DEN as f64).round() as i64;
    rat(approx, APPROX_DEN)
}

/// Uniform rational in [0, hi] with 6-decimal granularity.
fn uniform_rat(rng: &mut ChaCha8Rng, hi: &Rat) -> Rat {
    let step: i64 = rng.gen_range(0..=APPROX_DEN);
    hi.clone() * rat(step, APPROX_DEN)
}

/// Unit-length shortest directed path lengths from every node (BFS).
fn shortest_paths(network: &Network) -> Vec<Vec<Option<usize>>> {
    let n = network.nodes.len();
    let name_to_idx: HashMap<&str, usize> =
        network.nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut adj = vec![Vec::new(); n];
    for arc in &network.arcs {
        adj[name_to_idx[arc.tail.as_str()]].push(name_to_idx[arc.head.as_str()]);
    }
    (0..n)
        .map(|s| {
            let mut dist = vec![None; n];
            dist[s] = Some(0);
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if dist[w].is_none() {
                        dist[w] = Some(dist[v].unwrap() + 1);
                        queue.push_back(w);
                    }
                }
            }
            dist
        })
        .collect()
}

/// Generates a reproducible random instance: random simple-path lines over
/// a shared node pool, ODs drawn as subpaths of existing lines, rewards
/// from the distance rule, costs by regime.
pub fn gen_random_instance(config: &RandomConfig, seed: u64) -> Result<Instance, GenError> {
    if config.buses == 0
        || config.nodes < 2
        || config.lines == 0
        || config.line_len.0 == 0
        || config.line_len.0 > config.line_len.1
        || config.line_len.1 >= config.nodes
        || config.od_count == 0
        || config.demand.0 == 0
        || config.demand.0 > config.demand.1
        || config.capacities.is_empty()
        || config.capacities.contains(&0)
        || config.k == 0
    {
        return Err(GenError::BadSpec("random generator bounds violated".into()));
    }
    if let CostRegime::Small(eta) = &config.cost_regime {
        if *eta <= Rat::zero() || *eta >= rat(1, 2) {
            return Err(GenError::BadSpec("SMALL regime needs eta in (0, 1/2)".into()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<String> = (0..config.nodes).map(|i| format!("n{i}")).collect();

    let mut arcs: Vec<Arc> = Vec::new();
    let mut arc_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut lines = vec![Line { id: "dummy".into(), arcs: vec![] }];
    for j in 0..config.lines {
        let len = rng.gen_range(config.line_len.0..=config.line_len.1);
        // Random simple path: a walk that never revisits a node.
        let mut visited = vec![rng.gen_range(0..config.nodes)];
        while visited.len() < len + 1 {
            let candidates: Vec<usize> =
                (0..config.nodes).filter(|v| !visited.contains(v)).collect();
            visited.push(candidates[rng.gen_range(0..candidates.len())]);
        }
        let mut seq = Vec::new();
        for w in visited.windows(2) {
            let key = (w[0], w[1]);
            let idx = *arc_of.entry(key).or_insert_with(|| {
                arcs.push(Arc {
                    id: format!("a{}_{}", w[0], w[1]),
                    tail: nodes[w[0]].clone(),
                    head: nodes[w[1]].clone(),
                });
                arcs.len() - 1
            });
            seq.push(idx);
        }
        lines.push(Line { id: format!("l{}", j + 1), arcs: seq });
    }

    let buses: Vec<Bus> = (0..config.buses)
        .map(|b| Bus {
            id: format!("b{}", b + 1),
            capacity: config.capacities[b % config.capacities.len()],
            candidate_lines: (0..lines.len()).collect(),
        })
        .collect();

    // ODs as subpaths of random lines, so every OD is servable somewhere.
    let node_index: HashMap<&str, usize> =
        nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut od_pairs: Vec<OdPair> = Vec::new();
    let mut seen_od = std::collections::HashSet::new();
    let max_attempts = 100 * config.od_count;
    let mut attempts = 0;
    while od_pairs.len() < config.od_count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(GenError::Unsatisfiable(max_attempts));
        }
        let l = &lines[1 + rng.gen_range(0..config.lines)];
        let m = l.arcs.len();
        let lo = rng.gen_range(0..m);
        let hi = rng.gen_range(lo..m);
        let origin = node_index[arcs[l.arcs[lo]].tail.as_str()];
        let destination = node_index[arcs[l.arcs[hi]].head.as_str()];
        if origin == destination || !seen_od.insert((origin, destination)) {
            continue;
        }
        let demand = rng.gen_range(config.demand.0..=config.demand.1);
        od_pairs.push(OdPair { origin, destination, demand });
    }

    let network = Network { nodes, arcs };
    let mut instance = Instance {
        network,
        lines,
        buses,
        od_pairs,
        k: config.k,
        rewards: BTreeMap::new(),
        costs: BTreeMap::new(),
    };

    // Rewards: max{0, (1.5·D_s - D_l) / sqrt(C_b)} per servable triple.
    let index = build_subpath_index(&instance);
    let dist = shortest_paths(&instance.network);
    let mut rewards = BTreeMap::new();
    for b in 0..instance.buses.len() {
        let inv_sqrt_cap = Rat::one() / sqrt_rat(instance.buses[b].capacity);
        for l in 0..instance.lines.len() {
            if instance.lines[l].is_dummy() {
                continue;
            }
            for od in 0..instance.od_pairs.len() {
                let Some((lo, hi)) = index.range(od, l) else { continue };
                let pair = &instance.od_pairs[od];
                let Some(ds) = dist[pair.origin][pair.destination] else { continue };
                let dl = (hi - lo + 1) as i64;
                let v = (rat(3, 2) * rat_int(ds as i64) - rat_int(dl)) * inv_sqrt_cap.clone();
                if v.is_positive() {
                    rewards.insert((b, l, od), v);
                }
            }
        }
    }
    instance.rewards = rewards;

    // Costs by regime, drawn in (bus, line) order for reproducibility.
    let ceiling = match &config.cost_regime {
        CostRegime::Zero => None,
        CostRegime::Small(eta) => {
            let kk = rat_int(config.k as i64);
            Some(eta.clone().pow(3) / (rat_int(256) * kk.pow(3)))
        }
        CostRegime::General => Some(Rat::one()),
    };
    if let Some(hi) = ceiling {
        let mut costs = BTreeMap::new();
        for b in 0..instance.buses.len() {
            for l in 0..instance.lines.len() {
                if instance.lines[l].is_dummy() {
                    continue;
                }
                for r in 0..config.k {
                    let c = uniform_rat(&mut rng, &hi);
                    if !c.is_zero() {
                        costs.insert((b, l, r), c);
                    }
                }
            }
        }
        instance.costs = costs;
    }
    Ok(instance)
}

/// Which rounding algorithm a trial run exercises.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmSpec {
    Nc,
    Lc { eta: Rat },
    C { eta: Rat },
    CTol { eta: Rat, tau: Rat },
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::Nc => "NC",
            AlgorithmSpec::Lc { .. } => "LC",
            AlgorithmSpec::C { .. } => "C",
            AlgorithmSpec::CTol { .. } => "C-Tol",
        }
    }
}

/// One audited rounding trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub reward: f64,
    pub discarded: bool,
    pub usage: Vec<f64>,
}

/// Statistics over T seeded rounding trials.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub algorithm: String,
    pub trials: usize,
    pub base_seed: u64,
    pub records: Vec<TrialRecord>,
    pub mean: f64,
    pub stderr: f64,
    pub max: f64,
    pub discards: usize,
    /// Always zero; a violation aborts the run instead.
    pub violations: usize,
    /// The value the bound is relative to (Γ or OPT), when available.
    pub reference: Option<f64>,
    /// The theoretical bound line for the mean, when available.
    pub bound: Option<f64>,
}

impl TrialStats {
    fn from_records(
        algorithm: String,
        base_seed: u64,
        records: Vec<TrialRecord>,
        reference: Option<f64>,
        bound: Option<f64>,
    ) -> TrialStats {
        let t = records.len();
        let mean = records.iter().map(|r| r.reward).sum::<f64>() / t as f64;
        let var = if t > 1 {
            records.iter().map(|r| (r.reward - mean).powi(2)).sum::<f64>() / (t as f64 - 1.0)
        } else {
            0.0
        };
        let stderr = (var / t as f64).sqrt();
        let max = records.iter().map(|r| r.reward).fold(f64::NEG_INFINITY, f64::max);
        let discards = records.iter().filter(|r| r.discarded).count();
        TrialStats {
            algorithm,
            trials: t,
            base_seed,
            records,
            mean,
            stderr,
            max,
            discards,
            violations: 0,
            reference,
            bound,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "algorithm": self.algorithm,
            "trials": self.trials,
            "base_seed": self.base_seed,
            "mean": self.mean,
            "stderr": self.stderr,
            "max": self.max,
            "discards": self.discards,
            "violations": self.violations,
            "reference": self.reference,
            "bound": self.bound,
            "rewards": self.records.iter().map(|r| r.reward).collect::<Vec<_>>(),
        })
    }

    /// Flat CSV, one row per trial: seed, reward, discarded, usage per k.
    pub fn to_csv(&self) -> String {
        let k = self.records.first().map_or(0, |r| r.usage.len());
        let mut header = String::from("seed,reward,discarded");
        for r in 1..=k {
            header.push_str(&format!(",usage_{r}"));
        }
        let mut out = header + "\n";
        for rec in &self.records {
            out.push_str(&format!("{},{},{}", rec.seed, rec.reward, rec.discarded));
            for u in &rec.usage {
                out.push_str(&format!(",{u}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error(transparent)]
    Composite(#[from] CompositeError),
    #[error("trial with seed {seed} produced an infeasible plan (a solver bug): {details}")]
    Infeasible { seed: u64, details: String },
}

fn one_minus_inv_e() -> f64 {
    1.0 - std::f64::consts::E.recip()
}

/// Precomputed state shared across trials of one instance + algorithm.
#[allow(clippy::large_enum_variant)]
enum PreparedAlgorithm {
    Plan { plan: Box<FractionalPlan>, params: Option<RoundingParams> },
    Composite { prep: Box<CompositePrep>, tol: bool },
}

/// Runs T independent seeded rounding trials (seed_i = base_seed + i), each
/// audited against the instance with the appropriate budget; returns stats
/// plus the matching theoretical bound line. `opt` supplies OPT_IP when the
/// bound is relative to the integer optimum (C and C-Tol); pass the oracle
/// value or `None` to skip the bound.
pub fn run_trials(
    instance: &Instance,
    algorithm: &AlgorithmSpec,
    t: usize,
    base_seed: u64,
    mode: LpMode,
    enum_cap: usize,
    opt: Option<&Rat>,
) -> Result<TrialStats, BenchError> {
    let eta_f = |eta: &Rat| rat_to_f64(eta);
    let (prepared, reference, bound, budget): (PreparedAlgorithm, Option<f64>, Option<f64>, Option<Rat>) =
        match algorithm {
            AlgorithmSpec::Nc => {
                let plan = solve_relaxation(instance, Restriction::Full, mode)?;
                let gamma = plan.gamma_f64();
                (
                    PreparedAlgorithm::Plan { plan: Box::new(plan), params: None },
                    Some(gamma),
                    Some(one_minus_inv_e() * gamma),
                    Some(Rat::one()),
                )
            }
            AlgorithmSpec::Lc { eta } => {
                let params = RoundingParams::new(eta.clone(), instance.k)?;
                let plan = solve_relaxation(instance, Restriction::Full, mode)?;
                let gamma = plan.gamma_f64();
                let bound = (one_minus_inv_e() - eta_f(eta)) * gamma;
                (
                    PreparedAlgorithm::Plan { plan: Box::new(plan), params: Some(params) },
                    Some(gamma),
                    Some(bound),
                    Some(Rat::one()),
                )
            }
            AlgorithmSpec::C { eta } => {
                let prep = prepare_c(instance, eta, mode, enum_cap)?;
                let reference = opt.map(rat_to_f64);
                let bound = reference
                    .map(|o| (0.5 - 0.5 * std::f64::consts::E.powi(-1) - eta_f(eta)) * o);
                (
                    PreparedAlgorithm::Composite { prep: Box::new(prep), tol: false },
                    reference,
                    bound,
                    Some(Rat::one()),
                )
            }
            AlgorithmSpec::CTol { eta, tau } => {
                let prep = prepare_c_tol(instance, eta, tau, mode, enum_cap)?;
                let reference = opt.map(rat_to_f64);
                let bound = reference.map(|o| (one_minus_inv_e() - eta_f(eta)) * o);
                (
                    PreparedAlgorithm::Composite { prep: Box::new(prep), tol: true },
                    reference,
                    bound,
                    Some(Rat::one() + tau.clone()),
                )
            }
        };

    let records: Result<Vec<TrialRecord>, BenchError> = (0..t)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed + i as u64;
            let plan = match &prepared {
                PreparedAlgorithm::Plan { plan, params: None } => round_nc(instance, plan, seed),
                PreparedAlgorithm::Plan { plan, params: Some(p) } => {
                    round_lc(instance, plan, p, seed)?
                }
                PreparedAlgorithm::Composite { prep, tol: false } => round_c(instance, prep, seed)?,
                PreparedAlgorithm::Composite { prep, tol: true } => {
                    round_c_tol(instance, prep, seed)?
                }
            };
            let report = check_feasibility(&plan, instance, budget.as_ref());
            if !report.is_feasible() {
                return Err(BenchError::Infeasible {
                    seed,
                    details: report.violations.join("; "),
                });
            }
            Ok(TrialRecord {
                seed,
                reward: plan.reward_f64(),
                discarded: plan.discarded,
                usage: plan.usage.iter().map(rat_to_f64).collect(),
            })
        })
        .collect();

    Ok(TrialStats::from_records(
        algorithm.name().to_string(),
        base_seed,
        records?,
        reference,
        bound,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::save_instance;
    use crate::oracle::{solve_exact, OracleLimits};

    #[test]
    fn kcover_line_serves_exactly_its_subset() {
        let spec = KCoverSpec { n: 9, family: vec![vec![1, 3, 9], vec![2, 3]], k: 1 };
        let inst = gen_kcover_instance(&spec).unwrap();
        let index = build_subpath_index(&inst);
        for (j, subset) in spec.family.iter().enumerate() {
            let line = j + 1;
            for od in 0..spec.n {
                let expected = subset.contains(&(od + 1));
                assert_eq!(index.serves(od, line), expected, "line {line} od {od}");
            }
        }
        // Line 1 visits the six nodes of elements 1, 3, 9 in order.
        let seq = inst.lines[1].node_sequence(&inst.network);
        let names: Vec<&str> = seq.iter().map(|&v| inst.network.nodes[v].as_str()).collect();
        assert_eq!(names, ["o1_1", "o1_2", "o3_1", "o3_2", "o9_1", "o9_2"]);
    }

    #[test]
    fn kcover_oracle_equals_brute_force() {
        let specs = [
            KCoverSpec { n: 5, family: vec![vec![1, 2], vec![2, 3, 4], vec![4, 5]], k: 2 },
            KCoverSpec { n: 4, family: vec![vec![1], vec![1, 2], vec![3, 4]], k: 2 },
            KCoverSpec { n: 6, family: vec![vec![1, 2, 3], vec![3, 4], vec![5], vec![5, 6]], k: 3 },
        ];
        for spec in specs {
            let inst = gen_kcover_instance(&spec).unwrap();
            let res = solve_exact(&inst, &OracleLimits::default()).unwrap();
            assert_eq!(res.opt_value, rat_int(spec.brute_force_optimum() as i64));
        }
    }

    #[test]
    fn kcover_instance_validates() {
        let spec = KCoverSpec { n: 5, family: vec![vec![1, 2], vec![2, 3, 4]], k: 2 };
        let inst = gen_kcover_instance(&spec).unwrap();
        assert!(crate::instance::validate(&inst).is_empty(), "{:?}", crate::instance::validate(&inst));
    }

    #[test]
    fn random_instance_reproducible_and_valid() {
        let config = RandomConfig { cost_regime: CostRegime::General, k: 2, ..Default::default() };
        let a = gen_random_instance(&config, 42).unwrap();
        let b = gen_random_instance(&config, 42).unwrap();
        assert_eq!(save_instance(&a), save_instance(&b));
        assert!(crate::instance::validate(&a).is_empty(), "{:?}", crate::instance::validate(&a));
        let c = gen_random_instance(&config, 43).unwrap();
        assert_ne!(save_instance(&a), save_instance(&c));
    }

    #[test]
    fn random_zero_regime_has_no_costs() {
        let config = RandomConfig::default();
        let inst = gen_random_instance(&config, 7).unwrap();
        assert!(inst.costs.is_empty());
    }

    #[test]
    fn random_small_regime_respects_ceiling() {
        let eta = rat(2, 5);
        let config = RandomConfig {
            cost_regime: CostRegime::Small(eta.clone()),
            k: 2,
            ..Default::default()
        };
        let inst = gen_random_instance(&config, 11).unwrap();
        let ceiling = eta.pow(3) / (rat_int(256) * rat_int(8));
        for cost in inst.costs.values() {
            assert!(*cost <= ceiling);
        }
    }

    #[test]
    fn reward_zero_at_formula_boundary() {
        // D_l = 1.5 D_s exactly: the reward is dropped (zero).
        // A direct line s->t (D_s = 1) of length 1 gives 1.5 - 1 > 0, while
        // a 3-arc detour line would give 1.5 - 3 < 0; verified through the
        // generator's reward map never containing nonpositive entries.
        let config = RandomConfig { nodes: 10, lines: 4, ..Default::default() };
        let inst = gen_random_instance(&config, 3).unwrap();
        for v in inst.rewards.values() {
            assert!(v.is_positive());
        }
    }

    #[test]
    fn trials_on_deterministic_plan_have_zero_stderr() {
        // One bus, unit line fully weighted: every NC trial is identical.
        let spec = KCoverSpec { n: 2, family: vec![vec![1, 2]], k: 1 };
        let inst = gen_kcover_instance(&spec).unwrap();
        let stats = run_trials(&inst, &AlgorithmSpec::Nc, 16, 100, LpMode::Exact, 1000, None)
            .unwrap();
        assert_eq!(stats.trials, 16);
        assert_eq!(stats.stderr, 0.0);
        assert_eq!(stats.mean, stats.max);
        assert_eq!(stats.violations, 0);
    }

    #[test]
    fn trials_mean_respects_nc_bound() {
        let spec = KCoverSpec { n: 5, family: vec![vec![1, 2], vec![2, 3, 4], vec![4, 5]], k: 2 };
        let inst = gen_kcover_instance(&spec).unwrap();
        let stats = run_trials(&inst, &AlgorithmSpec::Nc, 500, 1, LpMode::Exact, 1000, None)
            .unwrap();
        let bound = stats.bound.unwrap();
        assert!(
            stats.mean >= bound - 3.0 * stats.stderr - 1e-9,
            "mean {} below bound {} (stderr {})",
            stats.mean,
            bound,
            stats.stderr
        );
    }

    #[test]
    fn stats_match_recomputation_and_csv_shape() {
        let spec = KCoverSpec { n: 3, family: vec![vec![1, 2], vec![2, 3]], k: 1 };
        let inst = gen_kcover_instance(&spec).unwrap();
        let stats =
            run_trials(&inst, &AlgorithmSpec::Nc, 50, 9, LpMode::Exact, 1000, None).unwrap();
        let mean: f64 = stats.records.iter().map(|r| r.reward).sum::<f64>() / 50.0;
        assert_eq!(stats.mean, mean);
        let csv = stats.to_csv();
        assert_eq!(csv.lines().count(), 51);
        assert!(csv.starts_with("seed,reward,discarded,usage_1"));
    }
}
