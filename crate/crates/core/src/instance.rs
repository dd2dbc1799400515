//! Problem instances: network, lines, buses, OD pairs, rewards, and costs.
//!
//! An [`Instance`] is immutable after construction and indexes every entity
//! by position, with string ids used only in the serialized form. The
//! [`SubpathIndex`] records, for each (OD pair, line), the contiguous arc
//! range the line uses to serve that pair, if any; contiguity of those
//! ranges is what makes the per-line allocation polytopes integral.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, in_unit_interval, Rat};

/// A directed arc of the network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub id: String,
    pub tail: String,
    pub head: String,
}

/// The transportation network: named nodes and directed arcs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Network {
    pub nodes: Vec<String>,
    pub arcs: Vec<Arc>,
}

impl Network {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == id)
    }

    pub fn arc_index(&self, id: &str) -> Option<usize> {
        self.arcs.iter().position(|a| a.id == id)
    }
}

/// A candidate line: a directed walk given as a chained arc sequence.
/// The empty arc sequence denotes the dummy line (zero cost, zero reward).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub id: String,
    /// Arc indices into the network, chained head-to-tail.
    pub arcs: Vec<usize>,
}

impl Line {
    pub fn is_dummy(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Visited nodes in walk order; one more entry than arcs, empty for the dummy line.
    pub fn node_sequence(&self, network: &Network) -> Vec<usize> {
        if self.arcs.is_empty() {
            return Vec::new();
        }
        let mut seq = Vec::with_capacity(self.arcs.len() + 1);
        let first = &network.arcs[self.arcs[0]];
        seq.push(network.node_index(&first.tail).expect("validated tail"));
        for &a in &self.arcs {
            seq.push(network.node_index(&network.arcs[a].head).expect("validated head"));
        }
        seq
    }
}

/// A bus with integer capacity and a set of candidate lines (line indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bus {
    pub id: String,
    pub capacity: u32,
    pub candidate_lines: Vec<usize>,
}

/// An origin-destination pair with integer demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdPair {
    pub origin: usize,
    pub destination: usize,
    pub demand: u32,
}

/// A complete problem instance. Immutable after construction; safe to share.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub network: Network,
    pub lines: Vec<Line>,
    pub buses: Vec<Bus>,
    pub od_pairs: Vec<OdPair>,
    /// Number of resource types.
    pub k: usize,
    /// Per-unit rewards, keyed by (bus, line, od). Missing entries are zero.
    pub rewards: BTreeMap<(usize, usize, usize), Rat>,
    /// Resource costs in [0,1], keyed by (bus, line, resource). Missing entries are zero.
    pub costs: BTreeMap<(usize, usize, usize), Rat>,
}

impl Instance {
    pub fn reward(&self, bus: usize, line: usize, od: usize) -> Rat {
        self.rewards.get(&(bus, line, od)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn cost(&self, bus: usize, line: usize, resource: usize) -> Rat {
        self.costs.get(&(bus, line, resource)).cloned().unwrap_or_else(Rat::zero)
    }

    /// The maximum resource cost of operating `line` on `bus` over all resource types.
    pub fn max_cost(&self, bus: usize, line: usize) -> Rat {
        (0..self.k).map(|r| self.cost(bus, line, r)).max().unwrap_or_else(Rat::zero)
    }

    /// The dummy line among a bus's candidates. Validated instances always have one.
    pub fn dummy_line_of(&self, bus: usize) -> Option<usize> {
        self.buses[bus]
            .candidate_lines
            .iter()
            .copied()
            .find(|&l| self.lines[l].is_dummy())
    }

    pub fn line_index(&self, id: &str) -> Option<usize> {
        self.lines.iter().position(|l| l.id == id)
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn od_index(&self, origin: usize, destination: usize) -> Option<usize> {
        self.od_pairs
            .iter()
            .position(|od| od.origin == origin && od.destination == destination)
    }
}

/// Contiguous arc ranges `r_{(i,j),l}`: for each (od, line) either absent or
/// the inclusive range of arc positions within the line's arc sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubpathIndex {
    ranges: HashMap<(usize, usize), (usize, usize)>,
}

impl SubpathIndex {
    /// The arc-position range serving `od` on `line`, if the line passes i -> j.
    pub fn range(&self, od: usize, line: usize) -> Option<(usize, usize)> {
        self.ranges.get(&(od, line)).copied()
    }

    pub fn serves(&self, od: usize, line: usize) -> bool {
        self.ranges.contains_key(&(od, line))
    }

    /// Whether arc position `pos` of `line` lies on the subpath for `od`.
    pub fn covers_arc(&self, od: usize, line: usize, pos: usize) -> bool {
        self.range(od, line).is_some_and(|(lo, hi)| pos >= lo && pos <= hi)
    }

    /// ODs servable by `line`, ascending.
    pub fn servable_ods(&self, line: usize, od_count: usize) -> Vec<usize> {
        (0..od_count).filter(|&od| self.serves(od, line)).collect()
    }
}

/// Computes `r_{(i,j),l}` for every (od, line) pair.
///
/// For a line visiting nodes in walk order, the subpath runs from the FIRST
/// visit of the origin to the first visit of the destination strictly after
/// it; closed lines are read in the linear order of the walk, with no
/// wrap-around service.
pub fn build_subpath_index(instance: &Instance) -> SubpathIndex {
    let mut ranges = HashMap::new();
    for (l, line) in instance.lines.iter().enumerate() {
        if line.is_dummy() {
            continue;
        }
        let seq = line.node_sequence(&instance.network);
        for (od, pair) in instance.od_pairs.iter().enumerate() {
            let Some(p) = seq.iter().position(|&n| n == pair.origin) else {
                continue;
            };
            let Some(off) = seq[p + 1..].iter().position(|&n| n == pair.destination) else {
                continue;
            };
            let q = p + 1 + off;
            // Node positions p..q correspond to arc positions p..q-1 inclusive.
            ranges.insert((od, l), (p, q - 1));
        }
    }
    SubpathIndex { ranges }
}

/// A single validation violation with a human-readable description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub message: String,
}

impl Violation {
    fn new(message: impl Into<String>) -> Self {
        Violation { message: message.into() }
    }
}

/// Checks every structural invariant of an instance. An empty report means
/// the instance is valid and satisfies the preconditions of all solvers.
pub fn validate(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let net = &instance.network;

    let mut seen = HashSet::new();
    for n in &net.nodes {
        if !seen.insert(n.clone()) {
            out.push(Violation::new(format!("duplicate node id '{n}'")));
        }
    }
    let mut arc_ids = HashSet::new();
    for a in &net.arcs {
        if !arc_ids.insert(a.id.clone()) {
            out.push(Violation::new(format!("duplicate arc id '{}'", a.id)));
        }
        if a.tail == a.head {
            out.push(Violation::new(format!("arc '{}' has tail = head '{}'", a.id, a.tail)));
        }
        for node in [&a.tail, &a.head] {
            if net.node_index(node).is_none() {
                out.push(Violation::new(format!("arc '{}' references unknown node '{node}'", a.id)));
            }
        }
    }

    let mut line_ids = HashSet::new();
    let mut chained = vec![true; instance.lines.len()];
    for (li, line) in instance.lines.iter().enumerate() {
        if !line_ids.insert(line.id.clone()) {
            out.push(Violation::new(format!("duplicate line id '{}'", line.id)));
        }
        for pair in line.arcs.windows(2) {
            let head = &net.arcs[pair[0]].head;
            let tail = &net.arcs[pair[1]].tail;
            if head != tail {
                chained[li] = false;
                out.push(Violation::new(format!(
                    "line '{}': arc '{}' head '{}' does not chain to arc '{}' tail '{}'",
                    line.id, net.arcs[pair[0]].id, head, net.arcs[pair[1]].id, tail
                )));
            }
        }
    }

    let mut bus_ids = HashSet::new();
    for bus in &instance.buses {
        if !bus_ids.insert(bus.id.clone()) {
            out.push(Violation::new(format!("duplicate bus id '{}'", bus.id)));
        }
        if bus.capacity < 1 {
            out.push(Violation::new(format!("bus '{}' capacity must be at least 1", bus.id)));
        }
        if !bus.candidate_lines.iter().any(|&l| instance.lines[l].is_dummy()) {
            out.push(Violation::new(format!(
                "bus '{}' has no dummy line among its candidates",
                bus.id
            )));
        }
    }

    for od in &instance.od_pairs {
        if od.demand < 1 {
            out.push(Violation::new(format!(
                "od pair ({}, {}) demand must be at least 1",
                net.nodes[od.origin], net.nodes[od.destination]
            )));
        }
        if od.origin == od.destination {
            out.push(Violation::new(format!(
                "od pair origin equals destination '{}'",
                net.nodes[od.origin]
            )));
        }
    }

    if instance.k < 1 {
        out.push(Violation::new("K must be at least 1"));
    }

    for (&(b, l, r), value) in &instance.costs {
        if r >= instance.k {
            out.push(Violation::new(format!(
                "cost entry for bus '{}' line '{}' references resource {} out of range (K = {})",
                instance.buses[b].id,
                instance.lines[l].id,
                r + 1,
                instance.k
            )));
        }
        if !in_unit_interval(value) {
            out.push(Violation::new(format!(
                "cost out of [0,1]: bus '{}' line '{}' resource {} has value {}",
                instance.buses[b].id,
                instance.lines[l].id,
                r + 1,
                rational::format_rat(value)
            )));
        }
        if instance.lines[l].is_dummy() && !value.is_zero() {
            out.push(Violation::new(format!(
                "dummy line must have zero cost: bus '{}' line '{}'",
                instance.buses[b].id, instance.lines[l].id
            )));
        }
    }

    use num_traits::Signed;
    for (&(b, l, od), value) in &instance.rewards {
        if value.is_negative() {
            out.push(Violation::new(format!(
                "negative reward: bus '{}' line '{}' od {}",
                instance.buses[b].id, instance.lines[l].id, od
            )));
        }
        if instance.lines[l].is_dummy() && !value.is_zero() {
            out.push(Violation::new(format!(
                "dummy line must have zero reward: bus '{}' line '{}'",
                instance.buses[b].id, instance.lines[l].id
            )));
        }
    }

    // Reward-on-unservable-OD check needs well-formed lines.
    if chained.iter().all(|&c| c) && out.is_empty() {
        let index = build_subpath_index(instance);
        for (&(b, l, od), value) in &instance.rewards {
            if !value.is_zero() && !instance.lines[l].is_dummy() && !index.serves(od, l) {
                let pair = &instance.od_pairs[od];
                out.push(Violation::new(format!(
                    "reward on unservable od: bus '{}' line '{}' does not pass from '{}' to '{}'",
                    instance.buses[b].id,
                    instance.lines[l].id,
                    net.nodes[pair.origin],
                    net.nodes[pair.destination]
                )));
            }
        }
    }

    out
}

// --- Serialization -----------------------------------------------------------

/// Errors from parsing instance documents and OD CSV files.
#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("json parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown {kind} id '{id}'")]
    UnknownId { kind: &'static str, id: String },
    #[error("bad value '{0}': expected decimal string or [num, den]")]
    BadValue(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("od csv row {row}: {message}")]
    BadOdRow { row: usize, message: String },
    #[error("resource index {0} out of range 1..=K")]
    BadResource(usize),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RatValue {
    Pair(i64, i64),
    Text(String),
}

impl RatValue {
    fn to_rat(&self) -> Result<Rat, InstanceError> {
        match self {
            RatValue::Pair(n, d) => {
                if *d == 0 {
                    return Err(InstanceError::BadValue(format!("[{n}, {d}]")));
                }
                Ok(rational::rat(*n, *d))
            }
            RatValue::Text(s) => {
                rational::parse_rat(s).ok_or_else(|| InstanceError::BadValue(s.clone()))
            }
        }
    }

    fn from_rat(r: &Rat) -> RatValue {
        RatValue::Text(rational::format_rat(r))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct LineDoc {
    id: String,
    arcs: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BusDoc {
    id: String,
    capacity: u32,
    candidate_lines: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OdDoc {
    origin: String,
    destination: String,
    demand: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct RewardDoc {
    bus: String,
    line: String,
    origin: String,
    destination: String,
    value: RatValue,
}

#[derive(Debug, Serialize, Deserialize)]
struct CostDoc {
    bus: String,
    line: String,
    k: usize,
    value: RatValue,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    #[serde(rename = "K")]
    k: usize,
    nodes: Vec<String>,
    arcs: Vec<Arc>,
    lines: Vec<LineDoc>,
    buses: Vec<BusDoc>,
    od_pairs: Vec<OdDoc>,
    #[serde(default)]
    rewards: Vec<RewardDoc>,
    #[serde(default)]
    costs: Vec<CostDoc>,
}

fn unknown(kind: &'static str, id: &str) -> InstanceError {
    InstanceError::UnknownId { kind, id: id.to_string() }
}

/// Parses an instance from its JSON document form.
pub fn load_instance(bytes: &[u8]) -> Result<Instance, InstanceError> {
    let doc: InstanceDoc = serde_json::from_slice(bytes)?;
    let network = Network { nodes: doc.nodes, arcs: doc.arcs };

    let mut lines = Vec::with_capacity(doc.lines.len());
    for l in &doc.lines {
        let arcs = l
            .arcs
            .iter()
            .map(|a| network.arc_index(a).ok_or_else(|| unknown("arc", a)))
            .collect::<Result<Vec<_>, _>>()?;
        lines.push(Line { id: l.id.clone(), arcs });
    }

    let line_index = |id: &str| {
        lines
            .iter()
            .position(|l| l.id == id)
            .ok_or_else(|| unknown("line", id))
    };

    let mut buses = Vec::with_capacity(doc.buses.len());
    for b in &doc.buses {
        let candidate_lines = b
            .candidate_lines
            .iter()
            .map(|id| line_index(id))
            .collect::<Result<Vec<_>, _>>()?;
        buses.push(Bus { id: b.id.clone(), capacity: b.capacity, candidate_lines });
    }
    let bus_index = |id: &str| {
        buses
            .iter()
            .position(|b| b.id == id)
            .ok_or_else(|| unknown("bus", id))
    };
    let node_index =
        |id: &str| network.node_index(id).ok_or_else(|| unknown("node", id));

    let mut od_pairs = Vec::with_capacity(doc.od_pairs.len());
    for od in &doc.od_pairs {
        od_pairs.push(OdPair {
            origin: node_index(&od.origin)?,
            destination: node_index(&od.destination)?,
            demand: od.demand,
        });
    }
    let od_index = |origin: usize, destination: usize, text: &str| {
        od_pairs
            .iter()
            .position(|od| od.origin == origin && od.destination == destination)
            .ok_or_else(|| unknown("od pair", text))
    };

    let mut rewards = BTreeMap::new();
    for r in &doc.rewards {
        let origin = node_index(&r.origin)?;
        let destination = node_index(&r.destination)?;
        let od = od_index(origin, destination, &format!("({}, {})", r.origin, r.destination))?;
        let value = r.value.to_rat()?;
        if !value.is_zero() {
            rewards.insert((bus_index(&r.bus)?, line_index(&r.line)?, od), value);
        }
    }

    let mut costs = BTreeMap::new();
    for c in &doc.costs {
        if c.k < 1 || c.k > doc.k {
            return Err(InstanceError::BadResource(c.k));
        }
        let value = c.value.to_rat()?;
        if !value.is_zero() {
            costs.insert((bus_index(&c.bus)?, line_index(&c.line)?, c.k - 1), value);
        }
    }

    Ok(Instance { network, lines, buses, od_pairs, k: doc.k, rewards, costs })
}

/// Serializes an instance back into its JSON document form.
pub fn save_instance(instance: &Instance) -> Vec<u8> {
    let net = &instance.network;
    let doc = InstanceDoc {
        k: instance.k,
        nodes: net.nodes.clone(),
        arcs: net.arcs.clone(),
        lines: instance
            .lines
            .iter()
            .map(|l| LineDoc {
                id: l.id.clone(),
                arcs: l.arcs.iter().map(|&a| net.arcs[a].id.clone()).collect(),
            })
            .collect(),
        buses: instance
            .buses
            .iter()
            .map(|b| BusDoc {
                id: b.id.clone(),
                capacity: b.capacity,
                candidate_lines: b
                    .candidate_lines
                    .iter()
                    .map(|&l| instance.lines[l].id.clone())
                    .collect(),
            })
            .collect(),
        od_pairs: instance
            .od_pairs
            .iter()
            .map(|od| OdDoc {
                origin: net.nodes[od.origin].clone(),
                destination: net.nodes[od.destination].clone(),
                demand: od.demand,
            })
            .collect(),
        rewards: instance
            .rewards
            .iter()
            .map(|(&(b, l, od), v)| RewardDoc {
                bus: instance.buses[b].id.clone(),
                line: instance.lines[l].id.clone(),
                origin: net.nodes[instance.od_pairs[od].origin].clone(),
                destination: net.nodes[instance.od_pairs[od].destination].clone(),
                value: RatValue::from_rat(v),
            })
            .collect(),
        costs: instance
            .costs
            .iter()
            .map(|(&(b, l, r), v)| CostDoc {
                bus: instance.buses[b].id.clone(),
                line: instance.lines[l].id.clone(),
                k: r + 1,
                value: RatValue::from_rat(v),
            })
            .collect(),
    };
    serde_json::to_vec_pretty(&doc).expect("serializable")
}

/// Loads OD pairs from CSV with header `origin,destination,demand`,
/// aggregating duplicate (origin, destination) rows by summing demand.
pub fn load_od_csv(bytes: &[u8], network: &Network) -> Result<Vec<OdPair>, InstanceError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes.chain(std::io::empty()));
    let mut aggregated: Vec<OdPair> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2; // 1-based, after the header
        let record = record?;
        if record.len() != 3 {
            return Err(InstanceError::BadOdRow {
                row,
                message: format!("expected 3 fields, got {}", record.len()),
            });
        }
        let origin = network
            .node_index(&record[0])
            .ok_or_else(|| unknown("node", &record[0]))?;
        let destination = network
            .node_index(&record[1])
            .ok_or_else(|| unknown("node", &record[1]))?;
        if origin == destination {
            return Err(InstanceError::BadOdRow {
                row,
                message: "origin equals destination".to_string(),
            });
        }
        let demand: i64 = record[2].trim().parse().map_err(|_| InstanceError::BadOdRow {
            row,
            message: format!("non-integer demand '{}'", &record[2]),
        })?;
        if demand < 1 {
            return Err(InstanceError::BadOdRow {
                row,
                message: format!("nonpositive demand {demand}"),
            });
        }
        match aggregated
            .iter_mut()
            .find(|od| od.origin == origin && od.destination == destination)
        {
            Some(existing) => existing.demand += demand as u32,
            None => aggregated.push(OdPair { origin, destination, demand: demand as u32 }),
        }
    }
    Ok(aggregated)
}
