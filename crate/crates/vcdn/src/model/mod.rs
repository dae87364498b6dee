//! Problem instance types, scenario file I/O, validation, and topology
//! generators.
//!
//! A [`Scenario`] bundles the capacitated network, the server fleet, the
//! client groups with their per-vCDN throughput demands, and the migration
//! cost policy. Scenarios are immutable after construction and safe to share
//! across concurrent solver runs.

mod generate;

pub use generate::{gen_erdos_renyi, gen_erdos_renyi_with, gen_three_tier, gen_three_tier_with, GenParams};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::rat::Rat;

/// Opaque node handle. Every node is exactly one of client group or server.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

/// Opaque vCDN handle.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct VcdnId(pub u32);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for VcdnId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Directed capacitated link; capacity is the throughput available from
/// `from` to `to` in Mbps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub from: NodeId,
    pub to: NodeId,
    pub capacity: Rat,
}

/// Server node with storage (GB) and streaming (Mbps) capacities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerSpec {
    pub node: NodeId,
    pub storage_capacity: Rat,
    pub stream_capacity: Rat,
}

/// A virtual CDN instance. `size` is the aggregate footprint in GB and
/// `origin` the server hosting it before optimization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vcdn {
    pub id: VcdnId,
    pub size: Rat,
    pub origin: NodeId,
}

/// Throughput demand of one client group for one vCDN, in Mbps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Demand {
    pub client: NodeId,
    pub vcdn: VcdnId,
    pub throughput: Rat,
}

/// One explicit migration-cost entry, in Gb.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostEntry {
    pub server: NodeId,
    pub vcdn: VcdnId,
    pub cost: Rat,
}

/// Explicit client-to-attachment-server assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attachment {
    pub client: NodeId,
    pub server: NodeId,
}

/// Operator policy defining the migration cost m(s, f).
///
/// The default rule prices a migration at vCDN size times the hop distance
/// from its origin, with zero cost at the origin itself. An explicit matrix
/// overrides this. `attachments` optionally fixes each client group's
/// attachment server; when absent the nearest server by hop count is used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MigrationCostPolicy {
    pub mode: CostMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub explicit: Vec<CostEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attachments: Vec<Attachment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostMode {
    HopDistanceTimesSize,
    ExplicitMatrix,
}

impl Default for MigrationCostPolicy {
    fn default() -> Self {
        MigrationCostPolicy {
            mode: CostMode::HopDistanceTimesSize,
            explicit: Vec::new(),
            attachments: Vec::new(),
        }
    }
}

/// Full problem instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub nodes: Vec<NodeId>,
    pub links: Vec<Link>,
    pub servers: Vec<ServerSpec>,
    pub client_groups: Vec<NodeId>,
    pub vcdns: Vec<Vcdn>,
    pub demands: Vec<Demand>,
    #[serde(default)]
    pub cost_policy: MigrationCostPolicy,
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("scenario schema violation: {0}")]
    Schema(String),
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("invalid value for {field}: {reason}")]
    InvalidValue { field: String, reason: String },
    #[error("graph is not connected")]
    Disconnected,
    #[error("generator error: {0}")]
    Generator(String),
}

impl Scenario {
    /// Parses and validates a scenario document. Unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Scenario, ModelError> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| ModelError::Schema(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    pub fn server(&self, node: NodeId) -> Option<&ServerSpec> {
        self.servers.iter().find(|s| s.node == node)
    }

    pub fn vcdn(&self, id: VcdnId) -> Option<&Vcdn> {
        self.vcdns.iter().find(|f| f.id == id)
    }

    pub fn is_server(&self, node: NodeId) -> bool {
        self.servers.iter().any(|s| s.node == node)
    }

    /// Demanded (client, vcdn) pairs with strictly positive throughput.
    pub fn positive_demands(&self) -> impl Iterator<Item = &Demand> {
        self.demands.iter().filter(|d| !d.throughput.is_zero())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let node_set: BTreeSet<NodeId> = self.nodes.iter().copied().collect();
        if node_set.len() != self.nodes.len() {
            return Err(ModelError::InvalidValue {
                field: "nodes".into(),
                reason: "duplicate node id".into(),
            });
        }
        let server_set: BTreeSet<NodeId> = self.servers.iter().map(|s| s.node).collect();
        if server_set.len() != self.servers.len() {
            return Err(ModelError::InvalidValue {
                field: "servers".into(),
                reason: "duplicate server node".into(),
            });
        }
        let client_set: BTreeSet<NodeId> = self.client_groups.iter().copied().collect();
        if client_set.len() != self.client_groups.len() {
            return Err(ModelError::InvalidValue {
                field: "client_groups".into(),
                reason: "duplicate client group".into(),
            });
        }
        // Every node is exactly one of server or client group.
        if let Some(n) = server_set.intersection(&client_set).next() {
            return Err(ModelError::InvalidValue {
                field: "servers/client_groups".into(),
                reason: format!("node {n} is both server and client group"),
            });
        }
        for n in server_set.union(&client_set) {
            if !node_set.contains(n) {
                return Err(ModelError::DanglingReference(format!(
                    "classified node {n} is not in `nodes`"
                )));
            }
        }
        for n in &node_set {
            if !server_set.contains(n) && !client_set.contains(n) {
                return Err(ModelError::InvalidValue {
                    field: "nodes".into(),
                    reason: format!("node {n} is neither server nor client group"),
                });
            }
        }
        let mut link_pairs = BTreeSet::new();
        for l in &self.links {
            if !node_set.contains(&l.from) || !node_set.contains(&l.to) {
                return Err(ModelError::DanglingReference(format!(
                    "link ({}, {}) references an unknown node",
                    l.from, l.to
                )));
            }
            if l.capacity.is_negative() {
                return Err(ModelError::InvalidValue {
                    field: "links.capacity".into(),
                    reason: format!("negative capacity on ({}, {})", l.from, l.to),
                });
            }
            if !link_pairs.insert((l.from, l.to)) {
                return Err(ModelError::InvalidValue {
                    field: "links".into(),
                    reason: format!("duplicate link ({}, {})", l.from, l.to),
                });
            }
        }
        for s in &self.servers {
            if s.storage_capacity.is_negative() || s.stream_capacity.is_negative() {
                return Err(ModelError::InvalidValue {
                    field: "servers".into(),
                    reason: format!("negative capacity on server {}", s.node),
                });
            }
        }
        let mut vcdn_ids = BTreeSet::new();
        for f in &self.vcdns {
            if !vcdn_ids.insert(f.id) {
                return Err(ModelError::InvalidValue {
                    field: "vcdns".into(),
                    reason: format!("duplicate vcdn id {}", f.id),
                });
            }
            if f.size <= Rat::zero() {
                return Err(ModelError::InvalidValue {
                    field: "vcdns.size".into(),
                    reason: format!("vcdn {} must have positive size", f.id),
                });
            }
            if !server_set.contains(&f.origin) {
                return Err(ModelError::DanglingReference(format!(
                    "vcdn {} origin {} is not a server",
                    f.id, f.origin
                )));
            }
        }
        let mut demand_pairs = BTreeSet::new();
        for d in &self.demands {
            if !client_set.contains(&d.client) {
                return Err(ModelError::DanglingReference(format!(
                    "demand references unknown client {}",
                    d.client
                )));
            }
            if !vcdn_ids.contains(&d.vcdn) {
                return Err(ModelError::DanglingReference(format!(
                    "demand references unknown vcdn {}",
                    d.vcdn
                )));
            }
            if d.throughput.is_negative() {
                return Err(ModelError::InvalidValue {
                    field: "demands.throughput".into(),
                    reason: format!("negative demand from client {}", d.client),
                });
            }
            if !demand_pairs.insert((d.client, d.vcdn)) {
                return Err(ModelError::InvalidValue {
                    field: "demands".into(),
                    reason: format!("duplicate demand ({}, {})", d.client, d.vcdn),
                });
            }
        }
        match self.cost_policy.mode {
            CostMode::ExplicitMatrix => {
                let mut entries = BTreeSet::new();
                for e in &self.cost_policy.explicit {
                    if !server_set.contains(&e.server) || !vcdn_ids.contains(&e.vcdn) {
                        return Err(ModelError::DanglingReference(format!(
                            "cost entry ({}, {}) references unknown server or vcdn",
                            e.server, e.vcdn
                        )));
                    }
                    if e.cost.is_negative() {
                        return Err(ModelError::InvalidValue {
                            field: "cost_policy.explicit".into(),
                            reason: "negative migration cost".into(),
                        });
                    }
                    entries.insert((e.server, e.vcdn));
                }
                for s in &self.servers {
                    for f in &self.vcdns {
                        if !entries.contains(&(s.node, f.id)) {
                            return Err(ModelError::InvalidValue {
                                field: "cost_policy.explicit".into(),
                                reason: format!("missing entry for ({}, {})", s.node, f.id),
                            });
                        }
                    }
                }
                for f in &self.vcdns {
                    let origin_cost = self
                        .cost_policy
                        .explicit
                        .iter()
                        .find(|e| e.server == f.origin && e.vcdn == f.id)
                        .map(|e| e.cost)
                        .unwrap_or_else(Rat::zero);
                    if !origin_cost.is_zero() {
                        return Err(ModelError::InvalidValue {
                            field: "cost_policy.explicit".into(),
                            reason: format!("cost at origin of vcdn {} must be 0", f.id),
                        });
                    }
                }
            }
            CostMode::HopDistanceTimesSize => {
                if !self.cost_policy.explicit.is_empty() {
                    return Err(ModelError::InvalidValue {
                        field: "cost_policy.explicit".into(),
                        reason: "explicit entries require explicit-matrix mode".into(),
                    });
                }
            }
        }
        for a in &self.cost_policy.attachments {
            if !client_set.contains(&a.client) || !server_set.contains(&a.server) {
                return Err(ModelError::DanglingReference(format!(
                    "attachment ({}, {}) references unknown client or server",
                    a.client, a.server
                )));
            }
        }
        if !self.is_connected() {
            return Err(ModelError::Disconnected);
        }
        Ok(())
    }

    fn undirected_adjacency(&self) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
        let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> =
            self.nodes.iter().map(|&n| (n, BTreeSet::new())).collect();
        for l in &self.links {
            adj.entry(l.from).or_default().insert(l.to);
            adj.entry(l.to).or_default().insert(l.from);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.nodes.first() else {
            return true;
        };
        let adj = self.undirected_adjacency();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[&u] {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        seen.len() == self.nodes.len()
    }

    /// BFS hop distances from `from` over the undirected link structure.
    pub fn hop_distances(&self, from: NodeId) -> BTreeMap<NodeId, u32> {
        let adj = self.undirected_adjacency();
        let mut dist = BTreeMap::from([(from, 0u32)]);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            for &v in &adj[&u] {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(v) {
                    e.insert(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Migration cost m(s, f): zero at the vCDN's origin, otherwise set by
    /// the cost policy.
    pub fn migration_cost(&self, server: NodeId, vcdn: VcdnId) -> Rat {
        let f = self.vcdn(vcdn).expect("unknown vcdn");
        if server == f.origin {
            return Rat::zero();
        }
        match self.cost_policy.mode {
            CostMode::ExplicitMatrix => self
                .cost_policy
                .explicit
                .iter()
                .find(|e| e.server == server && e.vcdn == vcdn)
                .map(|e| e.cost)
                .expect("validated explicit matrix is total"),
            CostMode::HopDistanceTimesSize => {
                let hops = self
                    .hop_distances(f.origin)
                    .get(&server)
                    .copied()
                    .unwrap_or(u32::MAX);
                f.size * Rat::int(hops as i64)
            }
        }
    }

    /// The server a client group attaches to: explicit assignment when the
    /// policy provides one, otherwise the nearest server by hop count with
    /// ties broken by the smallest node id.
    pub fn attachment_server(&self, client: NodeId) -> Option<NodeId> {
        if let Some(a) = self
            .cost_policy
            .attachments
            .iter()
            .find(|a| a.client == client)
        {
            return Some(a.server);
        }
        let dist = self.hop_distances(client);
        self.servers
            .iter()
            .filter_map(|s| dist.get(&s.node).map(|&d| (d, s.node)))
            .min()
            .map(|(_, node)| node)
    }

    /// Keeps only the first `k` vCDNs (by id order) and the demands that
    /// reference them. Used by the experiment harness to sweep |F|.
    pub fn restrict_vcdns(&self, k: usize) -> Scenario {
        let mut vcdns = self.vcdns.clone();
        vcdns.sort_by_key(|f| f.id);
        vcdns.truncate(k);
        let kept: BTreeSet<VcdnId> = vcdns.iter().map(|f| f.id).collect();
        let mut out = self.clone();
        out.vcdns = vcdns;
        out.demands.retain(|d| kept.contains(&d.vcdn));
        out.cost_policy.explicit.retain(|e| kept.contains(&e.vcdn));
        out
    }
}

/// Cheap sanity screen for obviously unsatisfiable instances; returns
/// warnings, never errors.
pub fn validate_solution_inputs(s: &Scenario) -> Vec<String> {
    let mut warnings = Vec::new();
    let total_demand: Rat = s.positive_demands().map(|d| d.throughput).sum();
    let total_stream: Rat = s.servers.iter().map(|sv| sv.stream_capacity).sum();
    if total_demand > total_stream {
        warnings.push(format!(
            "total demand {total_demand} Mbps exceeds total stream capacity {total_stream} Mbps"
        ));
    }
    let max_stream = s
        .servers
        .iter()
        .map(|sv| sv.stream_capacity)
        .fold(Rat::zero(), Rat::max);
    for d in s.positive_demands() {
        if d.throughput > max_stream {
            warnings.push(format!(
                "demand unsatisfiable: client {} needs {} Mbps for vcdn {} but no server streams more than {} Mbps",
                d.client, d.throughput, d.vcdn, max_stream
            ));
        }
    }
    warnings
}

#[cfg(test)]
mod tests;
