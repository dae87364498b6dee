//! Heuristic placement/migration on the Gomory-Hu tree.
//!
//! The scenario graph is symmetrized and transformed into its Gomory-Hu
//! tree; demands are processed largest-first along unique tree paths. When a
//! path edge cannot carry a demand, the vCDN is replicated (or moved) to the
//! rupture node: the node nearest the current host from which the remaining
//! path to the client is capacity-feasible. Capacity accounting runs on
//! tree-edge residuals, a deliberate over-approximation of simultaneous
//! multi-flow feasibility in the source graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::flow::FlowGraph;
use crate::ghtree::{gomory_hu, GhError, GomoryHuTree, TreeEdge};
use crate::model::{Demand, NodeId, Scenario, VcdnId};
use crate::rat::Rat;
use crate::solution::{Arc, PlacementSolution};

#[derive(Debug, thiserror::Error)]
pub enum HpacError {
    #[error("no server can host vcdn {vcdn} for client {client} within remaining capacity")]
    Infeasible { client: NodeId, vcdn: VcdnId },
    #[error("client {0} has no attachment server")]
    NoAttachment(NodeId),
    #[error(transparent)]
    Tree(#[from] GhError),
}

/// Whether a migration keeps the previous copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MigrationMode {
    /// Keep the old copy; replicas accumulate.
    #[default]
    Replicate,
    /// Drop the source copy when it serves no demand.
    Move,
}

/// Unique tree path from a client-side node to a hosting server, with its
/// static bottleneck. `nodes[0]` is the client side, the last node the host;
/// `edges[i]` joins `nodes[i]` and `nodes[i + 1]`.
#[derive(Debug, Clone)]
pub struct PathReport {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<TreeEdge>,
    pub bottleneck: Rat,
    pub bottleneck_edge: TreeEdge,
}

pub fn explore_path(
    tree: &GomoryHuTree,
    client_side: NodeId,
    host: NodeId,
) -> Result<PathReport, GhError> {
    let nodes = tree.path_nodes(client_side, host)?;
    let edges = tree.tree_path(client_side, host)?;
    let bottleneck_edge = *edges
        .iter()
        .min_by_key(|e| (e.capacity, e.a, e.b))
        .expect("distinct endpoints yield at least one edge");
    Ok(PathReport {
        nodes,
        edges,
        bottleneck: bottleneck_edge.capacity,
        bottleneck_edge,
    })
}

/// Remaining tree-edge and server capacities while demands are processed
/// sequentially. Private to one solver run.
#[derive(Debug, Clone)]
pub struct ResidualState {
    edge_left: BTreeMap<(NodeId, NodeId), Rat>,
    stream_left: BTreeMap<NodeId, Rat>,
    storage_left: BTreeMap<NodeId, Rat>,
    /// (server, vcdn) pairs whose storage has been charged.
    charged: BTreeSet<(NodeId, VcdnId)>,
}

impl ResidualState {
    pub fn new(s: &Scenario, tree: &GomoryHuTree) -> Self {
        ResidualState {
            edge_left: tree
                .edges()
                .iter()
                .map(|e| (normalize(e.a, e.b), e.capacity))
                .collect(),
            stream_left: s
                .servers
                .iter()
                .map(|sv| (sv.node, sv.stream_capacity))
                .collect(),
            storage_left: s
                .servers
                .iter()
                .map(|sv| (sv.node, sv.storage_capacity))
                .collect(),
            charged: BTreeSet::new(),
        }
    }

    pub fn edge_residual(&self, a: NodeId, b: NodeId) -> Rat {
        self.edge_left
            .get(&normalize(a, b))
            .copied()
            .unwrap_or_else(Rat::zero)
    }

    pub fn stream_residual(&self, server: NodeId) -> Rat {
        self.stream_left.get(&server).copied().unwrap_or_else(Rat::zero)
    }

    pub fn storage_residual(&self, server: NodeId) -> Rat {
        self.storage_left.get(&server).copied().unwrap_or_else(Rat::zero)
    }

    /// Whether `server` can serve `demand` Mbps of the given vCDN, charging
    /// storage if the pair is not charged yet.
    fn admits(&self, s: &Scenario, server: NodeId, vcdn: VcdnId, demand: Rat) -> bool {
        if !s.is_server(server) {
            return false;
        }
        if self.stream_residual(server) < demand {
            return false;
        }
        if self.charged.contains(&(server, vcdn)) {
            return true;
        }
        let size = s.vcdn(vcdn).expect("known vcdn").size;
        self.storage_residual(server) >= size
    }

    fn charge_storage(&mut self, s: &Scenario, server: NodeId, vcdn: VcdnId) {
        if self.charged.insert((server, vcdn)) {
            let size = s.vcdn(vcdn).expect("known vcdn").size;
            *self.storage_left.get_mut(&server).unwrap() -= size;
        }
    }

    fn refund_storage(&mut self, s: &Scenario, server: NodeId, vcdn: VcdnId) {
        if self.charged.remove(&(server, vcdn)) {
            let size = s.vcdn(vcdn).expect("known vcdn").size;
            *self.storage_left.get_mut(&server).unwrap() += size;
        }
    }

    fn consume_route(&mut self, path: &[Arc], demand: Rat) {
        for &(a, b) in path {
            *self.edge_left.get_mut(&normalize(a, b)).unwrap() -= demand;
        }
    }
}

fn normalize(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Walking from the hosting end toward the client, the first node from which
/// every remaining edge has residual capacity for the demand and whose own
/// residuals admit the vCDN. Client-group nodes cannot host and are skipped.
pub fn find_rupture_node(
    s: &Scenario,
    p: &PathReport,
    vcdn: VcdnId,
    demand: Rat,
    res: &ResidualState,
) -> Option<NodeId> {
    // prefix_ok[i]: every edge between nodes[i] and the client endpoint
    // carries the demand.
    let mut prefix_ok = vec![true; p.nodes.len()];
    for i in 0..p.edges.len() {
        let e = &p.edges[i];
        let ok = res.edge_residual(e.a, e.b) >= demand;
        prefix_ok[i + 1] = prefix_ok[i] && ok;
    }
    for i in (0..p.nodes.len()).rev() {
        let u = p.nodes[i];
        if prefix_ok[i] && res.admits(s, u, vcdn, demand) {
            return Some(u);
        }
    }
    None
}

/// Heuristic solver output: the placement solution plus the tree it was
/// planned on, for tree-capacity feasibility audits.
#[derive(Debug, Clone)]
pub struct HpacOutcome {
    pub solution: PlacementSolution,
    pub tree: GomoryHuTree,
}

/// Symmetrizes the scenario's directed link pairs (summing both directions)
/// into the undirected graph the tree transformation requires.
pub fn symmetrized_flow_graph(s: &Scenario) -> FlowGraph {
    let mut undirected: BTreeMap<(NodeId, NodeId), Rat> = BTreeMap::new();
    for l in &s.links {
        *undirected
            .entry(normalize(l.from, l.to))
            .or_insert_with(Rat::zero) += l.capacity;
    }
    let mut g = FlowGraph::new();
    for &node in &s.nodes {
        g.add_node(node);
    }
    for (&(a, b), &c) in &undirected {
        g.add_undirected(a, b, c);
    }
    g
}

pub fn hpac_solve(s: &Scenario, mode: MigrationMode) -> Result<HpacOutcome, HpacError> {
    let tree = gomory_hu(&symmetrized_flow_graph(s))?;
    let mut res = ResidualState::new(s, &tree);
    let mut hosts: BTreeMap<VcdnId, BTreeSet<NodeId>> = BTreeMap::new();
    for f in &s.vcdns {
        hosts.entry(f.id).or_default().insert(f.origin);
    }
    let mut served: BTreeMap<(NodeId, VcdnId), u32> = BTreeMap::new();
    let mut sol = PlacementSolution::default();

    let mut demands: Vec<Demand> = s.positive_demands().cloned().collect();
    demands.sort_by(|a, b| {
        b.throughput
            .cmp(&a.throughput)
            .then(a.client.cmp(&b.client))
            .then(a.vcdn.cmp(&b.vcdn))
    });

    for d in demands {
        let infeasible = || HpacError::Infeasible { client: d.client, vcdn: d.vcdn };

        // Rank current hosts by residual bottleneck toward the client,
        // ties by fewer hops then smallest id.
        let mut ranked: Vec<(Rat, usize, NodeId)> = hosts[&d.vcdn]
            .iter()
            .map(|&h| {
                let path = tree.tree_path(d.client, h).expect("nodes share the tree");
                let bottleneck = path
                    .iter()
                    .map(|e| res.edge_residual(e.a, e.b))
                    .fold(None, |acc: Option<Rat>, c| Some(acc.map_or(c, |a| a.min(c))))
                    .expect("client and host differ");
                (bottleneck, path.len(), h)
            })
            .collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        // Take the best-ranked host whose path admits a rupture node; an
        // exhausted nearest host must not doom a demand another copy can
        // still serve.
        let mut chosen: Option<(NodeId, NodeId)> = None;
        for &(_, _, h) in &ranked {
            let report = explore_path(&tree, d.client, h)?;
            if let Some(node) = find_rupture_node(s, &report, d.vcdn, d.throughput, &res) {
                chosen = Some((h, node));
                break;
            }
        }
        let host = ranked[0].2;
        let (host, serving) = match chosen {
            Some(pair) => pair,
            None => {
                // Last resort, off-path: the client's attachment server,
                // then every other server by tree distance. The rupture
                // walk alone starves when the client-host path crosses no
                // server nodes.
                let reaches = |server: NodeId| {
                    let path = tree.tree_path(d.client, server).ok()?;
                    let reachable = path
                        .iter()
                        .all(|e| res.edge_residual(e.a, e.b) >= d.throughput);
                    (reachable && res.admits(s, server, d.vcdn, d.throughput)).then_some(server)
                };
                let s_v = s.attachment_server(d.client);
                let mut others: Vec<(usize, NodeId)> = s
                    .servers
                    .iter()
                    .map(|sv| sv.node)
                    .filter(|&node| node != d.client && Some(node) != s_v)
                    .map(|node| {
                        let hops = tree
                            .tree_path(d.client, node)
                            .map(|p| p.len())
                            .unwrap_or(usize::MAX);
                        (hops, node)
                    })
                    .collect();
                others.sort();
                let fallback = s_v
                    .and_then(reaches)
                    .or_else(|| others.into_iter().find_map(|(_, node)| reaches(node)));
                (host, fallback.ok_or_else(infeasible)?)
            }
        };

        if !hosts[&d.vcdn].contains(&serving) {
            // Migrate/replicate from the chosen host to the serving node.
            let transfer: Vec<Arc> = tree
                .tree_path(host, serving)
                .expect("both nodes live in the tree")
                .iter()
                .map(|e| (e.a, e.b))
                .collect();
            sol.migration_paths.insert((serving, d.vcdn), transfer);
            hosts.get_mut(&d.vcdn).unwrap().insert(serving);
            if mode == MigrationMode::Move
                && served.get(&(host, d.vcdn)).copied().unwrap_or(0) == 0
            {
                hosts.get_mut(&d.vcdn).unwrap().remove(&host);
                res.refund_storage(s, host, d.vcdn);
            }
        }

        res.charge_storage(s, serving, d.vcdn);
        *res.stream_left.get_mut(&serving).unwrap() -= d.throughput;
        *served.entry((serving, d.vcdn)).or_insert(0) += 1;

        let route: Vec<Arc> = tree
            .tree_path(serving, d.client)
            .expect("serving node reaches the client")
            .iter()
            .map(|e| (e.a, e.b))
            .collect();
        res.consume_route(&route, d.throughput);
        sol.placements.insert((serving, d.vcdn));
        sol.assignments.insert((d.client, d.vcdn), serving);
        sol.routes.insert((d.client, d.vcdn), route);
    }

    sol.objective = sol
        .placements
        .iter()
        .map(|&(server, vcdn)| s.migration_cost(server, vcdn))
        .sum();
    Ok(HpacOutcome { solution: sol, tree })
}
