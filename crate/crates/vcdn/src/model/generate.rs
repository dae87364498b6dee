//! Deterministic topology generators for the evaluation harness.
//!
//! Both generators are pure functions of their arguments, seed included.
//! Capacity, size, and demand distributions are parameters with documented
//! defaults; they are this crate's choices, not published reference values.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    Demand, Link, MigrationCostPolicy, ModelError, NodeId, Scenario, ServerSpec, Vcdn, VcdnId,
};
use crate::rat::Rat;

/// Knobs shared by both generators.
#[derive(Debug, Clone)]
pub struct GenParams {
    /// Number of vCDNs in the catalog.
    pub n_vcdns: usize,
    /// vCDN size range, GB (inclusive, integers).
    pub size_range: (u32, u32),
    /// Server storage capacity range, GB.
    pub storage_range: (u32, u32),
    /// Server streaming capacity range, Mbps.
    pub stream_range: (u32, u32),
    /// Per-demand throughput range, Mbps.
    pub demand_range: (u32, u32),
    /// How many client groups demand each vCDN.
    pub clients_per_vcdn: usize,
    /// Resampling attempts before giving up on a connected graph.
    pub max_attempts: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n_vcdns: 10,
            size_range: (2, 20),
            storage_range: (40, 120),
            stream_range: (60, 160),
            demand_range: (10, 50),
            clients_per_vcdn: 3,
            max_attempts: 1000,
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, range: (u32, u32)) -> Rat {
    Rat::int(rng.gen_range(range.0..=range.1) as i64)
}

/// Three-tier operator snapshot: access nodes carry the client groups,
/// aggregation and core nodes carry the servers. Defaults sit in the
/// small-scale regime (order of ten servers, client groups, and vCDNs).
pub fn gen_three_tier(
    n_access: usize,
    n_aggregate: usize,
    n_core: usize,
    seed: u64,
    cap_range: (u32, u32),
) -> Result<Scenario, ModelError> {
    gen_three_tier_with(n_access, n_aggregate, n_core, seed, cap_range, &GenParams::default())
}

pub fn gen_three_tier_with(
    n_access: usize,
    n_aggregate: usize,
    n_core: usize,
    seed: u64,
    cap_range: (u32, u32),
    params: &GenParams,
) -> Result<Scenario, ModelError> {
    if n_access == 0 || n_aggregate == 0 || n_core == 0 {
        return Err(ModelError::Generator("all layer counts must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let access: Vec<NodeId> = (0..n_access).map(|i| NodeId(i as u32)).collect();
    let aggregate: Vec<NodeId> = (0..n_aggregate)
        .map(|i| NodeId((n_access + i) as u32))
        .collect();
    let core: Vec<NodeId> = (0..n_core)
        .map(|i| NodeId((n_access + n_aggregate + i) as u32))
        .collect();

    let mut links = Vec::new();
    let add_undirected = |links: &mut Vec<Link>, a: NodeId, b: NodeId, cap: Rat| {
        links.push(Link { from: a, to: b, capacity: cap });
        links.push(Link { from: b, to: a, capacity: cap });
    };
    // Each access node homes to one aggregation node; each aggregation node
    // homes to one core node; the core layer is a ring (chain for < 3).
    for (i, &a) in access.iter().enumerate() {
        let agg = aggregate[i % n_aggregate];
        add_undirected(&mut links, a, agg, draw(&mut rng, cap_range));
    }
    for (i, &g) in aggregate.iter().enumerate() {
        let c = core[i % n_core];
        add_undirected(&mut links, g, c, draw(&mut rng, cap_range));
    }
    for i in 1..n_core {
        add_undirected(&mut links, core[i - 1], core[i], draw(&mut rng, cap_range));
    }
    if n_core > 2 {
        add_undirected(&mut links, core[n_core - 1], core[0], draw(&mut rng, cap_range));
    }

    let server_nodes: Vec<NodeId> = aggregate.iter().chain(core.iter()).copied().collect();
    finish_scenario(rng, access, server_nodes, links, params)
}

/// Connected G(n, m) random graph, undirected edges stored as symmetric
/// directed link pairs. Half the nodes (rounded up) become servers.
pub fn gen_erdos_renyi(
    n: usize,
    m: usize,
    seed: u64,
    cap_range: (u32, u32),
) -> Result<Scenario, ModelError> {
    gen_erdos_renyi_with(n, m, seed, cap_range, &GenParams::default())
}

pub fn gen_erdos_renyi_with(
    n: usize,
    m: usize,
    seed: u64,
    cap_range: (u32, u32),
    params: &GenParams,
) -> Result<Scenario, ModelError> {
    if n < 1 {
        return Err(ModelError::Generator("need at least one node".into()));
    }
    let max_edges = n * n.saturating_sub(1) / 2;
    if m + 1 < n || m > max_edges {
        return Err(ModelError::Generator(format!(
            "edge count {m} out of range [{}, {max_edges}] for {n} nodes",
            n.saturating_sub(1)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(max_edges);
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            pairs.push((i, j));
        }
    }
    let edges = 'sample: {
        for _ in 0..params.max_attempts {
            let mut shuffled = pairs.clone();
            shuffled.shuffle(&mut rng);
            shuffled.truncate(m);
            if edges_connected(n, &shuffled) {
                break 'sample shuffled;
            }
        }
        return Err(ModelError::Generator(format!(
            "no connected G({n}, {m}) sample within {} attempts",
            params.max_attempts
        )));
    };

    let mut links = Vec::with_capacity(2 * m);
    for &(a, b) in &edges {
        let cap = draw(&mut rng, cap_range);
        links.push(Link { from: NodeId(a), to: NodeId(b), capacity: cap });
        links.push(Link { from: NodeId(b), to: NodeId(a), capacity: cap });
    }

    let mut order: Vec<NodeId> = (0..n as u32).map(NodeId).collect();
    order.shuffle(&mut rng);
    let n_servers = n.div_ceil(2);
    let server_nodes: Vec<NodeId> = order[..n_servers].to_vec();
    let clients: Vec<NodeId> = order[n_servers..].to_vec();
    finish_scenario(rng, clients, server_nodes, links, params)
}

fn edges_connected(n: usize, edges: &[(u32, u32)]) -> bool {
    // Union-find over the sampled edge set.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut components = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

fn finish_scenario(
    mut rng: ChaCha8Rng,
    clients: Vec<NodeId>,
    server_nodes: Vec<NodeId>,
    links: Vec<Link>,
    params: &GenParams,
) -> Result<Scenario, ModelError> {
    let servers: Vec<ServerSpec> = server_nodes
        .iter()
        .map(|&node| ServerSpec {
            node,
            storage_capacity: draw(&mut rng, params.storage_range),
            stream_capacity: draw(&mut rng, params.stream_range),
        })
        .collect();

    let mut vcdns = Vec::with_capacity(params.n_vcdns);
    for i in 0..params.n_vcdns {
        let origin = server_nodes[rng.gen_range(0..server_nodes.len())];
        vcdns.push(Vcdn {
            id: VcdnId(i as u32),
            size: draw(&mut rng, params.size_range),
            origin,
        });
    }

    // A demand can never be served across less capacity than the client's
    // own egress links or the fleet's aggregate streaming budget, so clamp
    // draws to the remaining headroom on both and skip demands that would
    // make the instance trivially infeasible. Both budgets are held below
    // saturation: a fully loaded fleet leaves no room for the placement
    // detours any solver needs.
    let mut egress_left: BTreeMap<NodeId, Rat> = BTreeMap::new();
    for link in &links {
        if clients.contains(&link.from) {
            let slot = egress_left.entry(link.from).or_insert(Rat::zero());
            *slot = *slot + link.capacity * Rat::new(3, 4);
        }
    }
    let mut stream_left = servers
        .iter()
        .fold(Rat::zero(), |acc, s| acc + s.stream_capacity)
        * Rat::new(3, 5);
    let mut demands = Vec::new();
    for f in &vcdns {
        if clients.is_empty() {
            break;
        }
        let mut pool = clients.clone();
        pool.shuffle(&mut rng);
        for &client in pool.iter().take(params.clients_per_vcdn.min(pool.len())) {
            let drawn = draw(&mut rng, params.demand_range);
            let headroom = *egress_left.get(&client).unwrap_or(&Rat::zero());
            let throughput = drawn.min(headroom).min(stream_left);
            if throughput < Rat::int(1) {
                continue;
            }
            egress_left.insert(client, headroom - throughput);
            stream_left = stream_left - throughput;
            demands.push(Demand { client, vcdn: f.id, throughput });
        }
    }
    demands.sort_by_key(|d| (d.client, d.vcdn));

    let mut nodes: Vec<NodeId> = clients.iter().chain(server_nodes.iter()).copied().collect();
    nodes.sort();
    let mut servers = servers;
    servers.sort_by_key(|s| s.node);

    let scenario = Scenario {
        nodes,
        links,
        servers,
        client_groups: { let mut c = clients; c.sort(); c },
        vcdns,
        demands,
        cost_policy: MigrationCostPolicy::default(),
    };
    scenario.validate()?;
    Ok(scenario)
}
