//! Independent reference implementations used to cross-check the library.
//!
//! Everything here is deliberately written from scratch against the problem
//! statement — integer arithmetic, adjacency matrices, explicit enumeration —
//! so that an agreement with the library is meaningful.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vcdn::model::{Demand, Link, MigrationCostPolicy, ServerSpec, Vcdn};
use vcdn::solution::Arc;
use vcdn::{NodeId, PlacementSolution, Rat, Scenario, VcdnId};

/// Undirected multigraph as a symmetric integer capacity matrix.
pub struct CapMatrix {
    pub n: usize,
    pub cap: Vec<Vec<i64>>,
}

/// Random connected undirected graph, integer capacities in `cap_range`.
pub fn random_connected_graph(
    rng: &mut ChaCha8Rng,
    max_nodes: usize,
    cap_range: (i64, i64),
) -> CapMatrix {
    loop {
        let n = rng.gen_range(2..=max_nodes);
        let mut cap = vec![vec![0i64; n]; n];
        // Random spanning tree first, then extra edges.
        for v in 1..n {
            let u = rng.gen_range(0..v);
            let c = rng.gen_range(cap_range.0..=cap_range.1);
            cap[u][v] = c;
            cap[v][u] = c;
        }
        let extra = rng.gen_range(0..=n);
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b || cap[a][b] != 0 {
                continue;
            }
            let c = rng.gen_range(cap_range.0..=cap_range.1);
            cap[a][b] = c;
            cap[b][a] = c;
        }
        return CapMatrix { n, cap };
    }
}

/// Edmonds-Karp max flow over the integer capacity matrix. Independent of
/// the library's solver on purpose: different algorithm, different number
/// representation.
pub fn oracle_max_flow(g: &CapMatrix, s: usize, t: usize) -> i64 {
    let n = g.n;
    let mut residual = g.cap.clone();
    let mut flow = 0i64;
    loop {
        let mut parent = vec![usize::MAX; n];
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if parent[v] == usize::MAX && residual[u][v] > 0 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[t] == usize::MAX {
            return flow;
        }
        let mut bottleneck = i64::MAX;
        let mut v = t;
        while v != s {
            let u = parent[v];
            bottleneck = bottleneck.min(residual[u][v]);
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = parent[v];
            residual[u][v] -= bottleneck;
            residual[v][u] += bottleneck;
            v = u;
        }
        flow += bottleneck;
    }
}

/// Random tiny placement instance: at most `max_nodes` nodes, at most 3
/// vCDNs, every server/client split possible. Small enough for the
/// exhaustive oracle below.
pub fn tiny_scenario(rng: &mut ChaCha8Rng, max_nodes: usize) -> Scenario {
    loop {
        let g = random_connected_graph(rng, max_nodes, (5, 60));
        let n = g.n;
        let n_servers = rng.gen_range(1..n.max(2)).min(n - 1).max(1);
        let mut ids: Vec<u32> = (0..n as u32).collect();
        // Cheap deterministic shuffle.
        for i in (1..ids.len()).rev() {
            ids.swap(i, rng.gen_range(0..=i));
        }
        let server_nodes: Vec<u32> = ids[..n_servers].to_vec();
        let client_nodes: Vec<u32> = ids[n_servers..].to_vec();
        if client_nodes.is_empty() {
            continue;
        }

        let mut links = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if g.cap[a][b] > 0 {
                    links.push(Link {
                        from: NodeId(a as u32),
                        to: NodeId(b as u32),
                        capacity: Rat::int(g.cap[a][b]),
                    });
                    links.push(Link {
                        from: NodeId(b as u32),
                        to: NodeId(a as u32),
                        capacity: Rat::int(g.cap[a][b]),
                    });
                }
            }
        }

        let n_vcdns = rng.gen_range(1..=3usize);
        let vcdns: Vec<Vcdn> = (0..n_vcdns)
            .map(|i| Vcdn {
                id: VcdnId(i as u32),
                size: Rat::int(rng.gen_range(1..=8)),
                origin: NodeId(server_nodes[rng.gen_range(0..server_nodes.len())]),
            })
            .collect();

        let mut demands = Vec::new();
        for f in &vcdns {
            let n_dem = rng.gen_range(0..=2usize.min(client_nodes.len()));
            let mut picked: BTreeSet<u32> = BTreeSet::new();
            for _ in 0..n_dem {
                picked.insert(client_nodes[rng.gen_range(0..client_nodes.len())]);
            }
            for c in picked {
                demands.push(Demand {
                    client: NodeId(c),
                    vcdn: f.id,
                    throughput: Rat::int(rng.gen_range(1..=40)),
                });
            }
        }
        if demands.is_empty() {
            continue;
        }
        demands.sort_by_key(|d| (d.client, d.vcdn));

        let mut servers: Vec<ServerSpec> = server_nodes
            .iter()
            .map(|&node| ServerSpec {
                node: NodeId(node),
                storage_capacity: Rat::int(rng.gen_range(4..=20)),
                stream_capacity: Rat::int(rng.gen_range(20..=90)),
            })
            .collect();
        servers.sort_by_key(|sv| sv.node);

        let mut nodes: Vec<NodeId> = (0..n as u32).map(NodeId).collect();
        nodes.sort();
        let mut client_groups: Vec<NodeId> = client_nodes.iter().map(|&c| NodeId(c)).collect();
        client_groups.sort();

        let scenario = Scenario {
            nodes,
            links,
            servers,
            client_groups,
            vcdns,
            demands,
            cost_policy: MigrationCostPolicy::default(),
        };
        if scenario.validate().is_ok() {
            return scenario;
        }
    }
}

fn bfs_hops(s: &Scenario, from: NodeId) -> BTreeMap<NodeId, u64> {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for l in &s.links {
        adj.entry(l.from).or_default().push(l.to);
    }
    let mut dist = BTreeMap::from([(from, 0u64)]);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for &v in adj.get(&u).into_iter().flatten() {
            dist.entry(v).or_insert_with(|| {
                queue.push_back(v);
                d + 1
            });
        }
    }
    dist
}

/// Default-policy relocation cost recomputed from scratch: size times BFS
/// hop count from the origin, zero at the origin itself.
pub fn oracle_migration_cost(s: &Scenario, server: NodeId, vcdn: VcdnId) -> Rat {
    let f = s.vcdns.iter().find(|f| f.id == vcdn).expect("known vcdn");
    if f.origin == server {
        return Rat::zero();
    }
    let hops = bfs_hops(s, f.origin)[&server];
    f.size * Rat::int(hops as i64)
}

fn simple_paths(s: &Scenario, from: NodeId, to: NodeId) -> Vec<Vec<Arc>> {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for l in &s.links {
        adj.entry(l.from).or_default().push(l.to);
    }
    let mut out = Vec::new();
    let mut stack = vec![from];
    fn walk(
        adj: &BTreeMap<NodeId, Vec<NodeId>>,
        stack: &mut Vec<NodeId>,
        to: NodeId,
        out: &mut Vec<Vec<Arc>>,
    ) {
        let here = *stack.last().unwrap();
        if here == to {
            out.push(stack.windows(2).map(|w| (w[0], w[1])).collect());
            return;
        }
        for &next in adj.get(&here).into_iter().flatten() {
            if stack.contains(&next) {
                continue;
            }
            stack.push(next);
            walk(adj, stack, to, out);
            stack.pop();
        }
    }
    walk(&adj, &mut stack, to, &mut out);
    out
}

/// Exhaustive optimum: every demand-to-server assignment crossed with every
/// joint choice of simple routing paths, constraints checked literally.
/// `None` means no feasible combination exists.
pub fn enumerate_optimum(s: &Scenario) -> Option<Rat> {
    let demands: Vec<&Demand> = s.demands.iter().filter(|d| !d.throughput.is_zero()).collect();
    if demands.is_empty() {
        return Some(Rat::zero());
    }
    let servers: Vec<&ServerSpec> = s.servers.iter().collect();
    let link_cap: BTreeMap<Arc, Rat> =
        s.links.iter().map(|l| ((l.from, l.to), l.capacity)).collect();

    let mut best: Option<Rat> = None;
    let mut assignment = vec![0usize; demands.len()];
    loop {
        // Capacity screen before the expensive routing search.
        let mut stream: BTreeMap<NodeId, Rat> = BTreeMap::new();
        let mut placed: BTreeSet<(NodeId, VcdnId)> = BTreeSet::new();
        for (d, &si) in demands.iter().zip(&assignment) {
            let node = servers[si].node;
            *stream.entry(node).or_insert_with(Rat::zero) += d.throughput;
            placed.insert((node, d.vcdn));
        }
        let stream_ok = servers
            .iter()
            .all(|sv| stream.get(&sv.node).copied().unwrap_or_else(Rat::zero) <= sv.stream_capacity);
        let storage_ok = servers.iter().all(|sv| {
            let used: Rat = placed
                .iter()
                .filter(|&&(node, _)| node == sv.node)
                .map(|&(_, f)| s.vcdns.iter().find(|v| v.id == f).unwrap().size)
                .sum();
            used <= sv.storage_capacity
        });
        if stream_ok && storage_ok {
            let cost: Rat = placed
                .iter()
                .map(|&(node, f)| oracle_migration_cost(s, node, f))
                .sum();
            let improves = best.map_or(true, |b| cost < b);
            if improves && routable(s, &demands, &assignment, &servers, &link_cap) {
                best = Some(cost);
            }
        }

        // Next assignment vector.
        let mut i = 0;
        loop {
            if i == assignment.len() {
                return best;
            }
            assignment[i] += 1;
            if assignment[i] < servers.len() {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

fn routable(
    s: &Scenario,
    demands: &[&Demand],
    assignment: &[usize],
    servers: &[&ServerSpec],
    link_cap: &BTreeMap<Arc, Rat>,
) -> bool {
    fn descend(
        s: &Scenario,
        demands: &[&Demand],
        assignment: &[usize],
        servers: &[&ServerSpec],
        residual: &mut BTreeMap<Arc, Rat>,
        i: usize,
    ) -> bool {
        if i == demands.len() {
            return true;
        }
        let d = demands[i];
        let from = servers[assignment[i]].node;
        for path in simple_paths(s, from, d.client) {
            if path.iter().any(|arc| residual[arc] < d.throughput) {
                continue;
            }
            for arc in &path {
                let r = residual.get_mut(arc).unwrap();
                *r = *r - d.throughput;
            }
            if descend(s, demands, assignment, servers, residual, i + 1) {
                return true;
            }
            for arc in &path {
                let r = residual.get_mut(arc).unwrap();
                *r = *r + d.throughput;
            }
        }
        false
    }
    let mut residual = link_cap.clone();
    descend(s, demands, assignment, servers, &mut residual, 0)
}

/// Constraint audit recomputed from the problem statement; returns the
/// kebab-case names of violated constraint families.
pub fn recompute_failed_families(s: &Scenario, sol: &PlacementSolution) -> BTreeSet<String> {
    let mut failed = BTreeSet::new();
    let demand_of: BTreeMap<(NodeId, VcdnId), Rat> = s
        .demands
        .iter()
        .map(|d| ((d.client, d.vcdn), d.throughput))
        .collect();

    for (&(_, vcdn), &server) in &sol.assignments {
        if !sol.placements.contains(&(server, vcdn)) {
            failed.insert("serving-requires-placement".into());
        }
    }

    for (key, &t) in &demand_of {
        if !t.is_zero() && !sol.assignments.contains_key(key) {
            failed.insert("single-serving-server".into());
        }
    }
    for key in sol.assignments.keys() {
        if demand_of.get(key).map_or(true, |t| t.is_zero()) {
            failed.insert("single-serving-server".into());
        }
    }

    for sv in &s.servers {
        let load: Rat = sol
            .assignments
            .iter()
            .filter(|&(_, &server)| server == sv.node)
            .map(|(key, _)| demand_of.get(key).copied().unwrap_or_else(Rat::zero))
            .sum();
        if load > sv.stream_capacity {
            failed.insert("stream-capacity".into());
        }
        let stored: Rat = sol
            .placements
            .iter()
            .filter(|&&(node, _)| node == sv.node)
            .map(|&(_, f)| s.vcdns.iter().find(|v| v.id == f).unwrap().size)
            .sum();
        if stored > sv.storage_capacity {
            failed.insert("storage-capacity".into());
        }
    }

    for (&(client, vcdn), &server) in &sol.assignments {
        let ok = sol.routes.get(&(client, vcdn)).is_some_and(|path| {
            !path.is_empty()
                && path[0].0 == server
                && path.last().unwrap().1 == client
                && path.windows(2).all(|w| w[0].1 == w[1].0)
                && {
                    let mut seen = BTreeSet::from([path[0].0]);
                    path.iter().all(|&(_, to)| seen.insert(to))
                }
        });
        if !ok {
            failed.insert("route-conservation".into());
        }
    }

    let link_cap: BTreeMap<Arc, Rat> =
        s.links.iter().map(|l| ((l.from, l.to), l.capacity)).collect();
    let mut load: BTreeMap<Arc, Rat> = BTreeMap::new();
    for (key, path) in &sol.routes {
        let t = demand_of.get(key).copied().unwrap_or_else(Rat::zero);
        for &arc in path {
            *load.entry(arc).or_insert_with(Rat::zero) += t;
        }
    }
    for (arc, used) in &load {
        match link_cap.get(arc) {
            None => {
                failed.insert("link-capacity".into());
            }
            Some(cap) if used > cap => {
                failed.insert("link-capacity".into());
            }
            Some(_) => {}
        }
    }

    failed
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
