//! Max-flow/min-cut engine on capacitated graphs, plus minimum Steiner cut
//! and node contraction.
//!
//! Capacities are exact rationals, so the max-flow/min-cut equality holds
//! bit-exactly. A `FlowGraph` is immutable per query; independent queries may
//! run concurrently on a shared graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::NodeId;
use crate::rat::Rat;

#[derive(Debug, thiserror::Error)]
pub enum FlowError {
    #[error("node {0} is not in the graph")]
    MissingNode(NodeId),
    #[error("source and sink must differ")]
    SameEndpoints,
    #[error("steiner set must contain at least two nodes")]
    SteinerTooSmall,
    #[error("cannot contract an empty node group")]
    EmptyGroup,
}

/// Directed capacitated graph. Parallel arcs are merged by summing capacity.
#[derive(Debug, Clone, Default)]
pub struct FlowGraph {
    nodes: BTreeSet<NodeId>,
    arcs: BTreeMap<(NodeId, NodeId), Rat>,
}

/// A two-sided node partition with its crossing capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub side_a: BTreeSet<NodeId>,
    pub side_b: BTreeSet<NodeId>,
    pub capacity: Rat,
}

impl FlowGraph {
    pub fn new() -> Self {
        FlowGraph::default()
    }

    pub fn add_node(&mut self, n: NodeId) {
        self.nodes.insert(n);
    }

    pub fn add_arc(&mut self, from: NodeId, to: NodeId, capacity: Rat) {
        assert!(!capacity.is_negative(), "arc capacity must be nonnegative");
        self.nodes.insert(from);
        self.nodes.insert(to);
        if from == to {
            return; // self-loops never cross a cut
        }
        *self.arcs.entry((from, to)).or_insert_with(Rat::zero) += capacity;
    }

    /// Adds an undirected edge as a symmetric arc pair.
    pub fn add_undirected(&mut self, a: NodeId, b: NodeId, capacity: Rat) {
        self.add_arc(a, b, capacity);
        self.add_arc(b, a, capacity);
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn arc_capacity(&self, from: NodeId, to: NodeId) -> Rat {
        self.arcs.get(&(from, to)).copied().unwrap_or_else(Rat::zero)
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.nodes.first() else { return true };
        let adj = self.undirected_adjacency();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in adj.get(&u).map(|v| v.as_slice()).unwrap_or_default() {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        seen.len() == self.nodes.len()
    }

    fn undirected_adjacency(&self) -> BTreeMap<NodeId, Vec<(NodeId, Rat)>> {
        let mut adj: BTreeMap<NodeId, Vec<(NodeId, Rat)>> =
            self.nodes.iter().map(|&n| (n, Vec::new())).collect();
        let mut undirected: BTreeMap<(NodeId, NodeId), Rat> = BTreeMap::new();
        for (&(a, b), &c) in &self.arcs {
            let key = if a < b { (a, b) } else { (b, a) };
            *undirected.entry(key).or_insert_with(Rat::zero) += c;
        }
        for (&(a, b), &c) in &undirected {
            adj.get_mut(&a).unwrap().push((b, c));
            adj.get_mut(&b).unwrap().push((a, c));
        }
        adj
    }

    /// Maximum s-t flow and a minimum s-t cut certifying it (Dinic).
    pub fn max_flow(&self, s: NodeId, t: NodeId) -> Result<(Rat, Cut), FlowError> {
        if !self.contains(s) {
            return Err(FlowError::MissingNode(s));
        }
        if !self.contains(t) {
            return Err(FlowError::MissingNode(t));
        }
        if s == t {
            return Err(FlowError::SameEndpoints);
        }
        let mut dinic = Dinic::new(self);
        let value = dinic.run(s, t);
        let side_a = dinic.residual_reachable(s);
        let side_b: BTreeSet<NodeId> = self.nodes.difference(&side_a).copied().collect();
        let capacity = self.crossing_capacity(&side_a, &side_b);
        debug_assert_eq!(capacity, value);
        Ok((value, Cut { side_a, side_b, capacity }))
    }

    /// Sum of arc capacities from `a` into `b`.
    pub fn crossing_capacity(&self, a: &BTreeSet<NodeId>, b: &BTreeSet<NodeId>) -> Rat {
        self.arcs
            .iter()
            .filter(|((from, to), _)| a.contains(from) && b.contains(to))
            .map(|(_, &c)| c)
            .sum()
    }

    /// Minimum-capacity cut splitting `steiner` into two nonempty parts.
    ///
    /// Computed as the minimum over max-flows from the smallest Steiner
    /// terminal to each of the others; ties keep the earliest terminal, so the
    /// result is deterministic.
    pub fn min_steiner_cut(
        &self,
        steiner: &BTreeSet<NodeId>,
    ) -> Result<(BTreeSet<NodeId>, BTreeSet<NodeId>, Rat), FlowError> {
        if steiner.len() < 2 {
            return Err(FlowError::SteinerTooSmall);
        }
        for &n in steiner {
            if !self.contains(n) {
                return Err(FlowError::MissingNode(n));
            }
        }
        let mut terminals = steiner.iter().copied();
        let root = terminals.next().expect("len >= 2");
        let mut best: Option<(Rat, Cut)> = None;
        for t in terminals {
            let (value, cut) = self.max_flow(root, t)?;
            if best.as_ref().map_or(true, |(v, _)| value < *v) {
                best = Some((value, cut));
            }
        }
        let (value, cut) = best.expect("at least one terminal pair");
        Ok((cut.side_a, cut.side_b, value))
    }

    /// Merges `group` into a single super-node labeled by its smallest
    /// member. Parallel capacities sum; self-loops vanish.
    pub fn contract(&self, group: &BTreeSet<NodeId>) -> Result<FlowGraph, FlowError> {
        let Some(&label) = group.first() else {
            return Err(FlowError::EmptyGroup);
        };
        for &n in group {
            if !self.contains(n) {
                return Err(FlowError::MissingNode(n));
            }
        }
        let rename = |n: NodeId| if group.contains(&n) { label } else { n };
        let mut out = FlowGraph::new();
        for &n in &self.nodes {
            out.add_node(rename(n));
        }
        for (&(a, b), &c) in &self.arcs {
            out.add_arc(rename(a), rename(b), c);
        }
        Ok(out)
    }
}

/// Dinic's algorithm over the arc list of a `FlowGraph`.
struct Dinic {
    ids: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    edges: Vec<DinicEdge>,
    head: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

struct DinicEdge {
    to: usize,
    cap: Rat,
    rev: usize,
}

impl Dinic {
    fn new(g: &FlowGraph) -> Self {
        let ids: Vec<NodeId> = g.nodes.iter().copied().collect();
        let index: BTreeMap<NodeId, usize> =
            ids.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut d = Dinic {
            head: vec![Vec::new(); ids.len()],
            level: vec![-1; ids.len()],
            iter: vec![0; ids.len()],
            edges: Vec::with_capacity(2 * g.arcs.len()),
            ids,
            index,
        };
        for (&(a, b), &c) in &g.arcs {
            let (u, v) = (d.index[&a], d.index[&b]);
            let e = d.edges.len();
            d.edges.push(DinicEdge { to: v, cap: c, rev: e + 1 });
            d.edges.push(DinicEdge { to: u, cap: Rat::zero(), rev: e });
            d.head[u].push(e);
            d.head[v].push(e + 1);
        }
        d
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let edge = &self.edges[e];
                if !edge.cap.is_zero() && self.level[edge.to] < 0 {
                    self.level[edge.to] = self.level[u] + 1;
                    queue.push_back(edge.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: Option<Rat>) -> Option<Rat> {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.head[u].len() {
            let e = self.head[u][self.iter[u]];
            let (to, cap) = (self.edges[e].to, self.edges[e].cap);
            if !cap.is_zero() && self.level[to] == self.level[u] + 1 {
                let limit = match pushed {
                    Some(p) => Some(p.min(cap)),
                    None => Some(cap),
                };
                if let Some(flow) = self.dfs(to, t, limit) {
                    self.edges[e].cap -= flow;
                    let rev = self.edges[e].rev;
                    self.edges[rev].cap += flow;
                    return Some(flow);
                }
            }
            self.iter[u] += 1;
        }
        None
    }

    fn run(&mut self, s: NodeId, t: NodeId) -> Rat {
        let (s, t) = (self.index[&s], self.index[&t]);
        let mut total = Rat::zero();
        while self.bfs(s, t) {
            self.iter.fill(0);
            while let Some(flow) = self.dfs(s, t, None) {
                total += flow;
            }
        }
        total
    }

    /// Nodes reachable from `s` in the residual graph after `run`.
    fn residual_reachable(&self, s: NodeId) -> BTreeSet<NodeId> {
        let s = self.index[&s];
        let mut seen = vec![false; self.ids.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let edge = &self.edges[e];
                if !edge.cap.is_zero() && !seen[edge.to] {
                    seen[edge.to] = true;
                    queue.push_back(edge.to);
                }
            }
        }
        self.ids
            .iter()
            .enumerate()
            .filter(|&(i, _)| seen[i])
            .map(|(_, &n)| n)
            .collect()
    }
}
