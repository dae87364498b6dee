//! Gomory-Hu tree construction by repeated minimum Steiner cuts, plus
//! min-cut and path queries on the resulting tree.
//!
//! The builder maintains a partition tree whose vertices are node sets. A
//! FIFO queue holds the sets still to be split; splitting a set runs a
//! minimum Steiner cut on the graph with every neighboring subtree contracted
//! to a super-node. Exactly |V|-1 cuts are computed in total.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::flow::{FlowError, FlowGraph};
use crate::model::NodeId;
use crate::rat::Rat;

#[derive(Debug, thiserror::Error)]
pub enum GhError {
    #[error("gomory-hu requires a connected graph")]
    Disconnected,
    #[error("gomory-hu requires at least one node")]
    Empty,
    #[error("node {0} is not in the tree")]
    MissingNode(NodeId),
    #[error("query endpoints must differ")]
    SameEndpoints,
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Weighted tree edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeEdge {
    pub a: NodeId,
    pub b: NodeId,
    pub capacity: Rat,
}

/// Capacitated tree on the source graph's nodes; the bottleneck of the unique
/// a-b tree path equals the a-b min cut of the source graph.
#[derive(Debug, Clone)]
pub struct GomoryHuTree {
    nodes: BTreeSet<NodeId>,
    edges: Vec<TreeEdge>,
    adj: BTreeMap<NodeId, Vec<(NodeId, Rat)>>,
    steiner_cuts: usize,
}

impl GomoryHuTree {
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    /// Number of Steiner-cut computations performed during construction.
    pub fn steiner_cut_count(&self) -> usize {
        self.steiner_cuts
    }

    /// Minimum edge capacity on the unique a-b tree path.
    pub fn tree_min_cut(&self, a: NodeId, b: NodeId) -> Result<Rat, GhError> {
        let path = self.tree_path(a, b)?;
        Ok(path
            .iter()
            .map(|e| e.capacity)
            .fold(None, |acc: Option<Rat>, c| {
                Some(acc.map_or(c, |a| a.min(c)))
            })
            .expect("path between distinct nodes is nonempty"))
    }

    /// The unique simple path from `a` to `b` as an ordered edge list.
    pub fn tree_path(&self, a: NodeId, b: NodeId) -> Result<Vec<TreeEdge>, GhError> {
        if !self.contains(a) {
            return Err(GhError::MissingNode(a));
        }
        if !self.contains(b) {
            return Err(GhError::MissingNode(b));
        }
        if a == b {
            return Err(GhError::SameEndpoints);
        }
        // BFS back-pointers from a.
        let mut prev: BTreeMap<NodeId, (NodeId, Rat)> = BTreeMap::new();
        let mut queue = VecDeque::from([a]);
        let mut seen = BTreeSet::from([a]);
        'bfs: while let Some(u) = queue.pop_front() {
            for &(v, c) in &self.adj[&u] {
                if seen.insert(v) {
                    prev.insert(v, (u, c));
                    if v == b {
                        break 'bfs;
                    }
                    queue.push_back(v);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = b;
        while cur != a {
            let (p, c) = prev[&cur];
            path.push(TreeEdge { a: p, b: cur, capacity: c });
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Ordered node sequence of the unique a-b path, endpoints included.
    pub fn path_nodes(&self, a: NodeId, b: NodeId) -> Result<Vec<NodeId>, GhError> {
        let path = self.tree_path(a, b)?;
        let mut nodes = vec![a];
        nodes.extend(path.iter().map(|e| e.b));
        Ok(nodes)
    }

    /// Edge-list text export, one `a b capacity` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.a, e.b, e.capacity).unwrap();
        }
        out
    }
}

/// Builds the Gomory-Hu tree of a connected graph.
pub fn gomory_hu(g: &FlowGraph) -> Result<GomoryHuTree, GhError> {
    if g.node_count() == 0 {
        return Err(GhError::Empty);
    }
    if !g.is_connected() {
        return Err(GhError::Disconnected);
    }

    // Partition tree: vertex i holds a node set; `tree_adj[i]` lists
    // (neighbor vertex, edge capacity).
    let mut sets: Vec<BTreeSet<NodeId>> = vec![g.nodes().collect()];
    let mut tree_adj: Vec<Vec<(usize, Rat)>> = vec![Vec::new()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    if sets[0].len() > 1 {
        queue.push_back(0);
    }
    let mut steiner_cuts = 0usize;

    while let Some(v) = queue.pop_front() {
        let members = sets[v].clone();

        // Contract each neighboring subtree into a super-node.
        let mut contracted = g.clone();
        let mut super_of: Vec<(usize, NodeId)> = Vec::new();
        for &(nb, _) in &tree_adj[v] {
            let subtree = collect_subtree(&sets, &tree_adj, nb, v);
            let label = *subtree.first().expect("subtree is nonempty");
            contracted = contracted.contract(&subtree)?;
            super_of.push((nb, label));
        }

        let (side_a, _side_b, lambda) = contracted.min_steiner_cut(&members)?;
        steiner_cuts += 1;
        let s1: BTreeSet<NodeId> = members.intersection(&side_a).copied().collect();
        let s2: BTreeSet<NodeId> = members.difference(&s1).copied().collect();
        debug_assert!(!s1.is_empty() && !s2.is_empty());

        // Replace v by the s1 part and append a new vertex for s2.
        let w = sets.len();
        sets[v] = s1;
        sets.push(s2);
        tree_adj.push(Vec::new());

        // Re-attach v's former edges to whichever side their super-node
        // landed on.
        let old_edges = std::mem::take(&mut tree_adj[v]);
        for (nb, cap) in old_edges {
            let label = super_of
                .iter()
                .find(|&&(x, _)| x == nb)
                .map(|&(_, l)| l)
                .expect("neighbor was contracted");
            let target = if side_a.contains(&label) { v } else { w };
            tree_adj[target].push((nb, cap));
            for entry in tree_adj[nb].iter_mut() {
                if entry.0 == v {
                    entry.0 = target;
                }
            }
        }
        tree_adj[v].push((w, lambda));
        tree_adj[w].push((v, lambda));

        if sets[v].len() > 1 {
            queue.push_back(v);
        }
        if sets[w].len() > 1 {
            queue.push_back(w);
        }
    }

    // All sets are singletons now; translate to a node-level tree.
    let node_of: Vec<NodeId> = sets
        .iter()
        .map(|s| *s.first().expect("singleton set"))
        .collect();
    let mut edges = Vec::new();
    let mut adj: BTreeMap<NodeId, Vec<(NodeId, Rat)>> =
        node_of.iter().map(|&n| (n, Vec::new())).collect();
    for (i, neighbors) in tree_adj.iter().enumerate() {
        for &(j, cap) in neighbors {
            if i < j {
                edges.push(TreeEdge { a: node_of[i], b: node_of[j], capacity: cap });
            }
        }
    }
    edges.sort_by_key(|e| (e.a, e.b));
    for e in &edges {
        adj.get_mut(&e.a).unwrap().push((e.b, e.capacity));
        adj.get_mut(&e.b).unwrap().push((e.a, e.capacity));
    }
    for list in adj.values_mut() {
        list.sort_by_key(|&(n, _)| n);
    }

    Ok(GomoryHuTree { nodes: node_of.into_iter().collect(), edges, adj, steiner_cuts })
}

fn collect_subtree(
    sets: &[BTreeSet<NodeId>],
    tree_adj: &[Vec<(usize, Rat)>],
    root: usize,
    banned: usize,
) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(root, banned)];
    while let Some((v, parent)) = stack.pop() {
        out.extend(sets[v].iter().copied());
        for &(nb, _) in &tree_adj[v] {
            if nb != parent {
                stack.push((nb, v));
            }
        }
    }
    out
}
