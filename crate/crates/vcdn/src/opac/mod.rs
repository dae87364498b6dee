//! Exact placement/migration solver: branch-and-bound over server
//! assignments with exhaustive routing, returning a provably minimal
//! migration cost.
//!
//! The search assigns each positive demand to a serving server and commits a
//! concrete routing path before descending, so every leaf is feasible by
//! construction. Candidate servers are visited in order of added cost and the
//! running cost plus an optimistic completion bound prunes against the
//! incumbent, which makes the first-found optimum deterministic.

mod feasibility;
mod solve;

pub use feasibility::{
    check_feasibility, check_feasibility_with, CapacityView, ConstraintFamily, FamilyAudit,
    FeasibilityError, FeasibilityReport,
};
pub use solve::{solve_exact, Limits, SolveOutcome};

use std::collections::BTreeMap;

use crate::model::{NodeId, Scenario};
use crate::rat::Rat;
use crate::solution::{Arc, PlacementSolution};

/// Total migration cost of a solution's placements under the scenario's
/// cost policy.
pub fn objective_value(s: &Scenario, sol: &PlacementSolution) -> Rat {
    sol.placements
        .iter()
        .map(|&(server, vcdn)| s.migration_cost(server, vcdn))
        .sum()
}

/// Minimum-hop path from `from` to `to` over positive-capacity links,
/// maximizing the bottleneck among min-hop paths. Ties resolve toward the
/// smallest predecessor id, so the result is deterministic.
pub fn widest_min_hop_path(s: &Scenario, from: NodeId, to: NodeId) -> Option<Vec<Arc>> {
    if from == to {
        return Some(Vec::new());
    }
    let mut out_adj: BTreeMap<NodeId, Vec<(NodeId, Rat)>> = BTreeMap::new();
    for l in &s.links {
        if l.capacity > Rat::zero() {
            out_adj.entry(l.from).or_default().push((l.to, l.capacity));
        }
    }
    let mut dist: BTreeMap<NodeId, u32> = BTreeMap::from([(from, 0)]);
    let mut order = vec![from];
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &(v, _) in out_adj.get(&u).map(|v| v.as_slice()).unwrap_or_default() {
            if !dist.contains_key(&v) {
                dist.insert(v, dist[&u] + 1);
                order.push(v);
            }
        }
    }
    dist.get(&to)?;
    // Widest-path DP over the min-hop layering; `best[v]` is the widest
    // bottleneck among min-hop from-v paths, with its chosen predecessor.
    let mut best: BTreeMap<NodeId, (Rat, Option<NodeId>)> = BTreeMap::new();
    best.insert(from, (Rat::int(i64::MAX), None));
    for &u in &order {
        let Some(&(bu, _)) = best.get(&u) else { continue };
        for &(v, cap) in out_adj.get(&u).map(|v| v.as_slice()).unwrap_or_default() {
            if dist[&v] != dist[&u] + 1 {
                continue;
            }
            let bottleneck = bu.min(cap);
            let better = match best.get(&v) {
                None => true,
                Some(&(bv, prev)) => {
                    bottleneck > bv || (bottleneck == bv && prev.map_or(false, |p| u < p))
                }
            };
            if better {
                best.insert(v, (bottleneck, Some(u)));
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while let Some(&(_, Some(prev))) = best.get(&cur) {
        path.push((prev, cur));
        cur = prev;
    }
    if cur != from {
        return None;
    }
    path.reverse();
    Some(path)
}
