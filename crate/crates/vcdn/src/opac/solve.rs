//! Branch-and-bound search for the exact solver.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use crate::model::{Demand, NodeId, Scenario, VcdnId};
use crate::rat::Rat;
use crate::solution::{Arc, PlacementSolution};

use super::widest_min_hop_path;

/// Search budgets. The solver checks elapsed time and explored node count
/// and stops with its best incumbent when either is exhausted.
#[derive(Debug, Clone)]
pub struct Limits {
    pub time_budget: Duration,
    pub node_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { time_budget: Duration::from_secs(60), node_budget: u64::MAX }
    }
}

#[derive(Debug, Clone)]
pub enum SolveOutcome {
    /// Provably minimal migration cost.
    Solved(PlacementSolution),
    /// No assignment satisfies all constraints.
    Infeasible,
    /// Budget ran out before the search space was exhausted.
    BudgetExceeded { incumbent: Option<PlacementSolution>, lower_bound: Rat },
}

pub fn solve_exact(s: &Scenario, limits: &Limits) -> SolveOutcome {
    let mut search = Search::new(s, limits);
    let root_bound = search.completion_bound(0).unwrap_or_else(Rat::zero);
    search.descend(0);
    let incumbent = search.incumbent.take();
    if search.budget_hit {
        return SolveOutcome::BudgetExceeded {
            incumbent: incumbent.map(|inc| build_solution(s, &inc)),
            lower_bound: root_bound,
        };
    }
    match incumbent {
        Some(inc) => SolveOutcome::Solved(build_solution(s, &inc)),
        None => SolveOutcome::Infeasible,
    }
}

struct Incumbent {
    cost: Rat,
    open: BTreeSet<(NodeId, VcdnId)>,
    choices: Vec<(NodeId, Vec<Arc>)>,
}

struct Search<'a> {
    scenario: &'a Scenario,
    demands: Vec<Demand>,
    servers: Vec<NodeId>,
    cost_of: BTreeMap<(NodeId, VcdnId), Rat>,
    out_adj: BTreeMap<NodeId, Vec<NodeId>>,
    residual: BTreeMap<Arc, Rat>,
    stream_left: BTreeMap<NodeId, Rat>,
    storage_left: BTreeMap<NodeId, Rat>,
    open: BTreeSet<(NodeId, VcdnId)>,
    choices: Vec<(NodeId, Vec<Arc>)>,
    cost: Rat,
    incumbent: Option<Incumbent>,
    deadline: Instant,
    node_budget: u64,
    nodes: u64,
    budget_hit: bool,
}

impl<'a> Search<'a> {
    fn new(s: &'a Scenario, limits: &Limits) -> Self {
        let mut demands: Vec<Demand> =
            s.positive_demands().cloned().collect();
        // Largest demands first; deterministic tie-break.
        demands.sort_by(|a, b| {
            b.throughput
                .cmp(&a.throughput)
                .then(a.client.cmp(&b.client))
                .then(a.vcdn.cmp(&b.vcdn))
        });
        let servers: Vec<NodeId> = s.servers.iter().map(|sv| sv.node).collect();
        let mut cost_of = BTreeMap::new();
        for &server in &servers {
            for f in &s.vcdns {
                cost_of.insert((server, f.id), s.migration_cost(server, f.id));
            }
        }
        let mut out_adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        let mut residual = BTreeMap::new();
        for l in &s.links {
            if l.capacity > Rat::zero() {
                out_adj.entry(l.from).or_default().push(l.to);
                residual.insert((l.from, l.to), l.capacity);
            }
        }
        for list in out_adj.values_mut() {
            list.sort();
        }
        Search {
            scenario: s,
            demands,
            servers,
            cost_of,
            out_adj,
            residual,
            stream_left: s.servers.iter().map(|sv| (sv.node, sv.stream_capacity)).collect(),
            storage_left: s.servers.iter().map(|sv| (sv.node, sv.storage_capacity)).collect(),
            open: BTreeSet::new(),
            choices: Vec::new(),
            cost: Rat::zero(),
            incumbent: None,
            deadline: Instant::now() + limits.time_budget,
            node_budget: limits.node_budget,
            nodes: 0,
            budget_hit: false,
        }
    }

    fn over_budget(&mut self) -> bool {
        if self.budget_hit {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.node_budget
            || (self.nodes % 1024 == 0 && Instant::now() >= self.deadline)
        {
            self.budget_hit = true;
        }
        self.budget_hit
    }

    /// Optimistic bound on the cost still needed to serve demands from
    /// `depth` on: a vCDN whose open placements cannot absorb the remaining
    /// throughput needs at least one more placement, at no less than the
    /// cheapest unopened one. `None` means the subtree is infeasible.
    fn completion_bound(&self, depth: usize) -> Option<Rat> {
        let mut remaining: BTreeMap<VcdnId, Rat> = BTreeMap::new();
        for d in &self.demands[depth..] {
            *remaining.entry(d.vcdn).or_insert_with(Rat::zero) += d.throughput;
        }
        let mut bound = Rat::zero();
        for (&vcdn, &needed) in &remaining {
            let open_capacity: Rat = self
                .servers
                .iter()
                .filter(|&&sv| self.open.contains(&(sv, vcdn)))
                .map(|sv| self.stream_left[sv])
                .sum();
            if open_capacity >= needed {
                continue;
            }
            let vcdn_size = self.scenario.vcdn(vcdn).expect("known vcdn").size;
            let cheapest = self
                .servers
                .iter()
                .filter(|&&sv| {
                    !self.open.contains(&(sv, vcdn)) && self.storage_left[&sv] >= vcdn_size
                })
                .map(|&sv| self.cost_of[&(sv, vcdn)])
                .min();
            match cheapest {
                Some(c) => bound += c,
                None => return None,
            }
        }
        Some(bound)
    }

    fn beats_incumbent(&self, cost: Rat) -> bool {
        self.incumbent.as_ref().map_or(true, |inc| cost < inc.cost)
    }

    fn descend(&mut self, depth: usize) {
        if self.over_budget() {
            return;
        }
        if depth == self.demands.len() {
            if self.beats_incumbent(self.cost) {
                self.incumbent = Some(Incumbent {
                    cost: self.cost,
                    open: self.open.clone(),
                    choices: self.choices.clone(),
                });
            }
            return;
        }
        let Some(lb) = self.completion_bound(depth) else { return };
        if !self.beats_incumbent(self.cost + lb) {
            return;
        }
        let demand = self.demands[depth].clone();
        let vcdn_size = self.scenario.vcdn(demand.vcdn).expect("known vcdn").size;

        // Candidate servers ordered by (added opening cost, id).
        let mut candidates: Vec<(Rat, NodeId, bool)> = Vec::new();
        for &server in &self.servers {
            if self.stream_left[&server] < demand.throughput {
                continue;
            }
            let already_open = self.open.contains(&(server, demand.vcdn));
            if !already_open && self.storage_left[&server] < vcdn_size {
                continue;
            }
            let added = if already_open {
                Rat::zero()
            } else {
                self.cost_of[&(server, demand.vcdn)]
            };
            candidates.push((added, server, already_open));
        }
        candidates.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));

        for (added, server, already_open) in candidates {
            if self.budget_hit {
                return;
            }
            if !self.beats_incumbent(self.cost + added) {
                continue;
            }
            *self.stream_left.get_mut(&server).unwrap() -= demand.throughput;
            if !already_open {
                *self.storage_left.get_mut(&server).unwrap() -= vcdn_size;
                self.open.insert((server, demand.vcdn));
                self.cost += added;
            }
            let mut visited = BTreeSet::from([server]);
            let mut prefix = Vec::new();
            self.route_and_descend(depth, &demand, server, server, &mut visited, &mut prefix);
            if !already_open {
                *self.storage_left.get_mut(&server).unwrap() += vcdn_size;
                self.open.remove(&(server, demand.vcdn));
                self.cost -= added;
            }
            *self.stream_left.get_mut(&server).unwrap() += demand.throughput;
        }
    }

    /// Enumerates simple paths from the serving server to the client over
    /// residual capacity, committing each and descending to the next demand.
    fn route_and_descend(
        &mut self,
        depth: usize,
        demand: &Demand,
        server: NodeId,
        at: NodeId,
        visited: &mut BTreeSet<NodeId>,
        prefix: &mut Vec<Arc>,
    ) {
        if self.over_budget() {
            return;
        }
        if at == demand.client {
            self.choices.push((server, prefix.clone()));
            self.descend(depth + 1);
            self.choices.pop();
            return;
        }
        let neighbors = self
            .out_adj
            .get(&at)
            .map(|v| v.clone())
            .unwrap_or_default();
        for next in neighbors {
            if visited.contains(&next) {
                continue;
            }
            if self.residual[&(at, next)] < demand.throughput {
                continue;
            }
            *self.residual.get_mut(&(at, next)).unwrap() -= demand.throughput;
            visited.insert(next);
            prefix.push((at, next));
            self.route_and_descend(depth, demand, server, next, visited, prefix);
            prefix.pop();
            visited.remove(&next);
            *self.residual.get_mut(&(at, next)).unwrap() += demand.throughput;
        }
    }
}

fn build_solution(s: &Scenario, inc: &Incumbent) -> PlacementSolution {
    let mut sol = PlacementSolution {
        placements: inc.open.clone(),
        ..PlacementSolution::default()
    };
    let mut demands: Vec<Demand> = s.positive_demands().cloned().collect();
    demands.sort_by(|a, b| {
        b.throughput
            .cmp(&a.throughput)
            .then(a.client.cmp(&b.client))
            .then(a.vcdn.cmp(&b.vcdn))
    });
    for (d, (server, path)) in demands.iter().zip(&inc.choices) {
        sol.assignments.insert((d.client, d.vcdn), *server);
        sol.routes.insert((d.client, d.vcdn), path.clone());
    }
    for &(server, vcdn) in &inc.open {
        let origin = s.vcdn(vcdn).expect("known vcdn").origin;
        if server != origin {
            let path = widest_min_hop_path(s, origin, server)
                .expect("placement reachable in a connected scenario");
            sol.migration_paths.insert((server, vcdn), path);
        }
    }
    sol.objective = inc.cost;
    sol
}
