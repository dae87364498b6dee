//! Per-constraint audit of a candidate solution.
//!
//! Each constraint family of the placement model is re-evaluated literally
//! against the scenario; the report lists every violated instance. OPAC
//! solutions are audited against the directed link capacities, HPAC solutions
//! against the capacities of the Gomory-Hu tree they were planned on.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ghtree::GomoryHuTree;
use crate::model::{NodeId, Scenario, VcdnId};
use crate::rat::Rat;
use crate::solution::{Arc, PlacementSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConstraintFamily {
    /// A demand may only be served from a server that hosts the vCDN.
    ServingRequiresPlacement,
    /// Every positive demand is served by exactly one server.
    SingleServingServer,
    /// Per-server streaming load within the server's throughput capacity.
    StreamCapacity,
    /// Per-server hosted vCDN sizes within the server's storage capacity.
    StorageCapacity,
    /// Each served demand has a coherent routing path from its server to
    /// the client.
    RouteConservation,
    /// Aggregate routed throughput within each link's capacity.
    LinkCapacity,
}

impl ConstraintFamily {
    pub const ALL: [ConstraintFamily; 6] = [
        ConstraintFamily::ServingRequiresPlacement,
        ConstraintFamily::SingleServingServer,
        ConstraintFamily::StreamCapacity,
        ConstraintFamily::StorageCapacity,
        ConstraintFamily::RouteConservation,
        ConstraintFamily::LinkCapacity,
    ];
}

impl fmt::Display for ConstraintFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ConstraintFamily::ServingRequiresPlacement => "serving-requires-placement",
            ConstraintFamily::SingleServingServer => "single-serving-server",
            ConstraintFamily::StreamCapacity => "stream-capacity",
            ConstraintFamily::StorageCapacity => "storage-capacity",
            ConstraintFamily::RouteConservation => "route-conservation",
            ConstraintFamily::LinkCapacity => "link-capacity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone)]
pub struct FamilyAudit {
    pub family: ConstraintFamily,
    pub violations: Vec<String>,
}

impl FamilyAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub families: Vec<FamilyAudit>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.families.iter().all(FamilyAudit::passed)
    }

    pub fn family(&self, family: ConstraintFamily) -> &FamilyAudit {
        self.families
            .iter()
            .find(|a| a.family == family)
            .expect("report covers every family")
    }

    pub fn failed_families(&self) -> BTreeSet<ConstraintFamily> {
        self.families
            .iter()
            .filter(|a| !a.passed())
            .map(|a| a.family)
            .collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FeasibilityError {
    #[error("solution references unknown entity: {0}")]
    DanglingReference(String),
}

/// The capacity model routes are audited against.
pub enum CapacityView<'a> {
    /// The scenario's directed links; per-direction capacities.
    ScenarioLinks,
    /// Gomory-Hu tree edges; each edge's capacity is one pool shared by both
    /// directions.
    Tree(&'a GomoryHuTree),
}

pub fn check_feasibility(
    s: &Scenario,
    sol: &PlacementSolution,
) -> Result<FeasibilityReport, FeasibilityError> {
    check_feasibility_with(s, sol, &CapacityView::ScenarioLinks)
}

pub fn check_feasibility_with(
    s: &Scenario,
    sol: &PlacementSolution,
    view: &CapacityView<'_>,
) -> Result<FeasibilityReport, FeasibilityError> {
    verify_references(s, sol)?;
    let mut report = FeasibilityReport {
        families: ConstraintFamily::ALL
            .iter()
            .map(|&family| FamilyAudit { family, violations: Vec::new() })
            .collect(),
    };
    fn violations(
        report: &mut FeasibilityReport,
        family: ConstraintFamily,
    ) -> &mut Vec<String> {
        &mut report
            .families
            .iter_mut()
            .find(|a| a.family == family)
            .unwrap()
            .violations
    }

    let demand_of: BTreeMap<(NodeId, VcdnId), Rat> = s
        .demands
        .iter()
        .map(|d| ((d.client, d.vcdn), d.throughput))
        .collect();

    // Serving requires placement.
    for (&(client, vcdn), &server) in &sol.assignments {
        if !sol.has_placement(server, vcdn) {
            violations(&mut report, ConstraintFamily::ServingRequiresPlacement).push(format!(
                "client {client} served vcdn {vcdn} from server {server} which does not host it"
            ));
        }
    }

    // Exactly one serving server per positive demand; no stray assignments.
    for d in s.positive_demands() {
        if !sol.assignments.contains_key(&(d.client, d.vcdn)) {
            violations(&mut report, ConstraintFamily::SingleServingServer).push(format!(
                "demand (client {}, vcdn {}) has no serving server",
                d.client, d.vcdn
            ));
        }
    }
    for &(client, vcdn) in sol.assignments.keys() {
        let demanded = demand_of
            .get(&(client, vcdn))
            .map(|t| !t.is_zero())
            .unwrap_or(false);
        if !demanded {
            violations(&mut report, ConstraintFamily::SingleServingServer).push(format!(
                "assignment for (client {client}, vcdn {vcdn}) without a positive demand"
            ));
        }
    }

    // Streaming capacity per server.
    let mut stream_load: BTreeMap<NodeId, Rat> = BTreeMap::new();
    for (&(client, vcdn), &server) in &sol.assignments {
        let t = demand_of.get(&(client, vcdn)).copied().unwrap_or_else(Rat::zero);
        *stream_load.entry(server).or_insert_with(Rat::zero) += t;
    }
    for server in &s.servers {
        let load = stream_load.get(&server.node).copied().unwrap_or_else(Rat::zero);
        if load > server.stream_capacity {
            violations(&mut report, ConstraintFamily::StreamCapacity).push(format!(
                "server {} streams {} Mbps over capacity {}",
                server.node, load, server.stream_capacity
            ));
        }
    }

    // Storage capacity per server.
    for server in &s.servers {
        let used: Rat = sol
            .placements
            .iter()
            .filter(|&&(node, _)| node == server.node)
            .map(|&(_, vcdn)| s.vcdn(vcdn).expect("validated reference").size)
            .sum();
        if used > server.storage_capacity {
            violations(&mut report, ConstraintFamily::StorageCapacity).push(format!(
                "server {} stores {} GB over capacity {}",
                server.node, used, server.storage_capacity
            ));
        }
    }

    // Route conservation: each served demand follows one simple path from
    // its serving server to the client.
    for (&(client, vcdn), &server) in &sol.assignments {
        let Some(path) = sol.routes.get(&(client, vcdn)) else {
            violations(&mut report, ConstraintFamily::RouteConservation).push(format!(
                "demand (client {client}, vcdn {vcdn}) has no routing path"
            ));
            continue;
        };
        if let Err(reason) = validate_path(path, server, client) {
            violations(&mut report, ConstraintFamily::RouteConservation).push(format!(
                "demand (client {client}, vcdn {vcdn}): {reason}"
            ));
        }
    }

    // Link capacity: aggregate routed throughput per capacity pool.
    audit_link_loads(s, sol, view, violations(&mut report, ConstraintFamily::LinkCapacity));

    Ok(report)
}

fn validate_path(path: &[Arc], server: NodeId, client: NodeId) -> Result<(), String> {
    if path.is_empty() {
        return Err("empty path".into());
    }
    if path[0].0 != server {
        return Err(format!("path starts at {} instead of serving server {server}", path[0].0));
    }
    if path.last().unwrap().1 != client {
        return Err(format!(
            "path ends at {} instead of client {client}",
            path.last().unwrap().1
        ));
    }
    let mut seen = BTreeSet::from([path[0].0]);
    for window in path.windows(2) {
        if window[0].1 != window[1].0 {
            return Err("path hops are not contiguous".into());
        }
    }
    for &(_, to) in path {
        if !seen.insert(to) {
            return Err(format!("path revisits node {to}"));
        }
    }
    Ok(())
}

fn audit_link_loads(
    s: &Scenario,
    sol: &PlacementSolution,
    view: &CapacityView<'_>,
    violations: &mut Vec<String>,
) {
    let demand_of: BTreeMap<(NodeId, VcdnId), Rat> = s
        .demands
        .iter()
        .map(|d| ((d.client, d.vcdn), d.throughput))
        .collect();
    match view {
        CapacityView::ScenarioLinks => {
            let capacity: BTreeMap<Arc, Rat> = s
                .links
                .iter()
                .map(|l| ((l.from, l.to), l.capacity))
                .collect();
            let mut load: BTreeMap<Arc, Rat> = BTreeMap::new();
            for (&(client, vcdn), path) in &sol.routes {
                let t = demand_of.get(&(client, vcdn)).copied().unwrap_or_else(Rat::zero);
                for &arc in path {
                    *load.entry(arc).or_insert_with(Rat::zero) += t;
                }
            }
            for (&(from, to), &used) in &load {
                match capacity.get(&(from, to)) {
                    None => violations.push(format!("route uses nonexistent link ({from}, {to})")),
                    Some(&cap) if used > cap => violations.push(format!(
                        "link ({from}, {to}) carries {used} Mbps over capacity {cap}"
                    )),
                    Some(_) => {}
                }
            }
        }
        CapacityView::Tree(tree) => {
            let capacity: BTreeMap<(NodeId, NodeId), Rat> = tree
                .edges()
                .iter()
                .map(|e| (normalize(e.a, e.b), e.capacity))
                .collect();
            let mut load: BTreeMap<(NodeId, NodeId), Rat> = BTreeMap::new();
            for (&(client, vcdn), path) in &sol.routes {
                let t = demand_of.get(&(client, vcdn)).copied().unwrap_or_else(Rat::zero);
                for &(from, to) in path {
                    *load.entry(normalize(from, to)).or_insert_with(Rat::zero) += t;
                }
            }
            for (&(a, b), &used) in &load {
                match capacity.get(&(a, b)) {
                    None => violations.push(format!("route uses nonexistent tree edge ({a}, {b})")),
                    Some(&cap) if used > cap => violations.push(format!(
                        "tree edge ({a}, {b}) carries {used} Mbps over capacity {cap}"
                    )),
                    Some(_) => {}
                }
            }
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

fn verify_references(s: &Scenario, sol: &PlacementSolution) -> Result<(), FeasibilityError> {
    for &(server, vcdn) in &sol.placements {
        if !s.is_server(server) {
            return Err(FeasibilityError::DanglingReference(format!(
                "placement on unknown server {server}"
            )));
        }
        if s.vcdn(vcdn).is_none() {
            return Err(FeasibilityError::DanglingReference(format!(
                "placement of unknown vcdn {vcdn}"
            )));
        }
    }
    for (&(client, vcdn), &server) in &sol.assignments {
        if !s.client_groups.contains(&client) {
            return Err(FeasibilityError::DanglingReference(format!(
                "assignment for unknown client {client}"
            )));
        }
        if s.vcdn(vcdn).is_none() {
            return Err(FeasibilityError::DanglingReference(format!(
                "assignment of unknown vcdn {vcdn}"
            )));
        }
        if !s.is_server(server) {
            return Err(FeasibilityError::DanglingReference(format!(
                "assignment to unknown server {server}"
            )));
        }
    }
    Ok(())
}
