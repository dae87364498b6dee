//! The six evaluation metrics computed on a (scenario, solution) pair.
//!
//! All metrics are pure functions. Sizes are GB and convert to Gb at a fixed
//! x8; with link capacities in Mbps a transfer of `size` GB over bottleneck
//! `L` takes `8000 * size / L` seconds.

use std::collections::BTreeMap;

use crate::model::{NodeId, Scenario, VcdnId};
use crate::rat::Rat;
use crate::solution::PlacementSolution;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("migration of vcdn {vcdn} to server {server} has no transfer path")]
    MissingMigrationPath { server: NodeId, vcdn: VcdnId },
    #[error("migration path crosses zero-capacity link ({0}, {1})")]
    ZeroCapacityEdge(NodeId, NodeId),
    #[error("scenario totals are zero; cost fraction undefined")]
    ZeroTotalCapacity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MigrationTiming {
    Sequential,
    Parallel,
}

/// The six cost metrics of one solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    /// Gb
    pub migration_cost: Rat,
    /// seconds
    pub migration_time_sequential: Rat,
    /// seconds
    pub migration_time_parallel: Rat,
    pub replica_number: u64,
    /// fraction of total storage
    pub vcache_cost: Rat,
    /// fraction of total streaming capacity
    pub vstream_cost: Rat,
}

pub fn cost_report(s: &Scenario, sol: &PlacementSolution) -> Result<CostReport, MetricsError> {
    Ok(CostReport {
        migration_cost: migration_cost(s, sol),
        migration_time_sequential: migration_time(s, sol, MigrationTiming::Sequential)?,
        migration_time_parallel: migration_time(s, sol, MigrationTiming::Parallel)?,
        replica_number: replica_number(s, sol),
        vcache_cost: vcache_cost(s, sol)?,
        vstream_cost: vstream_cost(s, sol)?,
    })
}

/// Total migration cost in Gb; the solvers' shared objective.
pub fn migration_cost(s: &Scenario, sol: &PlacementSolution) -> Rat {
    crate::opac::objective_value(s, sol)
}

/// Transfer time for all migrations, sequential (sum) or parallel (max).
/// Each migration's term is its size over the bottleneck capacity of its
/// transfer path; placements at a vCDN's origin transfer nothing.
pub fn migration_time(
    s: &Scenario,
    sol: &PlacementSolution,
    timing: MigrationTiming,
) -> Result<Rat, MetricsError> {
    let capacity: BTreeMap<(NodeId, NodeId), Rat> = s
        .links
        .iter()
        .map(|l| ((l.from, l.to), l.capacity))
        .collect();
    let mut total = Rat::zero();
    let mut worst = Rat::zero();
    for &(server, vcdn) in &sol.placements {
        let f = s.vcdn(vcdn).expect("validated reference");
        if server == f.origin {
            continue;
        }
        let path = sol
            .migration_paths
            .get(&(server, vcdn))
            .ok_or(MetricsError::MissingMigrationPath { server, vcdn })?;
        let mut bottleneck: Option<Rat> = None;
        for &(a, b) in path {
            // Tree-planned paths may use edges absent from the directed link
            // list; fall back to the reverse direction's capacity.
            let cap = capacity
                .get(&(a, b))
                .or_else(|| capacity.get(&(b, a)))
                .copied()
                .unwrap_or_else(Rat::zero);
            if cap.is_zero() {
                return Err(MetricsError::ZeroCapacityEdge(a, b));
            }
            bottleneck = Some(bottleneck.map_or(cap, |x| x.min(cap)));
        }
        let Some(bottleneck) = bottleneck else { continue };
        let term = Rat::int(8000) * f.size / bottleneck;
        total += term;
        worst = worst.max(term);
    }
    Ok(match timing {
        MigrationTiming::Sequential => total,
        MigrationTiming::Parallel => worst,
    })
}

/// Placements beyond each vCDN's origin server.
pub fn replica_number(s: &Scenario, sol: &PlacementSolution) -> u64 {
    sol.placements
        .iter()
        .filter(|&&(server, vcdn)| s.vcdn(vcdn).expect("validated reference").origin != server)
        .count() as u64
}

/// Fraction of total server storage consumed by placements.
pub fn vcache_cost(s: &Scenario, sol: &PlacementSolution) -> Result<Rat, MetricsError> {
    let total: Rat = s.servers.iter().map(|sv| sv.storage_capacity).sum();
    if total.is_zero() {
        return Err(MetricsError::ZeroTotalCapacity);
    }
    let used: Rat = sol
        .placements
        .iter()
        .map(|&(_, vcdn)| s.vcdn(vcdn).expect("validated reference").size)
        .sum();
    Ok(used / total)
}

/// Fraction of total streaming capacity consumed by served demands.
pub fn vstream_cost(s: &Scenario, sol: &PlacementSolution) -> Result<Rat, MetricsError> {
    let total: Rat = s.servers.iter().map(|sv| sv.stream_capacity).sum();
    if total.is_zero() {
        return Err(MetricsError::ZeroTotalCapacity);
    }
    let demand_of: BTreeMap<(NodeId, VcdnId), Rat> = s
        .demands
        .iter()
        .map(|d| ((d.client, d.vcdn), d.throughput))
        .collect();
    let used: Rat = sol
        .assignments
        .keys()
        .map(|key| demand_of.get(key).copied().unwrap_or_else(Rat::zero))
        .sum();
    Ok(used / total)
}

/// Relative excess of the heuristic cost over the exact optimum, in percent.
/// `None` when the optimum is zero and the ratio is undefined.
pub fn gap(c_hpac: Rat, c_opac: Rat) -> Option<Rat> {
    if c_opac.is_zero() {
        return None;
    }
    Some(Rat::int(100) * (c_hpac - c_opac) / c_opac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scenario;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn scenario() -> Scenario {
        Scenario::parse(
            r#"{
            "nodes": [0, 1, 2],
            "links": [
                {"from": 0, "to": 1, "capacity": 80},
                {"from": 1, "to": 0, "capacity": 80},
                {"from": 1, "to": 2, "capacity": 80},
                {"from": 2, "to": 1, "capacity": 80}
            ],
            "servers": [
                {"node": 1, "storage_capacity": 100, "stream_capacity": 500},
                {"node": 2, "storage_capacity": 150, "stream_capacity": 500}
            ],
            "client_groups": [0],
            "vcdns": [{"id": 0, "size": 1, "origin": 1}],
            "demands": [{"client": 0, "vcdn": 0, "throughput": 40}]
        }"#,
        )
        .unwrap()
    }

    fn empty_solution() -> PlacementSolution {
        PlacementSolution::default()
    }

    #[test]
    fn empty_solution_costs_nothing() {
        let s = scenario();
        let sol = empty_solution();
        assert_eq!(migration_cost(&s, &sol), Rat::zero());
        assert_eq!(
            migration_time(&s, &sol, MigrationTiming::Sequential).unwrap(),
            Rat::zero()
        );
        assert_eq!(
            migration_time(&s, &sol, MigrationTiming::Parallel).unwrap(),
            Rat::zero()
        );
        assert_eq!(replica_number(&s, &sol), 0);
        assert_eq!(vcache_cost(&s, &sol).unwrap(), Rat::zero());
        assert_eq!(vstream_cost(&s, &sol).unwrap(), Rat::zero());
    }

    #[test]
    fn single_migration_time_is_size_over_bottleneck() {
        // 1 GB = 8 Gb over an 80 Mbps bottleneck: 100 seconds.
        let s = scenario();
        let mut sol = empty_solution();
        sol.placements.insert((n(2), VcdnId(0)));
        sol.migration_paths
            .insert((n(2), VcdnId(0)), vec![(n(1), n(2))]);
        assert_eq!(
            migration_time(&s, &sol, MigrationTiming::Sequential).unwrap(),
            Rat::int(100)
        );
        assert_eq!(
            migration_time(&s, &sol, MigrationTiming::Parallel).unwrap(),
            Rat::int(100)
        );
    }

    #[test]
    fn missing_path_and_zero_capacity_are_errors() {
        let mut s = scenario();
        let mut sol = empty_solution();
        sol.placements.insert((n(2), VcdnId(0)));
        assert!(matches!(
            migration_time(&s, &sol, MigrationTiming::Sequential),
            Err(MetricsError::MissingMigrationPath { .. })
        ));
        sol.migration_paths
            .insert((n(2), VcdnId(0)), vec![(n(1), n(2))]);
        s.links[2].capacity = Rat::zero();
        s.links[3].capacity = Rat::zero();
        assert!(matches!(
            migration_time(&s, &sol, MigrationTiming::Sequential),
            Err(MetricsError::ZeroCapacityEdge(_, _))
        ));
    }

    #[test]
    fn replica_count_excludes_origin() {
        let s = scenario();
        let mut sol = empty_solution();
        sol.placements.insert((n(1), VcdnId(0)));
        assert_eq!(replica_number(&s, &sol), 0);
        sol.placements.insert((n(2), VcdnId(0)));
        assert_eq!(replica_number(&s, &sol), 1);
    }

    #[test]
    fn cost_fractions() {
        let s = scenario();
        let mut sol = empty_solution();
        sol.placements.insert((n(2), VcdnId(0)));
        // 1 GB on 250 GB total storage.
        assert_eq!(vcache_cost(&s, &sol).unwrap(), Rat::new(1, 250));
        sol.assignments.insert((n(0), VcdnId(0)), n(2));
        // 40 Mbps of 1000 Mbps total streaming: 0.04.
        assert_eq!(vstream_cost(&s, &sol).unwrap(), Rat::new(1, 25));
    }

    #[test]
    fn gap_values() {
        assert_eq!(gap(Rat::int(5), Rat::int(5)), Some(Rat::zero()));
        assert_eq!(
            gap(Rat::new(10066, 100), Rat::int(100)),
            Some(Rat::new(66, 100))
        );
        assert_eq!(gap(Rat::int(1), Rat::zero()), None);
    }
}
