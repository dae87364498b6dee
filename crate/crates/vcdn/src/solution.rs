//! Placement/migration solution produced by both solvers, with a JSON export
//! consumed by the metrics and CLI layers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{NodeId, VcdnId};
use crate::rat::Rat;

/// Directed routing hop.
pub type Arc = (NodeId, NodeId);

/// Solver output: placements `x`, demand assignments `y`, per-demand routing
/// paths `z`, per-migration transfer paths, and the objective value in Gb.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlacementSolution {
    /// (server, vcdn) pairs with x = 1.
    pub placements: BTreeSet<(NodeId, VcdnId)>,
    /// Serving server per demanded (client, vcdn).
    pub assignments: BTreeMap<(NodeId, VcdnId), NodeId>,
    /// Ordered directed edges routing each demand from its server to the
    /// client.
    pub routes: BTreeMap<(NodeId, VcdnId), Vec<Arc>>,
    /// Transfer path from the vCDN's previous host to each non-origin
    /// placement, used for migration-time accounting.
    pub migration_paths: BTreeMap<(NodeId, VcdnId), Vec<Arc>>,
    /// Total migration cost, Gb.
    pub objective: Rat,
}

impl PlacementSolution {
    pub fn has_placement(&self, server: NodeId, vcdn: VcdnId) -> bool {
        self.placements.contains(&(server, vcdn))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SolutionDoc::from(self))
            .expect("solution serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let doc: SolutionDoc = serde_json::from_str(text)?;
        Ok(doc.into())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionDoc {
    x: Vec<XEntry>,
    y: Vec<YEntry>,
    z: Vec<PathEntry>,
    #[serde(default)]
    migration_paths: Vec<MigrationPathEntry>,
    objective: Rat,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct XEntry {
    server: NodeId,
    vcdn: VcdnId,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct YEntry {
    client: NodeId,
    vcdn: VcdnId,
    server: NodeId,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathEntry {
    client: NodeId,
    vcdn: VcdnId,
    path: Vec<Arc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MigrationPathEntry {
    server: NodeId,
    vcdn: VcdnId,
    path: Vec<Arc>,
}

impl From<&PlacementSolution> for SolutionDoc {
    fn from(sol: &PlacementSolution) -> Self {
        SolutionDoc {
            x: sol
                .placements
                .iter()
                .map(|&(server, vcdn)| XEntry { server, vcdn })
                .collect(),
            y: sol
                .assignments
                .iter()
                .map(|(&(client, vcdn), &server)| YEntry { client, vcdn, server })
                .collect(),
            z: sol
                .routes
                .iter()
                .map(|(&(client, vcdn), path)| PathEntry { client, vcdn, path: path.clone() })
                .collect(),
            migration_paths: sol
                .migration_paths
                .iter()
                .map(|(&(server, vcdn), path)| MigrationPathEntry {
                    server,
                    vcdn,
                    path: path.clone(),
                })
                .collect(),
            objective: sol.objective,
        }
    }
}

impl From<SolutionDoc> for PlacementSolution {
    fn from(doc: SolutionDoc) -> Self {
        PlacementSolution {
            placements: doc.x.into_iter().map(|e| (e.server, e.vcdn)).collect(),
            assignments: doc
                .y
                .into_iter()
                .map(|e| ((e.client, e.vcdn), e.server))
                .collect(),
            routes: doc
                .z
                .into_iter()
                .map(|e| ((e.client, e.vcdn), e.path))
                .collect(),
            migration_paths: doc
                .migration_paths
                .into_iter()
                .map(|e| ((e.server, e.vcdn), e.path))
                .collect(),
            objective: doc.objective,
        }
    }
}
