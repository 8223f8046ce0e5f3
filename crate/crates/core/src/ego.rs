//! Per-user ego networks: the center, its followers and followees, and
//! every arc among them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

/// Upper bound on the number of neighbors kept per ego network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgoCap {
    pub max_neighbors: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct EgoNetwork {
    /// Center in the parent graph.
    pub center: NodeId,
    /// Center in `graph`.
    pub local_center: NodeId,
    pub graph: DirectedGraph,
    /// `node_map[local]` is the parent-graph node.
    pub node_map: Vec<NodeId>,
    pub capped: bool,
}

impl EgoNetwork {
    pub fn to_global(&self, local: NodeId) -> NodeId {
        self.node_map[local.index()]
    }
}

/// Induced subgraph on `u` and its 1-hop neighbors (both directions).
///
/// With a cap, a hub whose neighbor count exceeds `max_neighbors` keeps a
/// uniform sample of that many neighbors. The sample depends only on the cap
/// seed and `u`.
pub fn ego_network(g: &DirectedGraph, u: NodeId, cap: Option<EgoCap>) -> Result<EgoNetwork> {
    if !g.contains(u) {
        return Err(Error::UnknownNode(u.0 as u64));
    }
    let mut neighbors = g.undirected_neighbors(u);
    let mut capped = false;
    if let Some(cap) = cap {
        if neighbors.len() > cap.max_neighbors {
            let mut rng = ChaCha8Rng::seed_from_u64(
                cap.seed ^ (u.0 as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            let mut picked: Vec<NodeId> =
                rand::seq::index::sample(&mut rng, neighbors.len(), cap.max_neighbors)
                    .into_iter()
                    .map(|i| neighbors[i])
                    .collect();
            picked.sort_unstable();
            neighbors = picked;
            capped = true;
        }
    }

    let pos = neighbors.partition_point(|&w| w < u);
    neighbors.insert(pos, u);
    let members = neighbors;

    let graph = g.induced_subgraph(&members);
    Ok(EgoNetwork {
        center: u,
        local_center: NodeId(pos as u32),
        graph,
        node_map: members,
        capped,
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::graph::DirectedGraph;

    /// Center 0 follows 1, 2, 3 and is followed by 4, 5, 6; four arcs run
    /// between neighbors, and nodes 7 and 8 sit outside the ego network.
    pub fn ego_topology() -> DirectedGraph {
        DirectedGraph::from_edges(
            9,
            [
                (0, 1),
                (0, 2),
                (0, 3),
                (4, 0),
                (5, 0),
                (6, 0),
                (1, 2),
                (2, 1),
                (4, 1),
                (6, 5),
                // outside the ego network of 0
                (7, 1),
                (3, 8),
                (8, 7),
            ],
        )
    }
}
