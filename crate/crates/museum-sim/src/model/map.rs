//! Museum floor graph: gates, exhibit nodes, and walk-time edges.

use super::geometry::Position;
use super::objects::ObjectId;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

/// Identifier of a map node (gate or exhibit location).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    EntryGate,
    ExitGate,
    Exhibit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub position: Position,
    /// Exhibit nodes carry the object shown there.
    pub object_id: Option<ObjectId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapEdge {
    pub a: NodeId,
    pub b: NodeId,
    /// Walking time along the edge, in whole simulated seconds.
    pub walk_time: u64,
}

/// The museum graph. Undirected; edges carry walk times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuseumMap {
    pub nodes: Vec<MapNode>,
    pub edges: Vec<MapEdge>,
}

/// A violated map invariant, reported by [`validate_map`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapViolation {
    MissingEntryGate,
    MissingExitGate,
    NonPositiveWalkTime { a: NodeId, b: NodeId },
    UnknownEdgeEndpoint { node: NodeId },
    DuplicateNodeId { node: NodeId },
    Disconnected { node: NodeId },
    ExhibitWithoutObject { node: NodeId },
    NonExhibitWithObject { node: NodeId },
    ObjectShownTwice { object: ObjectId },
    NonFinitePosition { node: NodeId },
}

impl fmt::Display for MapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapViolation::MissingEntryGate => write!(f, "missing entry gate"),
            MapViolation::MissingExitGate => write!(f, "missing exit gate"),
            MapViolation::NonPositiveWalkTime { a, b } => {
                write!(f, "non-positive walk_time on edge {a} -- {b}")
            }
            MapViolation::UnknownEdgeEndpoint { node } => {
                write!(f, "edge references unknown node {node}")
            }
            MapViolation::DuplicateNodeId { node } => write!(f, "duplicate node id {node}"),
            MapViolation::Disconnected { node } => write!(f, "node {node} is unreachable"),
            MapViolation::ExhibitWithoutObject { node } => {
                write!(f, "exhibit node {node} has no object")
            }
            MapViolation::NonExhibitWithObject { node } => {
                write!(f, "gate node {node} carries an object")
            }
            MapViolation::ObjectShownTwice { object } => {
                write!(f, "object {object} is placed on more than one node")
            }
            MapViolation::NonFinitePosition { node } => {
                write!(f, "node {node} has a non-finite position")
            }
        }
    }
}

/// Check every structural invariant of the map and return all violations.
pub fn validate_map(map: &MuseumMap) -> Vec<MapViolation> {
    let mut violations = Vec::new();

    let mut ids = BTreeSet::new();
    for node in &map.nodes {
        if !ids.insert(node.id.clone()) {
            violations.push(MapViolation::DuplicateNodeId {
                node: node.id.clone(),
            });
        }
        if !node.position.is_finite() {
            violations.push(MapViolation::NonFinitePosition {
                node: node.id.clone(),
            });
        }
        match (node.kind, &node.object_id) {
            (NodeKind::Exhibit, None) => violations.push(MapViolation::ExhibitWithoutObject {
                node: node.id.clone(),
            }),
            (NodeKind::EntryGate | NodeKind::ExitGate, Some(_)) => {
                violations.push(MapViolation::NonExhibitWithObject {
                    node: node.id.clone(),
                })
            }
            _ => {}
        }
    }

    if !map.nodes.iter().any(|n| n.kind == NodeKind::EntryGate) {
        violations.push(MapViolation::MissingEntryGate);
    }
    if !map.nodes.iter().any(|n| n.kind == NodeKind::ExitGate) {
        violations.push(MapViolation::MissingExitGate);
    }

    let mut seen_objects = BTreeSet::new();
    for node in &map.nodes {
        if let Some(obj) = &node.object_id {
            if !seen_objects.insert(obj.clone()) {
                violations.push(MapViolation::ObjectShownTwice {
                    object: obj.clone(),
                });
            }
        }
    }

    let mut adjacency: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for node in &map.nodes {
        adjacency.entry(&node.id).or_default();
    }
    for edge in &map.edges {
        if edge.walk_time == 0 {
            violations.push(MapViolation::NonPositiveWalkTime {
                a: edge.a.clone(),
                b: edge.b.clone(),
            });
        }
        let mut known = true;
        for end in [&edge.a, &edge.b] {
            if !ids.contains(end) {
                violations.push(MapViolation::UnknownEdgeEndpoint { node: end.clone() });
                known = false;
            }
        }
        if known {
            adjacency.get_mut(&edge.a).unwrap().push(&edge.b);
            adjacency.get_mut(&edge.b).unwrap().push(&edge.a);
        }
    }

    // Connectivity by BFS from the first node.
    if let Some(start) = map.nodes.first() {
        let mut reached = BTreeSet::new();
        let mut queue = VecDeque::new();
        reached.insert(&start.id);
        queue.push_back(&start.id);
        while let Some(node) = queue.pop_front() {
            for next in adjacency.get(node).into_iter().flatten() {
                if reached.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        for node in &map.nodes {
            if !reached.contains(&node.id) {
                violations.push(MapViolation::Disconnected {
                    node: node.id.clone(),
                });
            }
        }
    }

    violations
}

/// All-pairs shortest walk times with deterministic path reconstruction.
///
/// Node indices follow the sorted order of node ids, so paths and distances
/// are reproducible for a given map regardless of input ordering.
#[derive(Debug, Clone)]
pub struct RouteTable {
    ids: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    dist: Vec<Vec<u64>>,
    next: Vec<Vec<usize>>,
}

pub const UNREACHABLE: u64 = u64::MAX / 4;

impl RouteTable {
    pub fn build(map: &MuseumMap) -> Self {
        let mut ids: Vec<NodeId> = map.nodes.iter().map(|n| n.id.clone()).collect();
        ids.sort();
        ids.dedup();
        let index: BTreeMap<NodeId, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let n = ids.len();

        let mut dist = vec![vec![UNREACHABLE; n]; n];
        let mut next = vec![vec![usize::MAX; n]; n];
        for i in 0..n {
            dist[i][i] = 0;
            next[i][i] = i;
        }
        for edge in &map.edges {
            let (Some(&a), Some(&b)) = (index.get(&edge.a), index.get(&edge.b)) else {
                continue;
            };
            if edge.walk_time < dist[a][b] {
                dist[a][b] = edge.walk_time;
                dist[b][a] = edge.walk_time;
                next[a][b] = b;
                next[b][a] = a;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if dist[i][k] == UNREACHABLE {
                    continue;
                }
                for j in 0..n {
                    let through = dist[i][k].saturating_add(dist[k][j]);
                    if through < dist[i][j] {
                        dist[i][j] = through;
                        next[i][j] = next[i][k];
                    }
                }
            }
        }

        RouteTable {
            ids,
            index,
            dist,
            next,
        }
    }

    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id_of(&self, index: usize) -> &NodeId {
        &self.ids[index]
    }

    /// Shortest walk time between two nodes, `None` if disconnected.
    pub fn walk_time(&self, from: &NodeId, to: &NodeId) -> Option<u64> {
        let a = self.index_of(from)?;
        let b = self.index_of(to)?;
        let d = self.dist[a][b];
        (d < UNREACHABLE).then_some(d)
    }

    pub fn walk_time_by_index(&self, from: usize, to: usize) -> u64 {
        self.dist[from][to]
    }

    /// Full node sequence of a shortest path, including both endpoints.
    pub fn path(&self, from: &NodeId, to: &NodeId) -> Option<Vec<NodeId>> {
        let a = self.index_of(from)?;
        let b = self.index_of(to)?;
        if self.dist[a][b] >= UNREACHABLE {
            return None;
        }
        let mut path = vec![self.ids[a].clone()];
        let mut cur = a;
        while cur != b {
            cur = self.next[cur][b];
            path.push(self.ids[cur].clone());
        }
        Some(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: &str, kind: NodeKind, x: f64, y: f64, object: Option<&str>) -> MapNode {
        MapNode {
            id: NodeId::new(id),
            kind,
            position: Position::new(x, y),
            object_id: object.map(ObjectId::new),
        }
    }

    fn edge(a: &str, b: &str, walk_time: u64) -> MapEdge {
        MapEdge {
            a: NodeId::new(a),
            b: NodeId::new(b),
            walk_time,
        }
    }

    fn small_valid_map() -> MuseumMap {
        MuseumMap {
            nodes: vec![
                node("in", NodeKind::EntryGate, 0.0, 0.0, None),
                node("e1", NodeKind::Exhibit, 10.0, 0.0, Some("o1")),
                node("e2", NodeKind::Exhibit, 10.0, 10.0, Some("o2")),
                node("out", NodeKind::ExitGate, 0.0, 10.0, None),
            ],
            edges: vec![
                edge("in", "e1", 10),
                edge("e1", "e2", 10),
                edge("e2", "out", 10),
            ],
        }
    }

    #[test]
    fn valid_map_has_no_violations() {
        assert!(validate_map(&small_valid_map()).is_empty());
    }

    #[test]
    fn missing_exit_gate_reported() {
        let map = MuseumMap {
            nodes: vec![
                node("in", NodeKind::EntryGate, 0.0, 0.0, None),
                node("e1", NodeKind::Exhibit, 1.0, 0.0, Some("o1")),
            ],
            edges: vec![edge("in", "e1", 5)],
        };
        let violations = validate_map(&map);
        assert!(violations.contains(&MapViolation::MissingExitGate));
    }

    #[test]
    fn zero_walk_time_reported() {
        let mut map = small_valid_map();
        map.edges[0].walk_time = 0;
        let violations = validate_map(&map);
        assert!(violations
            .iter()
            .any(|v| matches!(v, MapViolation::NonPositiveWalkTime { .. })));
    }

    #[test]
    fn disconnected_node_reported() {
        let mut map = small_valid_map();
        map.nodes
            .push(node("lost", NodeKind::Exhibit, 50.0, 50.0, Some("o3")));
        let violations = validate_map(&map);
        assert!(violations
            .iter()
            .any(|v| matches!(v, MapViolation::Disconnected { node } if node.as_str() == "lost")));
    }

    #[test]
    fn route_table_finds_shortest_paths() {
        let table = RouteTable::build(&small_valid_map());
        assert_eq!(
            table.walk_time(&NodeId::new("in"), &NodeId::new("out")),
            Some(30)
        );
        let path = table.path(&NodeId::new("in"), &NodeId::new("out")).unwrap();
        let ids: Vec<&str> = path.iter().map(|n| n.as_str()).collect();
        assert_eq!(ids, ["in", "e1", "e2", "out"]);
    }

    #[test]
    fn route_table_prefers_cheaper_indirect_path() {
        let mut map = small_valid_map();
        map.edges.push(edge("in", "out", 100));
        let table = RouteTable::build(&map);
        assert_eq!(
            table.walk_time(&NodeId::new("in"), &NodeId::new("out")),
            Some(30)
        );
    }
}
