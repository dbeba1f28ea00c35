//! The resolved museum: validated configuration turned into the runtime
//! registry every other module works against.

use crate::model::config::{ConfigError, MuseumConfig};
use crate::model::{
    ExhibitObject, HybridTag, LanguageCode, MuseumMap, NodeId, NodeKind, ObjectId, PolarCoord,
    Position, RouteTable,
};
use crate::radio::{LocalizationModel, ReaderModel, ReaderRole};
use std::collections::BTreeMap;

/// Validated, cross-referenced museum state. Immutable for a run.
#[derive(Debug, Clone)]
pub struct Museum {
    pub config: MuseumConfig,
    pub map: MuseumMap,
    pub routes: RouteTable,
    pub objects: BTreeMap<ObjectId, ExhibitObject>,
    /// Exhibit node that shows each object.
    pub object_nodes: BTreeMap<ObjectId, NodeId>,
    pub node_positions: BTreeMap<NodeId, Position>,
    /// Entry gate node ids, sorted.
    pub entry_gates: Vec<NodeId>,
    /// Exit gate node ids, sorted.
    pub exit_gates: Vec<NodeId>,
    /// Gate readers keyed by gate node id.
    pub gate_readers: BTreeMap<NodeId, ReaderModel>,
    pub central_reader: ReaderModel,
    pub localization: LocalizationModel,
}

impl Museum {
    /// Resolve a configuration. Fails with the full violation list if any
    /// invariant is broken.
    pub fn from_config(config: MuseumConfig) -> Result<Self, ConfigError> {
        let violations = config.validate();
        if !violations.is_empty() {
            return Err(ConfigError::Invalid(violations));
        }

        let map = config.to_map();
        let routes = RouteTable::build(&map);

        let node_positions: BTreeMap<NodeId, Position> = map
            .nodes
            .iter()
            .map(|n| (n.id.clone(), n.position))
            .collect();

        let central_pos = Position::new(config.readers.central.x, config.readers.central.y);
        let central_reader = ReaderModel::new(
            "cr",
            central_pos,
            config.readers.gate_passive_range_m,
            config.readers.central.active_range_m,
            ReaderRole::Central,
        );

        let mut object_nodes = BTreeMap::new();
        for node in &map.nodes {
            if let Some(object_id) = &node.object_id {
                object_nodes.insert(object_id.clone(), node.id.clone());
            }
        }

        let mut objects = BTreeMap::new();
        for oc in &config.objects {
            let node = &object_nodes[&oc.id];
            let home = node_positions[node];
            objects.insert(
                oc.id.clone(),
                ExhibitObject {
                    object_id: oc.id.clone(),
                    tag: HybridTag::object(oc.id.as_str(), oc.battery_charged),
                    home_polar: PolarCoord::from_cartesian(home, central_pos),
                    info: oc.info.clone(),
                    thresholds: oc.thresholds.clone(),
                },
            );
        }

        let mut entry_gates = Vec::new();
        let mut exit_gates = Vec::new();
        let mut gate_readers = BTreeMap::new();
        for node in &map.nodes {
            let role = match node.kind {
                NodeKind::EntryGate => {
                    entry_gates.push(node.id.clone());
                    ReaderRole::GateIn
                }
                NodeKind::ExitGate => {
                    exit_gates.push(node.id.clone());
                    ReaderRole::GateOut
                }
                NodeKind::Exhibit => continue,
            };
            gate_readers.insert(
                node.id.clone(),
                ReaderModel::new(
                    format!("pr:{}", node.id),
                    node.position,
                    config.readers.gate_passive_range_m,
                    config.readers.gate_active_range_m,
                    role,
                ),
            );
        }
        entry_gates.sort();
        exit_gates.sort();

        let localization = LocalizationModel {
            noise_sigma_r: config.localization.noise_sigma_r_m,
            noise_sigma_theta: config.localization.noise_sigma_theta_rad,
        };

        Ok(Museum {
            config,
            map,
            routes,
            objects,
            object_nodes,
            node_positions,
            entry_gates,
            exit_gates,
            gate_readers,
            central_reader,
            localization,
        })
    }

    pub fn languages(&self) -> &[LanguageCode] {
        &self.config.languages
    }

    pub fn default_language(&self) -> &LanguageCode {
        &self.config.default_language
    }

    pub fn ticket_price_cents(&self) -> i64 {
        self.config.ticket_price_cents
    }

    pub fn location_change_epsilon(&self) -> f64 {
        self.config.location_change_epsilon_m
    }

    pub fn object(&self, id: &ObjectId) -> Option<&ExhibitObject> {
        self.objects.get(id)
    }

    pub fn node_position(&self, id: &NodeId) -> Position {
        self.node_positions[id]
    }

    /// Home floor position of an object (its exhibit node position).
    pub fn object_home_position(&self, id: &ObjectId) -> Position {
        self.node_position(&self.object_nodes[id])
    }

    pub fn is_gate(&self, id: &NodeId) -> bool {
        self.gate_readers.contains_key(id)
    }
}
