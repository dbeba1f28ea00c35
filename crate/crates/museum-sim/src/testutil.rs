//! Shared fixtures for unit tests.

use crate::model::config::*;
use crate::model::{Bounds, EnvThresholds, NodeId, NodeKind, ObjectId};
use crate::museum::Museum;
use std::collections::BTreeMap;
use std::sync::Arc;

pub fn thresholds() -> EnvThresholds {
    EnvThresholds {
        temperature: Bounds {
            min: 15.0,
            max: 30.0,
        },
        pressure: Bounds {
            min: 950.0,
            max: 1050.0,
        },
        humidity: Bounds {
            min: 30.0,
            max: 60.0,
        },
        light: Bounds {
            min: 0.0,
            max: 400.0,
        },
        ph: Bounds { min: 6.0, max: 8.0 },
        gas: Bounds {
            min: 0.0,
            max: 100.0,
        },
        mechanical_events_allowed: false,
    }
}

pub fn object_config(id: &str) -> ObjectConfig {
    let mut info = BTreeMap::new();
    info.insert("en".to_string(), format!("about {id}"));
    info.insert("fa".to_string(), format!("darbareye {id}"));
    ObjectConfig {
        id: ObjectId::new(id),
        battery_charged: true,
        info,
        thresholds: thresholds(),
    }
}

/// A line museum: `in -- e1 -- e2 -- ... -- out`, 10 s per edge, one object
/// per exhibit node, positions 10 m apart so walking speed 1 m/s matches
/// the walk times.
pub fn line_config(exhibits: usize) -> MuseumConfig {
    let mut nodes = vec![NodeConfig {
        id: NodeId::new("in"),
        kind: NodeKind::EntryGate,
        x: 0.0,
        y: 0.0,
        object_id: None,
    }];
    let mut edges = Vec::new();
    let mut objects = Vec::new();
    let mut prev = NodeId::new("in");
    for i in 1..=exhibits {
        let node_id = NodeId::new(format!("e{i}"));
        let object_id = format!("o{i}");
        nodes.push(NodeConfig {
            id: node_id.clone(),
            kind: NodeKind::Exhibit,
            x: 10.0 * i as f64,
            y: 0.0,
            object_id: Some(ObjectId::new(&object_id)),
        });
        objects.push(object_config(&object_id));
        edges.push(EdgeConfig {
            a: prev.clone(),
            b: node_id.clone(),
            walk_time: 10,
        });
        prev = node_id;
    }
    nodes.push(NodeConfig {
        id: NodeId::new("out"),
        kind: NodeKind::ExitGate,
        x: 10.0 * (exhibits + 1) as f64,
        y: 0.0,
        object_id: None,
    });
    edges.push(EdgeConfig {
        a: prev,
        b: NodeId::new("out"),
        walk_time: 10,
    });

    MuseumConfig {
        schema_version: SCHEMA_VERSION,
        languages: vec!["en".into(), "fa".into()],
        default_language: "en".into(),
        ticket_price_cents: 1500,
        survey_questions: vec!["guidance".into(), "content".into()],
        nodes,
        edges,
        objects,
        readers: ReaderConfig {
            gate_passive_range_m: 2.0,
            gate_active_range_m: 10.0,
            ticket_reader_range_m: 1.0,
            central: CentralReaderConfig {
                x: 0.0,
                y: 20.0,
                active_range_m: 10_000.0,
            },
        },
        localization: LocalizationConfig::default(),
        location_change_epsilon_m: 0.5,
        scenario: ScenarioConfig {
            sim_duration: 3600,
            seed: 42,
            arrivals: ArrivalSpec::Explicit(vec![0]),
            dwell: DwellConfig::default(),
            language_mix: BTreeMap::from([("en".to_string(), 0.6), ("fa".to_string(), 0.4)]),
            routing: RoutingConfig::default(),
            survey_probability: 1.0,
            walking_speed_mps: 1.0,
            default_dwell_seconds: 90,
            cr_fix_period: 5,
            sensor_period: 60,
            thefts: Vec::new(),
            env_excursions: Vec::new(),
        },
    }
}

pub fn line_museum(exhibits: usize) -> Arc<Museum> {
    Arc::new(Museum::from_config(line_config(exhibits)).expect("fixture config is valid"))
}
