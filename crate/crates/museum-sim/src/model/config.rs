//! The museum configuration file: map, objects, reader parameters, and the
//! scenario section, as one JSON document. Unknown fields are rejected.

use super::map::{MapEdge, MapNode, MuseumMap, NodeId, NodeKind};
use super::objects::{EnvThresholds, LanguageCode, ObjectId, SensorChannel};
use crate::Timestamp;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectConfig {
    pub id: ObjectId,
    #[serde(default = "default_true")]
    pub battery_charged: bool,
    /// Opaque info record per language.
    pub info: BTreeMap<LanguageCode, String>,
    pub thresholds: EnvThresholds,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralReaderConfig {
    pub x: f64,
    pub y: f64,
    pub active_range_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReaderConfig {
    #[serde(default = "default_gate_passive_range")]
    pub gate_passive_range_m: f64,
    #[serde(default = "default_gate_active_range")]
    pub gate_active_range_m: f64,
    /// Range at which a smart ticket reads an object tag.
    #[serde(default = "default_ticket_reader_range")]
    pub ticket_reader_range_m: f64,
    pub central: CentralReaderConfig,
}

fn default_gate_passive_range() -> f64 {
    2.0
}

fn default_gate_active_range() -> f64 {
    10.0
}

fn default_ticket_reader_range() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalizationConfig {
    pub noise_sigma_r_m: f64,
    pub noise_sigma_theta_rad: f64,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        LocalizationConfig {
            noise_sigma_r_m: 0.0,
            noise_sigma_theta_rad: 0.0,
        }
    }
}

/// How visitor arrival times are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalSpec {
    /// Poisson process with the given hourly rate.
    PoissonPerHour(f64),
    /// Explicit arrival ticks.
    Explicit(Vec<Timestamp>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DwellConfig {
    /// Log-normal location parameter (natural log of seconds).
    pub mu_ln: f64,
    pub sigma_ln: f64,
    /// Draws are clamped so every tour finishes within the day.
    pub min_seconds: u64,
    pub max_seconds: u64,
}

impl Default for DwellConfig {
    fn default() -> Self {
        DwellConfig {
            mu_ln: (90.0f64).ln(),
            sigma_ln: 0.5,
            min_seconds: 10,
            max_seconds: 600,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingMode {
    Shortest,
    CrowdBalanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoutingConfig {
    pub mode: RoutingMode,
    /// Crowd penalty weight; ignored in shortest mode.
    pub alpha: f64,
}

impl Default for RoutingConfig {
    fn default() -> Self {
        RoutingConfig {
            mode: RoutingMode::CrowdBalanced,
            alpha: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheftScript {
    pub object_id: ObjectId,
    pub time: Timestamp,
    /// Gate node the object is carried through (entry or exit gate).
    pub gate: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvExcursionScript {
    pub object_id: ObjectId,
    pub channel: SensorChannel,
    pub value: f64,
    pub time: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub sim_duration: Timestamp,
    pub seed: u64,
    pub arrivals: ArrivalSpec,
    #[serde(default)]
    pub dwell: DwellConfig,
    /// Relative weights per language; keys must be configured languages.
    pub language_mix: BTreeMap<LanguageCode, f64>,
    #[serde(default)]
    pub routing: RoutingConfig,
    #[serde(default = "default_survey_probability")]
    pub survey_probability: f64,
    #[serde(default = "default_walking_speed")]
    pub walking_speed_mps: f64,
    /// Dwell estimate used before a visitor has any history.
    #[serde(default = "default_default_dwell")]
    pub default_dwell_seconds: u64,
    #[serde(default = "default_cr_fix_period")]
    pub cr_fix_period: Timestamp,
    #[serde(default = "default_sensor_period")]
    pub sensor_period: Timestamp,
    #[serde(default)]
    pub thefts: Vec<TheftScript>,
    #[serde(default)]
    pub env_excursions: Vec<EnvExcursionScript>,
}

fn default_survey_probability() -> f64 {
    0.8
}

fn default_walking_speed() -> f64 {
    1.0
}

fn default_default_dwell() -> u64 {
    90
}

fn default_cr_fix_period() -> Timestamp {
    5
}

fn default_sensor_period() -> Timestamp {
    60
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    pub id: NodeId,
    pub kind: NodeKind,
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_id: Option<ObjectId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeConfig {
    pub a: NodeId,
    pub b: NodeId,
    pub walk_time: u64,
}

/// The whole museum configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuseumConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub languages: Vec<LanguageCode>,
    pub default_language: LanguageCode,
    pub ticket_price_cents: i64,
    pub survey_questions: Vec<String>,
    pub nodes: Vec<NodeConfig>,
    pub edges: Vec<EdgeConfig>,
    pub objects: Vec<ObjectConfig>,
    pub readers: ReaderConfig,
    #[serde(default)]
    pub localization: LocalizationConfig,
    #[serde(default = "default_location_epsilon")]
    pub location_change_epsilon_m: f64,
    pub scenario: ScenarioConfig,
}

fn default_location_epsilon() -> f64 {
    0.5
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("configuration is invalid:\n{}", format_violations(.0))]
    Invalid(Vec<ConfigViolation>),
}

fn format_violations(violations: &[ConfigViolation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// One reason a configuration cannot be used.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigViolation {
    Map(super::map::MapViolation),
    NoLanguages,
    DefaultLanguageNotListed,
    DuplicateObjectId(ObjectId),
    ObjectNotPlaced(ObjectId),
    NodeReferencesUnknownObject { node: NodeId, object: ObjectId },
    MissingInfoLanguage { object: ObjectId, language: LanguageCode },
    EmptyInfoRecord { object: ObjectId, language: LanguageCode },
    MalformedThresholds(ObjectId),
    NonPositiveDuration,
    NonPositivePeriod(&'static str),
    BadProbability(&'static str),
    NegativeParameter(&'static str),
    UnknownMixLanguage(LanguageCode),
    EmptyLanguageMix,
    ArrivalAfterEnd(Timestamp),
    TheftUnknownObject(ObjectId),
    TheftUnknownGate(NodeId),
    TheftAfterEnd(ObjectId),
    ExcursionUnknownObject(ObjectId),
    ExcursionAfterEnd(ObjectId),
    NoTicketPrice,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigViolation::Map(v) => write!(f, "map: {v}"),
            ConfigViolation::NoLanguages => write!(f, "no languages configured"),
            ConfigViolation::DefaultLanguageNotListed => {
                write!(f, "default_language is not in languages")
            }
            ConfigViolation::DuplicateObjectId(o) => write!(f, "duplicate object id {o}"),
            ConfigViolation::ObjectNotPlaced(o) => {
                write!(f, "object {o} is not placed on any exhibit node")
            }
            ConfigViolation::NodeReferencesUnknownObject { node, object } => {
                write!(f, "node {node} references unknown object {object}")
            }
            ConfigViolation::MissingInfoLanguage { object, language } => {
                write!(f, "object {object} has no info record for language {language}")
            }
            ConfigViolation::EmptyInfoRecord { object, language } => {
                write!(f, "object {object} has an empty info record for language {language}")
            }
            ConfigViolation::MalformedThresholds(o) => {
                write!(f, "object {o} has min > max in thresholds")
            }
            ConfigViolation::NonPositiveDuration => write!(f, "sim_duration must be positive"),
            ConfigViolation::NonPositivePeriod(name) => write!(f, "{name} must be positive"),
            ConfigViolation::BadProbability(name) => {
                write!(f, "{name} must lie in [0, 1]")
            }
            ConfigViolation::NegativeParameter(name) => {
                write!(f, "{name} must be non-negative")
            }
            ConfigViolation::UnknownMixLanguage(l) => {
                write!(f, "language_mix references unconfigured language {l}")
            }
            ConfigViolation::EmptyLanguageMix => write!(f, "language_mix is empty"),
            ConfigViolation::ArrivalAfterEnd(t) => {
                write!(f, "explicit arrival at {t} is outside the simulated day")
            }
            ConfigViolation::TheftUnknownObject(o) => write!(f, "theft references unknown object {o}"),
            ConfigViolation::TheftUnknownGate(g) => write!(f, "theft references unknown gate {g}"),
            ConfigViolation::TheftAfterEnd(o) => {
                write!(f, "theft of {o} is scheduled outside the simulated day")
            }
            ConfigViolation::ExcursionUnknownObject(o) => {
                write!(f, "env excursion references unknown object {o}")
            }
            ConfigViolation::ExcursionAfterEnd(o) => {
                write!(f, "env excursion for {o} is scheduled outside the simulated day")
            }
            ConfigViolation::NoTicketPrice => write!(f, "ticket_price_cents must be positive"),
        }
    }
}

impl MuseumConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: MuseumConfig = serde_json::from_str(text)?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion(config.schema_version));
        }
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_map(&self) -> MuseumMap {
        MuseumMap {
            nodes: self
                .nodes
                .iter()
                .map(|n| MapNode {
                    id: n.id.clone(),
                    kind: n.kind,
                    position: super::geometry::Position::new(n.x, n.y),
                    object_id: n.object_id.clone(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| MapEdge {
                    a: e.a.clone(),
                    b: e.b.clone(),
                    walk_time: e.walk_time,
                })
                .collect(),
        }
    }

    /// Check every invariant of the document; returns all violations found.
    pub fn validate(&self) -> Vec<ConfigViolation> {
        let mut violations = Vec::new();

        for v in super::map::validate_map(&self.to_map()) {
            violations.push(ConfigViolation::Map(v));
        }

        if self.languages.is_empty() {
            violations.push(ConfigViolation::NoLanguages);
        } else if !self.languages.contains(&self.default_language) {
            violations.push(ConfigViolation::DefaultLanguageNotListed);
        }
        if self.ticket_price_cents <= 0 {
            violations.push(ConfigViolation::NoTicketPrice);
        }

        let mut object_ids = std::collections::BTreeSet::new();
        for object in &self.objects {
            if !object_ids.insert(object.id.clone()) {
                violations.push(ConfigViolation::DuplicateObjectId(object.id.clone()));
            }
            if !object.thresholds.is_well_formed() {
                violations.push(ConfigViolation::MalformedThresholds(object.id.clone()));
            }
            for language in &self.languages {
                match object.info.get(language) {
                    None => violations.push(ConfigViolation::MissingInfoLanguage {
                        object: object.id.clone(),
                        language: language.clone(),
                    }),
                    Some(record) if record.is_empty() => {
                        violations.push(ConfigViolation::EmptyInfoRecord {
                            object: object.id.clone(),
                            language: language.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }

        let placed: std::collections::BTreeSet<_> = self
            .nodes
            .iter()
            .filter_map(|n| n.object_id.clone())
            .collect();
        for object in &self.objects {
            if !placed.contains(&object.id) {
                violations.push(ConfigViolation::ObjectNotPlaced(object.id.clone()));
            }
        }
        for node in &self.nodes {
            if let Some(object) = &node.object_id {
                if !object_ids.contains(object) {
                    violations.push(ConfigViolation::NodeReferencesUnknownObject {
                        node: node.id.clone(),
                        object: object.clone(),
                    });
                }
            }
        }

        let s = &self.scenario;
        if s.sim_duration == 0 {
            violations.push(ConfigViolation::NonPositiveDuration);
        }
        if s.cr_fix_period == 0 {
            violations.push(ConfigViolation::NonPositivePeriod("cr_fix_period"));
        }
        if s.sensor_period == 0 {
            violations.push(ConfigViolation::NonPositivePeriod("sensor_period"));
        }
        if s.default_dwell_seconds == 0 {
            violations.push(ConfigViolation::NonPositivePeriod("default_dwell_seconds"));
        }
        if !(0.0..=1.0).contains(&s.survey_probability) {
            violations.push(ConfigViolation::BadProbability("survey_probability"));
        }
        if s.walking_speed_mps <= 0.0 || !s.walking_speed_mps.is_finite() {
            violations.push(ConfigViolation::NonPositivePeriod("walking_speed_mps"));
        }
        if s.routing.alpha < 0.0 || !s.routing.alpha.is_finite() {
            violations.push(ConfigViolation::NegativeParameter("routing.alpha"));
        }
        if self.localization.noise_sigma_r_m < 0.0 {
            violations.push(ConfigViolation::NegativeParameter("noise_sigma_r_m"));
        }
        if self.localization.noise_sigma_theta_rad < 0.0 {
            violations.push(ConfigViolation::NegativeParameter("noise_sigma_theta_rad"));
        }
        if self.location_change_epsilon_m <= 0.0 {
            violations.push(ConfigViolation::NonPositivePeriod("location_change_epsilon_m"));
        }

        if s.language_mix.is_empty() {
            violations.push(ConfigViolation::EmptyLanguageMix);
        }
        for language in s.language_mix.keys() {
            if !self.languages.contains(language) {
                violations.push(ConfigViolation::UnknownMixLanguage(language.clone()));
            }
        }

        if let ArrivalSpec::Explicit(arrivals) = &s.arrivals {
            for &t in arrivals {
                if t >= s.sim_duration {
                    violations.push(ConfigViolation::ArrivalAfterEnd(t));
                    break;
                }
            }
        }

        let gate_ids: std::collections::BTreeSet<_> = self
            .nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::EntryGate | NodeKind::ExitGate))
            .map(|n| n.id.clone())
            .collect();
        for theft in &s.thefts {
            if !object_ids.contains(&theft.object_id) {
                violations.push(ConfigViolation::TheftUnknownObject(theft.object_id.clone()));
            }
            if !gate_ids.contains(&theft.gate) {
                violations.push(ConfigViolation::TheftUnknownGate(theft.gate.clone()));
            }
            if theft.time >= s.sim_duration {
                violations.push(ConfigViolation::TheftAfterEnd(theft.object_id.clone()));
            }
        }
        for excursion in &s.env_excursions {
            if !object_ids.contains(&excursion.object_id) {
                violations.push(ConfigViolation::ExcursionUnknownObject(
                    excursion.object_id.clone(),
                ));
            }
            if excursion.time >= s.sim_duration {
                violations.push(ConfigViolation::ExcursionAfterEnd(
                    excursion.object_id.clone(),
                ));
            }
        }

        violations
    }
}
