//! Domain types shared by every other module: tags, geometry, the museum
//! map, messages, events, and alarms.

pub mod alarms;
pub mod config;
pub mod events;
pub mod geometry;
pub mod map;
pub mod messages;
pub mod objects;
pub mod tags;
pub mod tickets;

pub use alarms::{Alarm, AlarmDetail, EnvBreach};
pub use config::{
    ArrivalSpec, ConfigError, ConfigViolation, MuseumConfig, RoutingMode, ScenarioConfig,
    SCHEMA_VERSION,
};
pub use events::{Event, EventBody, EventLog, EventLogError};
pub use geometry::{wrap_angle, PolarCoord, Position};
pub use map::{validate_map, MapEdge, MapNode, MapViolation, MuseumMap, NodeId, NodeKind, RouteTable};
pub use messages::{
    classify_link, GateInBody, GateOutBody, Link, LinkError, Message, MessageBody, StUplink,
    Subject,
};
pub use objects::{
    Bounds, EnvThresholds, ExhibitObject, LanguageCode, ObjectId, SensorChannel, SensorReading,
};
pub use tags::{HybridTag, TagId, TagKind};
pub use tickets::{SmartTicket, SurveyAnswer, SurveyResponse, TicketId, VisitEntry};
