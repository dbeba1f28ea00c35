//! Deterministic discrete-event simulator and event-sourced management
//! engine for an RFID-instrumented museum.
//!
//! Visitors carry smart tickets, gates run peripheral readers, a central
//! reader localizes every tag in polar coordinates, and each exhibit has a
//! sensor circuit with a hybrid active/passive tag. Devices exchange twelve
//! message kinds over RF and Wi-Fi links; the wireless server turns them
//! into an append-only event log, raises theft, displacement, and
//! environment alarms, and answers fourteen manager report kinds from the
//! log alone.
//!
//! # Modules
//!
//! - [`model`]: domain types — tags, map, messages, events, alarms, config
//! - [`radio`]: read-range checks and polar localization (geometric RF model)
//! - [`museum`]: validated configuration resolved into a runtime registry
//! - [`server`]: message ingestion, live state, detectors, replay
//! - [`guidance`]: route recommendation, info delivery, time estimates, surveys
//! - [`reports`]: the fourteen manager reports, JSON and CSV
//! - [`sim`]: the tick-driven scenario engine producing message streams
//! - [`rng`]: named deterministic random streams
//!
//! Everything is deterministic: the same configuration and seed produce a
//! byte-identical event log. See the crate examples for runnable tours of
//! each capability, and the `museum-sim` binary for the file-based
//! `validate` / `run` / `report` / `replay` pipeline.

pub mod cli;
pub mod guidance;
pub mod model;
pub mod museum;
pub mod radio;
pub mod reports;
pub mod rng;
pub mod server;
pub mod sim;

/// Simulated time: seconds since the start of the run.
pub type Timestamp = u64;

pub use guidance::{
    estimate_remaining_time, lookup_object_info, recommend_route, submit_survey, GuidanceError,
    InfoLookup, RoutePlan, RouteRequest,
};
pub use model::{
    classify_link, validate_map, Alarm, Event, EventBody, EventLog, Link, Message, MessageBody,
    MuseumConfig, MuseumMap, PolarCoord, Position,
};
pub use museum::Museum;
pub use radio::{can_read, localize, to_cartesian, LocalizationModel, ReaderModel, ReaderRole};
pub use reports::{generate_report, Interval, Report, ReportKind, ReportParams};
pub use rng::RngHub;
pub use server::{
    check_environment, detect_location_change, detect_theft_at_gate, Diagnostic, IngestError,
    IngestOutcome, LiveState, WirelessServer,
};
pub use sim::{run_scenario, RunOutput};

#[cfg(test)]
pub(crate) mod testutil;
