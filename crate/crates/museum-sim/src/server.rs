//! The wireless server: turns device messages into events on the
//! append-only log, maintains live state, and raises alarms.
//!
//! `apply_event` is the only state mutator, so folding a persisted log
//! rebuilds exactly the state the live run maintained. `ingest` translates
//! one message into zero or more events (running the theft, displacement,
//! and environment detectors as it goes) and applies them.
//!
//! RF sensing messages (kinds 6, 8, 9, 11) produce the `TagSensedAtGate`
//! record and drive theft detection; the Wi-Fi gate warnings bundled into
//! kinds 5 and 7 are their transport echo and add no further events.

use crate::model::{
    Alarm, AlarmDetail, EnvBreach, EnvThresholds, Event, EventBody, EventLog, ExhibitObject,
    GateInBody, GateOutBody, HybridTag, LanguageCode, Message, MessageBody, NodeId, ObjectId,
    PolarCoord, Position, SensorChannel, SensorReading, StUplink, Subject, TagId, TagKind,
    TicketId,
};
use crate::museum::Museum;
use crate::radio::{to_cartesian, ReaderModel};
use crate::Timestamp;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

/// What the server knows about one issued ticket.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TicketStatus {
    pub paid: bool,
    pub language: Option<LanguageCode>,
    pub surveyed: bool,
    pub returned: bool,
}

/// Live server state; every field is a pure fold over the event log.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LiveState {
    pub tickets: BTreeMap<TicketId, TicketStatus>,
    pub inside: BTreeSet<TicketId>,
    /// Exhibit a ticket is currently attributed to: its most recent info
    /// read, held until the next read or gate exit.
    pub current_exhibit: BTreeMap<TicketId, ObjectId>,
    pub per_object_crowd: BTreeMap<ObjectId, u32>,
    pub last_fix: BTreeMap<ObjectId, PolarCoord>,
    pub last_reading: BTreeMap<ObjectId, SensorReading>,
    pub alarms: Vec<Alarm>,
    /// Timestamp of the last applied event.
    pub watermark: Timestamp,
}

impl LiveState {
    pub fn new() -> Self {
        LiveState::default()
    }

    /// Number of visitors currently inside.
    pub fn occupancy(&self) -> usize {
        self.inside.len()
    }

    /// Apply one event. This is the single place state changes.
    pub fn apply_event(&mut self, event: &Event) {
        match &event.body {
            EventBody::TicketIssued { ticket_id } => {
                self.tickets.entry(ticket_id.clone()).or_default();
            }
            EventBody::PaymentReceived { ticket_id, .. } => {
                if let Some(status) = self.tickets.get_mut(ticket_id) {
                    status.paid = true;
                }
            }
            EventBody::LanguageChosen { ticket_id, language } => {
                if let Some(status) = self.tickets.get_mut(ticket_id) {
                    status.language = Some(language.clone());
                }
            }
            EventBody::GateEntry { ticket_id, language, .. } => {
                self.inside.insert(ticket_id.clone());
                if let Some(status) = self.tickets.get_mut(ticket_id) {
                    if status.language.is_none() {
                        status.language = Some(language.clone());
                    }
                }
            }
            EventBody::GateExit { ticket_id, .. } => {
                self.inside.remove(ticket_id);
                self.detach_from_exhibit(ticket_id);
            }
            EventBody::TagSensedAtGate { .. } => {}
            EventBody::ObjectInfoRead { ticket_id, object_id, .. } => {
                if self.inside.contains(ticket_id) {
                    self.detach_from_exhibit(ticket_id);
                    self.current_exhibit
                        .insert(ticket_id.clone(), object_id.clone());
                    *self.per_object_crowd.entry(object_id.clone()).or_insert(0) += 1;
                }
            }
            EventBody::LocationFix { subject, polar } => {
                if let Subject::Object(object_id) = subject {
                    self.last_fix.insert(object_id.clone(), *polar);
                }
            }
            EventBody::SensorTelemetry { reading } => {
                self.last_reading
                    .insert(reading.object_id.clone(), reading.clone());
            }
            EventBody::SurveySubmitted { ticket_id, .. } => {
                if let Some(status) = self.tickets.get_mut(ticket_id) {
                    status.surveyed = true;
                }
            }
            EventBody::AlarmRaised { alarm } => {
                self.alarms.push(alarm.clone());
            }
            EventBody::TicketReturned { ticket_id } => {
                if let Some(status) = self.tickets.get_mut(ticket_id) {
                    status.returned = true;
                }
            }
        }
        self.watermark = event.timestamp;
    }

    fn detach_from_exhibit(&mut self, ticket_id: &TicketId) {
        if let Some(previous) = self.current_exhibit.remove(ticket_id) {
            if let Some(count) = self.per_object_crowd.get_mut(&previous) {
                *count -= 1;
                if *count == 0 {
                    self.per_object_crowd.remove(&previous);
                }
            }
        }
    }

    /// Rebuild state by folding a persisted log.
    pub fn replay(log: &EventLog) -> Self {
        let mut state = LiveState::new();
        for event in log.events() {
            state.apply_event(event);
        }
        state
    }
}

/// Anomalies that are recorded but neither events nor hard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    GateRejectedUnpaid {
        ticket_id: TicketId,
        gate_id: NodeId,
        timestamp: Timestamp,
    },
    GateRejectedAlreadyInside {
        ticket_id: TicketId,
        gate_id: NodeId,
        timestamp: Timestamp,
    },
    ExitRejectedNotInside {
        ticket_id: TicketId,
        gate_id: NodeId,
        timestamp: Timestamp,
    },
    DuplicateTicketIssued {
        ticket_id: TicketId,
        timestamp: Timestamp,
    },
    DuplicateSurvey {
        ticket_id: TicketId,
        timestamp: Timestamp,
    },
    ReadOutsideMuseum {
        ticket_id: TicketId,
        object_id: ObjectId,
        timestamp: Timestamp,
    },
    ReturnedWhileInside {
        ticket_id: TicketId,
        timestamp: Timestamp,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("message at {timestamp} is older than watermark {watermark}")]
    StaleMessage {
        timestamp: Timestamp,
        watermark: Timestamp,
    },
    #[error("message kind {kind} references unknown {subject}")]
    UnknownSubject { subject: String, kind: u8 },
}

/// Everything one `ingest` call produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestOutcome {
    pub events: Vec<Event>,
    pub alarms: Vec<Alarm>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Theft detector: an object tag sensed by a gate reader is a suspected
/// theft; ticket tags pass gates legitimately.
pub fn detect_theft_at_gate(
    sensed_tag: &HybridTag,
    _gate: &ReaderModel,
    gate_id: &NodeId,
    timestamp: Timestamp,
) -> Option<Alarm> {
    match sensed_tag.kind {
        TagKind::ObjectTag => Some(Alarm {
            object_id: ObjectId::new(sensed_tag.id.as_str()),
            timestamp,
            detail: AlarmDetail::TheftAtGate {
                gate_id: gate_id.clone(),
            },
        }),
        TagKind::TicketTag => None,
    }
}

/// Displacement detector: alarm when the fixed position is strictly more
/// than `epsilon` meters from the registered home position.
pub fn detect_location_change(
    object: &ExhibitObject,
    fix: PolarCoord,
    epsilon: f64,
    cr_position: Position,
    timestamp: Timestamp,
) -> Option<Alarm> {
    let fixed = to_cartesian(fix, cr_position);
    let home = to_cartesian(object.home_polar, cr_position);
    let displacement = fixed.distance_to(home);
    (displacement > epsilon).then(|| Alarm {
        object_id: object.object_id.clone(),
        timestamp,
        detail: AlarmDetail::LocationChange {
            displacement_m: displacement,
        },
    })
}

/// Environment detector: one alarm per channel outside its interval, plus
/// one for a disallowed mechanical event. Channels are checked in the fixed
/// [`SensorChannel::ALL`] order.
pub fn check_environment(reading: &SensorReading, thresholds: &EnvThresholds) -> Vec<Alarm> {
    let mut alarms = Vec::new();
    for channel in SensorChannel::ALL {
        let bounds = thresholds.bounds(channel);
        let value = reading.value(channel);
        let breach = if value < bounds.min {
            Some(EnvBreach::Below {
                channel,
                value,
                min: bounds.min,
            })
        } else if value > bounds.max {
            Some(EnvBreach::Above {
                channel,
                value,
                max: bounds.max,
            })
        } else {
            None
        };
        if let Some(breach) = breach {
            alarms.push(Alarm {
                object_id: reading.object_id.clone(),
                timestamp: reading.timestamp,
                detail: AlarmDetail::Environmental(breach),
            });
        }
    }
    if reading.mechanical_event && !thresholds.mechanical_events_allowed {
        alarms.push(Alarm {
            object_id: reading.object_id.clone(),
            timestamp: reading.timestamp,
            detail: AlarmDetail::Environmental(EnvBreach::MechanicalEvent),
        });
    }
    alarms
}

/// The server instance: museum registry, live state, and the log.
#[derive(Debug, Clone)]
pub struct WirelessServer {
    museum: Arc<Museum>,
    state: LiveState,
    log: EventLog,
    diagnostics: Vec<Diagnostic>,
}

impl WirelessServer {
    pub fn new(museum: Arc<Museum>) -> Self {
        WirelessServer {
            museum,
            state: LiveState::new(),
            log: EventLog::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn state(&self) -> &LiveState {
        &self.state
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn into_parts(self) -> (LiveState, EventLog, Vec<Diagnostic>) {
        (self.state, self.log, self.diagnostics)
    }

    pub fn occupancy(&self) -> usize {
        self.state.occupancy()
    }

    /// Current dwellers per exhibit, with zeros for quiet objects.
    pub fn crowd_snapshot(&self) -> BTreeMap<ObjectId, u32> {
        let mut snapshot: BTreeMap<ObjectId, u32> = self
            .museum
            .objects
            .keys()
            .map(|id| (id.clone(), 0))
            .collect();
        for (object_id, count) in &self.state.per_object_crowd {
            snapshot.insert(object_id.clone(), *count);
        }
        snapshot
    }

    /// Ingest one message: validate, translate to events, run detectors,
    /// apply. Stale or unknown-subject messages leave the state untouched.
    pub fn ingest(&mut self, msg: &Message) -> Result<IngestOutcome, IngestError> {
        if msg.timestamp < self.state.watermark {
            return Err(IngestError::StaleMessage {
                timestamp: msg.timestamp,
                watermark: self.state.watermark,
            });
        }

        let mut outcome = IngestOutcome::default();
        let t = msg.timestamp;
        let kind = msg.kind();

        // Validation helpers; errors must precede any state change.
        macro_rules! require_ticket {
            ($ticket:expr) => {
                if !self.state.tickets.contains_key($ticket) {
                    return Err(IngestError::UnknownSubject {
                        subject: format!("ticket {}", $ticket),
                        kind,
                    });
                }
            };
        }
        macro_rules! require_object {
            ($object:expr) => {
                if !self.museum.objects.contains_key($object) {
                    return Err(IngestError::UnknownSubject {
                        subject: format!("object {}", $object),
                        kind,
                    });
                }
            };
        }
        macro_rules! require_gate {
            ($gate:expr) => {
                if !self.museum.is_gate($gate) {
                    return Err(IngestError::UnknownSubject {
                        subject: format!("gate {}", $gate),
                        kind,
                    });
                }
            };
        }

        match &msg.body {
            MessageBody::StUplink(uplink) => match uplink {
                StUplink::TicketIssued { ticket_id } => {
                    if self.state.tickets.contains_key(ticket_id) {
                        outcome.diagnostics.push(Diagnostic::DuplicateTicketIssued {
                            ticket_id: ticket_id.clone(),
                            timestamp: t,
                        });
                    } else {
                        self.push_event(
                            t,
                            EventBody::TicketIssued {
                                ticket_id: ticket_id.clone(),
                            },
                            &mut outcome,
                        );
                    }
                }
                StUplink::Payment {
                    ticket_id,
                    amount_cents,
                } => {
                    require_ticket!(ticket_id);
                    self.push_event(
                        t,
                        EventBody::PaymentReceived {
                            ticket_id: ticket_id.clone(),
                            amount_cents: *amount_cents,
                        },
                        &mut outcome,
                    );
                }
                StUplink::LanguageChosen {
                    ticket_id,
                    language,
                } => {
                    require_ticket!(ticket_id);
                    self.push_event(
                        t,
                        EventBody::LanguageChosen {
                            ticket_id: ticket_id.clone(),
                            language: language.clone(),
                        },
                        &mut outcome,
                    );
                }
                StUplink::Survey {
                    ticket_id,
                    response,
                    visited,
                } => {
                    require_ticket!(ticket_id);
                    if self.state.tickets[ticket_id].surveyed {
                        outcome.diagnostics.push(Diagnostic::DuplicateSurvey {
                            ticket_id: ticket_id.clone(),
                            timestamp: t,
                        });
                    } else {
                        self.push_event(
                            t,
                            EventBody::SurveySubmitted {
                                ticket_id: ticket_id.clone(),
                                response: response.clone(),
                                visited: visited.clone(),
                            },
                            &mut outcome,
                        );
                    }
                }
                StUplink::TicketReturned { ticket_id } => {
                    require_ticket!(ticket_id);
                    if self.state.inside.contains(ticket_id) {
                        outcome.diagnostics.push(Diagnostic::ReturnedWhileInside {
                            ticket_id: ticket_id.clone(),
                            timestamp: t,
                        });
                    }
                    self.push_event(
                        t,
                        EventBody::TicketReturned {
                            ticket_id: ticket_id.clone(),
                        },
                        &mut outcome,
                    );
                }
            },

            MessageBody::CrFix { subject, polar } => {
                match subject {
                    Subject::Ticket(ticket_id) => require_ticket!(ticket_id),
                    Subject::Object(object_id) => require_object!(object_id),
                }
                self.push_event(
                    t,
                    EventBody::LocationFix {
                        subject: subject.clone(),
                        polar: *polar,
                    },
                    &mut outcome,
                );
                if let Subject::Object(object_id) = subject {
                    let object = &self.museum.objects[object_id];
                    if let Some(alarm) = detect_location_change(
                        object,
                        *polar,
                        self.museum.location_change_epsilon(),
                        self.museum.central_reader.position,
                        t,
                    ) {
                        self.push_alarm(t, alarm, &mut outcome);
                    }
                }
            }

            MessageBody::StSensedByCr { ticket_id } => {
                require_ticket!(ticket_id);
                // Reader-internal step; the follow-up fix (kind 2) carries the fact.
            }
            MessageBody::ObjectSensedByCr { object_id } => {
                require_object!(object_id);
            }

            MessageBody::GateIn(body) => match body {
                GateInBody::VisitorEntry {
                    ticket_id,
                    gate_id,
                    language,
                } => {
                    require_ticket!(ticket_id);
                    require_gate!(gate_id);
                    let status = &self.state.tickets[ticket_id];
                    if !status.paid {
                        outcome.diagnostics.push(Diagnostic::GateRejectedUnpaid {
                            ticket_id: ticket_id.clone(),
                            gate_id: gate_id.clone(),
                            timestamp: t,
                        });
                    } else if self.state.inside.contains(ticket_id) {
                        outcome
                            .diagnostics
                            .push(Diagnostic::GateRejectedAlreadyInside {
                                ticket_id: ticket_id.clone(),
                                gate_id: gate_id.clone(),
                                timestamp: t,
                            });
                    } else {
                        if status.language.is_none() {
                            self.push_event(
                                t,
                                EventBody::LanguageChosen {
                                    ticket_id: ticket_id.clone(),
                                    language: language.clone(),
                                },
                                &mut outcome,
                            );
                        }
                        self.push_event(
                            t,
                            EventBody::GateEntry {
                                ticket_id: ticket_id.clone(),
                                gate_id: gate_id.clone(),
                                language: language.clone(),
                            },
                            &mut outcome,
                        );
                    }
                }
                GateInBody::ObjectWarning { object_id, gate_id } => {
                    require_object!(object_id);
                    require_gate!(gate_id);
                    // Transport echo of the RF sensing (kind 6); already recorded.
                }
            },

            MessageBody::ObjectSensedAtGateIn { object_id, gate_id }
            | MessageBody::ObjectSensedAtGateOut { object_id, gate_id } => {
                require_object!(object_id);
                require_gate!(gate_id);
                let tag = self.museum.objects[object_id].tag.clone();
                self.push_event(
                    t,
                    EventBody::TagSensedAtGate {
                        tag_id: tag.id.clone(),
                        tag_kind: TagKind::ObjectTag,
                        gate_id: gate_id.clone(),
                    },
                    &mut outcome,
                );
                let reader = self.museum.gate_readers[gate_id].clone();
                if let Some(alarm) = detect_theft_at_gate(&tag, &reader, gate_id, t) {
                    self.push_alarm(t, alarm, &mut outcome);
                }
            }

            MessageBody::GateOut(body) => match body {
                GateOutBody::VisitorExit { ticket_id, gate_id } => {
                    require_ticket!(ticket_id);
                    require_gate!(gate_id);
                    if !self.state.inside.contains(ticket_id) {
                        outcome.diagnostics.push(Diagnostic::ExitRejectedNotInside {
                            ticket_id: ticket_id.clone(),
                            gate_id: gate_id.clone(),
                            timestamp: t,
                        });
                    } else {
                        self.push_event(
                            t,
                            EventBody::GateExit {
                                ticket_id: ticket_id.clone(),
                                gate_id: gate_id.clone(),
                            },
                            &mut outcome,
                        );
                    }
                }
                GateOutBody::ObjectWarning { object_id, gate_id } => {
                    require_object!(object_id);
                    require_gate!(gate_id);
                }
            },

            MessageBody::TicketSensedAtGateIn { ticket_id, gate_id }
            | MessageBody::TicketSensedAtGateOut { ticket_id, gate_id } => {
                require_ticket!(ticket_id);
                require_gate!(gate_id);
                self.push_event(
                    t,
                    EventBody::TagSensedAtGate {
                        tag_id: TagId::new(ticket_id.as_str()),
                        tag_kind: TagKind::TicketTag,
                        gate_id: gate_id.clone(),
                    },
                    &mut outcome,
                );
            }

            MessageBody::ObjectReadBySt {
                ticket_id,
                object_id,
            } => {
                require_ticket!(ticket_id);
                require_object!(object_id);
                if !self.state.inside.contains(ticket_id) {
                    outcome.diagnostics.push(Diagnostic::ReadOutsideMuseum {
                        ticket_id: ticket_id.clone(),
                        object_id: object_id.clone(),
                        timestamp: t,
                    });
                } else {
                    let requested = self.state.tickets[ticket_id]
                        .language
                        .clone()
                        .unwrap_or_else(|| self.museum.default_language().clone());
                    let object = &self.museum.objects[object_id];
                    let lookup = crate::guidance::lookup_object_info(
                        object,
                        &requested,
                        self.museum.default_language(),
                    );
                    // Info presence per configured language is validated at
                    // load, so a read can always be served.
                    let lookup = lookup.expect("validated objects always have info");
                    self.push_event(
                        t,
                        EventBody::ObjectInfoRead {
                            ticket_id: ticket_id.clone(),
                            object_id: object_id.clone(),
                            language: lookup.language,
                            fallback: lookup.fallback,
                        },
                        &mut outcome,
                    );
                }
            }

            MessageBody::SensorTelemetry { reading } => {
                require_object!(&reading.object_id);
                self.push_event(
                    t,
                    EventBody::SensorTelemetry {
                        reading: reading.clone(),
                    },
                    &mut outcome,
                );
                let thresholds = self.museum.objects[&reading.object_id].thresholds.clone();
                for alarm in check_environment(reading, &thresholds) {
                    self.push_alarm(t, alarm, &mut outcome);
                }
            }
        }

        self.diagnostics.extend(outcome.diagnostics.iter().cloned());
        Ok(outcome)
    }

    fn push_event(&mut self, timestamp: Timestamp, body: EventBody, outcome: &mut IngestOutcome) {
        let event = self
            .log
            .append(timestamp, body)
            .expect("ingest enforces the watermark, so timestamps are monotone")
            .clone();
        self.state.apply_event(&event);
        outcome.events.push(event);
    }

    fn push_alarm(&mut self, timestamp: Timestamp, alarm: Alarm, outcome: &mut IngestOutcome) {
        outcome.alarms.push(alarm.clone());
        self.push_event(timestamp, EventBody::AlarmRaised { alarm }, outcome);
    }
}
