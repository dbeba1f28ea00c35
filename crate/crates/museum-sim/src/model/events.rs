//! The append-only event log: every server-visible fact, in order.
//!
//! Persisted as newline-delimited JSON, one event per line with fields
//! `seq`, `timestamp`, and a `kind`-tagged `body`. The log file is the
//! interchange format between the `run`, `report`, and `replay` commands.

use super::alarms::Alarm;
use super::geometry::PolarCoord;
use super::map::NodeId;
use super::messages::Subject;
use super::objects::{LanguageCode, ObjectId, SensorReading};
use super::tags::{TagId, TagKind};
use super::tickets::{SurveyResponse, TicketId};
use crate::Timestamp;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventBody {
    TicketIssued {
        ticket_id: TicketId,
    },
    PaymentReceived {
        ticket_id: TicketId,
        amount_cents: i64,
    },
    LanguageChosen {
        ticket_id: TicketId,
        language: LanguageCode,
    },
    GateEntry {
        ticket_id: TicketId,
        gate_id: NodeId,
        language: LanguageCode,
    },
    GateExit {
        ticket_id: TicketId,
        gate_id: NodeId,
    },
    TagSensedAtGate {
        tag_id: TagId,
        tag_kind: TagKind,
        gate_id: NodeId,
    },
    ObjectInfoRead {
        ticket_id: TicketId,
        object_id: ObjectId,
        language: LanguageCode,
        fallback: bool,
    },
    LocationFix {
        subject: Subject,
        polar: PolarCoord,
    },
    SensorTelemetry {
        reading: SensorReading,
    },
    SurveySubmitted {
        ticket_id: TicketId,
        response: SurveyResponse,
        visited: Vec<ObjectId>,
    },
    AlarmRaised {
        alarm: Alarm,
    },
    TicketReturned {
        ticket_id: TicketId,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Gapless, strictly increasing, assigned by the log.
    pub seq: u64,
    pub timestamp: Timestamp,
    #[serde(flatten)]
    pub body: EventBody,
}

#[derive(Debug, Error)]
pub enum EventLogError {
    #[error("timestamp {timestamp} is older than the log tail {tail}")]
    NonMonotonicTimestamp { timestamp: Timestamp, tail: Timestamp },
    #[error("line {line}: {source}")]
    Malformed {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: expected seq {expected}, found {found}")]
    SequenceGap {
        line: usize,
        expected: u64,
        found: u64,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Append-only, timestamp-ordered event log.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    pub fn new() -> Self {
        EventLog { events: Vec::new() }
    }

    /// Append a fact. Sequence numbers are assigned here; timestamps must be
    /// non-decreasing in log order.
    pub fn append(
        &mut self,
        timestamp: Timestamp,
        body: EventBody,
    ) -> Result<&Event, EventLogError> {
        if let Some(tail) = self.events.last() {
            if timestamp < tail.timestamp {
                return Err(EventLogError::NonMonotonicTimestamp {
                    timestamp,
                    tail: tail.timestamp,
                });
            }
        }
        let seq = self.events.len() as u64;
        self.events.push(Event {
            seq,
            timestamp,
            body,
        });
        Ok(self.events.last().unwrap())
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn last_timestamp(&self) -> Option<Timestamp> {
        self.events.last().map(|e| e.timestamp)
    }

    /// Serialize as newline-delimited JSON.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), EventLogError> {
        for event in &self.events {
            serde_json::to_writer(&mut out, event)
                .map_err(|e| EventLogError::Io(std::io::Error::other(e)))?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    /// Read a newline-delimited log, checking sequence continuity.
    pub fn read_jsonl<R: Read>(input: R) -> Result<Self, EventLogError> {
        let reader = BufReader::new(input);
        let mut log = EventLog::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let event: Event = serde_json::from_str(&line)
                .map_err(|source| EventLogError::Malformed { line: i + 1, source })?;
            let expected = log.events.len() as u64;
            if event.seq != expected {
                return Err(EventLogError::SequenceGap {
                    line: i + 1,
                    expected,
                    found: event.seq,
                });
            }
            if let Some(tail) = log.events.last() {
                if event.timestamp < tail.timestamp {
                    return Err(EventLogError::NonMonotonicTimestamp {
                        timestamp: event.timestamp,
                        tail: tail.timestamp,
                    });
                }
            }
            log.events.push(event);
        }
        Ok(log)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, EventLogError> {
        Self::read_jsonl(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), EventLogError> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_jsonl(&mut file)?;
        file.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seq_is_gapless_and_timestamps_monotonic() {
        let mut log = EventLog::new();
        log.append(0, EventBody::TicketIssued { ticket_id: TicketId::new("t1") })
            .unwrap();
        log.append(5, EventBody::PaymentReceived { ticket_id: TicketId::new("t1"), amount_cents: 1500 })
            .unwrap();
        log.append(5, EventBody::LanguageChosen { ticket_id: TicketId::new("t1"), language: "fa".into() })
            .unwrap();
        assert_eq!(log.events()[0].seq, 0);
        assert_eq!(log.events()[1].seq, 1);
        assert_eq!(log.events()[2].seq, 2);

        let err = log
            .append(4, EventBody::TicketReturned { ticket_id: TicketId::new("t1") })
            .unwrap_err();
        assert!(matches!(err, EventLogError::NonMonotonicTimestamp { .. }));
    }

    #[test]
    fn jsonl_round_trip() {
        let mut log = EventLog::new();
        log.append(0, EventBody::TicketIssued { ticket_id: TicketId::new("t1") })
            .unwrap();
        log.append(
            3,
            EventBody::LocationFix {
                subject: Subject::Object(ObjectId::new("o1")),
                polar: PolarCoord::new(5.0, 0.25),
            },
        )
        .unwrap();
        let text = log.to_jsonl();
        let back = EventLog::read_jsonl(text.as_bytes()).unwrap();
        assert_eq!(log, back);
    }

    #[test]
    fn sequence_gap_rejected_on_read() {
        let mut log = EventLog::new();
        log.append(0, EventBody::TicketIssued { ticket_id: TicketId::new("t1") })
            .unwrap();
        log.append(1, EventBody::TicketReturned { ticket_id: TicketId::new("t1") })
            .unwrap();
        let mut text = log.to_jsonl();
        // Drop the first line: the remaining event claims seq 1.
        text = text.lines().skip(1).collect::<Vec<_>>().join("\n");
        let err = EventLog::read_jsonl(text.as_bytes()).unwrap_err();
        assert!(matches!(err, EventLogError::SequenceGap { .. }));
    }
}
