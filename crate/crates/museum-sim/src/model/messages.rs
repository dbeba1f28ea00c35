//! The twelve device-to-device message kinds and their RF/Wi-Fi link
//! classification.
//!
//! Kind 13 (the server's internet uplink) carries no modeled protocol and is
//! representable only as a classification error.

use super::geometry::PolarCoord;
use super::map::NodeId;
use super::objects::{LanguageCode, ObjectId, SensorReading};
use super::tickets::{SurveyResponse, TicketId};
use crate::Timestamp;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Physical link a message travels on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Link {
    Rf,
    WiFi,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    /// Kind 13 is the internet uplink; it has no RF/Wi-Fi classification.
    #[error("message kind 13 (internet uplink) is unclassified")]
    Unclassified,
    #[error("message kind {0} is outside 1..=13")]
    DomainError(u8),
}

/// Classify a message kind as RF or Wi-Fi.
///
/// RF: 3, 4, 6, 8, 9, 10, 11. Wi-Fi: 1, 2, 5, 7, 12. Kind 13 is
/// unclassified; anything outside 1..=13 is a domain error.
pub fn classify_link(kind: u8) -> Result<Link, LinkError> {
    match kind {
        3 | 4 | 6 | 8 | 9 | 10 | 11 => Ok(Link::Rf),
        1 | 2 | 5 | 7 | 12 => Ok(Link::WiFi),
        13 => Err(LinkError::Unclassified),
        other => Err(LinkError::DomainError(other)),
    }
}

/// The entity a central-reader fix refers to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Ticket(TicketId),
    Object(ObjectId),
}

impl Subject {
    pub fn id_str(&self) -> &str {
        match self {
            Subject::Ticket(t) => t.as_str(),
            Subject::Object(o) => o.as_str(),
        }
    }
}

/// Payload variants bundled into message 1 (smart ticket to server).
///
/// The paper folds ticket registration, payment, language choice, polls and
/// visited-object identifiers into a single uplink; each variant here is one
/// of those services.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "service", rename_all = "snake_case")]
pub enum StUplink {
    TicketIssued {
        ticket_id: TicketId,
    },
    Payment {
        ticket_id: TicketId,
        amount_cents: i64,
    },
    LanguageChosen {
        ticket_id: TicketId,
        language: LanguageCode,
    },
    Survey {
        ticket_id: TicketId,
        response: SurveyResponse,
        visited: Vec<ObjectId>,
    },
    TicketReturned {
        ticket_id: TicketId,
    },
}

/// Message 5: what an entry-gate reader reports to the server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum GateInBody {
    VisitorEntry {
        ticket_id: TicketId,
        gate_id: NodeId,
        language: LanguageCode,
    },
    /// An object tag passed the entry gate (suspected theft).
    ObjectWarning { object_id: ObjectId, gate_id: NodeId },
}

/// Message 7: what an exit-gate reader reports to the server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum GateOutBody {
    VisitorExit { ticket_id: TicketId, gate_id: NodeId },
    /// An object tag passed the exit gate (suspected theft).
    ObjectWarning { object_id: ObjectId, gate_id: NodeId },
}

/// Body of one message, tagged by kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MessageBody {
    /// 1 (Wi-Fi): smart ticket uplink to the server.
    StUplink(StUplink),
    /// 2 (Wi-Fi): central reader sends a polar fix for an object or visitor.
    CrFix { subject: Subject, polar: PolarCoord },
    /// 3 (RF): a smart-ticket tag is read by the central reader.
    StSensedByCr { ticket_id: TicketId },
    /// 4 (RF): an object tag is read by the central reader.
    ObjectSensedByCr { object_id: ObjectId },
    /// 5 (Wi-Fi): entry-gate report to the server.
    GateIn(GateInBody),
    /// 6 (RF): an object tag is sensed by the entry-gate reader.
    ObjectSensedAtGateIn { object_id: ObjectId, gate_id: NodeId },
    /// 7 (Wi-Fi): exit-gate report to the server.
    GateOut(GateOutBody),
    /// 8 (RF): an object tag is sensed by the exit-gate reader.
    ObjectSensedAtGateOut { object_id: ObjectId, gate_id: NodeId },
    /// 9 (RF): a smart-ticket tag is sensed by the entry-gate reader.
    TicketSensedAtGateIn { ticket_id: TicketId, gate_id: NodeId },
    /// 10 (RF): the smart ticket reads an object tag at an exhibit.
    ObjectReadBySt { ticket_id: TicketId, object_id: ObjectId },
    /// 11 (RF): a smart-ticket tag is sensed by the exit-gate reader.
    TicketSensedAtGateOut { ticket_id: TicketId, gate_id: NodeId },
    /// 12 (Wi-Fi): object circuit telemetry to the server.
    SensorTelemetry { reading: SensorReading },
}

impl MessageBody {
    pub fn kind(&self) -> u8 {
        match self {
            MessageBody::StUplink(_) => 1,
            MessageBody::CrFix { .. } => 2,
            MessageBody::StSensedByCr { .. } => 3,
            MessageBody::ObjectSensedByCr { .. } => 4,
            MessageBody::GateIn(_) => 5,
            MessageBody::ObjectSensedAtGateIn { .. } => 6,
            MessageBody::GateOut(_) => 7,
            MessageBody::ObjectSensedAtGateOut { .. } => 8,
            MessageBody::TicketSensedAtGateIn { .. } => 9,
            MessageBody::ObjectReadBySt { .. } => 10,
            MessageBody::TicketSensedAtGateOut { .. } => 11,
            MessageBody::SensorTelemetry { .. } => 12,
        }
    }
}

/// One timestamped message. The link is derived from the kind, so a message
/// with a mismatched classification cannot be constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub timestamp: Timestamp,
    pub body: MessageBody,
}

impl Message {
    pub fn new(timestamp: Timestamp, body: MessageBody) -> Self {
        Message { timestamp, body }
    }

    pub fn kind(&self) -> u8 {
        self.body.kind()
    }

    pub fn link(&self) -> Link {
        // Total on every constructible body.
        classify_link(self.kind()).expect("kinds 1..=12 are always classified")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig3_partition() {
        for kind in [3u8, 4, 6, 8, 9, 10, 11] {
            assert_eq!(classify_link(kind), Ok(Link::Rf), "kind {kind}");
        }
        for kind in [1u8, 2, 5, 7, 12] {
            assert_eq!(classify_link(kind), Ok(Link::WiFi), "kind {kind}");
        }
        assert_eq!(classify_link(13), Err(LinkError::Unclassified));
        assert_eq!(classify_link(0), Err(LinkError::DomainError(0)));
        assert_eq!(classify_link(14), Err(LinkError::DomainError(14)));
    }

    #[test]
    fn message_link_matches_classification() {
        let msg = Message::new(
            7,
            MessageBody::ObjectSensedAtGateOut {
                object_id: ObjectId::new("o1"),
                gate_id: NodeId::new("out"),
            },
        );
        assert_eq!(msg.kind(), 8);
        assert_eq!(msg.link(), Link::Rf);
        assert_eq!(classify_link(msg.kind()), Ok(msg.link()));
    }
}
