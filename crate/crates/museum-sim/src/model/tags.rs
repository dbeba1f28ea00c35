//! Tag identities and the hybrid active/passive tag model.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Opaque identifier of an RFID tag. Unique across all objects and tickets;
/// never reassigned.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TagId(pub String);

impl TagId {
    pub fn new(id: impl Into<String>) -> Self {
        TagId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TagId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TagId {
    fn from(s: &str) -> Self {
        TagId(s.to_owned())
    }
}

/// What kind of entity carries the tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TagKind {
    /// Tag fixed to an exhibit object (always a hybrid tag).
    ObjectTag,
    /// Tag embedded in a visitor's smart ticket.
    TicketTag,
}

/// Active/passive hybrid tag: transmits at long range while its battery
/// holds, and stays readable at short (passive) range when it does not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridTag {
    pub id: TagId,
    pub battery_charged: bool,
    pub kind: TagKind,
}

impl HybridTag {
    pub fn object(id: impl Into<String>, battery_charged: bool) -> Self {
        HybridTag {
            id: TagId::new(id),
            battery_charged,
            kind: TagKind::ObjectTag,
        }
    }

    pub fn ticket(id: impl Into<String>) -> Self {
        HybridTag {
            id: TagId::new(id),
            battery_charged: true,
            kind: TagKind::TicketTag,
        }
    }
}
