//! Alarms raised by the server: theft at a gate, object displacement, and
//! environmental threshold violations.

use super::map::NodeId;
use super::objects::{ObjectId, SensorChannel};
use crate::Timestamp;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A single environmental violation found in one reading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "breach", rename_all = "snake_case")]
pub enum EnvBreach {
    Below {
        channel: SensorChannel,
        value: f64,
        min: f64,
    },
    Above {
        channel: SensorChannel,
        value: f64,
        max: f64,
    },
    MechanicalEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlarmDetail {
    TheftAtGate { gate_id: NodeId },
    LocationChange { displacement_m: f64 },
    Environmental(EnvBreach),
}

/// An alarm always concerns one exhibit object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alarm {
    pub object_id: ObjectId,
    pub timestamp: Timestamp,
    pub detail: AlarmDetail,
}

impl Alarm {
    pub fn is_theft(&self) -> bool {
        matches!(self.detail, AlarmDetail::TheftAtGate { .. })
    }

    pub fn is_location_change(&self) -> bool {
        matches!(self.detail, AlarmDetail::LocationChange { .. })
    }

    pub fn is_environmental(&self) -> bool {
        matches!(self.detail, AlarmDetail::Environmental(_))
    }
}

impl fmt::Display for Alarm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.detail {
            AlarmDetail::TheftAtGate { gate_id } => {
                write!(f, "[{}] theft: {} sensed at gate {}", self.timestamp, self.object_id, gate_id)
            }
            AlarmDetail::LocationChange { displacement_m } => write!(
                f,
                "[{}] location change: {} moved {:.2} m from home",
                self.timestamp, self.object_id, displacement_m
            ),
            AlarmDetail::Environmental(EnvBreach::Below { channel, value, min }) => write!(
                f,
                "[{}] environment: {} {} = {} below min {}",
                self.timestamp, self.object_id, channel, value, min
            ),
            AlarmDetail::Environmental(EnvBreach::Above { channel, value, max }) => write!(
                f,
                "[{}] environment: {} {} = {} above max {}",
                self.timestamp, self.object_id, channel, value, max
            ),
            AlarmDetail::Environmental(EnvBreach::MechanicalEvent) => write!(
                f,
                "[{}] environment: {} mechanical event",
                self.timestamp, self.object_id
            ),
        }
    }
}
