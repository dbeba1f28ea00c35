//! Exhibit objects, their sensor circuits, and environmental thresholds.

use super::geometry::PolarCoord;
use super::tags::HybridTag;
use crate::Timestamp;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Identifier of an exhibit object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub String);

impl ObjectId {
    pub fn new(id: impl Into<String>) -> Self {
        ObjectId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObjectId {
    fn from(s: &str) -> Self {
        ObjectId(s.to_owned())
    }
}

/// Language code as used in configuration and info records ("en", "fa", ...).
pub type LanguageCode = String;

/// The scalar channels measured by an object circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorChannel {
    Temperature,
    Pressure,
    Humidity,
    Light,
    Ph,
    Gas,
}

impl SensorChannel {
    /// Fixed evaluation order used by the threshold checker and reports.
    pub const ALL: [SensorChannel; 6] = [
        SensorChannel::Temperature,
        SensorChannel::Pressure,
        SensorChannel::Humidity,
        SensorChannel::Light,
        SensorChannel::Ph,
        SensorChannel::Gas,
    ];
}

impl fmt::Display for SensorChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SensorChannel::Temperature => "temperature",
            SensorChannel::Pressure => "pressure",
            SensorChannel::Humidity => "humidity",
            SensorChannel::Light => "light",
            SensorChannel::Ph => "ph",
            SensorChannel::Gas => "gas",
        };
        f.write_str(name)
    }
}

/// Closed interval of acceptable values for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

impl Bounds {
    pub fn contains(&self, value: f64) -> bool {
        self.min <= value && value <= self.max
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }
}

/// Acceptable environmental envelope for one object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvThresholds {
    pub temperature: Bounds,
    pub pressure: Bounds,
    pub humidity: Bounds,
    pub light: Bounds,
    pub ph: Bounds,
    pub gas: Bounds,
    pub mechanical_events_allowed: bool,
}

impl EnvThresholds {
    pub fn bounds(&self, channel: SensorChannel) -> Bounds {
        match channel {
            SensorChannel::Temperature => self.temperature,
            SensorChannel::Pressure => self.pressure,
            SensorChannel::Humidity => self.humidity,
            SensorChannel::Light => self.light,
            SensorChannel::Ph => self.ph,
            SensorChannel::Gas => self.gas,
        }
    }

    /// `min <= max` on every channel.
    pub fn is_well_formed(&self) -> bool {
        SensorChannel::ALL.iter().all(|&c| {
            let b = self.bounds(c);
            b.min.is_finite() && b.max.is_finite() && b.min <= b.max
        })
    }
}

/// One telemetry sample from an object circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorReading {
    pub object_id: ObjectId,
    pub timestamp: Timestamp,
    pub temperature: f64,
    pub pressure: f64,
    pub humidity: f64,
    pub light: f64,
    pub ph: f64,
    pub gas: f64,
    pub mechanical_event: bool,
}

impl SensorReading {
    pub fn value(&self, channel: SensorChannel) -> f64 {
        match channel {
            SensorChannel::Temperature => self.temperature,
            SensorChannel::Pressure => self.pressure,
            SensorChannel::Humidity => self.humidity,
            SensorChannel::Light => self.light,
            SensorChannel::Ph => self.ph,
            SensorChannel::Gas => self.gas,
        }
    }

    pub fn set_value(&mut self, channel: SensorChannel, value: f64) {
        match channel {
            SensorChannel::Temperature => self.temperature = value,
            SensorChannel::Pressure => self.pressure = value,
            SensorChannel::Humidity => self.humidity = value,
            SensorChannel::Light => self.light = value,
            SensorChannel::Ph => self.ph = value,
            SensorChannel::Gas => self.gas = value,
        }
    }

    /// Reading sitting exactly at the interval midpoints, with no event.
    pub fn nominal(object_id: ObjectId, timestamp: Timestamp, thresholds: &EnvThresholds) -> Self {
        SensorReading {
            object_id,
            timestamp,
            temperature: thresholds.temperature.midpoint(),
            pressure: thresholds.pressure.midpoint(),
            humidity: thresholds.humidity.midpoint(),
            light: thresholds.light.midpoint(),
            ph: thresholds.ph.midpoint(),
            gas: thresholds.gas.midpoint(),
            mechanical_event: false,
        }
    }
}

/// An exhibit object: hybrid tag, registered home location relative to the
/// central reader, per-language info records, and environmental thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhibitObject {
    pub object_id: ObjectId,
    pub tag: HybridTag,
    pub home_polar: PolarCoord,
    /// Opaque info record per language (the artifact does not render content).
    pub info: BTreeMap<LanguageCode, String>,
    pub thresholds: EnvThresholds,
}

#[cfg(test)]
pub(crate) fn test_thresholds() -> EnvThresholds {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nominal_reading_sits_inside_every_bound() {
        let t = test_thresholds();
        let r = SensorReading::nominal(ObjectId::new("o1"), 0, &t);
        for channel in SensorChannel::ALL {
            assert!(t.bounds(channel).contains(r.value(channel)));
        }
        assert!(!r.mechanical_event);
    }

    #[test]
    fn thresholds_well_formed() {
        let mut t = test_thresholds();
        assert!(t.is_well_formed());
        t.ph = Bounds { min: 9.0, max: 2.0 };
        assert!(!t.is_well_formed());
    }
}
