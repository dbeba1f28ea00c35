//! Geometric stand-in for the physical RF layer: read-range checks and
//! central-reader polar localization with configurable Gaussian noise.

use crate::model::{HybridTag, PolarCoord, Position};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReaderRole {
    GateIn,
    GateOut,
    Central,
    TicketReader,
}

/// A reader installation: position plus passive/active read ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReaderModel {
    pub reader_id: String,
    pub position: Position,
    pub passive_range: f64,
    pub active_range: f64,
    pub role: ReaderRole,
}

impl ReaderModel {
    pub fn new(
        reader_id: impl Into<String>,
        position: Position,
        passive_range: f64,
        active_range: f64,
        role: ReaderRole,
    ) -> Self {
        debug_assert!(passive_range > 0.0 && active_range >= passive_range);
        ReaderModel {
            reader_id: reader_id.into(),
            position,
            passive_range,
            active_range,
            role,
        }
    }
}

/// Noise model for central-reader localization. Sigmas of zero give exact
/// fixes; draws come from the caller-supplied deterministic stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationModel {
    pub noise_sigma_r: f64,
    pub noise_sigma_theta: f64,
}

impl LocalizationModel {
    pub fn exact() -> Self {
        LocalizationModel {
            noise_sigma_r: 0.0,
            noise_sigma_theta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadioError {
    #[error("subject at distance {distance:.3} m is beyond active range {range:.3} m")]
    OutOfRange { distance: f64, range: f64 },
}

/// Can `reader` read `tag` at `distance`?
///
/// A charged tag answers within the active range; a tag with a dead battery
/// only within the passive range. Object tags are hybrid, so gates sense
/// them within passive range no matter the battery.
pub fn can_read(reader: &ReaderModel, tag: &HybridTag, distance: f64) -> bool {
    debug_assert!(distance >= 0.0);
    let range = if tag.battery_charged {
        reader.active_range
    } else {
        reader.passive_range
    };
    distance <= range
}

/// Localize `true_pos` relative to the central reader, adding noise from
/// `rng` per the model. The radius is clamped at zero and the result is in
/// canonical polar form.
pub fn localize<R: Rng>(
    cr: &ReaderModel,
    true_pos: Position,
    model: &LocalizationModel,
    rng: &mut R,
) -> Result<PolarCoord, RadioError> {
    let exact = PolarCoord::from_cartesian(true_pos, cr.position);
    if exact.r > cr.active_range {
        return Err(RadioError::OutOfRange {
            distance: exact.r,
            range: cr.active_range,
        });
    }
    if model.noise_sigma_r == 0.0 && model.noise_sigma_theta == 0.0 {
        return Ok(exact);
    }
    let dr = if model.noise_sigma_r > 0.0 {
        Normal::new(0.0, model.noise_sigma_r)
            .expect("finite sigma")
            .sample(rng)
    } else {
        0.0
    };
    let dtheta = if model.noise_sigma_theta > 0.0 {
        Normal::new(0.0, model.noise_sigma_theta)
            .expect("finite sigma")
            .sample(rng)
    } else {
        0.0
    };
    Ok(PolarCoord::new((exact.r + dr).max(0.0), exact.theta + dtheta))
}

/// Inverse of [`localize`] at zero noise: polar back to the floor plane.
pub fn to_cartesian(polar: PolarCoord, origin: Position) -> Position {
    Position::new(
        origin.x + polar.r * polar.theta.cos(),
        origin.y + polar.r * polar.theta.sin(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TagKind;
    use crate::rng::RngHub;
    use std::f64::consts::PI;

    fn gate() -> ReaderModel {
        ReaderModel::new(
            "pr_in",
            Position::new(0.0, 0.0),
            2.0,
            10.0,
            ReaderRole::GateIn,
        )
    }

    fn central() -> ReaderModel {
        ReaderModel::new(
            "cr",
            Position::new(0.0, 0.0),
            2.0,
            1000.0,
            ReaderRole::Central,
        )
    }

    #[test]
    fn charged_tag_reads_at_active_range() {
        let tag = HybridTag::ticket("t1");
        assert!(can_read(&gate(), &tag, 5.0));
    }

    #[test]
    fn dead_battery_falls_back_to_passive_range() {
        let tag = HybridTag::object("o1", false);
        assert!(!can_read(&gate(), &tag, 5.0));
        assert!(can_read(&gate(), &tag, 1.5));
        assert_eq!(tag.kind, TagKind::ObjectTag);
    }

    #[test]
    fn localize_three_four_five() {
        let mut rng = RngHub::new(1).stream("loc");
        let polar = localize(
            &central(),
            Position::new(3.0, 4.0),
            &LocalizationModel::exact(),
            &mut rng,
        )
        .unwrap();
        assert!((polar.r - 5.0).abs() < 1e-12);
        assert!((polar.theta - (4.0f64).atan2(3.0)).abs() < 1e-12);
    }

    #[test]
    fn localize_origin_is_canonical() {
        let mut rng = RngHub::new(1).stream("loc");
        let polar = localize(
            &central(),
            Position::new(0.0, 0.0),
            &LocalizationModel::exact(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(polar, PolarCoord { r: 0.0, theta: 0.0 });
    }

    #[test]
    fn localize_out_of_range() {
        let mut rng = RngHub::new(1).stream("loc");
        let err = localize(
            &central(),
            Position::new(2000.0, 0.0),
            &LocalizationModel::exact(),
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, RadioError::OutOfRange { .. }));
    }

    #[test]
    fn to_cartesian_identity_and_quarter_turn() {
        let origin = Position::new(2.0, 2.0);
        let p = to_cartesian(PolarCoord { r: 0.0, theta: 0.0 }, origin);
        assert_eq!(p, origin);

        let q = to_cartesian(
            PolarCoord::new(1.0, PI / 2.0),
            Position::new(0.0, 0.0),
        );
        assert!(q.x.abs() < 1e-12);
        assert!((q.y - 1.0).abs() < 1e-12);
    }
}
