//! Cartesian and polar coordinates on the museum floor plane.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point on the common floor plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance_to(&self, other: Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Polar coordinates relative to some origin (the central reader).
///
/// Canonical form: `r >= 0`, `theta` in `(-pi, pi]`, and `theta == 0`
/// whenever `r == 0`, so equal points compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarCoord {
    pub r: f64,
    pub theta: f64,
}

impl PolarCoord {
    /// Build a canonical polar coordinate. Negative radii are folded through
    /// the origin; theta is wrapped into `(-pi, pi]`.
    pub fn new(r: f64, theta: f64) -> Self {
        let (r, theta) = if r < 0.0 { (-r, theta + PI) } else { (r, theta) };
        if r == 0.0 {
            return PolarCoord { r: 0.0, theta: 0.0 };
        }
        PolarCoord {
            r,
            theta: wrap_angle(theta),
        }
    }

    /// Polar coordinates of `point` as seen from `origin`.
    pub fn from_cartesian(point: Position, origin: Position) -> Self {
        let dx = point.x - origin.x;
        let dy = point.y - origin.y;
        PolarCoord::new(dx.hypot(dy), dy.atan2(dx))
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_canonical() {
        let p = PolarCoord::from_cartesian(Position::new(2.0, 2.0), Position::new(2.0, 2.0));
        assert_eq!(p, PolarCoord { r: 0.0, theta: 0.0 });
    }

    #[test]
    fn three_four_five() {
        let p = PolarCoord::from_cartesian(Position::new(3.0, 4.0), Position::new(0.0, 0.0));
        assert!((p.r - 5.0).abs() < 1e-12);
        assert!((p.theta - (4.0f64).atan2(3.0)).abs() < 1e-12);
    }

    #[test]
    fn wrap_folds_into_half_open_interval() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-3.5 * PI) - 0.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn negative_radius_folds_through_origin() {
        let p = PolarCoord::new(-2.0, 0.0);
        assert!((p.r - 2.0).abs() < 1e-12);
        assert!((p.theta - PI).abs() < 1e-12);
    }
}
