//! Set arithmetic in the longitudinal position–velocity plane.
//!
//! Sets are finite unions of convex polygons ([`PVRegion`]). Every part is
//! kept counter-clockwise and may be degenerate (a single point or a
//! segment), which is what a point seed looks like after zero or one
//! propagation steps.

mod poly;
mod region;

pub use poly::{ConvexPoly, HalfPlane};
pub use region::{PVRegion, SetError};

use crate::interval::Interval;
use core::ops::{Add, Mul, Neg, Sub};

/// Points closer than this are merged when building hulls.
pub const DEDUP_EPS: f64 = 1e-9;
/// A hull vertex closer than this to the chord of its neighbours is dropped.
pub const COLLINEAR_EPS: f64 = 1e-11;
/// Slack used when clipping against half-planes.
pub const CLIP_EPS: f64 = 1e-10;

/// A state of the longitudinal double integrator.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PVPoint {
    /// Longitudinal position along the lanelet centerline (m).
    pub xi: f64,
    /// Velocity (m/s).
    pub v: f64,
}

impl PVPoint {
    pub const fn new(xi: f64, v: f64) -> Self {
        Self { xi, v }
    }

    pub fn dot(self, o: PVPoint) -> f64 {
        self.xi * o.xi + self.v * o.v
    }

    pub fn cross(self, o: PVPoint) -> f64 {
        self.xi * o.v - self.v * o.xi
    }

    pub fn norm(self) -> f64 {
        crate::math::hypot(self.xi, self.v)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn is_finite(self) -> bool {
        self.xi.is_finite() && self.v.is_finite()
    }

    /// The unit-shear of the double integrator, `A z` with `A = [[1, dt], [0, 1]]`.
    pub fn shear(self, dt: f64) -> PVPoint {
        PVPoint::new(self.xi + dt * self.v, self.v)
    }

    pub fn unshear(self, dt: f64) -> PVPoint {
        PVPoint::new(self.xi - dt * self.v, self.v)
    }

    /// Euclidean distance after dividing each coordinate by `scale`.
    pub fn scaled_dist(self, o: PVPoint, scale: Scale) -> f64 {
        crate::math::hypot((self.xi - o.xi) / scale.xi, (self.v - o.v) / scale.v)
    }
}

impl Add for PVPoint {
    type Output = PVPoint;
    fn add(self, o: PVPoint) -> PVPoint {
        PVPoint::new(self.xi + o.xi, self.v + o.v)
    }
}

impl Sub for PVPoint {
    type Output = PVPoint;
    fn sub(self, o: PVPoint) -> PVPoint {
        PVPoint::new(self.xi - o.xi, self.v - o.v)
    }
}

impl Mul<f64> for PVPoint {
    type Output = PVPoint;
    fn mul(self, k: f64) -> PVPoint {
        PVPoint::new(self.xi * k, self.v * k)
    }
}

impl Neg for PVPoint {
    type Output = PVPoint;
    fn neg(self) -> PVPoint {
        PVPoint::new(-self.xi, -self.v)
    }
}

/// Input column of the discrete double integrator, `B = [0.5 dt², dt]`.
pub fn input_vector(dt: f64) -> PVPoint {
    PVPoint::new(0.5 * dt * dt, dt)
}

/// One step of the discrete double integrator under constant acceleration.
pub fn step_state(z: PVPoint, accel: f64, dt: f64) -> PVPoint {
    z.shear(dt) + input_vector(dt) * accel
}

/// Metric weights for closest-point queries: 1 m is worth `xi`, 1 m/s is worth `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scale {
    pub xi: f64,
    pub v: f64,
}

impl Default for Scale {
    fn default() -> Self {
        Self { xi: 1.0, v: 1.0 }
    }
}

/// Axis-aligned box in (ξ, v); one free-space cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PVBox {
    pub xi: Interval,
    pub v: Interval,
}

impl PVBox {
    pub fn new(xi: Interval, v: Interval) -> Self {
        Self { xi, v }
    }

    pub fn contains(&self, p: PVPoint) -> bool {
        self.xi.contains(p.xi) && self.v.contains(p.v)
    }

    pub fn area(&self) -> f64 {
        self.xi.len() * self.v.len()
    }

    pub fn to_poly(&self) -> ConvexPoly {
        ConvexPoly::from_box(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_state_matches_closed_form() {
        let z = step_state(PVPoint::new(0.0, 10.0), 2.0, 0.1);
        assert!((z.xi - 1.01).abs() < 1e-12);
        assert!((z.v - 10.2).abs() < 1e-12);
    }

    #[test]
    fn shear_roundtrip() {
        let z = PVPoint::new(3.0, -2.0);
        assert_eq!(z.shear(0.3).unshear(0.3), z);
    }
}
