use super::{rect_corners, ModelError, Point2};
use crate::math;
use alloc::vec::Vec;

/// A sampled pose of an obstacle's center.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ObstacleState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub orientation: f64,
}

/// A rectangular obstacle with a time-sampled trajectory.
///
/// Poses between samples are interpolated linearly (orientation along the
/// shorter arc); outside the sampled range the first or last pose is held.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstacleTimeline {
    pub id: u64,
    pub length: f64,
    pub width: f64,
    states: Vec<ObstacleState>,
}

impl ObstacleTimeline {
    pub fn new(id: u64, length: f64, width: f64, states: Vec<ObstacleState>) -> Result<Self, ModelError> {
        let bad = |reason| Err(ModelError::InvalidObstacle { id, reason });
        if !(length > 0.0 && length.is_finite() && width > 0.0 && width.is_finite()) {
            return bad("length and width must be positive");
        }
        if states.is_empty() {
            return bad("trajectory is empty");
        }
        if states
            .iter()
            .any(|s| !(s.t.is_finite() && s.x.is_finite() && s.y.is_finite() && s.orientation.is_finite()))
        {
            return bad("trajectory contains a non-finite value");
        }
        if states.windows(2).any(|w| w[1].t <= w[0].t) {
            return bad("trajectory times must be strictly increasing");
        }
        Ok(Self { id, length, width, states })
    }

    pub fn states(&self) -> &[ObstacleState] {
        &self.states
    }

    /// Index of the sample segment `[k, k+1]` containing `t`, if inside the range.
    fn segment(&self, t: f64) -> Option<usize> {
        let s = &self.states;
        if s.len() < 2 || t < s[0].t || t >= s[s.len() - 1].t {
            return None;
        }
        Some(s.partition_point(|x| x.t <= t) - 1)
    }

    pub fn pose_at(&self, t: f64) -> ObstacleState {
        let s = &self.states;
        match self.segment(t) {
            Some(k) => {
                let (a, b) = (s[k], s[k + 1]);
                let r = (t - a.t) / (b.t - a.t);
                let dphi = math::wrap_angle(b.orientation - a.orientation);
                ObstacleState {
                    t,
                    x: a.x + r * (b.x - a.x),
                    y: a.y + r * (b.y - a.y),
                    orientation: a.orientation + r * dphi,
                }
            }
            None => {
                let held = if t < s[0].t { s[0] } else { s[s.len() - 1] };
                ObstacleState { t, ..held }
            }
        }
    }

    /// Velocity vector of the interpolated motion at `t`; zero outside the
    /// sampled range.
    pub fn velocity_at(&self, t: f64) -> Point2 {
        match self.segment(t) {
            Some(k) => {
                let (a, b) = (self.states[k], self.states[k + 1]);
                Point2::new(b.x - a.x, b.y - a.y) * (1.0 / (b.t - a.t))
            }
            None => Point2::default(),
        }
    }

    pub fn footprint(&self, t: f64) -> [Point2; 4] {
        let p = self.pose_at(t);
        rect_corners(Point2::new(p.x, p.y), p.orientation, self.length, self.width)
    }

    /// Constant-velocity prediction from the pose and velocity observed at `t0`.
    pub fn constant_velocity_from(&self, t0: f64, duration: f64) -> ObstacleTimeline {
        let p = self.pose_at(t0);
        let v = self.velocity_at(t0);
        let states = if v.norm() == 0.0 {
            alloc::vec![ObstacleState { t: 0.0, ..p }]
        } else {
            alloc::vec![
                ObstacleState { t: 0.0, ..p },
                ObstacleState { t: duration, x: p.x + v.x * duration, y: p.y + v.y * duration, orientation: p.orientation },
            ]
        };
        ObstacleTimeline { id: self.id, length: self.length, width: self.width, states }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    fn st(t: f64, x: f64, phi: f64) -> ObstacleState {
        ObstacleState { t, x, y: 0.0, orientation: phi }
    }

    #[test]
    fn interpolates_and_holds() {
        let o = ObstacleTimeline::new(3, 4.0, 2.0, vec![st(0.0, 0.0, 0.0), st(2.0, 10.0, 0.0)]).unwrap();
        assert_eq!(o.pose_at(1.0).x, 5.0);
        assert_eq!(o.pose_at(5.0).x, 10.0);
        assert_eq!(o.pose_at(-1.0).x, 0.0);
        assert_eq!(o.velocity_at(1.0), Point2::new(5.0, 0.0));
        assert_eq!(o.velocity_at(3.0), Point2::default());
    }

    #[test]
    fn orientation_takes_short_arc() {
        let o = ObstacleTimeline::new(0, 1.0, 1.0, vec![st(0.0, 0.0, PI - 0.1), st(1.0, 0.0, -PI + 0.1)]).unwrap();
        let phi = math::wrap_angle(o.pose_at(0.5).orientation);
        assert!((phi.abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsorted_times() {
        assert!(ObstacleTimeline::new(0, 1.0, 1.0, vec![st(1.0, 0.0, 0.0), st(1.0, 1.0, 0.0)]).is_err());
        assert!(ObstacleTimeline::new(0, 0.0, 1.0, vec![st(0.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn constant_velocity_extrapolation() {
        let o = ObstacleTimeline::new(0, 4.0, 2.0, vec![st(0.0, 0.0, 0.0), st(10.0, 50.0, 0.0)]).unwrap();
        let p = o.constant_velocity_from(2.0, 3.0);
        assert_eq!(p.pose_at(0.0).x, 10.0);
        assert!((p.pose_at(3.0).x - 25.0).abs() < 1e-12);
        assert!((p.pose_at(9.0).x - 25.0).abs() < 1e-12);
    }
}
