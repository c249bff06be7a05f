//! Closed-form kinematic limits for cornering and lane changes.

use crate::math;
use crate::model::Lanelet;

/// Highest speed at which a curve of curvature `curvature` (1/m) can be
/// driven with lateral acceleration `a_max`. Infinite on straight lines.
pub fn max_corner_speed(curvature: f64, a_max: f64) -> f64 {
    if curvature <= 0.0 {
        f64::INFINITY
    } else {
        math::sqrt(a_max / curvature)
    }
}

/// Shortest duration of a lateral move by `d_eta` under `a_max`.
pub fn min_lane_change_time(d_eta: f64, a_max: f64) -> f64 {
    math::sqrt(4.0 * d_eta.max(0.0) / a_max)
}

/// [`min_lane_change_time`] in whole time steps, at least one.
pub fn min_lane_change_steps(d_eta: f64, a_max: f64, dt: f64) -> usize {
    (math::ceil_tol(min_lane_change_time(d_eta, a_max) / dt) as usize).max(1)
}

/// Mean distance from points of `a`'s centerline, sampled every metre, to
/// the centerline of `b`.
pub fn lateral_separation(a: &Lanelet, b: &Lanelet) -> f64 {
    let n = math::floor_tol(a.length()) as usize;
    let total: f64 = (0..=n).map(|k| b.project(a.point_at(k as f64)).distance).sum();
    total / (n + 1) as f64
}
