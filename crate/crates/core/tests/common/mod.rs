//! Scenario builders and reference geometry shared by the integration tests.

#![allow(dead_code)]

use corridor_core::model::{GoalSpec, InitialState, Lanelet, LaneletId, ObstacleState, ObstacleTimeline};
use corridor_core::{Interval, PVPoint, PlannerConfig, PlanningProblem, Point2, RoadNetwork, Scenario, VehicleParams};

/// Straight lanes along the x axis, lane `j` at `y = j * width`, ids `1..=lanes`.
pub fn straight_road(length: f64, lanes: usize, width: f64, speed_limit: f64) -> RoadNetwork {
    let id = |j: usize| LaneletId(j as u64 + 1);
    let lanelets = (0..lanes)
        .map(|j| {
            let y = j as f64 * width;
            let line = (0..=10).map(|k| Point2::new(length * k as f64 / 10.0, y)).collect();
            let left = (j + 1 < lanes).then(|| id(j + 1));
            let right = (j > 0).then(|| id(j - 1));
            Lanelet::new(id(j), line, width, speed_limit, left, right, vec![]).unwrap()
        })
        .collect();
    RoadNetwork::new(lanelets).unwrap()
}

/// An obstacle standing still at `(x, y)` for 30 s.
pub fn parked(id: u64, x: f64, y: f64, length: f64, width: f64) -> ObstacleTimeline {
    let at = |t| ObstacleState { t, x, y, orientation: 0.0 };
    ObstacleTimeline::new(id, length, width, vec![at(0.0), at(30.0)]).unwrap()
}

/// An obstacle driving along +x at constant speed for 30 s.
pub fn cruising(id: u64, x0: f64, y: f64, speed: f64, length: f64, width: f64) -> ObstacleTimeline {
    let states = (0..=60)
        .map(|k| {
            let t = k as f64 * 0.5;
            ObstacleState { t, x: x0 + speed * t, y, orientation: 0.0 }
        })
        .collect();
    ObstacleTimeline::new(id, length, width, states).unwrap()
}

pub fn scenario(
    network: RoadNetwork,
    obstacles: Vec<ObstacleTimeline>,
    start: (f64, f64, f64),
    goal: (u64, f64, f64),
    time: (f64, f64),
) -> Scenario {
    let problem = PlanningProblem {
        initial: InitialState { x: start.0, y: start.1, v: start.2, orientation: 0.0 },
        goal: GoalSpec {
            lanelet: LaneletId(goal.0),
            xi: Interval { lo: goal.1, hi: goal.2 },
            v: Interval { lo: 0.0, hi: 40.0 },
            time: Interval { lo: time.0, hi: time.1 },
        },
    };
    Scenario::new(network, obstacles, vec![], problem, VehicleParams::default(), PlannerConfig::default()).unwrap()
}

/// Signed distance to a convex counter-clockwise polygon: negative inside.
pub fn poly_dist(verts: &[PVPoint], p: PVPoint) -> f64 {
    let n = verts.len();
    let d = |a: PVPoint, b: PVPoint| ((a.xi - b.xi).powi(2) + (a.v - b.v).powi(2)).sqrt();
    let seg = |a: PVPoint, b: PVPoint| {
        let (ex, ev) = (b.xi - a.xi, b.v - a.v);
        let l2 = ex * ex + ev * ev;
        if l2 == 0.0 {
            return d(a, p);
        }
        let t = (((p.xi - a.xi) * ex + (p.v - a.v) * ev) / l2).clamp(0.0, 1.0);
        d(PVPoint::new(a.xi + t * ex, a.v + t * ev), p)
    };
    match n {
        0 => f64::INFINITY,
        1 => d(verts[0], p),
        2 => seg(verts[0], verts[1]),
        _ => {
            let mut depth = f64::INFINITY;
            for i in 0..n {
                let (a, b) = (verts[i], verts[(i + 1) % n]);
                let h = ((b.xi - a.xi) * (p.v - a.v) - (b.v - a.v) * (p.xi - a.xi)) / d(a, b);
                if h < 0.0 {
                    return (0..n).map(|k| seg(verts[k], verts[(k + 1) % n])).fold(f64::INFINITY, f64::min);
                }
                depth = depth.min(h);
            }
            -depth
        }
    }
}

pub fn region_dist(r: &corridor_core::PVRegion, p: PVPoint) -> f64 {
    r.parts().iter().map(|q| poly_dist(q.vertices(), p)).fold(f64::INFINITY, f64::min)
}

/// Shoelace area of a counter-clockwise polygon.
pub fn shoelace(verts: &[PVPoint]) -> f64 {
    let n = verts.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n).map(|i| verts[i].xi * verts[(i + 1) % n].v - verts[(i + 1) % n].xi * verts[i].v).sum::<f64>()
}

pub fn step(z: PVPoint, a: f64, dt: f64) -> PVPoint {
    PVPoint::new(z.xi + z.v * dt + 0.5 * a * dt * dt, z.v + a * dt)
}
