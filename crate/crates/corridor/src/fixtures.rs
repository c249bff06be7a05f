//! Hand-built scenarios and a seeded random scenario generator.

use corridor_core::model::{
    GoalSpec, InitialState, Lanelet, LaneletId, ObstacleState, ObstacleTimeline, PlannerConfig, PlanningProblem,
    Point2, RoadNetwork, Scenario, TrafficLightRule, VehicleParams,
};
use corridor_core::Interval;
use rand::Rng;

/// Parallel lanes along a reference polyline, split into `segments`
/// consecutive pieces. Lane 0 is the rightmost. Ids are
/// `1 + segment * lanes + lane`.
pub fn multi_lane_road(reference: &[Point2], lanes: usize, segments: usize, width: f64, speed_limit: f64) -> RoadNetwork {
    let n = reference.len();
    let normals: Vec<Point2> = (0..n)
        .map(|k| {
            let a = reference[k.saturating_sub(1)];
            let b = reference[(k + 1).min(n - 1)];
            let d = b - a;
            (d * (1.0 / d.norm())).perp()
        })
        .collect();
    let cuts: Vec<usize> = (0..=segments).map(|s| s * (n - 1) / segments).collect();
    let id = |s: usize, j: usize| LaneletId((1 + s * lanes + j) as u64);
    let mut out = Vec::new();
    for s in 0..segments {
        for j in 0..lanes {
            let line = (cuts[s]..=cuts[s + 1]).map(|k| reference[k] + normals[k] * (j as f64 * width)).collect();
            let left = (j + 1 < lanes).then(|| id(s, j + 1));
            let right = (j > 0).then(|| id(s, j - 1));
            let succ = if s + 1 < segments { vec![id(s + 1, j)] } else { vec![] };
            out.push(Lanelet::new(id(s, j), line, width, speed_limit, left, right, succ).expect("generated lanelet is valid"));
        }
    }
    RoadNetwork::new(out).expect("generated network is valid")
}

fn straight(length: f64, step: f64) -> Vec<Point2> {
    let n = (length / step).ceil() as usize;
    (0..=n).map(|k| Point2::new(length * k as f64 / n as f64, 0.0)).collect()
}

/// An obstacle driving along `lanelet` at constant speed with a fixed
/// lateral offset, sampled every 0.5 s over `[0, duration]`.
pub fn lane_follower(
    id: u64,
    lanelet: &Lanelet,
    xi0: f64,
    eta: f64,
    speed: f64,
    size: (f64, f64),
    duration: f64,
) -> ObstacleTimeline {
    let n = (duration / 0.5).ceil() as usize;
    let states = (0..=n)
        .map(|k| {
            let t = k as f64 * 0.5;
            let xi = xi0 + speed * t;
            let h = lanelet.heading_at(xi);
            let p = lanelet.point_at(xi) + Point2::from_angle(h).perp() * eta;
            ObstacleState { t, x: p.x, y: p.y, orientation: h }
        })
        .collect();
    ObstacleTimeline::new(id, size.0, size.1, states).expect("generated obstacle is valid")
}

fn problem(x: f64, y: f64, v: f64, goal: LaneletId, xi: (f64, f64), time: (f64, f64)) -> PlanningProblem {
    PlanningProblem {
        initial: InitialState { x, y, v, orientation: 0.0 },
        goal: GoalSpec {
            lanelet: goal,
            xi: Interval { lo: xi.0, hi: xi.1 },
            v: Interval { lo: 0.0, hi: 40.0 },
            time: Interval { lo: time.0, hi: time.1 },
        },
    }
}

/// Two 3 m lanes; a bicycle at the right edge of the right lane is too wide
/// to squeeze past, so the vehicle has to overtake on the left.
pub fn overtake() -> Scenario {
    let net = multi_lane_road(&straight(150.0, 10.0), 2, 1, 3.0, 14.0);
    let bike = lane_follower(1, net.get(LaneletId(1)).unwrap(), 25.0, -1.1, 4.0, (1.8, 0.6), 20.0);
    let p = problem(5.0, 0.0, 10.0, LaneletId(1), (80.0, 150.0), (6.0, 10.0));
    Scenario::new(net, vec![bike], vec![], p, VehicleParams::default(), PlannerConfig::default()).unwrap()
}

/// One 3.5 m lane with a bicycle at η = +1.3 that leaves room to pass.
pub fn partial_occupancy() -> Scenario {
    let net = multi_lane_road(&straight(200.0, 10.0), 1, 1, 3.5, 14.0);
    let bike = lane_follower(1, net.get(LaneletId(1)).unwrap(), 30.0, 1.3, 3.0, (1.8, 0.6), 20.0);
    let p = problem(5.0, 0.0, 10.0, LaneletId(1), (100.0, 200.0), (8.0, 10.0));
    Scenario::new(net, vec![bike], vec![], p, VehicleParams::default(), PlannerConfig::default()).unwrap()
}

/// Two lanes closed by stationary cars closer than the stopping distance
/// plus the minimum gap, but farther than the bare stopping distance.
pub fn blocked_road() -> Scenario {
    let net = multi_lane_road(&straight(120.0, 10.0), 2, 1, 3.5, 14.0);
    let car = |id, lane: u64| lane_follower(id, net.get(LaneletId(lane)).unwrap(), 13.5, 0.0, 0.0, (4.5, 2.0), 20.0);
    let obstacles = vec![car(1, 1), car(2, 2)];
    let p = problem(0.0, 0.0, 10.0, LaneletId(1), (60.0, 120.0), (0.0, 10.0));
    Scenario::new(net, obstacles, vec![], p, VehicleParams::default(), PlannerConfig::default()).unwrap()
}

/// A straight empty lane.
pub fn empty_road() -> Scenario {
    let net = multi_lane_road(&straight(150.0, 10.0), 1, 1, 3.5, 14.0);
    let p = problem(5.0, 0.0, 8.0, LaneletId(1), (60.0, 150.0), (4.0, 8.0));
    Scenario::new(net, vec![], vec![], p, VehicleParams::default(), PlannerConfig::default()).unwrap()
}

/// The hand-built fixtures by file name.
pub fn named() -> Vec<(&'static str, Scenario)> {
    vec![
        ("overtake", overtake()),
        ("partial_occupancy", partial_occupancy()),
        ("blocked_road", blocked_road()),
        ("empty_road", empty_road()),
    ]
}

/// Limits of [`random_scenario`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub max_lanes: usize,
    pub max_segments: usize,
    pub max_lanelets: usize,
    pub max_obstacles: usize,
    /// Planning horizon (s).
    pub horizon: f64,
    pub segment_length: (f64, f64),
    pub curved: bool,
    pub traffic_lights: bool,
}

impl RandomSpec {
    /// Desk-scale benchmark scenarios: up to 8 lanelets and 10 obstacles
    /// over 6 s.
    pub fn bench() -> Self {
        Self {
            max_lanes: 3,
            max_segments: 3,
            max_lanelets: 8,
            max_obstacles: 10,
            horizon: 6.0,
            segment_length: (40.0, 70.0),
            curved: true,
            traffic_lights: true,
        }
    }

    /// Small scenarios for exhaustive checks.
    pub fn small(horizon: f64) -> Self {
        Self {
            max_lanes: 2,
            max_segments: 2,
            max_lanelets: 3,
            max_obstacles: 3,
            horizon,
            segment_length: (12.0, 25.0),
            curved: false,
            traffic_lights: false,
        }
    }
}

/// Random road, obstacles and problem. The result is valid but not
/// necessarily solvable.
pub fn random_scenario<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Scenario {
    let lanes = rng.gen_range(1..=spec.max_lanes.min(spec.max_lanelets));
    let max_seg = spec.max_segments.min(spec.max_lanelets / lanes).max(1);
    let segments = rng.gen_range(1..=max_seg);
    let width = rng.gen_range(3.0..3.75);
    let limit = rng.gen_range(10.0..16.0);
    let seg_len = rng.gen_range(spec.segment_length.0..spec.segment_length.1);
    let total = seg_len * segments as f64;
    let curvature = if spec.curved && rng.gen_bool(0.4) { rng.gen_range(-0.01..0.01) } else { 0.0 };
    let pts = 4 * segments * ((seg_len / 5.0).ceil() as usize).max(1);
    let reference: Vec<Point2> = (0..=pts)
        .map(|k| {
            let s = total * k as f64 / pts as f64;
            if curvature == 0.0 {
                Point2::new(s, 0.0)
            } else {
                let r = 1.0 / curvature;
                Point2::new(r * (s * curvature).sin(), r * (1.0 - (s * curvature).cos()))
            }
        })
        .collect();
    let net = multi_lane_road(&reference, lanes, segments, width, limit);
    let id = |s: usize, j: usize| LaneletId((1 + s * lanes + j) as u64);

    let ego_lane = rng.gen_range(0..lanes);
    let ego_xi = rng.gen_range(1.0..(0.25 * seg_len).max(1.5));
    let ego_l = net.get(id(0, ego_lane)).unwrap();
    let ego_p = ego_l.point_at(ego_xi);
    let ego_v = rng.gen_range(0.3..0.9) * limit.min(12.0);

    let mut obstacles = Vec::new();
    let n_obs = rng.gen_range(0..=spec.max_obstacles);
    for k in 0..n_obs {
        let s = rng.gen_range(0..segments);
        let j = rng.gen_range(0..lanes);
        let l = net.get(id(s, j)).unwrap();
        let xi = rng.gen_range(0.0..l.length());
        if s == 0 && (xi - ego_xi).abs() < 12.0 {
            continue;
        }
        let partial = rng.gen_bool(0.2);
        let (size, eta) = if partial {
            let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            ((1.8, 0.7), side * (0.5 * width - 0.45))
        } else {
            ((rng.gen_range(3.8..5.0), rng.gen_range(1.7..2.0)), rng.gen_range(-0.2..0.2))
        };
        let speed = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(2.0..limit) };
        obstacles.push(lane_follower(k as u64 + 1, l, xi, eta, speed, size, spec.horizon + 5.0));
    }

    let mut lights = Vec::new();
    if spec.traffic_lights && segments > 1 && rng.gen_bool(0.3) {
        let l = net.get(id(0, rng.gen_range(0..lanes))).unwrap();
        let until = rng.gen_range(0.5..spec.horizon * 0.6);
        lights.push(TrafficLightRule { lanelet: l.id, stop_xi: l.length() - 1.0, red: vec![Interval { lo: 0.0, hi: until }] });
    }

    let goal_seg = segments - 1;
    let goal_lane = rng.gen_range(0..lanes);
    let goal_l = net.get(id(goal_seg, goal_lane)).unwrap();
    let lo = if goal_seg == 0 { (ego_xi + 0.3 * (goal_l.length() - ego_xi)).min(goal_l.length() - 2.0) } else { 0.0 };
    let p = PlanningProblem {
        initial: InitialState { x: ego_p.x, y: ego_p.y, v: ego_v, orientation: ego_l.heading_at(ego_xi) },
        goal: GoalSpec {
            lanelet: goal_l.id,
            xi: Interval { lo, hi: goal_l.length() },
            v: Interval { lo: 0.0, hi: 40.0 },
            time: Interval { lo: 0.0, hi: spec.horizon },
        },
    };
    Scenario::new(net, obstacles, lights, p, VehicleParams::default(), PlannerConfig::default())
        .expect("generated scenario is valid")
}
