//! Closed-loop simulation with a kinematic single-track plant.
//!
//! The plant state is the rear-axle pose. Planning uses the vehicle center,
//! half a wheelbase ahead of the rear axle. The tracking controller and its
//! gains are harness defaults, not part of the planner.

use crate::clock::Clock;
use crate::freespace::effective_speed_limit;
use crate::interval::Interval;
use crate::math;
use crate::model::{
    rect_corners, GoalSpec, InitialState, LaneletId, ObstacleTimeline, PlanningProblem, Point2, RoadNetwork,
    Scenario, TrafficLightRule, VehicleParams,
};
use crate::pipeline::{plan_with_goal, PlanError};
use crate::reference::ReferenceTrajectory;
use crate::search::{Goal, GoalTarget};
use crate::setops::PVBox;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct VehicleState {
    /// Rear-axle position.
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub orientation: f64,
}

impl VehicleState {
    /// State whose center (half a wheelbase ahead of the rear axle) is at `(x, y)`.
    pub fn from_center(x: f64, y: f64, v: f64, orientation: f64, wheelbase: f64) -> Self {
        let d = Point2::from_angle(orientation) * (0.5 * wheelbase);
        Self { x: x - d.x, y: y - d.y, v, orientation }
    }

    pub fn center(&self, wheelbase: f64) -> Point2 {
        Point2::new(self.x, self.y) + Point2::from_angle(self.orientation) * (0.5 * wheelbase)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ControlInput {
    pub a: f64,
    /// Steering angle (rad).
    pub s: f64,
}

fn derivative(z: [f64; 4], u: ControlInput, wheelbase: f64) -> [f64; 4] {
    let [_, _, v, phi] = z;
    [v * math::cos(phi), v * math::sin(phi), u.a, v / wheelbase * math::tan(u.s)]
}

/// One fourth-order Runge–Kutta step; the speed is floored at zero.
pub fn step_plant(state: VehicleState, input: ControlInput, dt: f64, wheelbase: f64) -> VehicleState {
    let z = [state.x, state.y, state.v, state.orientation];
    let add = |a: [f64; 4], b: [f64; 4], h: f64| [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2], a[3] + h * b[3]];
    let k1 = derivative(z, input, wheelbase);
    let k2 = derivative(add(z, k1, 0.5 * dt), input, wheelbase);
    let k3 = derivative(add(z, k2, 0.5 * dt), input, wheelbase);
    let k4 = derivative(add(z, k3, dt), input, wheelbase);
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = z[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    VehicleState { x: out[0], y: out[1], v: out[2].max(0.0), orientation: out[3] }
}

/// Distance of the combined acceleration from the friction circle; negative
/// values are violations.
pub fn friction_margin(state: VehicleState, input: ControlInput, wheelbase: f64, a_max: f64) -> f64 {
    let yaw_rate = state.v / wheelbase * math::tan(input.s);
    a_max - math::hypot(input.a, state.v * yaw_rate)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackerParams {
    pub k_v: f64,
    pub k_xi: f64,
    pub min_lookahead: f64,
    /// Lookahead grows with speed by this many seconds.
    pub lookahead_time: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self { k_v: 1.5, k_xi: 0.5, min_lookahead: 3.0, lookahead_time: 0.5 }
    }
}

/// Reference values at time `t` after the trajectory start, linearly
/// interpolated and held past the end.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefSample {
    pub pos: Point2,
    pub v: f64,
    pub a: f64,
    pub orientation: f64,
}

pub fn sample_reference(r: &ReferenceTrajectory, t: f64) -> RefSample {
    let s = &r.samples;
    let last = s.len() - 1;
    let x = (t / r.dt).max(0.0);
    let i = (math::floor(x) as usize).min(last);
    if i == last {
        let p = s[last];
        return RefSample { pos: Point2::new(p.x, p.y), v: p.v, a: 0.0, orientation: p.orientation };
    }
    let (p, q) = (s[i], s[i + 1]);
    let w = x - i as f64;
    RefSample {
        pos: Point2::new(p.x + w * (q.x - p.x), p.y + w * (q.y - p.y)),
        v: p.v + w * (q.v - p.v),
        a: p.a,
        orientation: p.orientation + w * math::wrap_angle(q.orientation - p.orientation),
    }
}

/// Rear-axle path of a center-point reference.
fn rear_path(r: &ReferenceTrajectory, wheelbase: f64) -> Vec<Point2> {
    r.samples
        .iter()
        .map(|p| Point2::new(p.x, p.y) - Point2::from_angle(p.orientation) * (0.5 * wheelbase))
        .collect()
}

/// Pure-pursuit steering toward the point of `path` at distance `lookahead`
/// from the rear axle, searching forward from the closest vertex at or
/// after `from`. The path is extended straight past its end.
pub fn pure_pursuit(state: VehicleState, path: &[Point2], from: usize, lookahead: f64, wheelbase: f64) -> f64 {
    let rear = Point2::new(state.x, state.y);
    if path.is_empty() {
        return 0.0;
    }
    let from = from.min(path.len() - 1);
    let j = (from..path.len())
        .min_by(|&a, &b| path[a].dist(rear).total_cmp(&path[b].dist(rear)))
        .unwrap_or(from);
    let mut target = None;
    for k in j..path.len().saturating_sub(1) {
        let (a, b) = (path[k], path[k + 1]);
        if b.dist(rear) >= lookahead {
            target = Some(if a.dist(rear) >= lookahead { a } else { segment_exit(a, b, rear, lookahead) });
            break;
        }
    }
    let target = target.unwrap_or_else(|| {
        let n = path.len();
        let dir = if n >= 2 {
            let d = path[n - 1] - path[n - 2];
            if d.norm() > 1e-9 { d * (1.0 / d.norm()) } else { Point2::from_angle(state.orientation) }
        } else {
            Point2::from_angle(state.orientation)
        };
        let end = path[n - 1];
        let far = end + dir * (lookahead + end.dist(rear));
        segment_exit(end, far, rear, lookahead)
    });
    let d = target - rear;
    let ld = d.norm().max(1e-6);
    let alpha = math::atan2(d.y, d.x) - state.orientation;
    math::atan(2.0 * wheelbase * math::sin(math::wrap_angle(alpha)) / ld)
}

/// Point on `a -> b` where the distance to `c` first reaches `r`, assuming
/// `|a - c| < r <= |b - c|`.
fn segment_exit(a: Point2, b: Point2, c: Point2, r: f64) -> Point2 {
    let d = b - a;
    let f = a - c;
    let qa = d.dot(d);
    if qa == 0.0 {
        return b;
    }
    let qb = 2.0 * f.dot(d);
    let qc = f.dot(f) - r * r;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let t = ((-qb + math::sqrt(disc)) / (2.0 * qa)).clamp(0.0, 1.0);
    a + d * t
}

/// Tracking law: feed-forward acceleration with speed and along-track
/// feedback, plus pure-pursuit steering. Positive acceleration is capped by
/// the friction circle given the steering demand.
pub fn track(
    reference: &ReferenceTrajectory,
    state: VehicleState,
    t: f64,
    vehicle: &VehicleParams,
    params: &TrackerParams,
) -> ControlInput {
    let r = sample_reference(reference, t);
    let center = state.center(vehicle.wheelbase);
    let along = (r.pos - center).dot(Point2::from_angle(r.orientation));
    let path = rear_path(reference, vehicle.wheelbase);
    let from = (math::floor((t / reference.dt).max(0.0)) as usize).saturating_sub(5);
    let lookahead = params.min_lookahead.max(params.lookahead_time * state.v);
    let s = pure_pursuit(state, &path, from, lookahead, vehicle.wheelbase).clamp(-vehicle.s_max, vehicle.s_max);
    // Speeding up only uses what the friction circle leaves after cornering;
    // braking keeps the full range.
    let lateral = state.v * state.v / vehicle.wheelbase * math::tan(s);
    let a_up = math::sqrt((vehicle.a_max * vehicle.a_max - lateral * lateral).max(0.0));
    let a = (r.a + params.k_v * (r.v - state.v) + params.k_xi * along).clamp(-vehicle.a_max, a_up);
    ControlInput { a, s }
}

fn axes(poly: &[Point2; 4]) -> [Point2; 2] {
    [(poly[1] - poly[0]).perp(), (poly[2] - poly[1]).perp()]
}

fn overlaps_on(axis: Point2, a: &[Point2; 4], b: &[Point2; 4]) -> bool {
    let range = |p: &[Point2; 4]| {
        p.iter().map(|q| q.dot(axis)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
    };
    let (a0, a1) = range(a);
    let (b0, b1) = range(b);
    a0 <= b1 && b0 <= a1
}

fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let l2 = d.dot(d);
    let t = if l2 > 0.0 { ((p - a).dot(d) / l2).clamp(0.0, 1.0) } else { 0.0 };
    p.dist(a + d * t)
}

/// Distance between two rectangles; zero when they overlap.
pub fn rect_gap(a: &[Point2; 4], b: &[Point2; 4]) -> f64 {
    let separated = axes(a).iter().chain(axes(b).iter()).any(|ax| !overlaps_on(*ax, a, b));
    if !separated {
        return 0.0;
    }
    let mut d = f64::INFINITY;
    for (p, q) in [(a, b), (b, a)] {
        for v in p {
            for k in 0..4 {
                d = d.min(point_segment_distance(*v, q[k], q[(k + 1) % 4]));
            }
        }
    }
    d
}

/// Separating-axis collision test of the vehicle against every obstacle at
/// time `t`. A gap within 1e-9 counts as a collision.
pub fn collision_check(center: Point2, heading: f64, vehicle: &VehicleParams, obstacles: &[ObstacleTimeline], t: f64) -> (bool, f64) {
    let car = rect_corners(center, heading, vehicle.length, vehicle.width);
    let gap = obstacles.iter().map(|o| rect_gap(&car, &o.footprint(t))).fold(f64::INFINITY, f64::min);
    (gap <= 1e-9, gap)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimParams {
    pub plan_horizon: f64,
    pub replan_period: f64,
    pub sim_dt: f64,
    /// Simulated time allowed beyond the goal's latest arrival time.
    pub timeout_slack: f64,
    pub tracker: TrackerParams,
}

impl Default for SimParams {
    fn default() -> Self {
        Self { plan_horizon: 3.0, replan_period: 0.3, sim_dt: 0.01, timeout_slack: 5.0, tracker: TrackerParams::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TickLog {
    pub t: f64,
    /// State at the start of the tick.
    pub state: VehicleState,
    pub control: ControlInput,
    /// Reference position and speed being tracked; `None` under fallback.
    pub reference: Option<RefSample>,
    /// Smallest obstacle gap after the tick.
    pub min_gap: f64,
    pub friction_margin: f64,
    /// Lateral distance of the vehicle center from the reference path.
    pub cross_track: f64,
    /// Wall time of the replan performed this tick, in milliseconds.
    pub replan_ms: Option<f64>,
    pub fallback: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Goal,
    Collision,
    Timeout,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimLog {
    pub ticks: Vec<TickLog>,
    pub termination: Termination,
    /// Replans that produced no usable trajectory.
    pub failed_replans: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimSummary {
    pub reached: bool,
    pub collided: bool,
    pub ticks: usize,
    pub min_gap: f64,
    pub mean_replan_ms: f64,
    pub p95_replan_ms: f64,
    pub fallback_ticks: usize,
    pub max_cross_track: f64,
    pub min_friction_margin: f64,
    pub final_speed: f64,
}

impl SimLog {
    pub fn summary(&self) -> SimSummary {
        let mut times: Vec<f64> = self.ticks.iter().filter_map(|t| t.replan_ms).collect();
        times.sort_by(f64::total_cmp);
        let mean = if times.is_empty() { 0.0 } else { times.iter().sum::<f64>() / times.len() as f64 };
        let p95 = if times.is_empty() {
            0.0
        } else {
            times[(math::ceil(0.95 * times.len() as f64) as usize).clamp(1, times.len()) - 1]
        };
        let tracked = self.ticks.iter().filter(|t| !t.fallback);
        SimSummary {
            reached: self.termination == Termination::Goal,
            collided: self.termination == Termination::Collision,
            ticks: self.ticks.len(),
            min_gap: self.ticks.iter().map(|t| t.min_gap).fold(f64::INFINITY, f64::min),
            mean_replan_ms: mean,
            p95_replan_ms: p95,
            fallback_ticks: self.ticks.iter().filter(|t| t.fallback).count(),
            max_cross_track: tracked.map(|t| t.cross_track).fold(0.0, f64::max),
            min_friction_margin: self.ticks.iter().map(|t| t.friction_margin).fold(f64::INFINITY, f64::min),
            final_speed: self.ticks.last().map_or(0.0, |t| t.state.v),
        }
    }
}

/// Fewest lane changes needed to reach `goal` from each lanelet; lanelets
/// that cannot reach it are absent.
pub fn lane_changes_to(network: &RoadNetwork, goal: LaneletId) -> BTreeMap<LaneletId, usize> {
    relax(network, goal, 0usize, |_, c| c, |c| c + 1)
}

/// Route length from the start of each lanelet to the start of `goal`,
/// counting lane changes as free.
pub fn route_distance_to(network: &RoadNetwork, goal: LaneletId) -> BTreeMap<LaneletId, f64> {
    relax(network, goal, 0.0, |len, d| d + len, |d| d)
}

fn relax<T: Copy + PartialOrd>(
    network: &RoadNetwork,
    goal: LaneletId,
    zero: T,
    via_succ: impl Fn(f64, T) -> T,
    via_side: impl Fn(T) -> T,
) -> BTreeMap<LaneletId, T> {
    let mut best = BTreeMap::new();
    best.insert(goal, zero);
    loop {
        let mut changed = false;
        for l in network.lanelets() {
            let cands = l
                .successors
                .iter()
                .filter_map(|s| best.get(s).map(|&c| via_succ(l.length(), c)))
                .chain([l.left, l.right].into_iter().flatten().filter_map(|s| best.get(&s).map(|&c| via_side(c))));
            let Some(c) = cands.reduce(|a, b| if b < a { b } else { a }) else { continue };
            if best.get(&l.id).is_none_or(|old| c < *old) {
                best.insert(l.id, c);
                changed = true;
            }
        }
        if !changed {
            return best;
        }
    }
}

/// Planning problem seen at time `now`: obstacles predicted at constant
/// velocity from their current motion and traffic-light phases shifted.
pub fn receding_problem(scenario: &Scenario, now: f64, state: VehicleState, horizon: f64) -> Result<Scenario, PlanError> {
    let center = state.center(scenario.vehicle.wheelbase);
    let mut v = state.v;
    if let Some(&(id, _, _)) = scenario.network.locate(center).first() {
        v = v.min(effective_speed_limit(scenario.network.lanelet(id)?, scenario.vehicle.a_max));
    }
    let obstacles = scenario.obstacles.iter().map(|o| o.constant_velocity_from(now, horizon + 1.0)).collect();
    let lights = scenario
        .traffic_lights
        .iter()
        .map(|r| TrafficLightRule {
            red: r.red.iter().map(|iv| iv.shift(-now)).filter(|iv| iv.hi >= 0.0).collect(),
            ..r.clone()
        })
        .collect();
    let g = scenario.problem.goal;
    let problem = PlanningProblem {
        initial: InitialState { x: center.x, y: center.y, v, orientation: state.orientation },
        goal: GoalSpec { time: Interval { lo: 0.0, hi: horizon }, ..g },
    };
    Ok(Scenario::new(scenario.network.clone(), obstacles, lights, problem, scenario.vehicle, scenario.config)?)
}

/// Goals tried in order at a replan.
///
/// The first contains the real goal when its time window meets the horizon,
/// and end-of-horizon targets on lanelets leading to the goal that demand
/// enough progress to arrive in time. The second keeps only the
/// end-of-horizon targets, without the progress demand. Targets off the
/// goal's lane carry a terminal cost of twice the lane-change weight per
/// change still needed.
pub fn receding_goals(scenario: &Scenario, now: f64, center: Point2, horizon: f64) -> Vec<Goal> {
    let cfg = &scenario.config;
    let net = &scenario.network;
    let g = scenario.problem.goal;
    let last = math::ceil_tol(horizon / cfg.dt) as usize;
    let changes = lane_changes_to(net, g.lanelet);
    let route = route_distance_to(net, g.lanelet);
    let remaining = net
        .locate(center)
        .iter()
        .find_map(|&(id, xi, _)| route.get(&id).map(|d| d - xi + g.xi.lo))
        .unwrap_or(0.0);
    let (lo, hi) = (g.time.lo - now, g.time.hi - now);
    let time_left = if lo > 0.0 { lo } else { hi };
    let progress = if remaining > 0.0 && time_left > 0.0 { remaining / time_left.max(horizon) * horizon } else { 0.0 };

    let horizon_targets = |min_progress: f64| {
        let mut out = Vec::new();
        for (&id, &n) in &changes {
            let l = net.get(id).expect("relaxation only visits known lanelets");
            let xi_lo = if min_progress > 0.0 { (route[&id] + g.xi.lo - remaining + min_progress).max(0.0) } else { 0.0 };
            if xi_lo > l.length() {
                continue;
            }
            out.push(GoalTarget {
                lanelet: id,
                region: PVBox::new(Interval { lo: xi_lo, hi: l.length() }, Interval { lo: 0.0, hi: 1e3 }),
                steps: (last, last),
                terminal_cost: 2.0 * cfg.w_change * n as f64,
            });
        }
        out
    };

    let mut first = Vec::new();
    if hi >= 0.0 && lo <= horizon {
        let a = math::ceil_tol(lo.max(0.0) / cfg.dt) as usize;
        let b = (math::floor_tol(hi.min(horizon) / cfg.dt) as usize).min(last);
        if a <= b {
            first.push(GoalTarget { lanelet: g.lanelet, region: PVBox::new(g.xi, g.v), steps: (a, b), terminal_cost: 0.0 });
        }
    }
    first.extend(horizon_targets(progress));
    alloc::vec![Goal { targets: first }, Goal { targets: horizon_targets(0.0) }]
}

fn reached_goal(scenario: &Scenario, center: Point2) -> bool {
    let g = &scenario.problem.goal;
    let Some(l) = scenario.network.get(g.lanelet) else { return false };
    let p = l.project(center);
    p.eta.abs() <= 0.5 * l.width && g.xi.contains(p.xi)
}

/// Braking with steering toward the center of the nearest lanelet.
fn fallback_control(scenario: &Scenario, state: VehicleState, lookahead: f64) -> ControlInput {
    let veh = &scenario.vehicle;
    let center = state.center(veh.wheelbase);
    let s = match scenario.network.locate(center).first() {
        Some(&(id, xi, _)) => {
            let l = scenario.network.get(id).expect("located lanelet exists");
            let target = l.point_at(xi + lookahead);
            let rear = Point2::new(state.x, state.y);
            let d = target - rear;
            let alpha = math::wrap_angle(math::atan2(d.y, d.x) - state.orientation);
            math::atan(2.0 * veh.wheelbase * math::sin(alpha) / d.norm().max(1e-6))
        }
        None => 0.0,
    };
    ControlInput { a: -veh.a_max, s: s.clamp(-veh.s_max, veh.s_max) }
}

fn cross_track(reference: &ReferenceTrajectory, p: Point2) -> f64 {
    let s = &reference.samples;
    if s.len() == 1 {
        return p.dist(Point2::new(s[0].x, s[0].y));
    }
    s.windows(2)
        .map(|w| point_segment_distance(p, Point2::new(w[0].x, w[0].y), Point2::new(w[1].x, w[1].y)))
        .fold(f64::INFINITY, f64::min)
}

/// True while `r` is blending between two lanelets at time `t` after its
/// start. Replanning then would restart the lane change from scratch.
fn mid_lane_change(r: &ReferenceTrajectory, t: f64) -> bool {
    let i = math::floor(t / r.dt + 1e-9).max(0.0) as usize;
    i + 1 < r.samples.len() && r.samples[i].blending && r.samples[i + 1].blending
}

/// Runs the receding-horizon loop until the goal, a collision or the
/// timeout. Replans are skipped while a lane change is under way. Replan
/// wall time is measured with `clock`.
pub fn run_closed_loop<C: Clock>(scenario: &Scenario, params: &SimParams, clock: &C) -> SimLog {
    let veh = scenario.vehicle;
    let init = scenario.problem.initial;
    let mut state = VehicleState::from_center(init.x, init.y, init.v, init.orientation, veh.wheelbase);
    let t_max = scenario.problem.goal.time.hi + params.timeout_slack;
    let max_ticks = math::ceil_tol(t_max / params.sim_dt) as usize;
    let replan_every = (math::ceil_tol(params.replan_period / params.sim_dt) as usize).max(1);
    let mut active: Option<(f64, ReferenceTrajectory)> = None;
    let mut ticks = Vec::with_capacity(max_ticks);
    let mut failed = 0;
    let mut termination = Termination::Timeout;

    for k in 0..max_ticks {
        let t = k as f64 * params.sim_dt;
        let mut replan_ms = None;
        let committed = active.as_ref().is_some_and(|(tp, r)| mid_lane_change(r, t - tp));
        if k % replan_every == 0 && !committed {
            let t0 = clock.now();
            let result = receding_problem(scenario, t, state, params.plan_horizon).and_then(|local| {
                let goals = receding_goals(scenario, t, state.center(veh.wheelbase), params.plan_horizon);
                let mut last = Err(PlanError::NoCorridor);
                for goal in &goals {
                    last = plan_with_goal(&local, goal, clock);
                    if last.is_ok() {
                        break;
                    }
                }
                last
            });
            replan_ms = Some((clock.now() - t0) * 1e3);
            match result {
                Ok(out) => active = Some((t, out.trajectory)),
                Err(_) => {
                    failed += 1;
                    active = None;
                }
            }
        }
        let lookahead = params.tracker.min_lookahead.max(params.tracker.lookahead_time * state.v);
        let (control, reference, xte) = match &active {
            Some((t_plan, r)) => {
                let c = track(r, state, t - t_plan, &veh, &params.tracker);
                let center = state.center(veh.wheelbase);
                (c, Some(sample_reference(r, t - t_plan)), cross_track(r, center))
            }
            None => (fallback_control(scenario, state, lookahead), None, 0.0),
        };
        let margin = friction_margin(state, control, veh.wheelbase, veh.a_max);
        let next = step_plant(state, control, params.sim_dt, veh.wheelbase);
        let t_next = (k + 1) as f64 * params.sim_dt;
        let center = next.center(veh.wheelbase);
        let (hit, gap) = collision_check(center, next.orientation, &veh, &scenario.obstacles, t_next);
        ticks.push(TickLog {
            t,
            state,
            control,
            reference,
            min_gap: gap,
            friction_margin: margin,
            cross_track: xte,
            replan_ms,
            fallback: reference.is_none(),
        });
        state = next;
        if hit {
            termination = Termination::Collision;
            break;
        }
        if reached_goal(scenario, center) {
            termination = Termination::Goal;
            break;
        }
    }
    SimLog { ticks, termination, failed_replans: failed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    const WB: f64 = 2.6;

    #[test]
    fn straight_acceleration_is_exact() {
        let s = step_plant(VehicleState { v: 10.0, ..Default::default() }, ControlInput { a: 2.0, s: 0.0 }, 0.1, WB);
        assert!((s.x - 1.01).abs() < 1e-9);
        assert!((s.v - 10.2).abs() < 1e-9);
        assert_eq!(s.y, 0.0);
    }

    #[test]
    fn full_circle_returns_to_start() {
        let (v, steer) = (5.0, 0.2);
        let radius = WB / math::tan(steer);
        let period = 2.0 * PI * radius / v;
        let dt = 1e-3;
        let n = math::floor(period / dt) as usize;
        let mut s = VehicleState { v, ..Default::default() };
        for _ in 0..n {
            s = step_plant(s, ControlInput { a: 0.0, s: steer }, dt, WB);
        }
        s = step_plant(s, ControlInput { a: 0.0, s: steer }, period - n as f64 * dt, WB);
        assert!(math::hypot(s.x, s.y) < 1e-4);
    }

    #[test]
    fn friction_examples() {
        let st = VehicleState { v: 10.0, ..Default::default() };
        assert_eq!(friction_margin(st, ControlInput { a: 6.0, s: 0.0 }, WB, 6.0), 0.0);
        let steer = math::atan(0.3 * WB / 10.0);
        let m = friction_margin(st, ControlInput { a: 3.0, s: steer }, WB, 6.0);
        assert!((m - (6.0 - math::sqrt(18.0))).abs() < 1e-12);
        assert!((m - 1.757).abs() < 1e-3);
    }

    #[test]
    fn rect_gap_cases() {
        let a = rect_corners(Point2::new(0.0, 0.0), 0.0, 4.0, 2.0);
        assert_eq!(rect_gap(&a, &a), 0.0);
        let b = rect_corners(Point2::new(10.0, 0.0), 0.0, 4.0, 2.0);
        assert!((rect_gap(&a, &b) - 6.0).abs() < 1e-12);
        let touching = rect_corners(Point2::new(4.0, 2.0), 0.0, 4.0, 2.0);
        assert!(rect_gap(&a, &touching) <= 1e-9);
    }
}
