//! Reference trajectory inside a refined corridor.
//!
//! Each step picks the state closest to the desired profile among the
//! states reachable in one step that stay inside the refined corridor. After
//! a dead end the previous steps are re-chosen at the deepest admissible
//! point, one more step back each time. The curvilinear result is mapped to
//! the global frame, with sigmoid blending between neighbouring centerlines
//! during lane changes.

use crate::cost::DesiredProfile;
use crate::drivable_area::TransitionKind;
use crate::freespace::lateral_pass;
use crate::math;
use crate::model::{LaneletId, ModelError, ObstacleTimeline, Point2, RoadNetwork};
use crate::search::Corridor;
use crate::setops::{input_vector, step_state, PVPoint, PVRegion};
use alloc::vec::Vec;
use core::fmt;

/// Membership tolerances tried in turn when picking the next state. The
/// first one keeps a small interior margin so that clipping tolerances in
/// the refined sets cannot pile up along a boundary.
const MEMBER_TOLS: [f64; 6] = [-1e-9, 0.0, 1e-12, 1e-11, 1e-10, 1e-9];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Track {
    /// Inside the refined area of corridor node `k`.
    Node(usize),
    /// Inside lane-change chain `chain` of node `child`, before the handover.
    Chain { child: usize, chain: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvilinearSample {
    pub step: usize,
    pub track: Track,
    /// Corridor node whose coordinates `z` is expressed in.
    pub node: usize,
    pub z: PVPoint,
    /// Acceleration applied from this step to the next (zero at the end).
    pub accel: f64,
}

/// A lane change used by the reference: blended from `start` to `end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaneChangeUse {
    pub child: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvilinearRef {
    pub samples: Vec<CurvilinearSample>,
    pub lane_changes: Vec<LaneChangeUse>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceError {
    /// The initial state is not in the refined area of the first node.
    InitialOutside,
    /// No reachable state inside the refined corridor. Refinement makes
    /// this impossible; seeing it means an internal invariant broke.
    EmptyReachSet { step: usize },
    BlendTooShort { steps: usize, required: usize },
    Model(ModelError),
}

impl fmt::Display for ReferenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceError::InitialOutside => f.write_str("initial state is outside the refined corridor"),
            ReferenceError::EmptyReachSet { step } => {
                write!(f, "internal error: no admissible state at step {step} of a refined corridor")
            }
            ReferenceError::BlendTooShort { steps, required } => {
                write!(f, "lane-change blend spans {steps} steps, at least {required} required")
            }
            ReferenceError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ReferenceError {}

impl From<ModelError> for ReferenceError {
    fn from(e: ModelError) -> Self {
        ReferenceError::Model(e)
    }
}

struct Candidate<'a> {
    set: &'a PVRegion,
    /// Subtracted from ξ when moving into the candidate's coordinates.
    shift: f64,
    node: usize,
    next: Track,
    lane_change: Option<LaneChangeUse>,
}

/// Greedy reference inside a refined corridor, from `z0` to the goal step.
pub fn generate_curvilinear(
    corridor: &Corridor,
    profile: &DesiredProfile,
    z0: PVPoint,
    dt: f64,
    a_max: f64,
) -> Result<CurvilinearRef, ReferenceError> {
    let first = corridor.nodes[0].timeline.area_at(0).ok_or(ReferenceError::InitialOutside)?;
    if !first.contains(z0, 1e-9) {
        return Err(ReferenceError::InitialOutside);
    }
    let dir = input_vector(dt) * a_max;
    let mut samples = alloc::vec![CurvilinearSample { step: 0, track: Track::Node(0), node: 0, z: z0, accel: 0.0 }];
    let mut lane_changes: Vec<LaneChangeUse> = Vec::new();
    // Steps re-chosen at the deepest admissible point after a dead end
    // further on.
    let mut deep = alloc::vec![false; corridor.goal_step];

    while samples.len() <= corridor.goal_step {
        let cur = *samples.last().expect("non-empty");
        let i = cur.step;
        let cands = candidates(corridor, cur, i);
        let origin = cur.z.shear(dt);
        let pick = if deep[i] {
            pick_deepest(&cands, origin, dir)
        } else {
            pick_closest(corridor, profile, &cands, origin, dir, i)
        };
        let Some((t, ci)) = pick else {
            // Back up to the latest step still chosen greedily.
            let j = (0..i).rev().find(|&j| !deep[j]).ok_or(ReferenceError::EmptyReachSet { step: i + 1 })?;
            deep[j] = true;
            samples.truncate(j + 1);
            lane_changes.retain(|lc| lc.start < j);
            continue;
        };
        let c = &cands[ci];
        let a = t * a_max;
        let mut z = step_state(cur.z, a, dt);
        z.xi -= c.shift;
        samples.last_mut().expect("non-empty").accel = a;
        samples.push(CurvilinearSample { step: i + 1, track: c.next, node: c.node, z, accel: 0.0 });
        if let Some(lc) = c.lane_change {
            lane_changes.push(lc);
        }
    }
    Ok(CurvilinearRef { samples, lane_changes })
}

/// Candidate point `o + dir * t` counts as inside a part only within this
/// Euclidean distance.
const ACCEPT_TOL: f64 = 9e-10;

/// Segment parameter and candidate closest to the desired profile, using the
/// first membership tolerance that admits anything.
fn pick_closest(
    corridor: &Corridor,
    profile: &DesiredProfile,
    cands: &[Candidate<'_>],
    origin: PVPoint,
    dir: PVPoint,
    i: usize,
) -> Option<(f64, usize)> {
    let dd = dir.dot(dir);
    for tol in MEMBER_TOLS {
        let mut best: Option<(f64, f64, usize)> = None; // (distance, t, candidate)
        for (ci, c) in cands.iter().enumerate() {
            let o = PVPoint::new(origin.xi - c.shift, origin.v);
            let zd = profile.states.get(i + 1).copied().unwrap_or(o);
            let target = PVPoint::new(zd.xi - corridor.nodes[c.node].offset, zd.v);
            for part in c.set.parts() {
                let Some(range) = part.segment_param_range(o, dir, tol) else { continue };
                let t_free = if dd > 0.0 { (target - o).dot(dir) / dd } else { 0.0 };
                let t = t_free.clamp(range.lo, range.hi);
                let p = o + dir * t;
                if part.signed_distance(p) < -ACCEPT_TOL {
                    continue;
                }
                let d = (p - target).norm();
                if best.is_none_or(|b| d < b.0) {
                    best = Some((d, t, ci));
                }
            }
        }
        if let Some((_, t, ci)) = best {
            return Some((t, ci));
        }
    }
    None
}

/// Segment parameter and candidate reaching deepest into a refined set.
fn pick_deepest(cands: &[Candidate<'_>], origin: PVPoint, dir: PVPoint) -> Option<(f64, usize)> {
    let mut best: Option<(f64, f64, usize)> = None; // (depth, t, candidate)
    for (ci, c) in cands.iter().enumerate() {
        let o = PVPoint::new(origin.xi - c.shift, origin.v);
        for part in c.set.parts() {
            // Signed distance is concave along a line.
            let depth = |t: f64| part.signed_distance(o + dir * t);
            let (mut lo, mut hi) = (-1.0f64, 1.0f64);
            for _ in 0..100 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if depth(m1) < depth(m2) {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            let t = 0.5 * (lo + hi);
            let d = depth(t);
            if d >= -ACCEPT_TOL && best.is_none_or(|b| d > b.0) {
                best = Some((d, t, ci));
            }
        }
    }
    best.map(|(_, t, ci)| (t, ci))
}

fn candidates(corridor: &Corridor, cur: CurvilinearSample, i: usize) -> Vec<Candidate<'_>> {
    let mut out = Vec::new();
    match cur.track {
        Track::Node(k) => {
            let node = &corridor.nodes[k];
            if let Some(r) = node.timeline.area_at(i + 1) {
                out.push(Candidate { set: r, shift: 0.0, node: k, next: Track::Node(k), lane_change: None });
            }
            if let Some(child) = corridor.nodes.get(k + 1) {
                let entry = child.entry.as_ref().expect("non-root corridor nodes have an entry");
                match entry.kind {
                    TransitionKind::Successor => {
                        for (s, h) in &entry.seeds {
                            if *s == i + 1 {
                                out.push(Candidate {
                                    set: h,
                                    shift: child.offset - node.offset,
                                    node: k + 1,
                                    next: Track::Node(k + 1),
                                    lane_change: None,
                                });
                            }
                        }
                    }
                    TransitionKind::Left | TransitionKind::Right => {
                        for (ci, ch) in child.chains.iter().enumerate() {
                            if ch.start() != i || !ch.sets[0].contains(cur.z, 1e-9) {
                                continue;
                            }
                            let next = if ch.end == i + 1 {
                                Track::Node(k + 1)
                            } else {
                                Track::Chain { child: k + 1, chain: ci }
                            };
                            out.push(Candidate {
                                set: &ch.sets[1],
                                shift: 0.0,
                                node: if ch.end == i + 1 { k + 1 } else { k },
                                next,
                                lane_change: Some(LaneChangeUse { child: k + 1, start: i, end: ch.end }),
                            });
                        }
                    }
                }
            }
        }
        Track::Chain { child, chain } => {
            let ch = &corridor.nodes[child].chains[chain];
            if let Some(set) = ch.set_at(i + 1) {
                let done = ch.end == i + 1;
                out.push(Candidate {
                    set,
                    shift: 0.0,
                    node: if done { child } else { child - 1 },
                    next: if done { Track::Node(child) } else { cur.track },
                    lane_change: None,
                });
            }
        }
    }
    out
}

/// Sigmoid blend weight for normalised time `delta`.
pub fn blend_weight(delta: f64) -> f64 {
    1.0 / (1.0 + math::exp(-10.0 * (delta - 0.5)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub orientation: f64,
    pub xi: f64,
    pub eta: f64,
    pub lanelet: LaneletId,
    /// Acceleration applied until the next sample.
    pub a: f64,
    /// True while blending between two centerlines.
    pub blending: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceTrajectory {
    pub dt: f64,
    pub samples: Vec<RefPoint>,
}

/// Maps a curvilinear reference to the global frame.
pub fn to_global(
    cref: &CurvilinearRef,
    corridor: &Corridor,
    network: &RoadNetwork,
    dt: f64,
) -> Result<ReferenceTrajectory, ReferenceError> {
    let mut out = Vec::with_capacity(cref.samples.len());
    let mut blend_of: Vec<Option<(LaneletId, LaneletId, f64)>> = alloc::vec![None; cref.samples.len()];
    for lc in &cref.lane_changes {
        let child = &corridor.nodes[lc.child];
        let need = child.entry.as_ref().map_or(1, |e| e.lc_steps);
        let steps = lc.end - lc.start;
        if steps < need {
            return Err(ReferenceError::BlendTooShort { steps, required: need });
        }
        let src = corridor.nodes[lc.child - 1].lanelet;
        for m in lc.start..=lc.end {
            if let Some(b) = blend_of.get_mut(m) {
                *b = Some((src, child.lanelet, (m - lc.start) as f64 / steps as f64));
            }
        }
    }
    for (s, blend) in cref.samples.iter().zip(&blend_of) {
        let own = network.lanelet(corridor.nodes[s.node].lanelet)?;
        let (p, heading, lanelet) = match blend {
            Some((a, b, delta)) => {
                let la = network.lanelet(*a)?;
                let lb = network.lanelet(*b)?;
                let mu = blend_weight(*delta);
                let p = la.point_at(s.z.xi) * (1.0 - mu) + lb.point_at(s.z.xi) * mu;
                (p, la.heading_at(s.z.xi), own.id)
            }
            None => (own.point_at(s.z.xi), own.heading_at(s.z.xi), own.id),
        };
        out.push(RefPoint {
            t: s.step as f64 * dt,
            x: p.x,
            y: p.y,
            v: s.z.v,
            orientation: heading,
            xi: s.z.xi,
            eta: 0.0,
            lanelet,
            a: s.accel,
            blending: blend.is_some(),
        });
    }
    let mut samples = out;
    for i in 0..samples.len() {
        let l = network.lanelet(samples[i].lanelet)?;
        samples[i].eta = l.project(Point2::new(samples[i].x, samples[i].y)).eta;
        if samples[i].blending {
            if let Some(phi) = fd_heading(&samples, i) {
                samples[i].orientation = phi;
            }
        }
    }
    Ok(ReferenceTrajectory { dt, samples })
}

/// Finite-difference heading, central where both neighbours exist.
fn fd_heading(s: &[RefPoint], i: usize) -> Option<f64> {
    let a = if i > 0 { i - 1 } else { i };
    let b = if i + 1 < s.len() { i + 1 } else { i };
    let (dx, dy) = (s[b].x - s[a].x, s[b].y - s[a].y);
    (math::hypot(dx, dy) > 1e-6).then(|| math::atan2(dy, dx))
}

/// Parameters of [`lateral_correction`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LateralParams {
    pub vehicle_length: f64,
    pub vehicle_width: f64,
    pub margin: f64,
    pub min_lateral_width: f64,
    /// Longitudinal buffer ahead of and behind the vehicle.
    pub d_min: f64,
    /// Largest change of the lateral shift between samples (m).
    pub max_rate: f64,
}

/// Shifts the reference sideways past obstacles that only occupy part of
/// the lane. Blend samples are left untouched.
pub fn lateral_correction(
    traj: &ReferenceTrajectory,
    obstacles: &[ObstacleTimeline],
    network: &RoadNetwork,
    p: &LateralParams,
) -> Result<ReferenceTrajectory, ReferenceError> {
    let n = traj.samples.len();
    let mut need_left = alloc::vec![0.0f64; n];
    let mut need_right = alloc::vec![0.0f64; n];
    for (i, s) in traj.samples.iter().enumerate() {
        if s.blending {
            continue;
        }
        let l = network.lanelet(s.lanelet)?;
        let reach = (s.xi - 0.5 * p.vehicle_length - p.d_min, s.xi + 0.5 * p.vehicle_length + p.d_min);
        for o in obstacles {
            let Some(band) = l.lateral_band(o, s.t) else { continue };
            if !lateral_pass(l, o, s.t, p.vehicle_width, p.margin, p.min_lateral_width) {
                continue;
            }
            if !l.occupied_long_intervals(o, s.t).iter().any(|iv| iv.lo <= reach.1 && iv.hi >= reach.0) {
                continue;
            }
            let hw = 0.5 * l.width;
            let half = 0.5 * p.vehicle_width + p.margin;
            if hw - band.hi >= band.lo + hw {
                need_left[i] = need_left[i].max(band.hi + half);
            } else {
                need_right[i] = need_right[i].max(half - band.lo);
            }
        }
    }
    if need_left.iter().chain(&need_right).all(|x| *x <= 0.0) {
        return Ok(traj.clone());
    }
    let env_l = rate_envelope(&need_left, p.max_rate);
    let env_r = rate_envelope(&need_right, p.max_rate);
    let mut samples = traj.samples.clone();
    for i in 0..n {
        if samples[i].blending {
            continue;
        }
        let shift = env_l[i] - env_r[i];
        if shift == 0.0 {
            continue;
        }
        let l = network.lanelet(samples[i].lanelet)?;
        let base = l.point_at(samples[i].xi);
        let nrm = Point2::from_angle(l.heading_at(samples[i].xi)).perp();
        let q = base + nrm * shift;
        samples[i].x = q.x;
        samples[i].y = q.y;
        samples[i].eta = shift;
    }
    for i in 0..n {
        let s = samples[i];
        if s.blending {
            continue;
        }
        let a = if i > 0 { i - 1 } else { i };
        let b = if i + 1 < n { i + 1 } else { i };
        if samples[a].lanelet != s.lanelet || samples[b].lanelet != s.lanelet {
            continue;
        }
        let dxi = samples[b].xi - samples[a].xi;
        let deta = samples[b].eta - samples[a].eta;
        if dxi.abs() > 1e-6 && (deta != 0.0 || s.eta != 0.0) {
            let l = network.lanelet(s.lanelet)?;
            samples[i].orientation = l.heading_at(s.xi) + math::atan(deta / dxi);
        }
    }
    Ok(ReferenceTrajectory { dt: traj.dt, samples })
}

/// Smallest sequence that dominates `need` and changes by at most `rate`
/// per sample.
fn rate_envelope(need: &[f64], rate: f64) -> Vec<f64> {
    let mut env = need.to_vec();
    for i in 1..env.len() {
        env[i] = env[i].max(env[i - 1] - rate);
    }
    for i in (0..env.len().saturating_sub(1)).rev() {
        env[i] = env[i].max(env[i + 1] - rate);
    }
    env.iter().map(|x| x.max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_values() {
        assert_eq!(blend_weight(0.5), 0.5);
        assert!((blend_weight(0.0) - 1.0 / (1.0 + math::exp(5.0))).abs() < 1e-15);
        assert!((blend_weight(1.0) - 1.0 / (1.0 + math::exp(-5.0))).abs() < 1e-15);
        assert!((blend_weight(0.0) - 0.0066929).abs() < 1e-7);
    }

    #[test]
    fn envelope_is_rate_limited() {
        let e = rate_envelope(&[0.0, 0.0, 0.0, 0.35, 0.0, 0.0], 0.1);
        let expect = [0.05, 0.15, 0.25, 0.35, 0.25, 0.15];
        for (a, b) in e.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
