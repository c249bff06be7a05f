//! Forward drivable area of a single lanelet and its transitions to the
//! left, right and successor lanelets.

use crate::freespace::FreeSpaceTable;
use crate::limits::{lateral_separation, min_lane_change_steps};
use crate::model::{LaneletId, ModelError, PlannerConfig, RoadNetwork, VehicleParams};
use crate::setops::PVRegion;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TransitionKind {
    Left,
    Right,
    Successor,
}

impl TransitionKind {
    pub fn is_lane_change(self) -> bool {
        !matches!(self, TransitionKind::Successor)
    }
}

/// A window of consecutive steps in which the area overlaps the free space
/// of another lanelet.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub kind: TransitionKind,
    pub source: LaneletId,
    pub target: LaneletId,
    /// First and last step of the overlap window.
    pub window: (usize, usize),
    /// Overlap set per step of the window, in source coordinates for lane
    /// changes and already shifted into target coordinates for successors.
    pub overlaps: Vec<PVRegion>,
    /// Initial sets handed to the target lanelet, in target coordinates.
    pub seeds: Vec<(usize, PVRegion)>,
    /// Number of steps the overlap must persist for a lane change.
    pub lc_steps: usize,
}

impl Transition {
    pub fn overlap_at(&self, step: usize) -> Option<&PVRegion> {
        step.checked_sub(self.window.0).and_then(|k| self.overlaps.get(k))
    }
}

/// Drivable areas of one lanelet from `start` onwards.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaTimeline {
    pub lanelet: LaneletId,
    pub start: usize,
    pub areas: Vec<PVRegion>,
}

impl AreaTimeline {
    pub fn area_at(&self, step: usize) -> Option<&PVRegion> {
        step.checked_sub(self.start).and_then(|k| self.areas.get(k))
    }

    /// Last step with a stored area.
    pub fn end(&self) -> usize {
        self.start + self.areas.len().saturating_sub(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AreaError {
    NoSeeds(LaneletId),
    SeedOutsideFreeSpace { lanelet: LaneletId, step: usize },
    Model(ModelError),
}

impl fmt::Display for AreaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AreaError::NoSeeds(id) => write!(f, "no initial set given for lanelet {id}"),
            AreaError::SeedOutsideFreeSpace { lanelet, step } => {
                write!(f, "initial set on lanelet {lanelet} at step {step} leaves the free space")
            }
            AreaError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for AreaError {}

impl From<ModelError> for AreaError {
    fn from(e: ModelError) -> Self {
        AreaError::Model(e)
    }
}

/// Everything the per-lanelet computation needs besides its seeds.
#[derive(Clone, Debug)]
pub struct AreaContext<'a> {
    pub network: &'a RoadNetwork,
    pub free: &'a FreeSpaceTable,
    pub dt: f64,
    pub a_max: f64,
    /// Last step index to compute.
    pub horizon: usize,
    lc_steps: BTreeMap<(LaneletId, LaneletId), usize>,
}

impl<'a> AreaContext<'a> {
    pub fn new(
        network: &'a RoadNetwork,
        free: &'a FreeSpaceTable,
        vehicle: &VehicleParams,
        config: &PlannerConfig,
        horizon: usize,
    ) -> Self {
        let mut lc_steps = BTreeMap::new();
        for l in network.lanelets() {
            for n in [l.left, l.right].into_iter().flatten() {
                if let Some(other) = network.get(n) {
                    let d_eta = lateral_separation(l, other);
                    lc_steps.insert((l.id, n), min_lane_change_steps(d_eta, vehicle.a_max, config.dt));
                }
            }
        }
        Self { network, free, dt: config.dt, a_max: vehicle.a_max, horizon, lc_steps }
    }

    /// Minimum lane-change duration in steps from `from` to its neighbour `to`.
    pub fn lane_change_steps(&self, from: LaneletId, to: LaneletId) -> usize {
        self.lc_steps.get(&(from, to)).copied().unwrap_or(1)
    }

    fn free_region(&self, lanelet: LaneletId, step: usize) -> PVRegion {
        PVRegion::from_parts(self.free.cells(lanelet, step).iter().map(|c| c.to_poly()))
    }
}

/// Runs the forward computation on `lanelet` from the given seeds.
///
/// Seeds are `(step, set)` pairs; they are united with the propagated area
/// at their step. The loop stops at the horizon or when the area and every
/// successor overlap are empty.
pub fn compute_lanelet_area(
    ctx: &AreaContext<'_>,
    lanelet: LaneletId,
    seeds: &[(usize, PVRegion)],
) -> Result<(AreaTimeline, Vec<Transition>), AreaError> {
    let lane = ctx.network.lanelet(lanelet)?;
    let mut seeds: Vec<&(usize, PVRegion)> = seeds.iter().filter(|s| s.0 <= ctx.horizon && !s.1.is_empty()).collect();
    seeds.sort_by_key(|s| s.0);
    let start = seeds.first().ok_or(AreaError::NoSeeds(lanelet))?.0;
    for (step, set) in &seeds {
        if !set.covered_by(&ctx.free_region(lanelet, *step), 1e-6) {
            return Err(AreaError::SeedOutsideFreeSpace { lanelet, step: *step });
        }
    }
    let seed_at = |i: usize| seeds.iter().filter(move |s| s.0 == i).map(|s| &s.1);

    let neighbours: Vec<(TransitionKind, LaneletId)> = [
        (TransitionKind::Left, lane.left),
        (TransitionKind::Right, lane.right),
    ]
    .into_iter()
    .filter_map(|(k, n)| n.map(|n| (k, n)))
    .collect();
    // Per target: overlaps by step.
    let mut lc_overlaps: Vec<BTreeMap<usize, PVRegion>> = alloc::vec![BTreeMap::new(); neighbours.len()];
    let mut succ_overlaps: Vec<BTreeMap<usize, PVRegion>> = alloc::vec![BTreeMap::new(); lane.successors.len()];

    let mut cur = PVRegion::empty();
    for s in seed_at(start) {
        cur = cur.union(s);
    }
    let mut areas = Vec::new();
    let mut step = start;
    loop {
        if !cur.is_empty() {
            for (k, (_, n)) in neighbours.iter().enumerate() {
                let ov = cur.intersect_union(ctx.free.cells(*n, step));
                if !ov.is_empty() {
                    lc_overlaps[k].insert(step, ov);
                }
            }
        }
        areas.push(cur.clone());
        if step >= ctx.horizon {
            break;
        }
        let next = step + 1;
        let mut pre = cur.propagate(ctx.dt, ctx.a_max);
        for s in seed_at(next) {
            pre = pre.union(s);
        }
        let shifted = pre.shift_long(-lane.length());
        for (k, s) in lane.successors.iter().enumerate() {
            let ov = shifted.intersect_union(ctx.free.cells(*s, next));
            if !ov.is_empty() {
                succ_overlaps[k].insert(next, ov);
            }
        }
        cur = pre.intersect_union(ctx.free.cells(lanelet, next));
        step = next;
        if cur.is_empty() && !seeds.iter().any(|s| s.0 > next) {
            break;
        }
    }
    while areas.last().is_some_and(PVRegion::is_empty) {
        areas.pop();
    }

    let mut transitions = Vec::new();
    for (k, s) in lane.successors.iter().enumerate() {
        for (window, overlaps) in group_runs(&succ_overlaps[k]) {
            let seeds = (window.0..=window.1).zip(overlaps.iter().cloned()).collect();
            transitions.push(Transition {
                kind: TransitionKind::Successor,
                source: lanelet,
                target: *s,
                window,
                overlaps,
                seeds,
                lc_steps: 0,
            });
        }
    }
    for (k, (kind, n)) in neighbours.iter().enumerate() {
        let need = ctx.lane_change_steps(lanelet, *n);
        for (window, overlaps) in group_runs(&lc_overlaps[k]) {
            if window.1 - window.0 < need {
                continue;
            }
            let seeds = persistent_seeds(&overlaps, window.0, need, ctx.dt, ctx.a_max);
            if seeds.is_empty() {
                continue;
            }
            transitions.push(Transition {
                kind: *kind,
                source: lanelet,
                target: *n,
                window,
                overlaps,
                seeds,
                lc_steps: need,
            });
        }
    }
    Ok((AreaTimeline { lanelet, start, areas }, transitions))
}

/// Splits a step-indexed map into runs of consecutive steps.
fn group_runs(map: &BTreeMap<usize, PVRegion>) -> Vec<((usize, usize), Vec<PVRegion>)> {
    let mut out: Vec<((usize, usize), Vec<PVRegion>)> = Vec::new();
    for (&i, r) in map {
        match out.last_mut() {
            Some((w, v)) if w.1 + 1 == i => {
                w.1 = i;
                v.push(r.clone());
            }
            _ => out.push(((i, i), alloc::vec![r.clone()])),
        }
    }
    out
}

/// States that stayed inside the overlap for `need + 1` consecutive steps,
/// ending at each step of the window.
pub fn persistent_seeds(
    overlaps: &[PVRegion],
    first: usize,
    need: usize,
    dt: f64,
    a_max: f64,
) -> Vec<(usize, PVRegion)> {
    let mut out = Vec::new();
    for end in need..overlaps.len() {
        let mut chain = overlaps[end - need].clone();
        for ov in &overlaps[end - need + 1..=end] {
            chain = chain.propagate(dt, a_max).intersect(ov);
            if chain.is_empty() {
                break;
            }
        }
        if !chain.is_empty() {
            out.push((first + end, chain));
        }
    }
    out
}
