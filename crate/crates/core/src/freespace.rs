//! Free space per lanelet and time step.
//!
//! A cell is a ξ-interval that keeps `ℓ_car/2 + d_min` to every blocking
//! obstacle and stays out of red stop bands, times `[0, v_eff]`.

use crate::interval::{complement_within, merge_intervals, Interval};
use crate::limits::max_corner_speed;
use crate::model::{Lanelet, LaneletId, ObstacleTimeline, RoadNetwork, Scenario};
use crate::setops::PVBox;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

pub use crate::model::TrafficLightRule;

/// Legal speed limit capped by the cornering limit of the sharpest segment.
pub fn effective_speed_limit(lanelet: &Lanelet, a_max: f64) -> f64 {
    lanelet.speed_limit.min(max_corner_speed(lanelet.max_curvature(), a_max))
}

/// True if the obstacle leaves a lateral band of the lanelet wide enough to
/// pass it without leaving the lanelet.
pub fn lateral_pass(
    lanelet: &Lanelet,
    obstacle: &ObstacleTimeline,
    t: f64,
    vehicle_width: f64,
    margin: f64,
    min_lateral_width: f64,
) -> bool {
    let Some(band) = lanelet.lateral_band(obstacle, t) else {
        return true;
    };
    let hw = 0.5 * lanelet.width;
    let free = (band.lo + hw).max(hw - band.hi);
    free >= (vehicle_width + 2.0 * margin).max(min_lateral_width)
}

/// Inputs shared by every free-space evaluation.
#[derive(Clone, Copy, Debug)]
pub struct FreeSpaceParams {
    pub vehicle_length: f64,
    pub vehicle_width: f64,
    pub a_max: f64,
    pub d_min: f64,
    pub lateral_margin: f64,
    pub min_lateral_width: f64,
}

impl FreeSpaceParams {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            vehicle_length: s.vehicle.length,
            vehicle_width: s.vehicle.width,
            a_max: s.vehicle.a_max,
            d_min: s.config.d_min,
            lateral_margin: s.config.lateral_margin,
            min_lateral_width: s.config.min_lateral_width,
        }
    }

    fn bloat(&self) -> f64 {
        0.5 * self.vehicle_length + self.d_min
    }
}

/// Occupied ξ-intervals of blocking obstacles (unbloated) on one lanelet.
pub fn blocking_occupancy(
    lanelet: &Lanelet,
    obstacles: &[ObstacleTimeline],
    t: f64,
    p: &FreeSpaceParams,
) -> Vec<Interval> {
    let mut out = Vec::new();
    for o in obstacles {
        let iv = lanelet.occupied_long_intervals(o, t);
        if iv.is_empty()
            || lateral_pass(lanelet, o, t, p.vehicle_width, p.lateral_margin, p.min_lateral_width)
        {
            continue;
        }
        out.extend(iv);
    }
    out
}

/// Intervals removed from the lanelet: bloated obstacles plus red stop bands.
pub fn blocked_intervals(
    lanelet: &Lanelet,
    obstacles: &[ObstacleTimeline],
    rules: &[TrafficLightRule],
    t: f64,
    p: &FreeSpaceParams,
) -> Vec<Interval> {
    let mut out: Vec<Interval> =
        blocking_occupancy(lanelet, obstacles, t, p).iter().map(|iv| iv.bloat(p.bloat())).collect();
    out.extend(
        rules
            .iter()
            .filter(|r| r.lanelet == lanelet.id && r.is_red(t))
            .map(TrafficLightRule::blocked),
    );
    out
}

/// Free-space cells of a single lanelet, sorted by ξ.
pub fn compute_free_space(
    lanelet: &Lanelet,
    obstacles: &[ObstacleTimeline],
    rules: &[TrafficLightRule],
    t: f64,
    p: &FreeSpaceParams,
) -> Vec<PVBox> {
    cells_from_blocked(lanelet, &blocked_intervals(lanelet, obstacles, rules, t, p), p.a_max)
}

fn cells_from_blocked(lanelet: &Lanelet, blocked: &[Interval], a_max: f64) -> Vec<PVBox> {
    let v = Interval { lo: 0.0, hi: effective_speed_limit(lanelet, a_max) };
    complement_within(Interval { lo: 0.0, hi: lanelet.length() }, blocked, 0.0)
        .into_iter()
        .map(|xi| PVBox::new(xi, v))
        .collect()
}

/// Free space of one lanelet at one step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FreeCells {
    pub cells: Vec<PVBox>,
    /// Unbloated occupancy of blocking obstacles, in this lanelet's ξ.
    pub occupied: Vec<Interval>,
}

/// Free-space cells for every lanelet and every step `0..=steps`.
///
/// Blocked intervals on successor and predecessor lanelets are carried over
/// in shifted coordinates, so the distance rule also holds across seams.
#[derive(Clone, Debug)]
pub struct FreeSpaceTable {
    dt: f64,
    entries: BTreeMap<LaneletId, Vec<FreeCells>>,
}

impl FreeSpaceTable {
    pub fn build(
        network: &RoadNetwork,
        obstacles: &[ObstacleTimeline],
        rules: &[TrafficLightRule],
        p: &FreeSpaceParams,
        dt: f64,
        steps: usize,
    ) -> Self {
        let mut entries = BTreeMap::new();
        for l in network.lanelets() {
            entries.insert(l.id, Vec::with_capacity(steps + 1));
        }
        for i in 0..=steps {
            let t = i as f64 * dt;
            let own: BTreeMap<LaneletId, (Vec<Interval>, Vec<Interval>)> = network
                .lanelets()
                .iter()
                .map(|l| {
                    let occ = blocking_occupancy(l, obstacles, t, p);
                    let mut blocked: Vec<Interval> = occ.iter().map(|iv| iv.bloat(p.bloat())).collect();
                    blocked.extend(
                        rules.iter().filter(|r| r.lanelet == l.id && r.is_red(t)).map(TrafficLightRule::blocked),
                    );
                    (l.id, (merge_intervals(occ), blocked))
                })
                .collect();
            for l in network.lanelets() {
                let (occ, blocked) = &own[&l.id];
                let mut occupied = occ.clone();
                let mut all = blocked.clone();
                let len = l.length();
                for s in &l.successors {
                    let (so, sb) = &own[s];
                    all.extend(sb.iter().map(|iv| iv.shift(len)));
                    occupied.extend(so.iter().map(|iv| iv.shift(len)));
                }
                for pred in network.predecessors(l.id) {
                    let (po, pb) = &own[&pred.id];
                    let pl = pred.length();
                    all.extend(pb.iter().map(|iv| iv.shift(-pl)));
                    occupied.extend(po.iter().map(|iv| iv.shift(-pl)));
                }
                let cells = cells_from_blocked(l, &all, p.a_max);
                entries
                    .get_mut(&l.id)
                    .expect("all lanelets inserted")
                    .push(FreeCells { cells, occupied: merge_intervals(occupied) });
            }
        }
        Self { dt, entries }
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        Self::build(
            &s.network,
            &s.obstacles,
            &s.traffic_lights,
            &FreeSpaceParams::from_scenario(s),
            s.config.dt,
            s.horizon_steps(),
        )
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Cells of `lanelet` at `step`; empty past the table's horizon.
    pub fn cells(&self, lanelet: LaneletId, step: usize) -> &[PVBox] {
        self.get(lanelet, step).map_or(&[], |e| &e.cells)
    }

    pub fn get(&self, lanelet: LaneletId, step: usize) -> Option<&FreeCells> {
        self.entries.get(&lanelet).and_then(|v| v.get(step))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ObstacleState, Point2};
    use alloc::vec;

    fn lane() -> Lanelet {
        Lanelet::new(LaneletId(1), vec![Point2::new(0.0, 0.0), Point2::new(100.0, 0.0)], 3.5, 13.9, None, None, vec![])
            .unwrap()
    }

    fn params() -> FreeSpaceParams {
        FreeSpaceParams {
            vehicle_length: 4.0,
            vehicle_width: 2.0,
            a_max: 6.0,
            d_min: 1.0,
            lateral_margin: 0.25,
            min_lateral_width: 0.0,
        }
    }

    fn block(x: f64, y: f64, length: f64, width: f64) -> ObstacleTimeline {
        ObstacleTimeline::new(0, length, width, vec![ObstacleState { t: 0.0, x, y, orientation: 0.0 }]).unwrap()
    }

    #[test]
    fn obstacle_splits_lane() {
        let cells = compute_free_space(&lane(), &[block(45.0, 0.0, 10.0, 2.0)], &[], 0.0, &params());
        let xi: Vec<Interval> = cells.iter().map(|c| c.xi).collect();
        assert_eq!(xi, vec![Interval { lo: 0.0, hi: 37.0 }, Interval { lo: 53.0, hi: 100.0 }]);
        assert!(cells.iter().all(|c| c.v == Interval { lo: 0.0, hi: 13.9 }));
    }

    #[test]
    fn empty_lane_is_one_cell() {
        let cells = compute_free_space(&lane(), &[], &[], 0.0, &params());
        assert_eq!(cells, vec![PVBox::new(Interval { lo: 0.0, hi: 100.0 }, Interval { lo: 0.0, hi: 13.9 })]);
    }

    #[test]
    fn red_light_band() {
        let rule = TrafficLightRule { lanelet: LaneletId(1), stop_xi: 60.0, red: vec![Interval { lo: 0.0, hi: 5.0 }] };
        let red = compute_free_space(&lane(), &[], core::slice::from_ref(&rule), 1.0, &params());
        assert_eq!(red.len(), 2);
        assert_eq!(red[0].xi.hi, 59.5);
        assert_eq!(compute_free_space(&lane(), &[], &[rule], 6.0, &params()).len(), 1);
    }

    #[test]
    fn partial_occupancy() {
        let l = lane();
        assert!(lateral_pass(&l, &block(30.0, 1.3, 1.8, 0.6), 0.0, 2.0, 0.25, 0.0));
        assert!(!lateral_pass(&l, &block(30.0, 0.0, 4.0, 2.0), 0.0, 2.0, 0.25, 0.0));
        assert!(lateral_pass(&l, &block(30.0, 20.0, 4.0, 2.0), 0.0, 2.0, 0.25, 0.0));
        assert!(!lateral_pass(&l, &block(30.0, 1.3, 1.8, 0.6), 0.0, 2.0, 0.25, 3.0));
        assert_eq!(compute_free_space(&l, &[block(30.0, 1.3, 1.8, 0.6)], &[], 0.0, &params()).len(), 1);
    }

    #[test]
    fn curved_lane_caps_speed() {
        let pts: Vec<Point2> = (0..=18)
            .map(|k| {
                let a = (k as f64 * 5.0).to_radians();
                Point2::new(20.0 * crate::math::sin(a), 20.0 - 20.0 * crate::math::cos(a))
            })
            .collect();
        let l = Lanelet::new(LaneletId(3), pts, 3.5, 30.0, None, None, vec![]).unwrap();
        let cap = effective_speed_limit(&l, 6.0);
        let expect = crate::math::sqrt(6.0 * 20.0);
        assert!((cap - expect).abs() / expect < 0.02);
    }
}
