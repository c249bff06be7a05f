//! Backward refinement of a corridor from its goal intersection.
//!
//! After refinement every state of every area can still reach the goal:
//! either inside the same lanelet, through a successor seed, or through a
//! lane-change chain that stays inside the overlap until the handover step.

use crate::drivable_area::TransitionKind;
use crate::search::{Corridor, LaneChangeChain};
use crate::setops::PVRegion;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum RefineError {
    /// The area at the goal step does not meet the goal region.
    EmptyGoal,
    /// A corridor node has no state left that reaches the goal.
    EmptyNode(usize),
    /// The corridor's transition data is inconsistent with its areas.
    Malformed(&'static str),
}

impl fmt::Display for RefineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefineError::EmptyGoal => f.write_str("goal-step area does not intersect the goal region"),
            RefineError::EmptyNode(k) => write!(f, "corridor node {k} is empty after refinement"),
            RefineError::Malformed(why) => write!(f, "malformed corridor: {why}"),
        }
    }
}

impl core::error::Error for RefineError {}

/// Refines `corridor` so that every remaining state can still reach the goal.
pub fn refine_corridor(corridor: &Corridor, dt: f64, a_max: f64) -> Result<Corridor, RefineError> {
    let g = corridor.goal_step;
    let k_last = corridor.nodes.len().checked_sub(1).ok_or(RefineError::Malformed("no nodes"))?;
    let mut out = corridor.clone();
    // Refined areas of the node processed in the previous iteration (k + 1).
    let mut child: Option<(usize, Vec<PVRegion>)> = None;

    for k in (0..=k_last).rev() {
        let node = &corridor.nodes[k];
        let tl = &node.timeline;
        let last = tl.end().min(g);
        if tl.areas.is_empty() || tl.start > last {
            return Err(RefineError::EmptyNode(k));
        }

        let mut exits: BTreeMap<usize, PVRegion> = BTreeMap::new();
        if let Some((c_start, c_areas)) = &child {
            let c_node = &corridor.nodes[k + 1];
            let entry = c_node.entry.as_ref().ok_or(RefineError::Malformed("missing entry transition"))?;
            let c_area = |i: usize| i.checked_sub(*c_start).and_then(|x| c_areas.get(x));
            let mut seeds = Vec::new();
            let mut chains = Vec::new();
            match entry.kind {
                TransitionKind::Successor => {
                    let len = c_node.offset - node.offset;
                    for (s, seed) in &entry.seeds {
                        let Some(r) = c_area(*s) else { continue };
                        let h = seed.intersect(r);
                        if h.is_empty() || *s == 0 {
                            continue;
                        }
                        let pre = h.shift_long(len).backward_step(dt, a_max);
                        add_to(&mut exits, s - 1, pre);
                        seeds.push((*s, h));
                    }
                }
                TransitionKind::Left | TransitionKind::Right => {
                    let n = entry.lc_steps;
                    for (j, seed) in &entry.seeds {
                        let Some(r) = c_area(*j) else { continue };
                        let mut q = seed.intersect(r);
                        if q.is_empty() || *j < n {
                            continue;
                        }
                        let mut sets = alloc::vec![q.clone()];
                        for m in (j - n..*j).rev() {
                            let o = entry.overlap_at(m).ok_or(RefineError::Malformed("overlap missing in window"))?;
                            q = o.intersect(&q.backward_step(dt, a_max));
                            if q.is_empty() {
                                break;
                            }
                            sets.push(q.clone());
                        }
                        if sets.len() != n + 1 {
                            continue;
                        }
                        sets.reverse();
                        add_to(&mut exits, j - n, sets[0].clone());
                        seeds.push((*j, sets[n].clone()));
                        chains.push(LaneChangeChain { end: *j, sets });
                    }
                }
            }
            let out_entry = out.nodes[k + 1].entry.as_mut().expect("checked above");
            let (w0, w1) = entry.window;
            out_entry.overlaps = (w0..=w1)
                .map(|m| {
                    if entry.kind.is_lane_change() {
                        chains.iter().filter_map(|c| c.set_at(m)).fold(PVRegion::empty(), |acc, s| acc.union(s))
                    } else {
                        seeds.iter().find(|s| s.0 == m).map_or_else(PVRegion::empty, |s| s.1.clone())
                    }
                })
                .collect();
            out_entry.seeds = seeds;
            out.nodes[k + 1].chains = chains;
        }

        let mut refined: Vec<PVRegion> = alloc::vec![PVRegion::empty(); last - tl.start + 1];
        for i in (tl.start..=last).rev() {
            let d = tl.area_at(i).expect("within timeline");
            if d.is_empty() {
                continue;
            }
            let mut r = if k == k_last && i == g {
                d.intersect_box(&corridor.goal_region)
            } else if i < last && !refined[i + 1 - tl.start].is_empty() {
                d.intersect(&refined[i + 1 - tl.start].backward_step(dt, a_max))
            } else {
                PVRegion::empty()
            };
            if let Some(x) = exits.get(&i) {
                let e = d.intersect(x);
                r = if r.is_empty() { e } else { r.union(&e) };
            }
            refined[i - tl.start] = r;
        }
        if k == k_last && refined[g - tl.start].is_empty() {
            return Err(RefineError::EmptyGoal);
        }
        let first = refined.iter().position(|r| !r.is_empty()).ok_or(RefineError::EmptyNode(k))?;
        let end = refined.iter().rposition(|r| !r.is_empty()).expect("non-empty");
        let start = tl.start + first;
        if k == 0 && start != tl.start {
            return Err(RefineError::EmptyNode(0));
        }
        let areas: Vec<PVRegion> = refined.drain(first..=end).collect();
        out.nodes[k].timeline.start = start;
        out.nodes[k].timeline.areas = areas.clone();
        child = Some((start, areas));
    }
    Ok(out)
}

fn add_to(map: &mut BTreeMap<usize, PVRegion>, step: usize, set: PVRegion) {
    match map.get_mut(&step) {
        Some(r) => *r = r.union(&set),
        None => {
            map.insert(step, set);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drivable_area::AreaTimeline;
    use crate::model::LaneletId;
    use crate::search::CorridorNode;
    use crate::setops::{PVBox, PVPoint};
    use crate::Interval;

    fn single(areas: Vec<PVRegion>, goal: PVBox) -> Corridor {
        let g = areas.len() - 1;
        Corridor {
            nodes: alloc::vec![CorridorNode {
                lanelet: LaneletId(1),
                offset: 0.0,
                timeline: AreaTimeline { lanelet: LaneletId(1), start: 0, areas },
                entry: None,
                chains: Vec::new(),
            }],
            n_change: 0,
            goal_step: g,
            goal_region: goal,
            terminal_cost: 0.0,
            leaf: 0,
        }
    }

    #[test]
    fn one_step_point_goal() {
        let z0 = PVRegion::from_point(PVPoint::new(0.0, 10.0));
        let d1 = z0.propagate(0.1, 2.0);
        let goal = PVBox::new(Interval::point(1.0), Interval::point(10.0));
        let c = single(alloc::vec![z0.clone(), d1], goal);
        let r = refine_corridor(&c, 0.1, 2.0).unwrap();
        let end = &r.nodes[0].timeline.areas[1];
        assert!(end.contains(PVPoint::new(1.0, 10.0), 1e-9));
        assert!(end.bbox().unwrap().xi.len() < 1e-9);
        assert!(r.nodes[0].timeline.areas[0].contains(PVPoint::new(0.0, 10.0), 1e-9));
    }

    #[test]
    fn unreachable_goal_is_an_error() {
        let z0 = PVRegion::from_point(PVPoint::new(0.0, 10.0));
        let goal = PVBox::new(Interval { lo: 50.0, hi: 60.0 }, Interval { lo: 0.0, hi: 20.0 });
        let c = single(alloc::vec![z0.clone(), z0.propagate(0.1, 2.0)], goal);
        assert_eq!(refine_corridor(&c, 0.1, 2.0).unwrap_err(), RefineError::EmptyGoal);
    }
}
