//! Breadth-first exploration of the lanelet graph and corridor enumeration.

use crate::clock::Clock;
use crate::drivable_area::{compute_lanelet_area, AreaContext, AreaError, AreaTimeline, Transition, TransitionKind};
use crate::math;
use crate::model::{LaneletId, PlanningProblem};
use crate::setops::{ConvexPoly, PVBox, PVRegion};
use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;

/// One acceptable end region.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalTarget {
    pub lanelet: LaneletId,
    pub region: PVBox,
    /// First and last admissible step.
    pub steps: (usize, usize),
    /// Added to the corridor cost when this target is the one reached.
    pub terminal_cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Goal {
    pub targets: Vec<GoalTarget>,
}

impl Goal {
    pub fn from_problem(problem: &PlanningProblem, dt: f64) -> Self {
        let g = &problem.goal;
        let first = math::ceil_tol(g.time.lo / dt).max(0.0) as usize;
        let last = math::floor_tol(g.time.hi / dt).max(0.0) as usize;
        Self {
            targets: alloc::vec![GoalTarget {
                lanelet: g.lanelet,
                region: PVBox::new(g.xi, g.v),
                steps: (first, last),
                terminal_cost: 0.0,
            }],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    /// Drop seeds already contained in an area computed for the same
    /// lanelet and step.
    pub coverage_pruning: bool,
    /// Maximum number of transitions from the root.
    pub max_depth: usize,
    /// Hard cap on expanded nodes.
    pub max_nodes: usize,
    /// Wall-clock budget in seconds, measured with the supplied clock.
    pub time_budget: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { coverage_pruning: true, max_depth: usize::MAX, max_nodes: 20_000, time_budget: 10.0 }
    }
}

/// A node of the search tree: one lanelet explored from a set of seeds.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// The parent's transition that produced this node's seeds.
    pub entry: Option<Transition>,
    pub timeline: AreaTimeline,
    pub transitions: Vec<Transition>,
    pub depth: usize,
    pub n_change: usize,
    /// ξ of this lanelet's origin in the coordinates of the root lanelet.
    pub offset: f64,
}

/// A lanelet of a corridor with its areas.
#[derive(Clone, Debug, PartialEq)]
pub struct CorridorNode {
    pub lanelet: LaneletId,
    pub offset: f64,
    pub timeline: AreaTimeline,
    /// Transition from the previous node; `None` for the first node.
    pub entry: Option<Transition>,
    /// Backward-refined lane-change chains into this node, filled in by
    /// refinement.
    pub chains: Vec<LaneChangeChain>,
}

/// States that can complete a lane change ending at step `end`: `sets[m]`
/// belongs to step `end + 1 - sets.len() + m`, in the source lanelet's
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LaneChangeChain {
    pub end: usize,
    pub sets: Vec<PVRegion>,
}

impl LaneChangeChain {
    pub fn start(&self) -> usize {
        self.end + 1 - self.sets.len()
    }

    pub fn set_at(&self, step: usize) -> Option<&PVRegion> {
        step.checked_sub(self.start()).and_then(|k| self.sets.get(k))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corridor {
    pub nodes: Vec<CorridorNode>,
    pub n_change: usize,
    pub goal_step: usize,
    pub goal_region: PVBox,
    pub terminal_cost: f64,
    /// Id of the search node the corridor ends in.
    pub leaf: usize,
}

impl Corridor {
    pub fn lanelet_sequence(&self) -> Vec<LaneletId> {
        self.nodes.iter().map(|n| n.lanelet).collect()
    }

    pub fn last(&self) -> &CorridorNode {
        self.nodes.last().expect("corridors are never empty")
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub corridors: Vec<Corridor>,
    pub nodes: Vec<SearchNode>,
    pub timed_out: bool,
    /// The node cap was hit before the queue emptied.
    pub truncated: bool,
}

struct Pending {
    parent: Option<usize>,
    lanelet: LaneletId,
    entry: Option<Transition>,
    seeds: Vec<(usize, PVRegion)>,
}

/// Explores all lanelets reachable from the initial set and records one
/// corridor per node and goal target it reaches.
pub fn find_corridors<C: Clock>(
    ctx: &AreaContext<'_>,
    initial_lanelet: LaneletId,
    initial: PVRegion,
    goal: &Goal,
    options: &SearchOptions,
    clock: &C,
) -> Result<SearchResult, AreaError> {
    let t0 = clock.now();
    let mut covered: BTreeMap<(LaneletId, usize), Vec<ConvexPoly>> = BTreeMap::new();
    let mut nodes: Vec<SearchNode> = Vec::new();
    let mut corridors = Vec::new();
    let mut queue = VecDeque::new();
    queue.push_back(Pending { parent: None, lanelet: initial_lanelet, entry: None, seeds: alloc::vec![(0, initial)] });
    let mut timed_out = false;
    let mut truncated = false;

    while let Some(p) = queue.pop_front() {
        if clock.now() - t0 > options.time_budget {
            timed_out = true;
            break;
        }
        if nodes.len() >= options.max_nodes {
            truncated = true;
            break;
        }
        let seeds: Vec<(usize, PVRegion)> = if options.coverage_pruning && p.parent.is_some() {
            p.seeds.into_iter().filter(|(i, s)| !is_covered(&covered, p.lanelet, *i, s)).collect()
        } else {
            p.seeds
        };
        if seeds.is_empty() {
            continue;
        }
        let (timeline, transitions) = compute_lanelet_area(ctx, p.lanelet, &seeds)?;
        let mut entry = p.entry;
        if let Some(e) = entry.as_mut() {
            e.seeds = seeds;
        }
        let (depth, n_change, offset) = match (p.parent, &entry) {
            (Some(pid), Some(e)) => {
                let par = &nodes[pid];
                let lc = usize::from(e.kind.is_lane_change());
                let shift = if e.kind == TransitionKind::Successor {
                    ctx.network.lanelet(e.source)?.length()
                } else {
                    0.0
                };
                (par.depth + 1, par.n_change + lc, par.offset + shift)
            }
            _ => (0, 0, 0.0),
        };
        for (k, a) in timeline.areas.iter().enumerate() {
            if !a.is_empty() {
                covered.entry((p.lanelet, timeline.start + k)).or_default().extend(a.parts().iter().cloned());
            }
        }
        let id = nodes.len();
        nodes.push(SearchNode { id, parent: p.parent, entry, timeline, transitions, depth, n_change, offset });
        let node = &nodes[id];

        for target in goal.targets.iter().filter(|t| t.lanelet == node.timeline.lanelet) {
            if let Some(step) = latest_goal_step(&node.timeline, target) {
                corridors.push(build_corridor(&nodes, id, step, target));
            }
        }
        if node.depth < options.max_depth {
            for tr in &node.transitions {
                queue.push_back(Pending {
                    parent: Some(id),
                    lanelet: tr.target,
                    entry: Some(tr.clone()),
                    seeds: tr.seeds.clone(),
                });
            }
        }
    }
    Ok(SearchResult { corridors, nodes, timed_out, truncated })
}

fn is_covered(
    covered: &BTreeMap<(LaneletId, usize), Vec<ConvexPoly>>,
    lanelet: LaneletId,
    step: usize,
    seed: &PVRegion,
) -> bool {
    match covered.get(&(lanelet, step)) {
        None => false,
        Some(parts) => seed.covered_by_parts(parts, 1e-6),
    }
}

/// Latest admissible step at which the area meets the target region.
pub fn latest_goal_step(timeline: &AreaTimeline, target: &GoalTarget) -> Option<usize> {
    let lo = target.steps.0.max(timeline.start);
    let hi = target.steps.1.min(timeline.end());
    if lo > hi || timeline.areas.is_empty() {
        return None;
    }
    (lo..=hi).rev().find(|&i| {
        timeline.area_at(i).is_some_and(|a| !a.intersect_box(&target.region).is_empty())
    })
}

fn build_corridor(nodes: &[SearchNode], leaf: usize, goal_step: usize, target: &GoalTarget) -> Corridor {
    let mut chain = Vec::new();
    let mut cur = Some(leaf);
    while let Some(i) = cur {
        chain.push(i);
        cur = nodes[i].parent;
    }
    chain.reverse();
    let cnodes = chain
        .iter()
        .map(|&i| {
            let n = &nodes[i];
            CorridorNode {
                lanelet: n.timeline.lanelet,
                offset: n.offset,
                timeline: n.timeline.clone(),
                entry: n.entry.clone(),
                chains: Vec::new(),
            }
        })
        .collect();
    Corridor {
        nodes: cnodes,
        n_change: nodes[leaf].n_change,
        goal_step,
        goal_region: target.region,
        terminal_cost: target.terminal_cost,
        leaf,
    }
}
