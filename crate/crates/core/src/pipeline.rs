//! End-to-end planning: free space, search, selection, refinement, reference.

use crate::clock::Clock;
use crate::cost::{compare, corridor_cost, desired_profile, CostBreakdown, CostWeights, DesiredProfile};
use crate::drivable_area::{AreaContext, AreaError};
use crate::freespace::FreeSpaceTable;
use crate::model::{LaneletId, ModelError, Point2, Scenario};
use crate::reference::{
    generate_curvilinear, lateral_correction, to_global, CurvilinearRef, LateralParams, ReferenceError,
    ReferenceTrajectory,
};
use crate::refine::{refine_corridor, RefineError};
use crate::search::{find_corridors, Corridor, Goal, SearchOptions};
use crate::setops::{PVPoint, PVRegion};
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum PlanError {
    Model(ModelError),
    /// The initial position is not on any lanelet.
    NotOnRoad,
    /// The initial state is not in the free space of any lanelet it is on.
    InitialBlocked,
    Area(AreaError),
    NoCorridor,
    /// The search ran out of time before finding a corridor.
    Timeout,
    Refine(RefineError),
    Reference(ReferenceError),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::Model(e) => write!(f, "{e}"),
            PlanError::NotOnRoad => f.write_str("initial position is not on any lanelet"),
            PlanError::InitialBlocked => f.write_str("initial state is not in the free space"),
            PlanError::Area(e) => write!(f, "{e}"),
            PlanError::NoCorridor => f.write_str("no driving corridor reaches the goal"),
            PlanError::Timeout => f.write_str("search time budget exhausted without a corridor"),
            PlanError::Refine(e) => write!(f, "{e}"),
            PlanError::Reference(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PlanError {}

impl From<ModelError> for PlanError {
    fn from(e: ModelError) -> Self {
        PlanError::Model(e)
    }
}

impl From<AreaError> for PlanError {
    fn from(e: AreaError) -> Self {
        PlanError::Area(e)
    }
}

#[derive(Clone, Debug)]
pub struct PlanOutcome {
    pub initial_lanelet: LaneletId,
    /// Initial state in the initial lanelet's coordinates.
    pub initial: PVPoint,
    pub corridors: Vec<Corridor>,
    pub costs: Vec<CostBreakdown>,
    pub profiles: Vec<DesiredProfile>,
    /// Index of the selected corridor.
    pub best: usize,
    pub refined: Corridor,
    pub curvilinear: CurvilinearRef,
    /// Global trajectory before lateral correction.
    pub uncorrected: ReferenceTrajectory,
    pub trajectory: ReferenceTrajectory,
    pub search_nodes: usize,
    pub timed_out: bool,
    pub truncated: bool,
}

impl PlanOutcome {
    pub fn best_corridor(&self) -> &Corridor {
        &self.corridors[self.best]
    }

    pub fn best_cost(&self) -> &CostBreakdown {
        &self.costs[self.best]
    }
}

/// Plans toward the scenario's own goal.
pub fn plan<C: Clock>(scenario: &Scenario, clock: &C) -> Result<PlanOutcome, PlanError> {
    plan_with_goal(scenario, &Goal::from_problem(&scenario.problem, scenario.config.dt), clock)
}

/// Finds the lanelet the vehicle starts on and its curvilinear state.
pub fn initial_state(scenario: &Scenario, free: &FreeSpaceTable) -> Result<(LaneletId, PVPoint), PlanError> {
    let init = &scenario.problem.initial;
    let hits = scenario.network.locate(Point2::new(init.x, init.y));
    if hits.is_empty() {
        return Err(PlanError::NotOnRoad);
    }
    hits.iter()
        .map(|&(id, xi, _)| (id, PVPoint::new(xi, init.v)))
        .find(|(id, z)| free.cells(*id, 0).iter().any(|c| c.contains(*z)))
        .ok_or(PlanError::InitialBlocked)
}

/// Plans toward an explicit set of goal targets.
pub fn plan_with_goal<C: Clock>(scenario: &Scenario, goal: &Goal, clock: &C) -> Result<PlanOutcome, PlanError> {
    let cfg = &scenario.config;
    let veh = &scenario.vehicle;
    let horizon = scenario.horizon_steps();
    let free = FreeSpaceTable::from_scenario(scenario);
    let ctx = AreaContext::new(&scenario.network, &free, veh, cfg, horizon);
    let (lanelet, z0) = initial_state(scenario, &free)?;

    let options = SearchOptions { time_budget: cfg.time_budget, ..SearchOptions::default() };
    let result = find_corridors(&ctx, lanelet, PVRegion::from_point(z0), goal, &options, clock)?;
    if result.corridors.is_empty() {
        return Err(if result.timed_out { PlanError::Timeout } else { PlanError::NoCorridor });
    }

    let weights = CostWeights::from_config(cfg);
    let safety = (weights.w_safe > 0.0).then_some((&free, veh.length));
    let mut profiles = Vec::with_capacity(result.corridors.len());
    let mut costs = Vec::with_capacity(result.corridors.len());
    for c in &result.corridors {
        let p = desired_profile(c, &scenario.network, z0.xi, z0.v, horizon, cfg, veh.a_max)?;
        costs.push(corridor_cost(c, &p, &weights, horizon, safety));
        profiles.push(p);
    }
    let mut order: Vec<usize> = (0..result.corridors.len()).collect();
    order.sort_by(|&i, &j| compare((&result.corridors[i], &costs[i]), (&result.corridors[j], &costs[j])));

    // Refinement of a corridor that reached the goal cannot come up empty
    // in exact arithmetic; the next candidate is only used if rounding
    // breaks that.
    let mut first_err = None;
    for &best in &order {
        let attempt = refine_corridor(&result.corridors[best], cfg.dt, veh.a_max)
            .map_err(PlanError::Refine)
            .and_then(|refined| {
                let curv = generate_curvilinear(&refined, &profiles[best], z0, cfg.dt, veh.a_max)
                    .map_err(PlanError::Reference)?;
                let global = to_global(&curv, &refined, &scenario.network, cfg.dt).map_err(PlanError::Reference)?;
                let lat = LateralParams {
                    vehicle_length: veh.length,
                    vehicle_width: veh.width,
                    margin: cfg.lateral_margin,
                    min_lateral_width: cfg.min_lateral_width,
                    d_min: cfg.d_min,
                    max_rate: 0.1,
                };
                let corrected = lateral_correction(&global, &scenario.obstacles, &scenario.network, &lat)
                    .map_err(PlanError::Reference)?;
                Ok((refined, curv, global, corrected))
            });
        match attempt {
            Ok((refined, curvilinear, uncorrected, trajectory)) => {
                return Ok(PlanOutcome {
                    initial_lanelet: lanelet,
                    initial: z0,
                    corridors: result.corridors,
                    costs,
                    profiles,
                    best,
                    refined,
                    curvilinear,
                    uncorrected,
                    trajectory,
                    search_nodes: result.nodes.len(),
                    timed_out: result.timed_out,
                    truncated: result.truncated,
                });
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.expect("at least one corridor was tried"))
}
