//! Scenario data model: road network, obstacles, planning problem and
//! parameters.

mod geom;
mod lanelet;
mod network;
mod obstacle;
mod params;

pub use geom::{rect_corners, Point2};
pub use lanelet::{Lanelet, Projection};
pub use network::RoadNetwork;
pub use obstacle::{ObstacleState, ObstacleTimeline};
pub use params::{GoalSpec, InitialState, PlannerConfig, PlanningProblem, VehicleParams};

use crate::interval::Interval;
use crate::math;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Identifier of a lanelet in a [`RoadNetwork`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LaneletId(pub u64);

impl fmt::Display for LaneletId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    InvalidLanelet { id: LaneletId, reason: &'static str },
    DuplicateLanelet(LaneletId),
    UnknownLanelet(LaneletId),
    UnknownReference { from: LaneletId, relation: &'static str, to: LaneletId },
    /// `a.<relation> = b` but the reverse link on `b` does not point back.
    InconsistentAdjacency { a: LaneletId, b: LaneletId, relation: &'static str, found: Option<LaneletId> },
    SelfSuccessor(LaneletId),
    OutOfLanelet { id: LaneletId, distance: f64 },
    OutOfDomain { id: LaneletId, xi: f64 },
    InvalidObstacle { id: u64, reason: &'static str },
    InvalidVehicle(&'static str),
    InvalidConfig(&'static str),
    InvalidProblem(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ModelError::*;
        match self {
            InvalidLanelet { id, reason } => write!(f, "lanelet {id}: {reason}"),
            DuplicateLanelet(id) => write!(f, "duplicate lanelet id {id}"),
            UnknownLanelet(id) => write!(f, "unknown lanelet {id}"),
            UnknownReference { from, relation, to } => {
                write!(f, "lanelet {from}: {relation} refers to unknown lanelet {to}")
            }
            InconsistentAdjacency { a, b, relation, found } => {
                let back = if *relation == "left" { "right" } else { "left" };
                match found {
                    Some(c) => write!(f, "inconsistent adjacency ({a}, {b}): {a}.{relation} = {b} but {b}.{back} = {c}"),
                    None => write!(f, "inconsistent adjacency ({a}, {b}): {a}.{relation} = {b} but {b}.{back} is unset"),
                }
            }
            SelfSuccessor(id) => write!(f, "lanelet {id} lists itself as a successor"),
            OutOfLanelet { id, distance } => {
                write!(f, "point is {distance:.3} m from the centerline of lanelet {id}")
            }
            OutOfDomain { id, xi } => write!(f, "xi = {xi} outside lanelet {id}"),
            InvalidObstacle { id, reason } => write!(f, "obstacle {id}: {reason}"),
            InvalidVehicle(r) => write!(f, "vehicle: {r}"),
            InvalidConfig(r) => write!(f, "config: {r}"),
            InvalidProblem(r) => write!(f, "planning problem: {r}"),
        }
    }
}

impl core::error::Error for ModelError {}

/// Stop line of a traffic light. During a red phase the band
/// `[stop_xi - 0.5, stop_xi]` of the lanelet is blocked.
#[derive(Clone, Debug, PartialEq)]
pub struct TrafficLightRule {
    pub lanelet: LaneletId,
    pub stop_xi: f64,
    pub red: Vec<Interval>,
}

impl TrafficLightRule {
    pub const BAND: f64 = 0.5;

    pub fn is_red(&self, t: f64) -> bool {
        self.red.iter().any(|r| r.contains(t))
    }

    pub fn blocked(&self) -> Interval {
        Interval { lo: self.stop_xi - Self::BAND, hi: self.stop_xi }
    }
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub network: RoadNetwork,
    pub obstacles: Vec<ObstacleTimeline>,
    pub traffic_lights: Vec<TrafficLightRule>,
    pub problem: PlanningProblem,
    pub vehicle: VehicleParams,
    pub config: PlannerConfig,
}

impl Scenario {
    pub fn new(
        network: RoadNetwork,
        obstacles: Vec<ObstacleTimeline>,
        traffic_lights: Vec<TrafficLightRule>,
        problem: PlanningProblem,
        vehicle: VehicleParams,
        config: PlannerConfig,
    ) -> Result<Self, ModelError> {
        vehicle.validate()?;
        config.validate()?;
        problem.validate()?;
        let goal = network
            .get(problem.goal.lanelet)
            .ok_or(ModelError::UnknownLanelet(problem.goal.lanelet))?;
        if problem.goal.xi.lo < -1e-9 || problem.goal.xi.hi > goal.length() + 1e-9 {
            return Err(ModelError::InvalidProblem(alloc::format!(
                "goal xi {} not within [0, {}] of lanelet {}",
                problem.goal.xi,
                goal.length(),
                goal.id
            )));
        }
        for tl in &traffic_lights {
            if network.get(tl.lanelet).is_none() {
                return Err(ModelError::UnknownLanelet(tl.lanelet));
            }
            if !tl.stop_xi.is_finite() {
                return Err(ModelError::InvalidProblem("traffic light stop_xi must be finite".into()));
            }
        }
        Ok(Self { network, obstacles, traffic_lights, problem, vehicle, config })
    }

    /// Number of time steps covered by the plan: `⌈t_end / Δt⌉`.
    pub fn horizon_steps(&self) -> usize {
        math::ceil_tol(self.problem.goal.time.hi / self.config.dt).max(0.0) as usize
    }
}
