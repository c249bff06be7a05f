//! Set-based decision making for automated vehicles on lanelet road networks.
//!
//! The planner works in the longitudinal position–velocity plane of each
//! lanelet. Reachable sets of a double integrator are propagated forward as
//! unions of convex polygons, intersected with the free space left by other
//! traffic participants, and passed between lanelets through left, right and
//! successor transitions. The resulting search tree yields every driving
//! corridor that reaches the goal; the cheapest one is refined backwards from
//! the goal and a dynamically consistent reference trajectory is extracted.
//!
//! The crate is `no_std` and only needs `alloc`. Anything that touches files,
//! wall-clock time or threads lives in the companion `corridor` crate; the
//! search time budget is read through the [`Clock`] trait.
//!
//! Pipeline overview:
//!
//! 1. [`freespace::FreeSpaceTable`]: free cells per lanelet and time step.
//! 2. [`search::find_corridors`]: breadth-first exploration of lanelets,
//!    running [`drivable_area::compute_lanelet_area`] per queue entry.
//! 3. [`cost::select_best`]: lane-change count plus deviation from a
//!    desired position–velocity profile.
//! 4. [`refine::refine_corridor`]: backward propagation from the goal.
//! 5. [`reference`]: greedy closest-point reference and global-frame output.
//!
//! [`pipeline::plan`] runs all of the above; [`sim`] closes the loop with a
//! kinematic single-track plant.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod clock;
pub mod cost;
pub mod drivable_area;
pub mod freespace;
pub mod interval;
pub mod limits;
pub mod math;
pub mod model;
pub mod pipeline;
pub mod refine;
pub mod reference;
pub mod search;
pub mod setops;
pub mod sim;

pub use clock::{Clock, FrozenClock};
pub use interval::Interval;
pub use model::{
    LaneletId, ModelError, ObstacleState, ObstacleTimeline, PlannerConfig, PlanningProblem,
    Point2, RoadNetwork, Scenario, TrafficLightRule, VehicleParams,
};
pub use pipeline::{plan, PlanError, PlanOutcome};
pub use setops::{ConvexPoly, PVBox, PVPoint, PVRegion};
