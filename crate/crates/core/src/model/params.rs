use super::{LaneletId, ModelError};
use crate::interval::Interval;
use core::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VehicleParams {
    pub length: f64,
    pub width: f64,
    pub wheelbase: f64,
    pub a_max: f64,
    /// Maximum steering angle (rad).
    pub s_max: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self { length: 4.5, width: 2.0, wheelbase: 2.6, a_max: 6.0, s_max: 0.7 }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !(pos(self.length) && pos(self.width) && pos(self.wheelbase) && pos(self.a_max) && pos(self.s_max)) {
            return Err(ModelError::InvalidVehicle("all parameters must be positive"));
        }
        if self.s_max >= FRAC_PI_2 {
            return Err(ModelError::InvalidVehicle("s_max must be below pi/2"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannerConfig {
    pub dt: f64,
    /// Minimum distance kept to other traffic participants (m).
    pub d_min: f64,
    /// Acceleration of the desired profile (m/s²).
    pub a_des: f64,
    pub w_change: f64,
    pub w_profile: f64,
    /// Clearance kept on each side when passing a partially occupying obstacle.
    pub lateral_margin: f64,
    pub min_lateral_width: f64,
    /// Wall-clock budget of the corridor search (s).
    pub time_budget: f64,
    /// Weight of the safe-distance penalty; zero disables it.
    pub w_safe: f64,
    pub d_safe: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            d_min: 1.0,
            a_des: 1.0,
            w_change: 10.0,
            w_profile: 1.0,
            lateral_margin: 0.25,
            min_lateral_width: 0.0,
            time_budget: 10.0,
            w_safe: 0.0,
            d_safe: 0.0,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let fin = |x: f64| x.is_finite();
        if !(self.dt > 0.0 && fin(self.dt)) {
            return Err(ModelError::InvalidConfig("dt must be positive"));
        }
        if !(self.d_min >= 0.0 && fin(self.d_min)) {
            return Err(ModelError::InvalidConfig("d_min must be non-negative"));
        }
        if !(self.a_des >= 0.0 && fin(self.a_des)) {
            return Err(ModelError::InvalidConfig("a_des must be non-negative"));
        }
        for w in [self.w_change, self.w_profile, self.w_safe, self.d_safe] {
            if !(w >= 0.0 && fin(w)) {
                return Err(ModelError::InvalidConfig("weights must be non-negative"));
            }
        }
        if !(self.lateral_margin >= 0.0 && self.min_lateral_width >= 0.0) {
            return Err(ModelError::InvalidConfig("lateral margins must be non-negative"));
        }
        if !(self.time_budget > 0.0) {
            return Err(ModelError::InvalidConfig("time budget must be positive"));
        }
        Ok(())
    }
}

/// Initial pose of the vehicle center.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct InitialState {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub orientation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoalSpec {
    pub lanelet: LaneletId,
    pub xi: Interval,
    pub v: Interval,
    pub time: Interval,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanningProblem {
    pub initial: InitialState,
    pub goal: GoalSpec,
}

impl PlanningProblem {
    pub fn validate(&self) -> Result<(), ModelError> {
        let i = &self.initial;
        if !(i.x.is_finite() && i.y.is_finite() && i.orientation.is_finite() && i.v.is_finite()) {
            return Err(ModelError::InvalidProblem("initial state must be finite".into()));
        }
        if i.v < 0.0 {
            return Err(ModelError::InvalidProblem("initial velocity must be non-negative".into()));
        }
        for (name, iv) in [("xi", self.goal.xi), ("v", self.goal.v), ("time", self.goal.time)] {
            if Interval::new(iv.lo, iv.hi).is_none() {
                return Err(ModelError::InvalidProblem(alloc::format!("goal {name} interval {iv} is empty")));
            }
        }
        if self.goal.time.lo < 0.0 {
            return Err(ModelError::InvalidProblem("goal time must be non-negative".into()));
        }
        Ok(())
    }
}
