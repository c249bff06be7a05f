//! Scenario documents (JSON) and their conversion to validated scenarios.

use corridor_core::model::{
    GoalSpec, InitialState, Lanelet, LaneletId, ModelError, ObstacleState, ObstacleTimeline, PlannerConfig,
    PlanningProblem, Point2, RoadNetwork, Scenario, TrafficLightRule, VehicleParams,
};
use corridor_core::Interval;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}: at `{at}`: {message}")]
    Parse { file: String, at: String, message: String },
    #[error("{file}: {error}")]
    Invalid { file: String, error: ModelError },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub lanelets: Vec<LaneletDoc>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub traffic_lights: Vec<TrafficLightDoc>,
    pub planning_problem: ProblemDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vehicle: Option<VehicleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaneletDoc {
    pub id: u64,
    #[serde(default)]
    pub left: Option<u64>,
    #[serde(default)]
    pub right: Option<u64>,
    #[serde(default)]
    pub successors: Vec<u64>,
    pub speed_limit: f64,
    pub width: f64,
    pub centerline: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleDoc {
    pub id: u64,
    pub length: f64,
    pub width: f64,
    pub trajectory: Vec<ObstacleStateDoc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleStateDoc {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub orientation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficLightDoc {
    pub lanelet: u64,
    pub stop_xi: f64,
    pub red: Vec<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub initial: InitialDoc,
    pub goal: GoalDoc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDoc {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub orientation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalDoc {
    pub lanelet: u64,
    pub xi: [f64; 2],
    pub v: [f64; 2],
    pub time: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wheelbase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_des: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_change: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_profile: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lateral_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_lateral_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_safe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_safe: Option<f64>,
}

fn interval(a: [f64; 2]) -> Interval {
    Interval { lo: a[0], hi: a[1] }
}

impl VehicleDoc {
    pub fn apply(&self, mut v: VehicleParams) -> VehicleParams {
        v.length = self.length.unwrap_or(v.length);
        v.width = self.width.unwrap_or(v.width);
        v.wheelbase = self.wheelbase.unwrap_or(v.wheelbase);
        v.a_max = self.a_max.unwrap_or(v.a_max);
        v.s_max = self.s_max.unwrap_or(v.s_max);
        v
    }
}

impl ConfigDoc {
    pub fn apply(&self, mut c: PlannerConfig) -> PlannerConfig {
        c.dt = self.dt.unwrap_or(c.dt);
        c.d_min = self.d_min.unwrap_or(c.d_min);
        c.a_des = self.a_des.unwrap_or(c.a_des);
        c.w_change = self.w_change.unwrap_or(c.w_change);
        c.w_profile = self.w_profile.unwrap_or(c.w_profile);
        c.lateral_margin = self.lateral_margin.unwrap_or(c.lateral_margin);
        c.min_lateral_width = self.min_lateral_width.unwrap_or(c.min_lateral_width);
        c.time_budget = self.time_budget.unwrap_or(c.time_budget);
        c.w_safe = self.w_safe.unwrap_or(c.w_safe);
        c.d_safe = self.d_safe.unwrap_or(c.d_safe);
        c
    }
}

impl ScenarioDoc {
    pub fn to_scenario(&self) -> Result<Scenario, ModelError> {
        let lanelets = self
            .lanelets
            .iter()
            .map(|l| {
                Lanelet::new(
                    LaneletId(l.id),
                    l.centerline.iter().map(|p| Point2::new(p[0], p[1])).collect(),
                    l.width,
                    l.speed_limit,
                    l.left.map(LaneletId),
                    l.right.map(LaneletId),
                    l.successors.iter().copied().map(LaneletId).collect(),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let network = RoadNetwork::new(lanelets)?;
        let obstacles = self
            .obstacles
            .iter()
            .map(|o| {
                let states = o
                    .trajectory
                    .iter()
                    .map(|s| ObstacleState { t: s.t, x: s.x, y: s.y, orientation: s.orientation })
                    .collect();
                ObstacleTimeline::new(o.id, o.length, o.width, states)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let lights = self
            .traffic_lights
            .iter()
            .map(|t| TrafficLightRule {
                lanelet: LaneletId(t.lanelet),
                stop_xi: t.stop_xi,
                red: t.red.iter().copied().map(interval).collect(),
            })
            .collect();
        let p = &self.planning_problem;
        let problem = PlanningProblem {
            initial: InitialState { x: p.initial.x, y: p.initial.y, v: p.initial.v, orientation: p.initial.orientation },
            goal: GoalSpec {
                lanelet: LaneletId(p.goal.lanelet),
                xi: interval(p.goal.xi),
                v: interval(p.goal.v),
                time: interval(p.goal.time),
            },
        };
        let vehicle = self.vehicle.unwrap_or_default().apply(VehicleParams::default());
        let config = self.config.unwrap_or_default().apply(PlannerConfig::default());
        Scenario::new(network, obstacles, lights, problem, vehicle, config)
    }

    /// Document describing `s`, with every vehicle and config field spelled out.
    pub fn from_scenario(s: &Scenario) -> Self {
        let lanelets = s
            .network
            .lanelets()
            .iter()
            .map(|l| LaneletDoc {
                id: l.id.0,
                left: l.left.map(|i| i.0),
                right: l.right.map(|i| i.0),
                successors: l.successors.iter().map(|i| i.0).collect(),
                speed_limit: l.speed_limit,
                width: l.width,
                centerline: l.centerline().iter().map(|p| [p.x, p.y]).collect(),
            })
            .collect();
        let obstacles = s
            .obstacles
            .iter()
            .map(|o| ObstacleDoc {
                id: o.id,
                length: o.length,
                width: o.width,
                trajectory: o
                    .states()
                    .iter()
                    .map(|st| ObstacleStateDoc { t: st.t, x: st.x, y: st.y, orientation: st.orientation })
                    .collect(),
            })
            .collect();
        let traffic_lights = s
            .traffic_lights
            .iter()
            .map(|t| TrafficLightDoc {
                lanelet: t.lanelet.0,
                stop_xi: t.stop_xi,
                red: t.red.iter().map(|r| [r.lo, r.hi]).collect(),
            })
            .collect();
        let i = s.problem.initial;
        let g = s.problem.goal;
        let v = s.vehicle;
        let c = s.config;
        ScenarioDoc {
            lanelets,
            obstacles,
            traffic_lights,
            planning_problem: ProblemDoc {
                initial: InitialDoc { x: i.x, y: i.y, v: i.v, orientation: i.orientation },
                goal: GoalDoc {
                    lanelet: g.lanelet.0,
                    xi: [g.xi.lo, g.xi.hi],
                    v: [g.v.lo, g.v.hi],
                    time: [g.time.lo, g.time.hi],
                },
            },
            vehicle: Some(VehicleDoc {
                length: Some(v.length),
                width: Some(v.width),
                wheelbase: Some(v.wheelbase),
                a_max: Some(v.a_max),
                s_max: Some(v.s_max),
            }),
            config: Some(ConfigDoc {
                dt: Some(c.dt),
                d_min: Some(c.d_min),
                a_des: Some(c.a_des),
                w_change: Some(c.w_change),
                w_profile: Some(c.w_profile),
                lateral_margin: Some(c.lateral_margin),
                min_lateral_width: Some(c.min_lateral_width),
                time_budget: Some(c.time_budget),
                w_safe: Some(c.w_safe),
                d_safe: Some(c.d_safe),
            }),
        }
    }
}

/// Parses a document, reporting schema errors with the JSON path.
pub fn parse_doc(text: &str, file: &str) -> Result<ScenarioDoc, LoadError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| LoadError::Parse {
        file: file.to_owned(),
        at: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn parse_scenario(text: &str, file: &str) -> Result<Scenario, LoadError> {
    parse_doc(text, file)?
        .to_scenario()
        .map_err(|error| LoadError::Invalid { file: file.to_owned(), error })
}

pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_owned(), source })?;
    parse_scenario(&text, &path.display().to_string())
}

pub fn to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioDoc::from_scenario(s)).expect("documents always serialize")
}
