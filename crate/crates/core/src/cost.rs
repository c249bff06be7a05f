//! Corridor cost: lane changes plus deviation from a desired profile.

use crate::freespace::{effective_speed_limit, FreeSpaceTable};
use crate::model::{ModelError, PlannerConfig, RoadNetwork};
use crate::search::Corridor;
use crate::setops::{step_state, PVPoint, Scale};
use alloc::vec::Vec;
use core::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostWeights {
    pub w_change: f64,
    pub w_profile: f64,
    pub w_safe: f64,
    pub d_safe: f64,
}

impl CostWeights {
    pub fn from_config(c: &PlannerConfig) -> Self {
        Self { w_change: c.w_change, w_profile: c.w_profile, w_safe: c.w_safe, d_safe: c.d_safe }
    }
}

impl Default for CostWeights {
    fn default() -> Self {
        Self::from_config(&PlannerConfig::default())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostBreakdown {
    pub n_change: usize,
    pub d_profile: f64,
    pub safe_distance_penalty: f64,
    pub terminal_cost: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn assemble(n_change: usize, d_profile: f64, penalty: f64, terminal: f64, w: &CostWeights) -> Self {
        let total = w.w_change * n_change as f64 + w.w_profile * d_profile + penalty + terminal;
        Self { n_change, d_profile, safe_distance_penalty: penalty, terminal_cost: terminal, total }
    }
}

/// Desired states in the coordinates of the corridor's first lanelet.
#[derive(Clone, Debug, PartialEq)]
pub struct DesiredProfile {
    pub states: Vec<PVPoint>,
}

/// One step of the desired-profile law: accelerate towards `v_max` with at
/// most `a_des`.
pub fn desired_accel(v: f64, v_max: f64, a_des: f64, dt: f64) -> f64 {
    ((v_max - v) / dt).clamp(-a_des, a_des)
}

/// Profile over `steps + 1` samples starting at `(xi0, v0)`.
///
/// `limit_at(s)` returns the speed limit governing absolute position `s`.
pub fn desired_profile_with<F: Fn(f64) -> f64>(
    xi0: f64,
    v0: f64,
    steps: usize,
    dt: f64,
    a_des: f64,
    limit_at: F,
) -> DesiredProfile {
    let mut states = Vec::with_capacity(steps + 1);
    let mut z = PVPoint::new(xi0, v0);
    states.push(z);
    for _ in 0..steps {
        let a = desired_accel(z.v, limit_at(z.xi), a_des, dt);
        z = step_state(z, a, dt);
        states.push(z);
    }
    DesiredProfile { states }
}

/// Desired profile along a corridor. The governing lanelet at position `s`
/// is the last corridor node whose origin lies at or before `s`.
pub fn desired_profile(
    corridor: &Corridor,
    network: &RoadNetwork,
    xi0: f64,
    v0: f64,
    steps: usize,
    config: &PlannerConfig,
    a_max: f64,
) -> Result<DesiredProfile, ModelError> {
    let mut limits = Vec::with_capacity(corridor.nodes.len());
    for n in &corridor.nodes {
        limits.push((n.offset, effective_speed_limit(network.lanelet(n.lanelet)?, a_max)));
    }
    let limit_at = |s: f64| {
        limits
            .iter()
            .rev()
            .find(|(off, _)| *off <= s)
            .map_or(limits[0].1, |l| l.1)
    };
    Ok(desired_profile_with(xi0, v0, steps, config.dt, config.a_des, limit_at))
}

/// Smallest deviation of the desired state from any corridor area at `step`,
/// with the closest point in the owning node's coordinates.
pub fn step_deviation(corridor: &Corridor, profile: &DesiredProfile, step: usize) -> Option<(usize, PVPoint, f64)> {
    let z = *profile.states.get(step)?;
    let mut best: Option<(usize, PVPoint, f64)> = None;
    for (k, n) in corridor.nodes.iter().enumerate() {
        let Some(area) = n.timeline.area_at(step) else { continue };
        let local = PVPoint::new(z.xi - n.offset, z.v);
        if let Ok((q, d)) = area.closest_point(local, Scale::default()) {
            if best.is_none_or(|b| d < b.2) {
                best = Some((k, q, d));
            }
        }
    }
    best
}

/// Cost of a corridor. `horizon_steps` is the normaliser `⌈t_end/Δt⌉`.
pub fn corridor_cost(
    corridor: &Corridor,
    profile: &DesiredProfile,
    weights: &CostWeights,
    horizon_steps: usize,
    safety: Option<(&FreeSpaceTable, f64)>,
) -> CostBreakdown {
    let mut sum = 0.0;
    let mut penalty = 0.0;
    for i in 0..=corridor.goal_step {
        let Some((k, q, d)) = step_deviation(corridor, profile, i) else { continue };
        sum += d;
        if let (Some((free, car_len)), true) = (safety, weights.w_safe > 0.0) {
            let lanelet = corridor.nodes[k].lanelet;
            let gap = free
                .get(lanelet, i)
                .and_then(|f| f.occupied.iter().filter(|o| o.hi > q.xi).map(|o| o.lo - q.xi - 0.5 * car_len).reduce(f64::min));
            if let Some(g) = gap {
                penalty += weights.w_safe * (weights.d_safe - g).max(0.0);
            }
        }
    }
    let d_profile = sum / horizon_steps.max(1) as f64;
    CostBreakdown::assemble(corridor.n_change, d_profile, penalty, corridor.terminal_cost, weights)
}

/// Total order used for selection: cost, lane changes, goal step, lanelet
/// sequence, search-node id.
pub fn compare(a: (&Corridor, &CostBreakdown), b: (&Corridor, &CostBreakdown)) -> Ordering {
    a.1.total
        .total_cmp(&b.1.total)
        .then(a.0.n_change.cmp(&b.0.n_change))
        .then(a.0.goal_step.cmp(&b.0.goal_step))
        .then_with(|| a.0.lanelet_sequence().cmp(&b.0.lanelet_sequence()))
        .then(a.0.leaf.cmp(&b.0.leaf))
}

/// Index of the best corridor, `None` for an empty list.
pub fn select_best(corridors: &[Corridor], costs: &[CostBreakdown]) -> Option<usize> {
    (0..corridors.len().min(costs.len()))
        .min_by(|&i, &j| compare((&corridors[i], &costs[i]), (&corridors[j], &costs[j])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_arithmetic_with_default_weights() {
        let c = CostBreakdown::assemble(2, 3.0, 0.0, 0.0, &CostWeights::default());
        assert_eq!(c.total, 23.0);
    }

    #[test]
    fn profile_from_rest() {
        let p = desired_profile_with(0.0, 0.0, 120, 0.1, 1.0, |_| 10.0);
        for i in 0..=100 {
            assert!((p.states[i].v - 0.1 * i as f64).abs() < 1e-9);
        }
        assert!((p.states[100].v - 10.0).abs() < 1e-9);
        assert!((p.states[120].v - 10.0).abs() < 1e-9);
    }

    #[test]
    fn profile_one_step_saturation() {
        assert!((desired_accel(9.95, 10.0, 1.0, 0.1) - 0.5).abs() < 1e-12);
        let p = desired_profile_with(0.0, 9.95, 1, 0.1, 1.0, |_| 10.0);
        assert!((p.states[1].v - 10.0).abs() < 1e-12);
        let cruise = desired_profile_with(0.0, 10.0, 5, 0.1, 1.0, |_| 10.0);
        assert!(cruise.states.iter().all(|z| z.v == 10.0));
    }
}
