//! Text artifacts: trajectories, corridor summaries, simulation logs and SVG.

use corridor_core::cost::CostBreakdown;
use corridor_core::model::Scenario;
use corridor_core::pipeline::PlanOutcome;
use corridor_core::reference::ReferenceTrajectory;
use corridor_core::search::Corridor;
use corridor_core::sim::{SimLog, SimSummary};
use corridor_core::PVRegion;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;

/// `x` rounded to 9 significant digits, without trailing zeros.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.8e}", x);
    let v: f64 = s.parse().expect("formatted float parses");
    let mag = v.abs().log10().floor() as i32;
    let decimals = (8 - mag).max(0) as usize;
    let mut out = format!("{:.*}", decimals, v);
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    if out == "-0" {
        out = "0".into();
    }
    out
}

fn num(x: f64) -> Value {
    let v: f64 = sig9(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn trajectory_csv(t: &ReferenceTrajectory) -> String {
    let mut out = String::from("t,x,y,v,orientation\n");
    for s in &t.samples {
        let _ = writeln!(out, "{},{},{},{},{}", sig9(s.t), sig9(s.x), sig9(s.y), sig9(s.v), sig9(s.orientation));
    }
    out
}

pub fn trajectory_json(t: &ReferenceTrajectory) -> Value {
    Value::Array(
        t.samples
            .iter()
            .map(|s| json!({"t": num(s.t), "x": num(s.x), "y": num(s.y), "v": num(s.v), "orientation": num(s.orientation)}))
            .collect(),
    )
}

fn region_json(r: &PVRegion) -> Value {
    Value::Array(
        r.parts()
            .iter()
            .map(|p| Value::Array(p.vertices().iter().map(|v| json!([num(v.xi), num(v.v)])).collect()))
            .collect(),
    )
}

fn cost_json(c: &CostBreakdown) -> Value {
    json!({
        "n_change": c.n_change,
        "d_profile": num(c.d_profile),
        "safe_distance_penalty": num(c.safe_distance_penalty),
        "terminal_cost": num(c.terminal_cost),
        "J": num(c.total),
    })
}

fn corridor_json(c: &Corridor, cost: &CostBreakdown, with_areas: bool) -> Value {
    let mut v = json!({
        "lanelets": c.lanelet_sequence().iter().map(|l| l.0).collect::<Vec<_>>(),
        "n_change": c.n_change,
        "goal_step": c.goal_step,
        "cost": cost_json(cost),
    });
    if with_areas {
        v["areas"] = Value::Array(
            c.nodes
                .iter()
                .map(|n| {
                    json!({
                        "lanelet": n.lanelet.0,
                        "offset": num(n.offset),
                        "start_step": n.timeline.start,
                        "steps": n.timeline.areas.iter().map(region_json).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        );
    }
    v
}

/// Summary of a plan: every corridor with its cost, and the selected one
/// with its refined per-step areas.
pub fn plan_summary(out: &PlanOutcome) -> Value {
    json!({
        "initial_lanelet": out.initial_lanelet.0,
        "corridor_count": out.corridors.len(),
        "search_nodes": out.search_nodes,
        "corridors": out.corridors.iter().zip(&out.costs).map(|(c, k)| corridor_json(c, k, false)).collect::<Vec<_>>(),
        "selected": corridor_json(&out.refined, out.best_cost(), true),
    })
}

pub fn sim_csv(log: &SimLog) -> String {
    let mut out = String::from("t,x,y,v,orientation,a,steer,ref_x,ref_y,ref_v,min_gap,friction_margin,cross_track,replan_ms,fallback\n");
    for t in &log.ticks {
        let (rx, ry, rv) = t.reference.map_or((String::new(), String::new(), String::new()), |r| {
            (sig9(r.pos.x), sig9(r.pos.y), sig9(r.v))
        });
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            sig9(t.t),
            sig9(t.state.x),
            sig9(t.state.y),
            sig9(t.state.v),
            sig9(t.state.orientation),
            sig9(t.control.a),
            sig9(t.control.s),
            rx,
            ry,
            rv,
            sig9(t.min_gap),
            sig9(t.friction_margin),
            sig9(t.cross_track),
            t.replan_ms.map(sig9).unwrap_or_default(),
            u8::from(t.fallback),
        );
    }
    out
}

#[derive(Serialize)]
struct SummaryDoc {
    reached: bool,
    collided: bool,
    ticks: usize,
    min_gap: Value,
    mean_replan_ms: Value,
    p95_replan_ms: Value,
    fallback_ticks: usize,
    max_cross_track: Value,
    min_friction_margin: Value,
}

pub fn sim_summary_json(s: &SimSummary) -> Value {
    serde_json::to_value(SummaryDoc {
        reached: s.reached,
        collided: s.collided,
        ticks: s.ticks,
        min_gap: num(s.min_gap),
        mean_replan_ms: num(s.mean_replan_ms),
        p95_replan_ms: num(s.p95_replan_ms),
        fallback_ticks: s.fallback_ticks,
        max_cross_track: num(s.max_cross_track),
        min_friction_margin: num(s.min_friction_margin),
    })
    .expect("summary serializes")
}

/// SVG drawing options.
#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Pixels per meter.
    pub scale: f64,
    /// Times at which obstacle footprints are drawn.
    pub times: Vec<f64>,
}

/// Lanelets, obstacle snapshots, the goal, the selected corridor's areas
/// swept along the centerline, and the reference trajectory. The y axis
/// points up.
pub fn svg(scenario: &Scenario, plan: Option<&PlanOutcome>, opts: &SvgOptions) -> String {
    let net = &scenario.network;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for l in net.lanelets() {
        for p in l.centerline() {
            pts.push((p.x - l.width, p.y - l.width));
            pts.push((p.x + l.width, p.y + l.width));
        }
    }
    let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
    let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1), a.1.max(p.1)));
    let k = opts.scale;
    let (w, h) = ((x1 - x0) * k, (y1 - y0) * k);
    let tx = |x: f64| (x - x0) * k;
    let ty = |y: f64| (y1 - y) * k;
    let poly = |p: &[(f64, f64)]| p.iter().map(|(x, y)| format!("{:.2},{:.2}", tx(*x), ty(*y))).collect::<Vec<_>>().join(" ");

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#);
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for l in net.lanelets() {
        let band = lane_polygon(l, 0.0, l.length(), 0.5 * l.width);
        let _ = writeln!(s, r##"<polygon points="{}" fill="#e6e6e6" stroke="#777777" stroke-width="1"/>"##, poly(&band));
    }
    let g = &scenario.problem.goal;
    if let Some(l) = net.get(g.lanelet) {
        let band = lane_polygon(l, g.xi.lo.max(0.0), g.xi.hi.min(l.length()), 0.5 * l.width);
        let _ = writeln!(s, r##"<polygon points="{}" fill="#ffd700" fill-opacity="0.6"/>"##, poly(&band));
    }
    if let Some(p) = plan {
        for n in &p.refined.nodes {
            let Some(l) = net.get(n.lanelet) else { continue };
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for a in &n.timeline.areas {
                if let Some(b) = a.bbox() {
                    lo = lo.min(b.xi.lo);
                    hi = hi.max(b.xi.hi);
                }
            }
            if lo < hi {
                let band = lane_polygon(l, lo.max(0.0), hi.min(l.length()), 0.5 * l.width);
                let _ = writeln!(s, r##"<polygon points="{}" fill="#ff0000" fill-opacity="0.4"/>"##, poly(&band));
            }
        }
    }
    for o in &scenario.obstacles {
        for &t in &opts.times {
            let c: Vec<(f64, f64)> = o.footprint(t).iter().map(|p| (p.x, p.y)).collect();
            let _ = writeln!(s, r##"<polygon points="{}" fill="#1f4fff" fill-opacity="0.7"/>"##, poly(&c));
        }
    }
    if let Some(p) = plan {
        let line: Vec<(f64, f64)> = p.trajectory.samples.iter().map(|q| (q.x, q.y)).collect();
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#000000" stroke-width="2"/>"##, poly(&line));
    }
    s.push_str("</svg>\n");
    s
}

fn lane_polygon(l: &corridor_core::model::Lanelet, lo: f64, hi: f64, hw: f64) -> Vec<(f64, f64)> {
    let n = ((hi - lo) / 1.0).ceil().max(1.0) as usize;
    let at = |i: usize, side: f64| {
        let xi = lo + (hi - lo) * i as f64 / n as f64;
        let p = l.point_at(xi);
        let nrm = corridor_core::Point2::from_angle(l.heading_at(xi)).perp();
        let q = p + nrm * (side * hw);
        (q.x, q.y)
    };
    let mut out: Vec<(f64, f64)> = (0..=n).map(|i| at(i, -1.0)).collect();
    out.extend((0..=n).rev().map(|i| at(i, 1.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(0.1 + 0.2), "0.3");
        assert_eq!(sig9(123456.789012), "123456.789");
        assert_eq!(sig9(-0.000123456789123), "-0.000123456789");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(-1e-20), "-0.00000000000000000001");
    }
}
