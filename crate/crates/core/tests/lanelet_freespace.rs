mod common;

use common::{cruising, parked, straight_road};
use corridor_core::freespace::{compute_free_space, effective_speed_limit, lateral_pass, FreeSpaceParams};
use corridor_core::limits::{max_corner_speed, min_lane_change_steps, min_lane_change_time};
use corridor_core::model::{Lanelet, LaneletId};
use corridor_core::{Interval, Point2, TrafficLightRule};
use proptest::prelude::*;

fn params() -> FreeSpaceParams {
    FreeSpaceParams {
        vehicle_length: 4.5,
        vehicle_width: 2.0,
        a_max: 6.0,
        d_min: 1.0,
        lateral_margin: 0.25,
        min_lateral_width: 0.0,
    }
}

fn lane(length: f64, width: f64) -> Lanelet {
    straight_road(length, 1, width, 14.0).lanelets()[0].clone()
}

proptest! {
    #[test]
    fn curvilinear_round_trip_on_straight_lanelets(
        heading in -3.1..3.1f64,
        len in 5.0..80.0f64,
        frac in 0.0..1.0f64,
        eta in -1.7..1.7f64,
        x0 in -50.0..50.0f64,
        y0 in -50.0..50.0f64,
    ) {
        let d = Point2::from_angle(heading);
        let a = Point2::new(x0, y0);
        let line = vec![a, a + d * (0.5 * len), a + d * len];
        let l = Lanelet::new(LaneletId(1), line, 3.5, 10.0, None, None, vec![]).unwrap();
        let xi = frac * l.length();
        let (p, h) = l.from_curvilinear(xi, eta).unwrap();
        let (xi2, eta2) = l.to_curvilinear(p).unwrap();
        prop_assert!((xi - xi2).abs() < 1e-9 && (eta - eta2).abs() < 1e-9, "({xi}, {eta}) -> ({xi2}, {eta2})");
        prop_assert!((h - heading).abs() < 1e-9);
    }
}

#[test]
fn curvilinear_rejects_points_off_the_domain() {
    let l = lane(20.0, 3.5);
    assert!(l.from_curvilinear(25.0, 0.0).is_err());
    assert!(l.to_curvilinear(Point2::new(10.0, 30.0)).is_err());
}

#[test]
fn kinematic_limits() {
    assert_eq!(min_lane_change_time(4.0, 4.0), 2.0);
    assert_eq!(min_lane_change_steps(3.5, 6.0, 0.1), 16);
    assert_eq!(max_corner_speed(0.1, 10.0), 10.0);
    assert_eq!(max_corner_speed(0.0, 6.0), f64::INFINITY);
}

#[test]
fn corner_limit_caps_the_legal_limit_on_arcs() {
    // Radius 10 m: v = sqrt(a_max * r) = sqrt(6 * 10).
    let r = 10.0;
    let line = (0..=40).map(|k| {
        let th = k as f64 * 0.025;
        Point2::new(r * th.sin(), r * (1.0 - th.cos()))
    });
    let l = Lanelet::new(LaneletId(1), line.collect(), 3.5, 14.0, None, None, vec![]).unwrap();
    let v = effective_speed_limit(&l, 6.0);
    assert!((v - 60f64.sqrt()).abs() < 0.05, "{v}");
    assert_eq!(effective_speed_limit(&lane(50.0, 3.5), 6.0), 14.0);
}

#[test]
fn full_width_obstacle_is_bloated_by_half_length_and_gap() {
    let l = lane(100.0, 3.5);
    let car = parked(1, 50.0, 0.0, 4.5, 2.0);
    let cells = compute_free_space(&l, &[car], &[], 0.0, &params());
    assert_eq!(cells.len(), 2);
    assert!((cells[0].xi.lo - 0.0).abs() < 1e-9 && (cells[0].xi.hi - 44.5).abs() < 1e-9, "{:?}", cells[0]);
    assert!((cells[1].xi.lo - 55.5).abs() < 1e-9 && (cells[1].xi.hi - 100.0).abs() < 1e-9, "{:?}", cells[1]);
    for c in &cells {
        assert_eq!(c.v, Interval { lo: 0.0, hi: 14.0 });
    }
}

#[test]
fn moving_obstacle_is_evaluated_at_the_query_time() {
    let l = lane(100.0, 3.5);
    let car = cruising(1, 20.0, 0.0, 10.0, 4.5, 2.0);
    let cells = compute_free_space(&l, &[car], &[], 3.0, &params());
    assert!((cells[0].xi.hi - (50.0 - 5.5)).abs() < 1e-9);
    assert!((cells[1].xi.lo - (50.0 + 5.5)).abs() < 1e-9);
}

#[test]
fn narrow_partial_obstacle_leaves_room_to_pass() {
    // 3.5 m lane, bike band [1.0, 1.6]: 2.75 m free on the right >= 2 + 2 * 0.25.
    let l = lane(100.0, 3.5);
    let bike = parked(1, 40.0, 1.3, 1.8, 0.6);
    assert!(lateral_pass(&l, &bike, 0.0, 2.0, 0.25, 0.0));
    let cells = compute_free_space(&l, &[bike], &[], 0.0, &params());
    assert_eq!(cells.len(), 1);
    assert_eq!(cells[0].xi, Interval { lo: 0.0, hi: 100.0 });
}

#[test]
fn partial_obstacle_in_a_narrow_lane_blocks() {
    // 3 m lane, bike band [-1.4, -0.8]: at most 2.3 m free < 2.5 m needed.
    let l = lane(100.0, 3.0);
    let bike = parked(1, 40.0, -1.1, 1.8, 0.6);
    assert!(!lateral_pass(&l, &bike, 0.0, 2.0, 0.25, 0.0));
    let cells = compute_free_space(&l, &[bike], &[], 0.0, &params());
    assert_eq!(cells.len(), 2);
    assert!((cells[0].xi.hi - (40.0 - 0.9 - 3.25)).abs() < 1e-9);
}

#[test]
fn minimum_lateral_width_overrides_the_vehicle_width() {
    let l = lane(100.0, 3.5);
    let bike = parked(1, 40.0, 1.3, 1.8, 0.6);
    assert!(!lateral_pass(&l, &bike, 0.0, 2.0, 0.25, 3.0));
}

#[test]
fn red_light_blocks_the_stop_band_only_while_red() {
    let l = lane(60.0, 3.5);
    let rule = TrafficLightRule { lanelet: l.id, stop_xi: 59.0, red: vec![Interval { lo: 0.0, hi: 2.0 }] };
    let red = compute_free_space(&l, &[], std::slice::from_ref(&rule), 1.0, &params());
    assert_eq!(red.len(), 2);
    assert!((red[0].xi.hi - 58.5).abs() < 1e-12 && (red[1].xi.lo - 59.0).abs() < 1e-12);
    let green = compute_free_space(&l, &[], &[rule], 3.0, &params());
    assert_eq!(green.len(), 1);
}

#[test]
fn obstacle_on_another_lane_is_ignored() {
    let net = straight_road(100.0, 2, 3.5, 14.0);
    let car = parked(1, 50.0, 3.5, 4.5, 2.0);
    let cells = compute_free_space(net.get(LaneletId(1)).unwrap(), &[car], &[], 0.0, &params());
    assert_eq!(cells.len(), 1);
}
