mod common;

use common::{poly_dist, region_dist, shoelace, step};
use corridor_core::{ConvexPoly, Interval, PVBox, PVPoint, PVRegion};
use proptest::prelude::*;

const DT: f64 = 0.1;
const A_MAX: f64 = 6.0;

fn point() -> impl Strategy<Value = PVPoint> {
    (0.0..30.0f64, 0.0..15.0f64).prop_map(|(xi, v)| PVPoint::new(xi, v))
}

fn polygon() -> impl Strategy<Value = ConvexPoly> {
    prop::collection::vec(point(), 3..9).prop_filter_map("degenerate hull", |pts| {
        ConvexPoly::hull(pts).filter(|p| p.len() >= 3 && p.area() > 0.5)
    })
}

fn pv_box() -> impl Strategy<Value = PVBox> {
    (0.0..20.0f64, 0.5..10.0f64, 0.0..10.0f64, 0.5..6.0f64)
        .prop_map(|(x, w, v, h)| PVBox::new(Interval { lo: x, hi: x + w }, Interval { lo: v, hi: v + h }))
}

fn box_overlap(a: &PVBox, b: &PVBox) -> f64 {
    let w = (a.xi.hi.min(b.xi.hi) - a.xi.lo.max(b.xi.lo)).max(0.0);
    let h = (a.v.hi.min(b.v.hi) - a.v.lo.max(b.v.lo)).max(0.0);
    w * h
}

fn area_tol(x: f64) -> f64 {
    1e-9 * x.abs().max(1.0)
}

/// Points of `p`: vertices, centroid and convex combinations of vertex pairs
/// with the centroid.
fn samples_in(p: &ConvexPoly, weights: &[f64]) -> Vec<PVPoint> {
    let vs = p.vertices();
    let c = vs.iter().fold(PVPoint::default(), |s, q| s + *q) * (1.0 / vs.len() as f64);
    let mut out: Vec<PVPoint> = vs.to_vec();
    out.push(c);
    for (i, w) in weights.iter().enumerate() {
        let (a, b) = (vs[i % vs.len()], vs[(i + 1) % vs.len()]);
        let edge = a + (b - a) * *w;
        out.push(edge + (c - edge) * (1.0 - *w));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn propagation_contains_every_simulated_endpoint(
        poly in polygon(),
        weights in prop::collection::vec(0.0..1.0f64, 8),
        n in 1usize..=6,
        seq in prop::collection::vec(0usize..21, 6),
    ) {
        let mut reach = PVRegion::from_poly(poly.clone());
        for _ in 0..n {
            reach = reach.propagate(DT, A_MAX);
        }
        for z0 in samples_in(&poly, &weights) {
            let mut z = z0;
            for &k in &seq[..n] {
                let a = -A_MAX + 2.0 * A_MAX * k as f64 / 20.0;
                z = step(z, a, DT);
            }
            prop_assert!(region_dist(&reach, z) <= 1e-9, "{z:?} outside after {n} steps");
        }
    }

    #[test]
    fn propagation_of_a_point_is_the_input_segment(z in point(), seq in prop::collection::vec(0usize..21, 6)) {
        let mut reach = PVRegion::from_point(z);
        let mut y = z;
        for &k in &seq {
            reach = reach.propagate(DT, A_MAX);
            y = step(y, -A_MAX + 2.0 * A_MAX * k as f64 / 20.0, DT);
            prop_assert!(region_dist(&reach, y) <= 1e-9);
        }
        // Full braking and full throttle bound the velocity range exactly.
        let bb = reach.bbox().unwrap();
        prop_assert!((bb.v.lo - (z.v - 6.0 * A_MAX * DT)).abs() < 1e-9);
        prop_assert!((bb.v.hi - (z.v + 6.0 * A_MAX * DT)).abs() < 1e-9);
    }

    #[test]
    fn backward_step_is_dual_to_propagation(poly in polygon(), weights in prop::collection::vec(0.0..1.0f64, 6), k in 0usize..21) {
        let r = PVRegion::from_poly(poly.clone());
        let back = r.backward_step(DT, A_MAX);
        // Any predecessor that lands inside under an admissible input is kept.
        for z in samples_in(&poly, &weights) {
            let a = -A_MAX + 2.0 * A_MAX * k as f64 / 20.0;
            let pre = PVPoint::new(z.xi - z.v * DT + 0.5 * a * DT * DT, z.v - a * DT);
            prop_assert!((step(pre, a, DT).xi - z.xi).abs() < 1e-9);
            prop_assert!(region_dist(&back, pre) <= 1e-9, "{pre:?} reaches {z:?} but is not kept");
        }
        // One step back then forward covers the original set.
        let round = back.propagate(DT, A_MAX);
        for z in samples_in(&poly, &weights) {
            prop_assert!(region_dist(&round, z) <= 1e-9);
        }
    }

    #[test]
    fn box_algebra_follows_inclusion_exclusion(a in pv_box(), b in pv_box()) {
        let (ra, rb) = (PVRegion::from_box(&a), PVRegion::from_box(&b));
        let inter = box_overlap(&a, &b);
        let union = a.area() + b.area() - inter;
        let i = ra.intersect(&rb).area();
        let u = ra.union(&rb).area();
        let d = ra.difference(&rb).area();
        prop_assert!((i - inter).abs() < area_tol(inter), "intersection {i} vs {inter}");
        prop_assert!((u - union).abs() < area_tol(union), "union {u} vs {union}");
        prop_assert!((d - (a.area() - inter)).abs() < area_tol(a.area()), "difference {d}");
    }

    #[test]
    fn union_parts_do_not_overlap(a in polygon(), b in polygon()) {
        let (ra, rb) = (PVRegion::from_poly(a.clone()), PVRegion::from_poly(b.clone()));
        let u = ra.union(&rb);
        let part_sum: f64 = u.parts().iter().map(|p| shoelace(p.vertices())).sum();
        let expected = a.area() + b.area() - ra.intersect(&rb).area();
        prop_assert!((part_sum - expected).abs() < 1e-7 * expected.max(1.0));
        prop_assert!((ra.difference(&rb).area() + ra.intersect(&rb).area() - a.area()).abs() < 1e-7 * a.area().max(1.0));
    }

    #[test]
    fn hull_is_convex_ccw_and_covers_its_input(pts in prop::collection::vec(point(), 1..20)) {
        let h = ConvexPoly::hull(pts.clone()).unwrap();
        let vs = h.vertices();
        for p in &pts {
            prop_assert!(poly_dist(vs, *p) <= 1e-9);
        }
        for v in vs {
            prop_assert!(pts.iter().any(|p| (p.xi - v.xi).abs() < 1e-9 && (p.v - v.v).abs() < 1e-9));
        }
        if vs.len() >= 3 {
            prop_assert!(shoelace(vs) > 0.0);
            let n = vs.len();
            for i in 0..n {
                let (a, b, c) = (vs[i], vs[(i + 1) % n], vs[(i + 2) % n]);
                prop_assert!((b - a).cross(c - b) > 0.0);
            }
        }
    }
}

#[test]
fn empty_and_idempotent_unions() {
    let b = PVBox::new(Interval { lo: 0.0, hi: 2.0 }, Interval { lo: 1.0, hi: 4.0 });
    let r = PVRegion::from_box(&b);
    assert!((r.union(&PVRegion::empty()).area() - 6.0).abs() < 1e-9);
    assert!((r.union(&r).area() - 6.0).abs() < 1e-9);
    assert!(r.intersect(&PVRegion::empty()).is_empty());
    assert!(r.difference(&r).area() < 1e-9);
}

#[test]
fn one_step_of_a_box_has_closed_form_area() {
    // Shear keeps the area; the Minkowski sum with the input segment adds
    // the box's extent across the segment times the segment length.
    let b = PVBox::new(Interval { lo: 0.0, hi: 4.0 }, Interval { lo: 5.0, hi: 7.0 });
    let r = PVRegion::from_box(&b).propagate(DT, A_MAX);
    let seg = PVPoint::new(0.5 * DT * DT, DT) * (2.0 * A_MAX);
    let sheared = [PVPoint::new(0.0, 5.0), PVPoint::new(4.0, 5.0), PVPoint::new(4.0, 7.0), PVPoint::new(0.0, 7.0)]
        .map(|p| PVPoint::new(p.xi + DT * p.v, p.v));
    let u = PVPoint::new(-seg.v, seg.xi) * (1.0 / seg.norm());
    let widths: Vec<f64> = sheared.iter().map(|p| p.dot(u)).collect();
    let extent = widths.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - widths.iter().cloned().fold(f64::INFINITY, f64::min);
    let expected = 8.0 + extent * seg.norm();
    assert!((r.area() - expected).abs() < 1e-9, "{} vs {expected}", r.area());
}
