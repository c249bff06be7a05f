use super::{LaneletId, ModelError, ObstacleTimeline, Point2};
use crate::interval::{merge_intervals, Interval};
use crate::math;
use alloc::vec::Vec;

/// Closest centerline point of a query point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    pub xi: f64,
    /// Signed lateral offset, positive to the left of the driving direction.
    pub eta: f64,
    /// Euclidean distance to the centerline.
    pub distance: f64,
    pub segment: usize,
}

/// An atomic lane segment: a centerline polyline with constant width.
#[derive(Clone, Debug, PartialEq)]
pub struct Lanelet {
    pub id: LaneletId,
    pub left: Option<LaneletId>,
    pub right: Option<LaneletId>,
    pub successors: Vec<LaneletId>,
    pub width: f64,
    pub speed_limit: f64,
    centerline: Vec<Point2>,
    /// Arc length at each centerline vertex.
    cum: Vec<f64>,
}

impl Lanelet {
    pub fn new(
        id: LaneletId,
        centerline: Vec<Point2>,
        width: f64,
        speed_limit: f64,
        left: Option<LaneletId>,
        right: Option<LaneletId>,
        successors: Vec<LaneletId>,
    ) -> Result<Self, ModelError> {
        let bad = |reason| Err(ModelError::InvalidLanelet { id, reason });
        if centerline.len() < 2 {
            return bad("centerline needs at least two points");
        }
        if centerline.iter().any(|p| !p.is_finite()) {
            return bad("centerline contains a non-finite point");
        }
        if !(width > 0.0 && width.is_finite()) {
            return bad("width must be positive");
        }
        if !(speed_limit > 0.0 && speed_limit.is_finite()) {
            return bad("speed limit must be positive");
        }
        let mut cum = Vec::with_capacity(centerline.len());
        cum.push(0.0);
        for w in centerline.windows(2) {
            let d = w[0].dist(w[1]);
            if d <= 1e-9 {
                return bad("consecutive centerline points coincide");
            }
            cum.push(cum[cum.len() - 1] + d);
        }
        Ok(Self { id, left, right, successors, width, speed_limit, centerline, cum })
    }

    pub fn centerline(&self) -> &[Point2] {
        &self.centerline
    }

    pub fn length(&self) -> f64 {
        self.cum[self.cum.len() - 1]
    }

    fn segment_count(&self) -> usize {
        self.centerline.len() - 1
    }

    fn seg_dir(&self, i: usize) -> Point2 {
        let d = self.centerline[i + 1] - self.centerline[i];
        d * (1.0 / d.norm())
    }

    fn seg_len(&self, i: usize) -> f64 {
        self.cum[i + 1] - self.cum[i]
    }

    /// Index of the segment containing arc length `xi` (clamped).
    fn segment_at(&self, xi: f64) -> usize {
        let n = self.segment_count();
        match self.cum.binary_search_by(|c| c.total_cmp(&xi)) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    pub fn project(&self, p: Point2) -> Projection {
        let mut best = Projection { xi: 0.0, eta: 0.0, distance: f64::INFINITY, segment: 0 };
        for i in 0..self.segment_count() {
            let a = self.centerline[i];
            let d = self.seg_dir(i);
            let len = self.seg_len(i);
            let u = (p - a).dot(d).clamp(0.0, len);
            let q = a + d * u;
            let dist = p.dist(q);
            if dist < best.distance {
                let side = d.cross(p - q);
                let eta = if side < 0.0 { -dist } else { dist };
                best = Projection { xi: self.cum[i] + u, eta, distance: dist, segment: i };
            }
        }
        best
    }

    /// `(ξ, η)` of a global point.
    pub fn to_curvilinear(&self, p: Point2) -> Result<(f64, f64), ModelError> {
        let pr = self.project(p);
        if pr.distance > 0.5 * self.width + 1.0 {
            return Err(ModelError::OutOfLanelet { id: self.id, distance: pr.distance });
        }
        Ok((pr.xi, pr.eta))
    }

    /// Global position and heading at `(ξ, η)`.
    pub fn from_curvilinear(&self, xi: f64, eta: f64) -> Result<(Point2, f64), ModelError> {
        if !(xi >= -1e-9 && xi <= self.length() + 1e-9) {
            return Err(ModelError::OutOfDomain { id: self.id, xi });
        }
        let xi = xi.clamp(0.0, self.length());
        let i = self.segment_at(xi);
        let d = self.seg_dir(i);
        let p = self.centerline[i] + d * (xi - self.cum[i]) + d.perp() * eta;
        Ok((p, math::atan2(d.y, d.x)))
    }

    /// Centerline point at arc length `xi`, extrapolating linearly past both ends.
    pub fn point_at(&self, xi: f64) -> Point2 {
        let i = self.segment_at(xi);
        self.centerline[i] + self.seg_dir(i) * (xi - self.cum[i])
    }

    /// Tangent angle of the segment containing `xi` (clamped).
    pub fn heading_at(&self, xi: f64) -> f64 {
        let d = self.seg_dir(self.segment_at(xi));
        math::atan2(d.y, d.x)
    }

    /// Largest per-vertex heading change divided by the mean length of the
    /// two adjacent segments; zero for a straight centerline.
    pub fn max_curvature(&self) -> f64 {
        let mut k: f64 = 0.0;
        for i in 1..self.segment_count() {
            let a = self.seg_dir(i - 1);
            let b = self.seg_dir(i);
            let dphi = math::abs(math::atan2(a.cross(b), a.dot(b)));
            let ds = 0.5 * (self.seg_len(i - 1) + self.seg_len(i));
            k = k.max(dphi / ds);
        }
        k
    }

    /// The obstacle rectangle at time `t` clipped to each segment's strip, in
    /// segment-local `(u, w)` coordinates.
    fn clipped_footprints(&self, obstacle: &ObstacleTimeline, t: f64) -> Vec<(usize, Vec<(f64, f64)>)> {
        let corners = obstacle.footprint(t);
        let hw = 0.5 * self.width;
        let mut out = Vec::new();
        for i in 0..self.segment_count() {
            let a = self.centerline[i];
            let d = self.seg_dir(i);
            let n = d.perp();
            let mut poly: Vec<(f64, f64)> =
                corners.iter().map(|c| ((*c - a).dot(d), (*c - a).dot(n))).collect();
            let len = self.seg_len(i);
            for (axis, sign, bound) in [(0, 1.0, len), (0, -1.0, 0.0), (1, 1.0, hw), (1, -1.0, hw)] {
                poly = clip_axis(&poly, axis, sign, bound);
                if poly.is_empty() {
                    break;
                }
            }
            if !poly.is_empty() {
                out.push((i, poly));
            }
        }
        out
    }

    /// ξ-intervals whose cross-section meets the obstacle at time `t`.
    pub fn occupied_long_intervals(&self, obstacle: &ObstacleTimeline, t: f64) -> Vec<Interval> {
        let items = self
            .clipped_footprints(obstacle, t)
            .into_iter()
            .map(|(i, poly)| {
                let lo = poly.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
                let hi = poly.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
                Interval { lo: self.cum[i] + lo, hi: self.cum[i] + hi }
            })
            .collect();
        merge_intervals(items)
    }

    /// Lateral band `[η_lo, η_hi]` the obstacle occupies inside the strip.
    pub fn lateral_band(&self, obstacle: &ObstacleTimeline, t: f64) -> Option<Interval> {
        let mut band: Option<Interval> = None;
        for (_, poly) in self.clipped_footprints(obstacle, t) {
            for p in poly {
                band = Some(match band {
                    None => Interval::point(p.1),
                    Some(b) => Interval { lo: b.lo.min(p.1), hi: b.hi.max(p.1) },
                });
            }
        }
        band
    }
}

/// Sutherland–Hodgman against `sign * coord[axis] <= bound`.
fn clip_axis(poly: &[(f64, f64)], axis: usize, sign: f64, bound: f64) -> Vec<(f64, f64)> {
    let f = |p: &(f64, f64)| sign * if axis == 0 { p.0 } else { p.1 } - bound;
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let cur = poly[i];
        let prev = poly[(i + n - 1) % n];
        let (fc, fp) = (f(&cur), f(&prev));
        if (fc <= 0.0) != (fp <= 0.0) {
            let t = fp / (fp - fc);
            out.push((prev.0 + (cur.0 - prev.0) * t, prev.1 + (cur.1 - prev.1) * t));
        }
        if fc <= 0.0 {
            out.push(cur);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ObstacleState;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn straight() -> Lanelet {
        Lanelet::new(LaneletId(1), vec![Point2::new(0.0, 0.0), Point2::new(100.0, 0.0)], 3.5, 13.9, None, None, vec![])
            .unwrap()
    }

    fn l_shape() -> Lanelet {
        Lanelet::new(
            LaneletId(2),
            vec![Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), Point2::new(10.0, 10.0)],
            3.5,
            10.0,
            None,
            None,
            vec![],
        )
        .unwrap()
    }

    fn parked(x: f64, y: f64, phi: f64, length: f64, width: f64) -> ObstacleTimeline {
        ObstacleTimeline::new(1, length, width, vec![ObstacleState { t: 0.0, x, y, orientation: phi }]).unwrap()
    }

    #[test]
    fn rejects_bad_lanelets() {
        let p = Point2::new(0.0, 0.0);
        assert!(Lanelet::new(LaneletId(0), vec![p], 3.0, 10.0, None, None, vec![]).is_err());
        assert!(Lanelet::new(LaneletId(0), vec![p, p], 3.0, 10.0, None, None, vec![]).is_err());
        let q = Point2::new(1.0, 0.0);
        assert!(Lanelet::new(LaneletId(0), vec![p, q], 0.0, 10.0, None, None, vec![]).is_err());
        assert!(Lanelet::new(LaneletId(0), vec![p, q], 3.0, -1.0, None, None, vec![]).is_err());
    }

    #[test]
    fn curvilinear_straight() {
        let l = straight();
        assert_eq!(l.to_curvilinear(Point2::new(50.0, 1.0)).unwrap(), (50.0, 1.0));
        assert_eq!(l.to_curvilinear(Point2::new(50.0, 0.0)).unwrap().1, 0.0);
        let (p, phi) = l.from_curvilinear(50.0, 0.0).unwrap();
        assert_eq!((p, phi), (Point2::new(50.0, 0.0), 0.0));
        assert!(matches!(l.to_curvilinear(Point2::new(50.0, 3.0)), Err(ModelError::OutOfLanelet { .. })));
        assert!(matches!(l.from_curvilinear(100.5, 0.0), Err(ModelError::OutOfDomain { .. })));
    }

    #[test]
    fn curvilinear_l_shape() {
        let l = l_shape();
        let (xi, eta) = l.to_curvilinear(Point2::new(11.0, 5.0)).unwrap();
        assert!((xi - 15.0).abs() < 1e-12 && (eta + 1.0).abs() < 1e-12);
        let (p, phi) = l.from_curvilinear(15.0, 0.0).unwrap();
        assert!(p.dist(Point2::new(10.0, 5.0)) < 1e-12);
        assert!((phi - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn aligned_obstacle_interval() {
        let l = straight();
        let iv = l.occupied_long_intervals(&parked(50.0, 0.0, 0.0, 4.0, 1.8), 0.0);
        assert_eq!(iv, vec![Interval { lo: 48.0, hi: 52.0 }]);
        assert!(l.occupied_long_intervals(&parked(50.0, 10.0, 0.0, 4.0, 1.8), 0.0).is_empty());
    }

    #[test]
    fn rotated_obstacle_clipped_to_strip() {
        let l = straight();
        // Square of side 2 rotated 45°, centred on the upper edge.
        let iv = l.occupied_long_intervals(&parked(50.0, 1.75, FRAC_PI_4, 2.0, 2.0), 0.0);
        let h = core::f64::consts::SQRT_2;
        assert_eq!(iv.len(), 1);
        assert!((iv[0].lo - (50.0 - h)).abs() < 1e-12 && (iv[0].hi - (50.0 + h)).abs() < 1e-12);
    }

    #[test]
    fn lateral_band_of_bicycle() {
        let l = straight();
        let b = l.lateral_band(&parked(30.0, 1.3, 0.0, 1.8, 0.6), 0.0).unwrap();
        assert!((b.lo - 1.0).abs() < 1e-12 && (b.hi - 1.6).abs() < 1e-12);
    }

    #[test]
    fn curvature_of_polyline() {
        assert_eq!(straight().max_curvature(), 0.0);
        assert!((l_shape().max_curvature() - FRAC_PI_2 / 10.0).abs() < 1e-12);
    }
}
