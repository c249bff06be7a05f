use super::{input_vector, PVBox, PVPoint, Scale, CLIP_EPS, COLLINEAR_EPS, DEDUP_EPS};
use crate::interval::Interval;
use crate::math;
use alloc::vec::Vec;

/// `n · p <= c` with `n` a unit vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub n: PVPoint,
    pub c: f64,
}

impl HalfPlane {
    /// Signed distance of `p` past the boundary (positive outside).
    #[inline]
    pub fn excess(&self, p: PVPoint) -> f64 {
        self.n.dot(p) - self.c
    }

    pub fn flipped(&self) -> HalfPlane {
        HalfPlane { n: -self.n, c: -self.c }
    }
}

/// A convex polygon with counter-clockwise vertices.
///
/// One vertex is a point, two vertices a segment. Collinear and duplicate
/// vertices are removed on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPoly {
    verts: Vec<PVPoint>,
}

impl ConvexPoly {
    pub fn point(p: PVPoint) -> Self {
        Self { verts: alloc::vec![p] }
    }

    pub fn segment(a: PVPoint, b: PVPoint) -> Self {
        Self::hull([a, b]).expect("segment endpoints are finite")
    }

    pub fn from_box(b: &PVBox) -> Self {
        Self::hull([
            PVPoint::new(b.xi.lo, b.v.lo),
            PVPoint::new(b.xi.hi, b.v.lo),
            PVPoint::new(b.xi.hi, b.v.hi),
            PVPoint::new(b.xi.lo, b.v.hi),
        ])
        .expect("box corners are finite")
    }

    /// Convex hull of the given points. `None` if no finite point is given.
    pub fn hull<I: IntoIterator<Item = PVPoint>>(points: I) -> Option<Self> {
        let mut pts: Vec<PVPoint> = Vec::new();
        for p in points {
            if !p.is_finite() {
                continue;
            }
            if pts.iter().all(|q| (*q - p).norm_sq() > DEDUP_EPS * DEDUP_EPS) {
                pts.push(p);
            }
        }
        match pts.len() {
            0 => return None,
            1 => return Some(Self { verts: pts }),
            _ => {}
        }
        pts.sort_by(|a, b| a.xi.total_cmp(&b.xi).then(a.v.total_cmp(&b.v)));

        // Andrew's monotone chain; a middle vertex within COLLINEAR_EPS of the
        // chord is dropped.
        let keep_left = |o: PVPoint, a: PVPoint, b: PVPoint| -> bool {
            let ob = b - o;
            let c = (a - o).cross(ob);
            c < 0.0 && c * c > COLLINEAR_EPS * COLLINEAR_EPS * ob.norm_sq()
        };
        let mut hull: Vec<PVPoint> = Vec::with_capacity(pts.len() + 1);
        for &p in &pts {
            while hull.len() >= 2 && !keep_left(hull[hull.len() - 2], p, hull[hull.len() - 1]) {
                hull.pop();
            }
            hull.push(p);
        }
        let lower_len = hull.len() + 1;
        for &p in pts.iter().rev().skip(1) {
            while hull.len() >= lower_len
                && !keep_left(hull[hull.len() - 2], p, hull[hull.len() - 1])
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        if hull.len() == 2 && (hull[0] - hull[1]).norm() <= DEDUP_EPS {
            hull.pop();
        }
        Some(Self { verts: hull })
    }

    pub fn vertices(&self) -> &[PVPoint] {
        &self.verts
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// Points and segments have no interior.
    pub fn is_degenerate(&self) -> bool {
        self.verts.len() < 3
    }

    pub fn area(&self) -> f64 {
        if self.verts.len() < 3 {
            return 0.0;
        }
        let n = self.verts.len();
        let mut s = 0.0;
        for i in 0..n {
            s += self.verts[i].cross(self.verts[(i + 1) % n]);
        }
        0.5 * s
    }

    /// Longest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.verts.iter().enumerate() {
            for b in &self.verts[i + 1..] {
                d = d.max((*a - *b).norm());
            }
        }
        d
    }

    pub fn bbox(&self) -> PVBox {
        let mut xi = Interval::point(self.verts[0].xi);
        let mut v = Interval::point(self.verts[0].v);
        for p in &self.verts[1..] {
            xi.lo = xi.lo.min(p.xi);
            xi.hi = xi.hi.max(p.xi);
            v.lo = v.lo.min(p.v);
            v.hi = v.hi.max(p.v);
        }
        PVBox { xi, v }
    }

    pub fn centroid(&self) -> PVPoint {
        let n = self.verts.len() as f64;
        self.verts.iter().fold(PVPoint::default(), |acc, p| acc + *p) * (1.0 / n)
    }

    /// Half-planes whose intersection is this polygon. Degenerate polygons
    /// are described by a zero-width slab plus end caps.
    pub fn halfplanes(&self) -> Vec<HalfPlane> {
        let n = self.verts.len();
        match n {
            1 => {
                let q = self.verts[0];
                alloc::vec![
                    HalfPlane { n: PVPoint::new(1.0, 0.0), c: q.xi },
                    HalfPlane { n: PVPoint::new(-1.0, 0.0), c: -q.xi },
                    HalfPlane { n: PVPoint::new(0.0, 1.0), c: q.v },
                    HalfPlane { n: PVPoint::new(0.0, -1.0), c: -q.v },
                ]
            }
            2 => {
                let (a, b) = (self.verts[0], self.verts[1]);
                let e = b - a;
                let d = e * (1.0 / e.norm());
                let nrm = PVPoint::new(d.v, -d.xi);
                alloc::vec![
                    HalfPlane { n: nrm, c: nrm.dot(a) },
                    HalfPlane { n: -nrm, c: -nrm.dot(a) },
                    HalfPlane { n: d, c: d.dot(b) },
                    HalfPlane { n: -d, c: -d.dot(a) },
                ]
            }
            _ => (0..n)
                .map(|i| {
                    let a = self.verts[i];
                    let e = self.verts[(i + 1) % n] - a;
                    let len = e.norm();
                    let nrm = PVPoint::new(e.v / len, -e.xi / len);
                    HalfPlane { n: nrm, c: nrm.dot(a) }
                })
                .collect(),
        }
    }

    /// Part of the polygon with `hp.excess(p) <= tol`.
    pub fn clip(&self, hp: &HalfPlane, tol: f64) -> Option<ConvexPoly> {
        let n = self.verts.len();
        let mut out: Vec<PVPoint> = Vec::with_capacity(n + 2);
        let mut all_in = true;
        for i in 0..n {
            let cur = self.verts[i];
            let prev = self.verts[(i + n - 1) % n];
            let dc = hp.excess(cur);
            let dp = hp.excess(prev);
            let cur_in = dc <= tol;
            let prev_in = dp <= tol;
            all_in &= cur_in;
            if cur_in != prev_in {
                let t = (dp / (dp - dc)).clamp(0.0, 1.0);
                out.push(prev + (cur - prev) * t);
            }
            if cur_in {
                out.push(cur);
            }
        }
        if all_in {
            return Some(self.clone());
        }
        ConvexPoly::hull(out)
    }

    pub fn clip_all(&self, hps: &[HalfPlane], tol: f64) -> Option<ConvexPoly> {
        let mut cur = self.clone();
        for hp in hps {
            cur = cur.clip(hp, tol)?;
        }
        Some(cur)
    }

    /// Intersection with another convex polygon (closed-set semantics).
    pub fn intersect(&self, other: &ConvexPoly) -> Option<ConvexPoly> {
        if other.verts.len() >= 3 || self.verts.len() < 3 {
            self.clip_all(&other.halfplanes(), CLIP_EPS)
        } else {
            other.clip_all(&self.halfplanes(), CLIP_EPS)
        }
    }

    pub fn intersect_box(&self, b: &PVBox) -> Option<ConvexPoly> {
        let hps = [
            HalfPlane { n: PVPoint::new(1.0, 0.0), c: b.xi.hi },
            HalfPlane { n: PVPoint::new(-1.0, 0.0), c: -b.xi.lo },
            HalfPlane { n: PVPoint::new(0.0, 1.0), c: b.v.hi },
            HalfPlane { n: PVPoint::new(0.0, -1.0), c: -b.v.lo },
        ];
        self.clip_all(&hps, CLIP_EPS)
    }

    pub fn translate(&self, d: PVPoint) -> ConvexPoly {
        Self { verts: self.verts.iter().map(|p| *p + d).collect() }
    }

    /// Image under the double-integrator shear. Orientation is preserved.
    pub fn shear(&self, dt: f64) -> ConvexPoly {
        Self { verts: self.verts.iter().map(|p| p.shear(dt)).collect() }
    }

    pub fn unshear(&self, dt: f64) -> ConvexPoly {
        Self { verts: self.verts.iter().map(|p| p.unshear(dt)).collect() }
    }

    /// `self ⊕ {s·d : s ∈ [-1, 1]}`.
    pub fn minkowski_segment(&self, d: PVPoint) -> ConvexPoly {
        let pts = self.verts.iter().flat_map(|p| [*p + d, *p - d]);
        ConvexPoly::hull(pts).expect("non-empty input")
    }

    /// `A·P ⊕ B·[-a_max, a_max]`.
    pub fn propagate(&self, dt: f64, a_max: f64) -> ConvexPoly {
        self.shear(dt).minkowski_segment(input_vector(dt) * a_max)
    }

    /// `A⁻¹(P ⊕ B·[-a_max, a_max])`.
    pub fn backward_step(&self, dt: f64, a_max: f64) -> ConvexPoly {
        self.minkowski_segment(input_vector(dt) * a_max).unshear(dt)
    }

    /// Penetration depth when inside (≥ 0), minus the distance when outside.
    pub fn signed_distance(&self, p: PVPoint) -> f64 {
        if self.verts.len() >= 3 {
            let mut worst = f64::NEG_INFINITY;
            for hp in self.halfplanes() {
                worst = worst.max(hp.excess(p));
            }
            if worst <= 0.0 {
                return -worst;
            }
        }
        -self.boundary_closest(p).1
    }

    pub fn contains(&self, p: PVPoint, tol: f64) -> bool {
        self.signed_distance(p) >= -tol
    }

    /// Closest point on the boundary (or the degenerate set) in the plain metric.
    fn boundary_closest(&self, p: PVPoint) -> (PVPoint, f64) {
        let n = self.verts.len();
        if n == 1 {
            return (self.verts[0], (p - self.verts[0]).norm());
        }
        let edges = if n == 2 { 1 } else { n };
        let mut best = (self.verts[0], f64::INFINITY);
        for i in 0..edges {
            let q = closest_on_segment(self.verts[i], self.verts[(i + 1) % n], p);
            let d = (q - p).norm();
            if d < best.1 {
                best = (q, d);
            }
        }
        best
    }

    /// Closest point to `p` under the scaled metric, with its scaled distance.
    pub fn closest_point(&self, p: PVPoint, scale: Scale) -> (PVPoint, f64) {
        let to = |q: PVPoint| PVPoint::new(q.xi / scale.xi, q.v / scale.v);
        let scaled = ConvexPoly { verts: self.verts.iter().map(|q| to(*q)).collect() };
        let ps = to(p);
        if scaled.verts.len() >= 3 && scaled.signed_distance(ps) >= 0.0 {
            return (p, 0.0);
        }
        let (q, d) = scaled.boundary_closest(ps);
        (PVPoint::new(q.xi * scale.xi, q.v * scale.v), d)
    }

    /// `self \ other` as interior-disjoint convex pieces.
    ///
    /// Subtracting a degenerate polygon from a full one removes nothing of
    /// positive measure and returns `self` unchanged.
    pub fn difference(&self, other: &ConvexPoly) -> Vec<ConvexPoly> {
        if other.verts.len() < 3 {
            return alloc::vec![self.clone()];
        }
        let bb_s = self.bbox();
        let bb_o = other.bbox();
        if !bb_s.xi.intersects(&bb_o.xi) || !bb_s.v.intersects(&bb_o.v) {
            return alloc::vec![self.clone()];
        }
        let mut pieces = Vec::new();
        let mut rest = self.clone();
        for hp in other.halfplanes() {
            if let Some(piece) = rest.clip(&hp.flipped(), CLIP_EPS) {
                if self.keep_piece(&piece, other) {
                    pieces.push(piece);
                }
            }
            match rest.clip(&hp, CLIP_EPS) {
                Some(r) => rest = r,
                None => return pieces,
            }
        }
        pieces
    }

    fn keep_piece(&self, piece: &ConvexPoly, removed: &ConvexPoly) -> bool {
        if self.verts.len() >= 3 {
            // Slivers thinner than ~1e-9 hug the subtrahend's boundary.
            if piece.verts.len() < 3 {
                return false;
            }
            return piece.area() > 5e-10 * piece.diameter().max(1e-12);
        }
        piece.verts.iter().any(|p| removed.signed_distance(*p) < -DEDUP_EPS)
            || removed.signed_distance(piece.centroid()) < -DEDUP_EPS
    }

    /// Parameters `t ∈ [-1, 1]` with `origin + t·dir` inside (within `tol`).
    pub fn segment_param_range(&self, origin: PVPoint, dir: PVPoint, tol: f64) -> Option<Interval> {
        let mut lo = -1.0f64;
        let mut hi = 1.0f64;
        for hp in self.halfplanes() {
            let nd = hp.n.dot(dir);
            let slack = hp.c + tol - hp.n.dot(origin);
            if math::abs(nd) < 1e-15 {
                if slack < 0.0 {
                    return None;
                }
                continue;
            }
            let t = slack / nd;
            if nd > 0.0 {
                hi = hi.min(t);
            } else {
                lo = lo.max(t);
            }
            if lo > hi {
                return None;
            }
        }
        Some(Interval { lo, hi })
    }
}

pub(crate) fn closest_on_segment(a: PVPoint, b: PVPoint, p: PVPoint) -> PVPoint {
    let e = b - a;
    let ee = e.dot(e);
    if ee <= 0.0 {
        return a;
    }
    let t = ((p - a).dot(e) / ee).clamp(0.0, 1.0);
    a + e * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(xi: f64, v: f64) -> PVPoint {
        PVPoint::new(xi, v)
    }

    fn unit_box() -> ConvexPoly {
        ConvexPoly::hull([p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn hull_drops_interior_and_collinear() {
        let h = ConvexPoly::hull([
            p(0.0, 0.0),
            p(0.5, 0.0),
            p(1.0, 0.0),
            p(1.0, 1.0),
            p(0.0, 1.0),
            p(0.5, 0.5),
            p(0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(h.len(), 4);
        assert!((h.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hull_degenerate_cases() {
        assert_eq!(ConvexPoly::hull([p(1.0, 2.0); 3]).unwrap().len(), 1);
        let s = ConvexPoly::hull([p(0.0, 0.0), p(2.0, 2.0), p(1.0, 1.0)]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(ConvexPoly::hull([]).is_none());
    }

    #[test]
    fn propagate_point_is_exact_segment() {
        let seg = ConvexPoly::point(p(0.0, 10.0)).propagate(0.1, 2.0);
        assert_eq!(seg.len(), 2);
        let v = seg.vertices();
        let (lo, hi) = if v[0].xi < v[1].xi { (v[0], v[1]) } else { (v[1], v[0]) };
        assert!((lo.xi - 0.99).abs() < 1e-12 && (lo.v - 9.8).abs() < 1e-12);
        assert!((hi.xi - 1.01).abs() < 1e-12 && (hi.v - 10.2).abs() < 1e-12);
    }

    #[test]
    fn propagate_without_input_is_shear() {
        let q = ConvexPoly::point(p(0.0, 10.0)).propagate(0.1, 0.0);
        assert_eq!(q.len(), 1);
        assert!((q.vertices()[0].xi - 1.0).abs() < 1e-12);
        let back = ConvexPoly::point(p(1.0, 10.0)).backward_step(0.1, 0.0);
        assert!(back.vertices()[0].xi.abs() < 1e-12);
    }

    #[test]
    fn clip_segment_and_point() {
        let seg = ConvexPoly::segment(p(-1.0, 0.5), p(2.0, 0.5));
        let c = seg.intersect(&unit_box()).unwrap();
        assert_eq!(c.len(), 2);
        let bb = c.bbox();
        assert!((bb.xi.lo - 0.0).abs() < 1e-9 && (bb.xi.hi - 1.0).abs() < 1e-9);
        assert!(ConvexPoly::point(p(2.0, 2.0)).intersect(&unit_box()).is_none());
        assert!(unit_box().intersect(&ConvexPoly::point(p(1.0, 1.0))).is_some());
    }

    #[test]
    fn segment_segment_crossing() {
        let a = ConvexPoly::segment(p(0.0, 0.0), p(2.0, 2.0));
        let b = ConvexPoly::segment(p(0.0, 2.0), p(2.0, 0.0));
        let x = a.intersect(&b).unwrap();
        assert!((x.centroid() - p(1.0, 1.0)).norm() < 1e-9);
        let c = ConvexPoly::segment(p(0.0, 1.0), p(2.0, 3.0));
        assert!(a.intersect(&c).is_none());
    }

    #[test]
    fn box_difference_partitions() {
        let a = unit_box();
        let b = ConvexPoly::from_box(&PVBox::new(
            Interval { lo: 0.5, hi: 2.0 },
            Interval { lo: 0.5, hi: 2.0 },
        ));
        let pieces = a.difference(&b);
        let area: f64 = pieces.iter().map(|q| q.area()).sum();
        assert!((area - 0.75).abs() < 1e-9);
        assert_eq!(a.difference(&a).len(), 0);
        let far = a.translate(p(5.0, 0.0));
        assert_eq!(a.difference(&far), vec![a.clone()]);
    }

    #[test]
    fn signed_distance_and_closest() {
        let b = unit_box();
        assert!((b.signed_distance(p(0.5, 0.5)) - 0.5).abs() < 1e-12);
        assert!((b.signed_distance(p(2.0, 0.5)) + 1.0).abs() < 1e-12);
        let (q, d) = b.closest_point(p(2.0, 0.5), Scale::default());
        assert!((q - p(1.0, 0.5)).norm() < 1e-12 && (d - 1.0).abs() < 1e-12);
        let (q, d) = b.closest_point(p(0.25, 0.75), Scale::default());
        assert_eq!((q, d), (p(0.25, 0.75), 0.0));
        let (_, d) = b.closest_point(p(3.0, 0.5), Scale { xi: 2.0, v: 1.0 });
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segment_param_range_clips() {
        let r = unit_box().segment_param_range(p(0.5, 0.5), p(1.0, 0.0), 0.0).unwrap();
        assert!((r.lo + 0.5).abs() < 1e-12 && (r.hi - 0.5).abs() < 1e-12);
        assert!(unit_box().segment_param_range(p(5.0, 5.0), p(1.0, 0.0), 0.0).is_none());
    }
}
