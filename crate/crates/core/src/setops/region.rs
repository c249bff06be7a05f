use super::{ConvexPoly, PVBox, PVPoint, Scale, DEDUP_EPS};
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetError {
    /// A query that needs at least one point was made on an empty region.
    Empty,
}

impl fmt::Display for SetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetError::Empty => f.write_str("query on an empty region"),
        }
    }
}

impl core::error::Error for SetError {}

/// A finite union of interior-disjoint convex polygons.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PVRegion {
    parts: Vec<ConvexPoly>,
}

impl PVRegion {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn from_poly(p: ConvexPoly) -> Self {
        Self { parts: alloc::vec![p] }
    }

    pub fn from_box(b: &PVBox) -> Self {
        Self::from_poly(ConvexPoly::from_box(b))
    }

    pub fn from_point(p: PVPoint) -> Self {
        Self::from_poly(ConvexPoly::point(p))
    }

    /// Builds a region from parts that may overlap.
    pub fn from_parts<I: IntoIterator<Item = ConvexPoly>>(parts: I) -> Self {
        parts
            .into_iter()
            .fold(Self::empty(), |acc, p| acc.union(&Self::from_poly(p)))
    }

    pub fn parts(&self) -> &[ConvexPoly] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<ConvexPoly> {
        self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.parts.iter().map(ConvexPoly::area).sum()
    }

    pub fn bbox(&self) -> Option<PVBox> {
        let mut it = self.parts.iter().map(ConvexPoly::bbox);
        let first = it.next()?;
        Some(it.fold(first, |acc, b| PVBox {
            xi: crate::Interval { lo: acc.xi.lo.min(b.xi.lo), hi: acc.xi.hi.max(b.xi.hi) },
            v: crate::Interval { lo: acc.v.lo.min(b.v.lo), hi: acc.v.hi.max(b.v.hi) },
        }))
    }

    /// Largest signed distance over the parts; `-inf` for the empty region.
    pub fn signed_distance(&self, p: PVPoint) -> f64 {
        self.parts
            .iter()
            .map(|q| q.signed_distance(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: PVPoint, tol: f64) -> bool {
        self.parts.iter().any(|q| q.contains(p, tol))
    }

    pub fn closest_point(&self, z: PVPoint, scale: Scale) -> Result<(PVPoint, f64), SetError> {
        let mut best: Option<(PVPoint, f64)> = None;
        for part in &self.parts {
            let (q, d) = part.closest_point(z, scale);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((q, d));
            }
            if d == 0.0 {
                break;
            }
        }
        best.ok_or(SetError::Empty)
    }

    pub fn shift_long(&self, dxi: f64) -> PVRegion {
        let d = PVPoint::new(dxi, 0.0);
        Self { parts: self.parts.iter().map(|p| p.translate(d)).collect() }
    }

    pub fn propagate(&self, dt: f64, a_max: f64) -> PVRegion {
        Self::from_parts(self.parts.iter().map(|p| p.propagate(dt, a_max)))
    }

    pub fn backward_step(&self, dt: f64, a_max: f64) -> PVRegion {
        Self::from_parts(self.parts.iter().map(|p| p.backward_step(dt, a_max)))
    }

    pub fn intersect_box(&self, b: &PVBox) -> PVRegion {
        let mut out = Self {
            parts: self.parts.iter().filter_map(|p| p.intersect_box(b)).collect(),
        };
        out.coalesce();
        out
    }

    pub fn intersect(&self, other: &PVRegion) -> PVRegion {
        let mut parts = Vec::new();
        let boxes: Vec<PVBox> = other.parts.iter().map(|q| q.bbox()).collect();
        for p in &self.parts {
            let pb = p.bbox();
            for (q, qb) in other.parts.iter().zip(&boxes) {
                if separated(&pb, qb) {
                    continue;
                }
                if let Some(x) = p.intersect(q) {
                    parts.push(x);
                }
            }
        }
        // Pairwise intersections of two disjoint families are disjoint except
        // for degenerate pieces on shared boundaries.
        let mut out = Self { parts };
        out.coalesce();
        out
    }

    /// One region per cell with a non-empty intersection, in cell order.
    pub fn intersect_cells(&self, cells: &[PVBox]) -> Vec<PVRegion> {
        cells
            .iter()
            .map(|c| self.intersect_box(c))
            .filter(|r| !r.is_empty())
            .collect()
    }

    /// Intersection with the union of `cells` as a single region.
    pub fn intersect_union(&self, cells: &[PVBox]) -> PVRegion {
        let mut parts = Vec::new();
        for r in self.intersect_cells(cells) {
            parts.extend(r.parts);
        }
        let mut out = Self { parts };
        out.coalesce();
        out
    }

    /// `self ∪ other` with the overlap re-partitioned.
    pub fn union(&self, other: &PVRegion) -> PVRegion {
        let mut parts = self.parts.clone();
        for q in &other.parts {
            let mut pieces = alloc::vec![q.clone()];
            for p in &self.parts {
                if pieces.is_empty() {
                    break;
                }
                pieces = pieces.iter().flat_map(|x| x.difference(p)).collect();
            }
            parts.extend(pieces);
        }
        let mut out = Self { parts };
        out.coalesce();
        out
    }

    /// `self \ other` (closure of).
    pub fn difference(&self, other: &PVRegion) -> PVRegion {
        let mut parts = Vec::new();
        for p in &self.parts {
            let mut pieces = alloc::vec![p.clone()];
            for q in &other.parts {
                if pieces.is_empty() {
                    break;
                }
                pieces = pieces.iter().flat_map(|x| x.difference(q)).collect();
            }
            parts.extend(pieces);
        }
        let mut out = Self { parts };
        out.coalesce();
        out
    }

    /// True if every point of `self` lies within about `tol` of `other`.
    pub fn covered_by(&self, other: &PVRegion, tol: f64) -> bool {
        if self.is_empty() {
            return true;
        }
        self.covered_by_parts(&other.parts, tol)
    }

    /// Like [`covered_by`](Self::covered_by) for a list of polygons that may overlap.
    pub fn covered_by_parts(&self, others: &[ConvexPoly], tol: f64) -> bool {
        if self.is_empty() {
            return true;
        }
        if others.is_empty() {
            return false;
        }
        let grown: Vec<ConvexPoly> = others.iter().map(|q| grow(q, tol)).collect();
        for p in &self.parts {
            let mut pieces = alloc::vec![p.clone()];
            for q in &grown {
                if pieces.is_empty() {
                    break;
                }
                pieces = pieces.iter().flat_map(|x| x.difference(q)).collect();
            }
            if !pieces.is_empty() {
                return false;
            }
        }
        true
    }

    /// Merges parts whose union is convex and drops degenerate parts
    /// already covered by another part.
    fn coalesce(&mut self) {
        let parts = &mut self.parts;
        let mut i = 0;
        while i < parts.len() {
            let mut absorbed = false;
            for j in 0..parts.len() {
                if i == j {
                    continue;
                }
                if let Some(m) = try_merge(&parts[i], &parts[j]) {
                    parts[j] = m;
                    parts.swap_remove(i);
                    absorbed = true;
                    break;
                }
            }
            if absorbed {
                i = 0;
            } else {
                i += 1;
            }
        }
    }
}

/// Merge rule for two parts of a region; `None` if they must stay apart.
fn try_merge(a: &ConvexPoly, b: &ConvexPoly) -> Option<ConvexPoly> {
    let (ba, bb) = (a.bbox(), b.bbox());
    let pad = DEDUP_EPS;
    if ba.xi.lo > bb.xi.hi + pad
        || bb.xi.lo > ba.xi.hi + pad
        || ba.v.lo > bb.v.hi + pad
        || bb.v.lo > ba.v.hi + pad
    {
        return None;
    }
    if a.is_degenerate() {
        if a.vertices().iter().all(|p| b.signed_distance(*p) >= -DEDUP_EPS) {
            return Some(b.clone());
        }
        if b.is_degenerate() {
            // Two collinear overlapping segments (or a point on a segment).
            let h = ConvexPoly::hull(a.vertices().iter().chain(b.vertices()).copied())?;
            if h.is_degenerate() {
                let len = h.diameter();
                if len <= a.diameter() + b.diameter() + DEDUP_EPS {
                    return Some(h);
                }
            }
        }
        return None;
    }
    if b.is_degenerate() {
        return None;
    }
    let sum = a.area() + b.area();
    let h = ConvexPoly::hull(a.vertices().iter().chain(b.vertices()).copied())?;
    (h.area() <= sum * (1.0 + 1e-9) + 1e-12).then_some(h)
}

fn grow(p: &ConvexPoly, tol: f64) -> ConvexPoly {
    let offs = [
        PVPoint::new(tol, tol),
        PVPoint::new(-tol, tol),
        PVPoint::new(tol, -tol),
        PVPoint::new(-tol, -tol),
    ];
    ConvexPoly::hull(p.vertices().iter().flat_map(|v| offs.map(|o| *v + o))).expect("non-empty")
}

/// Boxes farther apart than any clipping tolerance could bridge.
fn separated(a: &PVBox, b: &PVBox) -> bool {
    const SLACK: f64 = 1e-6;
    a.xi.lo > b.xi.hi + SLACK || b.xi.lo > a.xi.hi + SLACK || a.v.lo > b.v.hi + SLACK || b.v.lo > a.v.hi + SLACK
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Interval;

    fn bx(a: f64, b: f64, c: f64, d: f64) -> PVBox {
        PVBox::new(Interval { lo: a, hi: b }, Interval { lo: c, hi: d })
    }

    #[test]
    fn intersect_cells_keeps_order_and_drops_empty() {
        let r = PVRegion::from_box(&bx(0.0, 10.0, 0.0, 5.0));
        let out = r.intersect_cells(&[
            bx(2.0, 4.0, 0.0, 20.0),
            bx(20.0, 30.0, 0.0, 20.0),
            bx(6.0, 8.0, 0.0, 20.0),
        ]);
        assert_eq!(out.len(), 2);
        assert!((out[0].area() - 10.0).abs() < 1e-9);
        assert_eq!(out[1].bbox().unwrap(), bx(6.0, 8.0, 0.0, 5.0));
    }

    #[test]
    fn union_with_self_and_empty() {
        let a = PVRegion::from_box(&bx(0.0, 2.0, 0.0, 1.0));
        assert_eq!(a.union(&PVRegion::empty()), a);
        assert!((a.union(&a).area() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn union_of_overlapping_boxes() {
        let a = PVRegion::from_box(&bx(0.0, 2.0, 0.0, 2.0));
        let b = PVRegion::from_box(&bx(1.0, 3.0, 1.0, 3.0));
        assert!((a.union(&b).area() - 7.0).abs() < 1e-9);
    }

    #[test]
    fn adjacent_boxes_coalesce() {
        let a = PVRegion::from_box(&bx(0.0, 1.0, 0.0, 1.0));
        let b = PVRegion::from_box(&bx(1.0, 2.0, 0.0, 1.0));
        assert_eq!(a.union(&b).parts().len(), 1);
    }

    #[test]
    fn shift_long_composes() {
        let r = PVRegion::from_box(&bx(90.0, 100.0, 0.0, 5.0));
        assert_eq!(r.shift_long(-100.0).bbox().unwrap(), bx(-10.0, 0.0, 0.0, 5.0));
        let twice = r.shift_long(-30.0).shift_long(-70.0).bbox().unwrap();
        assert!((twice.xi.lo + 10.0).abs() < 1e-12);
    }

    #[test]
    fn closest_point_on_empty_errors() {
        assert_eq!(
            PVRegion::empty().closest_point(PVPoint::new(0.0, 0.0), Scale::default()),
            Err(SetError::Empty)
        );
    }

    #[test]
    fn covered_by_detects_gap() {
        let big = PVRegion::from_box(&bx(0.0, 3.0, 0.0, 3.0));
        let small = PVRegion::from_box(&bx(1.0, 2.0, 1.0, 2.0));
        assert!(small.covered_by(&big, 1e-9));
        assert!(!big.covered_by(&small, 1e-9));
        let seg = PVRegion::from_poly(ConvexPoly::segment(PVPoint::new(0.5, 0.5), PVPoint::new(2.5, 2.5)));
        assert!(seg.covered_by(&big, 1e-9));
        assert!(!seg.covered_by(&small, 1e-9));
    }

    #[test]
    fn backward_of_forward_contains_point() {
        let z = PVPoint::new(3.0, 7.0);
        let r = PVRegion::from_point(z).propagate(0.1, 6.0).backward_step(0.1, 6.0);
        assert!(r.contains(z, 1e-9));
    }
}
