//! Independent geometry used by the oracles. Nothing here calls into the
//! set-operation code under test.

#![allow(dead_code)]

use corridor_core::search::Corridor;
use corridor_core::PVPoint;

pub fn cross(o: PVPoint, a: PVPoint, b: PVPoint) -> f64 {
    (a.xi - o.xi) * (b.v - o.v) - (a.v - o.v) * (b.xi - o.xi)
}

fn dist(a: PVPoint, b: PVPoint) -> f64 {
    ((a.xi - b.xi).powi(2) + (a.v - b.v).powi(2)).sqrt()
}

fn seg_dist(a: PVPoint, b: PVPoint, p: PVPoint) -> f64 {
    let (dx, dv) = (b.xi - a.xi, b.v - a.v);
    let len2 = dx * dx + dv * dv;
    if len2 == 0.0 {
        return dist(a, p);
    }
    let t = (((p.xi - a.xi) * dx + (p.v - a.v) * dv) / len2).clamp(0.0, 1.0);
    dist(PVPoint::new(a.xi + t * dx, a.v + t * dv), p)
}

/// Signed distance to a convex counter-clockwise polygon: minus the depth
/// inside, the Euclidean distance outside. Points and segments have no
/// inside.
pub fn signed_dist(verts: &[PVPoint], p: PVPoint) -> f64 {
    let n = verts.len();
    match n {
        0 => f64::INFINITY,
        1 => dist(verts[0], p),
        2 => seg_dist(verts[0], verts[1], p),
        _ => {
            let mut depth = f64::INFINITY;
            let mut inside = true;
            for i in 0..n {
                let (a, b) = (verts[i], verts[(i + 1) % n]);
                let h = cross(a, b, p) / dist(a, b);
                if h < 0.0 {
                    inside = false;
                    break;
                }
                depth = depth.min(h);
            }
            if inside {
                -depth
            } else {
                (0..n).map(|i| seg_dist(verts[i], verts[(i + 1) % n], p)).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Signed distance to a union of convex polygons.
pub fn union_dist(polys: &[Vec<PVPoint>], p: PVPoint) -> f64 {
    polys.iter().map(|q| signed_dist(q, p)).fold(f64::INFINITY, f64::min)
}

/// Area of a counter-clockwise polygon.
pub fn area(verts: &[PVPoint]) -> f64 {
    let n = verts.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n).map(|i| {
        let (a, b) = (verts[i], verts[(i + 1) % n]);
        a.xi * b.v - b.xi * a.v
    })
    .sum::<f64>()
}

/// One double-integrator step, written out.
pub fn step(z: PVPoint, a: f64, dt: f64) -> PVPoint {
    PVPoint::new(z.xi + z.v * dt + 0.5 * a * dt * dt, z.v + a * dt)
}

/// `count` accelerations evenly spaced over `[-a_max, a_max]`.
pub fn accel_grid(a_max: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| -a_max + 2.0 * a_max * i as f64 / (count - 1) as f64).collect()
}

/// Areas of every node of a corridor at `step`, in the coordinates of the
/// first lanelet. Only meaningful for corridors without lane changes.
pub fn root_polys(c: &Corridor, step: usize) -> Vec<Vec<PVPoint>> {
    let mut out = Vec::new();
    for n in &c.nodes {
        if let Some(a) = n.timeline.area_at(step) {
            for p in a.parts() {
                out.push(p.vertices().iter().map(|v| PVPoint::new(v.xi + n.offset, v.v)).collect());
            }
        }
    }
    out
}

/// A union of convex polygons with bounding boxes for quick rejection.
#[derive(Clone, Debug, Default)]
pub struct Polys {
    parts: Vec<Vec<PVPoint>>,
    boxes: Vec<[f64; 4]>,
}

impl Polys {
    pub fn new(parts: Vec<Vec<PVPoint>>) -> Self {
        let boxes = parts.iter().map(bbox).collect();
        Self { parts, boxes }
    }

    pub fn parts(&self) -> &[Vec<PVPoint>] {
        &self.parts
    }

    /// Signed distance to the union.
    pub fn dist(&self, p: PVPoint) -> f64 {
        union_dist(&self.parts, p)
    }

    pub fn contains(&self, p: PVPoint, tol: f64) -> bool {
        self.parts.iter().zip(&self.boxes).any(|(q, b)| {
            p.xi >= b[0] - tol && p.xi <= b[1] + tol && p.v >= b[2] - tol && p.v <= b[3] + tol && signed_dist(q, p) <= tol
        })
    }

    /// Grid points with spacing `h` inside the bounding box of the union.
    pub fn grid(&self, h: f64) -> Vec<PVPoint> {
        let b = bbox(self.parts.iter().flatten());
        if !(b[0] <= b[1]) {
            return vec![];
        }
        let (i0, i1) = ((b[0] / h).ceil() as i64, (b[1] / h).floor() as i64);
        let (j0, j1) = ((b[2] / h).ceil() as i64, (b[3] / h).floor() as i64);
        let mut out = Vec::new();
        for i in i0..=i1 {
            for j in j0..=j1 {
                out.push(PVPoint::new(i as f64 * h, j as f64 * h));
            }
        }
        out
    }
}

fn bbox<'a>(pts: impl IntoIterator<Item = &'a PVPoint>) -> [f64; 4] {
    pts.into_iter().fold([f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY], |b, q| {
        [b[0].min(q.xi), b[1].max(q.xi), b[2].min(q.v), b[3].max(q.v)]
    })
}
