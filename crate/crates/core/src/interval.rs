use alloc::vec::Vec;
use core::fmt;

/// Closed interval `[lo, hi]` on the real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Returns `None` unless `lo <= hi` and both bounds are finite.
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        (lo.is_finite() && hi.is_finite() && lo <= hi).then_some(Self { lo, hi })
    }

    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn bloat(&self, by: f64) -> Interval {
        Interval { lo: self.lo - by, hi: self.hi + by }
    }

    pub fn shift(&self, by: f64) -> Interval {
        Interval { lo: self.lo + by, hi: self.hi + by }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Sorts intervals and merges the ones that overlap or touch.
pub fn merge_intervals(mut items: Vec<Interval>) -> Vec<Interval> {
    items.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<Interval> = Vec::with_capacity(items.len());
    for it in items {
        match out.last_mut() {
            Some(last) if it.lo <= last.hi => last.hi = last.hi.max(it.hi),
            _ => out.push(it),
        }
    }
    out
}

/// `domain` minus the union of `blocked`, as sorted closed intervals.
///
/// Pieces shorter than `min_len` are dropped.
pub fn complement_within(domain: Interval, blocked: &[Interval], min_len: f64) -> Vec<Interval> {
    let merged = merge_intervals(blocked.to_vec());
    let mut out = Vec::new();
    let mut cursor = domain.lo;
    for b in merged {
        if b.hi < domain.lo || b.lo > domain.hi {
            continue;
        }
        if b.lo > cursor && b.lo - cursor > min_len {
            out.push(Interval { lo: cursor, hi: b.lo.min(domain.hi) });
        }
        cursor = cursor.max(b.hi);
        if cursor >= domain.hi {
            break;
        }
    }
    if domain.hi - cursor > min_len {
        out.push(Interval { lo: cursor, hi: domain.hi });
    }
    out
}
