use super::{Lanelet, LaneletId, ModelError, Point2};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Lanelets plus an id index. Adjacency is validated on construction.
#[derive(Clone, Debug)]
pub struct RoadNetwork {
    lanelets: Vec<Lanelet>,
    index: BTreeMap<LaneletId, usize>,
}

impl RoadNetwork {
    pub fn new(lanelets: Vec<Lanelet>) -> Result<Self, ModelError> {
        let mut index = BTreeMap::new();
        for (i, l) in lanelets.iter().enumerate() {
            if index.insert(l.id, i).is_some() {
                return Err(ModelError::DuplicateLanelet(l.id));
            }
        }
        let net = Self { lanelets, index };
        for l in &net.lanelets {
            for (relation, target) in [("left", l.left), ("right", l.right)] {
                let Some(t) = target else { continue };
                let other = net.get(t).ok_or(ModelError::UnknownReference { from: l.id, relation, to: t })?;
                let back = if relation == "left" { other.right } else { other.left };
                if back != Some(l.id) {
                    return Err(ModelError::InconsistentAdjacency { a: l.id, b: t, relation, found: back });
                }
            }
            for s in &l.successors {
                if *s == l.id {
                    return Err(ModelError::SelfSuccessor(l.id));
                }
                if net.get(*s).is_none() {
                    return Err(ModelError::UnknownReference { from: l.id, relation: "successor", to: *s });
                }
            }
        }
        Ok(net)
    }

    pub fn get(&self, id: LaneletId) -> Option<&Lanelet> {
        self.index.get(&id).map(|&i| &self.lanelets[i])
    }

    /// Like [`get`](Self::get) but reports an error for unknown ids.
    pub fn lanelet(&self, id: LaneletId) -> Result<&Lanelet, ModelError> {
        self.get(id).ok_or(ModelError::UnknownLanelet(id))
    }

    pub fn lanelets(&self) -> &[Lanelet] {
        &self.lanelets
    }

    pub fn predecessors(&self, id: LaneletId) -> impl Iterator<Item = &Lanelet> + '_ {
        self.lanelets.iter().filter(move |l| l.successors.contains(&id))
    }

    /// Lanelets whose projection tolerance admits `p`, nearest first.
    /// Ties are broken by id.
    pub fn locate(&self, p: Point2) -> Vec<(LaneletId, f64, f64)> {
        let mut hits: Vec<(LaneletId, f64, f64, f64)> = self
            .lanelets
            .iter()
            .filter_map(|l| {
                let pr = l.project(p);
                (pr.distance <= 0.5 * l.width + 1.0).then_some((l.id, pr.xi, pr.eta, pr.distance))
            })
            .collect();
        hits.sort_by(|a, b| a.3.total_cmp(&b.3).then(a.0.cmp(&b.0)));
        hits.into_iter().map(|(id, xi, eta, _)| (id, xi, eta)).collect()
    }
}
