//! Finite quivers, their rooted sequences and stage subquivers.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub type Vertex = u32;
pub type ArrowId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub id: ArrowId,
    pub source: Vertex,
    pub target: Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Quiver {
    vertices: Vec<Vertex>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    /// Vertices are kept sorted, arrows sorted by id; parallel arrows and
    /// loops are allowed.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>, arrows: impl IntoIterator<Item = (ArrowId, Vertex, Vertex)>) -> Result<Self> {
        let mut vs: Vec<Vertex> = vertices.into_iter().collect();
        vs.sort_unstable();
        if vs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Malformed("repeated vertex".into()));
        }
        let mut arrows: Vec<Arrow> =
            arrows.into_iter().map(|(id, source, target)| Arrow { id, source, target }).collect();
        arrows.sort_unstable();
        if let Some(w) = arrows.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::Malformed(format!("repeated arrow id {}", w[0].id)));
        }
        for a in &arrows {
            for end in [a.source, a.target] {
                if vs.binary_search(&end).is_err() {
                    return Err(Error::Malformed(format!("arrow {} has endpoint {end}, which is not a vertex", a.id)));
                }
            }
        }
        Ok(Quiver { vertices: vs, arrows })
    }

    /// `1 → 2 → … → n`, arrow `k` from `k` to `k + 1`.
    pub fn chain(n: u32) -> Self {
        Quiver::new(1..=n, (1..n).map(|k| (k, k, k + 1))).expect("chain is well formed")
    }

    pub fn single_vertex() -> Self {
        Quiver::new([1], []).expect("well formed")
    }

    /// `1 → 3 ← 2`.
    pub fn fork() -> Self {
        Quiver::new([1, 2, 3], [(1, 1, 3), (2, 2, 3)]).expect("well formed")
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, id: ArrowId) -> Option<&Arrow> {
        self.arrows.iter().find(|a| a.id == id)
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Arrows into `i` in id order.
    pub fn incoming(&self, i: Vertex) -> impl Iterator<Item = &Arrow> + '_ {
        self.arrows.iter().filter(move |a| a.target == i)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The subquiver spanned by a set of vertices.
    pub fn spanned(&self, vs: &BTreeSet<Vertex>) -> Quiver {
        Quiver {
            vertices: self.vertices.iter().copied().filter(|v| vs.contains(v)).collect(),
            arrows: self.arrows.iter().copied().filter(|a| vs.contains(&a.source) && vs.contains(&a.target)).collect(),
        }
    }
}

/// The chain `∅ = V_0 ⊆ V_1 ⊆ … ⊆ V_ζ`, stopping at the first repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedSequence {
    pub stages: Vec<BTreeSet<Vertex>>,
}

impl RootedSequence {
    pub fn zeta(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage(&self, mu: usize) -> Option<&BTreeSet<Vertex>> {
        self.stages.get(mu)
    }

    pub fn last(&self) -> &BTreeSet<Vertex> {
        self.stages.last().expect("V_0 is always present")
    }

    /// `V_{μ+1} ∖ V_μ`.
    pub fn new_vertices(&self, mu: usize) -> Vec<Vertex> {
        match (self.stages.get(mu), self.stages.get(mu + 1)) {
            (Some(a), Some(b)) => b.difference(a).copied().collect(),
            _ => Vec::new(),
        }
    }
}

pub fn rooted_sequence(q: &Quiver) -> RootedSequence {
    let mut stages = vec![BTreeSet::new()];
    loop {
        let prev = stages.last().expect("nonempty");
        let next: BTreeSet<Vertex> =
            q.vertices().iter().copied().filter(|&i| q.incoming(i).all(|a| prev.contains(&a.source))).collect();
        if next == *prev {
            return RootedSequence { stages };
        }
        stages.push(next);
    }
}

pub fn is_left_rooted(q: &Quiver) -> bool {
    rooted_sequence(q).last().len() == q.vertices().len()
}

/// Kahn's algorithm; true iff the quiver has no oriented cycle (loops
/// included).
pub fn is_acyclic(q: &Quiver) -> bool {
    let index = |v: Vertex| q.vertices().binary_search(&v).expect("endpoint is a vertex");
    let mut indegree = vec![0usize; q.vertices().len()];
    for a in q.arrows() {
        indegree[index(a.target)] += 1;
    }
    let mut ready: Vec<usize> = (0..indegree.len()).filter(|&i| indegree[i] == 0).collect();
    let mut removed = 0;
    while let Some(i) = ready.pop() {
        removed += 1;
        for a in q.arrows().iter().filter(|a| index(a.source) == i) {
            let t = index(a.target);
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.push(t);
            }
        }
    }
    removed == q.vertices().len()
}

/// `Q_μ`, spanned by `V_μ`.
pub fn subquiver(q: &Quiver, mu: usize) -> Result<Quiver> {
    let seq = rooted_sequence(q);
    let stage = seq.stage(mu).ok_or(Error::StageOutOfRange { stage: mu, zeta: seq.zeta() })?;
    Ok(q.spanned(stage))
}
