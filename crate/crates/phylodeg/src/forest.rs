//! The forest data model and the graph surgeries the volume recursions use.
//!
//! A [`Forest`] is an undirected acyclic simple graph with no isolated
//! vertices. A vertex of degree 1 is a *leaf*; every other vertex is *inner*.
//! An *inner edge* joins two inner vertices, a *pendant* edge has a leaf
//! endpoint. Forests are immutable values: every surgery returns a new one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("{0} is not an inner edge")]
    NotInnerEdge(EdgeId),
    #[error("{0} is not an inner vertex")]
    NotInnerVertex(VertexId),
    #[error("self-loops are not allowed")]
    SelfLoop,
    #[error("parallel edges are not allowed")]
    ParallelEdge,
    #[error("edge would close a cycle")]
    WouldFormCycle,
}

/// Undirected acyclic graph; see the module docs for the conventions.
#[derive(Clone, Debug, Default)]
pub struct Forest {
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
    adjacency: BTreeMap<VertexId, BTreeMap<EdgeId, VertexId>>,
    next_vertex: u32,
    next_edge: u32,
}

impl Forest {
    pub fn empty() -> Self {
        Forest::default()
    }

    /// The star with `n` edges: one hub carrying `n` pendant leaves. For
    /// `n = 1` this is a single edge with two leaves and no inner vertex.
    pub fn star(n: usize) -> Self {
        assert!(n >= 1, "a star needs at least one edge");
        let mut f = Forest::empty();
        let hub = f.push_vertex();
        for _ in 0..n {
            let leaf = f.push_vertex();
            f.push_edge(hub, leaf);
        }
        f
    }

    /// The path-tree S(a_1, ..., a_k): k spine vertices in a path, the i-th
    /// carrying `a_i` pendant leaves.
    pub fn path_tree(leaf_counts: &[usize]) -> Self {
        assert!(
            !leaf_counts.is_empty(),
            "a path-tree needs at least one spine vertex"
        );
        assert!(
            leaf_counts.iter().all(|&a| a >= 1),
            "every spine vertex needs at least one leaf"
        );
        let mut f = Forest::empty();
        let mut prev: Option<VertexId> = None;
        for &count in leaf_counts {
            let spine = f.push_vertex();
            if let Some(p) = prev {
                f.push_edge(p, spine);
            }
            for _ in 0..count {
                let leaf = f.push_vertex();
                f.push_edge(spine, leaf);
            }
            prev = Some(spine);
        }
        f
    }

    /// Builds a forest from `(u, v)` pairs of arbitrary vertex labels,
    /// rejecting self-loops, parallel edges and cycles.
    pub fn from_edge_list(pairs: &[(usize, usize)]) -> Result<Self, ForestError> {
        let mut f = Forest::empty();
        let mut ids: BTreeMap<usize, VertexId> = BTreeMap::new();
        for &(a, b) in pairs {
            let u = *ids.entry(a).or_insert_with(|| f.push_vertex());
            let v = *ids.entry(b).or_insert_with(|| f.push_vertex());
            f.try_push_edge(u, v)?;
        }
        Ok(f)
    }

    pub(crate) fn push_vertex(&mut self) -> VertexId {
        let id = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.adjacency.insert(id, BTreeMap::new());
        id
    }

    pub(crate) fn push_edge(&mut self, u: VertexId, v: VertexId) -> EdgeId {
        self.try_push_edge(u, v).expect("valid edge")
    }

    pub(crate) fn try_push_edge(
        &mut self,
        u: VertexId,
        v: VertexId,
    ) -> Result<EdgeId, ForestError> {
        if u == v {
            return Err(ForestError::SelfLoop);
        }
        if !self.adjacency.contains_key(&u) {
            return Err(ForestError::UnknownVertex(u));
        }
        if !self.adjacency.contains_key(&v) {
            return Err(ForestError::UnknownVertex(v));
        }
        if self.adjacency[&u].values().any(|&n| n == v) {
            return Err(ForestError::ParallelEdge);
        }
        if self.connected(u, v) {
            return Err(ForestError::WouldFormCycle);
        }
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.edges.insert(id, (u, v));
        self.adjacency.get_mut(&u).unwrap().insert(id, v);
        self.adjacency.get_mut(&v).unwrap().insert(id, u);
        Ok(id)
    }

    fn connected(&self, from: VertexId, to: VertexId) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if seen.insert(v) {
                stack.extend(self.adjacency[&v].values().copied());
            }
        }
        false
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn endpoints(&self, e: EdgeId) -> Result<(VertexId, VertexId), ForestError> {
        self.edges
            .get(&e)
            .copied()
            .ok_or(ForestError::UnknownEdge(e))
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.adjacency.contains_key(&v)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency.get(&v).map_or(0, BTreeMap::len)
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.degree(v) == 1
    }

    pub fn is_inner(&self, v: VertexId) -> bool {
        self.degree(v) >= 2
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.is_leaf(v)).collect()
    }

    pub fn inner_vertices(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.is_inner(v)).collect()
    }

    pub fn inner_vertex_count(&self) -> usize {
        self.vertices().filter(|&v| self.is_inner(v)).count()
    }

    /// Edges incident to `v`, with the opposite endpoint.
    pub fn incident_edges(&self, v: VertexId) -> impl Iterator<Item = (EdgeId, VertexId)> + '_ {
        self.adjacency
            .get(&v)
            .into_iter()
            .flatten()
            .map(|(&e, &n)| (e, n))
    }

    pub fn is_inner_edge(&self, e: EdgeId) -> bool {
        self.edges
            .get(&e)
            .is_some_and(|&(u, v)| self.is_inner(u) && self.is_inner(v))
    }

    pub fn inner_edges(&self) -> Vec<EdgeId> {
        self.edge_ids().filter(|&e| self.is_inner_edge(e)).collect()
    }

    /// Edges at `v` whose other endpoint is a leaf.
    pub fn pendant_edges_at(&self, v: VertexId) -> Vec<EdgeId> {
        self.incident_edges(v)
            .filter(|&(_, n)| self.is_leaf(n))
            .map(|(e, _)| e)
            .collect()
    }

    /// Edges at `v` whose other endpoint is inner.
    pub fn inner_edges_at(&self, v: VertexId) -> Vec<EdgeId> {
        self.incident_edges(v)
            .filter(|&(_, n)| self.is_inner(n))
            .map(|(e, _)| e)
            .collect()
    }

    pub fn has_degree_two_vertex(&self) -> bool {
        self.vertices().any(|v| self.degree(v) == 2)
    }

    /// A star is a tree with at most one inner vertex.
    pub fn is_star(&self) -> bool {
        !self.is_empty()
            && self.component_vertex_sets().len() == 1
            && self.inner_vertex_count() <= 1
    }

    pub fn is_tree(&self) -> bool {
        !self.is_empty() && self.component_vertex_sets().len() == 1
    }

    /// Deletes an edge; endpoints left with degree 0 are removed.
    pub fn delete_edge(&self, e: EdgeId) -> Result<Forest, ForestError> {
        let (u, v) = self.endpoints(e)?;
        let mut out = self.clone();
        out.edges.remove(&e);
        for x in [u, v] {
            let nbrs = out.adjacency.get_mut(&x).unwrap();
            nbrs.remove(&e);
            if nbrs.is_empty() {
                out.adjacency.remove(&x);
            }
        }
        Ok(out)
    }

    /// Contracts the inner edge `e`, merging its endpoints, then hangs one
    /// fresh pendant leaf on the merged vertex; the edge count is preserved.
    pub fn contract_keep_leaf(&self, e: EdgeId) -> Result<Forest, ForestError> {
        let (u, v) = self.endpoints(e)?;
        if !self.is_inner_edge(e) {
            return Err(ForestError::NotInnerEdge(e));
        }
        let (keep, drop) = if u < v { (u, v) } else { (v, u) };
        let mut out = self.clone();
        out.edges.remove(&e);
        out.adjacency.get_mut(&keep).unwrap().remove(&e);
        let moved: Vec<(EdgeId, VertexId)> = out
            .adjacency
            .remove(&drop)
            .unwrap()
            .into_iter()
            .filter(|&(f, _)| f != e)
            .collect();
        for (f, n) in moved {
            let (a, b) = out.edges[&f];
            out.edges.insert(
                f,
                (
                    if a == drop { keep } else { a },
                    if b == drop { keep } else { b },
                ),
            );
            out.adjacency.get_mut(&keep).unwrap().insert(f, n);
            out.adjacency.get_mut(&n).unwrap().insert(f, keep);
        }
        let leaf = out.push_vertex();
        let id = EdgeId(out.next_edge);
        out.next_edge += 1;
        out.edges.insert(id, (keep, leaf));
        out.adjacency.get_mut(&keep).unwrap().insert(id, leaf);
        out.adjacency.get_mut(&leaf).unwrap().insert(id, keep);
        Ok(out)
    }

    /// Contracts a set of inner edges; the result does not depend on the
    /// order. Surviving edges keep their ids, so the set can be taken from
    /// the original forest.
    pub fn contract_set(&self, edges: &BTreeSet<EdgeId>) -> Result<Forest, ForestError> {
        let mut out = self.clone();
        for &e in edges {
            out = out.contract_keep_leaf(e)?;
        }
        Ok(out)
    }

    /// Attaches `k` fresh pendant leaves at `v`.
    pub fn add_leaves(&self, v: VertexId, k: usize) -> Result<Forest, ForestError> {
        if !self.contains_vertex(v) {
            return Err(ForestError::UnknownVertex(v));
        }
        let mut out = self.clone();
        for _ in 0..k {
            let leaf = out.push_vertex();
            let id = EdgeId(out.next_edge);
            out.next_edge += 1;
            out.edges.insert(id, (v, leaf));
            out.adjacency.get_mut(&v).unwrap().insert(id, leaf);
            out.adjacency.get_mut(&leaf).unwrap().insert(id, v);
        }
        Ok(out)
    }

    /// Removes the inner vertex `v` but keeps every incident edge, each now
    /// ending in its own fresh leaf; the edge count is preserved.
    pub fn remove_vertex_keep_edges(&self, v: VertexId) -> Result<Forest, ForestError> {
        if !self.contains_vertex(v) {
            return Err(ForestError::UnknownVertex(v));
        }
        if !self.is_inner(v) {
            return Err(ForestError::NotInnerVertex(v));
        }
        let mut out = self.clone();
        let incident: Vec<(EdgeId, VertexId)> =
            out.adjacency.remove(&v).unwrap().into_iter().collect();
        for (e, n) in incident {
            let leaf = out.push_vertex();
            let (a, b) = out.edges[&e];
            out.edges.insert(
                e,
                (if a == v { leaf } else { a }, if b == v { leaf } else { b }),
            );
            out.adjacency.get_mut(&leaf).unwrap().insert(e, n);
            out.adjacency.get_mut(&n).unwrap().insert(e, leaf);
        }
        Ok(out)
    }

    /// The forest generated by a subset of inner vertices: each keeps its
    /// full edge neighborhood, edges leaving the subset get fresh leaf
    /// endpoints, everything else is dropped. The inner vertices of the
    /// result are exactly `subset`. Kept vertices and edges keep their ids.
    pub fn induced_star_forest(&self, subset: &BTreeSet<VertexId>) -> Result<Forest, ForestError> {
        for &v in subset {
            if !self.contains_vertex(v) {
                return Err(ForestError::UnknownVertex(v));
            }
            if !self.is_inner(v) {
                return Err(ForestError::NotInnerVertex(v));
            }
        }
        let mut out = Forest {
            edges: BTreeMap::new(),
            adjacency: BTreeMap::new(),
            next_vertex: self.next_vertex,
            next_edge: self.next_edge,
        };
        for &v in subset {
            out.adjacency.insert(v, BTreeMap::new());
        }
        for (&e, &(u, v)) in &self.edges {
            let kept = match (subset.contains(&u), subset.contains(&v)) {
                (true, true) => {
                    out.edges.insert(e, (u, v));
                    out.adjacency.get_mut(&u).unwrap().insert(e, v);
                    out.adjacency.get_mut(&v).unwrap().insert(e, u);
                    continue;
                }
                (true, false) => u,
                (false, true) => v,
                (false, false) => continue,
            };
            let leaf = out.push_vertex();
            out.edges.insert(e, (kept, leaf));
            out.adjacency.get_mut(&kept).unwrap().insert(e, leaf);
            out.adjacency.get_mut(&leaf).unwrap().insert(e, kept);
        }
        Ok(out)
    }

    /// Vertex sets of the connected components, in min-vertex order.
    pub(crate) fn component_vertex_sets(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.vertices() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if comp.insert(v) {
                    stack.extend(self.adjacency[&v].values().copied());
                }
            }
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    /// The sub-forest induced on one component's vertex set, keeping ids.
    pub(crate) fn restricted_to(&self, keep: &BTreeSet<VertexId>) -> Forest {
        let mut out = Forest {
            edges: BTreeMap::new(),
            adjacency: BTreeMap::new(),
            next_vertex: self.next_vertex,
            next_edge: self.next_edge,
        };
        for &v in keep {
            out.adjacency.insert(v, self.adjacency[&v].clone());
        }
        for (&e, &(u, v)) in &self.edges {
            if keep.contains(&u) && keep.contains(&v) {
                out.edges.insert(e, (u, v));
            }
        }
        out
    }

    /// Connected components as forests, canonically ordered by key.
    pub fn components(&self) -> Vec<Forest> {
        let mut parts: Vec<Forest> = self
            .component_vertex_sets()
            .iter()
            .map(|set| self.restricted_to(set))
            .collect();
        parts.sort_by_cached_key(crate::canonical::canonical_key);
        parts
    }
}

/// The pivot for the splitting recursions: an inner vertex `v` with exactly
/// one incident inner edge (a leaf of the inner tree), that edge `e0 = vw`,
/// and one pendant edge `e1` at `v`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SplitPivot {
    pub v: VertexId,
    pub w: VertexId,
    pub inner_edge: EdgeId,
    pub pendant: EdgeId,
}

/// Chooses the pivot on a single tree: among inner-tree leaves with at least
/// `min_pendants` pendant edges, take the one minimizing
/// (pendant count, rooted canonical code, vertex id). Minimizing the pendant
/// count first is what makes the recursions terminate: the measure
/// (inner-edge count, pendants at the chosen vertex) then decreases
/// lexicographically at every step.
pub(crate) fn choose_split_pivot(tree: &Forest, min_pendants: usize) -> Option<SplitPivot> {
    let mut best: Option<(usize, String, SplitPivot)> = None;
    for v in tree.inner_vertices() {
        let inner = tree.inner_edges_at(v);
        if inner.len() != 1 {
            continue;
        }
        let pendants = tree.pendant_edges_at(v);
        assert!(
            !pendants.is_empty(),
            "an inner-tree leaf always has a pendant edge"
        );
        if pendants.len() < min_pendants {
            continue;
        }
        let candidate_key = (pendants.len(), crate::canonical::rooted_code(tree, v));
        let better = match &best {
            None => true,
            Some((p, code, _)) => candidate_key < (*p, code.clone()),
        };
        if better {
            let e0 = inner[0];
            let (a, b) = tree.endpoints(e0).unwrap();
            let w = if a == v { b } else { a };
            best = Some((
                candidate_key.0,
                candidate_key.1,
                SplitPivot {
                    v,
                    w,
                    inner_edge: e0,
                    pendant: pendants[0],
                },
            ));
        }
    }
    best.map(|(_, _, p)| p)
}
