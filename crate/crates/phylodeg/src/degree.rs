//! The two top-level volume algorithms for the parity polytope `P(F)`, the
//! lattice normalization, and the phylogenetic degree.
//!
//! Route one, [`p_volume_inclusion_exclusion`]:
//!
//! ```text
//! V(P_F) = sum over subsets I' of inner vertices of
//!          (-1)^|I'| * r(G(I')) * 2^(|E(G(I'))| - |I'|)
//! ```
//!
//! with `G(I')` the induced star forest. Route two,
//! [`p_volume_recursive`], never leaves `P` volumes: any degree-2 vertex
//! forces volume 0, components multiply, a star with `n >= 2` edges gives
//! `1 - 2^(n-1)/n!`, and otherwise the five-term relation
//!
//! ```text
//! V(P_F) = -V(P_{[F\e1,w,1]}) + V(P_{[F\e0,w,1]}) - V(P_{F//e0})
//!          + V(P_{F(-)w}) + V(P_{[F\e1,w,1](-)v})
//! ```
//!
//! applies at a pivot `e0 = vw`, `e1` a pendant at `v`, `deg(v) >= 3`,
//! where `(-)` removes a vertex keeping its edges as leaves.
//!
//! The degree of the toric variety of a tree divides the standard lattice
//! volume `V * |E|!` by `2^|I|`, the index of the sublattice its vertices
//! span; it is undefined when some vertex has degree 2 (volume 0).

use std::collections::BTreeSet;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::arith::{factorial, pow2, Rational};
use crate::cache::{CacheKind, VolumeCache};
use crate::canonical::{canonical_key, serialize_canonical};
use crate::forest::{choose_split_pivot, Forest, VertexId};
use crate::qvol::{q_volume, q_volume_via_edge_cover};
use crate::rfun::{r_value, r_value_via_splitting};
use crate::VolumeError;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Method {
    InclusionExclusion,
    Recursive,
    /// Run both routes and fail loudly on any disagreement.
    Both,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::InclusionExclusion => "ie",
            Method::Recursive => "recursive",
            Method::Both => "both",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ie" => Ok(Method::InclusionExclusion),
            "recursive" => Ok(Method::Recursive),
            "both" => Ok(Method::Both),
            other => Err(format!(
                "unknown method '{other}' (expected ie, recursive or both)"
            )),
        }
    }
}

/// Inclusion–exclusion over subsets of inner vertices. Exact for any forest;
/// the empty subset contributes exactly 1 (the whole cube). Cost grows as
/// `2^|I|`, fine up to roughly twenty inner vertices.
pub fn p_volume_inclusion_exclusion(forest: &Forest, cache: &VolumeCache) -> Rational {
    if forest.is_empty() {
        return Rational::one();
    }
    let key = canonical_key(forest);
    if let Some(hit) = cache.lookup(CacheKind::PInclusionExclusion, &key) {
        return hit;
    }
    let inner = forest.inner_vertices();
    assert!(inner.len() < usize::BITS as usize);
    let mut total = Rational::zero();
    for mask in 0u64..(1u64 << inner.len()) {
        let subset: BTreeSet<VertexId> = inner
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let picked = subset.len();
        let generated = forest
            .induced_star_forest(&subset)
            .expect("subsets of inner vertices are valid");
        let weight = Rational::from_integer(pow2(generated.edge_count() - picked));
        let term = &r_value(&generated, cache) * &weight;
        total = if picked.is_multiple_of(2) {
            &total + &term
        } else {
            &total - &term
        };
    }
    cache.store(CacheKind::PInclusionExclusion, key, total.clone());
    total
}

/// The five-term recursion; equals [`p_volume_inclusion_exclusion`]
/// everywhere. The pivot minimizes the pendant count, so the measure
/// (inner-edge count, pendants at the pivot) drops at every step: the first
/// term moves one pendant off the pivot, the other four lose an inner edge
/// or an inner vertex outright.
pub fn p_volume_recursive(forest: &Forest, cache: &VolumeCache) -> Rational {
    forest
        .component_vertex_sets()
        .iter()
        .map(|c| p_recursive_tree(&forest.restricted_to(c), cache))
        .fold(Rational::one(), |acc, v| &acc * &v)
}

fn p_recursive_tree(tree: &Forest, cache: &VolumeCache) -> Rational {
    let key = canonical_key(tree);
    if let Some(hit) = cache.lookup(CacheKind::PRecursive, &key) {
        return hit;
    }
    let value = if tree.has_degree_two_vertex() {
        // a degree-2 vertex pins two coordinates equal: not full-dimensional
        Rational::zero()
    } else if tree.inner_vertex_count() == 0 {
        // single edge: the whole unit interval
        Rational::one()
    } else if tree.is_star() {
        let n = tree.edge_count();
        &Rational::one() - &Rational::new(pow2(n - 1), factorial(n)).unwrap()
    } else {
        let pivot = choose_split_pivot(tree, 2)
            .expect("without degree-2 vertices every inner-tree leaf has two pendants");
        let moved = tree
            .delete_edge(pivot.pendant)
            .and_then(|f| f.add_leaves(pivot.w, 1))
            .expect("pivot edges exist");
        let cut = tree
            .delete_edge(pivot.inner_edge)
            .and_then(|f| f.add_leaves(pivot.w, 1))
            .expect("pivot edges exist");
        let contracted = tree
            .contract_keep_leaf(pivot.inner_edge)
            .expect("pivot edge is inner");
        let hub_removed = tree.remove_vertex_keep_edges(pivot.w).expect("w is inner");
        let moved_pruned = moved
            .remove_vertex_keep_edges(pivot.v)
            .expect("v stays inner");

        let positive = &(&p_volume_recursive(&cut, cache)
            + &p_volume_recursive(&hub_removed, cache))
            + &p_volume_recursive(&moved_pruned, cache);
        let negative = &p_volume_recursive(&moved, cache) + &p_volume_recursive(&contracted, cache);
        &positive - &negative
    };
    cache.store(CacheKind::PRecursive, key, value.clone());
    value
}

/// Volume of `P` by the requested method; `Both` cross-checks.
pub fn p_volume(
    forest: &Forest,
    method: Method,
    cache: &VolumeCache,
) -> Result<Rational, VolumeError> {
    match method {
        Method::InclusionExclusion => Ok(p_volume_inclusion_exclusion(forest, cache)),
        Method::Recursive => Ok(p_volume_recursive(forest, cache)),
        Method::Both => {
            let ie = p_volume_inclusion_exclusion(forest, cache);
            let rec = p_volume_recursive(forest, cache);
            if ie != rec {
                return Err(VolumeError::MethodDisagreement {
                    inclusion_exclusion: ie,
                    recursive: rec,
                });
            }
            Ok(ie)
        }
    }
}

/// Everything the degree computation knows about one tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    /// Canonical text of the tree.
    pub tree: String,
    pub edges: usize,
    pub inner_vertices: usize,
    /// Euclidean volume of `P`.
    pub volume: Rational,
    /// `volume * |E|!`, an integer in the standard lattice.
    pub lattice_volume_standard: BigInt,
    /// Standard lattice volume divided by `2^|I|`.
    pub lattice_volume_model: BigInt,
    /// The phylogenetic degree; undefined when not full-dimensional.
    pub degree: Option<BigInt>,
    /// False exactly when some vertex has degree 2.
    pub full_dimensional: bool,
    pub method: &'static str,
}

impl DegreeReport {
    pub fn to_json(&self) -> Value {
        let number = |n: &BigInt| {
            serde_json::Number::from_str(&n.to_string())
                .map(Value::Number)
                .expect("integers are valid JSON numbers")
        };
        json!({
            "tree": self.tree,
            "edges": self.edges,
            "inner_vertices": self.inner_vertices,
            "volume": self.volume.to_string(),
            "lattice_volume_standard": number(&self.lattice_volume_standard),
            "lattice_volume_model": number(&self.lattice_volume_model),
            "degree": self.degree.as_ref().map(&number).unwrap_or(Value::Null),
            "full_dimensional": self.full_dimensional,
            "method": self.method,
        })
    }
}

/// Full report for a single tree: volume, both lattice normalizations, and
/// the degree. Integrality and divisibility failures are internal errors —
/// they cannot come from valid input.
pub fn phylogenetic_degree(
    tree: &Forest,
    method: Method,
    cache: &VolumeCache,
) -> Result<DegreeReport, VolumeError> {
    if !tree.is_tree() {
        return Err(VolumeError::NotATree);
    }
    let volume = p_volume(tree, method, cache)?;
    let edges = tree.edge_count();
    let inner = tree.inner_vertex_count();
    let full_dimensional = !tree.has_degree_two_vertex();

    let scaled = &volume * &Rational::from_integer(factorial(edges));
    let standard = scaled.to_integer().ok_or_else(|| {
        VolumeError::Inconsistency(format!("volume {volume} times {edges}! is not an integer"))
    })?;

    if full_dimensional && standard.is_zero() {
        return Err(VolumeError::Inconsistency(
            "zero volume on a tree with no degree-2 vertex".into(),
        ));
    }
    if !full_dimensional && !standard.is_zero() {
        return Err(VolumeError::Inconsistency(
            "nonzero volume on a tree with a degree-2 vertex".into(),
        ));
    }

    let index = pow2(inner);
    let (model, remainder) = standard.div_rem(&index);
    if !remainder.is_zero() {
        return Err(VolumeError::Inconsistency(format!(
            "lattice volume {standard} is not divisible by 2^{inner}"
        )));
    }

    Ok(DegreeReport {
        tree: serialize_canonical(tree),
        edges,
        inner_vertices: inner,
        volume,
        lattice_volume_standard: standard,
        lattice_volume_model: model.clone(),
        degree: full_dimensional.then_some(model),
        full_dimensional,
        method: method.tag(),
    })
}

/// Reports for a batch of trees, preserving input order. With the `parallel`
/// feature the batch fans out across threads; results are identical either
/// way because the caches are idempotent.
pub fn degree_reports(
    trees: &[Forest],
    method: Method,
    cache: &VolumeCache,
) -> Result<Vec<DegreeReport>, VolumeError> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        trees
            .par_iter()
            .map(|t| phylogenetic_degree(t, method, cache))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        degree_reports_seq(trees, method, cache)
    }
}

/// Sequential batch evaluation, kept unconditionally for benchmarks.
pub fn degree_reports_seq(
    trees: &[Forest],
    method: Method,
    cache: &VolumeCache,
) -> Result<Vec<DegreeReport>, VolumeError> {
    trees
        .iter()
        .map(|t| phylogenetic_degree(t, method, cache))
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IdentityStatus {
    Holds,
    Skipped,
    Failed,
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub status: IdentityStatus,
    /// How many configurations were exercised.
    pub configurations: usize,
}

/// Exercises the exact identities the volumes must satisfy on `tree`:
///
/// * `q-pendant-exchange`: for adjacent inner `v1, v2` joined by `e0` with
///   pendants `e1, e2`: `V(Q(F\e1)) + V(Q(F\e2)) = V(Q(F\e0))`;
/// * `contraction-vs-removal`: for inner `v` of degree 3 with pendant `e1`,
///   joined by `e0` to inner `w` of degree 2:
///   `V(P(F//e0)) = V(P(F(-)w)) + V(P([F\e1,w,1](-)v))`;
/// * `leaf-extension`: for every leaf `w`:
///   `V(P(T))/3 + V(P([T,w,2])) = V(P([T,w,3]))`;
/// * `q-method-agreement` and `p-method-agreement` between the dual routes.
///
/// Inapplicable identities report as skipped, never failed.
pub fn verify_identities(tree: &Forest, cache: &VolumeCache) -> Vec<IdentityCheck> {
    let mut out = Vec::new();

    let mut exchange = (IdentityStatus::Skipped, 0usize);
    for e0 in tree.inner_edges() {
        let (v1, v2) = tree.endpoints(e0).unwrap();
        let (p1, p2) = (tree.pendant_edges_at(v1), tree.pendant_edges_at(v2));
        for &e1 in &p1 {
            for &e2 in &p2 {
                let lhs = &q_volume(&tree.delete_edge(e1).unwrap(), cache)
                    + &q_volume(&tree.delete_edge(e2).unwrap(), cache);
                let rhs = q_volume(&tree.delete_edge(e0).unwrap(), cache);
                exchange.1 += 1;
                if lhs != rhs {
                    exchange.0 = IdentityStatus::Failed;
                } else if exchange.0 == IdentityStatus::Skipped {
                    exchange.0 = IdentityStatus::Holds;
                }
            }
        }
    }
    out.push(IdentityCheck {
        name: "q-pendant-exchange",
        status: exchange.0,
        configurations: exchange.1,
    });

    let mut contraction = (IdentityStatus::Skipped, 0usize);
    for e0 in tree.inner_edges() {
        let (a, b) = tree.endpoints(e0).unwrap();
        for (v, w) in [(a, b), (b, a)] {
            if tree.degree(v) != 3 || tree.degree(w) != 2 {
                continue;
            }
            for e1 in tree.pendant_edges_at(v) {
                let lhs = p_volume_recursive(&tree.contract_keep_leaf(e0).unwrap(), cache);
                let pruned = tree.remove_vertex_keep_edges(w).unwrap();
                let moved = tree
                    .delete_edge(e1)
                    .and_then(|f| f.add_leaves(w, 1))
                    .and_then(|f| f.remove_vertex_keep_edges(v))
                    .unwrap();
                let rhs = &p_volume_recursive(&pruned, cache) + &p_volume_recursive(&moved, cache);
                contraction.1 += 1;
                if lhs != rhs {
                    contraction.0 = IdentityStatus::Failed;
                } else if contraction.0 == IdentityStatus::Skipped {
                    contraction.0 = IdentityStatus::Holds;
                }
            }
        }
    }
    out.push(IdentityCheck {
        name: "contraction-vs-removal",
        status: contraction.0,
        configurations: contraction.1,
    });

    let mut extension = (IdentityStatus::Skipped, 0usize);
    for w in tree.leaves() {
        let base = p_volume_inclusion_exclusion(tree, cache);
        let plus_two = p_volume_inclusion_exclusion(&tree.add_leaves(w, 2).unwrap(), cache);
        let plus_three = p_volume_inclusion_exclusion(&tree.add_leaves(w, 3).unwrap(), cache);
        let lhs = &(&base * &Rational::fraction(1, 3)) + &plus_two;
        extension.1 += 1;
        if lhs != plus_three {
            extension.0 = IdentityStatus::Failed;
        } else if extension.0 == IdentityStatus::Skipped {
            extension.0 = IdentityStatus::Holds;
        }
    }
    out.push(IdentityCheck {
        name: "leaf-extension",
        status: extension.0,
        configurations: extension.1,
    });

    let q_agreement = match q_volume_via_edge_cover(tree, cache) {
        Ok(cover) => {
            if cover == q_volume(tree, cache) {
                IdentityStatus::Holds
            } else {
                IdentityStatus::Failed
            }
        }
        Err(_) => IdentityStatus::Skipped,
    };
    out.push(IdentityCheck {
        name: "q-method-agreement",
        status: q_agreement,
        configurations: 1,
    });

    let r_agreement = match r_value_via_splitting(tree, cache) {
        Ok(split) => {
            if split == r_value(tree, cache) {
                IdentityStatus::Holds
            } else {
                IdentityStatus::Failed
            }
        }
        Err(VolumeError::SplittingInapplicable) => IdentityStatus::Skipped,
        Err(_) => IdentityStatus::Failed,
    };
    out.push(IdentityCheck {
        name: "r-method-agreement",
        status: r_agreement,
        configurations: 1,
    });

    let p_agreement =
        if p_volume_inclusion_exclusion(tree, cache) == p_volume_recursive(tree, cache) {
            IdentityStatus::Holds
        } else {
            IdentityStatus::Failed
        };
    out.push(IdentityCheck {
        name: "p-method-agreement",
        status: p_agreement,
        configurations: 1,
    });

    out
}
