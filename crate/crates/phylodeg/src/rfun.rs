//! The contraction sum `r(F)`.
//!
//! `r(F)` adds up `V(Q(F//E'))` over all subsets `E'` of the inner edges,
//! where `//` contracts an inner edge but keeps it as a fresh pendant leaf.
//! It multiplies over components, equals `1/n!` on stars, and
//! `1/((m+n+1) m! n!) + 1/(m+n+1)!` on double stars. The inclusion–exclusion
//! volume formula consumes it.
//!
//! [`r_value`] evaluates the definition with memoized `Q` volumes;
//! [`r_value_via_splitting`] is an independent route built on the relation
//! `r(F) = -r([F\e1,w,1]) + r([F\e0,w,1]) + 2 r(F//e0)`
//! for an inner edge `e0 = vw` and pendant `e1` at `v` with `deg(v) >= 3`.

use std::collections::BTreeSet;

use crate::arith::{factorial, Rational};
use crate::cache::{CacheKind, VolumeCache};
use crate::canonical::canonical_key;
use crate::forest::{choose_split_pivot, EdgeId, Forest};
use crate::qvol::{q_volume, q_volume_via_edge_cover};
use crate::VolumeError;

/// `r(F)` by definition: the sum over all contraction subsets, component by
/// component; 1 for the empty forest.
pub fn r_value(forest: &Forest, cache: &VolumeCache) -> Rational {
    forest
        .component_vertex_sets()
        .iter()
        .map(|c| r_tree(&forest.restricted_to(c), cache))
        .fold(Rational::one(), |acc, v| &acc * &v)
}

fn r_tree(tree: &Forest, cache: &VolumeCache) -> Rational {
    let key = canonical_key(tree);
    if let Some(hit) = cache.lookup(CacheKind::RDefinition, &key) {
        return hit;
    }
    let inner_edges = tree.inner_edges();
    assert!(inner_edges.len() < usize::BITS as usize);
    let mut sum = Rational::zero();
    for mask in 0u64..(1u64 << inner_edges.len()) {
        let subset: BTreeSet<EdgeId> = inner_edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let contracted = tree
            .contract_set(&subset)
            .expect("inner edges stay contractible");
        sum = &sum + &q_volume(&contracted, cache);
    }
    cache.store(CacheKind::RDefinition, key, sum.clone());
    sum
}

fn double_star_r(m: usize, n: usize) -> Rational {
    let head = Rational::new(1, factorial(m) * factorial(n) * (m + n + 1)).unwrap();
    let tail = Rational::from_integer(factorial(m + n + 1))
        .recip()
        .unwrap();
    &head + &tail
}

/// Independent route for `r(F)` through the three-term splitting relation.
///
/// Base cases: stars (`1/n!`), double stars (closed form), and bare-ended
/// trees — two or more inner edges but every inner-tree leaf carrying a
/// single pendant, where no pivot satisfies the `deg(v) >= 3` hypothesis —
/// which take the definition sum evaluated with the edge-cover `Q` route so
/// this path stays independent of [`r_value`]'s. Double stars must be a base
/// case: on them the relation only links `r(S_{m,n})` with `r(S_{m-1,n+1})`,
/// which cycles instead of descending.
pub fn r_value_via_splitting(
    forest: &Forest,
    cache: &VolumeCache,
) -> Result<Rational, VolumeError> {
    let mut product = Rational::one();
    for component in forest.component_vertex_sets() {
        let v = r_split_tree(&forest.restricted_to(&component), cache)?;
        product = &product * &v;
    }
    Ok(product)
}

fn r_split_tree(tree: &Forest, cache: &VolumeCache) -> Result<Rational, VolumeError> {
    let key = canonical_key(tree);
    if let Some(hit) = cache.lookup(CacheKind::RSplitting, &key) {
        return Ok(hit);
    }
    let inner_edges = tree.inner_edges();
    let value = match inner_edges.len() {
        0 => Rational::from_integer(factorial(tree.edge_count()))
            .recip()
            .unwrap(),
        1 => {
            let (u, v) = tree.endpoints(inner_edges[0]).unwrap();
            double_star_r(tree.degree(u) - 1, tree.degree(v) - 1)
        }
        _ => match choose_split_pivot(tree, 2) {
            Some(pivot) => {
                let moved = tree
                    .delete_edge(pivot.pendant)
                    .and_then(|f| f.add_leaves(pivot.w, 1))?;
                let cut = tree
                    .delete_edge(pivot.inner_edge)
                    .and_then(|f| f.add_leaves(pivot.w, 1))?;
                let contracted = tree.contract_keep_leaf(pivot.inner_edge)?;
                let two = Rational::from_integer(2);
                let tail = &two * &r_value_via_splitting(&contracted, cache)?;
                let head =
                    &r_value_via_splitting(&cut, cache)? - &r_value_via_splitting(&moved, cache)?;
                &head + &tail
            }
            None => bare_ended_r(tree, cache)?,
        },
    };
    cache.store(CacheKind::RSplitting, key, value.clone());
    Ok(value)
}

/// Definition sum with the edge-cover `Q` route, for trees where the
/// splitting relation has no admissible pivot.
fn bare_ended_r(tree: &Forest, cache: &VolumeCache) -> Result<Rational, VolumeError> {
    let inner_edges = tree.inner_edges();
    let mut sum = Rational::zero();
    for mask in 0u64..(1u64 << inner_edges.len()) {
        let subset: BTreeSet<EdgeId> = inner_edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let contracted = tree.contract_set(&subset)?;
        let term = q_volume_via_edge_cover(&contracted, cache)
            .map_err(|_| VolumeError::SplittingInapplicable)?;
        sum = &sum + &term;
    }
    Ok(sum)
}
