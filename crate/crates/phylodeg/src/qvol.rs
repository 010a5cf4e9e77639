//! Exact volume of the cut cube `Q(F)`.
//!
//! `Q(F)` is `[0,1]^E` intersected with `sum of x_e over edges at v <= 1`
//! for every inner vertex `v`. Two independent algorithms:
//!
//! * [`q_volume`] — the primary route: split off components, read stars off
//!   as `1/n!`, otherwise apply the two-term relation
//!   `V(Q_F) = -V(Q_{[F\e1,w,1]}) + V(Q_{[F\e0,w,1]})`
//!   at a pivot vertex with one inner edge `e0 = vw` and a pendant `e1`.
//! * [`q_volume_via_edge_cover`] — the cross-check: for an edge set `S`
//!   meeting every inner vertex exactly once,
//!   `V(Q_F) = (1/|E|) * sum over e in S of V(Q_{F\e})`.

use std::collections::BTreeSet;

use crate::arith::{factorial, Rational};
use crate::cache::{CacheKind, VolumeCache};
use crate::canonical::canonical_key;
use crate::forest::{choose_split_pivot, EdgeId, Forest, VertexId};
use crate::VolumeError;

/// Exact Euclidean volume of `Q(F)`; 1 for the empty forest.
pub fn q_volume(forest: &Forest, cache: &VolumeCache) -> Rational {
    let components = forest.component_vertex_sets();
    match components.len() {
        0 => Rational::one(),
        1 => q_volume_tree(forest, cache),
        _ => components
            .iter()
            .map(|c| q_volume_tree(&forest.restricted_to(c), cache))
            .fold(Rational::one(), |acc, v| &acc * &v),
    }
}

fn q_volume_tree(tree: &Forest, cache: &VolumeCache) -> Rational {
    let key = canonical_key(tree);
    if let Some(hit) = cache.lookup(CacheKind::QSplitting, &key) {
        return hit;
    }
    let value = if tree.inner_edges().is_empty() {
        // a tree without inner edges is a star (possibly a single edge):
        // Q is the unit simplex scaled into the cube
        Rational::from_integer(factorial(tree.edge_count()))
            .recip()
            .expect("n! is nonzero")
    } else {
        let pivot = choose_split_pivot(tree, 1).expect("a tree with an inner edge has a pivot");
        let moved = tree
            .delete_edge(pivot.pendant)
            .and_then(|f| f.add_leaves(pivot.w, 1))
            .expect("pivot edges exist");
        let cut = tree
            .delete_edge(pivot.inner_edge)
            .and_then(|f| f.add_leaves(pivot.w, 1))
            .expect("pivot edges exist");
        &q_volume(&cut, cache) - &q_volume(&moved, cache)
    };
    cache.store(CacheKind::QSplitting, key, value.clone());
    value
}

/// Every distinct forest (by canonical key) the splitting recursion visits
/// when evaluating `q_volume(forest)`, the start included. Verification
/// surface: the oracle equivalence suite counts lattice points for each.
pub fn q_recursion_trace(forest: &Forest) -> Vec<Forest> {
    let mut seen = std::collections::BTreeMap::new();
    let mut work = vec![forest.clone()];
    while let Some(next) = work.pop() {
        let key = canonical_key(&next);
        if seen.contains_key(&key) {
            continue;
        }
        for component in next.component_vertex_sets() {
            let tree = next.restricted_to(&component);
            if tree.inner_edges().is_empty() {
                continue;
            }
            let pivot = choose_split_pivot(&tree, 1).expect("tree has an inner edge");
            work.push(
                tree.delete_edge(pivot.pendant)
                    .and_then(|f| f.add_leaves(pivot.w, 1))
                    .expect("pivot edges exist"),
            );
            work.push(
                tree.delete_edge(pivot.inner_edge)
                    .and_then(|f| f.add_leaves(pivot.w, 1))
                    .expect("pivot edges exist"),
            );
        }
        seen.insert(key, next);
    }
    seen.into_values().collect()
}

/// An edge set with exactly one member incident to every inner vertex, plus
/// every single-edge component (whose `x_e <= 1` bound is a genuine facet).
/// Deterministic complete backtracking search; `None` when no cover exists.
pub fn find_edge_cover(forest: &Forest) -> Option<BTreeSet<EdgeId>> {
    let mut found = None;
    search_covers(forest, &mut |cover| {
        found = Some(cover.clone());
        true
    });
    found
}

/// Every valid cover, for exhaustive independence tests on small forests.
pub fn enumerate_edge_covers(forest: &Forest) -> Vec<BTreeSet<EdgeId>> {
    let mut all = Vec::new();
    search_covers(forest, &mut |cover| {
        all.push(cover.clone());
        false
    });
    all
}

/// Backtracking over inner vertices in id order; calls `emit` on every
/// solution and stops early if it returns true.
fn search_covers(forest: &Forest, emit: &mut impl FnMut(&BTreeSet<EdgeId>) -> bool) {
    let mandatory: BTreeSet<EdgeId> = forest
        .edge_ids()
        .filter(|&e| {
            let (u, v) = forest.endpoints(e).unwrap();
            forest.is_leaf(u) && forest.is_leaf(v)
        })
        .collect();
    let inner = forest.inner_vertices();
    let mut chosen = mandatory;
    let mut covered: BTreeSet<VertexId> = BTreeSet::new();

    fn recurse(
        forest: &Forest,
        inner: &[VertexId],
        at: usize,
        chosen: &mut BTreeSet<EdgeId>,
        covered: &mut BTreeSet<VertexId>,
        emit: &mut impl FnMut(&BTreeSet<EdgeId>) -> bool,
    ) -> bool {
        let Some(&v) = inner.get(at) else {
            return emit(chosen);
        };
        if covered.contains(&v) {
            return recurse(forest, inner, at + 1, chosen, covered, emit);
        }
        for (e, n) in forest.incident_edges(v) {
            if forest.is_inner(n) && covered.contains(&n) {
                continue;
            }
            chosen.insert(e);
            covered.insert(v);
            let pair = forest.is_inner(n) && covered.insert(n);
            if recurse(forest, inner, at + 1, chosen, covered, emit) {
                return true;
            }
            chosen.remove(&e);
            covered.remove(&v);
            if pair {
                covered.remove(&n);
            }
        }
        false
    }

    recurse(forest, &inner, 0, &mut chosen, &mut covered, emit);
}

/// Independent route for `V(Q(F))` through [`find_edge_cover`]; fails with
/// [`VolumeError::CoverNotFound`] if some recursion level has no cover, in
/// which case callers fall back to [`q_volume`].
pub fn q_volume_via_edge_cover(
    forest: &Forest,
    cache: &VolumeCache,
) -> Result<Rational, VolumeError> {
    if forest.is_empty() {
        return Ok(Rational::one());
    }
    let key = canonical_key(forest);
    if let Some(hit) = cache.lookup(CacheKind::QEdgeCover, &key) {
        return Ok(hit);
    }
    let cover = find_edge_cover(forest).ok_or(VolumeError::CoverNotFound)?;
    let mut sum = Rational::zero();
    for &e in &cover {
        let smaller = forest.delete_edge(e)?;
        sum = &sum + &q_volume_via_edge_cover(&smaller, cache)?;
    }
    let value = sum
        .checked_div(&Rational::from_integer(forest.edge_count() as i64))
        .expect("forest is nonempty");
    cache.store(CacheKind::QEdgeCover, key, value.clone());
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_forest;

    fn q(spec: &str) -> Rational {
        q_volume(&parse_forest(spec).unwrap(), &VolumeCache::new())
    }

    #[test]
    fn stars_are_simplices() {
        for n in 1..=7 {
            let star = Forest::star(n);
            assert_eq!(
                q_volume(&star, &VolumeCache::new()),
                Rational::from_integer(factorial(n)).recip().unwrap(),
                "star with {n} edges"
            );
        }
    }

    #[test]
    fn worked_values() {
        assert_eq!(q("S(2,3)"), Rational::fraction(1, 72));
        assert_eq!(q("S(2,1,2)"), Rational::fraction(71, 5040));
        assert_eq!(q("(*,*)+S(1,2)"), Rational::fraction(1, 16));
        assert_eq!(
            q_volume(&Forest::empty(), &VolumeCache::new()),
            Rational::one()
        );
    }

    #[test]
    fn double_star_closed_form() {
        for m in 1..=5usize {
            for n in 1..=5usize {
                let expected = Rational::new(1, factorial(m) * factorial(n) * (m + n + 1)).unwrap();
                assert_eq!(
                    q_volume(&Forest::path_tree(&[m, n]), &VolumeCache::new()),
                    expected
                );
            }
        }
    }

    #[test]
    fn cover_route_agrees_and_handles_stars() {
        let cache = VolumeCache::new();
        for spec in ["S(2,1,2)", "S(3,1,2)", "(*,*,*)", "(*)", "(*,*)+S(1,2)"] {
            let f = parse_forest(spec).unwrap();
            assert_eq!(
                q_volume_via_edge_cover(&f, &cache).unwrap(),
                q_volume(&f, &cache),
                "{spec}"
            );
        }
        assert_eq!(
            q_volume_via_edge_cover(&Forest::empty(), &cache).unwrap(),
            Rational::one()
        );
    }

    #[test]
    fn covers_hit_every_inner_vertex_exactly_once() {
        for spec in ["(*,*,*,*)", "S(2,2)", "S(2,1,2)", "(*,*)+(*)"] {
            let f = parse_forest(spec).unwrap();
            let cover = find_edge_cover(&f).unwrap();
            for v in f.inner_vertices() {
                let hits = f
                    .incident_edges(v)
                    .filter(|(e, _)| cover.contains(e))
                    .count();
                assert_eq!(hits, 1, "{spec} at {v}");
            }
        }
    }

    #[test]
    fn all_covers_give_the_same_volume() {
        let cache = VolumeCache::new();
        let f = parse_forest("S(2,2)").unwrap();
        let covers = enumerate_edge_covers(&f);
        // one edge per hub: the inner edge alone, or one pendant on each side
        assert_eq!(covers.len(), 5);
        let reference = q_volume(&f, &cache);
        for cover in covers {
            let mut sum = Rational::zero();
            for &e in &cover {
                sum = &sum + &q_volume_via_edge_cover(&f.delete_edge(e).unwrap(), &cache).unwrap();
            }
            let value = sum
                .checked_div(&Rational::from_integer(f.edge_count() as i64))
                .unwrap();
            assert_eq!(value, reference);
        }
    }

    #[test]
    fn pendant_exchange_identity() {
        // for adjacent hubs with pendants e1, e2 and joining edge e0:
        // V(Q(F\e1)) + V(Q(F\e2)) = V(Q(F\e0))
        let cache = VolumeCache::new();
        for spec in ["S(2,2)", "S(3,2)", "S(2,1,2)", "S(2,2,2)"] {
            let f = parse_forest(spec).unwrap();
            for e0 in f.inner_edges() {
                let (v1, v2) = f.endpoints(e0).unwrap();
                let (p1, p2) = (f.pendant_edges_at(v1), f.pendant_edges_at(v2));
                if p1.is_empty() || p2.is_empty() {
                    continue;
                }
                let lhs = &q_volume(&f.delete_edge(p1[0]).unwrap(), &cache)
                    + &q_volume(&f.delete_edge(p2[0]).unwrap(), &cache);
                assert_eq!(lhs, q_volume(&f.delete_edge(e0).unwrap(), &cache), "{spec}");
            }
        }
    }

    #[test]
    fn product_law_over_components() {
        let cache = VolumeCache::new();
        let combined = parse_forest("S(2,1,2)+(*,*,*)+(*)").unwrap();
        let product = combined
            .components()
            .iter()
            .map(|c| q_volume(c, &cache))
            .fold(Rational::one(), |acc, v| &acc * &v);
        assert_eq!(q_volume(&combined, &cache), product);
    }

    #[test]
    fn lattice_volumes_are_positive_integers() {
        let cache = VolumeCache::new();
        for spec in ["(*)", "(*,*)", "S(1,1)", "S(2,1,2)", "S(3,1,1,2)"] {
            let f = parse_forest(spec).unwrap();
            let scaled = &q_volume(&f, &cache) * &Rational::from_integer(factorial(f.edge_count()));
            let n = scaled.to_integer().expect("lattice volume is integral");
            assert!(n > 0.into(), "{spec}");
        }
    }
}
